#pragma once

// metrics.hpp
//
// The four embedding distance functions: L1, L2, cosine distance
// (1 - cosine similarity) and chamfer distance over patch sets.
// All are symmetric, nonnegative, and zero on identical inputs.
// Cosine is folded to a distance so that every metric reads
// "smaller = more similar"; chamfer keeps squared inner terms and is
// a quasi-metric (no triangle inequality).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "etl/core.hpp"

namespace etl {

enum class Metric { l1, l2, cosine, chamfer };

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::l1: return "l1";
    case Metric::l2: return "l2";
    case Metric::cosine: return "cosine";
    case Metric::chamfer: return "chamfer";
  }
  return "unknown";
}

inline Metric parse_metric(const std::string& name) {
  if (name == "l1") return Metric::l1;
  if (name == "l2") return Metric::l2;
  if (name == "cosine") return Metric::cosine;
  if (name == "chamfer") return Metric::chamfer;
  throw Error(Errc::schema_error, "unknown metric name '" + name + "'");
}

/// True when the metric can evaluate embeddings of this kind.
/// L1/L2/cosine flatten patch sets row-major; chamfer needs patch sets.
inline bool metric_compatible(Metric m, Kind k) {
  return m == Metric::chamfer ? k == Kind::patch_set : true;
}

namespace detail {

constexpr std::size_t kPairwiseThreshold = 1024;
constexpr double kNormTolerance = 1e-12;

// Pairwise (tree) summation; bounds rounding error on long vectors.
// Term i is f(i).
template <typename F>
double pairwise_sum(std::size_t begin, std::size_t end, const F& term) {
  const std::size_t n = end - begin;
  if (n <= kPairwiseThreshold) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

inline void require_elementwise_compatible(const Embedding& a,
                                           const Embedding& b) {
  if (!a.same_shape(b))
    throw Error(Errc::dimension_mismatch,
                std::string("cannot compare ") + kind_name(a.kind()) + " " +
                    std::to_string(a.patch_count()) + "x" +
                    std::to_string(a.dim()) + " with " + kind_name(b.kind()) +
                    " " + std::to_string(b.patch_count()) + "x" +
                    std::to_string(b.dim()));
}

inline double squared_l2(std::span<const double> a, std::span<const double> b) {
  return pairwise_sum(0, a.size(), [&](std::size_t i) {
    const double d = a[i] - b[i];
    return d * d;
  });
}

}  // namespace detail

/// Sum of absolute coordinate differences.
inline double dist_l1(const Embedding& a, const Embedding& b) {
  detail::require_elementwise_compatible(a, b);
  const auto x = a.flat();
  const auto y = b.flat();
  return detail::pairwise_sum(
      0, x.size(), [&](std::size_t i) { return std::abs(x[i] - y[i]); });
}

/// Euclidean distance between the flattened embeddings.
inline double dist_l2(const Embedding& a, const Embedding& b) {
  detail::require_elementwise_compatible(a, b);
  return std::sqrt(detail::squared_l2(a.flat(), b.flat()));
}

/// 1 - cosine similarity, in [0, 2]: 0 for parallel, 1 for orthogonal,
/// 2 for antiparallel vectors. Rejects inputs with norm <= 1e-12.
inline double dist_cosine(const Embedding& a, const Embedding& b) {
  detail::require_elementwise_compatible(a, b);
  const auto x = a.flat();
  const auto y = b.flat();
  const double dot = detail::pairwise_sum(
      0, x.size(), [&](std::size_t i) { return x[i] * y[i]; });
  const double nx2 = detail::pairwise_sum(
      0, x.size(), [&](std::size_t i) { return x[i] * x[i]; });
  const double ny2 = detail::pairwise_sum(
      0, y.size(), [&](std::size_t i) { return y[i] * y[i]; });
  const double tol2 = detail::kNormTolerance * detail::kNormTolerance;
  if (nx2 <= tol2 || ny2 <= tol2)
    throw Error(Errc::zero_vector,
                "cosine distance is undefined for (near-)zero vectors");
  // sqrt(nx2 * ny2) rather than sqrt(nx2) * sqrt(ny2): the rounded
  // sqrt of a rounded square is exact, so dist(a, a) is exactly zero.
  // Clamp round-off that would leave [0, 2] on near-(anti)parallel input.
  return std::clamp(1.0 - dot / std::sqrt(nx2 * ny2), 0.0, 2.0);
}

/// Bidirectional chamfer distance over patch sets with squared L2 inner
/// terms; zero when the two sets are equal as multisets.
inline double dist_chamfer(const Embedding& a, const Embedding& b) {
  if (a.kind() != Kind::patch_set || b.kind() != Kind::patch_set)
    throw Error(Errc::incompatible_metric,
                "chamfer distance requires patch-set embeddings");
  if (a.dim() != b.dim())
    throw Error(Errc::dimension_mismatch,
                "patch dimensions differ: " + std::to_string(a.dim()) +
                    " vs " + std::to_string(b.dim()));
  if (a.patch_count() == 0 || b.patch_count() == 0)
    throw Error(Errc::empty_set, "chamfer distance over an empty patch set");

  auto directed = [](const Embedding& from, const Embedding& to) {
    return detail::pairwise_sum(0, from.patch_count(), [&](std::size_t i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.patch_count(); ++j)
        best = std::min(best, detail::squared_l2(from.patch(i), to.patch(j)));
      return best;
    });
  };
  return directed(a, b) + directed(b, a);
}

/// Metric dispatch by tag.
inline double distance(const Embedding& a, const Embedding& b, Metric m) {
  switch (m) {
    case Metric::l1: return dist_l1(a, b);
    case Metric::l2: return dist_l2(a, b);
    case Metric::cosine: return dist_cosine(a, b);
    case Metric::chamfer: return dist_chamfer(a, b);
  }
  throw Error(Errc::schema_error, "unknown metric tag");
}

}  // namespace etl
