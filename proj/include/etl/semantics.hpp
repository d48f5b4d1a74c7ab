#pragma once

// semantics.hpp
//
// Boolean and quantitative satisfaction of formulas over a bounded
// trace window [i, T]. Temporal operators quantify over the window
// only; Until holds at i iff its right operand holds at some j in
// [i, T] with the left operand holding at every k in [i, j).
//
// The satisfaction score maps predicates to their signed margin
// f(z) = +-(eps - dist) and lifts them through the operators with
// min / max / inf / sup. The Until score is
//   sup_{j in [i,T]} min( score(rhs, j), inf_{k in [i,j)} score(lhs, k) )
// with the empty infimum at j = i taken as +infinity, and score(true)
// is +infinity, so normalize() preserves scores exactly.
//
// Scores can be computed from a trace (predicates evaluated through
// their target's metric) or from a caller-supplied signal giving the
// raw predicate values per time index.

#include <cstddef>
#include <functional>
#include <limits>

#include "etl/core.hpp"
#include "etl/logic.hpp"
#include "etl/metrics.hpp"

namespace etl {

/// Signed predicate margin at one embedding:
/// reach -> eps - dist(z, target), avoid -> dist(z, target) - eps.
inline double eval_pred(const Predicate& p, const Embedding& z) {
  const double d = distance(z, p.target.embedding, p.target.metric);
  return p.sense == Sense::reach ? p.threshold - d : d - p.threshold;
}

// Evaluation window over a trace. Holds a pointer; the trace must
// outlive the context.
struct ScoreContext {
  const Trace* trace;
  std::size_t start;  // i
  std::size_t bound;  // T, inclusive

  ScoreContext(const Trace& t, std::size_t i, std::size_t T)
      : trace(&t), start(i), bound(T) {
    if (t.empty())
      throw Error(Errc::index_out_of_range,
                  "semantic evaluation needs a non-empty trace");
    if (i > T || T >= t.size())
      throw Error(Errc::index_out_of_range,
                  "window [" + std::to_string(i) + ", " + std::to_string(T) +
                      "] of trace length " + std::to_string(t.size()));
  }

  /// Full-trace window [0, len-1].
  explicit ScoreContext(const Trace& t) : ScoreContext(t, 0, t.size() - 1) {}
};

/// Value of a predicate's margin function at a time index. Lets tests
/// and tools feed raw signal values without going through a metric.
using PredicateSignal = std::function<double(const Predicate&, std::size_t)>;

inline PredicateSignal trace_signal(const Trace& trace) {
  return [&trace](const Predicate& p, std::size_t t) {
    return eval_pred(p, trace.at(t));
  };
}

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double score_rec(const Formula& f, std::size_t i, std::size_t T,
                        const PredicateSignal& sig) {
  switch (f.op()) {
    case Op::pred:
      return sig(f.pred(), i);
    case Op::truth:
      return kInf;
    case Op::negation:
      return -score_rec(f.child(), i, T, sig);
    case Op::conjunction:
      return std::min(score_rec(f.lhs(), i, T, sig),
                      score_rec(f.rhs(), i, T, sig));
    case Op::disjunction:
      return std::max(score_rec(f.lhs(), i, T, sig),
                      score_rec(f.rhs(), i, T, sig));
    case Op::eventually: {
      double best = -kInf;
      for (std::size_t k = i; k <= T; ++k)
        best = std::max(best, score_rec(f.child(), k, T, sig));
      return best;
    }
    case Op::always: {
      double worst = kInf;
      for (std::size_t k = i; k <= T; ++k)
        worst = std::min(worst, score_rec(f.child(), k, T, sig));
      return worst;
    }
    case Op::until: {
      // Running prefix infimum of the left operand over [i, j).
      double best = -kInf;
      double prefix = kInf;
      for (std::size_t j = i; j <= T; ++j) {
        best = std::max(best, std::min(score_rec(f.rhs(), j, T, sig), prefix));
        prefix = std::min(prefix, score_rec(f.lhs(), j, T, sig));
      }
      return best;
    }
  }
  throw Error(Errc::schema_error, "unknown formula operator");
}

inline bool sat_rec(const Formula& f, std::size_t i, std::size_t T,
                    const PredicateSignal& sig) {
  switch (f.op()) {
    case Op::pred:
      return sig(f.pred(), i) > 0.0;
    case Op::truth:
      return true;
    case Op::negation:
      return !sat_rec(f.child(), i, T, sig);
    case Op::conjunction:
      return sat_rec(f.lhs(), i, T, sig) && sat_rec(f.rhs(), i, T, sig);
    case Op::disjunction:
      return sat_rec(f.lhs(), i, T, sig) || sat_rec(f.rhs(), i, T, sig);
    case Op::eventually:
      for (std::size_t k = i; k <= T; ++k)
        if (sat_rec(f.child(), k, T, sig)) return true;
      return false;
    case Op::always:
      for (std::size_t k = i; k <= T; ++k)
        if (!sat_rec(f.child(), k, T, sig)) return false;
      return true;
    case Op::until:
      for (std::size_t j = i; j <= T; ++j) {
        if (sat_rec(f.rhs(), j, T, sig)) return true;
        if (!sat_rec(f.lhs(), j, T, sig)) return false;
      }
      return false;
  }
  throw Error(Errc::schema_error, "unknown formula operator");
}

}  // namespace detail

/// Satisfaction score over [i, T] with predicate values from `sig`.
inline double score(const Formula& f, std::size_t i, std::size_t T,
                    const PredicateSignal& sig) {
  if (i > T)
    throw Error(Errc::index_out_of_range, "window start exceeds bound");
  return detail::score_rec(f, i, T, sig);
}

/// Satisfaction score of a trace window.
inline double score(const Formula& f, const ScoreContext& ctx) {
  return detail::score_rec(f, ctx.start, ctx.bound,
                           trace_signal(*ctx.trace));
}

/// Boolean bounded satisfaction with predicate values from `sig`.
inline bool sat(const Formula& f, std::size_t i, std::size_t T,
                const PredicateSignal& sig) {
  if (i > T)
    throw Error(Errc::index_out_of_range, "window start exceeds bound");
  return detail::sat_rec(f, i, T, sig);
}

/// Boolean bounded satisfaction of a trace window.
inline bool sat(const Formula& f, const ScoreContext& ctx) {
  return detail::sat_rec(f, ctx.start, ctx.bound, trace_signal(*ctx.trace));
}

// ── brute-force oracle ────────────────────────────────────────────
//
// Independent cross-check for score: normalizes the formula to the
// {Pred, True, Not, And, Until} core first, then evaluates Until by
// materializing the candidate value for every split index and taking
// the maximum of the list. Shares only eval_pred with score().

namespace detail {

constexpr std::size_t kOracleMaxWindow = 12;
constexpr std::size_t kOracleMaxDepth = 6;

inline double oracle_rec(const Formula& f, std::size_t i, std::size_t T,
                         const PredicateSignal& sig) {
  switch (f.op()) {
    case Op::pred:
      return sig(f.pred(), i);
    case Op::truth:
      return kInf;
    case Op::negation:
      return -oracle_rec(f.child(), i, T, sig);
    case Op::conjunction: {
      const double a = oracle_rec(f.lhs(), i, T, sig);
      const double b = oracle_rec(f.rhs(), i, T, sig);
      return b < a ? b : a;
    }
    case Op::until: {
      std::vector<double> candidates;
      for (std::size_t j = i; j <= T; ++j) {
        double value = oracle_rec(f.rhs(), j, T, sig);
        for (std::size_t k = i; k < j; ++k) {
          const double left = oracle_rec(f.lhs(), k, T, sig);
          if (left < value) value = left;
        }
        candidates.push_back(value);
      }
      double best = candidates.front();
      for (double c : candidates)
        if (c > best) best = c;
      return best;
    }
    default:
      throw Error(Errc::schema_error,
                  "oracle expects a normalized formula core");
  }
}

}  // namespace detail

/// Brute-force score for cross-checking; window length <= 12 and input
/// formula depth <= 6.
inline double oracle_score(const Formula& f, std::size_t i, std::size_t T,
                           const PredicateSignal& sig) {
  if (i > T)
    throw Error(Errc::index_out_of_range, "window start exceeds bound");
  if (T - i + 1 > detail::kOracleMaxWindow)
    throw Error(Errc::window_too_large,
                "oracle window limit is " +
                    std::to_string(detail::kOracleMaxWindow) + ", got " +
                    std::to_string(T - i + 1));
  if (f.depth() > detail::kOracleMaxDepth)
    throw Error(Errc::formula_too_deep,
                "oracle depth limit is " +
                    std::to_string(detail::kOracleMaxDepth));
  return detail::oracle_rec(normalize(f), i, T, sig);
}

inline double oracle_score(const Formula& f, const ScoreContext& ctx) {
  return oracle_score(f, ctx.start, ctx.bound, trace_signal(*ctx.trace));
}

}  // namespace etl
