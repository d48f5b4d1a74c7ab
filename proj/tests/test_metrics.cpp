#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "etl/metrics.hpp"
#include "generators.hpp"

using namespace etl;
using testgen::TestRng;

namespace {
Embedding vec(std::vector<double> v) { return Embedding::vector(std::move(v)); }
Embedding patches(std::vector<std::vector<double>> rows) {
  return Embedding::patch_set(std::move(rows));
}
}  // namespace

TEST_CASE("l1 distance") {
  CHECK(dist_l1(vec({1, 2}), vec({1, 2})) == 0.0);
  CHECK(dist_l1(vec({0, 0}), vec({3, 4})) == 7.0);
  CHECK(dist_l1(vec({1}), vec({-2})) == 3.0);
  CHECK_THROWS_AS(dist_l1(vec({1}), vec({1, 2})), Error);
}

TEST_CASE("l2 distance") {
  CHECK(dist_l2(vec({5, 5}), vec({5, 5})) == 0.0);
  CHECK(dist_l2(vec({0, 0}), vec({3, 4})) == 5.0);
  CHECK(dist_l2(vec({1, 1, 1}), vec({2, 2, 2})) ==
        Catch::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("cosine distance") {
  CHECK(dist_cosine(vec({2, 0}), vec({5, 0})) == 0.0);
  CHECK(dist_cosine(vec({1, 0}), vec({0, 1})) == 1.0);
  CHECK(dist_cosine(vec({1, 0}), vec({-1, 0})) == 2.0);
  CHECK_THROWS_MATCHES(dist_cosine(vec({0, 0}), vec({1, 0})), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::zero_vector;
                       }));
}

TEST_CASE("chamfer distance") {
  CHECK(dist_chamfer(patches({{0, 0}}), patches({{0, 0}})) == 0.0);
  CHECK(dist_chamfer(patches({{0, 0}}), patches({{1, 0}})) == 2.0);
  CHECK(dist_chamfer(patches({{0, 0}, {2, 0}}), patches({{1, 0}})) == 3.0);

  CHECK_THROWS_MATCHES(dist_chamfer(vec({1, 0}), vec({0, 1})), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::incompatible_metric;
                       }));
  CHECK_THROWS_AS(dist_chamfer(patches({{0, 0}}), patches({{0, 0, 0}})),
                  Error);
}

TEST_CASE("patch sets flatten row-major under l1/l2/cosine") {
  const Embedding a = patches({{1, 2}, {3, 4}});
  const Embedding b = patches({{1, 2}, {3, 8}});
  CHECK(dist_l1(a, b) == 4.0);
  CHECK(dist_l2(a, b) == 4.0);

  // Mismatched patch counts are an error even when total size matches.
  const Embedding c = patches({{1, 2, 3, 4}});
  CHECK_THROWS_AS(dist_l1(a, c), Error);
  // Mixed kinds are an error too.
  CHECK_THROWS_AS(dist_l2(a, vec({1, 2, 3, 4})), Error);
}

TEST_CASE("metric identity, symmetry and nonnegativity on random pairs") {
  TestRng rng(101);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t dim = 1 + rng.index(6);
    const std::size_t n = 1 + rng.index(4);
    for (Metric m : {Metric::l1, Metric::l2, Metric::cosine, Metric::chamfer}) {
      const Kind kind = m == Metric::chamfer ? Kind::patch_set
                        : rng.chance(0.5)    ? Kind::vector
                                             : Kind::patch_set;
      const Embedding a = testgen::random_embedding(rng, kind, n, dim);
      const Embedding b = testgen::random_embedding(rng, kind, n, dim);
      CHECK(distance(a, a, m) == 0.0);
      CHECK(distance(a, b, m) == distance(b, a, m));
      CHECK(distance(a, b, m) >= 0.0);
    }
  }
}

TEST_CASE("l2 triangle inequality on random triples") {
  TestRng rng(102);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t dim = 1 + rng.index(8);
    const Embedding a = testgen::random_vector_embedding(rng, dim, 0.0);
    const Embedding b = testgen::random_vector_embedding(rng, dim, 0.0);
    const Embedding c = testgen::random_vector_embedding(rng, dim, 0.0);
    CHECK(dist_l2(a, c) <= dist_l2(a, b) + dist_l2(b, c) + 1e-9);
  }
}

TEST_CASE("chamfer violates the triangle inequality") {
  // Squared inner terms break it: d(a,c) = 8 > d(a,b) + d(b,c) = 4.
  const Embedding a = patches({{0, 0}});
  const Embedding b = patches({{1, 0}});
  const Embedding c = patches({{2, 0}});
  CHECK(dist_chamfer(a, c) > dist_chamfer(a, b) + dist_chamfer(b, c));
}

TEST_CASE("cosine distance is scale invariant") {
  TestRng rng(103);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t dim = 1 + rng.index(8);
    const Embedding a = testgen::random_vector_embedding(rng, dim);
    const Embedding b = testgen::random_vector_embedding(rng, dim);
    const double scale = rng.uniform(0.01, 50.0);
    std::vector<double> scaled(a.flat().begin(), a.flat().end());
    for (auto& v : scaled) v *= scale;
    CHECK(std::abs(dist_cosine(Embedding::vector(scaled), b) -
                   dist_cosine(a, b)) <= 1e-9);
  }
}

TEST_CASE("pairwise summation path on long vectors") {
  // 4000 entries forces the tree-summation branch.
  std::vector<double> ones(4000, 1.0), zeros(4000, 0.0);
  CHECK(dist_l1(vec(ones), vec(zeros)) == 4000.0);
  CHECK(dist_l2(vec(ones), vec(zeros)) ==
        Catch::Approx(std::sqrt(4000.0)).epsilon(1e-12));
  CHECK(dist_cosine(vec(ones), vec(ones)) ==
        Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("metric names") {
  CHECK(parse_metric("l1") == Metric::l1);
  CHECK(parse_metric("chamfer") == Metric::chamfer);
  CHECK_THROWS_AS(parse_metric("euclid"), Error);
  CHECK(std::string(metric_name(Metric::cosine)) == "cosine");
}
