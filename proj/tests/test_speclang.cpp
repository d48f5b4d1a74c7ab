#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "etl/speclang.hpp"
#include "generators.hpp"

using namespace etl;

namespace {

Manifest two_goals() {
  Manifest m;
  m.add("g1", Embedding::vector({1.0, 0.0}), Metric::l2);
  m.add("g2", Embedding::vector({0.0, 1.0}), Metric::l2);
  return m;
}

TargetRef g1() { return TargetRef("g1", Embedding::vector({1.0, 0.0}), Metric::l2); }
TargetRef g2() { return TargetRef("g2", Embedding::vector({0.0, 1.0}), Metric::l2); }

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("parse reach formulas") {
  const Manifest m = two_goals();
  CHECK(parse("F (dist(z, g1) <= 0.5)", m) == reach(g1(), 0.5));
  // < and <= collapse to the same reach predicate.
  CHECK(parse("F (dist(z, g1) < 0.5)", m) == reach(g1(), 0.5));
  // > and >= collapse to avoid.
  CHECK(parse("G (dist(z, g2) > 0.3)", m) == always_avoid(g2(), 0.3));
  CHECK(parse("G (dist(z, g2) >= 0.3)", m) == always_avoid(g2(), 0.3));
}

TEST_CASE("parse sequenced visit") {
  const Formula f =
      parse("F ((dist(z, g1) <= 0.5) & F (dist(z, g2) <= 0.5))", two_goals());
  CHECK(f == sequenced_visit(g1(), 0.5, g2(), 0.5));
}

TEST_CASE("operator precedence and associativity") {
  const Manifest m = two_goals();
  const Formula p = parse("dist(z, g1) <= 1", m);
  const Formula q = parse("dist(z, g2) <= 1", m);

  // U binds tighter than &, & tighter than |.
  CHECK(parse("dist(z,g1)<=1 & dist(z,g2)<=1 U dist(z,g1)<=1", m) ==
        Formula::conjunction(p, Formula::until(q, p)));
  CHECK(parse("dist(z,g1)<=1 | dist(z,g2)<=1 & dist(z,g1)<=1", m) ==
        Formula::disjunction(p, Formula::conjunction(q, p)));
  // U is right-associative.
  CHECK(parse("dist(z,g1)<=1 U dist(z,g2)<=1 U dist(z,g1)<=1", m) ==
        Formula::until(p, Formula::until(q, p)));
  // Unary operators bind tightest.
  CHECK(parse("! F dist(z,g1)<=1 U dist(z,g2)<=1", m) ==
        Formula::until(Formula::negation(Formula::eventually(p)), q));
  CHECK(parse("true U dist(z,g2)<=1", m) ==
        Formula::until(Formula::truth(), q));
}

TEST_CASE("unicode aliases") {
  const Manifest m = two_goals();
  const Formula ascii = parse("! (F (dist(z,g1) <= 0.5) & G (dist(z,g2) > 0.1))"
                              " | true", m);
  const Formula uni = parse("¬ (◊ (dist(z,g1) <= 0.5) ∧ □ (dist(z,g2) > 0.1))"
                            " ∨ true", m);
  CHECK(ascii == uni);
}

TEST_CASE("parse errors carry positions") {
  const Manifest m = two_goals();

  try {
    parse("F (dist(z, gX) <= 0.5)", m);
    FAIL("expected unresolved identifier");
  } catch (const ParseError& e) {
    CHECK(e.code() == Errc::unresolved_identifier);
    CHECK(e.line() == 1);
    CHECK(e.col() == 12);
    CHECK(std::string(e.what()).find("gX") != std::string::npos);
  }

  try {
    parse("F (dist(z, g1) <= 0.5", m);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }

  try {
    parse("F\n  #", m);
    FAIL("expected lexer error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.col() == 3);
  }

  CHECK_THROWS_AS(parse("", m), ParseError);
  CHECK_THROWS_AS(parse("dist(z, g1) <= -0.5", m), ParseError);
  CHECK_THROWS_AS(parse("dist(g1, z) <= 0.5", m), ParseError);
}

TEST_CASE("numbers parse with fractions and exponents") {
  const Manifest m = two_goals();
  CHECK(parse("dist(z,g1) <= 1e-05", m).pred().threshold == 1e-05);
  CHECK(parse("dist(z,g1) <= 2", m).pred().threshold == 2.0);
  CHECK(parse("dist(z,g1) <= 0.125", m).pred().threshold == 0.125);
  CHECK(parse("dist(z,g1) <= 1.5E+2", m).pred().threshold == 150.0);
  CHECK_THROWS_AS(parse("dist(z,g1) <= 1.", m), ParseError);
  CHECK_THROWS_AS(parse("dist(z,g1) <= 1e", m), ParseError);
}

TEST_CASE("pretty prints the canonical form") {
  CHECK(pretty(reach(g1(), 0.5)) == "F ((dist(z, g1) <= 0.5))");
  CHECK(pretty(Formula::truth()) == "true");
  const Formula f = Formula::negation(
      Formula::predicate(Predicate(g1(), 0.3, Sense::avoid)));
  CHECK(parse(pretty(f), two_goals()) == f);
}

TEST_CASE("spec sources bundle text with their manifest") {
  const SpecSource src{"F (dist(z, g1) <= 0.5)", two_goals()};
  CHECK(parse(src) == reach(g1(), 0.5));
}

TEST_CASE("builder trees round-trip through pretty and parse") {
  const Manifest m = two_goals();
  const std::vector<Formula> built = {
      reach(g1(), 0.5),
      reach_avoid(g1(), 0.5, {{g2(), 0.1}, {g1(), 0.2}}),
      sequenced_visit(g1(), 0.5, g2(), 0.25),
      stability(g2(), 0.2),
  };
  for (const Formula& f : built) CHECK(parse(pretty(f), m) == f);
}

TEST_CASE("parse after pretty is the identity on random formulas") {
  testgen::TestRng rng(42);
  Manifest manifest;
  std::vector<TargetRef> pool;
  for (int i = 0; i < 4; ++i) {
    const Embedding e = testgen::random_vector_embedding(rng, 3);
    const std::string name = "t" + std::to_string(i);
    manifest.add(name, e, Metric::l2);
    pool.emplace_back(name, e, Metric::l2);
  }
  for (int iter = 0; iter < 500; ++iter) {
    const Formula f = testgen::random_formula(rng, pool, 1 + rng.index(5));
    CHECK(parse(pretty(f), manifest) == f);
  }
}

TEST_CASE("parser survives arbitrary bytes") {
  const Manifest m = two_goals();
  testgen::TestRng rng(1234);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string input;
    const std::size_t len = rng.index(64);
    for (std::size_t i = 0; i < len; ++i)
      input.push_back(static_cast<char>(rng.index(256)));
    try {
      (void)parse(input, m);
    } catch (const ParseError&) {
      // positioned failure is the expected outcome
    }
  }
}

TEST_CASE("manifest loading") {
  TempFile vec_file("spec_test_vec.json", R"({"kind":"vector","data":[1,2]})");
  TempFile patch_file("spec_test_patch.json",
                      R"({"kind":"patch_set","data":[[1,2],[3,4]]})");

  TempFile good("spec_test_manifest.json", R"({"targets":{
    "g": {"file": "spec_test_vec.json", "metric": "l2"},
    "p": {"file": "spec_test_patch.json", "metric": "l2"},
    "c": {"file": "spec_test_patch.json", "metric": "chamfer", "threshold": 0.5}
  }})");
  const Manifest m = load_manifest(good.path);
  CHECK(m.size() == 3);
  CHECK(m.find("g")->metric == Metric::l2);
  CHECK(m.find("p")->embedding.kind() == Kind::patch_set);
  CHECK(m.find("c")->default_threshold == 0.5);
  CHECK(m.target("c").name == "c");
  CHECK_THROWS_MATCHES(m.target("missing"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::unresolved_identifier;
                       }));

  TempFile bad("spec_test_bad.json", R"({"targets":{
    "v": {"file": "spec_test_vec.json", "metric": "chamfer"}
  }})");
  CHECK_THROWS_MATCHES(load_manifest(bad.path), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::incompatible_metric;
                       }));

  CHECK_THROWS_MATCHES(load_manifest("no_such_manifest.json"), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::io_error;
                       }));

  TempFile schema("spec_test_schema.json", R"({"wrong": 1})");
  CHECK_THROWS_MATCHES(load_manifest(schema.path), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::schema_error;
                       }));
}
