#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "cex/core/dsl.hpp"
#include "helpers.hpp"

using namespace cex;
using testutil::load_fixture;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Two bundles describe the same model: same spaces, same solutions, same
/// probability weights, same context sets.
void check_semantically_equal(const ModelBundle& a, const ModelBundle& b) {
  const CausalModel& ma = a.model;
  const CausalModel& mb = b.model;
  REQUIRE(ma.var_count() == mb.var_count());
  REQUIRE(ma.context_space() == mb.context_space());
  for (int i = 0; i < ma.var_count(); ++i) {
    CHECK(ma.var(i).name == mb.var(i).name);
    CHECK(ma.var(i).range.values == mb.var(i).range.values);
  }
  for (ContextCode u = 0; u < ma.context_space(); ++u) CHECK(ma.evaluate(u) == mb.evaluate(u));
  CHECK(a.contexts == b.contexts);
  CHECK(a.distribution.has_value() == b.distribution.has_value());
  if (a.distribution) CHECK(a.distribution->weights == b.distribution->weights);
  CHECK(a.k_default.has_value() == b.k_default.has_value());
  if (a.k_default) {
    CHECK(a.k_default->all == b.k_default->all);
    CHECK(a.k_default->codes == b.k_default->codes);
  }
  REQUIRE(a.k_named.size() == b.k_named.size());
  for (std::size_t i = 0; i < a.k_named.size(); ++i) {
    CHECK(a.k_named[i].first == b.k_named[i].first);
    CHECK(a.k_named[i].second.codes == b.k_named[i].second.codes);
  }
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_model(text);
  } catch (const CexError& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::SyntaxError;
}

}  // namespace

TEST_CASE("serialization is a semantic fixed point on the whole corpus") {
  for (const char* name : {"voting.cm", "example1.cm", "arsonists.cm", "suzy.cm",
                           "coupled_pixels.cm", "parity5.cm", "tumor9.cm"}) {
    CAPTURE(name);
    ModelBundle original = parse_model(slurp(testutil::corpus_path(name)));
    std::string once = serialize_model(original);
    ModelBundle reparsed = parse_model(once);
    check_semantically_equal(original, reparsed);
    CHECK(serialize_model(reparsed) == once);  // fixed point after one round
    CHECK(once.find('\r') == std::string::npos);
    CHECK(!once.empty());
    CHECK(once.back() == '\n');
  }
}

TEST_CASE("the shipped fixtures are already canonical") {
  for (const char* name : {"parity5.cm", "tumor9.cm"}) {
    CAPTURE(name);
    std::string text = slurp(testutil::corpus_path(name));
    CHECK(serialize_model(parse_model(text)) == text);
  }
}

TEST_CASE("load_model_file reports missing files") {
  try {
    load_model_file("/nonexistent/nope.cm");
    FAIL("expected IoError");
  } catch (const CexError& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("parser rejects malformed models with located errors") {
  // unknown identifier in an equation, with a source span
  try {
    parse_model("model m {\n  exo U: {0,1};\n  endo A: {0,1};\n  eq A := Bogus;\n}");
    FAIL("expected UnknownIdentifier");
  } catch (const CexError& e) {
    CHECK(e.code() == ErrorCode::UnknownIdentifier);
    REQUIRE(e.span().has_value());
    CHECK(e.span()->line == 4);
    CHECK(e.span()->column == 11);
    CHECK(e.span()->length == 5);
  }

  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; eq A := U") ==
        ErrorCode::SyntaxError);
  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; eq A := U; context c { U = 7 } }") ==
        ErrorCode::ValueOutOfRange);
  CHECK(code_of("model m { exo U: {0,1}; context c { V = 0 } endo A: {0,1}; eq A := U; }") ==
        ErrorCode::UnknownVariable);
  // K referencing an unknown context
  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; eq A := U; K = { nope }; }") ==
        ErrorCode::UnknownIdentifier);
  // ranges must be non-empty and duplicate-free
  CHECK(code_of("model m { exo U: {0,0}; endo A: {0,1}; eq A := U; }") ==
        ErrorCode::RangeViolation);
}

TEST_CASE("probability blocks must cover the space exactly") {
  const char* missing =
      "model m { exo U: {0,1}; endo A: {0,1}; eq A := U;\n"
      "  context a { U = 0 }\n  context b { U = 1 }\n"
      "  prob { a: 1/2 }\n}";
  CHECK(code_of(missing) == ErrorCode::ProbSumError);

  const char* overfull =
      "model m { exo U: {0,1}; endo A: {0,1}; eq A := U;\n"
      "  context a { U = 0 }\n  context b { U = 1 }\n"
      "  prob { a: 2/3, b: 2/3 }\n}";
  CHECK(code_of(overfull) == ErrorCode::ProbSumError);

  // exact decimals normalize to rationals
  ModelBundle ok = parse_model(
      "model m { exo U: {0,1}; endo A: {0,1}; eq A := U;\n"
      "  context a { U = 0 }\n  context b { U = 1 }\n"
      "  prob { a: 0.9, b: 0.1 }\n}");
  REQUIRE(ok.distribution.has_value());
  CHECK(ok.distribution->probability_of(0) == Rat(9, 10));
  CHECK(ok.distribution->probability_of(1) == Rat(1, 10));
  CHECK(serialize_model(ok).find("9/10") != std::string::npos);
}

TEST_CASE("table equations parse, evaluate and round-trip") {
  const char* text =
      "model m {\n"
      "  exo U: {0, 1, 2};\n"
      "  endo A: {0, 1};\n"
      "  table A(U) {\n"
      "    0 -> 1;\n"
      "    default -> 0;\n"
      "  }\n"
      "}\n";
  ModelBundle b = parse_model(text);
  CHECK(b.model.evaluate(0)[1] == 1);
  CHECK(b.model.evaluate(1)[1] == 0);
  CHECK(b.model.evaluate(2)[1] == 0);
  std::string out = serialize_model(b);
  CHECK(out.find("table A(U)") != std::string::npos);
  CHECK(out.find("default -> 0;") != std::string::npos);
  check_semantically_equal(b, parse_model(out));

  // the default row is mandatory
  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; table A(U) { 0 -> 1; } }") ==
        ErrorCode::SyntaxError);
}

TEST_CASE("formula parsing honors precedence and rejects nesting") {
  ModelBundle b = load_fixture("voting.cm");
  const CausalModel& m = b.model;
  ContextCode u100 = *b.context_by_name("u100");

  CHECK(satisfies(m, u100, parse_formula("A=1 & B=0 | C=1", m)));   // (& before |)
  CHECK(satisfies(m, u100, parse_formula("~A=0", m)));
  CHECK(satisfies(m, u100, parse_formula("~(A=1 & B=1)", m)));
  CHECK(satisfies(m, u100, parse_formula("[B<-1](WIN=1 & B=1)", m)));
  CHECK(!satisfies(m, u100, parse_formula("[A<-0, B<-0](WIN=1)", m)));

  try {
    parse_formula("[A<-0]([B<-1](WIN=1))", m);
    FAIL("expected NestedIntervention");
  } catch (const CexError& e) {
    CHECK(e.code() == ErrorCode::NestedIntervention);
  }
  CHECK_THROWS_AS(parse_formula("NOPE=1", m), CexError);
  CHECK_THROWS_AS(parse_formula("A=9", m), CexError);
  CHECK_THROWS_AS(parse_formula("A=1 &", m), CexError);

  // conjunction surface: primitives only
  Conjunction c = parse_conjunction("B=1 & A=1", m);
  CHECK(conjunction_str(m, c) == "A=1 & B=1");  // canonical ordinal order
  CHECK_THROWS_AS(parse_conjunction("A=1 | B=1", m), CexError);
  CHECK_THROWS_AS(parse_conjunction("A=1 & A=0", m), CexError);
}

TEST_CASE("named and default context sets resolve by name") {
  ModelBundle b = load_fixture("coupled_pixels.cm");
  REQUIRE(b.k_default.has_value());
  CHECK(b.k_default->all);
  auto lit_half = b.k_by_name("lit_half");
  REQUIRE(lit_half.has_value());
  CHECK(lit_half->codes.size() == 3);
  CHECK(!b.k_by_name("nope").has_value());
  CHECK(!b.context_by_name("nope").has_value());

  // duplicate declarations are rejected
  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; eq A := U;\n"
                "  context a { U = 0 }\n  context a { U = 1 }\n}") ==
        ErrorCode::RangeViolation);
  CHECK(code_of("model m { exo U: {0,1}; endo A: {0,1}; eq A := U;\n"
                "  context a { U = 0 }\n  K s = { a }; K s = { a };\n}") ==
        ErrorCode::SyntaxError);
}

TEST_CASE("serialization sorts declarations deterministically") {
  ModelBundle b = parse_model(
      "model zigzag {\n"
      "  endo Z: {0, 1};\n"
      "  exo UB: {0, 1};\n"
      "  exo UA: {0, 1};\n"
      "  endo A: {0, 1};\n"
      "  eq Z := A;\n"
      "  eq A := UA || UB;\n"
      "}\n");
  std::string out = serialize_model(b);
  CHECK(out.find("exo UA") < out.find("exo UB"));
  CHECK(out.find("exo UB") < out.find("endo A"));
  CHECK(out.find("endo A") < out.find("endo Z"));
  CHECK(out.find("eq A :=") < out.find("eq Z :="));
  check_semantically_equal(b, parse_model(out));
}

TEST_CASE("comments and whitespace are immaterial") {
  ModelBundle a = parse_model(
      "// leading note\nmodel m { exo U: {0,1}; // trail\n endo A: {0,1}; eq A := U; }");
  ModelBundle b = parse_model("model m {exo U:{0,1};endo A:{0,1};eq A:=U;}");
  CHECK(serialize_model(a) == serialize_model(b));
}
