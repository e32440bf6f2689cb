#include <gtest/gtest.h>

#include "common.hpp"

using namespace viewlens;
using namespace viewlens::frontend;
using testing_support::spec;

TEST(ParseSpec, CopyView) {
  auto r = parse_spec("schema R/1. view V/1. def V(x) :- R(x).");
  ASSERT_TRUE(r.ok()) << r.error_text();
  EXPECT_EQ(r.value->db_schema.arity("R"), 1u);
  EXPECT_EQ(r.value->view_schema.arity("V"), 1u);
  EXPECT_EQ(print(r.value->defs.at("V")), "V(x) :- R(x)");
}

TEST(ParseSpec, UnsafeDefinition) {
  auto r = parse_spec("schema R/1. view V/1. def V(x) :- R(y).", "s.vl");
  ASSERT_FALSE(r.ok());
  const auto& d = r.diagnostics.front();
  EXPECT_EQ(d.code, "unsafe-rule");
  EXPECT_EQ(d.span.line, 1u);
  EXPECT_EQ(d.span.column, 29u);
  EXPECT_EQ(d.span.file, "s.vl");
}

TEST(ParseSpec, EmbeddedTgd) {
  auto r = parse_spec("schema R/2, S/2. tgd R(x,y) -> exists z: S(y,z).");
  ASSERT_TRUE(r.ok()) << r.error_text();
  ASSERT_EQ(r.value->constraints.size(), 1u);
  const auto& t = std::get<Tgd>(r.value->constraints[0].dep);
  EXPECT_EQ(t.existentials(), (std::vector<Term>{var("z")}));
  EXPECT_EQ(r.value->constraints[0].provenance, Provenance::database);
}

TEST(ParseSpec, ViewConstraintProvenance) {
  auto s = spec(testing_support::kKeyedCopy);
  ASSERT_EQ(s.constraints.size(), 1u);
  EXPECT_EQ(s.constraints[0].provenance, Provenance::view);
}

TEST(ParseSpec, ReportsSeveralErrors) {
  auto r = parse_spec("schema R/1.\nview V/1.\ndef V(x) :- R(y).\ntgd R(x) -> S(x).\n");
  EXPECT_GE(r.diagnostics.size(), 2u);
}

TEST(ParseFacts, Examples) {
  auto s = spec("schema R/2.");
  auto ok = parse_facts("R(a,b).", s.schema());
  ASSERT_TRUE(ok.ok());
  EXPECT_TRUE(ok.value->contains(Fact{"R", {constant("a"), constant("b")}}));
  auto bad = parse_facts("R(a).", s.schema(), "f");
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.diagnostics.front().code, "arity-mismatch");
}

TEST(ParseUpdate, TwoStepTransaction) {
  auto s = spec("schema R/2. view V/2. def V(x,y) :- R(x,y).");
  auto r = parse_update("update { insert V(a,b); delete V(x,b) where V(x,b); }", s.schema());
  ASSERT_TRUE(r.ok()) << r.error_text();
  ASSERT_EQ(r.value->steps.size(), 2u);
  EXPECT_EQ(r.value->steps[0].kind, StepKind::insert);
  EXPECT_EQ(r.value->steps[1].kind, StepKind::remove);
  EXPECT_EQ(r.value->steps[1].condition.positive.size(), 1u);
}

TEST(ParseGoal, SingleDependency) {
  auto s = spec(testing_support::kCosPap);
  auto g = parse_goal("tgd V1(x,y), V2(y,z) -> R(x,y,z).", s.schema());
  ASSERT_TRUE(g.ok()) << g.error_text();
  EXPECT_TRUE(std::holds_alternative<Tgd>(*g.value));
  EXPECT_FALSE(parse_goal("tgd V1(x,y) -> V1(y,x). tgd V1(x,y) -> V1(x,x).", s.schema()).ok());
}

TEST(Printer, RoundTripExamples) {
  auto s = spec("schema R/2, S/2. view V/1. def V(x) :- R(x,y).\n"
                "tgd R(x,y) -> exists z: S(y,z).\n");
  auto again = parse_spec(print(s));
  ASSERT_TRUE(again.ok()) << again.error_text();
  EXPECT_EQ(*again.value, s);

  auto f = testing_support::facts("R(a,b). R(\"x y\", \"3\").", s.schema());
  auto f2 = parse_facts(print(f), s.schema());
  ASSERT_TRUE(f2.ok()) << print(f);
  EXPECT_TRUE(f2.value->same_facts(f));

  auto u = testing_support::update(
      "update t { insert V(\"a\") where not V(\"b\"); delete V(x) where x != \"c\"; }",
      s.schema());
  auto u2 = parse_update(print(u), s.schema());
  ASSERT_TRUE(u2.ok()) << print(u);
  EXPECT_EQ(*u2.value, u);
}

TEST(Printer, CanonicalSpecText) {
  auto s = spec(testing_support::kCosPap);
  EXPECT_EQ(print(s),
            "schema R/3.\n"
            "view V1/2.\n"
            "view V2/2.\n"
            "def V1(x,y) :- R(x,y,z).\n"
            "def V2(y,z) :- R(x,y,z).\n"
            "@db egd R(x,y,z), R(x2,y,z2) -> z = z2.\n");
}

TEST(Printer, GeneratedArtifactsRoundTrip) {
  Generator gen(2024);
  for (int i = 0; i < 300; ++i) {
    auto err = testing_support::round_trip(gen, i);
    EXPECT_TRUE(err.empty()) << err;
  }
}

TEST(Diagnostics, Fixtures) {
  auto paths = testing_support::fixture_paths(VIEWLENS_FIXTURES);
  ASSERT_GE(paths.size(), 10u);
  for (const auto& p : paths) {
    auto fx = testing_support::load_fixture(p);
    EXPECT_TRUE(testing_support::check_fixture(fx).empty()) << testing_support::check_fixture(fx);
  }
}

TEST(Lexer, SpansAreOneBased) {
  auto toks = tokenize("R(a)\n  S", "f");
  ASSERT_GE(toks.size(), 6u);
  EXPECT_EQ(toks[0].span.line, 1u);
  EXPECT_EQ(toks[0].span.column, 1u);
  EXPECT_EQ(toks[4].text, "S");
  EXPECT_EQ(toks[4].span.line, 2u);
  EXPECT_EQ(toks[4].span.column, 3u);
  EXPECT_EQ(toks.back().kind, Tok::end);
}
