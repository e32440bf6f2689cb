#include <gtest/gtest.h>

#include "common.hpp"
#include "oracle.hpp"

using namespace viewlens;
using testing_support::facts;
using testing_support::spec;

namespace {

void expect_valid_pair(const ViewSpec& s, const std::string& target,
                       const CounterexamplePair& p) {
  auto a = oracle::facts_of(p.first), b = oracle::facts_of(p.second);
  auto sigma = oracle::deps_of(s.database_constraints());
  EXPECT_TRUE(oracle::holds(a, sigma));
  EXPECT_TRUE(oracle::holds(b, sigma));
  EXPECT_EQ(oracle::view_image(s, a), oracle::view_image(s, b));
  oracle::Facts ta, tb;
  for (const auto& f : a)
    if (f.symbol == target) ta.insert(f);
  for (const auto& f : b)
    if (f.symbol == target) tb.insert(f);
  EXPECT_NE(ta, tb);
}

}  // namespace

TEST(Determines, CosPapWithFd) {
  auto s = spec(testing_support::kCosPap);
  auto v = determines(s, "R");
  EXPECT_TRUE(v.determined()) << v.reason;
}

TEST(Determines, CosPapWithoutFd) {
  auto s = spec(testing_support::kCosPapNoFd);
  auto v = determines(s, "R");
  ASSERT_TRUE(v.not_determined()) << v.reason;
  ASSERT_TRUE(v.counterexample);
  expect_valid_pair(s, "R", *v.counterexample);
}

TEST(Determines, LossyProjection) {
  auto s = spec("schema R/2. view V/1. def V(x) :- R(x,y).");
  auto v = determines(s, "R");
  ASSERT_TRUE(v.not_determined());
  ASSERT_TRUE(v.counterexample);
  expect_valid_pair(s, "R", *v.counterexample);
  EXPECT_EQ(oracle::determinacy(s, "R", oracle::domain(3)), oracle::Settled::not_determined);
}

TEST(Determines, UnknownSymbolThrows) {
  auto s = spec("schema R/1. view V/1. def V(x) :- R(x).");
  EXPECT_THROW(determines(s, "Q"), Error);
}

TEST(IsInvertible, Examples) {
  EXPECT_TRUE(is_invertible(spec("schema R/1, S/2. view V/1, W/2. def V(x) :- R(x). "
                                 "def W(x,y) :- S(x,y).")).invertible());
  EXPECT_EQ(is_invertible(spec("schema R/2. view V/1. def V(x) :- R(x,y).")).status,
            Tristate::no);
  EXPECT_TRUE(is_invertible(spec(testing_support::kCosPap)).invertible());
}

TEST(SynthesizeRewriting, CosPapJoin) {
  auto s = spec(testing_support::kCosPap);
  auto rw = synthesize_rewriting(s, "R");
  ASSERT_TRUE(rw);
  EXPECT_EQ(rw->query.body.size(), 2u);
  EXPECT_EQ(frontend::print(*rw), "R(x1,x2,x3) :- V1(x1,x2), V2(x2,x3)");
}

TEST(SynthesizeRewriting, CopyView) {
  auto s = spec("schema R/2. view V/2. def V(x,y) :- R(x,y).");
  auto rw = synthesize_rewriting(s, "R");
  ASSERT_TRUE(rw);
  EXPECT_EQ(frontend::print(*rw), "R(x1,x2) :- V(x1,x2)");
}

TEST(VerifyRewriting, Examples) {
  auto copy = spec("schema R/1. view V/1. def V(x) :- R(x).");
  Rewriting copy_rw{"R", {"R", {var("x")}, {Atom{"V", {var("x")}}}}};
  EXPECT_TRUE(verify_rewriting(copy, copy_rw));

  Rewriting join{"R",
                 {"R",
                  {var("x"), var("y"), var("z")},
                  {Atom{"V1", {var("x"), var("y")}}, Atom{"V2", {var("y"), var("z")}}}}};
  EXPECT_TRUE(verify_rewriting(spec(testing_support::kCosPap), join));
  EXPECT_FALSE(verify_rewriting(spec(testing_support::kCosPapNoFd), join));
}

// Rewritings reconstruct the target on instances satisfying Σ_R.
TEST(SynthesizeRewriting, SoundOnInstances) {
  auto s = spec(testing_support::kCosPap);
  auto rw = synthesize_rewriting(s, "R");
  ASSERT_TRUE(rw);
  for (const auto& [db, image] : oracle::consistent_states(s, oracle::domain(2))) {
    Instance view(s.view_schema);
    for (const auto& f : image) view.insert(f);
    std::set<Fact> got = evaluate_rewriting(*rw, view);
    EXPECT_EQ(got, db);
  }
}

TEST(CompileInverse, ThrowsWhenNotInvertible) {
  try {
    compile_inverse(spec(testing_support::kCosPapNoFd));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_invertible);
  }
}

// Library verdicts never contradict brute force over k <= 2 on random specs.
TEST(Determines, NeverContradictsBruteForce) {
  Generator gen(17);
  DeterminacyOptions opts;
  opts.budget = 2000;
  int settled = 0;
  for (int i = 0; i < 25; ++i) {
    ViewSpec s = gen.spec(2, 2, 2);
    for (const auto& r : s.db_schema.names(SchemaKind::database)) {
      auto v = determines(s, r, opts);
      auto bf = oracle::determinacy(s, r, oracle::domain(2));
      if (v.determined()) {
        EXPECT_EQ(bf, oracle::Settled::determined) << frontend::print(s);
        ++settled;
      }
      if (v.not_determined()) {
        ASSERT_TRUE(v.counterexample);
        expect_valid_pair(s, r, *v.counterexample);
        ++settled;
      }
    }
  }
  EXPECT_GT(settled, 10);
}
