#include <gtest/gtest.h>

#include "common.hpp"
#include "oracle.hpp"

using namespace viewlens;

namespace {

Schema schema_of(std::initializer_list<std::pair<const char*, std::size_t>> syms,
                 SchemaKind kind = SchemaKind::database) {
  Schema s;
  for (const auto& [n, a] : syms) s.add(n, a, kind);
  return s;
}

Fact fact(const std::string& sym, std::initializer_list<const char*> args) {
  Fact f{sym, {}};
  for (const char* a : args) f.args.push_back(Term::constant(a));
  return f;
}

}  // namespace

TEST(DisjointUnion, EmptyInstances) {
  Instance a(schema_of({{"R", 1}})), b(schema_of({{"V", 1}}, SchemaKind::view));
  EXPECT_TRUE(disjoint_union(a, b).empty());
}

TEST(DisjointUnion, UnionOfFacts) {
  Instance a(schema_of({{"R", 1}})), b(schema_of({{"V", 1}}, SchemaKind::view));
  a.insert(fact("R", {"a"}));
  b.insert(fact("V", {"a"}));
  Instance u = disjoint_union(a, b);
  EXPECT_EQ(u.facts(), (FactSet{fact("R", {"a"}), fact("V", {"a"})}));
  EXPECT_TRUE(u.schema().contains("R"));
  EXPECT_TRUE(u.schema().contains("V"));
}

TEST(DisjointUnion, CollisionIsRejected) {
  Instance a(schema_of({{"R", 1}}));
  a.insert(fact("R", {"a"}));
  try {
    disjoint_union(a, a);
    FAIL() << "expected a schema collision";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_collision);
  }
}

TEST(DisjointUnion, Commutative) {
  Instance a(schema_of({{"R", 2}})), b(schema_of({{"V", 1}}, SchemaKind::view));
  a.insert(fact("R", {"a", "b"}));
  b.insert(fact("V", {"c"}));
  EXPECT_EQ(disjoint_union(a, b).facts(), disjoint_union(b, a).facts());
}

TEST(Homomorphism, Identity) {
  Instance i(schema_of({{"R", 2}}));
  i.insert(fact("R", {"a", "b"}));
  auto h = find_homomorphism(i, i);
  ASSERT_TRUE(h);
  EXPECT_TRUE(h->mapping.empty());
}

TEST(Homomorphism, NullMapsToConstant) {
  Instance src(schema_of({{"R", 2}})), dst(schema_of({{"R", 2}}));
  Term n = src.fresh_null();
  src.insert(Fact{"R", {n, Term::constant("b")}});
  dst.insert(fact("R", {"a", "b"}));
  auto h = find_homomorphism(src, dst);
  ASSERT_TRUE(h);
  EXPECT_EQ((*h)(n), Term::constant("a"));
}

TEST(Homomorphism, RepeatedNullNeedsEqualConstants) {
  Instance src(schema_of({{"R", 2}})), dst(schema_of({{"R", 2}}));
  Term n = src.fresh_null();
  src.insert(Fact{"R", {n, n}});
  dst.insert(fact("R", {"a", "b"}));
  EXPECT_FALSE(find_homomorphism(src, dst));
}

TEST(EvaluateCq, Projection) {
  Instance i(schema_of({{"R", 2}}));
  i.insert(fact("R", {"a", "b"}));
  i.insert(fact("R", {"a", "c"}));
  ConjunctiveQuery q{"q", {var("x")}, {Atom{"R", {var("x"), var("y")}}}};
  EXPECT_EQ(evaluate_cq(q, i), (AnswerSet{{Term::constant("a")}}));
}

TEST(EvaluateCq, Join) {
  Instance i(schema_of({{"V1", 2}, {"V2", 2}}));
  i.insert(fact("V1", {"a", "b"}));
  i.insert(fact("V2", {"b", "c"}));
  ConjunctiveQuery q{"q",
                     {var("x"), var("z")},
                     {Atom{"V1", {var("x"), var("y")}}, Atom{"V2", {var("y"), var("z")}}}};
  EXPECT_EQ(evaluate_cq(q, i), (AnswerSet{{Term::constant("a"), Term::constant("c")}}));
}

TEST(EvaluateCq, EmptyInstance) {
  Instance i(schema_of({{"R", 2}}));
  ConjunctiveQuery q{"q", {var("x")}, {Atom{"R", {var("x"), var("y")}}}};
  EXPECT_TRUE(evaluate_cq(q, i).empty());
}

TEST(Diff, Examples) {
  Schema s = schema_of({{"R", 1}});
  Instance a(s), b(s), c(s);
  a.insert(fact("R", {"a"}));
  b.insert(fact("R", {"a"}));
  b.insert(fact("R", {"b"}));
  c.insert(fact("R", {"b"}));
  EXPECT_TRUE(diff(a, a).empty());
  auto d1 = diff(a, b);
  EXPECT_EQ(d1.insertions, (FactSet{fact("R", {"b"})}));
  EXPECT_TRUE(d1.deletions.empty());
  auto d2 = diff(a, c);
  EXPECT_EQ(d2.insertions, (FactSet{fact("R", {"b"})}));
  EXPECT_EQ(d2.deletions, (FactSet{fact("R", {"a"})}));
}

TEST(CoreProperties, DiffRoundTrip) {
  Generator gen(7);
  Schema s = schema_of({{"R", 2}, {"S", 1}});
  std::vector<Term> dom{Term::constant("a"), Term::constant("b"), Term::constant("c")};
  for (int i = 0; i < 300; ++i) {
    Instance x = gen.instance(s, dom, 6), y = gen.instance(s, dom, 6);
    EXPECT_TRUE(apply_delta(diff(x, y), x).same_facts(y));
  }
}

// Homomorphism existence agrees with a brute-force search and with
// evaluating src as a boolean query over dst.
TEST(CoreProperties, HomomorphismAgreesWithBooleanQuery) {
  Generator gen(11);
  Schema s = schema_of({{"R", 2}, {"S", 1}});
  std::vector<Term> dom{Term::constant("a"), Term::constant("b")};
  int found = 0;
  for (int i = 0; i < 400; ++i) {
    Instance dst = gen.instance(s, dom, 6);
    Instance src(s);
    std::vector<Term> pool = dom;
    for (int k = 0; k < 2; ++k) pool.push_back(src.fresh_null());
    std::size_t n = gen.between(1, 4);
    for (std::size_t k = 0; k < n; ++k) {
      Atom a = gen.atom_over(s, {"R", "S"}, pool);
      src.insert(a);
    }
    bool lib = find_homomorphism(src, dst).has_value();
    EXPECT_EQ(lib, oracle::maps_into(oracle::facts_of(src), oracle::facts_of(dst)));
    // src as a boolean CQ: nulls become variables.
    std::vector<Atom> body;
    src.for_each_fact([&](const Fact& f) {
      Atom a{f.symbol, {}};
      for (const auto& t : f.args) a.args.push_back(t.is_null() ? var("v" + t.str()) : t);
      body.push_back(a);
    });
    ConjunctiveQuery q{"q", {}, body};
    EXPECT_EQ(lib, !evaluate_cq(q, dst).empty());
    if (lib) {
      auto h = find_homomorphism(src, dst);
      src.for_each_fact([&](const Fact& f) { EXPECT_TRUE(dst.contains((*h)(f))); });
      ++found;
    }
  }
  EXPECT_GT(found, 0);
}

TEST(Instance, GroundNullsAvoidsClashes) {
  Instance i(schema_of({{"R", 2}}));
  Term n = i.fresh_null();
  i.insert(Fact{"R", {n, Term::constant("c" + std::to_string(n.null_index()))}});
  Instance g = ground_nulls(i, "c");
  EXPECT_FALSE(g.has_nulls());
  ASSERT_EQ(g.size(), 1u);
  const Fact f = *g.facts().begin();
  EXPECT_NE(f.args[0], f.args[1]);
}
