#pragma once

// Tuple- and equality-generating dependencies, their classification, the
// exact view-definition rules, and the weak-acyclicity termination guard.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "viewlens/core.hpp"

namespace viewlens {

/// body -> exists existentials: head. An empty body reads as "true".
struct Tgd {
  std::vector<Atom> body;
  std::vector<Atom> head;

  Tgd() = default;
  Tgd(std::vector<Atom> b, std::vector<Atom> h)
      : body(std::move(b)), head(std::move(h)) {}

  /// Head variables absent from the body, in first-occurrence order.
  std::vector<Term> existentials() const {
    auto bv = variable_set(body);
    std::vector<Term> out;
    for (const auto& v : variables_of(head))
      if (!bv.count(v)) out.push_back(v);
    return out;
  }
  /// Variables shared by body and head.
  std::vector<Term> frontier() const {
    auto hv = variable_set(head);
    std::vector<Term> out;
    for (const auto& v : variables_of(body))
      if (hv.count(v)) out.push_back(v);
    return out;
  }
  bool is_full() const { return existentials().empty(); }

  friend bool operator==(const Tgd&, const Tgd&) = default;
};

/// body -> lhs = rhs
struct Egd {
  std::vector<Atom> body;
  Term lhs;
  Term rhs;

  friend bool operator==(const Egd&, const Egd&) = default;
};

using Dependency = std::variant<Tgd, Egd>;

inline const std::vector<Atom>& body_of(const Dependency& d) {
  return std::visit([](const auto& x) -> const std::vector<Atom>& { return x.body; },
                    d);
}

enum class Provenance : std::uint8_t { database, view, definition };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::database: return "db";
    case Provenance::view: return "view";
    case Provenance::definition: return "def";
  }
  return "?";
}

struct Constraint {
  Dependency dep;
  Provenance provenance = Provenance::database;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

using ConstraintSet = std::vector<Constraint>;

inline std::string to_string(const Dependency& d) {
  auto join = [](const std::vector<Atom>& atoms) {
    std::string s;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i) s += ", ";
      s += atoms[i].str();
    }
    return s;
  };
  if (const auto* t = std::get_if<Tgd>(&d)) {
    std::string s = join(t->body) + " -> ";
    auto ex = t->existentials();
    if (!ex.empty()) {
      s += "exists ";
      for (std::size_t i = 0; i < ex.size(); ++i) s += (i ? "," : "") + ex[i].str();
      s += ": ";
    }
    return s + join(t->head);
  }
  const auto& e = std::get<Egd>(d);
  return join(e.body) + " -> " + e.lhs.str() + " = " + e.rhs.str();
}

/// Symbols mentioned anywhere in the dependency.
inline std::set<std::string> symbols_of(const Dependency& d) {
  std::set<std::string> out;
  for (const auto& a : body_of(d)) out.insert(a.symbol);
  if (const auto* t = std::get_if<Tgd>(&d))
    for (const auto& a : t->head) out.insert(a.symbol);
  return out;
}

/// Throws unless every atom matches the schema and the dependency is safe.
inline void validate(const Dependency& d, const Schema& schema) {
  for (const auto& a : body_of(d)) schema.check_atom(a);
  if (const auto* t = std::get_if<Tgd>(&d)) {
    for (const auto& a : t->head) schema.check_atom(a);
    if (t->head.empty())
      throw Error(ErrorCode::unsafe_rule, "tgd with empty head");
  } else {
    const auto& e = std::get<Egd>(d);
    auto bv = variable_set(e.body);
    for (const auto& t : {e.lhs, e.rhs})
      if (t.is_variable() && !bv.count(t))
        throw Error(ErrorCode::unsafe_rule,
                    "egd variable " + t.str() + " does not occur in the body");
  }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class DependencyKind : std::uint8_t { tgd, egd };

struct Classification {
  bool full = true;
  DependencyKind kind = DependencyKind::tgd;
  bool functional = false;  // egd expressing a functional dependency
  bool join = false;        // tgd expressing a join dependency
  friend bool operator==(const Classification&, const Classification&) = default;
};

namespace detail {

inline std::map<Term, int> occurrence_counts(const std::vector<Atom>& atoms) {
  std::map<Term, int> out;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable()) ++out[t];
  return out;
}

// R(..), R(..) -> y = z where the atoms share variables on a set of key
// positions, y and z sit at one common non-key position, and every other
// variable is distinct.
inline bool is_functional(const Egd& e) {
  if (e.body.size() != 2) return false;
  const Atom& a = e.body[0];
  const Atom& b = e.body[1];
  if (a.symbol != b.symbol || a.arity() != b.arity()) return false;
  if (!e.lhs.is_variable() || !e.rhs.is_variable() || e.lhs == e.rhs)
    return false;
  for (const auto& t : a.args)
    if (!t.is_variable()) return false;
  for (const auto& t : b.args)
    if (!t.is_variable()) return false;
  auto counts = occurrence_counts(e.body);
  bool found_target = false;
  bool has_key = false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term& x = a.args[i];
    const Term& y = b.args[i];
    if (x == y) {
      if (counts[x] != 2) return false;
      has_key = true;
      continue;
    }
    if (counts[x] != 1 || counts[y] != 1) return false;
    if ((x == e.lhs && y == e.rhs) || (x == e.rhs && y == e.lhs))
      found_target = true;
  }
  return found_target && has_key;
}

// R(..), ..., R(..) -> R(x1..xn) with distinct head variables, where every
// body position carries either the head variable of that position or a
// variable occurring nowhere else.
inline bool is_join(const Tgd& t) {
  if (t.head.size() != 1 || t.body.size() < 2 || !t.is_full()) return false;
  const Atom& h = t.head[0];
  std::set<Term> hv;
  for (const auto& x : h.args)
    if (!x.is_variable() || !hv.insert(x).second) return false;
  auto counts = occurrence_counts(t.body);
  std::set<Term> covered;
  for (const auto& a : t.body) {
    if (a.symbol != h.symbol || a.arity() != h.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      const Term& x = a.args[i];
      if (!x.is_variable()) return false;
      if (x == h.args[i]) {
        covered.insert(x);
      } else if (hv.count(x) || counts[x] != 1) {
        return false;
      }
    }
  }
  return covered.size() == hv.size();
}

}  // namespace detail

inline Classification classify(const Dependency& d) {
  Classification c;
  if (const auto* t = std::get_if<Tgd>(&d)) {
    c.kind = DependencyKind::tgd;
    c.full = t->is_full();
    c.join = detail::is_join(*t);
  } else {
    const auto& e = std::get<Egd>(d);
    c.kind = DependencyKind::egd;
    c.full = true;
    c.functional = detail::is_functional(e);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Weak acyclicity
// ---------------------------------------------------------------------------

struct Position {
  std::string symbol;
  std::size_t index = 0;  // 0-based
  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
  std::string str() const { return symbol + "#" + std::to_string(index + 1); }
};

struct PositionEdge {
  Position from;
  Position to;
  bool special = false;
  friend bool operator==(const PositionEdge&, const PositionEdge&) = default;
  friend auto operator<=>(const PositionEdge&, const PositionEdge&) = default;
};

struct PositionGraph {
  std::set<Position> nodes;
  std::set<PositionEdge> edges;

  bool reachable(const Position& from, const Position& to) const {
    std::set<Position> seen{from};
    std::vector<Position> stack{from};
    while (!stack.empty()) {
      Position p = stack.back();
      stack.pop_back();
      if (p == to) return true;
      for (auto it = edges.lower_bound(PositionEdge{p, {}, false});
           it != edges.end() && it->from == p; ++it)
        if (seen.insert(it->to).second) stack.push_back(it->to);
    }
    return false;
  }
};

struct WeakAcyclicity {
  bool acyclic = true;
  PositionGraph graph;
  std::vector<PositionEdge> cyclic_special_edges;
};

/// Builds the position graph of the tgds in `cs` and reports whether some
/// cycle passes through a special edge. Egds do not contribute edges.
inline WeakAcyclicity is_weakly_acyclic(const ConstraintSet& cs) {
  WeakAcyclicity out;
  auto& g = out.graph;
  for (const auto& c : cs) {
    for (const auto& a : body_of(c.dep))
      for (std::size_t i = 0; i < a.arity(); ++i) g.nodes.insert({a.symbol, i});
    const auto* t = std::get_if<Tgd>(&c.dep);
    if (!t) continue;
    for (const auto& a : t->head)
      for (std::size_t i = 0; i < a.arity(); ++i) g.nodes.insert({a.symbol, i});
    auto ex = t->existentials();
    std::set<Term> exset(ex.begin(), ex.end());
    std::vector<Position> existential_positions;
    for (const auto& h : t->head)
      for (std::size_t j = 0; j < h.arity(); ++j)
        if (exset.count(h.args[j])) existential_positions.push_back({h.symbol, j});
    // Regular edges follow frontier variables. Special edges leave every
    // body position, frontier or not, so a tgd whose body shares no variable
    // with its head still counts as feeding its existential positions.
    for (const auto& x : t->frontier())
      for (const auto& b : t->body)
        for (std::size_t i = 0; i < b.arity(); ++i) {
          if (b.args[i] != x) continue;
          for (const auto& h : t->head)
            for (std::size_t j = 0; j < h.arity(); ++j)
              if (h.args[j] == x) g.edges.insert({{b.symbol, i}, {h.symbol, j}, false});
        }
    for (const auto& b : t->body)
      for (std::size_t i = 0; i < b.arity(); ++i)
        for (const auto& p : existential_positions)
          g.edges.insert({{b.symbol, i}, p, true});
  }
  for (const auto& e : g.edges)
    if (e.special && g.reachable(e.to, e.from)) {
      out.acyclic = false;
      out.cyclic_special_edges.push_back(e);
    }
  return out;
}

/// Decides whether the chase of a constraint set is guaranteed to stop.
using TerminationGuard = std::function<bool(const ConstraintSet&)>;

inline bool weak_acyclicity_guard(const ConstraintSet& cs) {
  return is_weakly_acyclic(cs).acyclic;
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// Returns the first body match violating `d` in `inst`, if any.
inline std::optional<Substitution> find_violation(const Instance& inst,
                                                  const Dependency& d) {
  std::optional<Substitution> out;
  if (const auto* t = std::get_if<Tgd>(&d)) {
    for_each_match(t->body, inst, {}, [&](const Substitution& s) {
      if (!has_match(t->head, inst, s)) {
        out = s;
        return false;
      }
      return true;
    });
  } else {
    const auto& e = std::get<Egd>(d);
    for_each_match(e.body, inst, {}, [&](const Substitution& s) {
      if (substitute(s, e.lhs) != substitute(s, e.rhs)) {
        out = s;
        return false;
      }
      return true;
    });
  }
  return out;
}

inline bool satisfies(const Instance& inst, const Dependency& d) {
  return !find_violation(inst, d).has_value();
}

inline bool satisfies(const Instance& inst, const ConstraintSet& cs) {
  for (const auto& c : cs)
    if (!satisfies(inst, c.dep)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// View specifications
// ---------------------------------------------------------------------------

/// Database and view schemas, one exact CQ definition per view symbol, and
/// the database (Σ_R) and view (Σ_V) constraints.
struct ViewSpec {
  Schema db_schema;
  Schema view_schema;
  std::map<std::string, ConjunctiveQuery> defs;
  ConstraintSet constraints;  // provenance database or view

  Schema schema() const { return Schema::merge(db_schema, view_schema); }

  ConstraintSet with_provenance(Provenance p) const {
    ConstraintSet out;
    for (const auto& c : constraints)
      if (c.provenance == p) out.push_back(c);
    return out;
  }
  ConstraintSet database_constraints() const {
    return with_provenance(Provenance::database);
  }
  ConstraintSet view_constraints() const {
    return with_provenance(Provenance::view);
  }

  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

/// Throws on any violated structural invariant of a view specification.
inline void validate(const ViewSpec& spec) {
  for (const auto& [name, info] : spec.db_schema.symbols())
    if (info.kind != SchemaKind::database)
      throw Error(ErrorCode::invalid_argument,
                  "'" + name + "' in the database schema is not a database symbol");
  for (const auto& [name, info] : spec.view_schema.symbols())
    if (info.kind != SchemaKind::view)
      throw Error(ErrorCode::invalid_argument,
                  "'" + name + "' in the view schema is not a view symbol");
  Schema all = spec.schema();
  for (const auto& [name, info] : spec.view_schema.symbols())
    if (!spec.defs.count(name))
      throw Error(ErrorCode::invalid_argument,
                  "view symbol '" + name + "' has no definition");
  for (const auto& [name, q] : spec.defs) {
    if (!spec.view_schema.contains(name))
      throw Error(ErrorCode::unknown_symbol,
                  "definition for undeclared view '" + name + "'");
    if (q.name != name)
      throw Error(ErrorCode::invalid_argument, "definition name mismatch");
    spec.view_schema.check_atom(q.head_atom());
    for (const auto& a : q.body) spec.db_schema.check_atom(a);
    if (q.body.empty())
      throw Error(ErrorCode::unsafe_rule, "definition of '" + name + "' has an empty body");
    if (!q.is_safe())
      throw Error(ErrorCode::unsafe_rule,
                  "definition of '" + name + "' is unsafe: head variable " +
                      q.unsafe_variables().front().str() + " not in body");
  }
  for (const auto& c : spec.constraints) {
    validate(c.dep, all);
    const Schema& own = c.provenance == Provenance::view ? spec.view_schema
                                                         : spec.db_schema;
    if (c.provenance == Provenance::definition)
      throw Error(ErrorCode::invalid_argument,
                  "definition rules are derived, not stored as constraints");
    for (const auto& s : symbols_of(c.dep))
      if (!own.contains(s))
        throw Error(ErrorCode::invalid_argument,
                    std::string(c.provenance == Provenance::view ? "view" : "database") +
                        " constraint mentions foreign symbol '" + s + "'");
  }
}

/// The exact-definition rules: for V(x̄) :- φ(x̄,ȳ) the forward tgd
/// φ -> V(x̄) and the backward tgd V(x̄) -> ∃ȳ φ.
inline std::vector<Tgd> exact_view_rules(const ViewSpec& spec) {
  std::vector<Tgd> out;
  for (const auto& [name, q] : spec.defs) {
    out.emplace_back(q.body, std::vector<Atom>{q.head_atom()});
    out.emplace_back(std::vector<Atom>{q.head_atom()}, q.body);
  }
  return out;
}

/// Σ_R, then Σ_V, then the definition rules.
inline ConstraintSet all_constraints(const ViewSpec& spec) {
  ConstraintSet out = spec.database_constraints();
  for (auto& c : spec.view_constraints()) out.push_back(c);
  for (auto& t : exact_view_rules(spec))
    out.push_back({std::move(t), Provenance::definition});
  return out;
}

/// The view mapping f: evaluates every definition on a database instance.
inline Instance view_of(const ViewSpec& spec, const Instance& db) {
  Instance out(spec.view_schema);
  for (const auto& [name, q] : spec.defs)
    for (auto& row : evaluate_cq(q, db)) out.insert(Fact{name, std::move(row)});
  return out;
}

/// Database instance plus its view image over the union schema.
inline Instance with_view(const ViewSpec& spec, const Instance& db) {
  Instance base(spec.db_schema);
  db.for_each_fact([&](const Fact& f) {
    if (spec.db_schema.contains(f.symbol)) base.insert(f);
  });
  return disjoint_union(base, view_of(spec, base));
}

// ---------------------------------------------------------------------------
// Renaming helpers
// ---------------------------------------------------------------------------

/// Renames the listed symbols inside atoms.
inline std::vector<Atom> rename_symbols(const std::vector<Atom>& atoms,
                                        const std::map<std::string, std::string>& m) {
  std::vector<Atom> out = atoms;
  for (auto& a : out)
    if (auto it = m.find(a.symbol); it != m.end()) a.symbol = it->second;
  return out;
}

inline Dependency rename_symbols(const Dependency& d,
                                 const std::map<std::string, std::string>& m) {
  if (const auto* t = std::get_if<Tgd>(&d))
    return Tgd{rename_symbols(t->body, m), rename_symbols(t->head, m)};
  const auto& e = std::get<Egd>(d);
  return Egd{rename_symbols(e.body, m), e.lhs, e.rhs};
}

/// Renames every variable of `atoms` by appending `suffix`.
inline Substitution variable_suffix(const std::vector<Atom>& atoms,
                                    const std::string& suffix) {
  Substitution s;
  for (const auto& v : variables_of(atoms))
    s.emplace(v, Term::variable(v.name() + suffix));
  return s;
}

}  // namespace viewlens
