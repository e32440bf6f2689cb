#pragma once

// Relational vocabulary: terms, atoms, schemas, instances, substitutions,
// the backtracking matcher shared by homomorphism search, CQ evaluation and
// the chase, and instance deltas.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace viewlens {

enum class ErrorCode {
  schema_collision,
  unknown_symbol,
  arity_mismatch,
  unsafe_rule,
  non_ground,
  not_invertible,
  not_translatable,
  not_complement,
  invalid_argument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema_collision: return "schema-collision";
    case ErrorCode::unknown_symbol: return "unknown-symbol";
    case ErrorCode::arity_mismatch: return "arity-mismatch";
    case ErrorCode::unsafe_rule: return "unsafe-rule";
    case ErrorCode::non_ground: return "non-ground";
    case ErrorCode::not_invertible: return "not-invertible";
    case ErrorCode::not_translatable: return "not-translatable";
    case ErrorCode::not_complement: return "not-complement";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

class Term {
 public:
  // Declaration order fixes the canonical order: constants < nulls < variables.
  enum class Kind : std::uint8_t { constant, null, variable };

  Term() = default;

  static Term constant(std::string name) {
    return Term(Kind::constant, std::move(name), 0);
  }
  static Term null(std::uint32_t index) { return Term(Kind::null, {}, index); }
  static Term variable(std::string name) {
    return Term(Kind::variable, std::move(name), 0);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::constant; }
  bool is_null() const noexcept { return kind_ == Kind::null; }
  bool is_variable() const noexcept { return kind_ == Kind::variable; }
  bool is_ground() const noexcept { return kind_ != Kind::variable; }

  const std::string& name() const noexcept { return name_; }
  std::uint32_t null_index() const noexcept { return index_; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

  std::string str() const {
    switch (kind_) {
      case Kind::constant: return name_;
      case Kind::null: return "_:n" + std::to_string(index_);
      case Kind::variable: return "?" + name_;
    }
    return {};
  }

 private:
  Term(Kind kind, std::string name, std::uint32_t index)
      : kind_(kind), index_(index), name_(std::move(name)) {}

  Kind kind_ = Kind::constant;
  std::uint32_t index_ = 0;
  std::string name_;
};

using Tuple = std::vector<Term>;

struct Atom {
  std::string symbol;
  Tuple args;

  Atom() = default;
  Atom(std::string s, Tuple a) : symbol(std::move(s)), args(std::move(a)) {}

  std::size_t arity() const noexcept { return args.size(); }
  bool is_ground() const {
    return std::all_of(args.begin(), args.end(),
                       [](const Term& t) { return t.is_ground(); });
  }

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;

  std::string str() const {
    std::string out = symbol + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ",";
      out += args[i].str();
    }
    return out + ")";
  }
};

// A fact is a ground atom; the alias documents intent at interfaces.
using Fact = Atom;
using FactSet = std::set<Fact>;

inline Term constant(std::string name) { return Term::constant(std::move(name)); }
inline Term var(std::string name) { return Term::variable(std::move(name)); }

/// Collects variables of `atoms` in first-occurrence order.
inline std::vector<Term> variables_of(const std::vector<Atom>& atoms) {
  std::vector<Term> out;
  std::set<Term> seen;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && seen.insert(t).second) out.push_back(t);
  return out;
}

inline std::set<Term> variable_set(const std::vector<Atom>& atoms) {
  std::set<Term> out;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable()) out.insert(t);
  return out;
}

// ---------------------------------------------------------------------------
// Schemas
// ---------------------------------------------------------------------------

enum class SchemaKind : std::uint8_t { database, view };

struct SymbolInfo {
  std::size_t arity = 0;
  SchemaKind kind = SchemaKind::database;
  friend bool operator==(const SymbolInfo&, const SymbolInfo&) = default;
};

/// Named relation symbols with arities. A schema may mix database and view
/// symbols (the union schema R ∪ V); names are unique across kinds.
class Schema {
 public:
  Schema() = default;

  void add(const std::string& name, std::size_t arity, SchemaKind kind) {
    auto [it, inserted] = symbols_.emplace(name, SymbolInfo{arity, kind});
    if (!inserted)
      throw Error(ErrorCode::schema_collision,
                  "symbol '" + name + "' declared twice");
  }

  bool contains(const std::string& name) const {
    return symbols_.count(name) != 0;
  }
  const SymbolInfo& at(const std::string& name) const {
    auto it = symbols_.find(name);
    if (it == symbols_.end())
      throw Error(ErrorCode::unknown_symbol, "unknown symbol '" + name + "'");
    return it->second;
  }
  std::size_t arity(const std::string& name) const { return at(name).arity; }

  const std::map<std::string, SymbolInfo>& symbols() const noexcept {
    return symbols_;
  }
  std::vector<std::string> names(SchemaKind kind) const {
    std::vector<std::string> out;
    for (const auto& [n, info] : symbols_)
      if (info.kind == kind) out.push_back(n);
    return out;
  }
  Schema restricted(SchemaKind kind) const {
    Schema out;
    for (const auto& [n, info] : symbols_)
      if (info.kind == kind) out.symbols_.emplace(n, info);
    return out;
  }
  bool empty() const noexcept { return symbols_.empty(); }
  std::size_t size() const noexcept { return symbols_.size(); }

  /// Union of two schemas with disjoint symbol names.
  static Schema merge(const Schema& a, const Schema& b) {
    Schema out = a;
    for (const auto& [n, info] : b.symbols_) {
      if (out.contains(n))
        throw Error(ErrorCode::schema_collision,
                    "symbol '" + n + "' occurs in both schemas");
      out.symbols_.emplace(n, info);
    }
    return out;
  }

  /// Checks that `atom` names a known symbol with matching arity.
  void check_atom(const Atom& atom) const {
    const auto& info = at(atom.symbol);
    if (info.arity != atom.arity())
      throw Error(ErrorCode::arity_mismatch,
                  "atom " + atom.str() + " has arity " +
                      std::to_string(atom.arity()) + ", symbol '" +
                      atom.symbol + "' expects " + std::to_string(info.arity));
  }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::map<std::string, SymbolInfo> symbols_;
};

// ---------------------------------------------------------------------------
// Substitutions
// ---------------------------------------------------------------------------

using Substitution = std::map<Term, Term>;

inline Term substitute(const Substitution& s, const Term& t) {
  auto it = s.find(t);
  return it == s.end() ? t : it->second;
}
inline Atom substitute(const Substitution& s, const Atom& a) {
  Atom out{a.symbol, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(s, t));
  return out;
}
inline std::vector<Atom> substitute(const Substitution& s,
                               const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(substitute(s, a));
  return out;
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// A finite set of facts over a schema. Facts are stored per relation in
/// sorted order, so iteration order is canonical.
class Instance {
 public:
  using Relation = std::set<Tuple>;

  Instance() = default;
  explicit Instance(Schema schema) : schema_(std::move(schema)) {}
  Instance(Schema schema, const FactSet& facts) : schema_(std::move(schema)) {
    for (const auto& f : facts) insert(f);
  }

  const Schema& schema() const noexcept { return schema_; }

  /// Inserts a ground fact; returns false when already present.
  bool insert(const Fact& fact) {
    schema_.check_atom(fact);
    if (!fact.is_ground())
      throw Error(ErrorCode::non_ground,
                  "instances hold ground facts only: " + fact.str());
    for (const auto& t : fact.args)
      if (t.is_null()) next_null_ = std::max(next_null_, t.null_index() + 1);
    bool inserted = relations_[fact.symbol].insert(fact.args).second;
    if (inserted) ++size_;
    return inserted;
  }

  bool erase(const Fact& fact) {
    auto it = relations_.find(fact.symbol);
    if (it == relations_.end()) return false;
    if (it->second.erase(fact.args) == 0) return false;
    --size_;
    if (it->second.empty()) relations_.erase(it);
    return true;
  }

  bool contains(const Fact& fact) const {
    auto it = relations_.find(fact.symbol);
    return it != relations_.end() && it->second.count(fact.args) != 0;
  }

  const Relation& relation(const std::string& symbol) const {
    static const Relation kEmpty;
    auto it = relations_.find(symbol);
    return it == relations_.end() ? kEmpty : it->second;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  FactSet facts() const {
    FactSet out;
    for (const auto& [sym, rel] : relations_)
      for (const auto& tup : rel) out.emplace(sym, tup);
    return out;
  }

  template <typename F>
  void for_each_fact(F&& f) const {
    for (const auto& [sym, rel] : relations_)
      for (const auto& tup : rel) f(Fact{sym, tup});
  }

  /// Allocates a labeled null never used before in this instance.
  Term fresh_null() { return Term::null(next_null_++); }
  std::uint32_t next_null_index() const noexcept { return next_null_; }
  void reserve_nulls(std::uint32_t next) {
    next_null_ = std::max(next_null_, next);
  }

  std::set<Term> active_domain() const {
    std::set<Term> out;
    for (const auto& [sym, rel] : relations_)
      for (const auto& tup : rel) out.insert(tup.begin(), tup.end());
    return out;
  }
  bool has_nulls() const {
    for (const auto& [sym, rel] : relations_)
      for (const auto& tup : rel)
        for (const auto& t : tup)
          if (t.is_null()) return true;
    return false;
  }

  /// Facts whose symbol has the given kind, over the restricted schema.
  Instance restricted(SchemaKind kind) const {
    Instance out(schema_.restricted(kind));
    for (const auto& [sym, rel] : relations_)
      if (schema_.at(sym).kind == kind)
        for (const auto& tup : rel) out.insert(Fact{sym, tup});
    return out;
  }
  /// Facts over the listed symbols only; the schema is unchanged.
  Instance restricted_to(const std::set<std::string>& symbols) const {
    Instance out(schema_);
    for (const auto& [sym, rel] : relations_)
      if (symbols.count(sym))
        for (const auto& tup : rel) out.insert(Fact{sym, tup});
    return out;
  }

  /// Replaces every occurrence of `from` by `to` in all facts.
  void replace_term(const Term& from, const Term& to) {
    for (auto& [sym, rel] : relations_) {
      std::vector<Tuple> changed;
      for (auto it = rel.begin(); it != rel.end();) {
        if (std::find(it->begin(), it->end(), from) != it->end()) {
          Tuple t = *it;
          std::replace(t.begin(), t.end(), from, to);
          changed.push_back(std::move(t));
          it = rel.erase(it);
          --size_;
        } else {
          ++it;
        }
      }
      for (auto& t : changed)
        if (rel.insert(std::move(t)).second) ++size_;
    }
  }

  /// Same fact set (schemas are not compared).
  bool same_facts(const Instance& other) const {
    return relations_ == other.relations_;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.schema_ == b.schema_ && a.relations_ == b.relations_;
  }

  std::string str() const {
    std::string out = "{";
    bool first = true;
    for_each_fact([&](const Fact& f) {
      if (!first) out += ", ";
      first = false;
      out += f.str();
    });
    return out + "}";
  }

 private:
  Schema schema_;
  std::map<std::string, Relation> relations_;
  std::size_t size_ = 0;
  std::uint32_t next_null_ = 1;
};

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// Which terms of a pattern the matcher may bind.
enum class Bindable : std::uint8_t { variables, variables_and_nulls };

namespace detail {

inline bool bindable(const Term& t, Bindable mode) {
  return t.is_variable() || (mode == Bindable::variables_and_nulls && t.is_null());
}

inline bool unify_tuple(const Tuple& pattern, const Tuple& fact,
                        Substitution& s, std::vector<Term>& bound,
                        Bindable mode) {
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const Term& p = pattern[i];
    if (bindable(p, mode)) {
      auto it = s.find(p);
      if (it != s.end()) {
        if (it->second != fact[i]) return false;
      } else {
        s.emplace(p, fact[i]);
        bound.push_back(p);
      }
    } else if (p != fact[i]) {
      return false;
    }
  }
  return true;
}

inline std::size_t bound_positions(const Atom& a, const Substitution& s,
                                   Bindable mode) {
  std::size_t n = 0;
  for (const auto& t : a.args)
    if (!bindable(t, mode) || s.count(t)) ++n;
  return n;
}

// Returns false when the callback asked to stop.
template <typename F>
bool match_rec(std::vector<const Atom*>& pending, const Instance& inst,
               Substitution& s, Bindable mode, F& on_match) {
  if (pending.empty()) return on_match(static_cast<const Substitution&>(s));
  // Most-constrained atom first; ties keep the caller's order.
  std::size_t best = 0;
  std::size_t best_key = 0;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const Atom& a = *pending[i];
    std::size_t rel_size = inst.relation(a.symbol).size();
    std::size_t bound = bound_positions(a, s, mode);
    std::size_t key = (a.arity() - bound) * 1000000 + rel_size;
    if (bound == a.arity()) key = 0;
    if (i == 0 || key < best_key) {
      best = i;
      best_key = key;
    }
  }
  const Atom* atom = pending[best];
  pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
  bool keep_going = true;
  std::vector<Term> bound;
  // Tuples are sorted, so a bound prefix narrows the scan to a range.
  Tuple prefix;
  for (const auto& t : atom->args) {
    if (!bindable(t, mode)) {
      prefix.push_back(t);
      continue;
    }
    auto it = s.find(t);
    if (it == s.end()) break;
    prefix.push_back(it->second);
  }
  const auto& rel = inst.relation(atom->symbol);
  for (auto it = rel.lower_bound(prefix); it != rel.end(); ++it) {
    const Tuple& tup = *it;
    if (tup.size() < prefix.size() ||
        !std::equal(prefix.begin(), prefix.end(), tup.begin()))
      break;
    if (tup.size() != atom->arity()) continue;
    bound.clear();
    if (unify_tuple(atom->args, tup, s, bound, mode)) {
      keep_going = match_rec(pending, inst, s, mode, on_match);
    }
    for (const auto& v : bound) s.erase(v);
    if (!keep_going) break;
  }
  pending.insert(pending.begin() + static_cast<std::ptrdiff_t>(best), atom);
  return keep_going;
}

}  // namespace detail

/// Enumerates every extension of `seed` mapping all `pattern` atoms into
/// `inst`. The callback returns false to stop; the function returns false
/// iff the enumeration was stopped.
template <typename F>
bool for_each_match(const std::vector<Atom>& pattern, const Instance& inst,
                    const Substitution& seed, F&& on_match,
                    Bindable mode = Bindable::variables) {
  std::vector<const Atom*> pending;
  pending.reserve(pattern.size());
  for (const auto& a : pattern) pending.push_back(&a);
  Substitution s = seed;
  return detail::match_rec(pending, inst, s, mode, on_match);
}

inline std::optional<Substitution> first_match(
    const std::vector<Atom>& pattern, const Instance& inst,
    const Substitution& seed = {}, Bindable mode = Bindable::variables) {
  std::optional<Substitution> out;
  for_each_match(
      pattern, inst, seed,
      [&](const Substitution& s) {
        out = s;
        return false;
      },
      mode);
  return out;
}

inline bool has_match(const std::vector<Atom>& pattern, const Instance& inst,
                      const Substitution& seed = {}) {
  return first_match(pattern, inst, seed).has_value();
}

// ---------------------------------------------------------------------------
// Homomorphisms
// ---------------------------------------------------------------------------

/// A mapping of terms; constants are fixed points.
struct Homomorphism {
  Substitution mapping;

  Term operator()(const Term& t) const { return substitute(mapping, t); }
  Atom operator()(const Atom& a) const { return substitute(mapping, a); }
};

/// Searches for a homomorphism from `src` into `dst`: nulls of `src` may map
/// to any term, constants only to themselves.
inline std::optional<Homomorphism> find_homomorphism(const Instance& src,
                                                     const Instance& dst) {
  std::vector<Atom> pattern;
  src.for_each_fact([&](const Fact& f) { pattern.push_back(f); });
  auto m = first_match(pattern, dst, {}, Bindable::variables_and_nulls);
  if (!m) return std::nullopt;
  return Homomorphism{std::move(*m)};
}

// ---------------------------------------------------------------------------
// Conjunctive queries
// ---------------------------------------------------------------------------

/// q(head) :- body. Head terms are variables or constants.
struct ConjunctiveQuery {
  std::string name;
  Tuple head;
  std::vector<Atom> body;

  Atom head_atom() const { return Atom{name, head}; }

  /// Head variables not occurring in the body.
  std::vector<Term> unsafe_variables() const {
    auto body_vars = variable_set(body);
    std::vector<Term> out;
    for (const auto& t : head)
      if (t.is_variable() && !body_vars.count(t) &&
          std::find(out.begin(), out.end(), t) == out.end())
        out.push_back(t);
    return out;
  }
  bool is_safe() const { return unsafe_variables().empty(); }

  friend bool operator==(const ConjunctiveQuery&,
                         const ConjunctiveQuery&) = default;

  std::string str() const {
    std::string out = head_atom().str() + " :- ";
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].str();
    }
    return out;
  }
};

using AnswerSet = std::set<Tuple>;

inline AnswerSet evaluate_cq(const ConjunctiveQuery& q, const Instance& inst) {
  AnswerSet out;
  for_each_match(q.body, inst, {}, [&](const Substitution& s) {
    Tuple row;
    row.reserve(q.head.size());
    for (const auto& t : q.head) row.push_back(substitute(s, t));
    out.insert(std::move(row));
    return true;
  });
  return out;
}

/// Boolean reading: does some match of `body` exist in `inst`?
inline bool holds(const std::vector<Atom>& body, const Instance& inst) {
  return has_match(body, inst);
}

// ---------------------------------------------------------------------------
// Instance algebra
// ---------------------------------------------------------------------------

/// Union of a database instance and a view instance over disjoint schemas.
inline Instance disjoint_union(const Instance& db, const Instance& view) {
  Instance out(Schema::merge(db.schema(), view.schema()));
  db.for_each_fact([&](const Fact& f) { out.insert(f); });
  view.for_each_fact([&](const Fact& f) { out.insert(f); });
  out.reserve_nulls(std::max(db.next_null_index(), view.next_null_index()));
  return out;
}

struct GroundDelta {
  FactSet insertions;
  FactSet deletions;

  bool empty() const noexcept { return insertions.empty() && deletions.empty(); }
  friend bool operator==(const GroundDelta&, const GroundDelta&) = default;
};

inline GroundDelta diff(const Instance& before, const Instance& after) {
  GroundDelta d;
  after.for_each_fact([&](const Fact& f) {
    if (!before.contains(f)) d.insertions.insert(f);
  });
  before.for_each_fact([&](const Fact& f) {
    if (!after.contains(f)) d.deletions.insert(f);
  });
  return d;
}

inline Instance apply_delta(const GroundDelta& delta, const Instance& inst) {
  Instance out = inst;
  for (const auto& f : delta.deletions) out.erase(f);
  for (const auto& f : delta.insertions) out.insert(f);
  return out;
}

/// Replaces labeled nulls by fresh constants named `prefix<index>` that do
/// not clash with constants already present.
inline Instance ground_nulls(const Instance& inst,
                             const std::string& prefix = "_n") {
  Substitution s;
  auto used = inst.active_domain();
  for (const auto& t : used) {
    if (!t.is_null()) continue;
    std::uint32_t k = t.null_index();
    std::string name;
    do {
      name = prefix + std::to_string(k++);
    } while (used.count(Term::constant(name)));
    used.insert(Term::constant(name));
    s.emplace(t, Term::constant(name));
  }
  Instance out(inst.schema());
  inst.for_each_fact([&](const Fact& f) { out.insert(substitute(s, f)); });
  return out;
}

}  // namespace viewlens
