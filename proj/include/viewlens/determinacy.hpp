#pragma once

// Determinacy under constraints, invertibility of view mappings, and
// synthesis/verification of conjunctive rewritings over the view symbols.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "viewlens/chase.hpp"
#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/implication.hpp"
#include "viewlens/models.hpp"

namespace viewlens {

struct DeterminacyOptions {
  std::size_t budget = kDefaultChaseBudget;
  std::size_t domain_bound = kDefaultDomainBound;
  // Counterexample search skips domain sizes whose database ground-atom
  // count exceeds this bound.
  std::size_t max_search_atoms = 20;
  std::size_t max_body_atoms = 4;
};

/// A CQ over view symbols whose answers reconstruct a database symbol.
struct Rewriting {
  std::string target;
  ConjunctiveQuery query;  // query.name == target

  friend bool operator==(const Rewriting&, const Rewriting&) = default;
  std::string str() const { return query.str(); }
};

enum class Determinacy : std::uint8_t { determined, not_determined, unknown };

inline const char* to_string(Determinacy d) {
  switch (d) {
    case Determinacy::determined: return "determined";
    case Determinacy::not_determined: return "not-determined";
    case Determinacy::unknown: return "unknown";
  }
  return "?";
}

struct CounterexamplePair {
  Instance first;
  Instance second;
};

struct DeterminacyVerdict {
  Determinacy verdict = Determinacy::unknown;
  // Certificates: chase steps of the two-copy test for `determined`, a
  // verified pair for `not_determined`.
  std::size_t chase_steps = 0;
  std::optional<CounterexamplePair> counterexample;
  std::string reason;

  bool determined() const { return verdict == Determinacy::determined; }
  bool not_determined() const { return verdict == Determinacy::not_determined; }
};

/// Name of the primed copy of a database symbol.
inline std::string primed(const std::string& symbol) { return symbol + "'"; }

/// Σ for two copies of the database symbols sharing the view symbols:
/// Σ_R, Σ_R', Σ_V, the definition rules, then the primed definition rules.
struct TwoCopySetting {
  Schema schema;
  ConstraintSet constraints;
  std::map<std::string, std::string> renaming;  // R -> R'
};

inline TwoCopySetting two_copy_setting(const ViewSpec& spec) {
  TwoCopySetting out;
  out.schema = spec.schema();
  for (const auto& [name, info] : spec.db_schema.symbols()) {
    out.renaming.emplace(name, primed(name));
    out.schema.add(primed(name), info.arity, SchemaKind::database);
  }
  auto db = spec.database_constraints();
  for (const auto& c : db) out.constraints.push_back(c);
  for (const auto& c : db)
    out.constraints.push_back({rename_symbols(c.dep, out.renaming), c.provenance});
  for (const auto& c : spec.view_constraints()) out.constraints.push_back(c);
  auto rules = exact_view_rules(spec);
  for (const auto& t : rules) out.constraints.push_back({t, Provenance::definition});
  for (const auto& t : rules)
    out.constraints.push_back(
        {rename_symbols(Dependency{t}, out.renaming), Provenance::definition});
  return out;
}

/// Checks that both instances satisfy Σ_R, have the same view image, that
/// image satisfies Σ_V, and they differ on `target`.
inline bool verify_counterexample(const ViewSpec& spec, const std::string& target,
                                  const CounterexamplePair& pair) {
  auto db = spec.database_constraints();
  if (!satisfies(pair.first, db) || !satisfies(pair.second, db)) return false;
  Instance v1 = view_of(spec, pair.first);
  Instance v2 = view_of(spec, pair.second);
  if (!v1.same_facts(v2)) return false;
  if (!satisfies(v1, spec.view_constraints())) return false;
  return pair.first.relation(target) != pair.second.relation(target);
}

namespace detail {

inline std::vector<Term> spec_domain(const ViewSpec& spec, std::size_t k) {
  ConstraintSet all = all_constraints(spec);
  auto consts = constants_of(all);
  std::vector<Term> domain(consts.begin(), consts.end());
  std::size_t fresh = 1;
  while (domain.size() < consts.size() + k) {
    Term c = Term::constant("c" + std::to_string(fresh++));
    if (!consts.count(c)) domain.push_back(c);
  }
  return domain;
}

inline std::optional<CounterexamplePair> pair_from_two_copy_model(
    const ViewSpec& spec, const TwoCopySetting& setting, const Instance& model) {
  Instance first(spec.db_schema);
  Instance second(spec.db_schema);
  std::map<std::string, std::string> back;
  for (const auto& [r, rp] : setting.renaming) back.emplace(rp, r);
  model.for_each_fact([&](const Fact& f) {
    if (spec.db_schema.contains(f.symbol)) {
      first.insert(f);
    } else if (auto it = back.find(f.symbol); it != back.end()) {
      second.insert(Fact{it->second, f.args});
    }
  });
  return CounterexamplePair{std::move(first), std::move(second)};
}

}  // namespace detail

/// Bounded search for two consistent database instances with the same view
/// image that differ on `target`. Searches domains of size 1..bound.
inline std::optional<CounterexamplePair> search_counterexample_pair(
    const ViewSpec& spec, const std::string& target, const DeterminacyOptions& opts,
    bool* exhausted_all = nullptr) {
  ConstraintSet cs = all_constraints(spec);
  Schema schema = spec.schema();
  if (exhausted_all) *exhausted_all = true;
  for (std::size_t k = 1; k <= opts.domain_bound; ++k) {
    auto domain = detail::spec_domain(spec, k);
    if (ground_atom_count(spec.db_schema, domain.size()) > opts.max_search_atoms) {
      if (exhausted_all) *exhausted_all = false;
      break;
    }
    ModelSearchOptions mopts;
    mopts.domain = domain;
    std::map<FactSet, Instance> seen;  // view image -> first preimage
    std::optional<CounterexamplePair> found;
    for_each_model(cs, schema, mopts, [&](const Instance& m) {
      Instance db = m.restricted(SchemaKind::database);
      FactSet image = m.restricted(SchemaKind::view).facts();
      auto [it, inserted] = seen.emplace(std::move(image), db);
      if (!inserted && it->second.relation(target) != db.relation(target)) {
        found = CounterexamplePair{it->second, std::move(db)};
        return false;
      }
      return true;
    });
    if (found) return found;
  }
  return std::nullopt;
}

/// Two-copy test: `target` is determined iff Σ², frozen R(x̄), chases to a
/// state containing R'(x̄). A terminating chase that misses R'(x̄) yields a
/// counterexample pair directly; otherwise one is searched over small domains.
inline DeterminacyVerdict determines(const ViewSpec& spec, const std::string& target,
                                     const DeterminacyOptions& opts = {}) {
  if (!spec.db_schema.contains(target))
    throw Error(ErrorCode::unknown_symbol,
                "'" + target + "' is not a database symbol");
  DeterminacyVerdict out;
  TwoCopySetting setting = two_copy_setting(spec);
  std::size_t n = spec.db_schema.arity(target);
  Tuple xs;
  for (std::size_t i = 1; i <= n; ++i) xs.push_back(Term::variable("x" + std::to_string(i)));
  Tgd goal({Atom{target, xs}}, {Atom{primed(target), xs}});

  ImplicationOptions iopts;
  iopts.budget = opts.budget;
  iopts.fallback_search = false;
  ImplicationVerdict iv = implies(setting.constraints, goal, setting.schema, iopts);
  out.chase_steps = iv.chase_steps;
  if (iv.valid()) {
    out.verdict = Determinacy::determined;
    out.reason = "two-copy chase derives " + primed(target) + " from " + target;
    return out;
  }
  if (iv.invalid() && iv.countermodel) {
    auto pair = detail::pair_from_two_copy_model(spec, setting, *iv.countermodel);
    if (pair && verify_counterexample(spec, target, *pair)) {
      out.verdict = Determinacy::not_determined;
      out.counterexample = std::move(pair);
      out.reason = "terminating two-copy chase yields a counterexample pair";
      return out;
    }
  }
  bool exhausted = false;
  auto pair = search_counterexample_pair(spec, target, opts, &exhausted);
  if (pair && verify_counterexample(spec, target, *pair)) {
    out.verdict = Determinacy::not_determined;
    out.counterexample = std::move(pair);
    out.reason = "bounded search found a counterexample pair";
    return out;
  }
  out.verdict = Determinacy::unknown;
  out.reason = iv.reason + "; no counterexample pair within the search bound";
  return out;
}

enum class Tristate : std::uint8_t { yes, no, unknown };

inline const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::yes: return "yes";
    case Tristate::no: return "no";
    case Tristate::unknown: return "unknown";
  }
  return "?";
}

struct InvertibilityReport {
  Tristate status = Tristate::unknown;
  std::map<std::string, DeterminacyVerdict> per_symbol;

  bool invertible() const { return status == Tristate::yes; }
};

/// Invertible iff every database symbol is determined by the views.
inline InvertibilityReport is_invertible(const ViewSpec& spec,
                                         const DeterminacyOptions& opts = {}) {
  InvertibilityReport out;
  bool all = true, any_no = false;
  for (const auto& name : spec.db_schema.names(SchemaKind::database)) {
    auto v = determines(spec, name, opts);
    all = all && v.determined();
    any_no = any_no || v.not_determined();
    out.per_symbol.emplace(name, std::move(v));
  }
  out.status = all ? Tristate::yes : (any_no ? Tristate::no : Tristate::unknown);
  return out;
}

// ---------------------------------------------------------------------------
// Rewritings
// ---------------------------------------------------------------------------

/// Evaluates a rewriting on a view instance, producing facts of its target.
inline FactSet evaluate_rewriting(const Rewriting& rw, const Instance& view) {
  FactSet out;
  for (auto& row : evaluate_cq(rw.query, view)) out.emplace(rw.target, std::move(row));
  return out;
}

/// Equivalence of the target atom and the rewriting body under Σ, checked
/// as two implications. Optional sample instances are spot-checked: on each
/// one that satisfies Σ_R the rewriting must reproduce the target relation.
inline bool verify_rewriting(const ViewSpec& spec, const Rewriting& rw,
                             std::span<const Instance> samples = {},
                             const DeterminacyOptions& opts = {}) {
  if (!rw.query.is_safe()) return false;
  for (const auto& a : rw.query.body)
    if (!spec.view_schema.contains(a.symbol)) return false;
  if (!spec.db_schema.contains(rw.target) ||
      spec.db_schema.arity(rw.target) != rw.query.head.size())
    return false;

  ConstraintSet cs = all_constraints(spec);
  Schema schema = spec.schema();
  Atom target{rw.target, rw.query.head};
  ImplicationOptions iopts;
  iopts.budget = opts.budget;
  iopts.domain_bound = opts.domain_bound;
  iopts.max_search_atoms = opts.max_search_atoms;
  if (!implies(cs, Tgd({target}, rw.query.body), schema, iopts).valid()) return false;
  if (!implies(cs, Tgd(rw.query.body, {target}), schema, iopts).valid()) return false;

  auto db = spec.database_constraints();
  for (const auto& sample : samples) {
    if (!satisfies(sample, db)) continue;
    Instance view = view_of(spec, sample);
    FactSet expect;
    for (const auto& tup : sample.relation(rw.target)) expect.emplace(rw.target, tup);
    if (evaluate_rewriting(rw, view) != expect) return false;
  }
  return true;
}

namespace detail {

// Turns a set of view facts from the chase of the frozen target into a CQ:
// frozen terms become head variables, other nulls existential variables.
inline std::optional<Rewriting> candidate_from_facts(
    const std::string& target, const Tuple& frozen_head,
    const std::vector<Fact>& facts) {
  Substitution names;
  Tuple head;
  for (std::size_t i = 0; i < frozen_head.size(); ++i) {
    const Term& t = frozen_head[i];
    if (t.is_constant()) {
      head.push_back(t);
      continue;
    }
    auto it = names.find(t);
    if (it == names.end())
      it = names.emplace(t, Term::variable("x" + std::to_string(i + 1))).first;
    head.push_back(it->second);
  }
  std::size_t next = 1;
  std::vector<Atom> body;
  for (const auto& f : facts) {
    Atom a{f.symbol, {}};
    for (const auto& t : f.args) {
      if (t.is_null()) {
        auto it = names.find(t);
        if (it == names.end())
          it = names.emplace(t, Term::variable("y" + std::to_string(next++))).first;
        a.args.push_back(it->second);
      } else {
        a.args.push_back(t);
      }
    }
    body.push_back(std::move(a));
  }
  Rewriting rw{target, ConjunctiveQuery{target, head, std::move(body)}};
  if (!rw.query.is_safe()) return std::nullopt;
  return rw;
}

}  // namespace detail

/// Chase-and-backchase search: chase the frozen target atom with Σ, then try
/// bodies made of the resulting view facts, smallest first and in
/// lexicographic order of fact indices, returning the first that verifies.
inline std::optional<Rewriting> synthesize_rewriting(
    const ViewSpec& spec, const std::string& target,
    const DeterminacyOptions& opts = {}) {
  if (!spec.db_schema.contains(target))
    throw Error(ErrorCode::unknown_symbol,
                "'" + target + "' is not a database symbol");
  ConstraintSet cs = all_constraints(spec);
  Instance start(spec.schema());
  Tuple frozen;
  for (std::size_t i = 0; i < spec.db_schema.arity(target); ++i)
    frozen.push_back(start.fresh_null());
  start.insert(Fact{target, frozen});
  ChaseResult r = chase(start, cs, opts.budget);
  if (!r.succeeded()) return std::nullopt;
  for (auto& t : frozen) t = r.resolve(t);

  std::vector<Fact> view_facts;
  r.instance().for_each_fact([&](const Fact& f) {
    if (spec.view_schema.contains(f.symbol)) view_facts.push_back(f);
  });

  std::size_t max_atoms = std::min(opts.max_body_atoms, view_facts.size());
  for (std::size_t size = 1; size <= max_atoms; ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    for (;;) {
      std::vector<Fact> chosen;
      for (auto i : idx) chosen.push_back(view_facts[i]);
      if (auto rw = detail::candidate_from_facts(target, frozen, chosen)) {
        if (verify_rewriting(spec, *rw, {}, opts)) return rw;
      }
      // next combination
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == view_facts.size() - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Inverse mappings
// ---------------------------------------------------------------------------

/// An invertible view specification together with one verified rewriting
/// per database symbol: the materialized f⁻¹.
struct InverseMapping {
  ViewSpec spec;
  std::map<std::string, Rewriting> rewritings;

  /// f⁻¹ applied to a view instance.
  Instance reconstruct(const Instance& view) const {
    Instance out(spec.db_schema);
    for (const auto& [name, rw] : rewritings)
      for (const auto& f : evaluate_rewriting(rw, view)) out.insert(f);
    return out;
  }
};

/// Builds the inverse mapping, throwing `not_invertible` unless every
/// database symbol is determined and admits a CQ rewriting.
inline InverseMapping compile_inverse(const ViewSpec& spec,
                                      const DeterminacyOptions& opts = {}) {
  InverseMapping out{spec, {}};
  for (const auto& name : spec.db_schema.names(SchemaKind::database)) {
    auto v = determines(spec, name, opts);
    if (!v.determined())
      throw Error(ErrorCode::not_invertible,
                  "database symbol '" + name + "' is " + to_string(v.verdict) +
                      " by the views");
    auto rw = synthesize_rewriting(spec, name, opts);
    if (!rw)
      throw Error(ErrorCode::not_invertible,
                  "no conjunctive rewriting found for '" + name + "'");
    out.rewritings.emplace(name, std::move(*rw));
  }
  return out;
}

}  // namespace viewlens
