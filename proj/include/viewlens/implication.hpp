#pragma once

// Chase-based logical implication with a bounded countermodel fallback.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "viewlens/chase.hpp"
#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/models.hpp"

namespace viewlens {

inline constexpr std::size_t kDefaultDomainBound = 3;

struct ImplicationOptions {
  std::size_t budget = kDefaultChaseBudget;
  std::size_t domain_bound = kDefaultDomainBound;
  // Countermodel search runs only when the chase is inconclusive; it is
  // skipped at domain sizes whose ground-atom count exceeds this bound.
  bool fallback_search = true;
  std::size_t max_search_atoms = 24;
  std::size_t max_search_nodes = 2000000;
};

enum class Verdict : std::uint8_t { valid, invalid, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::valid: return "valid";
    case Verdict::invalid: return "invalid";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

struct ImplicationVerdict {
  Verdict verdict = Verdict::unknown;
  std::optional<Instance> countermodel;  // set iff invalid
  std::string reason;
  std::size_t chase_steps = 0;

  bool valid() const { return verdict == Verdict::valid; }
  bool invalid() const { return verdict == Verdict::invalid; }
  bool unknown() const { return verdict == Verdict::unknown; }
};

/// Database-kind schema covering every symbol the dependencies mention.
inline Schema infer_schema(const ConstraintSet& cs, const Dependency& goal) {
  Schema out;
  auto add = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms) {
      if (out.contains(a.symbol)) {
        out.check_atom(a);
      } else {
        out.add(a.symbol, a.arity(), SchemaKind::database);
      }
    }
  };
  auto add_dep = [&](const Dependency& d) {
    add(body_of(d));
    if (const auto* t = std::get_if<Tgd>(&d)) add(t->head);
  };
  for (const auto& c : cs) add_dep(c.dep);
  add_dep(goal);
  return out;
}

namespace detail {

// Body variables become labeled nulls so egds may still merge them.
inline Substitution freeze(const std::vector<Atom>& body, Instance& inst) {
  Substitution s;
  for (const auto& v : variables_of(body)) s.emplace(v, inst.fresh_null());
  return s;
}

inline std::vector<Term> search_domain(const ConstraintSet& cs,
                                       const Dependency& goal, std::size_t k) {
  ConstraintSet all = cs;
  all.push_back({goal, Provenance::database});
  auto consts = constants_of(all);
  std::vector<Term> domain(consts.begin(), consts.end());
  std::size_t fresh = 1;
  while (domain.size() < consts.size() + k) {
    Term c = Term::constant("c" + std::to_string(fresh++));
    if (!consts.count(c)) domain.push_back(c);
  }
  return domain;
}

}  // namespace detail

/// Decides cs ⊨ goal. The goal's body is frozen and chased with `cs`:
/// failure or a satisfied (frozen) head means valid; a terminated chase that
/// leaves the head unsatisfied yields its result as countermodel. When the
/// budget runs out, countermodels are searched over growing domains.
inline ImplicationVerdict implies(const ConstraintSet& cs, const Dependency& goal,
                                  const Schema& schema,
                                  const ImplicationOptions& opts = {}) {
  ImplicationVerdict out;
  Instance start(schema);
  Substitution frozen = detail::freeze(body_of(goal), start);
  for (const auto& a : body_of(goal)) start.insert(substitute(frozen, a));

  ChaseResult r = chase(start, cs, opts.budget);
  out.chase_steps = r.steps;
  if (r.failed()) {
    out.verdict = Verdict::valid;
    out.reason = "premises and goal body are inconsistent";
    return out;
  }
  if (r.succeeded()) {
    const Instance& result = r.instance();
    Substitution resolved;
    for (const auto& [v, t] : frozen) resolved.emplace(v, r.resolve(t));
    bool satisfied = false;
    if (const auto* t = std::get_if<Tgd>(&goal)) {
      satisfied = has_match(t->head, result, resolved);
    } else {
      const auto& e = std::get<Egd>(goal);
      satisfied = substitute(resolved, e.lhs) == substitute(resolved, e.rhs);
    }
    if (satisfied) {
      out.verdict = Verdict::valid;
      out.reason = "chase entails the goal head";
      return out;
    }
    Instance cm = ground_nulls(result);
    if (satisfies(cm, cs) && find_violation(cm, goal)) {
      out.verdict = Verdict::invalid;
      out.countermodel = std::move(cm);
      out.reason = "terminating chase leaves the goal head unsatisfied";
      return out;
    }
    // Grounding nulls can only matter through constants in the premises.
    out.reason = "chase result did not ground to a countermodel";
  } else {
    out.reason = "chase budget exhausted after " + std::to_string(r.steps) + " steps";
  }

  if (opts.fallback_search) {
    bool node_limit = false;
    for (std::size_t k = 1; k <= opts.domain_bound; ++k) {
      auto domain = detail::search_domain(cs, goal, k);
      if (ground_atom_count(schema, domain.size()) > opts.max_search_atoms) break;
      auto cm = find_countermodel(cs, goal, schema, domain, opts.max_search_nodes,
                                  &node_limit);
      if (cm) {
        out.verdict = Verdict::invalid;
        out.countermodel = std::move(cm);
        out.reason += "; countermodel found over " + std::to_string(domain.size()) +
                      " constants";
        return out;
      }
    }
    out.reason += "; no countermodel within the search bound";
  }
  out.verdict = Verdict::unknown;
  return out;
}

inline ImplicationVerdict implies(const ConstraintSet& cs, const Dependency& goal,
                                  const ImplicationOptions& opts = {}) {
  return implies(cs, goal, infer_schema(cs, goal), opts);
}

}  // namespace viewlens
