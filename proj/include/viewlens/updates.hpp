#pragma once

// View updates (conditional, transactional inserts/deletes/replaces) and the
// decision procedures for translating them onto the database.
//
// Translations exist only for invertible specifications: the translation of
// u at I is I' = f⁻¹(u(f(I))) when that state is consistent, and its delta
// against I is the unique database update t with f∘t = u∘f at I.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "viewlens/chase.hpp"
#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/determinacy.hpp"
#include "viewlens/models.hpp"

namespace viewlens {

// ---------------------------------------------------------------------------
// Update language
// ---------------------------------------------------------------------------

enum class StepKind : std::uint8_t { insert, remove, replace };

inline const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::insert: return "insert";
    case StepKind::remove: return "delete";
    case StepKind::replace: return "replace";
  }
  return "?";
}

struct Comparison {
  Term lhs;
  Term rhs;
  bool equal = true;  // `=` when true, `!=` otherwise
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

/// Conjunction of view atoms, negated view atoms and (in)equalities.
/// Variables occurring only in a negated atom are local to it ("no atom of
/// this shape exists").
struct Condition {
  std::vector<Atom> positive;
  std::vector<Atom> negative;
  std::vector<Comparison> comparisons;

  bool empty() const {
    return positive.empty() && negative.empty() && comparisons.empty();
  }
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct UpdateStep {
  StepKind kind = StepKind::insert;
  Atom pattern;
  std::optional<Atom> replacement;  // replace only
  Condition condition;
  friend bool operator==(const UpdateStep&, const UpdateStep&) = default;
};

/// A transaction: steps run in order, all or nothing.
struct UpdateProgram {
  std::string name;
  std::vector<UpdateStep> steps;
  friend bool operator==(const UpdateProgram&, const UpdateProgram&) = default;
};

/// Structural checks: known view symbols, arities, replacement shape, and
/// safety of conditions and replacements.
inline void validate(const UpdateProgram& u, const Schema& view_schema) {
  if (u.steps.empty())
    throw Error(ErrorCode::invalid_argument, "update program has no steps");
  for (const auto& step : u.steps) {
    view_schema.check_atom(step.pattern);
    for (const auto& a : step.condition.positive) view_schema.check_atom(a);
    for (const auto& a : step.condition.negative) view_schema.check_atom(a);
    std::set<Term> bound = variable_set(step.condition.positive);
    if (step.kind != StepKind::insert)
      for (const auto& v : variable_set({step.pattern})) bound.insert(v);
    if (step.kind == StepKind::replace) {
      if (!step.replacement)
        throw Error(ErrorCode::invalid_argument, "replace step without replacement");
      view_schema.check_atom(*step.replacement);
      if (step.replacement->arity() != step.pattern.arity())
        throw Error(ErrorCode::arity_mismatch,
                    "replacement " + step.replacement->str() +
                        " differs in arity from " + step.pattern.str());
      for (const auto& v : variable_set({*step.replacement}))
        if (!bound.count(v))
          throw Error(ErrorCode::unsafe_rule,
                      "replacement variable " + v.str() + " is not bound");
    } else if (step.replacement) {
      throw Error(ErrorCode::invalid_argument,
                  std::string(to_string(step.kind)) + " step with replacement");
    }
    for (const auto& c : step.condition.comparisons)
      for (const auto& t : {c.lhs, c.rhs})
        if (t.is_variable() && !bound.count(t) &&
            !(step.kind == StepKind::insert && variable_set({step.pattern}).count(t)))
          throw Error(ErrorCode::unsafe_rule,
                      "comparison variable " + t.str() + " is not bound");
  }
}

/// Constants mentioned anywhere in the program.
inline std::set<Term> constants_of(const UpdateProgram& u) {
  std::set<Term> out;
  auto scan = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_constant()) out.insert(t);
  };
  for (const auto& s : u.steps) {
    scan(s.pattern);
    if (s.replacement) scan(*s.replacement);
    for (const auto& a : s.condition.positive) scan(a);
    for (const auto& a : s.condition.negative) scan(a);
    for (const auto& c : s.condition.comparisons) {
      if (c.lhs.is_constant()) out.insert(c.lhs);
      if (c.rhs.is_constant()) out.insert(c.rhs);
    }
  }
  return out;
}

namespace detail {

inline bool condition_holds(const Condition& cond, const Instance& state,
                            const Substitution& s) {
  for (const auto& c : cond.comparisons) {
    Term a = substitute(s, c.lhs), b = substitute(s, c.rhs);
    if (a.is_variable() || b.is_variable())
      throw Error(ErrorCode::non_ground, "comparison over unbound variable");
    if ((a == b) != c.equal) return false;
  }
  for (const auto& n : cond.negative)
    if (has_match({n}, state, s)) return false;
  return true;
}

inline Fact ground_or_throw(const Atom& a, const Substitution& s,
                            const char* what) {
  Atom g = substitute(s, a);
  if (!g.is_ground())
    throw Error(ErrorCode::non_ground,
                std::string("non-ground ") + what + " " + g.str() +
                    " after condition binding");
  return g;
}

}  // namespace detail

/// Runs the program on a ground view state. Each step computes its matches
/// against the state left by the previous step, then applies all of them.
inline Instance apply(const UpdateProgram& u, const Instance& view_state) {
  Instance state = view_state;
  for (const auto& step : u.steps) {
    std::vector<Substitution> matches;
    std::vector<Atom> pattern;
    if (step.kind != StepKind::insert) pattern.push_back(step.pattern);
    for (const auto& a : step.condition.positive) pattern.push_back(a);
    for_each_match(pattern, state, {}, [&](const Substitution& s) {
      if (detail::condition_holds(step.condition, state, s)) matches.push_back(s);
      return true;
    });
    switch (step.kind) {
      case StepKind::insert: {
        std::vector<Fact> add;
        for (const auto& s : matches)
          add.push_back(detail::ground_or_throw(step.pattern, s, "insertion"));
        for (const auto& f : add) state.insert(f);
        break;
      }
      case StepKind::remove: {
        std::vector<Fact> drop;
        for (const auto& s : matches) drop.push_back(substitute(s, step.pattern));
        for (const auto& f : drop) state.erase(f);
        break;
      }
      case StepKind::replace: {
        std::vector<Fact> drop, add;
        for (const auto& s : matches) {
          drop.push_back(substitute(s, step.pattern));
          add.push_back(detail::ground_or_throw(*step.replacement, s, "replacement"));
        }
        for (const auto& f : drop) state.erase(f);
        for (const auto& f : add) state.insert(f);
        break;
      }
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Translatability at an instance
// ---------------------------------------------------------------------------

enum class Translatability : std::uint8_t { translatable, not_translatable, unknown };

enum class Obstruction : std::uint8_t { none, inconsistent_post_state, no_preimage };

inline const char* to_string(Translatability t) {
  switch (t) {
    case Translatability::translatable: return "translatable";
    case Translatability::not_translatable: return "not-translatable";
    case Translatability::unknown: return "unknown";
  }
  return "?";
}
inline const char* to_string(Obstruction o) {
  switch (o) {
    case Obstruction::none: return "none";
    case Obstruction::inconsistent_post_state: return "inconsistent-post-state";
    case Obstruction::no_preimage: return "no-preimage";
  }
  return "?";
}

inline ConstraintSet image_constraints(const InverseMapping& inv);

struct TranslatabilityVerdict {
  Translatability verdict = Translatability::unknown;
  Obstruction obstruction = Obstruction::none;
  GroundDelta translation;       // meaningful when translatable
  Instance post_view;            // u(f(I))
  std::optional<Instance> post_db;  // I' when translatable
  std::string detail;

  bool translatable() const { return verdict == Translatability::translatable; }
};

struct UpdateOptions {
  std::size_t budget = kDefaultChaseBudget;
  std::size_t domain_bound = kDefaultDomainBound;
  std::size_t max_search_atoms = 20;
};

/// Decides whether `u` is translatable at `db` and computes the translation.
inline TranslatabilityVerdict translatable_at(const InverseMapping& inv,
                                              const UpdateProgram& u,
                                              const Instance& db,
                                              const UpdateOptions& opts = {}) {
  const ViewSpec& spec = inv.spec;
  auto sigma_r = spec.database_constraints();
  if (!satisfies(db, sigma_r))
    throw Error(ErrorCode::invalid_argument,
                "database instance violates the database constraints");
  validate(u, spec.view_schema);

  TranslatabilityVerdict out;
  out.post_view = apply(u, view_of(spec, db));
  if (!satisfies(out.post_view, spec.view_constraints())) {
    out.verdict = Translatability::not_translatable;
    out.obstruction = Obstruction::inconsistent_post_state;
    out.detail = "updated view state violates the view constraints";
    return out;
  }
  if (!satisfies(out.post_view, image_constraints(inv))) {
    out.verdict = Translatability::not_translatable;
    out.obstruction = Obstruction::inconsistent_post_state;
    out.detail = "updated view state violates a constraint implied on view states";
    return out;
  }
  Instance candidate = inv.reconstruct(out.post_view);
  ChaseResult r = chase(candidate, sigma_r, opts.budget);
  if (r.exhausted()) {
    out.verdict = Translatability::unknown;
    out.detail = "chase budget exhausted while repairing the preimage";
    return out;
  }
  if (r.failed()) {
    out.verdict = Translatability::not_translatable;
    out.obstruction = Obstruction::no_preimage;
    out.detail = "reconstructed database state violates a database egd";
    return out;
  }
  const Instance& repaired = r.instance();
  if (repaired.has_nulls()) {
    out.verdict = Translatability::not_translatable;
    out.obstruction = Obstruction::no_preimage;
    out.detail = "preimage needs values not determined by the view";
    return out;
  }
  if (!view_of(spec, repaired).same_facts(out.post_view) ||
      !satisfies(repaired, sigma_r)) {
    out.verdict = Translatability::not_translatable;
    out.obstruction = Obstruction::no_preimage;
    out.detail = "no consistent database state has the updated view";
    return out;
  }
  out.verdict = Translatability::translatable;
  out.translation = diff(db, repaired);
  out.post_db = repaired;
  return out;
}

inline TranslatabilityVerdict translatable_at(const ViewSpec& spec,
                                              const UpdateProgram& u,
                                              const Instance& db,
                                              const UpdateOptions& opts = {}) {
  DeterminacyOptions dopts;
  dopts.budget = opts.budget;
  dopts.domain_bound = opts.domain_bound;
  return translatable_at(compile_inverse(spec, dopts), u, db, opts);
}

/// The translation of `u` at `db`; throws `not_translatable` otherwise.
inline GroundDelta translate(const InverseMapping& inv, const UpdateProgram& u,
                             const Instance& db, const UpdateOptions& opts = {}) {
  auto v = translatable_at(inv, u, db, opts);
  if (!v.translatable())
    throw Error(ErrorCode::not_translatable,
                std::string("update is ") + to_string(v.verdict) +
                    (v.detail.empty() ? "" : ": " + v.detail));
  return std::move(v.translation);
}

inline GroundDelta translate(const ViewSpec& spec, const UpdateProgram& u,
                             const Instance& db, const UpdateOptions& opts = {}) {
  DeterminacyOptions dopts;
  dopts.budget = opts.budget;
  return translate(compile_inverse(spec, dopts), u, db, opts);
}

// ---------------------------------------------------------------------------
// Consistent states and preimages
// ---------------------------------------------------------------------------

/// Domain: the given constants plus k fresh ones named c1, c2, ...
inline std::vector<Term> extended_domain(const std::set<Term>& base, std::size_t k) {
  std::vector<Term> out(base.begin(), base.end());
  std::size_t fresh = 1;
  while (out.size() < base.size() + k) {
    Term c = Term::constant("c" + std::to_string(fresh++));
    if (!base.count(c)) out.push_back(c);
  }
  return out;
}

/// Streams every consistent database instance over `domain` (it satisfies
/// Σ_R and its view image satisfies Σ_V) with that image. Returns false when
/// stopped by the callback.
template <typename F>
bool for_each_consistent_state(const ViewSpec& spec, const std::vector<Term>& domain,
                               F&& on_state) {
  ConstraintSet cs = all_constraints(spec);
  ModelSearchOptions mopts;
  mopts.domain = domain;
  auto st = for_each_model(cs, spec.schema(), mopts, [&](const Instance& m) {
    return on_state(m.restricted(SchemaKind::database),
                    m.restricted(SchemaKind::view));
  });
  return st.complete;
}

/// Searches a consistent database instance over `domain` whose view image is
/// exactly `view`, other than `exclude`.
inline std::optional<Instance> find_preimage(const ViewSpec& spec,
                                             const Instance& view,
                                             const std::vector<Term>& domain,
                                             const Instance* exclude = nullptr) {
  ConstraintSet cs = all_constraints(spec);
  ModelSearchOptions mopts;
  mopts.domain = domain;
  mopts.required = view.facts();
  for (const auto& name : spec.view_schema.names(SchemaKind::view))
    mopts.closed.insert(name);
  std::optional<Instance> found;
  for_each_model(cs, spec.schema(), mopts, [&](const Instance& m) {
    Instance db = m.restricted(SchemaKind::database);
    if (exclude && db.same_facts(*exclude)) return true;
    found = std::move(db);
    return false;
  });
  return found;
}

/// Active-domain bound for preimage searches around a translation: update
/// constants, instance constants, spec constants and k fresh constants.
inline std::vector<Term> translation_domain(const ViewSpec& spec,
                                            const UpdateProgram& u,
                                            const Instance& db, std::size_t k) {
  std::set<Term> base = constants_of(u);
  for (const auto& t : db.active_domain()) base.insert(t);
  for (const auto& t : constants_of(all_constraints(spec))) base.insert(t);
  return extended_domain(base, k);
}

// ---------------------------------------------------------------------------
// Translatability for every view state
// ---------------------------------------------------------------------------

namespace detail {

struct Unifier {
  Substitution s;

  Term resolve(Term t) const {
    for (auto it = s.find(t); it != s.end(); it = s.find(t)) t = it->second;
    return t;
  }
  bool unify(const Term& a, const Term& b) {
    Term x = resolve(a), y = resolve(b);
    if (x == y) return true;
    if (x.is_variable()) {
      s[x] = y;
      return true;
    }
    if (y.is_variable()) {
      s[y] = x;
      return true;
    }
    return false;
  }
  Atom apply(const Atom& a) const {
    Atom out{a.symbol, {}};
    for (const auto& t : a.args) out.args.push_back(resolve(t));
    return out;
  }
  std::vector<Atom> apply(const std::vector<Atom>& atoms) const {
    std::vector<Atom> out;
    for (const auto& a : atoms) out.push_back(apply(a));
    return out;
  }
};

inline Substitution fresh_names(const std::vector<Atom>& atoms, const char* sep,
                                std::size_t& counter) {
  ++counter;
  Substitution s;
  for (const auto& v : variables_of(atoms))
    s.emplace(v, Term::variable(v.name() + sep + std::to_string(counter)));
  return s;
}

// Replaces database atoms by the bodies of their rewritings.
inline bool unfold(const std::vector<Atom>& atoms, const InverseMapping& inv,
                   Unifier& u, std::size_t& counter, std::vector<Atom>& out) {
  for (const auto& a : atoms) {
    const Rewriting& rw = inv.rewritings.at(a.symbol);
    std::vector<Atom> all = rw.query.body;
    all.push_back(rw.query.head_atom());
    Substitution ren = fresh_names(all, "~", counter);
    Atom head = viewlens::substitute(ren, rw.query.head_atom());
    for (std::size_t i = 0; i < head.arity(); ++i)
      if (!u.unify(head.args[i], a.args[i])) return false;
    for (const auto& b : rw.query.body) out.push_back(viewlens::substitute(ren, b));
  }
  return true;
}

}  // namespace detail

/// Constraints over the view schema characterizing the consistent view
/// states of an invertible specification: Σ_V, the definitions composed
/// with the rewritings in both directions, and Σ_R composed with the
/// rewritings.
inline ConstraintSet image_constraints(const InverseMapping& inv) {
  const ViewSpec& spec = inv.spec;
  ConstraintSet out = spec.view_constraints();
  std::size_t counter = 0;
  for (const auto& [name, q] : spec.defs) {
    detail::Unifier u;
    std::vector<Atom> body;
    if (!detail::unfold(q.body, inv, u, counter, body)) continue;
    Atom head = u.apply(q.head_atom());
    body = u.apply(body);
    out.push_back({Tgd({head}, body), Provenance::view});
    out.push_back({Tgd(body, {head}), Provenance::view});
  }
  for (const auto& c : spec.database_constraints()) {
    detail::Unifier u;
    std::vector<Atom> body;
    if (!detail::unfold(body_of(c.dep), inv, u, counter, body)) continue;
    if (const auto* t = std::get_if<Tgd>(&c.dep)) {
      std::vector<Atom> head;
      if (!detail::unfold(t->head, inv, u, counter, head)) {
        // Head unsatisfiable under the rewritings: keep the raw dependency
        // out of the image set; the bounded search still covers it.
        continue;
      }
      out.push_back({Tgd(u.apply(body), u.apply(head)), Provenance::view});
    } else {
      const auto& e = std::get<Egd>(c.dep);
      out.push_back({Egd{u.apply(body), u.resolve(e.lhs), u.resolve(e.rhs)},
                     Provenance::view});
    }
  }
  return out;
}

struct EverywhereVerdict {
  Tristate verdict = Tristate::unknown;
  std::optional<Instance> counterexample;  // consistent view state, when `no`
  std::optional<Instance> counterexample_db;
  bool encodable = false;   // the implication encoding applied
  std::size_t cases = 0;    // violation cases examined by the encoding
  std::size_t open_cases = 0;
  std::string reason;
};

namespace detail {

// Inserts only; a negated condition atom may not name a symbol that an
// earlier step inserts into.
inline bool encodable(const UpdateProgram& u) {
  std::set<std::string> inserted;
  for (const auto& s : u.steps) {
    if (s.kind != StepKind::insert) return false;
    for (const auto& n : s.condition.negative)
      if (inserted.count(n.symbol)) return false;
    inserted.insert(s.pattern.symbol);
  }
  return true;
}

inline bool negation_free(const UpdateProgram& u) {
  for (const auto& s : u.steps)
    if (!s.condition.negative.empty()) return false;
  return true;
}

// One way a post-state match can arise: atoms that were already present,
// plus the conditions of the insert steps producing the others.
struct ViolationCase {
  std::vector<Atom> positive;  // over the original view state
  std::vector<Atom> negative;
  std::vector<Comparison> comparisons;
  Unifier unifier;
};

class CaseExpander {
 public:
  CaseExpander(const UpdateProgram& u, std::size_t& counter)
      : u_(u), counter_(counter) {}

  // Expands atoms over the state after `level` steps.
  void expand(std::vector<std::pair<Atom, std::size_t>> pending, ViolationCase c,
              std::vector<ViolationCase>& out) {
    if (pending.empty()) {
      out.push_back(std::move(c));
      return;
    }
    auto [atom, level] = pending.back();
    pending.pop_back();
    if (level == 0) {
      c.positive.push_back(atom);
      expand(std::move(pending), std::move(c), out);
      return;
    }
    {
      auto p = pending;
      p.emplace_back(atom, level - 1);
      expand(std::move(p), c, out);
    }
    const UpdateStep& step = u_.steps[level - 1];
    if (step.pattern.symbol != atom.symbol) return;
    std::vector<Atom> all = step.condition.positive;
    for (const auto& n : step.condition.negative) all.push_back(n);
    all.push_back(step.pattern);
    Substitution ren = fresh_names(all, "#", counter_);
    for (const auto& cmp : step.condition.comparisons)
      for (const auto& t : {cmp.lhs, cmp.rhs})
        if (t.is_variable() && !ren.count(t))
          ren.emplace(t, Term::variable(t.name() + "#" + std::to_string(counter_)));
    ViolationCase c2 = c;
    Atom pat = viewlens::substitute(ren, step.pattern);
    for (std::size_t i = 0; i < pat.arity(); ++i)
      if (!c2.unifier.unify(pat.args[i], atom.args[i])) return;
    for (const auto& n : step.condition.negative)
      c2.negative.push_back(viewlens::substitute(ren, n));
    for (const auto& cmp : step.condition.comparisons)
      c2.comparisons.push_back({viewlens::substitute(ren, cmp.lhs),
                                viewlens::substitute(ren, cmp.rhs), cmp.equal});
    auto p = pending;
    for (const auto& a : step.condition.positive)
      p.emplace_back(viewlens::substitute(ren, a), level - 1);
    expand(std::move(p), std::move(c2), out);
  }

 private:
  const UpdateProgram& u_;
  std::size_t& counter_;
};

enum class CaseOutcome { discharged, open, unknown };

inline CaseOutcome discharge(const ViolationCase& vc, const Dependency& gamma,
                             const std::vector<Atom>& gamma_body,
                             const ConstraintSet& image, const Schema& view_schema,
                             const UpdateProgram& u, const UpdateOptions& opts,
                             std::optional<Instance>* witness = nullptr) {
  Unifier uni = vc.unifier;
  for (const auto& c : vc.comparisons)
    if (c.equal && !uni.unify(c.lhs, c.rhs)) return CaseOutcome::discharged;

  std::vector<Atom> positive = uni.apply(vc.positive);
  Instance start(view_schema);
  Substitution frozen;
  for (const auto& v : variables_of(positive)) frozen.emplace(v, start.fresh_null());
  for (const auto& a : positive) start.insert(viewlens::substitute(frozen, a));

  ChaseResult r = chase(start, image, opts.budget);
  if (r.failed()) return CaseOutcome::discharged;
  if (r.exhausted()) return CaseOutcome::unknown;
  const Instance& pre = r.instance();
  if (witness) *witness = ground_nulls(pre, "c");
  Substitution resolved;
  for (const auto& [v, t] : frozen) resolved.emplace(v, r.resolve(t));
  auto ground = [&](const Term& t) { return viewlens::substitute(resolved, uni.resolve(t)); };

  for (const auto& n : vc.negative) {
    Atom a = uni.apply(n);
    if (has_match({a}, pre, resolved)) return CaseOutcome::discharged;
  }
  for (const auto& c : vc.comparisons)
    if (!c.equal && ground(c.lhs) == ground(c.rhs)) return CaseOutcome::discharged;

  if (const auto* e = std::get_if<Egd>(&gamma))
    return ground(e->lhs) == ground(e->rhs) ? CaseOutcome::discharged
                                            : CaseOutcome::open;

  // The violated tgd's head may be met by facts known to be in the post-state.
  Instance post = pre;
  for (const auto& a : gamma_body) {
    Atom g = viewlens::substitute(resolved, uni.apply(a));
    if (g.is_ground()) post.insert(g);
  }
  if (negation_free(u)) {
    try {
      Instance after = apply(u, pre);
      after.for_each_fact([&](const Fact& f) { post.insert(f); });
    } catch (const Error&) {
    }
  }
  const auto& t = std::get<Tgd>(gamma);
  Substitution seed;
  for (const auto& v : variables_of(t.body)) seed.emplace(v, ground(v));
  return has_match(t.head, post, seed) ? CaseOutcome::discharged : CaseOutcome::open;
}

}  // namespace detail

/// The consistent database state whose image is `view`, if any.
inline std::optional<Instance> preimage_of(const InverseMapping& inv,
                                           const Instance& view,
                                           const UpdateOptions& opts = {}) {
  const ViewSpec& spec = inv.spec;
  if (!satisfies(view, spec.view_constraints())) return std::nullopt;
  auto sigma_r = spec.database_constraints();
  ChaseResult r = chase(inv.reconstruct(view), sigma_r, opts.budget);
  if (!r.succeeded() || r.instance().has_nulls()) return std::nullopt;
  if (!view_of(spec, r.instance()).same_facts(view)) return std::nullopt;
  if (!satisfies(r.instance(), sigma_r)) return std::nullopt;
  return r.instance();
}

/// Searches a consistent view state at which `u` is not translatable. View
/// states are enumerated as models of the image constraints, which every
/// consistent state satisfies, and kept when they have a preimage.
inline std::optional<std::pair<Instance, Instance>> search_untranslatable_state(
    const InverseMapping& inv, const UpdateProgram& u, const UpdateOptions& opts,
    bool* exhausted_all = nullptr) {
  const ViewSpec& spec = inv.spec;
  ConstraintSet image = image_constraints(inv);
  std::set<Term> base = constants_of(u);
  for (const auto& t : constants_of(all_constraints(spec))) base.insert(t);
  for (const auto& t : constants_of(image)) base.insert(t);
  if (exhausted_all) *exhausted_all = true;
  std::optional<std::pair<Instance, Instance>> found;
  for (std::size_t k = 1; k <= opts.domain_bound && !found; ++k) {
    auto domain = extended_domain(base, k);
    if (ground_atom_count(spec.view_schema, domain.size()) > opts.max_search_atoms) {
      if (exhausted_all) *exhausted_all = false;
      break;
    }
    ModelSearchOptions mopts;
    mopts.domain = domain;
    for_each_model(image, spec.view_schema, mopts, [&](const Instance& view) {
      auto db = preimage_of(inv, view, opts);
      if (!db) return true;
      auto v = translatable_at(inv, u, *db, opts);
      if (v.verdict == Translatability::not_translatable) {
        found.emplace(view, std::move(*db));
        return false;
      }
      return true;
    });
  }
  return found;
}

/// Decides translatability of `u` at every consistent view state. Within
/// the insert-only fragment the question reduces to whether the image
/// constraints are preserved: every way a constraint violation could arise
/// in the post-state is expanded into a conjunctive case over the original
/// state and discharged by chasing it with the image constraints. `no`
/// always comes with a consistent view state where translation fails.
inline EverywhereVerdict translatable_everywhere(const InverseMapping& inv,
                                                 const UpdateProgram& u,
                                                 const UpdateOptions& opts = {}) {
  const ViewSpec& spec = inv.spec;
  validate(u, spec.view_schema);
  EverywhereVerdict out;
  out.encodable = detail::encodable(u);
  if (out.encodable) {
    ConstraintSet image = image_constraints(inv);
    std::size_t counter = 0;
    bool any_unknown = false;
    for (const auto& c : image) {
      const auto& body = body_of(c.dep);
      detail::ViolationCase seed;
      std::vector<std::pair<Atom, std::size_t>> pending;
      for (const auto& a : body) pending.emplace_back(a, u.steps.size());
      std::vector<detail::ViolationCase> cases;
      detail::CaseExpander(u, counter).expand(pending, seed, cases);
      for (const auto& vc : cases) {
        ++out.cases;
        std::optional<Instance> witness;
        auto r = detail::discharge(vc, c.dep, body, image, spec.view_schema, u, opts,
                                   &witness);
        if (r == detail::CaseOutcome::open) {
          ++out.open_cases;
          if (!out.counterexample && witness) {
            // The case's chased premise is itself a candidate state.
            if (auto db = preimage_of(inv, *witness, opts)) {
              auto v = translatable_at(inv, u, *db, opts);
              if (v.verdict == Translatability::not_translatable) {
                out.counterexample = std::move(*witness);
                out.counterexample_db = std::move(*db);
              }
            }
          }
        }
        if (r == detail::CaseOutcome::unknown) any_unknown = true;
      }
    }
    if (out.open_cases == 0 && !any_unknown) {
      out.verdict = Tristate::yes;
      out.reason = "every post-state violation case is refuted by the image constraints";
      return out;
    }
    out.reason = std::to_string(out.open_cases) + " of " + std::to_string(out.cases) +
                 " violation cases not discharged";
    if (out.counterexample) {
      out.verdict = Tristate::no;
      out.reason += "; an open case yields a counterexample view state";
      return out;
    }
  } else {
    out.reason = "update leaves the insert-only fragment";
  }
  bool exhausted = false;
  if (auto cx = search_untranslatable_state(inv, u, opts, &exhausted)) {
    out.verdict = Tristate::no;
    out.counterexample = std::move(cx->first);
    out.counterexample_db = std::move(cx->second);
    out.reason += "; counterexample view state found";
    return out;
  }
  out.verdict = Tristate::unknown;
  out.reason += "; no counterexample within the search bound";
  return out;
}

}  // namespace viewlens
