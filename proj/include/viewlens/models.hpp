#pragma once

// Finite model enumeration over a fixed constant domain. The search decides
// ground atoms one at a time in canonical order (false before true) and
// prunes a branch as soon as some dependency is violated no matter how the
// undecided atoms are set.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"

namespace viewlens {

inline std::vector<Term> numbered_domain(std::size_t k,
                                         const std::string& prefix = "c") {
  std::vector<Term> out;
  for (std::size_t i = 1; i <= k; ++i)
    out.push_back(Term::constant(prefix + std::to_string(i)));
  return out;
}

struct ModelSearchOptions {
  std::vector<Term> domain;
  // Atoms forced true.
  FactSet required;
  // Symbols whose extension is exactly their facts in `required`.
  std::set<std::string> closed;
  // Called after each true decision; returning true prunes the branch. Must
  // be monotone: once it fires it fires for every superset.
  std::function<bool(const Instance&)> prune;
  // Upper bound on visited search nodes; 0 means unbounded.
  std::size_t max_nodes = 0;
};

struct ModelSearchStatus {
  bool complete = true;  // false when stopped by the callback or node bound
  bool node_limit = false;
  std::size_t nodes = 0;
  std::size_t models = 0;
};

namespace detail {

class ModelSearch {
 public:
  ModelSearch(const ConstraintSet& cs, const Schema& schema,
              const ModelSearchOptions& opts)
      : cs_(cs), schema_(schema), opts_(opts), cur_(schema) {
    for (const auto& [name, info] : schema.symbols()) {
      std::vector<std::size_t> digits(info.arity, 0);
      if (info.arity > 0 && opts.domain.empty()) continue;
      for (;;) {
        Tuple t;
        for (auto d : digits) t.push_back(opts.domain[d]);
        index_.emplace(Fact{name, t}, atoms_.size());
        atoms_.emplace_back(name, std::move(t));
        std::size_t pos = info.arity;
        while (pos > 0 && ++digits[pos - 1] == opts.domain.size())
          digits[--pos] = 0;
        if (pos == 0) break;
      }
    }
    value_.assign(atoms_.size(), kUndecided);
  }

  template <typename F>
  ModelSearchStatus run(F&& on_model) {
    for (const auto& f : opts_.required) {
      auto it = index_.find(f);
      if (it == index_.end()) return status_;  // required atom outside domain
      value_[it->second] = 1;
      cur_.insert(f);
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (value_[i] == kUndecided && opts_.closed.count(atoms_[i].symbol))
        value_[i] = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (value_[i] == kUndecided) order_.push_back(i);
    if (!consistent_initially()) return status_;
    if (opts_.prune && opts_.prune(cur_)) return status_;
    search(0, on_model);
    return status_;
  }

 private:
  static constexpr signed char kUndecided = -1;

  bool possible(const Atom& a) const {
    auto it = index_.find(a);
    return it != index_.end() && value_[it->second] != 0;
  }

  // Can the head of a tgd trigger still be satisfied?
  bool head_possible(const std::vector<Atom>& head, std::size_t i,
                     Substitution& s) const {
    if (i == head.size()) return true;
    const Atom& h = head[i];
    for (const auto& t : h.args)
      if (t.is_variable() && !s.count(t)) {
        for (const auto& c : opts_.domain) {
          s[t] = c;
          bool ok = head_possible(head, i, s);
          s.erase(t);
          if (ok) return true;
        }
        return false;
      }
    return possible(substitute(s, h)) && head_possible(head, i + 1, s);
  }

  bool trigger_ok(const Dependency& d, const Substitution& s) const {
    if (const auto* t = std::get_if<Tgd>(&d)) {
      Substitution ext = s;
      return head_possible(t->head, 0, ext);
    }
    const auto& e = std::get<Egd>(d);
    return substitute(s, e.lhs) == substitute(s, e.rhs);
  }

  bool all_triggers_ok(const Dependency& d, const Substitution& seed) const {
    return for_each_match(body_of(d), cur_, seed,
                          [&](const Substitution& s) { return trigger_ok(d, s); });
  }

  bool consistent_initially() const {
    for (const auto& c : cs_)
      if (!all_triggers_ok(c.dep, {})) return false;
    return true;
  }

  // Checks triggers that use the newly true atom `a`.
  bool check_true(const Atom& a) const {
    for (const auto& c : cs_) {
      const auto& body = body_of(c.dep);
      for (const auto& b : body) {
        if (b.symbol != a.symbol) continue;
        Substitution seed;
        std::vector<Term> bound;
        if (!unify_tuple(b.args, a.args, seed, bound, Bindable::variables))
          continue;
        if (!all_triggers_ok(c.dep, seed)) return false;
      }
    }
    return true;
  }

  // Checks tgd triggers that may have relied on `a` as a head witness.
  bool check_false(const Atom& a) const {
    for (const auto& c : cs_) {
      const auto* t = std::get_if<Tgd>(&c.dep);
      if (!t) continue;
      auto body_vars = variable_set(t->body);
      for (const auto& h : t->head) {
        if (h.symbol != a.symbol) continue;
        Substitution s;
        std::vector<Term> bound;
        if (!unify_tuple(h.args, a.args, s, bound, Bindable::variables)) continue;
        Substitution seed;
        for (const auto& [v, val] : s)
          if (body_vars.count(v)) seed.emplace(v, val);
        if (!all_triggers_ok(c.dep, seed)) return false;
      }
    }
    return true;
  }

  template <typename F>
  bool search(std::size_t depth, F& on_model) {
    ++status_.nodes;
    if (opts_.max_nodes && status_.nodes > opts_.max_nodes) {
      status_.complete = false;
      status_.node_limit = true;
      return false;
    }
    if (depth == order_.size()) {
      ++status_.models;
      if (!on_model(static_cast<const Instance&>(cur_))) {
        status_.complete = false;
        return false;
      }
      return true;
    }
    std::size_t idx = order_[depth];
    const Atom& a = atoms_[idx];

    value_[idx] = 0;
    if (check_false(a) && !search(depth + 1, on_model)) {
      value_[idx] = kUndecided;
      return false;
    }

    value_[idx] = 1;
    cur_.insert(a);
    bool keep_going = true;
    if (check_true(a) && !(opts_.prune && opts_.prune(cur_)))
      keep_going = search(depth + 1, on_model);
    cur_.erase(a);
    value_[idx] = kUndecided;
    return keep_going;
  }

  const ConstraintSet& cs_;
  const Schema& schema_;
  const ModelSearchOptions& opts_;
  std::vector<Atom> atoms_;
  std::map<Fact, std::size_t> index_;
  std::vector<signed char> value_;
  std::vector<std::size_t> order_;
  Instance cur_;
  ModelSearchStatus status_;
};

}  // namespace detail

/// Streams every instance over `schema` whose facts use only constants from
/// `opts.domain`, that contains `opts.required`, respects `opts.closed`, and
/// satisfies `cs`. Models arrive in canonical order: atoms are ordered by
/// symbol then tuple, and each atom is tried false before true.
template <typename F>
ModelSearchStatus for_each_model(const ConstraintSet& cs, const Schema& schema,
                                 const ModelSearchOptions& opts, F&& on_model) {
  detail::ModelSearch search(cs, schema, opts);
  return search.run(on_model);
}

/// All models over the constants c1..ck.
inline std::vector<Instance> enumerate_models(const ConstraintSet& cs,
                                              const Schema& schema,
                                              std::size_t k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "domain size must be >= 1");
  ModelSearchOptions opts;
  opts.domain = numbered_domain(k);
  std::vector<Instance> out;
  for_each_model(cs, schema, opts, [&](const Instance& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

/// Number of ground atoms over `schema` and a domain of size `k`.
inline std::size_t ground_atom_count(const Schema& schema, std::size_t k) {
  std::size_t n = 0;
  for (const auto& [name, info] : schema.symbols()) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < info.arity; ++i) c *= k;
    n += c;
  }
  return n;
}

/// Constants mentioned by the dependencies.
inline std::set<Term> constants_of(const ConstraintSet& cs) {
  std::set<Term> out;
  auto scan = [&](const std::vector<Atom>& atoms) {
    for (const auto& a : atoms)
      for (const auto& t : a.args)
        if (t.is_constant()) out.insert(t);
  };
  for (const auto& c : cs) {
    scan(body_of(c.dep));
    if (const auto* t = std::get_if<Tgd>(&c.dep)) scan(t->head);
    if (const auto* e = std::get_if<Egd>(&c.dep)) {
      if (e->lhs.is_constant()) out.insert(e->lhs);
      if (e->rhs.is_constant()) out.insert(e->rhs);
    }
  }
  return out;
}

/// Searches a model of `cs` over `domain` violating `goal`. Every assignment
/// of the goal's body variables is tried in canonical order.
inline std::optional<Instance> find_countermodel(
    const ConstraintSet& cs, const Dependency& goal, const Schema& schema,
    const std::vector<Term>& domain, std::size_t max_nodes = 0,
    bool* hit_node_limit = nullptr) {
  const auto& body = body_of(goal);
  auto vars = variables_of(body);
  std::optional<Instance> found;
  std::vector<std::size_t> digits(vars.size(), 0);
  if (!vars.empty() && domain.empty()) return std::nullopt;
  for (;;) {
    Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta[vars[i]] = domain[digits[i]];
    ModelSearchOptions opts;
    opts.domain = domain;
    opts.max_nodes = max_nodes;
    bool viable = true;
    for (const auto& a : body) {
      Atom g = substitute(theta, a);
      opts.required.insert(g);
    }
    if (const auto* t = std::get_if<Tgd>(&goal)) {
      std::vector<Atom> head = t->head;
      opts.prune = [head, theta](const Instance& cur) {
        return has_match(head, cur, theta);
      };
    } else {
      const auto& e = std::get<Egd>(goal);
      viable = substitute(theta, e.lhs) != substitute(theta, e.rhs);
    }
    if (viable) {
      auto st = for_each_model(cs, schema, opts, [&](const Instance& m) {
        if (find_violation(m, goal)) {
          found = m;
          return false;
        }
        return true;
      });
      if (found) return found;
      if (st.node_limit && hit_node_limit) *hit_node_limit = true;
    }
    std::size_t pos = vars.size();
    while (pos > 0 && ++digits[pos - 1] == domain.size()) digits[--pos] = 0;
    if (pos == 0) break;
  }
  return std::nullopt;
}

}  // namespace viewlens
