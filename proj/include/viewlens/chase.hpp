#pragma once

// Standard (restricted) chase with deterministic trigger order.

#include <cstddef>
#include <optional>
#include <algorithm>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"

namespace viewlens {

inline constexpr std::size_t kDefaultChaseBudget = 10000;

struct ChaseSuccess {
  Instance instance;
};

struct ChaseFailure {
  std::size_t dependency = 0;  // index into the constraint set
  Substitution trigger;
  Instance partial;
};

struct ChaseExhausted {
  Instance partial;
};

struct ChaseResult {
  std::variant<ChaseSuccess, ChaseFailure, ChaseExhausted> outcome;
  std::size_t steps = 0;
  // Terms merged away by egd steps, mapped to the term that replaced them.
  Substitution merged;

  bool succeeded() const { return std::holds_alternative<ChaseSuccess>(outcome); }
  bool failed() const { return std::holds_alternative<ChaseFailure>(outcome); }
  bool exhausted() const { return std::holds_alternative<ChaseExhausted>(outcome); }

  const Instance& instance() const {
    if (const auto* s = std::get_if<ChaseSuccess>(&outcome)) return s->instance;
    if (const auto* f = std::get_if<ChaseFailure>(&outcome)) return f->partial;
    return std::get<ChaseExhausted>(outcome).partial;
  }

  /// Follows egd merges to the representative of `t`.
  Term resolve(Term t) const {
    for (auto it = merged.find(t); it != merged.end(); it = merged.find(t))
      t = it->second;
    return t;
  }
};

namespace detail {

class Chaser {
 public:
  Chaser(Instance inst, const ConstraintSet& cs, std::size_t budget)
      : inst_(std::move(inst)), cs_(cs), budget_(budget), seen_(cs.size(), 0),
        visited_(cs.size(), false) {
    inst_.for_each_fact([&](const Fact& f) { log_.push_back(f); });
  }

  ChaseResult run() {
    ChaseResult result;
    auto finish = [&](Status st) {
      if (st == Status::failed)
        result.outcome = ChaseFailure{failed_dep_, failed_trigger_, std::move(inst_)};
      else if (st == Status::exhausted)
        result.outcome = ChaseExhausted{std::move(inst_)};
      else
        result.outcome = ChaseSuccess{std::move(inst_)};
      result.steps = steps_;
      result.merged = std::move(merged_);
      return std::move(result);
    };
    for (;;) {
      Status st = saturate_egds();
      if (st == Status::failed || st == Status::exhausted) return finish(st);
      bool fired = false;
      for (std::size_t i = 0; i < cs_.size() && !fired; ++i) {
        const auto* t = std::get_if<Tgd>(&cs_[i].dep);
        if (!t) continue;
        st = fire_tgd(i, *t);
        if (st == Status::failed || st == Status::exhausted) return finish(st);
        fired = st == Status::changed;
      }
      if (!fired) return finish(Status::unchanged);
    }
  }

 private:
  enum class Status { unchanged, changed, failed, exhausted };

  // Matches of `body` using at least one fact logged since the last visit of
  // dependency `i`. Older matches were already handled, and tgd and egd
  // steps both preserve a satisfied trigger.
  std::set<Substitution> new_matches(std::size_t i, const std::vector<Atom>& body) {
    std::set<Substitution> out;
    if (body.empty()) {
      // The one empty trigger is examined on the first visit only.
      if (!visited_[i]) out.insert(Substitution{});
      visited_[i] = true;
      return out;
    }
    std::size_t from = seen_[i];
    seen_[i] = log_.size();
    for (std::size_t k = from; k < log_.size(); ++k) {
      const Fact& f = log_[k];
      if (!inst_.contains(f)) continue;
      for (std::size_t j = 0; j < body.size(); ++j) {
        if (body[j].symbol != f.symbol) continue;
        Substitution seed;
        std::vector<Term> bound;
        if (!unify_tuple(body[j].args, f.args, seed, bound, Bindable::variables))
          continue;
        std::vector<Atom> rest;
        for (std::size_t r = 0; r < body.size(); ++r)
          if (r != j) rest.push_back(body[r]);
        for_each_match(rest, inst_, seed, [&](const Substitution& s) {
          out.insert(s);
          return true;
        });
      }
    }
    return out;
  }

  void add(const Fact& f) {
    if (inst_.insert(f)) log_.push_back(f);
  }

  // Fires the active new triggers of tgd `i`. Egds are saturated after every
  // firing; a merge ends the pass since the remaining triggers may be stale.
  Status fire_tgd(std::size_t i, const Tgd& t) {
    std::size_t from = seen_[i];
    auto triggers = new_matches(i, t.body);
    auto existentials = t.existentials();
    Status st = Status::unchanged;
    for (auto it = triggers.begin(); it != triggers.end(); ++it) {
      Substitution s = *it;
      if (has_match(t.head, inst_, s)) continue;
      if (steps_ >= budget_) return Status::exhausted;
      ++steps_;
      for (const auto& z : existentials) s[z] = inst_.fresh_null();
      for (const auto& h : t.head) add(substitute(s, h));
      st = Status::changed;
      Status e = saturate_egds();
      if (e == Status::unchanged) continue;
      // Unfired triggers are revisited on the next pass.
      if (e == Status::changed) seen_[i] = from;
      return e;
    }
    return st;
  }

  Status saturate_egds() {
    Status st = Status::unchanged;
    for (bool again = true; again;) {
      again = false;
      for (std::size_t i = 0; i < cs_.size(); ++i) {
        const auto* e = std::get_if<Egd>(&cs_[i].dep);
        if (!e) continue;
        Status r = fire_egd(i, *e);
        if (r == Status::failed || r == Status::exhausted) return r;
        if (r == Status::changed) again = true, st = Status::changed;
      }
    }
    return st;
  }

  Status fire_egd(std::size_t index, const Egd& e) {
    Status st = Status::unchanged;
    for (;;) {
      std::optional<std::pair<Term, Term>> clash;
      Substitution trigger;
      std::size_t from = seen_[index];
      for (const auto& s : new_matches(index, e.body)) {
        Term a = substitute(s, e.lhs);
        Term b = substitute(s, e.rhs);
        if (a == b) continue;
        clash.emplace(a, b);
        trigger = s;
        break;
      }
      if (!clash) return st;
      // Later clashes in this batch are found again through the log.
      seen_[index] = from;
      auto [a, b] = *clash;
      if (a.is_constant() && b.is_constant()) {
        failed_dep_ = index;
        failed_trigger_ = std::move(trigger);
        return Status::failed;
      }
      if (steps_ >= budget_) return Status::exhausted;
      ++steps_;
      // Keep constants over nulls, lower null index otherwise.
      Term keep = a, drop = b;
      if (b.is_constant() || (!a.is_constant() && b < a)) std::swap(keep, drop);
      merge(drop, keep);
      st = Status::changed;
    }
  }

  void merge(const Term& drop, const Term& keep) {
    std::vector<Fact> touched;
    inst_.for_each_fact([&](const Fact& f) {
      if (std::find(f.args.begin(), f.args.end(), drop) != f.args.end())
        touched.push_back(f);
    });
    inst_.replace_term(drop, keep);
    for (auto& f : touched) {
      std::replace(f.args.begin(), f.args.end(), drop, keep);
      log_.push_back(std::move(f));
    }
    for (auto& [from, to] : merged_)
      if (to == drop) to = keep;
    merged_[drop] = keep;
  }

  Instance inst_;
  const ConstraintSet& cs_;
  std::size_t budget_;
  std::vector<Fact> log_;
  std::vector<std::size_t> seen_;
  std::vector<bool> visited_;
  std::size_t steps_ = 0;
  Substitution merged_;
  std::size_t failed_dep_ = 0;
  Substitution failed_trigger_;
};

}  // namespace detail

/// Chases `inst` with `cs`. Egds take priority and are saturated before any
/// tgd fires and after every tgd firing. Tgds are visited in index order;
/// the first tgd with active triggers fires all of them in match order and
/// the pass restarts from the first dependency. Each tgd firing or egd merge
/// counts as one step.
inline ChaseResult chase(const Instance& inst, const ConstraintSet& cs,
                         std::size_t budget = kDefaultChaseBudget) {
  return detail::Chaser(inst, cs, budget).run();
}

}  // namespace viewlens
