#pragma once

// Seeded random generation of schemas, dependencies, specs, instances and
// update programs. Draws use plain modulo arithmetic on mt19937_64 output so
// a seed produces the same artifacts on every platform.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/updates.hpp"

namespace viewlens {

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(rng_() % n) : 0; }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }

  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

  struct SchemaParams {
    std::size_t min_symbols = 1, max_symbols = 3;
    std::size_t min_arity = 1, max_arity = 3;
    std::string prefix = "R";
  };

  Schema schema(const SchemaParams& p, SchemaKind kind = SchemaKind::database) {
    Schema s;
    std::size_t n = between(p.min_symbols, p.max_symbols);
    for (std::size_t i = 1; i <= n; ++i)
      s.add(p.prefix + std::to_string(i), between(p.min_arity, p.max_arity), kind);
    return s;
  }

  std::vector<Term> variables(std::size_t n, const std::string& prefix = "x") {
    std::vector<Term> out;
    for (std::size_t i = 1; i <= n; ++i)
      out.push_back(Term::variable(prefix + std::to_string(i)));
    return out;
  }

  Atom atom_over(const Schema& schema, const std::vector<std::string>& symbols,
                 const std::vector<Term>& pool) {
    const std::string& sym = pick(symbols);
    Atom a{sym, {}};
    for (std::size_t i = 0; i < schema.arity(sym); ++i) a.args.push_back(pick(pool));
    return a;
  }

  /// A tgd or egd over `symbols`; tgds may have existential head variables.
  Dependency dependency(const Schema& schema, const std::vector<std::string>& symbols,
                        unsigned egd_percent = 30, unsigned existential_percent = 40) {
    auto pool = variables(3);
    if (chance(egd_percent)) {
      for (;;) {
        std::vector<Atom> body;
        std::size_t n = between(1, 2);
        for (std::size_t i = 0; i < n; ++i) body.push_back(atom_over(schema, symbols, pool));
        auto vars = variables_of(body);
        if (vars.size() < 2) continue;
        std::size_t a = below(vars.size()), b = below(vars.size() - 1);
        if (b >= a) ++b;
        return Egd{body, vars[a], vars[b]};
      }
    }
    std::vector<Atom> body;
    std::size_t n = between(1, 2);
    for (std::size_t i = 0; i < n; ++i) body.push_back(atom_over(schema, symbols, pool));
    std::vector<Term> head_pool = variables_of(body);
    if (chance(existential_percent)) head_pool.push_back(Term::variable("z1"));
    std::vector<Atom> head{atom_over(schema, symbols, head_pool)};
    return Tgd(body, head);
  }

  /// Fd-shaped egd on a relation of arity ≥ 2: key prefix determines one
  /// later position.
  std::optional<Egd> functional_dependency(const std::string& symbol, std::size_t arity) {
    if (arity < 2) return std::nullopt;
    std::size_t key = between(1, arity - 1);
    std::size_t target = between(key, arity - 1);
    Atom a{symbol, {}}, b{symbol, {}};
    for (std::size_t i = 0; i < arity; ++i) {
      if (i < key) {
        Term k = Term::variable("k" + std::to_string(i + 1));
        a.args.push_back(k);
        b.args.push_back(k);
      } else {
        a.args.push_back(Term::variable("a" + std::to_string(i + 1)));
        b.args.push_back(Term::variable("b" + std::to_string(i + 1)));
      }
    }
    return Egd{{a, b}, a.args[target], b.args[target]};
  }

  /// Projections and small joins over the database symbols, with optional
  /// fds on the database side.
  ViewSpec spec(std::size_t max_db = 2, std::size_t max_views = 3,
                std::size_t max_arity = 3) {
    ViewSpec s;
    SchemaParams dp;
    dp.max_symbols = max_db;
    dp.max_arity = max_arity;
    s.db_schema = schema(dp);
    auto db_names = s.db_schema.names(SchemaKind::database);
    std::size_t nv = between(1, max_views);
    for (std::size_t i = 1; i <= nv; ++i) {
      std::string name = "V" + std::to_string(i);
      std::vector<Atom> body;
      std::size_t atoms = chance(25) ? 2 : 1;
      auto pool = variables(3);
      for (std::size_t k = 0; k < atoms; ++k) {
        Atom a = atom_over(s.db_schema, db_names, pool);
        if (std::find(body.begin(), body.end(), a) == body.end()) body.push_back(std::move(a));
      }
      auto bv = variables_of(body);
      std::vector<Term> head;
      for (const auto& v : bv)
        if (chance(70)) head.push_back(v);
      if (head.empty()) head.push_back(bv.empty() ? Term::variable("x1") : bv.front());
      if (bv.empty()) continue;  // arity-0 bodies carry no variables
      s.view_schema.add(name, head.size(), SchemaKind::view);
      s.defs.emplace(name, ConjunctiveQuery{name, head, body});
    }
    if (s.view_schema.empty()) {
      const auto& r = db_names.front();
      Tuple h;
      for (const auto& v : variables(s.db_schema.arity(r))) h.push_back(v);
      s.view_schema.add("V1", h.size(), SchemaKind::view);
      s.defs.emplace("V1", ConjunctiveQuery{"V1", h, {Atom{r, h}}});
    }
    for (const auto& r : db_names)
      if (chance(35))
        if (auto fd = functional_dependency(r, s.db_schema.arity(r)))
          s.constraints.push_back({*fd, Provenance::database});
    return s;
  }

  Instance instance(const Schema& schema, const std::vector<Term>& domain,
                    std::size_t max_facts) {
    Instance inst(schema);
    auto names = schema.names(SchemaKind::database);
    auto views = schema.names(SchemaKind::view);
    names.insert(names.end(), views.begin(), views.end());
    if (names.empty()) return inst;
    std::size_t n = below(max_facts + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& sym = pick(names);
      Fact f{sym, {}};
      for (std::size_t k = 0; k < schema.arity(sym); ++k) f.args.push_back(pick(domain));
      inst.insert(f);
    }
    return inst;
  }

  /// A transaction of 1..max_steps steps over the view schema, mixing
  /// constants from `constants` with variables.
  UpdateProgram update(const Schema& view_schema, const std::vector<Term>& constants,
                       std::size_t max_steps = 3) {
    if (constants.empty())
      throw Error(ErrorCode::invalid_argument, "update generation needs constants");
    UpdateProgram u;
    u.name = "u" + std::to_string(below(1000));
    auto names = view_schema.names(SchemaKind::view);
    std::size_t n = between(1, max_steps);
    for (std::size_t i = 0; i < n; ++i) {
      UpdateStep s;
      std::size_t kind = below(3);
      s.kind = kind == 0 ? StepKind::insert : kind == 1 ? StepKind::remove : StepKind::replace;
      auto vars = variables(2, "v");
      std::vector<Term> pool = constants;
      if (s.kind != StepKind::insert) pool.insert(pool.end(), vars.begin(), vars.end());
      s.pattern = atom_over(view_schema, names, pool);
      auto bound = variables_of({s.pattern});
      if (s.kind == StepKind::insert && chance(40)) {
        // Guarded insert: a positive atom binding nothing new, or a negated one.
        if (chance(50)) {
          s.condition.negative.push_back(
              atom_over(view_schema, names, {pick(constants), Term::variable("w")}));
        } else {
          s.condition.positive.push_back(atom_over(view_schema, names, constants));
        }
      }
      if (s.kind == StepKind::replace) {
        std::vector<Term> rpool = constants;
        rpool.insert(rpool.end(), bound.begin(), bound.end());
        Atom r{s.pattern.symbol, {}};
        for (std::size_t k = 0; k < s.pattern.arity(); ++k) r.args.push_back(pick(rpool));
        s.replacement = r;
      }
      if (s.kind != StepKind::insert && !bound.empty() && chance(30))
        s.condition.comparisons.push_back(
            {pick(bound), pick(constants), chance(50)});
      u.steps.push_back(std::move(s));
    }
    return u;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace viewlens
