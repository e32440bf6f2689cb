#pragma once

// View complements and the constant-complement condition.

#include <string>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/determinacy.hpp"
#include "viewlens/updates.hpp"

namespace viewlens {

/// The view of `f` and `g` side by side: union of the view schemas,
/// definitions and view constraints over the shared database schema.
inline ViewSpec combine_views(const ViewSpec& f, const ViewSpec& g) {
  if (!(f.db_schema == g.db_schema))
    throw Error(ErrorCode::invalid_argument,
                "complement candidates must share the database schema");
  auto fr = f.database_constraints();
  auto gr = g.database_constraints();
  if (fr != gr)
    throw Error(ErrorCode::invalid_argument,
                "complement candidates must share the database constraints");
  ViewSpec out;
  out.db_schema = f.db_schema;
  out.view_schema = Schema::merge(f.view_schema, g.view_schema);
  out.defs = f.defs;
  for (const auto& [name, q] : g.defs) out.defs.emplace(name, q);
  out.constraints = fr;
  for (const auto& c : f.view_constraints()) out.constraints.push_back(c);
  for (const auto& c : g.view_constraints()) out.constraints.push_back(c);
  return out;
}

struct ComplementCheck {
  Tristate is_complement = Tristate::unknown;
  InvertibilityReport combined;
};

/// `g` complements `f` iff the combined view is invertible.
inline ComplementCheck is_complement(const ViewSpec& f, const ViewSpec& g,
                                     const DeterminacyOptions& opts = {}) {
  ComplementCheck out;
  out.combined = is_invertible(combine_views(f, g), opts);
  out.is_complement = out.combined.status;
  return out;
}

enum class ComplementOutcome : std::uint8_t {
  constant,         // g(I') = g(I)
  changed,          // the translation alters the complement
  not_complement,   // precondition: g does not complement f
  not_translatable, // precondition: u has no translation at I
};

inline const char* to_string(ComplementOutcome o) {
  switch (o) {
    case ComplementOutcome::constant: return "constant";
    case ComplementOutcome::changed: return "changed";
    case ComplementOutcome::not_complement: return "not-complement";
    case ComplementOutcome::not_translatable: return "not-translatable";
  }
  return "?";
}

struct ConstantComplementCheck {
  ComplementOutcome outcome = ComplementOutcome::not_complement;
  // Which specification produced the translation: `f` alone when it is
  // invertible, otherwise f and g combined with g held fixed.
  bool via_combined = false;
  TranslatabilityVerdict translation;
  Instance complement_before;
  Instance complement_after;

  bool respected() const { return outcome == ComplementOutcome::constant; }
};

/// Translates `u` at `db` and compares the complement view before and after.
/// When `f` is invertible on its own its translation is used; otherwise the
/// update is translated through the combined view, which is the constant
/// complement translation whenever one exists.
inline ConstantComplementCheck respects_constant_complement(
    const ViewSpec& f, const ViewSpec& g, const UpdateProgram& u,
    const Instance& db, const UpdateOptions& uopts = {},
    const DeterminacyOptions& dopts = {}) {
  ConstantComplementCheck out;
  auto cc = is_complement(f, g, dopts);
  if (cc.is_complement != Tristate::yes) {
    out.outcome = ComplementOutcome::not_complement;
    return out;
  }
  for (const auto& step : u.steps)
    if (!f.view_schema.contains(step.pattern.symbol))
      throw Error(ErrorCode::invalid_argument,
                  "update step on '" + step.pattern.symbol + "' is not over the view");

  ViewSpec combined = combine_views(f, g);
  auto own = is_invertible(f, dopts);
  out.via_combined = !own.invertible();
  InverseMapping inv = compile_inverse(out.via_combined ? combined : f, dopts);
  out.translation = translatable_at(inv, u, db, uopts);
  out.complement_before = view_of(g, db);
  if (!out.translation.translatable()) {
    out.outcome = ComplementOutcome::not_translatable;
    out.complement_after = out.complement_before;
    return out;
  }
  out.complement_after = view_of(g, *out.translation.post_db);
  out.outcome = out.complement_after.same_facts(out.complement_before)
                    ? ComplementOutcome::constant
                    : ComplementOutcome::changed;
  return out;
}

}  // namespace viewlens
