#pragma once

// Canonical text for parsed values. Parsing the output gives back the same
// value: facts come out sorted, constraints keep their order and always
// carry an explicit provenance prefix.

#include <string>
#include <vector>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/determinacy.hpp"
#include "viewlens/frontend/lexer.hpp"
#include "viewlens/updates.hpp"

namespace viewlens::frontend {

namespace detail {

inline bool lexes_as(const std::string& s, bool (*first)(char)) {
  if (s.empty() || !first(s[0])) return false;
  for (char c : s)
    if (!ident_char(c)) return false;
  return true;
}

inline bool digit_start(char c) { return c >= '0' && c <= '9'; }

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Variables invented by the engine may carry '#' or '~'.
inline std::string variable_text(const std::string& name) {
  std::string out = name;
  for (auto& c : out)
    if (!ident_char(c)) c = '_';
  if (out.empty() || !ident_start(out[0])) out.insert(out.begin(), 'v');
  return out;
}

}  // namespace detail

/// A term inside a rule, update or goal.
inline std::string print_rule_term(const Term& t) {
  if (t.is_variable()) return detail::variable_text(t.name());
  if (t.is_constant())
    return detail::lexes_as(t.name(), detail::digit_start) ? t.name()
                                                           : detail::quoted(t.name());
  return t.str();
}

/// A term inside a facts file.
inline std::string print_fact_term(const Term& t) {
  if (!t.is_constant()) return t.str();
  const std::string& n = t.name();
  if (detail::lexes_as(n, ident_start) || detail::lexes_as(n, detail::digit_start))
    return n;
  return detail::quoted(n);
}

inline std::string print_atom(const Atom& a, bool fact = false) {
  std::string out = a.symbol + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += fact ? print_fact_term(a.args[i]) : print_rule_term(a.args[i]);
  }
  return out + ")";
}

inline std::string print_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += print_atom(atoms[i]);
  }
  return out;
}

/// `tgd ... .` or `egd ... .`
inline std::string print(const Dependency& d) {
  if (const auto* t = std::get_if<Tgd>(&d)) {
    std::string out = "tgd ";
    if (!t->body.empty()) out += print_atoms(t->body) + " ";
    out += "-> ";
    auto ex = t->existentials();
    if (!ex.empty()) {
      out += "exists ";
      for (std::size_t i = 0; i < ex.size(); ++i) {
        if (i) out += ",";
        out += print_rule_term(ex[i]);
      }
      out += ": ";
    }
    return out + print_atoms(t->head) + ".";
  }
  const auto& e = std::get<Egd>(d);
  return "egd " + print_atoms(e.body) + " -> " + print_rule_term(e.lhs) + " = " +
         print_rule_term(e.rhs) + ".";
}

inline std::string print(const Constraint& c) {
  return std::string("@") + to_string(c.provenance) + " " + print(c.dep);
}

/// `V(x,y) :- R(x,y,z)` without the `def` keyword or final dot.
inline std::string print(const ConjunctiveQuery& q) {
  return print_atom(q.head_atom()) + " :- " + print_atoms(q.body);
}

inline std::string print(const Rewriting& rw) { return print(rw.query); }

inline std::string print(const ViewSpec& spec) {
  std::string out;
  for (const auto& [name, info] : spec.db_schema.symbols())
    out += "schema " + name + "/" + std::to_string(info.arity) + ".\n";
  for (const auto& [name, info] : spec.view_schema.symbols())
    out += "view " + name + "/" + std::to_string(info.arity) + ".\n";
  for (const auto& [name, q] : spec.defs) out += "def " + print(q) + ".\n";
  for (const auto& c : spec.constraints) out += print(c) + "\n";
  return out;
}

/// One fact per line, sorted.
inline std::string print(const Instance& inst) {
  std::string out;
  inst.for_each_fact([&](const Fact& f) { out += print_atom(f, true) + ".\n"; });
  return out;
}

inline std::string print(const Condition& c) {
  std::vector<std::string> parts;
  for (const auto& a : c.positive) parts.push_back(print_atom(a));
  for (const auto& a : c.negative) parts.push_back("not " + print_atom(a));
  for (const auto& cmp : c.comparisons)
    parts.push_back(print_rule_term(cmp.lhs) + (cmp.equal ? " = " : " != ") +
                    print_rule_term(cmp.rhs));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

inline std::string print(const UpdateStep& s) {
  std::string out = std::string(to_string(s.kind)) + " " + print_atom(s.pattern);
  if (s.replacement) out += " with " + print_atom(*s.replacement);
  if (!s.condition.empty()) out += " where " + print(s.condition);
  return out;
}

inline std::string print(const UpdateProgram& u) {
  std::string out = "update ";
  if (!u.name.empty()) out += u.name + " ";
  out += "{\n";
  for (const auto& s : u.steps) out += "  " + print(s) + ";\n";
  return out + "}\n";
}

}  // namespace viewlens::frontend
