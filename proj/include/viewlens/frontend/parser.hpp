#pragma once

// Parsers for the four input languages. All of them report problems as
// diagnostics with source spans instead of throwing.
//
//   spec:    schema R/3.  view V/2.  def V(x,y) :- R(x,y,z).
//            [@db|@view] tgd BODY -> [exists v,...:] HEAD.
//            [@db|@view] egd BODY -> v = w.
//   facts:   R(a,b).
//   update:  update [NAME] { insert A [where C]; delete A [where C];
//                            replace A with B [where C]; }
//            C is a comma list of atoms, `not` atoms, `s = t` and `s != t`.
//   goal:    one tgd or egd statement, as in specs.
//
// In rules, updates and goals bare identifiers are variables and constants
// are quoted or digit-leading. In facts files bare identifiers are constants.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/frontend/lexer.hpp"
#include "viewlens/updates.hpp"

namespace viewlens::frontend {

template <typename T>
struct ParseResult {
  std::optional<T> value;  // set iff there are no diagnostics
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }

  std::string error_text() const {
    std::string out;
    for (const auto& d : diagnostics) out += d.str() + "\n";
    return out;
  }
};

namespace detail {

enum class TermMode { rule, fact };

struct PTerm {
  Term term;
  SourceSpan span;
};

struct PAtom {
  std::string symbol;
  SourceSpan span;  // the symbol token
  std::vector<PTerm> args;

  Atom atom() const {
    Atom a{symbol, {}};
    for (const auto& t : args) a.args.push_back(t.term);
    return a;
  }
};

struct PDependency {
  bool is_tgd = true;
  std::vector<PAtom> body;
  std::vector<PAtom> head;
  std::vector<PTerm> exists;
  PTerm lhs, rhs;
  std::optional<Provenance> provenance;
  SourceSpan keyword;
};

struct PDecl {
  std::string name;
  std::size_t arity = 0;
  SchemaKind kind = SchemaKind::database;
  SourceSpan span;
};

struct PDef {
  PAtom head;
  std::vector<PAtom> body;
};

// Thrown inside a statement to abandon it; the diagnostic is already recorded.
struct Abort {};

class Parser {
 public:
  Parser(std::string_view text, const std::string& file)
      : toks_(tokenize(text, file)) {}

  std::vector<Diagnostic>& diagnostics() { return diags_; }

  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const {
    return peek().kind == Tok::ident && peek().text == w;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }

  void error(const SourceSpan& span, std::string code, std::string message) {
    diags_.push_back(Diagnostic{span, std::move(code), std::move(message)});
  }
  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    if (t.kind == Tok::error)
      error(t.span, "lexical-error", t.text);
    else
      error(t.span, "syntax-error",
            "expected " + expected + ", found " +
                (t.kind == Tok::end ? std::string(describe(t.kind))
                                    : "'" + t.text + "'"));
    throw Abort{};
  }
  const Token& expect(Tok k, const std::string& what = {}) {
    if (!at(k)) fail(peek(), what.empty() ? describe(k) : what);
    return next();
  }
  const Token& expect_word(std::string_view w) {
    if (!at_word(w)) fail(peek(), "'" + std::string(w) + "'");
    return next();
  }

  // Skips past the next `stop` token (or to the end).
  void recover(Tok stop) {
    while (!at(Tok::end) && !at(stop)) next();
    accept(stop);
  }

  // -- shared grammar -------------------------------------------------------

  PTerm term(TermMode mode) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::ident:
        next();
        return {mode == TermMode::rule ? Term::variable(t.text) : Term::constant(t.text),
                t.span};
      case Tok::number:
      case Tok::string:
        next();
        return {Term::constant(t.text), t.span};
      default:
        fail(t, "a term");
    }
  }

  PAtom atom(TermMode mode) {
    const Token& name = expect(Tok::ident, "a relation name");
    PAtom a{name.text, name.span, {}};
    expect(Tok::lparen);
    if (!at(Tok::rparen)) {
      do {
        a.args.push_back(term(mode));
      } while (accept(Tok::comma));
    }
    expect(Tok::rparen, "',' or ')'");
    return a;
  }

  std::vector<PAtom> conjunction() {
    std::vector<PAtom> out;
    do {
      out.push_back(atom(TermMode::rule));
    } while (accept(Tok::comma));
    return out;
  }

  // After the `tgd` / `egd` keyword.
  PDependency dependency(bool is_tgd, const SourceSpan& keyword) {
    PDependency d;
    d.is_tgd = is_tgd;
    d.keyword = keyword;
    if (!at(Tok::arrow)) d.body = conjunction();
    expect(Tok::arrow, "',' or '->'");
    if (is_tgd) {
      if (at_word("exists") && peek(1).kind == Tok::ident) {
        next();
        do {
          const Token& v = expect(Tok::ident, "a variable");
          d.exists.push_back({Term::variable(v.text), v.span});
        } while (accept(Tok::comma));
        expect(Tok::colon, "',' or ':'");
      }
      d.head = conjunction();
    } else {
      d.lhs = term(TermMode::rule);
      expect(Tok::eq);
      d.rhs = term(TermMode::rule);
    }
    expect(Tok::dot, "',' or '.'");
    return d;
  }

  // -- checks ---------------------------------------------------------------

  bool check_atom(const PAtom& a, const Schema& schema,
                  std::optional<SchemaKind> kind = std::nullopt) {
    if (!schema.contains(a.symbol)) {
      error(a.span, "unknown-symbol", "unknown relation '" + a.symbol + "'");
      return false;
    }
    const auto& info = schema.at(a.symbol);
    if (info.arity != a.args.size()) {
      error(a.span, "arity-mismatch",
            "'" + a.symbol + "' has arity " + std::to_string(info.arity) + " but " +
                std::to_string(a.args.size()) + " argument" +
                (a.args.size() == 1 ? " is" : "s are") + " given");
      return false;
    }
    if (kind && info.kind != *kind) {
      auto kind_name = [](SchemaKind k) {
        return k == SchemaKind::view ? "view" : "database";
      };
      error(a.span, "wrong-kind",
            "'" + a.symbol + "' is a " + kind_name(info.kind) +
                " relation; expected a " + kind_name(*kind) + " relation");
      return false;
    }
    return true;
  }

  bool check_atoms(const std::vector<PAtom>& atoms, const Schema& schema,
                   std::optional<SchemaKind> kind = std::nullopt) {
    bool ok = true;
    for (const auto& a : atoms) ok = check_atom(a, schema, kind) && ok;
    return ok;
  }

  static std::set<Term> vars(const std::vector<PAtom>& atoms) {
    std::set<Term> out;
    for (const auto& a : atoms)
      for (const auto& t : a.args)
        if (t.term.is_variable()) out.insert(t.term);
    return out;
  }

  static std::vector<Atom> plain(const std::vector<PAtom>& atoms) {
    std::vector<Atom> out;
    for (const auto& a : atoms) out.push_back(a.atom());
    return out;
  }

  std::optional<Dependency> build(const PDependency& d, const Schema& schema) {
    if (!check_atoms(d.body, schema) || !check_atoms(d.head, schema)) return std::nullopt;
    auto bv = vars(d.body);
    if (!d.is_tgd) {
      bool ok = true;
      for (const auto* t : {&d.lhs, &d.rhs})
        if (t->term.is_variable() && !bv.count(t->term)) {
          error(t->span, "unsafe-rule",
                "variable '" + t->term.name() + "' does not occur in the body");
          ok = false;
        }
      if (!ok) return std::nullopt;
      return Dependency{Egd{plain(d.body), d.lhs.term, d.rhs.term}};
    }
    bool ok = true;
    std::set<Term> declared;
    for (const auto& e : d.exists) {
      if (bv.count(e.term)) {
        error(e.span, "unsafe-rule",
              "existential variable '" + e.term.name() + "' occurs in the body");
        ok = false;
      }
      declared.insert(e.term);
    }
    for (const auto& a : d.head)
      for (const auto& t : a.args)
        if (t.term.is_variable() && !bv.count(t.term) && !declared.count(t.term)) {
          error(t.span, "unsafe-rule",
                "head variable '" + t.term.name() +
                    "' is neither in the body nor declared with exists");
          ok = false;
          declared.insert(t.term);  // report once
        }
    if (!ok) return std::nullopt;
    return Dependency{Tgd(plain(d.body), plain(d.head))};
  }

  // -- spec -----------------------------------------------------------------

  ViewSpec spec() {
    std::vector<PDecl> decls;
    std::vector<PDef> defs;
    std::vector<PDependency> deps;
    while (!at(Tok::end)) {
      try {
        std::optional<Provenance> prov;
        std::optional<SourceSpan> prov_span;
        if (at(Tok::at)) {
          next();
          const Token& p = expect(Tok::ident, "'db' or 'view'");
          if (p.text == "db") {
            prov = Provenance::database;
          } else if (p.text == "view") {
            prov = Provenance::view;
          } else {
            error(p.span, "syntax-error", "unknown provenance '@" + p.text + "'");
            throw Abort{};
          }
          prov_span = p.span;
        }
        const Token& kw = peek();
        if (kw.kind != Tok::ident) fail(kw, "a statement");
        if (prov && kw.text != "tgd" && kw.text != "egd") fail(kw, "'tgd' or 'egd'");
        if (kw.text == "schema" || kw.text == "view") {
          next();
          SchemaKind kind = kw.text == "schema" ? SchemaKind::database : SchemaKind::view;
          do {
            const Token& name = expect(Tok::ident, "a relation name");
            expect(Tok::slash, "'/'");
            const Token& ar = expect(Tok::number, "an arity");
            std::size_t arity = 0;
            for (char c : ar.text) {
              if (c < '0' || c > '9') {
                error(ar.span, "syntax-error", "invalid arity '" + ar.text + "'");
                throw Abort{};
              }
              arity = arity * 10 + static_cast<std::size_t>(c - '0');
            }
            decls.push_back(PDecl{name.text, arity, kind, name.span});
          } while (accept(Tok::comma));
          expect(Tok::dot, "',' or '.'");
        } else if (kw.text == "def") {
          next();
          PDef d;
          d.head = atom(TermMode::rule);
          expect(Tok::implies, "':-'");
          d.body = conjunction();
          expect(Tok::dot, "',' or '.'");
          defs.push_back(std::move(d));
        } else if (kw.text == "tgd" || kw.text == "egd") {
          next();
          auto d = dependency(kw.text == "tgd", kw.span);
          d.provenance = prov;
          deps.push_back(std::move(d));
        } else {
          fail(kw, "'schema', 'view', 'def', 'tgd' or 'egd'");
        }
      } catch (const Abort&) {
        recover(Tok::dot);
      }
    }

    ViewSpec spec;
    for (const auto& d : decls) {
      if (spec.db_schema.contains(d.name) || spec.view_schema.contains(d.name)) {
        error(d.span, "duplicate-symbol", "relation '" + d.name + "' is declared twice");
        continue;
      }
      (d.kind == SchemaKind::database ? spec.db_schema : spec.view_schema)
          .add(d.name, d.arity, d.kind);
    }
    Schema all = Schema::merge(spec.db_schema, spec.view_schema);
    std::map<std::string, SourceSpan> def_at;
    std::set<std::string> attempted;  // views with a definition, valid or not
    for (const auto& d : defs) {
      attempted.insert(d.head.symbol);
      bool ok = check_atom(d.head, all, SchemaKind::view);
      ok = check_atoms(d.body, all, SchemaKind::database) && ok;
      if (!ok) continue;
      if (def_at.count(d.head.symbol)) {
        error(d.head.span, "duplicate-definition",
              "view '" + d.head.symbol + "' is already defined at " +
                  def_at.at(d.head.symbol).str());
        continue;
      }
      auto bv = vars(d.body);
      for (const auto& t : d.head.args)
        if (t.term.is_variable() && !bv.count(t.term)) {
          error(t.span, "unsafe-rule",
                "head variable '" + t.term.name() + "' does not occur in the body");
          ok = false;
          break;
        }
      if (!ok) continue;
      def_at.emplace(d.head.symbol, d.head.span);
      ConjunctiveQuery q{d.head.symbol, d.head.atom().args, plain(d.body)};
      spec.defs.emplace(d.head.symbol, std::move(q));
    }
    for (const auto& d : decls)
      if (d.kind == SchemaKind::view && !attempted.count(d.name) &&
          spec.view_schema.contains(d.name))
        error(d.span, "missing-definition", "view '" + d.name + "' has no definition");
    for (const auto& d : deps) {
      auto dep = build(d, all);
      if (!dep) continue;
      bool db = false, view = false;
      for (const auto& s : symbols_of(*dep))
        (all.at(s).kind == SchemaKind::view ? view : db) = true;
      if (db && view) {
        error(d.keyword, "mixed-provenance",
              "constraint mixes database and view relations");
        continue;
      }
      Provenance inferred = view ? Provenance::view : Provenance::database;
      if (d.provenance && (db || view) && *d.provenance != inferred) {
        error(d.keyword, "wrong-kind",
              std::string("constraint marked @") + to_string(*d.provenance) +
                  " mentions " + (view ? "view" : "database") + " relations");
        continue;
      }
      Provenance p = d.provenance ? *d.provenance : inferred;
      spec.constraints.push_back({std::move(*dep), p});
    }
    return spec;
  }

  // -- facts ----------------------------------------------------------------

  Instance facts(const Schema& schema) {
    Instance inst(schema);
    while (!at(Tok::end)) {
      try {
        PAtom a = atom(TermMode::fact);
        expect(Tok::dot, "'.'");
        if (check_atom(a, schema)) inst.insert(a.atom());
      } catch (const Abort&) {
        recover(Tok::dot);
      }
    }
    return inst;
  }

  // -- updates --------------------------------------------------------------

  Condition condition(const Schema& schema, std::vector<PTerm>& cmp_terms,
                      std::vector<PAtom>& positive) {
    Condition c;
    do {
      if (at_word("not") && peek(1).kind == Tok::ident && peek(2).kind == Tok::lparen) {
        next();
        PAtom a = atom(TermMode::rule);
        if (check_atom(a, schema, SchemaKind::view)) c.negative.push_back(a.atom());
      } else if (peek().kind == Tok::ident && peek(1).kind == Tok::lparen) {
        PAtom a = atom(TermMode::rule);
        if (check_atom(a, schema, SchemaKind::view)) {
          c.positive.push_back(a.atom());
          positive.push_back(a);
        }
      } else {
        PTerm l = term(TermMode::rule);
        bool eq = true;
        if (accept(Tok::neq)) {
          eq = false;
        } else if (!accept(Tok::eq)) {
          fail(peek(), "'=' or '!='");
        }
        PTerm r = term(TermMode::rule);
        cmp_terms.push_back(l);
        cmp_terms.push_back(r);
        c.comparisons.push_back({l.term, r.term, eq});
      }
    } while (accept(Tok::comma));
    return c;
  }

  UpdateStep step(const Schema& schema) {
    const Token& kw = expect(Tok::ident, "'insert', 'delete' or 'replace'");
    UpdateStep s;
    if (kw.text == "insert") {
      s.kind = StepKind::insert;
    } else if (kw.text == "delete") {
      s.kind = StepKind::remove;
    } else if (kw.text == "replace") {
      s.kind = StepKind::replace;
    } else {
      error(kw.span, "syntax-error",
            "expected 'insert', 'delete' or 'replace', found '" + kw.text + "'");
      throw Abort{};
    }
    PAtom pattern = atom(TermMode::rule);
    bool ok = check_atom(pattern, schema, SchemaKind::view);
    std::optional<PAtom> repl;
    if (s.kind == StepKind::replace) {
      expect_word("with");
      repl = atom(TermMode::rule);
      ok = check_atom(*repl, schema, SchemaKind::view) && ok;
      if (ok && repl->symbol != pattern.symbol) {
        // Replacing across relations is allowed when arities agree.
        if (repl->args.size() != pattern.args.size()) {
          error(repl->span, "arity-mismatch",
                "replacement arity differs from the pattern's");
          ok = false;
        }
      }
    }
    std::vector<PTerm> cmp_terms;
    std::vector<PAtom> positive;
    if (at_word("where")) {
      next();
      s.condition = condition(schema, cmp_terms, positive);
    }
    if (!ok) throw Abort{};
    s.pattern = pattern.atom();
    if (repl) s.replacement = repl->atom();

    std::set<Term> bound = vars(positive);
    if (s.kind != StepKind::insert)
      for (const auto& v : vars({pattern})) bound.insert(v);
    std::set<Term> comparable = bound;
    if (s.kind == StepKind::insert)
      for (const auto& v : vars({pattern})) comparable.insert(v);
    if (repl)
      for (const auto& t : repl->args)
        if (t.term.is_variable() && !bound.count(t.term)) {
          error(t.span, "unsafe-rule",
                "replacement variable '" + t.term.name() + "' is not bound");
          ok = false;
        }
    for (const auto& t : cmp_terms)
      if (t.term.is_variable() && !comparable.count(t.term)) {
        error(t.span, "unsafe-rule",
              "comparison variable '" + t.term.name() + "' is not bound");
        ok = false;
      }
    if (!ok) throw Abort{};
    return s;
  }

  std::optional<UpdateProgram> update(const Schema& schema) {
    UpdateProgram u;
    try {
      expect_word("update");
      if (at(Tok::ident)) u.name = next().text;
      const Token& open = expect(Tok::lbrace, u.name.empty() ? "a name or '{'" : "'{'");
      bool failed = false;
      while (!at(Tok::rbrace) && !at(Tok::end)) {
        try {
          u.steps.push_back(step(schema));
          if (!at(Tok::rbrace)) expect(Tok::semicolon, "';' or '}'");
        } catch (const Abort&) {
          failed = true;
          while (!at(Tok::end) && !at(Tok::semicolon) && !at(Tok::rbrace)) next();
          accept(Tok::semicolon);
        }
      }
      expect(Tok::rbrace, "'}'");
      if (!at(Tok::end)) fail(peek(), "end of input");
      if (failed) return std::nullopt;
      if (u.steps.empty()) {
        error(open.span, "empty-update", "update has no steps");
        return std::nullopt;
      }
      return u;
    } catch (const Abort&) {
      return std::nullopt;
    }
  }

  // -- goals ----------------------------------------------------------------

  std::optional<Dependency> goal(const Schema& schema) {
    try {
      const Token& kw = peek();
      if (!(at_word("tgd") || at_word("egd"))) fail(kw, "'tgd' or 'egd'");
      next();
      auto d = dependency(kw.text == "tgd", kw.span);
      if (!at(Tok::end)) fail(peek(), "end of input");
      return build(d, schema);
    } catch (const Abort&) {
      return std::nullopt;
    }
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
};

template <typename T>
ParseResult<T> finish(Parser& p, std::optional<T> value) {
  ParseResult<T> out;
  out.diagnostics = std::move(p.diagnostics());
  if (out.diagnostics.empty()) out.value = std::move(value);
  return out;
}

}  // namespace detail

inline ParseResult<ViewSpec> parse_spec(std::string_view text,
                                        const std::string& file = {}) {
  detail::Parser p(text, file);
  ViewSpec spec = p.spec();
  return detail::finish<ViewSpec>(p, std::move(spec));
}

inline ParseResult<Instance> parse_facts(std::string_view text, const Schema& schema,
                                         const std::string& file = {}) {
  detail::Parser p(text, file);
  Instance inst = p.facts(schema);
  return detail::finish<Instance>(p, std::move(inst));
}

/// `schema` may be the view schema or the whole schema of a spec.
inline ParseResult<UpdateProgram> parse_update(std::string_view text,
                                               const Schema& schema,
                                               const std::string& file = {}) {
  detail::Parser p(text, file);
  auto u = p.update(schema);
  return detail::finish<UpdateProgram>(p, std::move(u));
}

inline ParseResult<Dependency> parse_goal(std::string_view text, const Schema& schema,
                                          const std::string& file = {}) {
  detail::Parser p(text, file);
  auto g = p.goal(schema);
  return detail::finish<Dependency>(p, std::move(g));
}

}  // namespace viewlens::frontend
