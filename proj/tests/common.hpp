#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "viewlens/viewlens.hpp"

namespace viewlens {
inline void PrintTo(const Term& t, std::ostream* os) { *os << t.str(); }
inline void PrintTo(const Atom& a, std::ostream* os) { *os << a.str(); }
}  // namespace viewlens

namespace testing_support {

template <typename T>
T value_or_throw(viewlens::frontend::ParseResult<T> r) {
  if (!r.ok()) throw std::runtime_error(r.error_text());
  return std::move(*r.value);
}

inline viewlens::ViewSpec spec(const std::string& text) {
  return value_or_throw(viewlens::frontend::parse_spec(text, "<test>"));
}

inline viewlens::Instance facts(const std::string& text, const viewlens::Schema& schema) {
  return value_or_throw(viewlens::frontend::parse_facts(text, schema, "<test>"));
}

inline viewlens::UpdateProgram update(const std::string& text, const viewlens::Schema& schema) {
  return value_or_throw(viewlens::frontend::parse_update(text, schema, "<test>"));
}

inline viewlens::Dependency goal(const std::string& text, const viewlens::Schema& schema) {
  return value_or_throw(viewlens::frontend::parse_goal(text, schema, "<test>"));
}

/// Constraints of a constraint-only spec text, all tagged as database side.
inline viewlens::ConstraintSet constraints(const viewlens::ViewSpec& s) {
  return s.database_constraints();
}

inline const char* kCosPap =
    "schema R/3.\n"
    "view V1/2, V2/2.\n"
    "def V1(x,y) :- R(x,y,z).\n"
    "def V2(y,z) :- R(x,y,z).\n"
    "egd R(x,y,z), R(x2,y,z2) -> z = z2.\n";

inline const char* kCosPapNoFd =
    "schema R/3.\n"
    "view V1/2, V2/2.\n"
    "def V1(x,y) :- R(x,y,z).\n"
    "def V2(y,z) :- R(x,y,z).\n";

inline const char* kKeyedCopy =
    "schema R/2.\n"
    "view V/2.\n"
    "def V(x,y) :- R(x,y).\n"
    "@view egd V(x,y), V(x,z) -> y = z.\n";

/// Generates one artifact of kind `i % 3` (spec, facts, update) and
/// checks that parsing its printed form gives it back. Returns an empty
/// string on success, otherwise a description of the mismatch.
inline std::string round_trip(viewlens::Generator& gen, int i) {
  using namespace viewlens;
  ViewSpec s = gen.spec();
  std::string text = frontend::print(s);
  auto ps = frontend::parse_spec(text, "<gen>");
  if (!ps.ok()) return "spec does not parse:\n" + text + ps.error_text();
  if (!(*ps.value == s)) return "spec differs after round trip:\n" + text;
  if (frontend::print(*ps.value) != text) return "spec print is not stable:\n" + text;
  if (i % 3 == 1) {
    std::vector<Term> dom{constant("a"), constant("b"), constant("c d"), constant("7")};
    Instance inst = gen.instance(s.schema(), dom, 6);
    std::string ft = frontend::print(inst);
    auto pf = frontend::parse_facts(ft, s.schema(), "<gen>");
    if (!pf.ok()) return "facts do not parse:\n" + ft + pf.error_text();
    if (!pf.value->same_facts(inst)) return "facts differ after round trip:\n" + ft;
  }
  if (i % 3 == 2) {
    UpdateProgram u = gen.update(s.view_schema, {constant("a"), constant("b"), constant("3")});
    std::string ut = frontend::print(u);
    auto pu = frontend::parse_update(ut, s.schema(), "<gen>");
    if (!pu.ok()) return "update does not parse:\n" + ut + pu.error_text();
    if (!(*pu.value == u)) return "update differs after round trip:\n" + ut;
  }
  return {};
}

struct Fixture {
  std::string path;
  std::string code;
  std::size_t line = 0, column = 0;
  std::vector<viewlens::frontend::Diagnostic> diagnostics;
};

/// Parses a grammar-violation fixture. The first line reads
/// `# expect: CODE LINE COLUMN`; the extension selects the parser. Facts and
/// updates use the schema R/2 with view V/2.
inline Fixture load_fixture(const std::filesystem::path& p) {
  using namespace viewlens;
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  Fixture fx;
  fx.path = p.filename().string();
  std::istringstream header(text.substr(0, text.find('\n')));
  std::string hash, tag;
  header >> hash >> tag >> fx.code >> fx.line >> fx.column;
  auto base = spec("schema R/2. view V/2. def V(x,y) :- R(x,y).");
  auto ext = p.extension().string();
  if (ext == ".vl")
    fx.diagnostics = frontend::parse_spec(text, fx.path).diagnostics;
  else if (ext == ".upd")
    fx.diagnostics = frontend::parse_update(text, base.schema(), fx.path).diagnostics;
  else
    fx.diagnostics = frontend::parse_facts(text, base.db_schema, fx.path).diagnostics;
  return fx;
}

/// Empty when the first diagnostic has the expected code and its span
/// starts at the expected position.
inline std::string check_fixture(const Fixture& fx) {
  if (fx.diagnostics.empty()) return fx.path + ": no diagnostic";
  const auto& d = fx.diagnostics.front();
  if (d.code != fx.code || d.span.line != fx.line || d.span.column != fx.column ||
      d.span.length < 1 || d.span.file != fx.path)
    return fx.path + ": got " + d.str();
  return {};
}

inline std::vector<std::filesystem::path> fixture_paths(const std::string& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing_support
