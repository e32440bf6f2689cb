// viewlens command-line driver: parses spec/facts/update files, runs one
// decision procedure and prints a report (JSON by default).
//
// Exit codes: 0 decided, 2 unknown, 1 error.

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "viewlens/viewlens.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace viewlens;
namespace fe = viewlens::frontend;

constexpr int kDecided = 0;
constexpr int kError = 1;
constexpr int kUnknown = 2;

struct Failure {
  std::string code;
  std::string message;
  std::vector<fe::Diagnostic> diagnostics;
};

struct Globals {
  std::size_t budget = kDefaultChaseBudget;
  std::size_t domain_bound = kDefaultDomainBound;
  std::string format = "json";
  std::uint64_t seed = 1;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Failure{"io-error", "sha256 digest failed", {}};
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

class Report {
 public:
  explicit Report(std::string command) {
    doc_["command"] = std::move(command);
    doc_["inputs"] = json::array();
  }

  std::string read(const std::string& path, const std::string& role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{"io-error", "cannot read " + role + " file '" + path + "'", {}};
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    doc_["inputs"].push_back({{"role", role}, {"path", path}, {"sha256", sha256_hex(text)}});
    return text;
  }

  json& verdicts() { return doc_["verdicts"]; }
  json& certificates() { return doc_["certificates"]; }
  void add_steps(std::size_t n) { steps_ += n; }

  json finish() {
    if (!doc_.contains("verdicts")) doc_["verdicts"] = json::object();
    if (!doc_.contains("certificates")) doc_["certificates"] = json::object();
    // Work counters rather than wall-clock time keep reports byte-stable.
    doc_["timing"] = {{"chase_steps", steps_}};
    return doc_;
  }

 private:
  json doc_;
  std::size_t steps_ = 0;
};

template <typename T>
T require(fe::ParseResult<T> r) {
  if (!r.ok()) throw Failure{"parse-error", "input has errors", r.diagnostics};
  return std::move(*r.value);
}

ViewSpec load_spec(Report& rep, const std::string& path, const std::string& role = "spec") {
  ViewSpec spec = require(fe::parse_spec(rep.read(path, role), path));
  validate(spec);
  return spec;
}

json facts_json(const Instance& inst) {
  json out = json::array();
  inst.for_each_fact([&](const Fact& f) { out.push_back(fe::print_atom(f, true)); });
  return out;
}

json delta_json(const GroundDelta& d) {
  json ins = json::array(), del = json::array();
  for (const auto& f : d.insertions) ins.push_back(fe::print_atom(f, true));
  for (const auto& f : d.deletions) del.push_back(fe::print_atom(f, true));
  return {{"insert", ins}, {"delete", del}};
}

json determinacy_json(const DeterminacyVerdict& v) {
  json out{{"verdict", to_string(v.verdict)}, {"reason", v.reason}};
  if (v.counterexample)
    out["counterexample"] = {{"first", facts_json(v.counterexample->first)},
                             {"second", facts_json(v.counterexample->second)}};
  return out;
}

DeterminacyOptions dopts(const Globals& g) {
  DeterminacyOptions o;
  o.budget = g.budget;
  o.domain_bound = g.domain_bound;
  return o;
}

UpdateOptions uopts(const Globals& g) {
  UpdateOptions o;
  o.budget = g.budget;
  o.domain_bound = g.domain_bound;
  return o;
}

int tristate_exit(Tristate t) { return t == Tristate::unknown ? kUnknown : kDecided; }

// -- commands ----------------------------------------------------------------

int cmd_check_invertibility(Report& rep, const Globals& g, const std::string& spec_path) {
  ViewSpec spec = load_spec(rep, spec_path);
  auto r = is_invertible(spec, dopts(g));
  rep.verdicts()["invertible"] = to_string(r.status);
  json per = json::object();
  for (const auto& [name, v] : r.per_symbol) {
    per[name] = determinacy_json(v);
    rep.add_steps(v.chase_steps);
  }
  rep.verdicts()["symbols"] = per;
  json rws = json::object();
  for (const auto& [name, v] : r.per_symbol)
    if (v.determined()) {
      auto rw = synthesize_rewriting(spec, name, dopts(g));
      rws[name] = rw ? json(fe::print(*rw)) : json(nullptr);
    }
  rep.certificates()["rewritings"] = rws;
  return tristate_exit(r.status);
}

int cmd_rewrite(Report& rep, const Globals& g, const std::string& spec_path,
                const std::string& target, std::size_t max_atoms) {
  ViewSpec spec = load_spec(rep, spec_path);
  auto opts = dopts(g);
  opts.max_body_atoms = max_atoms;
  std::vector<std::string> targets;
  if (target.empty()) {
    targets = spec.db_schema.names(SchemaKind::database);
  } else {
    if (!spec.db_schema.contains(target))
      throw Failure{"unknown-symbol", "'" + target + "' is not a database relation", {}};
    targets.push_back(target);
  }
  json rws = json::object();
  for (const auto& t : targets) {
    auto rw = synthesize_rewriting(spec, t, opts);
    rep.verdicts()[t] = rw ? "found" : "none";
    rws[t] = rw ? json(fe::print(*rw)) : json(nullptr);
  }
  rep.certificates()["rewritings"] = rws;
  return kDecided;
}

int cmd_check_complement(Report& rep, const Globals& g, const std::string& f_path,
                         const std::string& g_path, const std::string& facts_path,
                         const std::string& update_path) {
  ViewSpec f = load_spec(rep, f_path, "spec");
  ViewSpec gs = load_spec(rep, g_path, "complement");
  auto cc = is_complement(f, gs, dopts(g));
  rep.verdicts()["complement"] = to_string(cc.is_complement);
  json per = json::object();
  for (const auto& [name, v] : cc.combined.per_symbol) {
    per[name] = determinacy_json(v);
    rep.add_steps(v.chase_steps);
  }
  rep.certificates()["combined"] = per;
  if (facts_path.empty() != update_path.empty())
    throw Failure{"usage", "--facts and --update must be given together", {}};
  if (facts_path.empty()) return tristate_exit(cc.is_complement);

  Instance db = require(fe::parse_facts(rep.read(facts_path, "facts"), f.db_schema, facts_path));
  UpdateProgram u = require(fe::parse_update(rep.read(update_path, "update"), f.view_schema,
                                             update_path));
  auto r = respects_constant_complement(f, gs, u, db, uopts(g), dopts(g));
  rep.verdicts()["constant_complement"] = to_string(r.outcome);
  rep.certificates()["translation"] = delta_json(r.translation.translation);
  rep.certificates()["complement_before"] = facts_json(r.complement_before);
  rep.certificates()["complement_after"] = facts_json(r.complement_after);
  rep.certificates()["via_combined"] = r.via_combined;
  return r.translation.verdict == Translatability::unknown ? kUnknown : kDecided;
}

json translation_json(const TranslatabilityVerdict& v) {
  json out{{"verdict", to_string(v.verdict)}};
  if (v.obstruction != Obstruction::none) out["obstruction"] = to_string(v.obstruction);
  if (!v.detail.empty()) out["detail"] = v.detail;
  return out;
}

int cmd_translate(Report& rep, const Globals& g, const std::string& spec_path,
                  const std::string& facts_path, const std::string& update_path) {
  ViewSpec spec = load_spec(rep, spec_path);
  Instance db = require(fe::parse_facts(rep.read(facts_path, "facts"), spec.db_schema,
                                        facts_path));
  UpdateProgram u = require(fe::parse_update(rep.read(update_path, "update"),
                                             spec.view_schema, update_path));
  auto inv = compile_inverse(spec, dopts(g));
  auto v = translatable_at(inv, u, db, uopts(g));
  rep.verdicts()["translation"] = translation_json(v);
  rep.certificates()["post_view"] = facts_json(v.post_view);
  if (v.translatable()) {
    rep.certificates()["delta"] = delta_json(v.translation);
    rep.certificates()["post_db"] = facts_json(*v.post_db);
  }
  return v.verdict == Translatability::unknown ? kUnknown : kDecided;
}

int cmd_check_update(Report& rep, const Globals& g, const std::string& spec_path,
                     const std::string& update_path, bool everywhere,
                     const std::string& facts_path) {
  ViewSpec spec = load_spec(rep, spec_path);
  UpdateProgram u = require(fe::parse_update(rep.read(update_path, "update"),
                                             spec.view_schema, update_path));
  if (!everywhere && facts_path.empty())
    throw Failure{"usage", "check-update needs --everywhere, --facts or both", {}};
  auto inv = compile_inverse(spec, dopts(g));
  int code = kDecided;
  if (!facts_path.empty()) {
    Instance db = require(fe::parse_facts(rep.read(facts_path, "facts"), spec.db_schema,
                                          facts_path));
    auto v = translatable_at(inv, u, db, uopts(g));
    rep.verdicts()["at_instance"] = translation_json(v);
    if (v.translatable()) rep.certificates()["delta"] = delta_json(v.translation);
    if (v.verdict == Translatability::unknown) code = kUnknown;
  }
  if (everywhere) {
    auto e = translatable_everywhere(inv, u, uopts(g));
    rep.verdicts()["everywhere"] = {{"verdict", to_string(e.verdict)},
                                    {"encodable", e.encodable},
                                    {"cases", e.cases},
                                    {"open_cases", e.open_cases},
                                    {"reason", e.reason}};
    if (e.counterexample) {
      rep.certificates()["counterexample_view"] = facts_json(*e.counterexample);
      rep.certificates()["counterexample_db"] = facts_json(*e.counterexample_db);
    }
    if (e.verdict == Tristate::unknown) code = kUnknown;
  }
  return code;
}

int cmd_implies(Report& rep, const Globals& g, const std::string& spec_path,
                const std::string& goal_arg) {
  ViewSpec spec = load_spec(rep, spec_path);
  std::string text = goal_arg;
  std::ifstream probe(goal_arg);
  if (probe) text = rep.read(goal_arg, "goal");
  Dependency goal = require(fe::parse_goal(text, spec.schema(), probe ? goal_arg : ""));
  ImplicationOptions opts;
  opts.budget = g.budget;
  opts.domain_bound = g.domain_bound;
  auto v = implies(all_constraints(spec), goal, spec.schema(), opts);
  rep.add_steps(v.chase_steps);
  rep.verdicts()["implication"] = {{"goal", fe::print(goal)},
                                   {"verdict", to_string(v.verdict)},
                                   {"reason", v.reason}};
  if (v.countermodel) rep.certificates()["countermodel"] = facts_json(*v.countermodel);
  return v.unknown() ? kUnknown : kDecided;
}

// Brute force over one domain size: consistent states and determinacy by
// grouping states on their view image.
int cmd_oracle(Report& rep, const Globals&, const std::string& spec_path, std::size_t k,
               std::size_t limit) {
  ViewSpec spec = load_spec(rep, spec_path);
  if (k < 1) throw Failure{"usage", "--domain must be at least 1", {}};
  auto base = constants_of(all_constraints(spec));
  auto domain = extended_domain(base, k);
  std::map<FactSet, Instance> by_image;
  std::map<std::string, std::optional<CounterexamplePair>> witness;
  for (const auto& r : spec.db_schema.names(SchemaKind::database)) witness[r];
  std::size_t count = 0;
  json listed = json::array();
  for_each_consistent_state(spec, domain, [&](const Instance& db, const Instance& view) {
    ++count;
    if (listed.size() < limit) listed.push_back(facts_json(db));
    auto [it, fresh] = by_image.emplace(view.facts(), db);
    if (!fresh)
      for (auto& [r, w] : witness)
        if (!w && it->second.relation(r) != db.relation(r))
          w = CounterexamplePair{it->second, db};
    return true;
  });
  json domain_json = json::array();
  for (const auto& c : domain) domain_json.push_back(fe::print_fact_term(c));
  rep.verdicts()["domain"] = domain_json;
  rep.verdicts()["consistent_states"] = count;
  json per = json::object();
  bool injective = true;
  for (const auto& [r, w] : witness) {
    per[r] = w ? "not-determined" : "determined-within-bound";
    injective = injective && !w;
    if (w)
      rep.certificates()[r] = {{"first", facts_json(w->first)},
                               {"second", facts_json(w->second)}};
  }
  rep.verdicts()["symbols"] = per;
  rep.verdicts()["injective_within_bound"] = injective;
  rep.certificates()["states"] = listed;
  return kDecided;
}

int cmd_generate(Report& rep, const Globals& g, const std::string& kind, std::size_t count) {
  Generator gen(g.seed);
  json items = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    ViewSpec spec = gen.spec();
    if (kind == "spec") {
      items.push_back(fe::print(spec));
    } else if (kind == "facts") {
      items.push_back(fe::print(gen.instance(spec.db_schema, numbered_domain(3), 5)));
    } else if (kind == "update") {
      items.push_back(fe::print(gen.update(spec.view_schema, numbered_domain(2))));
    } else {
      throw Failure{"usage", "unknown artifact kind '" + kind + "'", {}};
    }
  }
  rep.verdicts()["seed"] = g.seed;
  rep.certificates()["artifacts"] = items;
  return kDecided;
}

int cmd_print(Report& rep, const std::string& spec_path) {
  ViewSpec spec = load_spec(rep, spec_path);
  rep.certificates()["canonical"] = fe::print(spec);
  return kDecided;
}

// -- output ------------------------------------------------------------------

void render_text(const json& j, const std::string& indent, std::ostream& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    std::string key = j.is_object() ? it.key() : "-";
    bool multiline = v.is_array() && std::any_of(v.begin(), v.end(), [](const json& x) {
      return x.is_string() && x.get<std::string>().find('\n') != std::string::npos;
    });
    if ((v.is_object() || v.is_array()) && v.empty()) {
      out << indent << key << ": (none)\n";
    } else if (v.is_object() || multiline ||
               (v.is_array() && !v.front().is_primitive())) {
      out << indent << key << ":\n";
      render_text(v, indent + "  ", out);
    } else if (v.is_array()) {
      out << indent << key << ":";
      if (v.empty()) out << " (none)";
      for (const auto& x : v) out << " " << (x.is_string() ? x.get<std::string>() : x.dump());
      out << "\n";
    } else if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.find('\n') != std::string::npos) {
        out << indent << key << ":\n";
        std::istringstream lines(s);
        for (std::string line; std::getline(lines, line);) out << indent << "  " << line << "\n";
      } else {
        out << indent << key << ": " << s << "\n";
      }
    } else {
      out << indent << key << ": " << v.dump() << "\n";
    }
  }
}

void emit(const json& doc, const std::string& format) {
  if (format == "text") {
    render_text(doc, "", std::cout);
  } else {
    std::cout << doc.dump(2) << "\n";
  }
}

std::size_t default_budget() {
  if (const char* env = std::getenv("VIEWLENS_BUDGET")) {
    try {
      std::size_t pos = 0;
      unsigned long long v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "viewlens: ignoring invalid VIEWLENS_BUDGET='" << env << "'\n";
  }
  return kDefaultChaseBudget;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewlens: invertibility of views and translation of view updates"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.budget = default_budget();
  app.add_option("--budget", g.budget, "Chase step budget (default from VIEWLENS_BUDGET or 10000)")
      ->check(CLI::PositiveNumber);
  app.add_option("--domain-bound", g.domain_bound, "Largest domain size for bounded searches")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", g.seed, "Seed for random artifact generation");

  std::string spec_path, spec2_path, facts_path, update_path, goal, target, kind = "spec";
  std::size_t max_atoms = 4, domain = 2, limit = 0, count = 1;
  bool everywhere = false;

  auto* inv = app.add_subcommand("check-invertibility", "Decide whether the views determine every database relation");
  inv->add_option("spec", spec_path, "Spec file")->required();

  auto* rw = app.add_subcommand("rewrite", "Synthesize rewritings of database relations over the views");
  rw->add_option("spec", spec_path, "Spec file")->required();
  rw->add_option("--target", target, "Only this database relation");
  rw->add_option("--max-atoms", max_atoms, "Largest rewriting body")->check(CLI::PositiveNumber);

  auto* cc = app.add_subcommand("check-complement", "Check that a second view complements the first");
  cc->add_option("spec", spec_path, "Spec file of the view")->required();
  cc->add_option("complement", spec2_path, "Spec file of the complement")->required();
  cc->add_option("--facts", facts_path, "Database instance for the constant-complement check");
  cc->add_option("--update", update_path, "Update for the constant-complement check");

  auto* tr = app.add_subcommand("translate", "Translate a view update at a database instance");
  tr->add_option("spec", spec_path, "Spec file")->required();
  tr->add_option("--facts", facts_path, "Database instance")->required();
  tr->add_option("--update", update_path, "Update program")->required();

  auto* cu = app.add_subcommand("check-update", "Decide translatability of a view update");
  cu->add_option("spec", spec_path, "Spec file")->required();
  cu->add_option("--update", update_path, "Update program")->required();
  cu->add_flag("--everywhere", everywhere, "Decide for every consistent view state");
  cu->add_option("--facts", facts_path, "Decide at this database instance");

  auto* im = app.add_subcommand("implies", "Decide whether the spec's constraints imply a dependency");
  im->add_option("spec", spec_path, "Spec file")->required();
  im->add_option("--goal", goal, "Goal file, or the goal statement itself")->required();

  auto* orc = app.add_subcommand("oracle", "Brute-force consistent states over a fixed domain");
  orc->add_option("spec", spec_path, "Spec file")->required();
  orc->add_option("--domain", domain, "Number of fresh constants")->required();
  orc->add_option("--limit", limit, "List at most this many states");

  auto* gen = app.add_subcommand("generate", "Print random specs, facts or updates");
  gen->add_option("--kind", kind, "spec, facts or update")
      ->check(CLI::IsMember({"spec", "facts", "update"}));
  gen->add_option("--count", count, "Number of artifacts");

  auto* pr = app.add_subcommand("print", "Print a spec in canonical form");
  pr->add_option("spec", spec_path, "Spec file")->required();

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  Report rep(sub->get_name());
  int code = kError;
  try {
    if (sub == inv) code = cmd_check_invertibility(rep, g, spec_path);
    else if (sub == rw) code = cmd_rewrite(rep, g, spec_path, target, max_atoms);
    else if (sub == cc) code = cmd_check_complement(rep, g, spec_path, spec2_path, facts_path, update_path);
    else if (sub == tr) code = cmd_translate(rep, g, spec_path, facts_path, update_path);
    else if (sub == cu) code = cmd_check_update(rep, g, spec_path, update_path, everywhere, facts_path);
    else if (sub == im) code = cmd_implies(rep, g, spec_path, goal);
    else if (sub == orc) code = cmd_oracle(rep, g, spec_path, domain, limit);
    else if (sub == gen) code = cmd_generate(rep, g, kind, count);
    else if (sub == pr) code = cmd_print(rep, spec_path);
  } catch (const Failure& f) {
    for (const auto& d : f.diagnostics) std::cerr << d.str() << "\n";
    std::cerr << "viewlens: " << f.code << ": " << f.message << "\n";
    json err{{"command", sub->get_name()}, {"error", {{"code", f.code}, {"message", f.message}}}};
    json diags = json::array();
    for (const auto& d : f.diagnostics)
      diags.push_back({{"file", d.span.file},
                       {"line", d.span.line},
                       {"column", d.span.column},
                       {"length", d.span.length},
                       {"code", d.code},
                       {"message", d.message}});
    err["error"]["diagnostics"] = diags;
    emit(err, g.format);
    return kError;
  } catch (const Error& e) {
    std::cerr << "viewlens: " << to_string(e.code()) << ": " << e.what() << "\n";
    emit(json{{"command", sub->get_name()},
              {"error", {{"code", to_string(e.code())}, {"message", e.what()}}}},
         g.format);
    return kError;
  }
  emit(rep.finish(), g.format);
  return code;
}
