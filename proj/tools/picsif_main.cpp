#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "picsif/auditor.hpp"
#include "picsif/congruence.hpp"
#include "picsif/error.hpp"
#include "picsif/explorer.hpp"
#include "picsif/scenarios.hpp"
#include "picsif/semantics.hpp"
#include "picsif/surface.hpp"

using namespace picsif;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kUnexpected = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string scenario;
  std::string builtin;
  std::optional<int> depth;
  std::optional<int> fuel;
  std::uint64_t seed = 0;
  std::string policy = "first";
  std::string target = "any";
  int workers = 1;
  std::string strategy = "bfs";
  std::size_t state_cap = 2000000;
  std::size_t enum_cap = 12;
  std::string format = "text";
  std::string out;
  std::string witness;
  std::string trace;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScenarioBundle load_bundle(const Options& o) {
  if (!o.builtin.empty()) {
    if (!o.scenario.empty()) throw UsageError("give a scenario file or --builtin, not both");
    try {
      return bundle_by_name(o.builtin);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (o.scenario.empty()) throw UsageError("no scenario given; pass a .scif file or --builtin <name>");
  auto parsed = parse_scenario_file(o.scenario);
  if (!parsed.ok()) {
    std::ostringstream os;
    for (const auto& d : parsed.diagnostics) os << d.str() << "\n";
    throw UsageError(os.str() + "scenario does not parse");
  }
  return ScenarioBundle{parsed.scenario->name, *parsed.scenario, parsed.scenario->expect};
}

int default_depth(const ScenarioBundle& b) { return b.file.exploration ? b.file.exploration->depth : 12; }

bool expects_violation(const ScenarioBundle& b) { return !b.expected.empty() && b.expected != "accountable"; }

void print_verdict(const Verdict& v, const Options& o) { std::cout << (o.format == "kv" ? v.kv() : v.report()); }

int cmd_check(const Options& o) {
  auto b = load_bundle(o);
  auto s = b.state(o.fuel);
  std::cout << "ok " << b.name << ": " << s.scenario().actors.size() << " actors, expect "
            << (b.expected.empty() ? "-" : b.expected) << "\n";
  return kOk;
}

int cmd_run(const Options& o) {
  auto b = load_bundle(o);
  Policy policy = Policy::parse(o.policy, o.seed);
  auto t = run(b.state(o.fuel), std::move(policy), static_cast<std::size_t>(o.depth.value_or(default_depth(b))));
  if (o.format == "kv") {
    for (std::size_t i = 0; i < t.choices.size(); ++i)
      std::cout << "choice " << t.choices[i].index << " " << t.choices[i].label << "\n";
    std::cout << format_trace_kv(t.final);
    std::cout << audit(t.final, o.enum_cap).kv();
  } else {
    for (std::size_t i = 0; i < t.choices.size(); ++i) std::cout << "step " << i << ": " << t.choices[i].label << "\n";
    std::cout << "trace:\n" << format_trace(t.final.full_trace());
    std::cout << audit(t.final, o.enum_cap).report();
  }
  return kOk;
}

int cmd_explore(const Options& o) {
  auto b = load_bundle(o);
  SearchConfig cfg;
  cfg.max_depth = o.depth.value_or(default_depth(b));
  cfg.fuel = o.fuel;
  cfg.target = target_from(o.target);
  cfg.workers = o.workers;
  cfg.state_cap = o.state_cap;
  cfg.enumeration_cap = o.enum_cap;
  cfg.strategy = o.strategy == "dfs" ? Strategy::depth_first : Strategy::breadth_first;
  auto r = explore(b, cfg);
  std::cout << "result=" << to_string(r.kind) << " target=" << to_string(cfg.target) << " depth=" << cfg.max_depth
            << " states=" << r.states << " transitions=" << r.transitions << "\n";
  if (r.kind == SearchResult::Kind::found) {
    std::string path = o.out.empty() ? b.name + "-" + to_string(cfg.target) + ".witness" : o.out;
    std::ofstream(path, std::ios::binary) << format_witness(*r.witness);
    std::cout << "witness " << path << " (" << r.witness->depth() << " steps)\n";
    if (o.format == "text") {
      for (const auto& s : r.witness->steps) {
        std::cout << "  " << s.label << "\n";
        for (const auto& e : s.emitted) std::cout << "    " << format_event(e) << "\n";
      }
    }
    print_verdict(r.witness->verdict, o);
    return expects_violation(b) ? kOk : kUnexpected;
  }
  if (r.kind == SearchResult::Kind::capped) {
    std::cout << "state cap of " << cfg.state_cap << " reached; raise --state-cap or lower --depth\n";
    return kUnexpected;
  }
  return expects_violation(b) ? kUnexpected : kOk;
}

int cmd_replay(const Options& o) {
  auto b = load_bundle(o);
  if (o.witness.empty()) throw UsageError("replay needs --witness <file>");
  Witness w;
  try {
    w = parse_witness(read_file(o.witness));
  } catch (const FormatError& e) {
    throw UsageError(o.witness + ": " + e.what());
  }
  Verdict v;
  try {
    v = replay(b, w, o.fuel, o.enum_cap);
  } catch (const ReplayDivergence& e) {
    std::cout << e.what() << "\n";
    return kUnexpected;
  }
  print_verdict(v, o);
  if (!(v == w.verdict)) {
    std::cout << "verdict differs from the one recorded in the witness\n";
    return kUnexpected;
  }
  return kOk;
}

int cmd_prove(const Options& o) {
  if (o.builtin != "signalgate-authz") throw UsageError("prove knows one builtin proof: --builtin signalgate-authz");
  auto proof = signalgate_authz_proof();
  Process p = proof.expansion.start;
  std::cout << "start  " << pretty(p) << "\n";
  for (const auto& s : proof.expansion.steps) {
    p = apply_axiom(p, s);
    std::cout << s.str() << "\n       " << pretty(p) << "\n";
  }
  Process context = make_hole(p, proof.hole);
  std::cout << "hole at " << format_path(proof.hole) << "\n       " << pretty(context) << "\n";
  Process result = insert_into_hole(context, proof.plug);
  std::cout << "insert " << pretty(proof.plug) << "\n       " << pretty(result) << "\n";
  if (!alpha_equivalent(result, proof.result)) {
    std::cout << "replay does not reach the recorded end\n";
    return kUnexpected;
  }
  return kOk;
}

int cmd_audit(const Options& o) {
  auto b = load_bundle(o);
  if (o.trace.empty()) throw UsageError("audit needs --trace <file>");
  TraceFile t;
  try {
    t = parse_trace_kv(read_file(o.trace));
  } catch (const FormatError& e) {
    throw UsageError(o.trace + ": " + e.what());
  }
  auto s = b.state(o.fuel);
  Verdict v = audit(t.log, t.full, s.scenario().registry, o.enum_cap);
  print_verdict(v, o);
  return !v.accountable() && !expects_violation(b) ? kUnexpected : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"picsif: pi-calculus model of SCIF accountability"};
  app.require_subcommand(1, 1);
  Options o;

  auto scenario_opts = [&](CLI::App* c) {
    c->add_option("scenario", o.scenario, "Scenario file (.scif)");
    c->add_option("--builtin", o.builtin, "Bundled scenario: signalgate, honest2, honest<N>");
    c->add_option("--fuel", o.fuel, "Replication fuel")->check(CLI::PositiveNumber);
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "kv"}));
  };
  auto cap_opt = [&](CLI::App* c) {
    c->add_option("--enum-cap", o.enum_cap, "Most SCIF events the order check will take")->check(CLI::PositiveNumber);
  };

  auto check = app.add_subcommand("check", "Parse a scenario and report diagnostics");
  scenario_opts(check);

  auto runc = app.add_subcommand("run", "Run one trace under a policy");
  scenario_opts(runc);
  runc->add_option("--depth", o.depth, "Maximum number of steps")->check(CLI::PositiveNumber);
  runc->add_option("--seed", o.seed, "Seed for the random policy");
  runc->add_option("--policy", o.policy, "first | random | script=<file>");
  cap_opt(runc);

  auto explorec = app.add_subcommand("explore", "Search for a violating trace");
  scenario_opts(explorec);
  explorec->add_option("--depth", o.depth, "Maximum trace length")->check(CLI::PositiveNumber);
  explorec->add_option("--seed", o.seed, "Accepted for uniformity; the search is deterministic");
  explorec->add_option("--target", o.target, "What to look for")
      ->check(CLI::IsMember({"auth-n", "auth-z", "unrecorded", "non-reconstructable", "any"}));
  explorec->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  explorec->add_option("--strategy", o.strategy, "bfs | dfs")->check(CLI::IsMember({"bfs", "dfs"}));
  explorec->add_option("--state-cap", o.state_cap, "Give up after this many states")->check(CLI::PositiveNumber);
  explorec->add_option("--out", o.out, "Witness file to write on success");
  cap_opt(explorec);

  auto replayc = app.add_subcommand("replay", "Re-verify a witness");
  scenario_opts(replayc);
  replayc->add_option("--witness", o.witness, "Witness file")->required();
  cap_opt(replayc);

  auto prove = app.add_subcommand("prove", "Replay the bundled congruence proof");
  prove->add_option("--builtin", o.builtin, "signalgate-authz")->required();

  auto auditc = app.add_subcommand("audit", "Audit a recorded trace");
  scenario_opts(auditc);
  auditc->add_option("--trace", o.trace, "Trace file in kv format")->required();
  cap_opt(auditc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*runc) return cmd_run(o);
    if (*explorec) return cmd_explore(o);
    if (*replayc) return cmd_replay(o);
    if (*prove) return cmd_prove(o);
    if (*auditc) return cmd_audit(o);
  } catch (const UsageError& e) {
    std::cerr << "picsif: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "picsif: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUsage;
}
