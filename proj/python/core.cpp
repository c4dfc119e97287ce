#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "picsif/auditor.hpp"
#include "picsif/congruence.hpp"
#include "picsif/error.hpp"
#include "picsif/explorer.hpp"
#include "picsif/scenarios.hpp"
#include "picsif/surface.hpp"
#include "picsif/vclock.hpp"

namespace py = pybind11;
using namespace picsif;

namespace {

Process parse_or_throw(const std::string& text) {
  auto r = parse_process(text);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += d.str() + "\n";
    throw FormatError(msg.empty() ? "does not parse" : msg);
  }
  return *r.process;
}

ScenarioBundle load_scenario(const std::string& name_or_text) {
  if (name_or_text.find('\n') == std::string::npos) return bundle_by_name(name_or_text);
  auto r = parse_scenario(name_or_text);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += d.str() + "\n";
    throw FormatError(msg.empty() ? "scenario does not parse" : msg);
  }
  return ScenarioBundle{r.scenario->name, *r.scenario, r.scenario->expect};
}

py::dict verdict_dict(const Verdict& v) {
  py::list violations;
  for (const auto& x : v.violations) {
    py::dict d;
    d["kind"] = to_string(x.kind);
    d["seq"] = x.event ? py::cast(x.event->seq) : py::none();
    d["first"] = x.first;
    d["second"] = x.second;
    violations.append(d);
  }
  py::dict out;
  out["summary"] = v.summary();
  out["accountable"] = v.accountable();
  out["violations"] = violations;
  return out;
}

std::vector<std::string> events(const std::vector<EventRecord>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(format_event(e));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pi-calculus model of SCIF accountability";

  // Translators run newest first, so the base goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ReplayDivergence>(m, "ReplayDivergence", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<EnumerationCapExceeded>(m, "EnumerationCapExceeded", base);

  m.def("pretty", [](const std::string& text) { return pretty(parse_or_throw(text)); }, py::arg("process"));
  m.def("normalize", [](const std::string& text) { return pretty(normalize(parse_or_throw(text))); },
        py::arg("process"));
  m.def("congruent", [](const std::string& a, const std::string& b) {
    return congruent(parse_or_throw(a), parse_or_throw(b));
  });
  m.def("alpha_equivalent", [](const std::string& a, const std::string& b) {
    return alpha_equivalent(parse_or_throw(a), parse_or_throw(b));
  });
  m.def("signalgate_proof", [] { return signalgate_authz_proof().str(); });

  m.def("inc_ele", [](std::vector<std::uint64_t> c, std::size_t i) {
    return inc_ele(VectorClockList(std::move(c), Variable{"x"}), i).counters();
  });
  m.def("max_vec", [](std::vector<std::uint64_t> a, std::vector<std::uint64_t> b) {
    return max_vec(VectorClockList(std::move(a), Variable{"x"}), VectorClockList(std::move(b), Variable{"x"}))
        .counters();
  });
  m.def("happened_before", [](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    return std::string(to_string(happened_before(a, b)));
  });

  m.def("scenarios", [] {
    std::vector<std::string> names;
    for (const auto& [file, b] : bundled_scenarios()) names.push_back(b.name);
    return names;
  });
  m.def("scenario_text", [](const std::string& name) { return pretty(bundle_by_name(name).file); });

  py::class_<ScenarioState>(m, "State")
      .def("enabled", [](const ScenarioState& s) {
        std::vector<std::string> labels;
        for (const auto& r : enabled_redexes(s)) labels.push_back(r.label);
        return labels;
      })
      .def("step", [](const ScenarioState& s, std::size_t i) {
        auto en = enabled_redexes(s);
        if (i >= en.size()) throw py::index_error("no redex " + std::to_string(i));
        return fire(s, en[i]);
      })
      .def("trace", [](const ScenarioState& s) { return events(s.full_trace()); })
      .def("so_log", [](const ScenarioState& s) { return events(s.so_log()); })
      .def("trace_kv", [](const ScenarioState& s) { return format_trace_kv(s); })
      .def("key", &ScenarioState::key)
      .def("audit", [](const ScenarioState& s, std::size_t cap) { return verdict_dict(audit(s, cap)); },
           py::arg("cap") = 12);

  m.def("load", [](const std::string& scenario, std::optional<int> fuel) { return load_scenario(scenario).state(fuel); },
        py::arg("scenario"), py::arg("fuel") = py::none());

  m.def(
      "run",
      [](const std::string& scenario, const std::string& policy, std::uint64_t seed, std::size_t steps,
         std::optional<int> fuel) {
        Policy p = policy == "random" ? Policy::random(seed) : Policy::first();
        if (policy != "random" && policy != "first") throw py::value_error("policy is first or random");
        return run(load_scenario(scenario).state(fuel), std::move(p), steps).final;
      },
      py::arg("scenario"), py::arg("policy") = "first", py::arg("seed") = 0, py::arg("steps") = 12,
      py::arg("fuel") = py::none());

  m.def(
      "explore",
      [](const std::string& scenario, const std::string& target, int depth, std::optional<int> fuel,
         const std::string& strategy, int workers, std::size_t state_cap) {
        SearchConfig cfg;
        cfg.max_depth = depth;
        cfg.fuel = fuel;
        cfg.target = target_from(target);
        cfg.workers = workers;
        cfg.state_cap = state_cap;
        if (strategy != "bfs" && strategy != "dfs") throw py::value_error("strategy is bfs or dfs");
        cfg.strategy = strategy == "dfs" ? Strategy::depth_first : Strategy::breadth_first;
        SearchResult r;
        {
          py::gil_scoped_release release;
          r = explore(load_scenario(scenario), cfg);
        }
        py::dict out;
        out["result"] = to_string(r.kind);
        out["states"] = r.states;
        out["transitions"] = r.transitions;
        out["witness"] = r.witness ? py::cast(format_witness(*r.witness)) : py::none();
        out["verdict"] = r.witness ? py::object(verdict_dict(r.witness->verdict)) : py::none();
        return out;
      },
      py::arg("scenario"), py::arg("target") = "any", py::arg("depth") = 12, py::arg("fuel") = py::none(),
      py::arg("strategy") = "bfs", py::arg("workers") = 1, py::arg("state_cap") = 500000);

  m.def(
      "replay",
      [](const std::string& scenario, const std::string& witness, std::optional<int> fuel) {
        return verdict_dict(replay(load_scenario(scenario), parse_witness(witness), fuel));
      },
      py::arg("scenario"), py::arg("witness"), py::arg("fuel") = py::none());
}
