#include "picsif/scenarios.hpp"

#include <map>

#include "picsif/congruence.hpp"
#include "picsif/error.hpp"

namespace picsif {

namespace {

// Replaces `$key` placeholders, longest key first.
std::string expand(std::string text, const std::map<std::string, std::string>& vars) {
  std::vector<std::pair<std::string, std::string>> order(vars.begin(), vars.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  for (const auto& [k, v] : order) {
    std::string key = "$" + k;
    for (auto at = text.find(key); at != std::string::npos; at = text.find(key, at + v.size()))
      text.replace(at, key.size(), v);
  }
  return text;
}

Process parse_or_throw(const std::string& text) {
  auto r = parse_process(text, "<builtin>");
  if (!r.ok()) throw Error("builtin term does not parse: " + r.diagnostics.front().str());
  return *r.process;
}

const char* kClockCore = R"(new vc. send cm(vc)
| rep recv cc<va>. call IncEle(va, @$i). send cm(va)
| $memory
| rep recv cs<vo>. $send
| rep recv tr^{mu,$i}<$rslots>. recv cr<vs>. call IncEle(vs, @$i). call MaxVec(vr, vs). send cm(vs))";

Process clock_actor(const std::string& self, bool honest) {
  std::map<std::string, std::string> vars{{"i", self}};
  if (honest) {
    vars["memory"] = "rep recv cm<vm>. send cuc(vm). { send cc(vm) + send cs(vm) + send cr(vm) }";
    vars["send"] = "new sm. call IncEle(vo, @$i). { send cm(vo) | send tr^{$i,mu}(sm, vo) }";
    vars["rslots"] = "m, vr";
  } else {
    vars["memory"] = "rep recv cm<vm>. { send cc(vm) + send cs(vm) + send cr(vm) }";
    vars["send"] = "call IncEle(vo, @$i). { send cm(vo) | send tr^{$i,mu}(vo) }";
    vars["rslots"] = "vr";
  }
  std::string text = expand(expand(kClockCore, vars), vars);
  if (honest) text += "\n| rep recv cuc<vu>. send tr^{" + self + ",so}(vu)";
  return parse_or_throw(text);
}

std::map<std::string, std::string> role_vars(const AdversaryRole& r) {
  return {{"self", r.self.label}, {"scif", r.scif.label}, {"phone", r.phone.label},
          {"peer", r.peer.label}, {"u", r.journalist.label}};
}

void components(const Process& p, std::vector<Process>& out) {
  if (p.is(Process::Kind::parallel)) {
    components(p.left(), out);
    components(p.right(), out);
  } else {
    out.push_back(p);
  }
}

// Right-nested parallel of every component of `parts`.
Process chain_parallel(const std::vector<Process>& parts) {
  std::vector<Process> flat;
  for (const auto& p : parts) components(p, flat);
  Process out = flat.back();
  for (std::size_t i = flat.size() - 1; i-- > 0;) out = Process::parallel(flat[i], out);
  return out;
}

ActorDecl actor(std::string name, std::vector<std::string> ids, Process p) {
  ActorDecl a;
  a.name = std::move(name);
  for (auto& i : ids) a.identities.push_back(Variable{std::move(i)});
  a.process = std::move(p);
  return a;
}

ChannelId chan(const char* label) { return ChannelId{Name(label, NameKind::channel), std::nullopt}; }

std::vector<ChannelId> chans(std::initializer_list<const char*> labels) {
  std::vector<ChannelId> out;
  for (auto l : labels) out.push_back(chan(l));
  return out;
}

// Reads the printed file back so kinds and binders match what a user loading
// `scenarios/*.scif` gets.
ScenarioFile settle_file(const ScenarioFile& f) {
  auto r = parse_scenario(pretty(f), "<builtin>");
  if (!r.ok()) throw Error("builtin scenario does not parse: " + r.diagnostics.front().str());
  return *r.scenario;
}

}  // namespace

Process build_so() { return clock_actor("so", false); }
Process build_so(const Variable& self) { return clock_actor(self.label, false); }

Process build_alice() { return clock_actor("alice", true); }
Process build_alice(const Variable& self) { return clock_actor(self.label, true); }

Process build_phone_context(const AdversaryRole& r) {
  return parse_or_throw(expand("rep recv h^{$scif,$phone}<um> | rep send h^{$phone,$scif}(ue) | new un. []", role_vars(r)));
}

Process build_phone_fill(const AdversaryRole& r) {
  if (r.requester) {
    return parse_or_throw(expand(
        "send sigr^{$phone,sig}(un, @$peer). new nrms. "
        "{ send un^{$self,$peer}(nrms) | recv un^{$peer,$self}<nrmr>. send sigd^{$self,sig}(nrmr) }\n"
        "| send sigr^{$phone,sig}(a, @$u). new nrms. send a^{$self,$u}(nrms)",
        role_vars(r)));
  }
  return parse_or_throw(expand(
      "recv sigs^{sig,$self}<cn>. "
      "{ recv cn^{$peer,$self}<nrms>. send sigd^{$self,sig}(nrms) | new nrmr. send cn^{$self,$peer}(nrmr) }",
      role_vars(r)));
}

Process build_adversary(const AdversaryRole& r) {
  Process b = parse_or_throw(expand(
      "rep recv cs<vo>. new m. call IncEle(vo, @$self). { send cm(vo) | send h^{$scif,$phone}(m) }\n"
      "| rep recv h^{$phone,$scif}<sm>. recv cr<vs>. call IncEle(vs, @$self). send cm(vs)",
      role_vars(r)));
  Process phone = insert_into_hole(build_phone_context(r), build_phone_fill(r));
  return chain_parallel({build_alice(r.self), b, phone});
}

Process build_adversary(const Variable& self) {
  if (self.label == "h") return build_adversary(AdversaryRole{self, {"hs"}, {"hp"}, {"jd"}, {"u"}, false});
  return build_adversary(AdversaryRole{self, {"s"}, {"p"}, {"h"}, {"u"}, true});
}

Process build_journalist() { return parse_or_throw("rep recv a<z> | rep new x. send b(x)"); }

Process build_signal_backend() {
  return parse_or_throw("rep recv sigr^{i,sig}<cn, r>. send fu(cn, r) | rep recv fu<cn, r>. send sigs^{sig,r}(cn)");
}

Process build_signal_delete() {
  return parse_or_throw("recv sigd^{h,sig}<nrms>. call Delete(nrms) | recv sigd^{z,sig}<nrmr>. call Delete(nrmr)");
}

ScenarioBundle signalgate_scenario() {
  ScenarioFile f;
  f.name = "signalgate";
  f.expect = "both";
  f.actors.push_back(actor("SO", {"so"}, build_so()));
  f.actors.push_back(actor("Alice", {"alice"}, build_alice()));
  f.actors.push_back(actor("JD", {"jd", "s", "p"}, build_adversary(Variable{"jd"})));
  f.actors.push_back(actor("H", {"h", "hs", "hp"}, build_adversary(Variable{"h"})));
  f.actors.push_back(actor("U", {"u"}, build_journalist()));
  f.actors.push_back(actor("SignalBackend", {"sig"}, build_signal_backend()));
  f.actors.push_back(actor("SignalDelete", {"sd", "sig"}, build_signal_delete()));
  f.registry.authenticated = {Variable{"so"}, Variable{"alice"}, Variable{"jd"}, Variable{"h"}};
  f.registry.authorized = chans({"tr", "cm", "cc", "cs", "cr", "cuc"});
  f.registry.unauthorized = chans({"h", "un", "a", "b", "sigr", "sigs", "sigd", "fu"});
  f.exploration = ExplorationDecl{12, 3};
  return ScenarioBundle{f.name, settle_file(f), f.expect};
}

ScenarioBundle honest_scenario(int n) {
  if (n < 1) throw Error("an honest scenario needs at least one honest actor");
  ScenarioFile f;
  f.name = "honest" + std::to_string(n);
  f.expect = "accountable";
  f.actors.push_back(actor("SO", {"so"}, build_so()));
  f.registry.authenticated = {Variable{"so"}};
  for (int k = 1; k <= n; ++k) {
    std::string id = "i" + std::to_string(k);
    f.actors.push_back(actor("Alice" + std::to_string(k), {id}, build_alice(Variable{id})));
    f.registry.authenticated.push_back(Variable{id});
  }
  f.registry.authorized = chans({"tr", "cm", "cc", "cs", "cr", "cuc"});
  f.exploration = ExplorationDecl{10, 3};
  return ScenarioBundle{f.name, settle_file(f), f.expect};
}

std::vector<std::pair<std::string, ScenarioBundle>> bundled_scenarios() {
  return {{"signalgate.scif", signalgate_scenario()}, {"honest2.scif", honest_scenario(2)}};
}

ScenarioBundle bundle_by_name(const std::string& name) {
  if (name == "signalgate") return signalgate_scenario();
  if (name.rfind("honest", 0) == 0) {
    std::string digits = name.substr(6);
    if (digits.empty()) return honest_scenario(2);
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4)
      return honest_scenario(std::stoi(digits));
  }
  throw Error("no builtin scenario named '" + name + "'");
}

}  // namespace picsif
