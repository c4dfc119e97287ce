#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "picsif/congruence.hpp"
#include "picsif/scenarios.hpp"
#include "picsif/semantics.hpp"
#include "picsif/surface.hpp"

using namespace picsif;

namespace {

void flatten_par(const Process& p, std::vector<Process>& out) {
  if (p.is(Process::Kind::parallel)) {
    flatten_par(p.left(), out);
    flatten_par(p.right(), out);
  } else {
    out.push_back(p);
  }
}

// Top-level components, looking through outer restrictions.
std::vector<Process> components(Process p) {
  while (p.is(Process::Kind::restriction)) p = p.body();
  std::vector<Process> out;
  flatten_par(p, out);
  return out;
}

template <class F>
void walk(const Process& p, F&& f) {
  f(p);
  for (std::size_t i = 0; i < p.child_count(); ++i) walk(p.child(i), f);
}

std::size_t count_calls(const Process& p, FunctionSymbol s) {
  std::size_t n = 0;
  walk(p, [&](const Process& q) { n += q.is(Process::Kind::call) && q.symbol() == s; });
  return n;
}

std::set<std::string> channel_bases(const Process& p) {
  std::set<std::string> out;
  walk(p, [&](const Process& q) {
    if (q.is(Process::Kind::send) || q.is(Process::Kind::receive)) out.insert(q.channel().base.label());
  });
  return out;
}

void add_term(const Term& t, std::set<std::string>& out) {
  if (auto n = as_name(t)) out.insert(n->label());
  if (auto v = as_variable(t)) out.insert(v->label);
}

void add_channel(const ChannelId& c, std::set<std::string>& out) {
  out.insert(c.base.label());
  if (c.endpoints) {
    add_term(c.endpoints->first, out);
    add_term(c.endpoints->second, out);
  }
}

// Every label a term mentions: channels, endpoints, payloads, binders.
std::set<std::string> symbols(const Process& p) {
  std::set<std::string> out;
  walk(p, [&](const Process& q) {
    switch (q.kind()) {
      case Process::Kind::send:
        add_channel(q.channel(), out);
        for (const auto& t : q.terms()) add_term(t, out);
        break;
      case Process::Kind::receive:
        add_channel(q.channel(), out);
        for (const auto& s : q.slots()) out.insert(s.label());
        break;
      case Process::Kind::restriction:
        out.insert(q.bound().label());
        break;
      case Process::Kind::call:
      case Process::Kind::match:
        for (const auto& t : q.terms()) add_term(t, out);
        break;
      default:
        break;
    }
  });
  return out;
}

const ActorDecl& actor(const ScenarioFile& f, const std::string& name) {
  auto it = std::find_if(f.actors.begin(), f.actors.end(), [&](const ActorDecl& a) { return a.name == name; });
  REQUIRE(it != f.actors.end());
  return *it;
}

}  // namespace

TEST_CASE("the operator") {
  auto so = build_so();
  CHECK(components(normalize(so)).size() == 5);
  CHECK(components(so).size() == 5);
  auto fn = free_names(so);
  for (const char* c : {"cm", "cc", "cs", "cr"})
    CHECK(std::any_of(fn.begin(), fn.end(), [&](const Name& n) { return n.label() == c; }));
  CHECK(channel_bases(so).count("cuc") == 0);
  auto comps = components(so);
  std::size_t replicated = std::count_if(comps.begin(), comps.end(),
                                         [](const Process& c) { return c.is(Process::Kind::replication); });
  CHECK(replicated == 4);
}

TEST_CASE("the honest actor") {
  auto alice = build_alice();
  CHECK(components(alice).size() == components(build_so()).size() + 1);
  CHECK(congruent(alice, alice));
  CHECK(channel_bases(alice).count("cuc") == 1);
  // The send process carries the message and the clock together.
  bool polyadic = false;
  walk(alice, [&](const Process& q) {
    if (q.is(Process::Kind::send) && q.channel().base.label() == "tr" && q.terms().size() == 2) polyadic = true;
  });
  CHECK(polyadic);
}

TEST_CASE("the adversary") {
  auto jd = build_adversary(Variable{"jd"});
  auto alice = build_alice(Variable{"jd"});
  // Built as one flat chain: the honest actor's six components, the two
  // tunnel ends, then the phone's three components.
  auto comps = components(jd);
  auto a_size = components(alice).size();
  REQUIRE(comps.size() == a_size + 5);
  Process b = comps.back();
  for (std::size_t i = comps.size() - 1; i-- > a_size;) b = Process::parallel(comps[i], b);
  CHECK(congruent(jd, Process::parallel(alice, b)));

  auto bases = channel_bases(b);
  CHECK(bases.count("h") == 1);
  CHECK(bases.count("cuc") == 0);
  bool to_so = false, s_to_p = false, p_to_s = false;
  walk(b, [&](const Process& q) {
    if (!q.is(Process::Kind::send) && !q.is(Process::Kind::receive)) return;
    const auto& c = q.channel();
    if (c.base.label() == "tr") to_so = true;
    if (c.base.label() == "h" && c.endpoints) {
      auto from = as_variable(c.endpoints->first), to = as_variable(c.endpoints->second);
      if (from && to && from->label == "s" && to->label == "p") s_to_p = true;
      if (from && to && from->label == "p" && to->label == "s") p_to_s = true;
    }
  });
  CHECK_FALSE(to_so);
  CHECK(s_to_p);
  CHECK(p_to_s);
  CHECK_FALSE(alpha_equivalent(normalize(jd), normalize(build_alice())));
}

TEST_CASE("journalist and Signal") {
  auto u = components(build_journalist());
  CHECK(u.size() == 2);
  CHECK(std::all_of(u.begin(), u.end(), [](const Process& c) { return c.is(Process::Kind::replication); }));
  CHECK(count_calls(build_signal_delete(), FunctionSymbol::Delete) == 2);
  for (const auto& p : {build_journalist(), build_signal_backend(), build_signal_delete()}) {
    CHECK(count_calls(p, FunctionSymbol::IncEle) == 0);
    CHECK(count_calls(p, FunctionSymbol::MaxVec) == 0);
    CHECK(channel_bases(p).count("cm") == 0);
  }
}

TEST_CASE("the bundles") {
  auto sg = signalgate_scenario();
  CHECK(sg.expected == "both");
  std::vector<std::string> names;
  for (const auto& a : sg.file.actors) names.push_back(a.name);
  CHECK(names.size() == 7);
  for (const char* n : {"SO", "Alice", "JD", "H", "U"}) CHECK(std::count(names.begin(), names.end(), n) == 1);

  auto h2 = honest_scenario(2);
  CHECK(h2.expected == "accountable");
  CHECK(h2.file.actors.size() == 3);

  auto reg = sg.state().scenario().registry;
  CHECK_FALSE(reg.is_authenticated(Variable{"u"}));
  CHECK(reg.is_authenticated(Variable{"jd"}));
  CHECK(reg.is_authenticated(Variable{"h"}));
  CHECK_FALSE(reg.is_authorized(ChannelId{Name("un", NameKind::channel), std::nullopt}));
  CHECK_FALSE(reg.is_authorized(ChannelId{Name("h", NameKind::channel), std::pair<Term, Term>{Variable{"s"}, Variable{"p"}}}));
  CHECK_FALSE(reg.is_authorized(ChannelId{Name("a", NameKind::channel), std::pair<Term, Term>{Variable{"jd"}, Variable{"u"}}}));
  CHECK_FALSE(reg.is_authorized(ChannelId{Name::minted("un", NameKind::channel, 0), std::nullopt}));
  CHECK(reg.is_authorized(ChannelId{Name("tr", NameKind::channel), std::nullopt}));

  std::set<std::string> bundle_names;
  for (const auto& [file, b] : bundled_scenarios()) CHECK(bundle_names.insert(b.name).second);
}

TEST_CASE("the bundled actors are the builders") {
  auto sg = signalgate_scenario();
  CHECK(alpha_equivalent(actor(sg.file, "SO").process, build_so()));
  CHECK(alpha_equivalent(actor(sg.file, "U").process, build_journalist()));
  auto back = parse_scenario(pretty(sg.file));
  REQUIRE(back.ok());
  CHECK(scenarios_equivalent(*back.scenario, sg.file));
}

TEST_CASE("every symbol of the model appears somewhere") {
  auto sg = signalgate_scenario();
  std::set<std::string> seen;
  for (const auto& a : sg.file.actors) {
    auto s = symbols(a.process);
    seen.insert(s.begin(), s.end());
    for (const auto& id : a.identities) seen.insert(id.label);
  }
  for (const auto& v : sg.file.registry.authenticated) seen.insert(v.label);
  for (const auto& c : sg.file.registry.authorized) add_channel(c, seen);
  for (const auto& c : sg.file.registry.unauthorized) add_channel(c, seen);

  CHECK(std::any_of(seen.begin(), seen.end(), [](const std::string& s) { return s.rfind("vc", 0) == 0; }));
  for (const char* sym : {"cm",   "cc",   "cs", "cr",  "cuc", "tr",  "sm",   "m",  "um", "ue", "h",
                          "un",   "nrms", "nrmr", "a", "b",   "z",   "x",    "sigr", "sigs", "fu", "cn",
                          "r",    "i",    "mu", "s",   "p",   "sig", "u",    "jd"})
    CHECK_MESSAGE(seen.count(sym) == 1, sym);
}
