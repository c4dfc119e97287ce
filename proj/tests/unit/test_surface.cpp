#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "picsif/surface.hpp"
#include "../support/generators.hpp"

using namespace picsif;

namespace {

const char* kJournalist = R"(
scenario journalist;
expect accountable;
actor U as u {
  rep recv a<z>
  | rep new x. send b(x)
}
authorize {
  authenticated: so;
  channels: ;
  unauthorized: a, b;
}
)";

std::string first_message(const ScenarioParse& r) {
  return r.diagnostics.empty() ? std::string() : r.diagnostics.front().message;
}

}  // namespace

TEST_CASE("journalist scenario parses") {
  auto r = parse_scenario(kJournalist, "u.scif");
  REQUIRE(r.ok());
  const auto& u = r.scenario->actors.at(0);
  CHECK(u.name == "U");
  CHECK(u.identities.at(0).label == "u");
  std::set<std::string> fn;
  for (const auto& n : free_names(u.process)) fn.insert(n.label());
  CHECK(fn == std::set<std::string>{"a", "b"});
  CHECK(u.process.left().body().is(Process::Kind::receive));
  CHECK(u.process.right().body().body().is(Process::Kind::send));
  CHECK(u.process.line() == 0);  // compositions carry no position of their own
  CHECK(u.process.left().line() == 5);
}

TEST_CASE("errors are named and positioned") {
  CHECK(first_message(parse_scenario("")) == "empty scenario");
  CHECK(first_message(parse_scenario("  # only a comment\n")) == "empty scenario");

  auto dup = parse_scenario(
      "actor A as a { send c(m) } actor A as b { 0 } authorize { authenticated: a; channels: c; unauthorized: ; }");
  CHECK(first_message(dup) == "duplicate actor 'A'");

  auto fn = parse_scenario("actor A as a { call Frob(x, y) }", "f.scif");
  REQUIRE_FALSE(fn.ok());
  CHECK(first_message(fn) == "unknown function symbol 'Frob'");
  CHECK(fn.diagnostics[0].str().rfind("f.scif:1:21: unknown function symbol", 0) == 0);

  auto undeclared = parse_scenario("actor A as a { send c(m) } authorize { authenticated: a; channels: ; unauthorized: ; }");
  CHECK(first_message(undeclared) == "channel 'c' is neither authorized nor marked unauthorized");

  auto syntax = parse_scenario("actor A as a {\n  send c(m) .\n}", "s.scif");
  REQUIRE_FALSE(syntax.ok());
  CHECK(syntax.diagnostics[0].span.line == 3);
  CHECK(syntax.diagnostics[0].span.column == 1);
  CHECK_FALSE(syntax.diagnostics[0].expected.empty());
}

TEST_CASE("printer") {
  CHECK(pretty(Process::inaction()) == "0");
  auto p = parse_process("send a(m) | 0");
  REQUIRE(p.ok());
  CHECK(pretty(*p.process) == "send a(m) | 0");
  auto sb = parse_process("rep recv sigr^{i,sig}<cn, r>. send fu(cn, r) | rep recv fu<cn, r>. send sigs^{sig,r}(cn)");
  REQUIRE(sb.ok());
  CHECK(pretty(*sb.process) ==
        "rep recv sigr^{i,sig}<cn, r>. send fu(cn, r) | rep recv fu<cn, r>. send sigs^{sig,r}(cn)");
  auto nested = parse_process("new x. { send a(x) | new x. send b(x) }");
  REQUIRE(nested.ok());
  CHECK(pretty(*nested.process) == "new x. { send a(x) | new x. send b(x) }");
}

TEST_CASE("printer renames binders that would capture") {
  Name outer = Name::fresh("z");
  Name inner = Name::fresh("z");
  ChannelId c{Name("c"), std::nullopt};
  Process p = Process::restrict(outer, Process::restrict(inner, Process::send(c, {outer, inner})));
  std::string text = pretty(p);
  CHECK(text == "new z. new z_2. send c(z, z_2)");
  CHECK(alpha_equivalent(*parse_process(text).process, p));
  Process free_clash = Process::restrict(inner, Process::send(c, {Name("z"), inner}));
  CHECK(pretty(free_clash) == "new z_2. send c(z, z_2)");
}

TEST_CASE("round trip on random terms") {
  testing::TermGen g(5);
  for (int k = 0; k < 1000; ++k) {
    Process p = g.process(6);
    auto back = parse_process(pretty(p));
    REQUIRE_MESSAGE(back.ok(), pretty(p));
    CHECK_MESSAGE(alpha_equivalent(*back.process, p), pretty(p));
  }
}

TEST_CASE("scenario round trip") {
  auto r = parse_scenario(kJournalist);
  REQUIRE(r.ok());
  std::string text = pretty(*r.scenario);
  auto again = parse_scenario(text);
  REQUIRE(again.ok());
  CHECK(scenarios_equivalent(*r.scenario, *again.scenario));
  CHECK(pretty(*again.scenario) == text);
}

TEST_CASE("parser is total on mangled input") {
  std::string base = kJournalist;
  std::mt19937_64 rng(9);
  const std::string alphabet = "{}()<>[],;.|+=@^:-# \nabz0";
  for (int k = 0; k < 2000; ++k) {
    std::string s = base;
    for (int e = 0; e < 3; ++e) {
      std::size_t at = rng() % s.size();
      switch (rng() % 3) {
        case 0: s.erase(at, 1); break;
        case 1: s.insert(s.begin() + static_cast<long>(at), alphabet[rng() % alphabet.size()]); break;
        default: s[at] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    ScenarioParse r;
    CHECK_NOTHROW(r = parse_scenario(s));
    CHECK((r.ok() || !r.diagnostics.empty()));
    for (const auto& d : r.diagnostics) CHECK(d.span.line >= 1);
  }
}
