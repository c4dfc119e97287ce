#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "picsif/auditor.hpp"
#include "picsif/error.hpp"
#include "picsif/scenarios.hpp"
#include "picsif/vclock.hpp"

using namespace picsif;

namespace {

Registry small_registry() {
  Registry r;
  r.authenticated = {Variable{"so"}, Variable{"a"}, Variable{"b"}};
  r.authorized = {ChannelId{Name("tr", NameKind::channel), std::nullopt}};
  return r;
}

EventRecord ev(std::uint64_t seq, const std::string& actor, EventKind kind, const std::string& chan,
               std::vector<std::uint64_t> clock, bool recorded) {
  EventRecord e;
  e.seq = seq;
  e.actor = Variable{actor};
  e.kind = kind;
  e.channel = ChannelId{Name(chan, NameKind::channel), std::nullopt};
  if (!clock.empty()) {
    e.clock = clock;
    e.timed = true;
  }
  e.recorded = recorded;
  return e;
}

const std::vector<std::string> kLeak = {"comm jd sigr", "comm sig fu", "comm sig sigs", "comm jd un",
                                        "comm h un",    "comm h sigd", "comm jd sigd"};

}  // namespace

TEST_CASE("auth-n: one side authenticated") {
  auto reg = small_registry();
  auto r = ev(2, "b", EventKind::receive, "tr", {0, 1}, true);
  r.peer = Variable{"a"};
  CHECK(check_auth_n({r}, reg).empty());
  r.peer = Variable{"x"};
  auto v = check_auth_n({r}, reg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::unauth_n);
  CHECK(v[0].event->seq == 2);
  // Neither side authenticated is outside the SCIF altogether.
  r.actor = Variable{"y"};
  CHECK(check_auth_n({r}, reg).empty());
}

TEST_CASE("auth-z: unauthorized channels and minted ones") {
  auto reg = small_registry();
  auto r = ev(3, "b", EventKind::receive, "tr", {0, 1}, true);
  r.peer = Variable{"a"};
  CHECK(check_auth_z({r}, reg).empty());
  r.channel = ChannelId{Name("side", NameKind::channel), std::nullopt};
  CHECK(check_auth_z({r}, reg).size() == 1);

  auto mint = ev(4, "a", EventKind::channel_created, "un", {}, false);
  mint.minted_channel = true;
  auto v = check_auth_z({mint}, reg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::unauth_z);
  mint.actor = Variable{"x"};
  CHECK(check_auth_z({mint}, reg).empty());
}

TEST_CASE("completeness flags unrecorded SCIF traffic") {
  auto reg = small_registry();
  auto s = ev(1, "a", EventKind::send, "tr", {1, 0}, true);
  auto r = ev(2, "b", EventKind::receive, "tr", {1, 1}, false);
  auto outside = ev(3, "x", EventKind::send, "tr", {}, false);
  auto v = check_completeness({s, r, outside}, reg);
  REQUIRE(v.size() == 1);
  CHECK(v[0].event->seq == 2);
}

TEST_CASE("reconstruction from clocks") {
  auto reg = small_registry();
  auto a1 = ev(1, "a", EventKind::send, "tr", {1, 0}, true);
  auto b1 = ev(2, "b", EventKind::receive, "tr", {1, 1}, true);
  b1.link = 1;
  std::vector<EventRecord> full{a1, b1};

  auto ok = check_reconstructable(full, full, reg);
  CHECK(ok.reconstructable);
  auto orders = consistent_orders(full, full, reg);
  REQUIRE(orders.size() == 1);
  CHECK(orders[0] == std::vector<std::uint64_t>{1, 2});

  // With the send missing from the log nothing pins the pair down.
  auto bad = check_reconstructable({b1}, full, reg);
  CHECK_FALSE(bad.reconstructable);
  CHECK(bad.first != bad.second);
  CHECK(consistent_orders({b1}, full, reg).size() == 2);
}

TEST_CASE("the enumeration cap is enforced") {
  auto t = run(signalgate_scenario().state(3), Policy::script(kLeak), kLeak.size());
  const auto& reg = t.final.scenario().registry;
  CHECK_THROWS_AS(consistent_orders(t.final.so_log(), t.final.full_trace(), reg, 2), EnumerationCapExceeded);
  CHECK_THROWS_AS(check_reconstructable(t.final.so_log(), t.final.full_trace(), reg, 2), EnumerationCapExceeded);
}

TEST_CASE("the leak run breaks every property") {
  auto t = run(signalgate_scenario().state(3), Policy::script(kLeak), kLeak.size());
  auto v = audit(t.final);
  CHECK(v.has(ViolationKind::unauth_n));
  CHECK(v.has(ViolationKind::unauth_z));
  CHECK(v.has(ViolationKind::unrecorded_event));
  CHECK(v.has(ViolationKind::non_reconstructable));
  CHECK(v.summary() == "both");
  CHECK(v.kv().find("verdict=both") != std::string::npos);

  // Nothing was logged, so every ordering of the SCIF events fits.
  auto orders = consistent_orders(t.final.so_log(), t.final.full_trace(), t.final.scenario().registry);
  std::set<std::vector<std::uint64_t>> unique(orders.begin(), orders.end());
  CHECK(t.final.so_log().empty());
  CHECK(unique.size() == orders.size());
  CHECK(orders.size() == 40320);
}

TEST_CASE("consistent orders respect every logged clock pair") {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto t = run(honest_scenario(2).state(3), Policy::random(seed), 8);
    const auto& log = t.final.so_log();
    auto orders = consistent_orders(log, t.final.full_trace(), t.final.scenario().registry);
    REQUIRE_FALSE(orders.empty());
    for (const auto& order : orders) {
      auto pos = [&](std::uint64_t seq) { return std::find(order.begin(), order.end(), seq) - order.begin(); };
      for (const auto& x : log)
        for (const auto& y : log) {
          if (!x.clock || !y.clock || happened_before(*x.clock, *y.clock) != CausalOrder::before) continue;
          CHECK(pos(x.seq) < pos(y.seq));
          ++compared;
        }
    }
  }
  CHECK(compared > 0);
}

TEST_CASE("honest runs are accountable") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto t = run(honest_scenario(2).state(3), Policy::random(seed), 12);
    auto v = audit(t.final);
    CHECK_MESSAGE(v.accountable(), "seed " << seed << "\n" << v.report());
    CHECK(v.summary() == "accountable");
  }
}
