#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "picsif/congruence.hpp"
#include "picsif/error.hpp"
#include "picsif/surface.hpp"
#include "../support/generators.hpp"

using namespace picsif;

namespace {

Process P(const char* text) {
  auto r = parse_process(text);
  REQUIRE_MESSAGE(r.ok(), (r.diagnostics.empty() ? "" : r.diagnostics[0].str()));
  return *r.process;
}

RewriteStep lr(int row, Path at = {}) { return RewriteStep{row, std::move(at), Direction::left_to_right, std::nullopt}; }

}  // namespace

TEST_CASE("single rows") {
  CHECK(pretty(apply_axiom(P("send a(m) | 0"), lr(7))) == "send a(m)");
  Name un = Name::fresh("un");
  Process expanded = apply_axiom(Process::inaction(), RewriteStep{9, {}, Direction::right_to_left, un});
  CHECK(pretty(expanded) == "new un. 0");
  CHECK(pretty(apply_axiom(P("send a(m) + 0"), lr(4))) == "send a(m)");
  CHECK(pretty(apply_axiom(P("send a(m) + send b(m)"), lr(3))) == "send b(m) + send a(m)");
  CHECK(pretty(apply_axiom(P("rep send a(m)"), lr(11))) == "send a(m) | rep send a(m)");
}

TEST_CASE("row errors") {
  CHECK_THROWS_AS(apply_axiom(P("send a(m)"), lr(7)), PatternMismatch);
  CHECK_THROWS_AS(apply_axiom(P("send a(m) | 0"), lr(7, {3})), IndexOutOfRange);
  CHECK_THROWS_AS(apply_axiom(P("new z. { send z(m) | send b(m) }"), lr(10)), SideConditionViolation);
  CHECK_NOTHROW(apply_axiom(P("new z. { send b(m) | send z(m) }"), lr(10)));
  try {
    apply_axiom(P("0"), lr(4, {}));
    FAIL("expected a mismatch");
  } catch (const PatternMismatch& e) {
    CHECK(e.axiom() == 4);
  }
}

TEST_CASE("holes") {
  Process ctx = make_hole(P("new un. 0"), {0});
  Process got = insert_into_hole(ctx, P("send sigr^{i,sig}(un, z)"));
  // The plugged un is captured by the restriction.
  CHECK(free_names(got).size() == 2);
  CHECK(pretty(got) == "new un. send sigr^{i,sig}(un, z)");
  CHECK(pretty(insert_into_hole(Process::hole(), Process::inaction())) == "0");
  CHECK(pretty(insert_into_hole(P("send a(m) | []"), P("send b(m)"))) == "send a(m) | send b(m)");
  CHECK_THROWS_AS(insert_into_hole(P("send a(m)"), P("0")), HoleError);
  CHECK_THROWS_AS(insert_into_hole(P("[] | []"), P("0")), HoleError);
  CHECK_THROWS_AS(make_hole(P("send a(m)"), {}), HoleError);
}

TEST_CASE("normal forms") {
  CHECK(pretty(normalize(P("0 | send a(m) | 0"))) == "send a(m)");
  CHECK(pretty(normalize(P("match [x = x]. send a(m)"))) == "send a(m)");
  CHECK(congruent(P("send a(m) | 0"), P("send a(m)")));
  CHECK(congruent(P("send a(m) + recv b<x>"), P("recv b<x> + send a(m)")));
  CHECK_FALSE(congruent(P("send c(m)"), P("recv c<m>")));
  CHECK(congruent(P("new z. { send b(m) | send z(m) }"), P("send b(m) | new z. send z(m)")));
  CHECK(congruent(P("new z. new w. send z(w)"), P("new w. new z. send z(w)")));
  CHECK_FALSE(congruent(P("rep send a(m)"), P("rep send a(m) | rep send a(m)")));
  CHECK(congruent(P("rep { send a(m) | send b(m) }"), P("send b(m) | send a(m) | rep { send a(m) | send b(m) }")));
}

TEST_CASE("tunnel expansion is congruent to the plain tunnel") {
  Process plain = P("rep recv h^{s,p}<um> | rep send h^{p,s}(ue)");
  HoleProof proof = signalgate_authz_proof();
  CHECK(congruent(proof.expansion.end, plain));
  CHECK(alpha_equivalent(proof.replay(), proof.result));
  REQUIRE(proof.expansion.steps.size() == 2);
  CHECK(proof.expansion.steps[0].axiom == 7);
  CHECK(proof.expansion.steps[1].axiom == 9);
  CHECK(pretty(proof.result) ==
        "{ rep recv h^{s,p}<um> | rep send h^{p,s}(ue) } | new un. send sigr^{i,sig}(un, z)");
}

TEST_CASE("every row on random instances") {
  testing::TermGen g(2024);
  for (int row = 1; row <= 11; ++row) {
    CAPTURE(row);
    for (int k = 0; k < 200; ++k) {
      auto [lhs, rhs] = testing::axiom_instance(g, row);
      REQUIRE_MESSAGE(congruent(lhs, rhs), pretty(lhs) << "  ~  " << pretty(rhs));
      auto proof = congruence_proof(lhs, rhs);
      REQUIRE(proof);
      CHECK(alpha_equivalent(proof->replay(), rhs));
    }
  }
}

TEST_CASE("normalize is idempotent and its proof replays") {
  testing::TermGen g(99);
  for (int k = 0; k < 1000; ++k) {
    Process p = g.process(6);
    CongruenceProof proof = normalize_with_proof(p);
    CHECK(alpha_equivalent(proof.start, p));
    REQUIRE_MESSAGE(alpha_equivalent(proof.replay(), proof.end), pretty(p));
    Process twice = normalize(proof.end);
    REQUIRE_MESSAGE(alpha_equivalent(twice, proof.end), pretty(p) << "\n  nf " << pretty(proof.end) << "\n  nf2 " << pretty(twice));
  }
}

TEST_CASE("congruence is an equivalence on a population") {
  testing::TermGen g(31);
  std::vector<Process> pop;
  for (int k = 0; k < 40; ++k) {
    Process p = g.process(3);
    pop.push_back(p);
    pop.push_back(apply_axiom(Process::parallel(p, Process::inaction()), lr(7)));
    pop.push_back(Process::parallel(Process::inaction(), p));
  }
  for (const auto& a : pop) CHECK(congruent(a, a));
  for (std::size_t i = 0; i < pop.size(); ++i)
    for (std::size_t j = 0; j < pop.size(); ++j) {
      bool ij = congruent(pop[i], pop[j]);
      CHECK(ij == congruent(pop[j], pop[i]));
      if (!ij) continue;
      for (std::size_t k = 0; k < pop.size(); k += 7)
        if (congruent(pop[j], pop[k])) CHECK(congruent(pop[i], pop[k]));
    }
}

TEST_CASE("step text form") {
  RewriteStep s{9, {1, 0}, Direction::right_to_left, Name("un")};
  CHECK(s.str() == "step 9 at 1.0 rl un");
  RewriteStep back = parse_step(s.str());
  CHECK(back.axiom == 9);
  CHECK(back.path == Path{1, 0});
  CHECK(back.direction == Direction::right_to_left);
  CHECK(parse_step("step 7 at root lr").path.empty());
  CHECK_THROWS_AS(parse_step("step 12 at root lr"), FormatError);
  CHECK_THROWS_AS(parse_step("stop 1 at root lr"), FormatError);
}
