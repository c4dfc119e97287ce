#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "picsif/error.hpp"
#include "picsif/surface.hpp"
#include "picsif/term.hpp"
#include "../support/generators.hpp"

using namespace picsif;

namespace {

Process P(const char* text) {
  auto r = parse_process(text);
  REQUIRE_MESSAGE(r.ok(), (r.diagnostics.empty() ? "" : r.diagnostics[0].str()));
  return *r.process;
}

std::set<std::string> labels(const std::set<Name>& ns) {
  std::set<std::string> out;
  for (const auto& n : ns) out.insert(n.label());
  return out;
}

}  // namespace

TEST_CASE("substitution replaces free occurrences only") {
  Name z("z"), m("m");
  Process s = Process::send(ChannelId{Name("c"), std::nullopt}, {z});
  CHECK(pretty(substitute(s, z, m)) == "send c(m)");

  Name bz = Name::fresh("z");
  Process bound = Process::restrict(bz, Process::send(ChannelId{Name("c"), std::nullopt}, {bz}));
  CHECK(canonical_key(substitute(bound, z, m)) == canonical_key(bound));
}

TEST_CASE("substitution under a receive that rebinds the name") {
  // The slot is a different name from the free z, so only the outer z moves.
  Process p = P("send c(z) | recv d<z>. send e(z)");
  Process got = substitute(p, Name("z"), Name("m"));
  CHECK(pretty(got) == "send c(m) | recv d<z>. send e(z)");
}

TEST_CASE("substitution renames binders that would capture") {
  Process p = P("new m. send c(m, z)");
  Process got = substitute(p, Name("z"), Name("m"));
  // The free m must stay distinct from the restricted one.
  CHECK(occurs_free(Name("m"), got));
  CHECK_FALSE(alpha_equivalent(got, P("new m. send c(m, m)")));
  CHECK(alpha_equivalent(got, P("new q. send c(q, m)")));
}

TEST_CASE("channel positions reject non-names") {
  Process p = P("send z(a)");
  CHECK_THROWS_AS(substitute(p, Name("z"), Variable{"i"}), SortError);
}

TEST_CASE("free names") {
  CHECK(free_names(Process::inaction()).empty());
  CHECK(labels(free_names(P("new z. send z(m)"))) == std::set<std::string>{"m"});
  CHECK(labels(free_names(P("rep recv a<z> | rep new x. send b(x)"))) == std::set<std::string>{"a", "b"});
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_equivalent(P("new z. send z(m)"), P("new w. send w(m)")));
  CHECK_FALSE(alpha_equivalent(P("new z. send z(m)"), P("new w. send w(n)")));
  const char* alice =
      "new vc. send cm(vc). rep { recv cc<v>. call IncEle(v, @alice). send cm(v) "
      "+ recv cs<w>. call IncEle(w, @alice). new sm. send tr^{alice,mu}(sm, w). send cm(w) }";
  const char* renamed =
      "new q1. send cm(q1). rep { recv cc<q2>. call IncEle(q2, @alice). send cm(q2) "
      "+ recv cs<q3>. call IncEle(q3, @alice). new q4. send tr^{alice,mu}(q4, q3). send cm(q3) }";
  CHECK(alpha_equivalent(P(alice), P(renamed)));
}

TEST_CASE("substitution properties on random terms") {
  testing::TermGen g(7);
  for (int k = 0; k < 300; ++k) {
    Process p = g.process(6);
    Name x("a"), m("fresh_m");
    auto fn = free_names(p);
    Process q = substitute(p, x, m);
    if (!fn.count(x)) CHECK(canonical_key(q) == canonical_key(p));
    for (const auto& n : free_names(q)) {
      bool ok = (n != x && fn.count(n)) || n == m;
      CHECK(ok);
    }
  }
}

TEST_CASE("alpha equivalence is an equivalence on random terms") {
  testing::TermGen g(11);
  for (int k = 0; k < 300; ++k) {
    Process p = g.process(6);
    Process q = freshen_binders(p);
    Process r = freshen_binders(q);
    CHECK(alpha_equivalent(p, p));
    CHECK(alpha_equivalent(p, q) == alpha_equivalent(q, p));
    CHECK(alpha_equivalent(p, q));
    CHECK(alpha_equivalent(p, r));
    CHECK(term_depth(p) <= 6);
  }
}
