#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "picsif/error.hpp"
#include "picsif/vclock.hpp"

using namespace picsif;

namespace {

VectorClockList V(std::vector<std::uint64_t> c) { return VectorClockList(std::move(c), Variable{"i"}); }

// Reference comparison written directly from the pointwise definitions.
CausalOrder reference_order(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a == b) return CausalOrder::equal;
  bool a_le_b = std::equal(a.begin(), a.end(), b.begin(), [](auto x, auto y) { return x <= y; });
  bool b_le_a = std::equal(b.begin(), b.end(), a.begin(), [](auto x, auto y) { return x <= y; });
  if (a_le_b) return CausalOrder::before;
  if (b_le_a) return CausalOrder::after;
  return CausalOrder::concurrent;
}

}  // namespace

TEST_CASE("initialisation") {
  CHECK(init_clock(3, Variable{"i"}, 0).counters() == std::vector<std::uint64_t>{0, 0, 0});
  CHECK(init_clock(1, Variable{"i"}, 0).counters() == std::vector<std::uint64_t>{0});
  auto big = init_clock(18, Variable{"i"}, 4);
  CHECK(big.size() == 18);
  CHECK(std::all_of(big.counters().begin(), big.counters().end(), [](auto c) { return c == 0; }));
  CHECK_THROWS_AS(init_clock(2, Variable{"i"}, 2), IndexOutOfRange);
  CHECK_THROWS_AS(init_clock(0, Variable{"i"}, 0), IndexOutOfRange);
}

TEST_CASE("IncEle") {
  CHECK(inc_ele(V({0, 0, 0}), 1).counters() == std::vector<std::uint64_t>{0, 1, 0});
  CHECK(inc_ele(V({5}), 0).counters() == std::vector<std::uint64_t>{6});
  CHECK(inc_ele(inc_ele(V({0, 0}), 0), 0).counters() == std::vector<std::uint64_t>{2, 0});
  auto v = V({1, 2});
  inc_ele(v, 0);
  CHECK(v.counters() == std::vector<std::uint64_t>{1, 2});
  CHECK_THROWS_AS(inc_ele(v, 2), IndexOutOfRange);
}

TEST_CASE("MaxVec") {
  CHECK(max_vec(V({0, 0}), V({0, 0})).counters() == std::vector<std::uint64_t>{0, 0});
  CHECK(max_vec(V({3, 1, 0}), V({2, 2, 0})).counters() == std::vector<std::uint64_t>{3, 2, 0});
  CHECK_THROWS_AS(max_vec(V({1}), V({1, 2})), LengthMismatch);
  auto into = VectorClockList({1, 1}, Variable{"jd"});
  CHECK(max_vec(V({0, 3}), into).owner() == Variable{"jd"});
}

TEST_CASE("happened-before") {
  CHECK(happened_before(V({1, 0}), V({1, 1})) == CausalOrder::before);
  CHECK(happened_before(V({1, 0}), V({0, 1})) == CausalOrder::concurrent);
  CHECK(happened_before(V({2, 1}), V({1, 1})) == CausalOrder::after);
  CHECK(happened_before(V({2, 1}), V({2, 1})) == CausalOrder::equal);
  CHECK_THROWS_AS(happened_before(V({1}), V({1, 1})), LengthMismatch);
}

TEST_CASE("random clocks agree with the reference order and stay monotone") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(0, 3), len(1, 6);
  for (int k = 0; k < 500; ++k) {
    std::size_t n = len(rng);
    std::vector<std::uint64_t> a(n), b(n);
    for (auto& x : a) x = c(rng);
    for (auto& x : b) x = c(rng);
    CHECK(happened_before(a, b) == reference_order(a, b));
    auto m = max_vec(V(a), V(b));
    CHECK(max_vec(V(a), V(a)) == V(a));
    CHECK(happened_before(V(a), m) != CausalOrder::after);
    CHECK(happened_before(V(b), m) != CausalOrder::after);
    std::size_t i = k % n;
    CHECK(happened_before(V(a), inc_ele(V(a), i)) == CausalOrder::before);
  }
}

TEST_CASE("clock text form") {
  CHECK(parse_clock("[3,2,0]") == std::vector<std::uint64_t>{3, 2, 0});
  CHECK(parse_clock(" [ 1 , 4 ] ") == std::vector<std::uint64_t>{1, 4});
  CHECK(parse_clock("[]").empty());
  CHECK(format_clock({3, 2, 0}) == "[3,2,0]");
  CHECK_THROWS_AS(parse_clock("3,2"), FormatError);
  CHECK_THROWS_AS(parse_clock("[3,,2]"), FormatError);
}
