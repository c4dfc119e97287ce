#pragma once

// Seeded random process terms and matching instances of each congruence row.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "picsif/congruence.hpp"
#include "picsif/term.hpp"

namespace picsif::testing {

class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  Name any_name(const std::vector<Name>& scope) {
    static const char* globals[] = {"a", "b", "c", "d"};
    if (!scope.empty() && chance(0.6)) return scope[pick(scope.size())];
    return Name(globals[pick(4)]);
  }

  Term payload_term(const std::vector<Name>& scope) {
    if (chance(0.15)) return Variable{chance(0.5) ? "i" : "j"};
    return any_name(scope);
  }

  ChannelId channel(const std::vector<Name>& scope) {
    ChannelId c{any_name(scope), std::nullopt};
    if (chance(0.25)) c.endpoints = std::make_pair(Term{Variable{"i"}}, Term{Variable{"j"}});
    return c;
  }

  /// A term of depth at most `depth` whose free names come from `scope` and
  /// the global pool.
  Process process(int depth, std::vector<Name> scope = {}) {
    if (depth <= 1) return Process::inaction();
    if (depth == 2) return leaf(scope);
    switch (pick(10)) {
      case 0:
        return Process::inaction();
      case 1: {
        std::vector<Term> ts;
        for (std::size_t k = pick(3); k > 0; --k) ts.push_back(payload_term(scope));
        return Process::send(channel(scope), ts, process(depth - 1, scope));
      }
      case 2: {
        std::vector<Name> slots;
        for (std::size_t k = 1 + pick(2); k > 0; --k) slots.push_back(Name::fresh(k == 1 ? "x" : "y"));
        ChannelId c = channel(scope);
        auto inner = scope;
        inner.insert(inner.end(), slots.begin(), slots.end());
        return Process::receive(c, slots, process(depth - 1, inner));
      }
      case 3:
      case 4: {
        Name z = Name::fresh(chance(0.5) ? "z" : "w");
        auto inner = scope;
        inner.push_back(z);
        return Process::restrict(z, process(depth - 1, inner));
      }
      case 5:
      case 6:
        return Process::parallel(process(depth - 1, scope), process(depth - 1, scope));
      case 7:
        return Process::choice(process(depth - 1, scope), process(depth - 1, scope));
      case 8:
        return Process::replicate(process(depth - 1, scope));
      default: {
        Term l = any_name(scope);
        Term r = chance(0.5) ? l : Term{any_name(scope)};
        return Process::match(l, r, process(depth - 1, scope));
      }
    }
  }

  Process leaf(const std::vector<Name>& scope) {
    if (chance(0.3)) return Process::inaction();
    std::vector<Term> ts{payload_term(scope)};
    return Process::send(channel(scope), ts);
  }

 private:
  std::mt19937_64 rng_;
};

/// lhs and rhs of one instance of `row`, built from random parts and checked
/// by construction; rhs is obtained from lhs by the left-to-right rewrite.
inline std::pair<Process, Process> axiom_instance(TermGen& g, int row, int depth = 4) {
  auto P = [&](std::vector<Name> scope = {}) { return g.process(depth, std::move(scope)); };
  Process lhs;
  switch (row) {
    case 1: {
      Term x = g.any_name({});
      lhs = Process::match(x, x, P());
      break;
    }
    case 2: lhs = Process::choice(P(), Process::choice(P(), P())); break;
    case 3: lhs = Process::choice(P(), P()); break;
    case 4: lhs = Process::choice(P(), Process::inaction()); break;
    case 5: lhs = Process::parallel(P(), Process::parallel(P(), P())); break;
    case 6: lhs = Process::parallel(P(), P()); break;
    case 7: lhs = Process::parallel(P(), Process::inaction()); break;
    case 8: {
      Name z = Name::fresh("z"), w = Name::fresh("w");
      lhs = Process::restrict(z, Process::restrict(w, P({z, w})));
      break;
    }
    case 9: lhs = Process::restrict(Name::fresh("z"), Process::inaction()); break;
    case 10: {
      Name z = Name::fresh("z");
      lhs = Process::restrict(z, Process::parallel(P(), P({z})));
      break;
    }
    default: lhs = Process::replicate(P()); break;
  }
  Process rhs = apply_axiom(lhs, RewriteStep{row, {}, Direction::left_to_right, std::nullopt});
  return {lhs, rhs};
}

}  // namespace picsif::testing
