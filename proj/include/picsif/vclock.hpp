#pragma once

// The List equational theory: vector-clock initialisation, IncEle, MaxVec and
// the happened-before order read off two clocks.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "picsif/term.hpp"

namespace picsif {

class VectorClockList {
 public:
  VectorClockList() = default;
  VectorClockList(std::vector<std::uint64_t> counters, Variable owner);

  const std::vector<std::uint64_t>& counters() const { return counters_; }
  const Variable& owner() const { return owner_; }
  std::size_t size() const { return counters_.size(); }
  std::uint64_t operator[](std::size_t i) const { return counters_.at(i); }

  ClockLiteral literal() const { return ClockLiteral{counters_}; }
  std::string str() const;

  friend bool operator==(const VectorClockList& a, const VectorClockList& b) {
    return a.counters_ == b.counters_;
  }

 private:
  std::vector<std::uint64_t> counters_;
  Variable owner_;
};

std::ostream& operator<<(std::ostream& os, const VectorClockList& v);

enum class CausalOrder { before, after, concurrent, equal };

const char* to_string(CausalOrder o);

/// All-zero clock of `identity_count` entries owned by the identity at
/// `owner_index`. Throws IndexOutOfRange when the owner does not fit.
VectorClockList init_clock(std::size_t identity_count, Variable owner, std::size_t owner_index);

/// Copy of `v` with entry `i` incremented by one.
VectorClockList inc_ele(const VectorClockList& v, std::size_t i);

/// Element-wise maximum; the result keeps the owner of `into`. Both lists
/// must have the same length.
VectorClockList max_vec(const VectorClockList& from, const VectorClockList& into);

CausalOrder happened_before(const VectorClockList& a, const VectorClockList& b);
CausalOrder happened_before(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

/// Parses the bracketed form `[3,2,0]`.
std::vector<std::uint64_t> parse_clock(const std::string& text);
std::string format_clock(const std::vector<std::uint64_t>& counters);

}  // namespace picsif
