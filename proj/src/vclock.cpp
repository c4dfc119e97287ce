#include "picsif/vclock.hpp"

#include <algorithm>
#include <cctype>

#include "picsif/error.hpp"

namespace picsif {

VectorClockList::VectorClockList(std::vector<std::uint64_t> counters, Variable owner)
    : counters_(std::move(counters)), owner_(std::move(owner)) {}

std::string VectorClockList::str() const { return format_clock(counters_); }

std::ostream& operator<<(std::ostream& os, const VectorClockList& v) { return os << v.str(); }

const char* to_string(CausalOrder o) {
  switch (o) {
    case CausalOrder::before: return "before";
    case CausalOrder::after: return "after";
    case CausalOrder::concurrent: return "concurrent";
    case CausalOrder::equal: return "equal";
  }
  return "?";
}

VectorClockList init_clock(std::size_t identity_count, Variable owner, std::size_t owner_index) {
  if (identity_count == 0) throw IndexOutOfRange("a clock needs at least one entry");
  if (owner_index >= identity_count)
    throw IndexOutOfRange("owner index " + std::to_string(owner_index) + " outside clock of " +
                          std::to_string(identity_count));
  return VectorClockList(std::vector<std::uint64_t>(identity_count, 0), std::move(owner));
}

VectorClockList inc_ele(const VectorClockList& v, std::size_t i) {
  if (i >= v.size())
    throw IndexOutOfRange("IncEle index " + std::to_string(i) + " outside clock of " + std::to_string(v.size()));
  auto c = v.counters();
  c[i] += 1;
  return VectorClockList(std::move(c), v.owner());
}

VectorClockList max_vec(const VectorClockList& from, const VectorClockList& into) {
  if (from.size() != into.size())
    throw LengthMismatch("MaxVec needs two lists of equal length (" + std::to_string(from.size()) + " vs " +
                         std::to_string(into.size()) + ")");
  auto c = into.counters();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(c[i], from[i]);
  return VectorClockList(std::move(c), into.owner());
}

CausalOrder happened_before(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("cannot compare clocks of length " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  bool le = true, ge = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) le = false;
    if (a[i] < b[i]) ge = false;
  }
  if (le && ge) return CausalOrder::equal;
  if (le) return CausalOrder::before;
  if (ge) return CausalOrder::after;
  return CausalOrder::concurrent;
}

CausalOrder happened_before(const VectorClockList& a, const VectorClockList& b) {
  return happened_before(a.counters(), b.counters());
}

std::vector<std::uint64_t> parse_clock(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i >= text.size() || text[i] != '[') throw FormatError("clock must start with '[': " + text);
  ++i;
  skip();
  if (i < text.size() && text[i] == ']') return out;
  while (true) {
    skip();
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) throw FormatError("expected a counter in clock: " + text);
    out.push_back(std::stoull(text.substr(start, i - start)));
    skip();
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    if (i < text.size() && text[i] == ']') return out;
    throw FormatError("malformed clock: " + text);
  }
}

std::string format_clock(const std::vector<std::uint64_t>& counters) {
  std::string s = "[";
  for (std::size_t i = 0; i < counters.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(counters[i]);
  }
  s += ']';
  return s;
}

}  // namespace picsif
