#pragma once

// Bounded search over the reduction graph of a bundle.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "picsif/auditor.hpp"
#include "picsif/scenarios.hpp"
#include "picsif/semantics.hpp"

namespace picsif {

enum class Strategy { breadth_first, depth_first };
enum class Target { auth_n, auth_z, unrecorded, non_reconstructable, any };

const char* to_string(Target t);
Target target_from(const std::string& s);  // auth-n | auth-z | unrecorded | non-reconstructable | any

struct SearchConfig {
  int max_depth = 12;
  std::optional<int> fuel;  // bundle's explore block when unset
  Strategy strategy = Strategy::breadth_first;
  Target target = Target::any;
  std::size_t state_cap = 500000;
  std::size_t enumeration_cap = 12;
  int workers = 1;
};

/// Whether `s` satisfies `t`. For auth-z only a delivery between two
/// authenticated actors over a minted channel counts, so the witness shows
/// the channel in use.
bool meets(const ScenarioState& s, Target t, std::size_t enumeration_cap = 12);

struct WitnessStep {
  std::size_t index = 0;
  std::string label;
  std::vector<EventRecord> emitted;
};

struct Witness {
  std::vector<WitnessStep> steps;
  Verdict verdict;
  int depth() const { return static_cast<int>(steps.size()); }
};

struct SearchResult {
  enum class Kind { found, exhausted, capped };
  Kind kind = Kind::exhausted;
  std::optional<Witness> witness;
  std::size_t states = 0;       // distinct states visited
  std::size_t transitions = 0;  // redexes fired
  int deepest = 0;
};

const char* to_string(SearchResult::Kind k);

SearchResult explore(const ScenarioBundle& bundle, const SearchConfig& cfg);
SearchResult explore(const ScenarioState& initial, const SearchConfig& cfg);

/// `v1`, one `index label` line per step, `end`, then the verdict's kv lines.
std::string format_witness(const Witness& w);
/// Throws FormatError.
Witness parse_witness(const std::string& text);

/// Re-fires every step from the bundle's initial state and audits the result.
/// Throws ReplayDivergence naming the first step whose index or label no
/// longer matches.
Verdict replay(const ScenarioBundle& bundle, const Witness& w, std::optional<int> fuel = std::nullopt,
               std::size_t enumeration_cap = 12);
Verdict replay(const ScenarioState& initial, const Witness& w, std::size_t enumeration_cap = 12);

/// Replays a choice list, filling in the emitted events and the verdict.
Witness build_witness(const ScenarioState& initial, const std::vector<Choice>& choices,
                      std::size_t enumeration_cap = 12);

/// Directory of golden witnesses: $PICSIF_GOLDEN_DIR, else `fallback`.
std::string golden_dir(const std::string& fallback);

}  // namespace picsif
