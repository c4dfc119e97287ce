#pragma once

// Accountability checks over a finished trace. Only the auditor reads the
// omniscient trace; the SO's own knowledge is its log.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "picsif/semantics.hpp"

namespace picsif {

enum class ViolationKind { unauth_n, unauth_z, unrecorded_event, non_reconstructable };

const char* to_string(ViolationKind k);

struct Violation {
  ViolationKind kind = ViolationKind::unrecorded_event;
  std::optional<EventRecord> event;
  /// For non-reconstructable: two orders of event seqs, both consistent with
  /// the SO's clock data, that disagree on a pair which really was ordered.
  std::vector<std::uint64_t> first, second;
};

struct Verdict {
  std::vector<Violation> violations;

  bool accountable() const { return violations.empty(); }
  bool has(ViolationKind k) const;
  /// accountable | auth-z-violated | auth-n-violated | both | unaccountable
  std::string summary() const;
  std::string report() const;
  std::string kv() const;

  friend bool operator==(const Verdict& a, const Verdict& b) { return a.kv() == b.kv(); }
};

/// Message deliveries between an authenticated and an unauthenticated actor.
std::vector<Violation> check_auth_n(const std::vector<EventRecord>& trace, const Registry& registry);
/// Deliveries between authenticated actors over unauthorized channels, and
/// channels minted by authenticated actors.
std::vector<Violation> check_auth_z(const std::vector<EventRecord>& trace, const Registry& registry);
/// Communication events touching the SCIF that the SO never recorded.
std::vector<Violation> check_completeness(const std::vector<EventRecord>& trace, const Registry& registry);

struct Reconstruction {
  bool reconstructable = true;
  std::vector<std::uint64_t> first, second;
};

/// Whether the SO's log pins down the real order of every causally related
/// pair of SCIF events in `full`. Throws EnumerationCapExceeded when there
/// are more than `cap` SCIF events.
Reconstruction check_reconstructable(const std::vector<EventRecord>& so_log, const std::vector<EventRecord>& full,
                                     const Registry& registry, std::size_t cap = 12);

/// Every linear order of the SCIF events in `full` consistent with the clock
/// data in `so_log`; events the log lacks are unconstrained.
std::vector<std::vector<std::uint64_t>> consistent_orders(const std::vector<EventRecord>& so_log,
                                                          const std::vector<EventRecord>& full,
                                                          const Registry& registry, std::size_t cap = 12);

Verdict audit(const std::vector<EventRecord>& so_log, const std::vector<EventRecord>& full, const Registry& registry,
              std::size_t cap = 12);
Verdict audit(const ScenarioState& s, std::size_t cap = 12);

}  // namespace picsif
