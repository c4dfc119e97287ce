#pragma once

// Reduction engine over a scenario: a soup of actor threads, the SO's log and
// the omniscient trace.
//
// Vector-clock bookkeeping is actor-local. At load the init, memory and
// forward-to-SO components of each actor are recognised and removed; what
// they did becomes state (a clock, a forwarding flag). The internal, send and
// receive components stay in the soup. A replicated `recv cc`/`recv cs` head
// starts a chain as one step; continuations that only talk to bookkeeping
// channels, calls and true matches run administratively inside the step that
// exposed them. `send cm(..)` closes a chain and emits its ticked event.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "picsif/congruence.hpp"
#include "picsif/surface.hpp"
#include "picsif/term.hpp"
#include "picsif/vclock.hpp"

namespace picsif {

enum class EventKind { send, receive, internal, channel_created, deleted };
enum class PayloadKind { vc_list, message, channel_name, tuple };

const char* to_string(EventKind k);
const char* to_string(PayloadKind k);
EventKind event_kind_from(const std::string& s);
PayloadKind payload_kind_from(const std::string& s);

struct EventRecord {
  std::uint64_t seq = 0;
  Variable actor;
  EventKind kind = EventKind::internal;
  std::optional<ChannelId> channel;
  PayloadKind payload_kind = PayloadKind::message;
  std::optional<std::vector<std::uint64_t>> clock;
  bool recorded = false;

  /// Ticked the actor's own clock entry.
  bool timed = false;
  /// Other side of a communication, when known at emission.
  std::optional<Variable> peer;
  /// For a receive: seq of the matching send event.
  std::optional<std::uint64_t> link;
  /// Payload names as displayed; for `deleted`, the erased name.
  std::vector<std::string> names;
  /// The channel was minted at run time.
  bool minted_channel = false;
};

/// Hash of everything but the seq, names and link; minted names collapse.
std::uint64_t event_signature(const EventRecord& e);

/// `seq actor kind channel payload-kind clock recorded`
std::string format_event(const EventRecord& e);
/// One `key=value` line.
std::string format_event_kv(const EventRecord& e);
EventRecord parse_event_kv(const std::string& line);

struct ActorInfo {
  std::string name;
  std::vector<Variable> identities;  // primary first
  bool has_clock = false;
  bool forwards = false;
  bool authenticated = false;
  bool is_operator = false;  // clocked, authenticated, no forward: the SO itself
  std::optional<std::size_t> clock_index;

  const Variable& primary() const { return identities.front(); }
  bool answers_to(const Variable& v) const;
};

struct Registry {
  std::vector<Variable> authenticated;
  std::vector<ChannelId> authorized;
  std::vector<ChannelId> unauthorized;

  bool is_authenticated(const Variable& v) const;
  /// Minted channels are never authorized.
  bool is_authorized(const ChannelId& c) const;
};

struct ThreadKey;

struct Thread {
  std::size_t actor = 0;
  Process proc;
  int unfolds = 0;  // for a replicated thread
  /// The send event this thread's send prefix was ticked for.
  std::optional<std::uint64_t> send_event;
  /// Memoized key, valid while it names the same process node.
  mutable std::shared_ptr<const ThreadKey> key_cache;
};

struct ThreadKey {
  Process proc;
  int unfolds = 0;
  bool timed = false;
  bool minted = false;  // mentions a minted name, so numbering matters
  std::string key;
  std::uint64_t hash = 0;
};

struct Scenario {
  std::string name;
  std::string expect;
  std::vector<ActorInfo> actors;
  Registry registry;
  std::vector<Process> initial;  // per actor, after bookkeeping removal
  int fuel = 3;
  /// Identities declared by some actor; any other endpoint variable is a
  /// wildcard.
  std::set<Variable> declared;
};

class ScenarioState {
 public:
  /// Loads a parsed scenario. `fuel` overrides the file's explore block when set.
  static ScenarioState load(const ScenarioFile& file, std::optional<int> fuel = std::nullopt);

  const Scenario& scenario() const { return *scenario_; }
  const std::vector<Thread>& threads() const { return threads_; }
  const std::vector<EventRecord>& full_trace() const { return trace_; }
  const std::vector<EventRecord>& so_log() const { return log_; }
  const std::vector<std::vector<std::uint64_t>>& clocks() const { return clocks_; }
  std::uint64_t freshness() const { return fresh_; }

  /// Deduplication key: congruence-normalized threads (minted names renamed
  /// by first occurrence), clocks, fuel, and the event multisets.
  std::string key() const;
  /// Same identifications as `key`, cheaper to build; not human-readable.
  std::string fingerprint() const;

 private:
  friend class Engine;
  std::string key_text(bool exact) const;

  std::shared_ptr<const Scenario> scenario_;
  std::vector<Thread> threads_;
  std::vector<EventRecord> trace_;
  std::vector<EventRecord> log_;
  std::vector<std::uint64_t> trace_sig_, log_sig_;  // event_signature, parallel to the above
  std::vector<std::vector<std::uint64_t>> clocks_;  // empty for unclocked actors
  std::uint64_t fresh_ = 0;
};

struct Redex {
  enum class Kind { communication, chain, choice };
  Kind kind = Kind::communication;
  std::size_t thread = 0;  // sender, chain head or choice
  Path path;
  std::size_t peer = 0;  // receiver
  Path peer_path;
  std::size_t branch = 0;
  std::string label;
};

bool operator==(const Redex& a, const Redex& b);

std::vector<Redex> enabled_redexes(const ScenarioState& s);
/// Throws StaleRedex when `r` is not enabled in `s`.
ScenarioState step(const ScenarioState& s, const Redex& r);
/// `step` without the enabledness check, for callers that just enumerated.
ScenarioState fire(const ScenarioState& s, const Redex& r);

class Policy {
 public:
  enum class Kind { first, random, script };

  static Policy first();
  static Policy random(std::uint64_t seed);
  /// Each line picks the first enabled redex whose label contains it.
  static Policy script(std::vector<std::string> lines);
  static Policy parse(const std::string& spec, std::uint64_t seed);  // first | random | script=<file>

  Kind kind() const { return kind_; }
  /// Index into `enabled`, or nothing to stop.
  std::optional<std::size_t> choose(const std::vector<Redex>& enabled);

 private:
  Kind kind_ = Kind::first;
  std::mt19937_64 rng_;
  std::vector<std::string> script_;
  std::size_t at_ = 0;
};

struct Choice {
  std::size_t index = 0;
  std::string label;
};

struct Trace {
  ScenarioState final;
  std::vector<Choice> choices;
};

Trace run(const ScenarioState& s, Policy policy, std::size_t max_steps);

std::string format_trace(const std::vector<EventRecord>& events);
/// Events plus an `so-log` line listing the seqs the SO still holds.
std::string format_trace_kv(const ScenarioState& s);

struct TraceFile {
  std::vector<EventRecord> full;
  std::vector<EventRecord> log;
};
TraceFile parse_trace_kv(const std::string& text);

}  // namespace picsif
