#include "picsif/auditor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "picsif/error.hpp"

namespace picsif {

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::unauth_n: return "unauth-n";
    case ViolationKind::unauth_z: return "unauth-z";
    case ViolationKind::unrecorded_event: return "unrecorded-event";
    case ViolationKind::non_reconstructable: return "non-reconstructable";
  }
  return "?";
}

bool Verdict::has(ViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == k; });
}

std::string Verdict::summary() const {
  bool n = has(ViolationKind::unauth_n), z = has(ViolationKind::unauth_z);
  if (n && z) return "both";
  if (n) return "auth-n-violated";
  if (z) return "auth-z-violated";
  return accountable() ? "accountable" : "unaccountable";
}

namespace {

std::string seqs(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out.empty() ? "-" : out;
}

}  // namespace

std::string Verdict::report() const {
  std::ostringstream os;
  os << "verdict: " << summary() << "\n";
  for (const auto& v : violations) {
    os << "  " << to_string(v.kind);
    if (v.event) os << " at event " << format_event(*v.event);
    if (v.kind == ViolationKind::non_reconstructable)
      os << ": order " << seqs(v.first) << " and order " << seqs(v.second) << " both fit the log";
    os << "\n";
  }
  return os.str();
}

std::string Verdict::kv() const {
  std::ostringstream os;
  os << "verdict=" << summary() << " accountable=" << (accountable() ? "true" : "false")
     << " violations=" << violations.size() << "\n";
  for (const auto& v : violations) {
    os << "violation kind=" << to_string(v.kind) << " seq=" << (v.event ? std::to_string(v.event->seq) : "-");
    if (v.kind == ViolationKind::non_reconstructable) os << " first=" << seqs(v.first) << " second=" << seqs(v.second);
    os << "\n";
  }
  return os.str();
}

std::vector<Violation> check_auth_n(const std::vector<EventRecord>& trace, const Registry& registry) {
  std::vector<Violation> out;
  for (const auto& e : trace) {
    if (e.kind != EventKind::receive || !e.peer || e.payload_kind != PayloadKind::message) continue;
    bool in_r = registry.is_authenticated(e.actor), in_s = registry.is_authenticated(*e.peer);
    if (in_r != in_s) out.push_back(Violation{ViolationKind::unauth_n, e, {}, {}});
  }
  return out;
}

std::vector<Violation> check_auth_z(const std::vector<EventRecord>& trace, const Registry& registry) {
  std::vector<Violation> out;
  for (const auto& e : trace) {
    bool inside = registry.is_authenticated(e.actor);
    if (e.kind == EventKind::channel_created && inside) {
      out.push_back(Violation{ViolationKind::unauth_z, e, {}, {}});
    } else if (e.kind == EventKind::receive && e.peer && inside && registry.is_authenticated(*e.peer) && e.channel &&
               !registry.is_authorized(*e.channel)) {
      out.push_back(Violation{ViolationKind::unauth_z, e, {}, {}});
    }
  }
  return out;
}

std::vector<Violation> check_completeness(const std::vector<EventRecord>& trace, const Registry& registry) {
  std::vector<Violation> out;
  for (const auto& e : trace) {
    if (e.kind != EventKind::send && e.kind != EventKind::receive) continue;
    if (e.recorded) continue;
    bool touches = registry.is_authenticated(e.actor) || (e.peer && registry.is_authenticated(*e.peer));
    if (touches) out.push_back(Violation{ViolationKind::unrecorded_event, e, {}, {}});
  }
  return out;
}

namespace {

// SCIF events, what really preceded what, and what the log says.
struct Orders {
  std::vector<const EventRecord*> events;
  std::size_t n = 0;
  std::vector<char> truth;  // n*n, transitive
  std::vector<char> logged_before;
  std::vector<char> logged;

  bool is_true(std::size_t i, std::size_t j) const { return truth[i * n + j]; }
  bool is_logged_before(std::size_t i, std::size_t j) const { return logged_before[i * n + j]; }

  Orders(const std::vector<EventRecord>& so_log, const std::vector<EventRecord>& full, const Registry& registry,
         std::size_t cap) {
    std::vector<std::uint64_t> in_log;
    for (const auto& e : so_log) in_log.push_back(e.seq);
    std::sort(in_log.begin(), in_log.end());

    // Real precedence is computed over every actor, so a chain through
    // Signal still orders the SCIF events at its ends.
    std::vector<const EventRecord*> all;
    std::vector<std::size_t> scif;
    for (const auto& e : full) {
      bool comm = e.kind == EventKind::send || e.kind == EventKind::receive || e.kind == EventKind::internal;
      if (!comm) continue;
      if (registry.is_authenticated(e.actor)) scif.push_back(all.size());
      all.push_back(&e);
    }
    if (scif.size() > cap)
      throw EnumerationCapExceeded(std::to_string(scif.size()) + " SCIF events exceed the enumeration cap of " +
                                   std::to_string(cap) + "; explore a shallower or smaller scenario");
    const std::size_t m = all.size();
    std::vector<char> real(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto& a = *all[i];
        const auto& b = *all[j];
        if (a.seq >= b.seq) continue;
        bool same = a.actor == b.actor;
        bool linked = b.link && *b.link == a.seq;
        bool clocked = !same && !linked && a.timed && b.timed && a.clock && b.clock &&
                       happened_before(*a.clock, *b.clock) == CausalOrder::before;
        if (same || clocked || linked) real[i * m + j] = 1;
      }
    }
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t i = 0; i < m; ++i)
        if (real[i * m + k])
          for (std::size_t j = 0; j < m; ++j) real[i * m + j] |= real[k * m + j];

    n = scif.size();
    for (auto i : scif) events.push_back(all[i]);
    truth.assign(n * n, 0);
    logged_before.assign(n * n, 0);
    logged.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      logged[i] = std::binary_search(in_log.begin(), in_log.end(), events[i]->seq);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        truth[i * n + j] = real[scif[i] * m + scif[j]];
        const auto& a = *events[i];
        const auto& b = *events[j];
        if (i != j && logged[i] && logged[j] && a.clock && b.clock &&
            happened_before(*a.clock, *b.clock) == CausalOrder::before)
          logged_before[i * n + j] = 1;
      }
    }
  }

  // A linear extension of the log's order that emits `first` as early as
  // it may.
  std::vector<std::uint64_t> extension(std::size_t first) const {
    std::vector<bool> done(n, false);
    std::vector<std::uint64_t> out;
    std::function<void(std::size_t)> emit = [&](std::size_t v) {
      if (done[v]) return;
      for (std::size_t u = 0; u < n; ++u)
        if (is_logged_before(u, v)) emit(u);
      done[v] = true;
      out.push_back(events[v]->seq);
    };
    emit(first);
    for (std::size_t v = 0; v < n; ++v) emit(v);
    return out;
  }
};

}  // namespace

Reconstruction check_reconstructable(const std::vector<EventRecord>& so_log, const std::vector<EventRecord>& full,
                                     const Registry& registry, std::size_t cap) {
  Orders o(so_log, full, registry, cap);
  const std::size_t n = o.n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!o.is_true(i, j) || o.is_logged_before(i, j)) continue;
      // Nothing in the log forces i before j, so j may go first.
      return Reconstruction{false, o.extension(i), o.extension(j)};
    }
  }
  return Reconstruction{};
}

std::vector<std::vector<std::uint64_t>> consistent_orders(const std::vector<EventRecord>& so_log,
                                                          const std::vector<EventRecord>& full,
                                                          const Registry& registry, std::size_t cap) {
  Orders o(so_log, full, registry, cap);
  const std::size_t n = o.n;
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur;
  std::vector<bool> used(n, false);
  std::function<void()> go = [&] {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v]) continue;
      bool ready = true;
      for (std::size_t u = 0; u < n && ready; ++u)
        if (!used[u] && o.is_logged_before(u, v)) ready = false;
      if (!ready) continue;
      used[v] = true;
      cur.push_back(o.events[v]->seq);
      go();
      cur.pop_back();
      used[v] = false;
    }
  };
  go();
  return out;
}

Verdict audit(const std::vector<EventRecord>& so_log, const std::vector<EventRecord>& full, const Registry& registry,
              std::size_t cap) {
  Verdict v;
  for (auto* check : {&check_auth_n, &check_auth_z, &check_completeness}) {
    auto found = (*check)(full, registry);
    v.violations.insert(v.violations.end(), found.begin(), found.end());
  }
  auto r = check_reconstructable(so_log, full, registry, cap);
  if (!r.reconstructable)
    v.violations.push_back(Violation{ViolationKind::non_reconstructable, std::nullopt, r.first, r.second});
  return v;
}

Verdict audit(const ScenarioState& s, std::size_t cap) {
  return audit(s.so_log(), s.full_trace(), s.scenario().registry, cap);
}

}  // namespace picsif
