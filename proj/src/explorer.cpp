#include "picsif/explorer.hpp"

#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "picsif/error.hpp"

namespace picsif {

const char* to_string(Target t) {
  switch (t) {
    case Target::auth_n: return "auth-n";
    case Target::auth_z: return "auth-z";
    case Target::unrecorded: return "unrecorded";
    case Target::non_reconstructable: return "non-reconstructable";
    case Target::any: return "any";
  }
  return "?";
}

Target target_from(const std::string& s) {
  for (auto t : {Target::auth_n, Target::auth_z, Target::unrecorded, Target::non_reconstructable, Target::any})
    if (s == to_string(t)) return t;
  throw Error("unknown target '" + s + "'");
}

const char* to_string(SearchResult::Kind k) {
  switch (k) {
    case SearchResult::Kind::found: return "found";
    case SearchResult::Kind::exhausted: return "exhausted";
    case SearchResult::Kind::capped: return "capped";
  }
  return "?";
}

bool meets(const ScenarioState& s, Target t, std::size_t enumeration_cap) {
  const auto& trace = s.full_trace();
  const auto& reg = s.scenario().registry;
  switch (t) {
    case Target::auth_n: return !check_auth_n(trace, reg).empty();
    case Target::auth_z:
      for (const auto& v : check_auth_z(trace, reg))
        if (v.event && v.event->kind == EventKind::receive && v.event->minted_channel && v.event->peer &&
            *v.event->peer != v.event->actor)
          return true;
      return false;
    case Target::unrecorded: return !check_completeness(trace, reg).empty();
    case Target::non_reconstructable:
      return !check_reconstructable(s.so_log(), trace, reg, enumeration_cap).reconstructable;
    case Target::any: return !audit(s, enumeration_cap).accountable();
  }
  return false;
}

Witness build_witness(const ScenarioState& initial, const std::vector<Choice>& choices, std::size_t enumeration_cap) {
  Witness w;
  ScenarioState s = initial;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    auto enabled = enabled_redexes(s);
    const auto& c = choices[i];
    if (c.index >= enabled.size())
      throw ReplayDivergence(i, "only " + std::to_string(enabled.size()) + " redexes enabled, wanted #" +
                                    std::to_string(c.index));
    if (enabled[c.index].label != c.label)
      throw ReplayDivergence(i, "expected '" + c.label + "', found '" + enabled[c.index].label + "'");
    ScenarioState next = fire(s, enabled[c.index]);
    WitnessStep step{c.index, c.label, {}};
    step.emitted.assign(next.full_trace().begin() + static_cast<std::ptrdiff_t>(s.full_trace().size()),
                        next.full_trace().end());
    w.steps.push_back(std::move(step));
    s = std::move(next);
  }
  w.verdict = audit(s, enumeration_cap);
  return w;
}

namespace {

constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max();

struct Node {
  std::size_t parent = kRoot;
  Choice choice;
};

std::vector<Choice> path_to(const std::vector<Node>& nodes, std::size_t at) {
  std::vector<Choice> out;
  for (; at != kRoot; at = nodes[at].parent) out.push_back(nodes[at].choice);
  out.pop_back();  // the root carries no choice
  return {out.rbegin(), out.rend()};
}

// Visited states are remembered by a 128-bit digest of their key.
struct Digest {
  std::uint64_t a = 0, b = 0;
  bool operator==(const Digest& o) const { return a == o.a && b == o.b; }
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const { return static_cast<std::size_t>(d.a ^ (d.b * 0x9e3779b97f4a7c15ULL)); }
};

Digest digest(const std::string& key) {
  Digest d{std::hash<std::string>{}(key), 0xcbf29ce484222325ULL};
  for (unsigned char c : key) d.b = (d.b ^ c) * 0x100000001b3ULL;
  return d;
}

struct Successor {
  Choice choice;
  ScenarioState state;
  Digest key;
};

std::vector<Successor> expand(const ScenarioState& s) {
  std::vector<Successor> out;
  auto enabled = enabled_redexes(s);
  for (std::size_t i = 0; i < enabled.size(); ++i) {
    Successor n{Choice{i, enabled[i].label}, fire(s, enabled[i]), {}};
    n.key = digest(n.state.fingerprint());
    out.push_back(std::move(n));
  }
  return out;
}

// Runs fn(0..n-1) over the workers; fn must only touch its own slot.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  std::size_t w = std::min(static_cast<std::size_t>(std::max(1, workers)), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) fn(i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SearchResult breadth_first(const ScenarioState& initial, const SearchConfig& cfg) {
  SearchResult r;
  std::vector<Node> nodes{Node{}};
  std::unordered_set<Digest, DigestHash> visited{digest(initial.fingerprint())};
  r.states = 1;
  if (meets(initial, cfg.target, cfg.enumeration_cap)) {
    r.kind = SearchResult::Kind::found;
    r.witness = build_witness(initial, {}, cfg.enumeration_cap);
    return r;
  }
  std::vector<std::pair<std::size_t, ScenarioState>> frontier{{0, initial}};
  for (int depth = 1; depth <= cfg.max_depth && !frontier.empty(); ++depth) {
    // Successors land in frontier order whatever the worker count.
    std::vector<std::vector<Successor>> expanded(frontier.size());
    parallel_for(frontier.size(), cfg.workers, [&](std::size_t i) { expanded[i] = expand(frontier[i].second); });

    std::vector<std::pair<std::size_t, ScenarioState>> next;
    bool full = false;
    for (std::size_t i = 0; i < frontier.size() && !full; ++i) {
      for (auto& succ : expanded[i]) {
        ++r.transitions;
        if (!visited.insert(succ.key).second) continue;
        nodes.push_back(Node{frontier[i].first, succ.choice});
        next.emplace_back(nodes.size() - 1, std::move(succ.state));
        if (visited.size() >= cfg.state_cap) {
          full = true;
          break;
        }
      }
    }
    r.states = visited.size();
    if (!next.empty()) r.deepest = depth;

    std::vector<char> hit(next.size(), 0);
    parallel_for(next.size(), cfg.workers,
                 [&](std::size_t i) { hit[i] = meets(next[i].second, cfg.target, cfg.enumeration_cap); });
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (!hit[i]) continue;
      r.kind = SearchResult::Kind::found;
      r.witness = build_witness(initial, path_to(nodes, next[i].first), cfg.enumeration_cap);
      return r;
    }
    if (full) {
      r.kind = SearchResult::Kind::capped;
      return r;
    }
    // The last level is never expanded.
    if (depth == cfg.max_depth) break;
    frontier = std::move(next);
  }
  r.kind = SearchResult::Kind::exhausted;
  return r;
}

struct DepthFirst {
  const SearchConfig& cfg;
  SearchResult r;
  // Shallowest depth each state was reached at; a shallower revisit has more
  // budget left and is explored again.
  std::unordered_map<Digest, int, DigestHash> seen;
  std::vector<Choice> path;
  bool stop = false;

  void visit(const ScenarioState& s, int depth) {
    if (depth >= cfg.max_depth) return;
    for (auto& succ : expand(s)) {
      if (stop) return;
      ++r.transitions;
      auto [it, fresh] = seen.try_emplace(succ.key, depth + 1);
      if (!fresh) {
        if (it->second <= depth + 1) continue;
        it->second = depth + 1;
      }
      r.states = seen.size();
      r.deepest = std::max(r.deepest, depth + 1);
      path.push_back(succ.choice);
      if (meets(succ.state, cfg.target, cfg.enumeration_cap)) {
        r.kind = SearchResult::Kind::found;
        stop = true;
        return;
      }
      if (seen.size() >= cfg.state_cap) {
        r.kind = SearchResult::Kind::capped;
        stop = true;
        return;
      }
      visit(succ.state, depth + 1);
      if (stop) return;
      path.pop_back();
    }
  }
};

}  // namespace

SearchResult explore(const ScenarioState& initial, const SearchConfig& cfg) {
  if (cfg.max_depth < 1 || cfg.state_cap < 1) throw Error("depth and state cap must be at least 1");
  if (cfg.strategy == Strategy::breadth_first) return breadth_first(initial, cfg);

  DepthFirst d{cfg, {}, {}, {}, false};
  d.seen.emplace(digest(initial.fingerprint()), 0);
  d.r.states = 1;
  if (meets(initial, cfg.target, cfg.enumeration_cap)) {
    d.r.kind = SearchResult::Kind::found;
    d.r.witness = build_witness(initial, {}, cfg.enumeration_cap);
    return d.r;
  }
  d.r.kind = SearchResult::Kind::exhausted;
  d.visit(initial, 0);
  if (d.r.kind == SearchResult::Kind::found) d.r.witness = build_witness(initial, d.path, cfg.enumeration_cap);
  return d.r;
}

SearchResult explore(const ScenarioBundle& bundle, const SearchConfig& cfg) {
  if (cfg.fuel && *cfg.fuel < 1) throw Error("fuel must be at least 1");
  return explore(bundle.state(cfg.fuel), cfg);
}

std::string format_witness(const Witness& w) {
  std::ostringstream os;
  os << "v1\n";
  for (const auto& s : w.steps) os << s.index << " " << s.label << "\n";
  os << "end\n" << w.verdict.kv();
  return os.str();
}

namespace {

std::vector<std::uint64_t> parse_seqs(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (s == "-") return out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(std::stoull(item));
  return out;
}

ViolationKind violation_kind_from(const std::string& s) {
  for (auto k : {ViolationKind::unauth_n, ViolationKind::unauth_z, ViolationKind::unrecorded_event,
                 ViolationKind::non_reconstructable})
    if (s == to_string(k)) return k;
  throw FormatError("unknown violation kind '" + s + "'");
}

// Only the fields `Verdict::kv` prints come back.
Violation parse_violation(const std::string& line) {
  Violation v;
  std::istringstream is(line);
  std::string word;
  is >> word;
  while (is >> word) {
    auto eq = word.find('=');
    if (eq == std::string::npos) throw FormatError("malformed violation field '" + word + "'");
    std::string key = word.substr(0, eq), value = word.substr(eq + 1);
    if (key == "kind") {
      v.kind = violation_kind_from(value);
    } else if (key == "seq") {
      if (value != "-") {
        EventRecord e;
        e.seq = std::stoull(value);
        v.event = e;
      }
    } else if (key == "first") {
      v.first = parse_seqs(value);
    } else if (key == "second") {
      v.second = parse_seqs(value);
    }
  }
  return v;
}

}  // namespace

Witness parse_witness(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "v1") throw FormatError("witness must start with 'v1'");
  Witness w;
  bool ended = false;
  std::size_t at = 1;
  while (std::getline(is, line)) {
    ++at;
    if (line.empty()) continue;
    if (!ended) {
      if (line == "end") {
        ended = true;
        continue;
      }
      auto sp = line.find(' ');
      if (sp == std::string::npos || sp == 0 || line.find_first_not_of("0123456789") != sp)
        throw FormatError("line " + std::to_string(at) + ": expected '<index> <label>'");
      w.steps.push_back(WitnessStep{std::stoull(line.substr(0, sp)), line.substr(sp + 1), {}});
    } else if (line.rfind("verdict=", 0) == 0) {
      continue;
    } else if (line.rfind("violation ", 0) == 0) {
      try {
        w.verdict.violations.push_back(parse_violation(line));
      } catch (const std::logic_error&) {
        throw FormatError("line " + std::to_string(at) + ": bad number");
      }
    } else {
      throw FormatError("line " + std::to_string(at) + ": unexpected '" + line + "'");
    }
  }
  if (!ended) throw FormatError("witness has no 'end' line");
  return w;
}

Verdict replay(const ScenarioState& initial, const Witness& w, std::size_t enumeration_cap) {
  std::vector<Choice> choices;
  for (const auto& s : w.steps) choices.push_back(Choice{s.index, s.label});
  return build_witness(initial, choices, enumeration_cap).verdict;
}

Verdict replay(const ScenarioBundle& bundle, const Witness& w, std::optional<int> fuel, std::size_t enumeration_cap) {
  return replay(bundle.state(fuel), w, enumeration_cap);
}

std::string golden_dir(const std::string& fallback) {
  const char* env = std::getenv("PICSIF_GOLDEN_DIR");
  return env && *env ? std::string(env) : fallback;
}

}  // namespace picsif
