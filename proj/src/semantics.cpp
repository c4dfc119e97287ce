#include "picsif/semantics.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "picsif/error.hpp"

namespace picsif {

//----------------------------------------------------------------------------
// Event records

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::send: return "send";
    case EventKind::receive: return "receive";
    case EventKind::internal: return "internal";
    case EventKind::channel_created: return "channel-created";
    case EventKind::deleted: return "deleted";
  }
  return "?";
}

const char* to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::vc_list: return "vc-list";
    case PayloadKind::message: return "message";
    case PayloadKind::channel_name: return "channel-name";
    case PayloadKind::tuple: return "tuple";
  }
  return "?";
}

EventKind event_kind_from(const std::string& s) {
  for (auto k : {EventKind::send, EventKind::receive, EventKind::internal, EventKind::channel_created,
                 EventKind::deleted})
    if (s == to_string(k)) return k;
  throw FormatError("unknown event kind '" + s + "'");
}

PayloadKind payload_kind_from(const std::string& s) {
  for (auto k : {PayloadKind::vc_list, PayloadKind::message, PayloadKind::channel_name, PayloadKind::tuple})
    if (s == to_string(k)) return k;
  throw FormatError("unknown payload kind '" + s + "'");
}

namespace {

std::string channel_text(const std::optional<ChannelId>& c) { return c ? pretty(*c) : "-"; }
std::string clock_text(const std::optional<std::vector<std::uint64_t>>& c) { return c ? format_clock(*c) : "-"; }

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Channel text as printed by `pretty`, read back for the auditor. Minted
// names keep their `~serial` suffix.
ChannelId parse_channel_text(const std::string& s) {
  auto name_of = [](const std::string& t) {
    auto tilde = t.find('~');
    if (tilde == std::string::npos) return Name(t, NameKind::channel);
    return Name::minted(t.substr(0, tilde), NameKind::channel, std::stoull(t.substr(tilde + 1)));
  };
  auto hat = s.find("^{");
  ChannelId c{name_of(s.substr(0, hat)), std::nullopt};
  if (hat != std::string::npos) {
    if (s.back() != '}') throw FormatError("bad channel '" + s + "'");
    auto inner = s.substr(hat + 2, s.size() - hat - 3);
    auto comma = inner.find(',');
    if (comma == std::string::npos) throw FormatError("bad channel '" + s + "'");
    c.endpoints = std::make_pair(Term{Variable{inner.substr(0, comma)}}, Term{Variable{inner.substr(comma + 1)}});
  }
  return c;
}

}  // namespace

std::string format_event(const EventRecord& e) {
  std::ostringstream os;
  os << e.seq << ' ' << e.actor.label << ' ' << to_string(e.kind) << ' ' << channel_text(e.channel) << ' '
     << to_string(e.payload_kind) << ' ' << clock_text(e.clock) << ' ' << (e.recorded ? "true" : "false");
  return os.str();
}

std::string format_event_kv(const EventRecord& e) {
  std::ostringstream os;
  os << "event seq=" << e.seq << " actor=" << e.actor.label << " kind=" << to_string(e.kind)
     << " channel=" << channel_text(e.channel) << " payload=" << to_string(e.payload_kind)
     << " clock=" << clock_text(e.clock) << " recorded=" << (e.recorded ? "true" : "false")
     << " timed=" << (e.timed ? "true" : "false") << " peer=" << (e.peer ? e.peer->label : "-")
     << " link=" << (e.link ? std::to_string(*e.link) : "-") << " names=" << (e.names.empty() ? "-" : join(e.names, ","))
     << " minted=" << (e.minted_channel ? "true" : "false");
  return os.str();
}

EventRecord parse_event_kv(const std::string& line) {
  std::istringstream is(line);
  std::string word;
  is >> word;
  if (word != "event") throw FormatError("expected 'event' record, got '" + line + "'");
  std::map<std::string, std::string> kv;
  while (is >> word) {
    auto eq = word.find('=');
    if (eq == std::string::npos) throw FormatError("malformed field '" + word + "'");
    kv[word.substr(0, eq)] = word.substr(eq + 1);
  }
  auto get = [&](const char* k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw FormatError(std::string("missing field '") + k + "'");
    return it->second;
  };
  auto flag = [&](const char* k) {
    auto v = get(k);
    if (v != "true" && v != "false") throw FormatError(std::string("field '") + k + "' is not a boolean");
    return v == "true";
  };
  EventRecord e;
  try {
    e.seq = std::stoull(get("seq"));
    e.actor = Variable{get("actor")};
    e.kind = event_kind_from(get("kind"));
    if (auto c = get("channel"); c != "-") e.channel = parse_channel_text(c);
    e.payload_kind = payload_kind_from(get("payload"));
    if (auto c = get("clock"); c != "-") e.clock = parse_clock(c);
    e.recorded = flag("recorded");
    e.timed = flag("timed");
    if (auto p = get("peer"); p != "-") e.peer = Variable{p};
    if (auto l = get("link"); l != "-") e.link = std::stoull(l);
    if (auto n = get("names"); n != "-") e.names = split(n, ',');
    e.minted_channel = flag("minted");
  } catch (const std::invalid_argument&) {
    throw FormatError("malformed number in '" + line + "'");
  } catch (const std::out_of_range&) {
    throw FormatError("number out of range in '" + line + "'");
  }
  return e;
}

std::string format_trace(const std::vector<EventRecord>& events) {
  std::string out;
  for (const auto& e : events) out += format_event(e) + "\n";
  return out;
}

std::string format_trace_kv(const ScenarioState& s) {
  std::string out;
  for (const auto& e : s.full_trace()) out += format_event_kv(e) + "\n";
  out += "so-log";
  for (const auto& e : s.so_log()) out += " " + std::to_string(e.seq);
  out += "\n";
  return out;
}

TraceFile parse_trace_kv(const std::string& text) {
  TraceFile out;
  std::istringstream is(text);
  std::string line;
  bool saw_log = false;
  std::map<std::uint64_t, std::size_t> by_seq;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    // `run --format kv` interleaves its choices and verdict.
    if (line.rfind("choice ", 0) == 0 || line.rfind("verdict=", 0) == 0 || line.rfind("violation ", 0) == 0) continue;
    if (line.rfind("so-log", 0) == 0) {
      std::istringstream ls(line.substr(6));
      std::string w;
      while (ls >> w) {
        std::uint64_t seq = 0;
        try {
          seq = std::stoull(w);
        } catch (const std::exception&) {
          throw FormatError("malformed so-log entry '" + w + "'");
        }
        auto it = by_seq.find(seq);
        if (it == by_seq.end()) throw FormatError("so-log names unknown event " + w);
        out.log.push_back(out.full[it->second]);
      }
      saw_log = true;
      continue;
    }
    auto e = parse_event_kv(line);
    by_seq[e.seq] = out.full.size();
    out.full.push_back(std::move(e));
  }
  if (!saw_log) throw FormatError("trace has no so-log line");
  return out;
}

//----------------------------------------------------------------------------
// Actors and registry

bool ActorInfo::answers_to(const Variable& v) const {
  return std::find(identities.begin(), identities.end(), v) != identities.end();
}

bool Registry::is_authenticated(const Variable& v) const {
  return std::find(authenticated.begin(), authenticated.end(), v) != authenticated.end();
}

bool Registry::is_authorized(const ChannelId& c) const {
  if (!c.base.is_global()) return false;
  for (const auto& a : authorized) {
    if (a.base.label() != c.base.label()) continue;
    if (!a.directed()) return true;
    if (c.directed() && a.endpoints->first == c.endpoints->first && a.endpoints->second == c.endpoints->second)
      return true;
  }
  return false;
}

//----------------------------------------------------------------------------
// Engine

namespace {

bool is_bookkeeping(const ChannelId& c) {
  if (!c.base.is_global()) return false;
  const auto& l = c.base.label();
  return l == "cm" || l == "cc" || l == "cs" || l == "cr" || l == "cuc";
}

bool on(const Process& p, const char* label) {
  return (p.is(Process::Kind::send) || p.is(Process::Kind::receive)) && p.channel().base.is_global() &&
         p.channel().base.label() == label;
}

bool mentions_send_on(const Process& p, const char* label) {
  if (p.is(Process::Kind::send) && on(p, label)) return true;
  for (std::size_t i = 0; i < p.child_count(); ++i)
    if (mentions_send_on(p.child(i), label)) return true;
  return false;
}

void flatten_parallel(const Process& p, std::vector<Process>& out) {
  if (p.is(Process::Kind::parallel)) {
    flatten_parallel(p.left(), out);
    flatten_parallel(p.right(), out);
  } else {
    out.push_back(p);
  }
}

PayloadKind payload_kind_of(const std::vector<Term>& ts) {
  if (ts.size() > 1) return PayloadKind::tuple;
  if (ts.empty()) return PayloadKind::message;
  if (std::holds_alternative<ClockLiteral>(ts[0])) return PayloadKind::vc_list;
  if (auto n = as_name(ts[0]); n && n->kind() == NameKind::channel) return PayloadKind::channel_name;
  return PayloadKind::message;
}

std::vector<std::string> names_of(const std::vector<Term>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) {
    if (auto n = as_name(t)) {
      out.push_back(n->display());
    } else if (auto v = as_variable(t)) {
      out.push_back("@" + v->label);
    } else {
      out.push_back(format_clock(std::get<ClockLiteral>(t).counters));
    }
  }
  return out;
}

// A prefix or choice reachable from a thread's root without passing a guard.
struct Head {
  Path path;
  Process proc;
  bool replicated = false;
};

void find_heads(const Process& p, Path& path, int top_unfolds, int fuel, bool replicated, std::vector<Head>& out) {
  switch (p.kind()) {
    case Process::Kind::parallel:
      for (std::size_t i = 0; i < 2; ++i) {
        path.push_back(i);
        find_heads(p.child(i), path, 0, fuel, replicated, out);
        path.pop_back();
      }
      return;
    case Process::Kind::restriction:
      path.push_back(0);
      find_heads(p.body(), path, 0, fuel, replicated, out);
      path.pop_back();
      return;
    case Process::Kind::replication:
      if ((path.empty() ? top_unfolds : 0) >= fuel) return;
      path.push_back(0);
      find_heads(p.body(), path, 0, fuel, true, out);
      path.pop_back();
      return;
    case Process::Kind::send:
    case Process::Kind::receive:
    case Process::Kind::choice:
      out.push_back(Head{path, p, replicated});
      return;
    default:
      return;
  }
}

void choice_leaves(const Process& p, std::vector<Process>& out) {
  if (p.is(Process::Kind::choice)) {
    choice_leaves(p.left(), out);
    choice_leaves(p.right(), out);
  } else {
    out.push_back(p);
  }
}

// The bookkeeping chain a settle is running for one actor.
struct Chain {
  EventKind kind = EventKind::internal;
  std::optional<ChannelId> channel;
  std::optional<Variable> peer;
  std::optional<std::uint64_t> link;
  PayloadKind payload = PayloadKind::vc_list;
  std::vector<std::string> names;
  bool committed = false;
  std::optional<std::vector<std::uint64_t>> clock;
};

std::shared_ptr<Chain> new_chain(EventKind k) {
  auto c = std::make_shared<Chain>();
  c->kind = k;
  return c;
}

struct Work {
  std::size_t actor = 0;
  Process proc;
  int unfolds = 0;
  std::optional<std::uint64_t> send_event;
  std::shared_ptr<Chain> chain;
};

bool has_admin_head(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::parallel: return has_admin_head(p.left()) || has_admin_head(p.right());
    case Process::Kind::restriction: return has_admin_head(p.body());
    case Process::Kind::call:
    case Process::Kind::match: return true;
    case Process::Kind::send:
    case Process::Kind::receive: return is_bookkeeping(p.channel());
    default: return false;
  }
}

// Strips restrictions; used to see whether a receive continues into `recv cr`.
const Process& under_restrictions(const Process& p) {
  return p.is(Process::Kind::restriction) ? under_restrictions(p.body()) : p;
}

}  // namespace

class Engine {
 public:
  explicit Engine(ScenarioState& s) : s_(s), sc_(*s.scenario_) {}

  void emit(EventRecord e) {
    e.seq = s_.trace_.size();
    if (e.channel) e.minted_channel = e.channel->base.is_minted();
    auto sig = event_signature(e);
    s_.trace_.push_back(e);
    s_.trace_sig_.push_back(sig);
    if (e.recorded) {
      s_.log_.push_back(std::move(e));
      s_.log_sig_.push_back(sig);
    }
  }

  std::optional<std::vector<std::uint64_t>> clock_of(std::size_t actor) const {
    if (!sc_.actors[actor].has_clock) return std::nullopt;
    return s_.clocks_[actor];
  }

  EventRecord base_event(std::size_t actor, EventKind kind) const {
    EventRecord e;
    e.actor = sc_.actors[actor].primary();
    e.kind = kind;
    e.clock = clock_of(actor);
    e.recorded = sc_.actors[actor].is_operator;
    return e;
  }

  Name mint(std::size_t actor, const Name& bound) {
    Name n = Name::minted(bound.label(), bound.kind(), s_.fresh_++);
    if (n.kind() == NameKind::channel) {
      EventRecord e = base_event(actor, EventKind::channel_created);
      e.channel = ChannelId{n, std::nullopt};
      e.payload_kind = PayloadKind::channel_name;
      e.names = {n.display()};
      e.recorded = false;
      emit(std::move(e));
    }
    return n;
  }

  // Takes the prefix at `path` out of `p`: restrictions on the way are minted,
  // replications unfold one copy, parallel siblings go to `rest`.
  Process open(std::size_t actor, const Process& p, const Path& path, std::size_t at, int unfolds,
               std::vector<Work>& rest) {
    if (at == path.size()) return p;
    switch (p.kind()) {
      case Process::Kind::parallel: {
        std::size_t k = path[at];
        rest.push_back(Work{actor, p.child(1 - k), 0, std::nullopt, nullptr});
        return open(actor, p.child(k), path, at + 1, 0, rest);
      }
      case Process::Kind::restriction: {
        Name n = mint(actor, p.bound());
        return open(actor, substitute(p.body(), p.bound(), n), path, at + 1, 0, rest);
      }
      case Process::Kind::replication: {
        if (unfolds >= sc_.fuel) throw StaleRedex("replication fuel exhausted");
        rest.push_back(Work{actor, p, unfolds + 1, std::nullopt, nullptr});
        return open(actor, freshen_binders(p.body()), path, at + 1, 0, rest);
      }
      default:
        throw StaleRedex("path " + format_path(path) + " does not lead to a prefix");
    }
  }

  Process call(std::size_t actor, const Process& p) {
    const auto& args = p.terms();
    const auto& info = sc_.actors[actor];
    Process cont = p.body();
    auto bind_clock = [&](const Term& t) {
      if (!info.has_clock) return;
      if (auto n = as_name(t)) cont = substitute(cont, *n, ClockLiteral{s_.clocks_[actor]});
    };
    switch (p.symbol()) {
      case FunctionSymbol::IncEle:
        if (info.has_clock) {
          auto& c = s_.clocks_[actor];
          c[*info.clock_index] += 1;
        }
        bind_clock(args[0]);
        break;
      case FunctionSymbol::MaxVec:
        if (info.has_clock) {
          if (auto lit = std::get_if<ClockLiteral>(&args[0])) {
            auto& c = s_.clocks_[actor];
            if (lit->counters.size() != c.size())
              throw LengthMismatch("MaxVec over clocks of length " + std::to_string(lit->counters.size()) + " and " +
                                   std::to_string(c.size()));
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(c[i], lit->counters[i]);
          }
        }
        bind_clock(args[1]);
        break;
      case FunctionSymbol::Delete: {
        std::string target = names_of({args[0]}).front();
        auto& log = s_.log_;
        auto& sigs = s_.log_sig_;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < log.size(); ++i) {
          const auto& e = log[i];
          bool erase = (e.payload_kind == PayloadKind::message || e.payload_kind == PayloadKind::tuple) &&
                       std::find(e.names.begin(), e.names.end(), target) != e.names.end();
          if (erase) continue;
          if (kept != i) {
            log[kept] = std::move(log[i]);
            sigs[kept] = sigs[i];
          }
          ++kept;
        }
        log.resize(kept);
        sigs.resize(kept);
        EventRecord e = base_event(actor, EventKind::deleted);
        e.payload_kind = PayloadKind::message;
        e.names = {target};
        e.recorded = false;
        emit(std::move(e));
        break;
      }
    }
    return cont;
  }

  bool recorded(std::size_t actor, const Chain& c) const {
    const auto& info = sc_.actors[actor];
    if (info.is_operator) return true;
    if (!info.forwards) return false;
    if (c.kind == EventKind::internal) return true;
    return c.channel && sc_.registry.is_authorized(*c.channel);
  }

  // Runs administrative reductions until every item is a guarded thread.
  void settle(std::vector<Work> work) {
    std::deque<Work> q(work.begin(), work.end());
    std::vector<Work> kept;
    std::vector<std::pair<std::size_t, std::shared_ptr<Chain>>> commits;
    while (!q.empty()) {
      Work w = std::move(q.front());
      q.pop_front();
      const Process p = w.proc;
      auto next = [&](Process c, std::shared_ptr<Chain> chain) {
        q.push_back(Work{w.actor, std::move(c), 0, std::nullopt, std::move(chain)});
      };
      switch (p.kind()) {
        case Process::Kind::inaction:
          break;
        case Process::Kind::parallel:
          next(p.left(), w.chain);
          next(p.right(), w.chain);
          break;
        case Process::Kind::restriction:
          if (has_admin_head(p.body())) {
            next(substitute(p.body(), p.bound(), mint(w.actor, p.bound())), w.chain);
          } else {
            kept.push_back(std::move(w));
          }
          break;
        case Process::Kind::call:
          next(call(w.actor, p), w.chain);
          break;
        case Process::Kind::match:
          if (terms_equal(p.terms()[0], p.terms()[1])) {
            next(p.body(), w.chain);
          } else {
            kept.push_back(std::move(w));
          }
          break;
        case Process::Kind::receive:
          if (!is_bookkeeping(p.channel())) {
            kept.push_back(std::move(w));
          } else if (on(p, "cr")) {
            auto chain = w.chain ? w.chain : new_chain(EventKind::receive);
            next(p.body(), chain);
          } else if (on(p, "cc") || on(p, "cs")) {
            next(p.body(), new_chain(on(p, "cc") ? EventKind::internal : EventKind::send));
          } else {
            Process body = p.body();
            if (sc_.actors[w.actor].has_clock)
              for (const auto& slot : p.slots()) body = substitute(body, slot, ClockLiteral{s_.clocks_[w.actor]});
            next(body, w.chain);
          }
          break;
        case Process::Kind::send:
          if (!is_bookkeeping(p.channel())) {
            kept.push_back(std::move(w));
          } else {
            if (on(p, "cm") && w.chain && !w.chain->committed) {
              w.chain->committed = true;
              w.chain->clock = clock_of(w.actor);
              commits.emplace_back(w.actor, w.chain);
            }
            next(p.body(), w.chain);
          }
          break;
        default:
          kept.push_back(std::move(w));
          break;
      }
    }

    std::size_t first_new = s_.threads_.size();
    for (auto& w : kept) s_.threads_.push_back(Thread{w.actor, w.proc, w.unfolds, w.send_event, nullptr});

    for (auto& [actor, chain] : commits) {
      std::optional<std::size_t> carrier;
      if (chain->kind == EventKind::send && !chain->channel) {
        for (std::size_t i = 0; i < kept.size(); ++i) {
          const auto& k = kept[i];
          if (k.chain == chain && k.proc.is(Process::Kind::send)) {
            carrier = first_new + i;
            chain->channel = k.proc.channel();
            chain->payload = payload_kind_of(k.proc.terms());
            chain->names = names_of(k.proc.terms());
            break;
          }
        }
      }
      EventRecord e = base_event(actor, chain->kind);
      e.channel = chain->channel;
      e.peer = chain->peer;
      e.link = chain->link;
      e.payload_kind = chain->payload;
      e.names = chain->names;
      e.clock = chain->clock;
      e.timed = sc_.actors[actor].has_clock;
      e.recorded = recorded(actor, *chain);
      if (carrier) s_.threads_[*carrier].send_event = s_.trace_.size();
      emit(std::move(e));
    }
  }

  void fire(const Redex& r) {
    auto& threads = s_.threads_;
    if (r.kind == Redex::Kind::communication) {
      Thread snd = threads[r.thread];
      Thread rcv = threads[r.peer];
      threads.erase(threads.begin() + std::max(r.thread, r.peer));
      threads.erase(threads.begin() + std::min(r.thread, r.peer));
      std::vector<Work> rest;
      Process S = open(snd.actor, snd.proc, r.path, 0, snd.unfolds, rest);
      Process R = open(rcv.actor, rcv.proc, r.peer_path, 0, rcv.unfolds, rest);
      const ChannelId channel = S.channel();
      const auto& info_s = sc_.actors[snd.actor];
      const auto& info_r = sc_.actors[rcv.actor];

      std::optional<std::uint64_t> link = r.path.empty() ? snd.send_event : std::nullopt;
      if (!link) {
        EventRecord e = base_event(snd.actor, EventKind::send);
        e.channel = channel;
        e.payload_kind = payload_kind_of(S.terms());
        e.names = names_of(S.terms());
        e.peer = info_r.primary();
        link = s_.trace_.size();
        emit(std::move(e));
      }

      std::vector<std::pair<Name, Term>> binding;
      for (std::size_t i = 0; i < R.slots().size(); ++i) binding.emplace_back(R.slots()[i], S.terms()[i]);
      Process cont = substitute_all(R.body(), binding);

      std::shared_ptr<Chain> chain;
      const Process& lead = under_restrictions(cont);
      if (lead.is(Process::Kind::receive) && on(lead, "cr")) {
        chain = std::make_shared<Chain>();
        chain->kind = EventKind::receive;
        chain->channel = channel;
        chain->peer = info_s.primary();
        chain->link = link;
        chain->payload = payload_kind_of(S.terms());
        chain->names = names_of(S.terms());
      } else {
        EventRecord e = base_event(rcv.actor, EventKind::receive);
        e.channel = channel;
        e.payload_kind = payload_kind_of(S.terms());
        e.names = names_of(S.terms());
        e.peer = info_s.primary();
        e.link = link;
        emit(std::move(e));
      }
      rest.push_back(Work{snd.actor, S.body(), 0, std::nullopt, nullptr});
      rest.push_back(Work{rcv.actor, cont, 0, std::nullopt, chain});
      settle(std::move(rest));
      return;
    }

    Thread t = threads[r.thread];
    threads.erase(threads.begin() + r.thread);
    std::vector<Work> rest;
    Process h = open(t.actor, t.proc, r.path, 0, t.unfolds, rest);
    if (r.kind == Redex::Kind::chain) {
      rest.push_back(Work{t.actor, h, 0, std::nullopt, nullptr});
    } else {
      std::vector<Process> leaves;
      choice_leaves(h, leaves);
      rest.push_back(Work{t.actor, leaves.at(r.branch), 0, std::nullopt, nullptr});
    }
    settle(std::move(rest));
  }

 private:
  ScenarioState& s_;
  const Scenario& sc_;
};

//----------------------------------------------------------------------------
// Loading

ScenarioState ScenarioState::load(const ScenarioFile& file, std::optional<int> fuel) {
  auto sc = std::make_shared<Scenario>();
  sc->name = file.name;
  sc->expect = file.expect;
  sc->registry = Registry{file.registry.authenticated, file.registry.authorized, file.registry.unauthorized};
  sc->fuel = fuel ? *fuel : (file.exploration ? file.exploration->fuel : 3);
  for (const auto& a : file.actors)
    for (const auto& v : a.identities) sc->declared.insert(v);

  std::vector<std::vector<Process>> kept_components;
  for (const auto& a : file.actors) {
    ActorInfo info;
    info.name = a.name;
    info.identities = a.identities;
    if (info.identities.empty()) throw Error("actor '" + a.name + "' has no identity");
    std::vector<Process> comps;
    flatten_parallel(freshen_binders(a.process), comps);
    std::vector<Process> kept;
    bool memory = false, memory_forwards = false, forward = false;
    for (const auto& c : comps) {
      if (c.is(Process::Kind::restriction) && on(c.body(), "cm") && c.body().is(Process::Kind::send)) continue;
      if (c.is(Process::Kind::replication) && c.body().is(Process::Kind::receive)) {
        if (on(c.body(), "cm")) {
          memory = true;
          memory_forwards = mentions_send_on(c.body(), "cuc");
          continue;
        }
        if (on(c.body(), "cuc")) {
          forward = true;
          continue;
        }
      }
      kept.push_back(c);
    }
    const auto& auth = sc->registry.authenticated;
    auto at = std::find(auth.begin(), auth.end(), info.primary());
    info.authenticated = at != auth.end();
    info.has_clock = memory && info.authenticated;
    if (info.has_clock) info.clock_index = static_cast<std::size_t>(at - auth.begin());
    info.forwards = memory_forwards && forward;
    info.is_operator = info.has_clock && !info.forwards;
    sc->actors.push_back(info);
    Process whole;
    for (auto it = kept.rbegin(); it != kept.rend(); ++it)
      whole = it == kept.rbegin() ? *it : Process::parallel(*it, whole);
    sc->initial.push_back(whole);
    kept_components.push_back(std::move(kept));
  }

  ScenarioState s;
  s.scenario_ = sc;
  for (const auto& a : sc->actors)
    s.clocks_.push_back(a.has_clock ? std::vector<std::uint64_t>(sc->registry.authenticated.size(), 0)
                                    : std::vector<std::uint64_t>{});
  Engine e(s);
  for (std::size_t i = 0; i < kept_components.size(); ++i) {
    std::vector<Work> work;
    for (const auto& c : kept_components[i]) work.push_back(Work{i, c, 0, std::nullopt, nullptr});
    e.settle(std::move(work));
  }
  return s;
}

//----------------------------------------------------------------------------
// Redexes

namespace {

struct Match {
  const Scenario& sc;
  bool wildcard = false;

  bool endpoint(const Term& t, const ActorInfo& who) {
    if (auto v = as_variable(t); v && sc.declared.count(*v)) return who.answers_to(*v);
    wildcard = true;
    return true;
  }

  bool concrete(const Term& t) const {
    auto v = as_variable(t);
    return v && sc.declared.count(*v);
  }

  bool agree(const Term& x, const Term& y) const { return !concrete(x) || !concrete(y) || x == y; }

  bool operator()(std::size_t sa, const Process& S, std::size_t ra, const Process& R) {
    if (S.channel().base != R.channel().base) return false;
    if (S.terms().size() != R.slots().size()) return false;
    for (const ChannelId* c : {&S.channel(), &R.channel()}) {
      if (!c->directed()) continue;
      if (!endpoint(c->endpoints->first, sc.actors[sa])) return false;
      if (!endpoint(c->endpoints->second, sc.actors[ra])) return false;
    }
    if (S.channel().directed() && R.channel().directed()) {
      const auto& a = *S.channel().endpoints;
      const auto& b = *R.channel().endpoints;
      if (!agree(a.first, b.first) || !agree(a.second, b.second)) return false;
    }
    return !(wildcard && sa == ra);
  }
};

}  // namespace

bool operator==(const Redex& a, const Redex& b) {
  return a.kind == b.kind && a.thread == b.thread && a.path == b.path && a.peer == b.peer &&
         a.peer_path == b.peer_path && a.branch == b.branch;
}

std::vector<Redex> enabled_redexes(const ScenarioState& s) {
  const auto& sc = s.scenario();
  const auto& threads = s.threads();
  std::vector<std::vector<Head>> heads(threads.size());
  for (std::size_t i = 0; i < threads.size(); ++i) {
    Path path;
    find_heads(threads[i].proc, path, threads[i].unfolds, sc.fuel, false, heads[i]);
  }

  struct Keyed {
    std::size_t actor;
    std::string channel;
    Redex r;
  };
  std::vector<Keyed> out;
  for (std::size_t i = 0; i < threads.size(); ++i) {
    const auto& who = sc.actors[threads[i].actor];
    for (const auto& h : heads[i]) {
      if (h.proc.is(Process::Kind::choice)) {
        std::vector<Process> leaves;
        choice_leaves(h.proc, leaves);
        for (std::size_t b = 0; b < leaves.size(); ++b) {
          Redex r{Redex::Kind::choice, i, h.path, 0, {}, b, "choice " + who.primary().label + " " + std::to_string(b)};
          out.push_back(Keyed{threads[i].actor, "", std::move(r)});
        }
        continue;
      }
      if (is_bookkeeping(h.proc.channel())) {
        if (!h.replicated || !h.proc.is(Process::Kind::receive)) continue;
        const auto& label = h.proc.channel().base.label();
        const char* what = label == "cc" ? "internal" : label == "cs" ? "send" : label == "cr" ? "receive" : nullptr;
        if (!what) continue;
        Redex r{Redex::Kind::chain, i, h.path, 0, {}, 0, "chain " + who.primary().label + " " + what};
        out.push_back(Keyed{threads[i].actor, label, std::move(r)});
        continue;
      }
      if (!h.proc.is(Process::Kind::send)) continue;
      for (std::size_t j = 0; j < threads.size(); ++j) {
        if (j == i) continue;
        for (const auto& g : heads[j]) {
          if (!g.proc.is(Process::Kind::receive) || is_bookkeeping(g.proc.channel())) continue;
          Match m{sc};
          if (!m(threads[i].actor, h.proc, threads[j].actor, g.proc)) continue;
          Redex r{Redex::Kind::communication, i, h.path, j, g.path, 0,
                  "comm " + who.primary().label + " " + pretty(h.proc.channel()) + " -> " +
                      sc.actors[threads[j].actor].primary().label};
          out.push_back(Keyed{threads[i].actor, h.proc.channel().base.display(), std::move(r)});
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Keyed& a, const Keyed& b) {
    if (a.actor != b.actor) return a.actor < b.actor;
    return a.channel < b.channel;
  });
  std::vector<Redex> redexes;
  redexes.reserve(out.size());
  for (auto& k : out) redexes.push_back(std::move(k.r));
  return redexes;
}

ScenarioState fire(const ScenarioState& s, const Redex& r) {
  ScenarioState next = s;
  Engine(next).fire(r);
  return next;
}

ScenarioState step(const ScenarioState& s, const Redex& r) {
  auto enabled = enabled_redexes(s);
  if (std::find(enabled.begin(), enabled.end(), r) == enabled.end())
    throw StaleRedex("redex '" + r.label + "' is not enabled");
  return fire(s, r);
}

//----------------------------------------------------------------------------
// Policies and runs

Policy Policy::first() { return Policy(); }

Policy Policy::random(std::uint64_t seed) {
  Policy p;
  p.kind_ = Kind::random;
  p.rng_.seed(seed);
  return p;
}

Policy Policy::script(std::vector<std::string> lines) {
  Policy p;
  p.kind_ = Kind::script;
  p.script_ = std::move(lines);
  return p;
}

Policy Policy::parse(const std::string& spec, std::uint64_t seed) {
  if (spec == "first") return first();
  if (spec == "random") return random(seed);
  if (spec.rfind("script=", 0) == 0) {
    std::string path = spec.substr(7);
    std::ifstream in(path);
    if (!in) throw Error("cannot read script '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      auto e = line.find_last_not_of(" \t\r");
      lines.push_back(line.substr(b, e - b + 1));
    }
    return script(std::move(lines));
  }
  throw Error("unknown policy '" + spec + "'");
}

std::optional<std::size_t> Policy::choose(const std::vector<Redex>& enabled) {
  if (enabled.empty()) return std::nullopt;
  switch (kind_) {
    case Kind::first:
      return 0;
    case Kind::random:
      return std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(rng_);
    case Kind::script: {
      if (at_ >= script_.size()) return std::nullopt;
      const auto& want = script_[at_];
      for (std::size_t i = 0; i < enabled.size(); ++i) {
        if (enabled[i].label.find(want) != std::string::npos) {
          ++at_;
          return i;
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Trace run(const ScenarioState& s, Policy policy, std::size_t max_steps) {
  Trace t{s, {}};
  for (std::size_t n = 0; n < max_steps; ++n) {
    auto enabled = enabled_redexes(t.final);
    auto pick = policy.choose(enabled);
    if (!pick) break;
    t.choices.push_back(Choice{*pick, enabled[*pick].label});
    t.final = fire(t.final, enabled[*pick]);
  }
  return t;
}

//----------------------------------------------------------------------------
// Deduplication key

namespace {

std::string event_text(const EventRecord& e, const std::function<std::string(const Name&)>& render) {
  std::string chan = "-";
  if (e.channel) {
    chan = render(e.channel->base);
    if (e.channel->endpoints) {
      std::string full = pretty(*e.channel);
      chan += full.substr(full.find("^{"));
    }
  }
  return e.actor.label + " " + to_string(e.kind) + " " + chan + " " + to_string(e.payload_kind) + " " +
         clock_text(e.clock) + (e.recorded ? " r" : " -") + (e.timed ? "t" : "-") + " " +
         (e.peer ? e.peer->label : "-");
}

std::uint64_t fnv(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace

std::uint64_t event_signature(const EventRecord& e) {
  return fnv(event_text(e, [](const Name& n) {
    if (n.is_minted()) return n.label() + "~?";
    return n.is_global() ? n.label() : n.label() + "#" + std::to_string(n.id());
  }));
}

std::string ScenarioState::key() const { return key_text(true); }
std::string ScenarioState::fingerprint() const { return key_text(false); }

std::string ScenarioState::key_text(bool exact) const {
  std::map<Name, std::size_t> order;
  bool numbering = false;
  bool saw_minted = false;
  auto minted = [&](const Name& n) -> std::string {
    saw_minted = true;
    if (!numbering) return n.label() + "~?";
    auto it = order.find(n);
    if (it == order.end()) it = order.emplace(n, order.size()).first;
    return n.label() + "~" + std::to_string(it->second);
  };
  std::function<std::string(const Name&)> render = [&](const Name& n) -> std::string {
    if (n.is_global()) return n.label();
    if (n.is_minted()) return minted(n);
    return n.label() + "#" + std::to_string(n.id());
  };
  auto thread_key = [&](const Thread& t) {
    Process p = t.proc.is(Process::Kind::restriction) ? normalize(t.proc) : t.proc;
    return std::to_string(t.actor) + "/" + std::to_string(t.unfolds) + (t.send_event ? "t" : "u") + "/" +
           canonical_key(p, render);
  };
  // Keys without minted names do not depend on numbering and are memoized.
  auto rough_key = [&](const Thread& t) -> const ThreadKey& {
    const auto& c = t.key_cache;
    if (!c || c->proc.identity() != t.proc.identity() || c->unfolds != t.unfolds ||
        c->timed != t.send_event.has_value()) {
      saw_minted = false;
      auto k = std::make_shared<ThreadKey>();
      k->key = thread_key(t);
      k->proc = t.proc;
      k->unfolds = t.unfolds;
      k->timed = t.send_event.has_value();
      k->minted = saw_minted;
      k->hash = fnv(k->key);
      t.key_cache = std::move(k);
    }
    return *t.key_cache;
  };

  std::vector<std::pair<const ThreadKey*, const Thread*>> rough;
  for (const auto& t : threads_) rough.emplace_back(&rough_key(t), &t);

  std::string out;
  if (exact) {
    std::stable_sort(rough.begin(), rough.end(),
                     [](const auto& a, const auto& b) { return a.first->key < b.first->key; });
    numbering = true;
    for (const auto& [k, t] : rough) out += (k->minted ? thread_key(*t) : k->key) + "\n";
  } else {
    // Hashes stand in for the thread keys.
    std::stable_sort(rough.begin(), rough.end(),
                     [](const auto& a, const auto& b) { return a.first->hash < b.first->hash; });
    numbering = true;
    std::vector<std::uint64_t> hashes;
    for (const auto& [k, t] : rough) hashes.push_back(k->minted ? fnv(thread_key(*t)) : k->hash);
    out.append(reinterpret_cast<const char*>(hashes.data()), hashes.size() * sizeof(std::uint64_t));
  }
  out += "clocks";
  for (const auto& c : clocks_) out += " " + format_clock(c);
  out += "\n";

  if (exact) {
    for (const auto* events : {&trace_, &log_}) {
      std::vector<std::string> keys;
      for (const auto& e : *events) keys.push_back(event_text(e, render));
      std::sort(keys.begin(), keys.end());
      out += events == &trace_ ? "trace\n" : "log\n";
      for (const auto& k : keys) out += k + "\n";
    }
    return out;
  }

  // Signatures stand in for the event text; minted channels are still
  // rendered, as their numbering depends on the soup.
  for (int pass = 0; pass < 2; ++pass) {
    const auto& events = pass == 0 ? trace_ : log_;
    const auto& sigs = pass == 0 ? trace_sig_ : log_sig_;
    std::vector<std::uint64_t> plain;
    std::vector<std::string> named;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].minted_channel)
        named.push_back(event_text(events[i], render));
      else
        plain.push_back(sigs[i]);
    }
    std::sort(plain.begin(), plain.end());
    std::sort(named.begin(), named.end());
    out += pass == 0 ? "T" : "L";
    out.append(reinterpret_cast<const char*>(plain.data()), plain.size() * sizeof(std::uint64_t));
    for (const auto& n : named) out += n + "\n";
  }
  return out;
}

}  // namespace picsif
