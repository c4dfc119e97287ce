#include "picsif/term.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>

#include "picsif/error.hpp"

namespace picsif {

namespace {

std::atomic<std::uint64_t> g_next_binder_id{1};

}  // namespace

Name::Name(std::string label, NameKind kind, std::uint64_t id)
    : label_(std::move(label)), kind_(kind), id_(id) {}

Name Name::fresh(std::string label, NameKind kind) {
  return Name(std::move(label), kind, g_next_binder_id.fetch_add(1, std::memory_order_relaxed));
}

Name Name::minted(std::string label, NameKind kind, std::uint64_t serial) {
  return Name(std::move(label), kind, kRuntimeIdBase + serial);
}

Name Name::with_kind(NameKind k) const {
  Name n = *this;
  n.kind_ = k;
  return n;
}

std::string Name::display() const {
  if (is_minted()) return label_ + "~" + std::to_string(minted_serial());
  return label_;
}

bool terms_equal(const Term& a, const Term& b) { return a == b; }

const Name* as_name(const Term& t) { return std::get_if<Name>(&t); }
const Variable* as_variable(const Term& t) { return std::get_if<Variable>(&t); }

bool channels_equal(const ChannelId& a, const ChannelId& b) {
  if (a.base != b.base || a.directed() != b.directed()) return false;
  if (!a.directed()) return true;
  return a.endpoints->first == b.endpoints->first && a.endpoints->second == b.endpoints->second;
}

const char* symbol_name(FunctionSymbol s) {
  switch (s) {
    case FunctionSymbol::IncEle: return "IncEle";
    case FunctionSymbol::MaxVec: return "MaxVec";
    case FunctionSymbol::Delete: return "Delete";
  }
  return "?";
}

std::optional<FunctionSymbol> symbol_from_name(const std::string& s) {
  if (s == "IncEle") return FunctionSymbol::IncEle;
  if (s == "MaxVec") return FunctionSymbol::MaxVec;
  if (s == "Delete") return FunctionSymbol::Delete;
  return std::nullopt;
}

std::size_t symbol_arity(FunctionSymbol s) { return s == FunctionSymbol::Delete ? 1 : 2; }

//----------------------------------------------------------------------------

struct Process::Node {
  Kind kind = Kind::inaction;
  ChannelId channel;
  std::vector<Term> terms;
  std::vector<Name> slots;
  Name bound;
  FunctionSymbol symbol = FunctionSymbol::IncEle;
  std::vector<Process> children;
  std::uint32_t line = 0;
  std::uint32_t column = 0;
};

Process::Process() : Process(inaction()) {}

Process Process::inaction() {
  static const std::shared_ptr<const Node> node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::inaction;
    return std::shared_ptr<const Node>(n);
  }();
  return Process(node);
}

Process Process::hole() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::hole;
  return Process(std::move(n));
}

Process Process::send(ChannelId channel, std::vector<Term> payload, Process cont) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::send;
  n->channel = std::move(channel);
  n->channel.base = n->channel.base.with_kind(NameKind::channel);
  n->terms = std::move(payload);
  n->children.push_back(std::move(cont));
  return Process(std::move(n));
}

Process Process::receive(ChannelId channel, std::vector<Name> slots, Process cont) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::receive;
  n->channel = std::move(channel);
  n->channel.base = n->channel.base.with_kind(NameKind::channel);
  n->slots = std::move(slots);
  n->children.push_back(std::move(cont));
  return Process(std::move(n));
}

Process Process::restrict(Name fresh, Process body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::restriction;
  n->bound = std::move(fresh);
  n->children.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::parallel(Process left, Process right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::parallel;
  n->children = {std::move(left), std::move(right)};
  return Process(std::move(n));
}

Process Process::choice(Process left, Process right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::choice;
  n->children = {std::move(left), std::move(right)};
  return Process(std::move(n));
}

Process Process::replicate(Process body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::replication;
  n->children.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::match(Term lhs, Term rhs, Process cont) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::match;
  n->terms = {std::move(lhs), std::move(rhs)};
  n->children.push_back(std::move(cont));
  return Process(std::move(n));
}

Process Process::call(FunctionSymbol symbol, std::vector<Term> args, Process cont) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::call;
  n->symbol = symbol;
  n->terms = std::move(args);
  n->children.push_back(std::move(cont));
  return Process(std::move(n));
}

Process::Kind Process::kind() const { return node_->kind; }
const ChannelId& Process::channel() const { return node_->channel; }
const std::vector<Term>& Process::terms() const { return node_->terms; }
const std::vector<Name>& Process::slots() const { return node_->slots; }
const Name& Process::bound() const { return node_->bound; }
FunctionSymbol Process::symbol() const { return node_->symbol; }
std::uint32_t Process::line() const { return node_->line; }
std::uint32_t Process::column() const { return node_->column; }

Process Process::located(std::uint32_t line, std::uint32_t column) const {
  auto n = std::make_shared<Node>(*node_);
  n->line = line;
  n->column = column;
  return Process(std::move(n));
}

std::size_t Process::child_count() const { return node_->children.size(); }

const Process& Process::child(std::size_t i) const {
  if (i >= node_->children.size()) throw IndexOutOfRange("process has no child " + std::to_string(i));
  return node_->children[i];
}

Process Process::with_child(std::size_t i, Process c) const {
  if (i >= node_->children.size()) throw IndexOutOfRange("process has no child " + std::to_string(i));
  auto n = std::make_shared<Node>(*node_);
  n->children[i] = std::move(c);
  return Process(std::move(n));
}

//----------------------------------------------------------------------------

std::set<Name> term_names(const Term& t) {
  if (auto n = as_name(t)) return {*n};
  return {};
}

namespace {

void add_channel_names(const ChannelId& c, std::set<Name>& out) {
  out.insert(c.base);
  if (c.endpoints) {
    if (auto n = as_name(c.endpoints->first)) out.insert(*n);
    if (auto n = as_name(c.endpoints->second)) out.insert(*n);
  }
}

void collect_free(const Process& p, std::set<Name>& out) {
  switch (p.kind()) {
    case Process::Kind::inaction:
    case Process::Kind::hole:
      return;
    case Process::Kind::send:
    case Process::Kind::call:
    case Process::Kind::match:
      if (p.is(Process::Kind::send)) add_channel_names(p.channel(), out);
      for (const auto& t : p.terms())
        if (auto n = as_name(t)) out.insert(*n);
      collect_free(p.body(), out);
      return;
    case Process::Kind::receive: {
      add_channel_names(p.channel(), out);
      std::set<Name> inner;
      collect_free(p.body(), inner);
      for (const auto& s : p.slots()) inner.erase(s);
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Process::Kind::restriction: {
      std::set<Name> inner;
      collect_free(p.body(), inner);
      inner.erase(p.bound());
      out.insert(inner.begin(), inner.end());
      return;
    }
    case Process::Kind::parallel:
    case Process::Kind::choice:
      collect_free(p.left(), out);
      collect_free(p.right(), out);
      return;
    case Process::Kind::replication:
      collect_free(p.body(), out);
      return;
  }
}

using Subst = std::vector<std::pair<Name, Term>>;

const Term* lookup(const Subst& s, const Name& n) {
  for (const auto& [k, v] : s)
    if (k == n) return &v;
  return nullptr;
}

Term subst_term(const Term& t, const Subst& s) {
  if (auto n = as_name(t))
    if (auto v = lookup(s, *n)) return *v;
  return t;
}

ChannelId subst_channel(const ChannelId& c, const Subst& s) {
  ChannelId out = c;
  if (auto v = lookup(s, c.base)) {
    auto n = as_name(*v);
    if (!n) throw SortError("cannot substitute a non-name into channel position of '" + c.base.label() + "'");
    out.base = n->with_kind(NameKind::channel);
  }
  if (out.endpoints) {
    out.endpoints->first = subst_term(out.endpoints->first, s);
    out.endpoints->second = subst_term(out.endpoints->second, s);
  }
  return out;
}

Process subst(const Process& p, const Subst& s);

// Drops entries shadowed by `binders` and alpha-renames binders that would
// capture a name in the substituted values. Returns the renamed binders.
std::vector<Name> enter_binders(const std::vector<Name>& binders, Process& body, Subst& s) {
  Subst kept;
  for (auto& e : s)
    if (std::find(binders.begin(), binders.end(), e.first) == binders.end()) kept.push_back(e);
  s = std::move(kept);
  std::vector<Name> out = binders;
  if (s.empty()) return out;
  std::set<Name> body_free;
  collect_free(body, body_free);
  bool live = false;
  for (const auto& e : s)
    if (body_free.count(e.first)) live = true;
  if (!live) {
    s.clear();
    return out;
  }
  for (auto& b : out) {
    bool captured = false;
    for (const auto& e : s)
      if (auto n = as_name(e.second); n && *n == b) captured = true;
    if (captured) {
      Name renamed = Name::fresh(b.label(), b.kind());
      body = subst(body, Subst{{b, renamed}});
      b = renamed;
    }
  }
  return out;
}

Process subst(const Process& p, const Subst& s) {
  if (s.empty()) return p;
  switch (p.kind()) {
    case Process::Kind::inaction:
    case Process::Kind::hole:
      return p;
    case Process::Kind::send: {
      std::vector<Term> payload;
      for (const auto& t : p.terms()) payload.push_back(subst_term(t, s));
      return Process::send(subst_channel(p.channel(), s), std::move(payload), subst(p.body(), s));
    }
    case Process::Kind::call: {
      std::vector<Term> args;
      for (const auto& t : p.terms()) args.push_back(subst_term(t, s));
      return Process::call(p.symbol(), std::move(args), subst(p.body(), s));
    }
    case Process::Kind::match:
      return Process::match(subst_term(p.terms()[0], s), subst_term(p.terms()[1], s), subst(p.body(), s));
    case Process::Kind::receive: {
      ChannelId c = subst_channel(p.channel(), s);
      Process body = p.body();
      Subst inner = s;
      auto slots = enter_binders(p.slots(), body, inner);
      return Process::receive(std::move(c), std::move(slots), subst(body, inner));
    }
    case Process::Kind::restriction: {
      Process body = p.body();
      Subst inner = s;
      auto bound = enter_binders({p.bound()}, body, inner);
      return Process::restrict(bound.front(), subst(body, inner));
    }
    case Process::Kind::parallel:
      return Process::parallel(subst(p.left(), s), subst(p.right(), s));
    case Process::Kind::choice:
      return Process::choice(subst(p.left(), s), subst(p.right(), s));
    case Process::Kind::replication:
      return Process::replicate(subst(p.body(), s));
  }
  return p;
}

}  // namespace

std::set<Name> free_names(const Process& p) {
  std::set<Name> out;
  collect_free(p, out);
  return out;
}

bool occurs_free(const Name& n, const Process& p) { return free_names(p).count(n) > 0; }

Process substitute(const Process& p, const Name& replace, const Term& with) {
  return subst(p, Subst{{replace, with}});
}

Process substitute_all(const Process& p, const std::vector<std::pair<Name, Term>>& s) { return subst(p, s); }

namespace {

// One pass; `env` maps old binders to their replacements, innermost last.
Process freshen(const Process& p, Subst& env) {
  auto rename = [&](const Term& t) -> Term {
    if (auto n = as_name(t))
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == *n) return it->second;
    return t;
  };
  auto channel = [&](const ChannelId& c) {
    ChannelId out = c;
    if (auto n = as_name(rename(Term{c.base}))) out.base = *n;
    if (out.endpoints) {
      out.endpoints->first = rename(out.endpoints->first);
      out.endpoints->second = rename(out.endpoints->second);
    }
    return out;
  };
  switch (p.kind()) {
    case Process::Kind::inaction:
    case Process::Kind::hole:
      return p;
    case Process::Kind::send: {
      std::vector<Term> payload;
      for (const auto& t : p.terms()) payload.push_back(rename(t));
      return Process::send(channel(p.channel()), std::move(payload), freshen(p.body(), env));
    }
    case Process::Kind::call: {
      std::vector<Term> args;
      for (const auto& t : p.terms()) args.push_back(rename(t));
      return Process::call(p.symbol(), std::move(args), freshen(p.body(), env));
    }
    case Process::Kind::match:
      return Process::match(rename(p.terms()[0]), rename(p.terms()[1]), freshen(p.body(), env));
    case Process::Kind::receive: {
      ChannelId c = channel(p.channel());
      std::vector<Name> slots;
      for (const auto& b : p.slots()) {
        slots.push_back(Name::fresh(b.label(), b.kind()));
        env.emplace_back(b, slots.back());
      }
      Process body = freshen(p.body(), env);
      env.resize(env.size() - slots.size());
      return Process::receive(std::move(c), std::move(slots), std::move(body));
    }
    case Process::Kind::restriction: {
      Name b = Name::fresh(p.bound().label(), p.bound().kind());
      env.emplace_back(p.bound(), b);
      Process body = freshen(p.body(), env);
      env.pop_back();
      return Process::restrict(b, std::move(body));
    }
    case Process::Kind::parallel:
      return Process::parallel(freshen(p.left(), env), freshen(p.right(), env));
    case Process::Kind::choice:
      return Process::choice(freshen(p.left(), env), freshen(p.right(), env));
    case Process::Kind::replication:
      return Process::replicate(freshen(p.body(), env));
  }
  return p;
}

}  // namespace

Process freshen_binders(const Process& p) {
  Subst env;
  return freshen(p, env);
}

//----------------------------------------------------------------------------

namespace {

struct KeyWriter {
  const std::function<std::string(const Name&)>* free_name = nullptr;
  std::vector<Name> env;
  std::string out;

  void name(const Name& n) {
    for (std::size_t i = env.size(); i-- > 0;) {
      if (env[i] == n) {
        out += '%';
        out += std::to_string(i);
        return;
      }
    }
    if (free_name) {
      out += (*free_name)(n);
    } else {
      out += n.label();
      if (!n.is_global()) {
        out += '#';
        out += std::to_string(n.id());
      }
    }
  }

  void term(const Term& t) {
    if (auto n = as_name(t)) {
      name(*n);
    } else if (auto v = as_variable(t)) {
      out += '@';
      out += v->label;
    } else {
      out += '[';
      const auto& c = std::get<ClockLiteral>(t).counters;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(c[i]);
      }
      out += ']';
    }
  }

  void terms(const std::vector<Term>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += ',';
      term(ts[i]);
    }
  }

  void channel(const ChannelId& c) {
    name(c.base);
    if (c.endpoints) {
      out += "^{";
      term(c.endpoints->first);
      out += ',';
      term(c.endpoints->second);
      out += '}';
    }
  }

  void process(const Process& p) {
    switch (p.kind()) {
      case Process::Kind::inaction: out += '0'; return;
      case Process::Kind::hole: out += "[]"; return;
      case Process::Kind::send:
        out += 'S';
        channel(p.channel());
        out += '(';
        terms(p.terms());
        out += ").";
        process(p.body());
        return;
      case Process::Kind::receive: {
        out += 'R';
        channel(p.channel());
        out += '<';
        out += std::to_string(p.slots().size());
        out += ">.";
        for (const auto& s : p.slots()) env.push_back(s);
        process(p.body());
        env.resize(env.size() - p.slots().size());
        return;
      }
      case Process::Kind::restriction:
        out += "N.";
        env.push_back(p.bound());
        process(p.body());
        env.pop_back();
        return;
      case Process::Kind::parallel:
      case Process::Kind::choice:
        out += p.is(Process::Kind::parallel) ? "P(" : "Q(";
        process(p.left());
        out += p.is(Process::Kind::parallel) ? '|' : '+';
        process(p.right());
        out += ')';
        return;
      case Process::Kind::replication:
        out += '!';
        process(p.body());
        return;
      case Process::Kind::match:
        out += "M[";
        term(p.terms()[0]);
        out += '=';
        term(p.terms()[1]);
        out += "].";
        process(p.body());
        return;
      case Process::Kind::call:
        out += 'C';
        out += symbol_name(p.symbol());
        out += '(';
        terms(p.terms());
        out += ").";
        process(p.body());
        return;
    }
  }
};

}  // namespace

std::string canonical_key(const Process& p) {
  KeyWriter w;
  w.process(p);
  return std::move(w.out);
}

std::string canonical_key(const Process& p, const std::function<std::string(const Name&)>& free_name) {
  KeyWriter w;
  w.free_name = &free_name;
  w.process(p);
  return std::move(w.out);
}

bool alpha_equivalent(const Process& p, const Process& q) { return canonical_key(p) == canonical_key(q); }

std::size_t count_holes(const Process& p) {
  if (p.is(Process::Kind::hole)) return 1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < p.child_count(); ++i) n += count_holes(p.child(i));
  return n;
}

std::size_t term_size(const Process& p) {
  std::size_t n = 1;
  for (std::size_t i = 0; i < p.child_count(); ++i) n += term_size(p.child(i));
  return n;
}

std::size_t term_depth(const Process& p) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < p.child_count(); ++i) d = std::max(d, term_depth(p.child(i)));
  return d + 1;
}

}  // namespace picsif
