#include "picsif/congruence.hpp"

#include <algorithm>
#include <sstream>

#include "picsif/error.hpp"
#include "picsif/surface.hpp"
#include "picsif/vclock.hpp"

namespace picsif {

using K = Process::Kind;

std::string format_path(const Path& p) {
  if (p.empty()) return "root";
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(p[i]);
  }
  return s;
}

Path parse_path(const std::string& s) {
  if (s == "root") return {};
  Path out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw FormatError("bad path '" + s + "'");
    out.push_back(std::stoul(part));
  }
  return out;
}

std::string RewriteStep::str() const {
  std::string s = "step " + std::to_string(axiom) + " at " + format_path(path) +
                  (direction == Direction::left_to_right ? " lr" : " rl");
  if (witness) s += " " + pretty(*witness);
  if (binder) s += "^" + std::to_string(*binder);
  return s;
}

RewriteStep parse_step(const std::string& line) {
  std::istringstream in(line);
  std::string kw, at, dir, wit;
  RewriteStep s;
  if (!(in >> kw >> s.axiom >> at) || kw != "step" || at != "at") throw FormatError("bad step line: " + line);
  std::string path;
  if (!(in >> path >> dir)) throw FormatError("bad step line: " + line);
  s.path = parse_path(path);
  if (dir == "lr") {
    s.direction = Direction::left_to_right;
  } else if (dir == "rl") {
    s.direction = Direction::right_to_left;
  } else {
    throw FormatError("bad direction '" + dir + "'");
  }
  if (in >> wit) {
    if (auto caret = wit.find('^'); caret != std::string::npos && wit[0] != '[') {
      std::string depth = wit.substr(caret + 1);
      if (depth.empty() || depth.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("bad binder reference in: " + line);
      s.binder = std::stoul(depth);
      wit = wit.substr(0, caret);
    }
    if (wit[0] == '@') {
      s.witness = Variable{wit.substr(1)};
    } else if (wit[0] == '[') {
      s.witness = ClockLiteral{parse_clock(wit)};
    } else {
      s.witness = Name::fresh(wit);
    }
  }
  if (s.axiom < 1 || s.axiom > 11) throw FormatError("axiom index out of range in: " + line);
  return s;
}

RewriteStep invert(const RewriteStep& s) {
  RewriteStep r = s;
  r.direction = s.direction == Direction::left_to_right ? Direction::right_to_left : Direction::left_to_right;
  return r;
}

//----------------------------------------------------------------------------

const Process& subterm(const Process& p, const Path& path) {
  const Process* cur = &p;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= cur->child_count())
      throw IndexOutOfRange("path " + format_path(path) + " leaves the term at depth " + std::to_string(i));
    cur = &cur->child(path[i]);
  }
  return *cur;
}

namespace {

Process replace_from(const Process& p, const Path& path, std::size_t i, Process with) {
  if (i == path.size()) return with;
  if (path[i] >= p.child_count())
    throw IndexOutOfRange("path " + format_path(path) + " leaves the term at depth " + std::to_string(i));
  return p.with_child(path[i], replace_from(p.child(path[i]), path, i + 1, std::move(with)));
}

Process rewrite_here(const Process& p, const RewriteStep& s) {
  const bool lr = s.direction == Direction::left_to_right;
  const std::string where = format_path(s.path);
  auto mismatch = [&](const std::string& d) { return PatternMismatch(s.axiom, where, d); };
  auto need = [&](const Process& t, K k, const char* what) {
    if (!t.is(k)) throw mismatch(std::string("expected ") + what);
  };
  switch (s.axiom) {
    case 1:
      if (lr) {
        need(p, K::match, "a match");
        if (!terms_equal(p.terms()[0], p.terms()[1])) throw mismatch("match sides differ");
        return p.body();
      } else {
        if (!s.witness) throw mismatch("right-to-left needs the matched term");
        return Process::match(*s.witness, *s.witness, p);
      }
    case 2:
      if (lr) {
        need(p, K::choice, "a sum");
        need(p.right(), K::choice, "a sum on the right");
        return Process::choice(Process::choice(p.left(), p.right().left()), p.right().right());
      } else {
        need(p, K::choice, "a sum");
        need(p.left(), K::choice, "a sum on the left");
        return Process::choice(p.left().left(), Process::choice(p.left().right(), p.right()));
      }
    case 3:
      need(p, K::choice, "a sum");
      return Process::choice(p.right(), p.left());
    case 4:
      if (lr) {
        need(p, K::choice, "a sum");
        need(p.right(), K::inaction, "0 on the right");
        return p.left();
      }
      return Process::choice(p, Process::inaction());
    case 5:
      if (lr) {
        need(p, K::parallel, "a composition");
        need(p.right(), K::parallel, "a composition on the right");
        return Process::parallel(Process::parallel(p.left(), p.right().left()), p.right().right());
      } else {
        need(p, K::parallel, "a composition");
        need(p.left(), K::parallel, "a composition on the left");
        return Process::parallel(p.left().left(), Process::parallel(p.left().right(), p.right()));
      }
    case 6:
      need(p, K::parallel, "a composition");
      return Process::parallel(p.right(), p.left());
    case 7:
      if (lr) {
        need(p, K::parallel, "a composition");
        need(p.right(), K::inaction, "0 on the right");
        return p.left();
      }
      return Process::parallel(p, Process::inaction());
    case 8:
      need(p, K::restriction, "a restriction");
      need(p.body(), K::restriction, "a nested restriction");
      return Process::restrict(p.body().bound(), Process::restrict(p.bound(), p.body().body()));
    case 9:
      if (lr) {
        need(p, K::restriction, "a restriction");
        need(p.body(), K::inaction, "0 under the restriction");
        return Process::inaction();
      } else {
        need(p, K::inaction, "0");
        if (!s.witness || !as_name(*s.witness)) throw mismatch("right-to-left needs the restricted name");
        return Process::restrict(*as_name(*s.witness), p);
      }
    case 10:
      if (lr) {
        need(p, K::restriction, "a restriction");
        need(p.body(), K::parallel, "a composition under the restriction");
        const Name& z = p.bound();
        if (occurs_free(z, p.body().left()))
          throw SideConditionViolation("row 10 at " + where + ": " + z.label() + " is free in the left component");
        return Process::parallel(p.body().left(), Process::restrict(z, p.body().right()));
      } else {
        need(p, K::parallel, "a composition");
        need(p.right(), K::restriction, "a restriction on the right");
        const Name& z = p.right().bound();
        if (occurs_free(z, p.left()))
          throw SideConditionViolation("row 10 at " + where + ": " + z.label() + " is free in the left component");
        return Process::restrict(z, Process::parallel(p.left(), p.right().body()));
      }
    case 11:
      if (lr) {
        need(p, K::replication, "a replication");
        return Process::parallel(freshen_binders(p.body()), p);
      } else {
        need(p, K::parallel, "a composition");
        need(p.right(), K::replication, "a replication on the right");
        if (!alpha_equivalent(p.left(), p.right().body())) throw mismatch("left copy differs from the replicated body");
        return p.right();
      }
    default:
      throw mismatch("no such axiom");
  }
}

}  // namespace

Process replace_subterm(const Process& p, const Path& path, Process with) {
  return replace_from(p, path, 0, std::move(with));
}

namespace {

std::vector<Name> enclosing_binders(const Process& p, const Path& path) {
  std::vector<Name> out;
  const Process* cur = &p;
  for (std::size_t i : path) {
    if (cur->is(K::restriction)) out.push_back(cur->bound());
    if (cur->is(K::receive)) out.insert(out.end(), cur->slots().begin(), cur->slots().end());
    if (i >= cur->child_count()) break;
    cur = &cur->child(i);
  }
  return out;
}

}  // namespace

Process apply_axiom(const Process& p, const RewriteStep& step) {
  if (step.axiom < 1 || step.axiom > 11) throw PatternMismatch(step.axiom, format_path(step.path), "no such axiom");
  if (step.binder && step.axiom == 1 && step.direction == Direction::right_to_left) {
    auto env = enclosing_binders(p, step.path);
    if (*step.binder >= env.size())
      throw PatternMismatch(1, format_path(step.path), "binder reference leaves the term");
    RewriteStep resolved = step;
    resolved.witness = env[env.size() - 1 - *step.binder];
    return replace_subterm(p, step.path, rewrite_here(subterm(p, step.path), resolved));
  }
  return replace_subterm(p, step.path, rewrite_here(subterm(p, step.path), step));
}

Process make_hole(const Process& p, const Path& path) {
  if (!subterm(p, path).is(K::inaction)) throw HoleError("only an inaction can become a hole (at " + format_path(path) + ")");
  return replace_subterm(p, path, Process::hole());
}

namespace {

bool find_hole(const Process& p, Path& path, std::vector<Name>& binders) {
  if (p.is(K::hole)) return true;
  std::size_t pushed = 0;
  if (p.is(K::restriction)) {
    binders.push_back(p.bound());
    pushed = 1;
  } else if (p.is(K::receive)) {
    for (const auto& s : p.slots()) binders.push_back(s);
    pushed = p.slots().size();
  }
  for (std::size_t i = 0; i < p.child_count(); ++i) {
    path.push_back(i);
    if (find_hole(p.child(i), path, binders)) return true;
    path.pop_back();
  }
  binders.resize(binders.size() - pushed);
  return false;
}

}  // namespace

Process insert_into_hole(const Process& context, const Process& q) {
  std::size_t holes = count_holes(context);
  if (holes != 1) throw HoleError("context must contain exactly one hole, found " + std::to_string(holes));
  Path path;
  std::vector<Name> binders;
  find_hole(context, path, binders);
  std::vector<std::pair<Name, Term>> capture;
  for (const auto& n : free_names(q)) {
    if (!n.is_global()) continue;
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      if (it->label() == n.label()) {
        capture.emplace_back(n, *it);
        break;
      }
    }
  }
  return replace_subterm(context, path, capture.empty() ? q : substitute_all(q, capture));
}

//----------------------------------------------------------------------------
// Normalizer

namespace {

bool is_block(const Process& p) { return p.is(K::parallel) || p.is(K::restriction); }

Path join(const Path& a, const Path& b) {
  Path r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Path repeat(std::size_t child, std::size_t n) { return Path(n, child); }

// True when some binder id occurs twice or also occurs free.
bool needs_freshening(const Process& p) {
  std::set<Name> seen;
  bool clash = false;
  auto visit = [&](auto&& self, const Process& t) -> void {
    if (clash) return;
    auto bind = [&](const Name& n) {
      if (!seen.insert(n).second) clash = true;
    };
    if (t.is(K::restriction)) bind(t.bound());
    if (t.is(K::receive))
      for (const auto& s : t.slots()) bind(s);
    for (std::size_t i = 0; i < t.child_count(); ++i) self(self, t.child(i));
  };
  visit(visit, p);
  if (clash) return true;
  for (const auto& n : free_names(p))
    if (seen.count(n)) return true;
  return false;
}

class Normalizer {
 public:
  explicit Normalizer(std::vector<RewriteStep>* log) : log_(log) {}

  Process run(const Process& p) {
    std::vector<Name> env;
    env_ = &env;
    return norm(p, Path{}, env);
  }

 private:
  std::vector<RewriteStep>* log_;
  const std::vector<Name>* env_ = nullptr;

  // Rewrites the subterm `p` (which sits at `base` in the whole term).
  Process apply(const Process& p, const Path& base, int axiom, const Path& rel, Direction d,
                std::optional<Term> witness = std::nullopt) {
    RewriteStep s{axiom, rel, d, std::move(witness)};
    if (d == Direction::left_to_right && !s.witness) {
      const Process& at = subterm(p, rel);
      if (axiom == 9) s.witness = at.bound();
      if (axiom == 1) {
        s.witness = at.terms()[0];
        if (auto n = as_name(at.terms()[0])) {
          for (std::size_t k = env_->size(); k-- > 0;) {
            if ((*env_)[k] == *n) {
              s.binder = env_->size() - 1 - k;
              break;
            }
          }
        }
      }
    }
    Process out = apply_axiom(p, s);
    if (log_) {
      s.path = join(base, rel);
      log_->push_back(std::move(s));
    }
    return out;
  }

  // Sort keys: names of the block being ordered print as their position,
  // other enclosing binders anonymously, free names as themselves.
  static std::string render(const Name& n, const std::vector<Name>& env, const std::vector<Name>& local) {
    for (std::size_t k = 0; k < local.size(); ++k)
      if (local[k] == n) return "^" + std::to_string(k);
    for (const auto& e : env)
      if (e == n) return "^";
    if (n.is_global()) return n.label();
    return n.label() + "#" + std::to_string(n.id());
  }

  static std::string key(const Process& p, const std::vector<Name>& env, const std::vector<Name>& local = {}) {
    return canonical_key(p, [&](const Name& n) { return render(n, env, local); });
  }

  Process norm(const Process& p, const Path& at, std::vector<Name>& env) {
    switch (p.kind()) {
      case K::inaction:
      case K::hole:
        return p;
      case K::send:
      case K::call:
        return p.with_child(0, norm(p.body(), join(at, {0}), env));
      case K::receive: {
        env.insert(env.end(), p.slots().begin(), p.slots().end());
        Process body = norm(p.body(), join(at, {0}), env);
        env.resize(env.size() - p.slots().size());
        return p.with_child(0, body);
      }
      case K::replication:
        return p.with_child(0, norm(p.body(), join(at, {0}), env));
      case K::match: {
        Process out = p.with_child(0, norm(p.body(), join(at, {0}), env));
        if (terms_equal(p.terms()[0], p.terms()[1])) out = apply(out, at, 1, {}, Direction::left_to_right);
        return out;
      }
      case K::choice:
        return norm_choice(p, at, env);
      case K::parallel:
      case K::restriction:
        return norm_block(p, at, env);
    }
    return p;
  }

  //--------------------------------------------------------------------------
  // Right-nested chains of a binary operator: `op` is K::choice or K::parallel.

  struct Rows {
    int assoc, comm, unit;
  };
  static Rows rows(K op) { return op == K::choice ? Rows{2, 3, 4} : Rows{5, 6, 7}; }

  static std::vector<Process> chain_items(const Process& p, K op) {
    std::vector<Process> out;
    const Process* cur = &p;
    while (cur->is(op)) {
      out.push_back(cur->left());
      cur = &cur->right();
    }
    out.push_back(*cur);
    return out;
  }

  // Rebuilds a left-leaning tree into a right-nested chain.
  Process flatten(Process p, const Path& at, K op, const Path& node = {}) {
    Rows r = rows(op);
    Path cur = node;
    while (subterm(p, cur).is(op)) {
      while (subterm(p, cur).left().is(op)) p = apply(p, at, r.assoc, cur, Direction::right_to_left);
      cur.push_back(1);
    }
    return p;
  }

  // Swaps items i and i+1 of the chain rooted at `node`.
  Process swap_adjacent(Process p, const Path& at, K op, const Path& node, std::size_t i, std::size_t n) {
    Rows r = rows(op);
    Path here = join(node, repeat(1, i));
    if (i + 2 == n) return apply(p, at, r.comm, here, Direction::left_to_right);
    p = apply(p, at, r.assoc, here, Direction::left_to_right);
    p = apply(p, at, r.comm, join(here, {0}), Direction::left_to_right);
    return apply(p, at, r.assoc, here, Direction::right_to_left);
  }

  // Stable bubble sort of the chain at `node` by `rank`; returns the new term.
  template <typename Rank>
  Process sort_chain(Process p, const Path& at, K op, const Path& node, std::vector<Rank> ranks) {
    const std::size_t n = ranks.size();
    for (std::size_t pass = 0; pass + 1 < n; ++pass) {
      bool moved = false;
      for (std::size_t i = 0; i + 1 < n - pass; ++i) {
        if (ranks[i + 1] < ranks[i]) {
          p = swap_adjacent(std::move(p), at, op, node, i, n);
          std::swap(ranks[i], ranks[i + 1]);
          moved = true;
        }
      }
      if (!moved) break;
    }
    return p;
  }

  // Removes inaction items from the chain at `node` (they are moved last
  // and dropped with the unit row).
  Process drop_units(Process p, const Path& at, K op, const Path& node) {
    auto items = chain_items(subterm(p, node), op);
    if (items.size() < 2) return p;
    std::vector<int> zero;
    for (const auto& it : items) zero.push_back(it.is(K::inaction) ? 1 : 0);
    p = sort_chain(std::move(p), at, op, node, zero);
    std::size_t n = items.size();
    std::size_t zeros = std::count(zero.begin(), zero.end(), 1);
    for (std::size_t k = 0; k < zeros && n > 1; ++k, --n)
      p = apply(p, at, rows(op).unit, join(node, repeat(1, n - 2)), Direction::left_to_right);
    return p;
  }

  Process norm_choice(const Process& p0, const Path& at, std::vector<Name>& env) {
    Process p = norm_leaves(p0, at, env, K::choice, {});
    p = flatten(std::move(p), at, K::choice);
    p = drop_units(std::move(p), at, K::choice, {});
    if (!p.is(K::choice)) return p;
    std::vector<std::string> keys;
    for (const auto& it : chain_items(p, K::choice)) keys.push_back(key(it, env));
    return sort_chain(std::move(p), at, K::choice, {}, keys);
  }

  // Normalizes every maximal non-`op` subterm below `node` (for blocks, every
  // subterm that is neither a composition nor a restriction).
  Process norm_leaves(Process p, const Path& at, std::vector<Name>& env, K op, const Path& node) {
    const Process here = subterm(p, node);
    const bool inner = op == K::choice ? here.is(K::choice) : is_block(here);
    if (!inner) {
      Process n = norm(here, join(at, node), env);
      return replace_subterm(p, node, std::move(n));
    }
    if (here.is(K::restriction)) env.push_back(here.bound());
    for (std::size_t i = 0; i < here.child_count(); ++i) {
      Path child = node;
      child.push_back(i);
      p = norm_leaves(std::move(p), at, env, op, child);
    }
    if (subterm(p, node).is(K::restriction)) env.pop_back();
    return p;
  }

  // Pulls every restriction of the block at `node` to its top.
  Process extrude(Process p, const Path& at, const Path& node) {
    const Process here = subterm(p, node);
    if (here.is(K::restriction)) return extrude(std::move(p), at, join(node, {0}));
    if (!here.is(K::parallel)) return p;
    p = extrude(std::move(p), at, join(node, {0}));
    p = extrude(std::move(p), at, join(node, {1}));
    Path cur = node;
    while (subterm(p, cur).left().is(K::restriction)) {
      p = apply(p, at, 6, cur, Direction::left_to_right);
      p = apply(p, at, 10, cur, Direction::right_to_left);
      p = apply(p, at, 6, join(cur, {0}), Direction::left_to_right);
      cur.push_back(0);
    }
    while (subterm(p, cur).right().is(K::restriction)) {
      p = apply(p, at, 10, cur, Direction::right_to_left);
      cur.push_back(0);
    }
    return p;
  }

  static std::vector<Name> prefix_names(const Process& p) {
    std::vector<Name> out;
    const Process* cur = &p;
    while (cur->is(K::restriction)) {
      out.push_back(cur->bound());
      cur = &cur->body();
    }
    return out;
  }

  // Normalizes the components of a composition one by one, then folds
  // copies standing next to a replication of themselves into it.
  Process norm_components(Process p, const Path& at, std::vector<Name>& env) {
    p = flatten(std::move(p), at, K::parallel);
    auto items = chain_items(p, K::parallel);
    for (std::size_t i = 0; i < items.size(); ++i) {
      Path node = repeat(1, i);
      if (i + 1 < items.size()) node.push_back(0);
      p = replace_subterm(p, node, norm(items[i], join(at, node), env));
    }
    p = flatten(std::move(p), at, K::parallel);
    while (p.is(K::parallel) && absorb_copy(p, at)) {
    }
    return p;
  }

  // One row-11 contraction `B | rep B -> rep B`, where the components of B
  // may be spread over the chain. Returns false when none applies.
  bool absorb_copy(Process& p, const Path& at) {
    auto items = chain_items(p, K::parallel);
    std::vector<std::string> keys;
    for (const auto& it : items) keys.push_back(canonical_key(it));
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (!items[j].is(K::replication)) continue;
      auto parts = chain_items(items[j].body(), K::parallel);
      std::vector<std::size_t> rank(items.size(), parts.size() + 1);
      rank[j] = parts.size();
      bool all = true;
      for (std::size_t t = 0; t < parts.size() && all; ++t) {
        std::string want = canonical_key(parts[t]);
        bool found = false;
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (i == j || rank[i] <= parts.size() || keys[i] != want) continue;
          rank[i] = t;
          found = true;
          break;
        }
        all = found;
      }
      if (!all) continue;
      const std::size_t m = parts.size();
      p = sort_chain(std::move(p), at, K::parallel, {}, rank);
      for (std::size_t t = m - 1; t-- > 0;) p = apply(p, at, 5, repeat(1, t), Direction::left_to_right);
      if (items.size() == m + 1) {
        p = apply(p, at, 11, {}, Direction::right_to_left);
      } else {
        p = apply(p, at, 5, {}, Direction::left_to_right);
        p = apply(p, at, 11, {0}, Direction::right_to_left);
      }
      return true;
    }
    return false;
  }

  Process norm_block(const Process& p0, const Path& at, std::vector<Name>& env) {
    Process p = p0;
    if (p.is(K::restriction)) {
      env.push_back(p.bound());
      p = p.with_child(0, norm(p.body(), join(at, {0}), env));
      env.pop_back();
    } else {
      p = norm_components(std::move(p), at, env);
    }
    if (!is_block(p)) return p;
    p = extrude(std::move(p), at, {});

    std::vector<Name> names = prefix_names(p);
    Path chain_at = repeat(0, names.size());
    p = flatten(std::move(p), at, K::parallel, chain_at);
    p = drop_units(std::move(p), at, K::parallel, chain_at);

    // Drop names nobody uses.
    for (std::size_t i = names.size(); i-- > 0;) {
      const Process& body = subterm(p, repeat(0, names.size()));
      if (occurs_free(names[i], body)) continue;
      for (std::size_t j = i; j + 1 < names.size(); ++j) p = apply(p, at, 8, repeat(0, j), Direction::left_to_right);
      Path last = repeat(0, names.size() - 1);
      if (subterm(p, join(last, {0})).is(K::inaction)) {
        p = apply(p, at, 9, last, Direction::left_to_right);
      } else {
        p = apply(p, at, 7, join(last, {0}), Direction::right_to_left);
        p = apply(p, at, 10, last, Direction::left_to_right);
        p = apply(p, at, 9, join(last, {1}), Direction::left_to_right);
        p = apply(p, at, 7, last, Direction::left_to_right);
      }
      names.erase(names.begin() + static_cast<std::ptrdiff_t>(i));
    }
    if (names.empty()) return sort_top(std::move(p), at, env, {});

    // Order names: most users outermost, then by an alpha-invariant profile.
    const std::size_t k = names.size();
    std::vector<Process> items = chain_items(subterm(p, repeat(0, k)), K::parallel);
    std::set<Name> block(names.begin(), names.end());
    struct Rank {
      std::size_t users;
      std::vector<std::string> profile;
      bool operator<(const Rank& o) const { return users != o.users ? users > o.users : profile < o.profile; }
      bool operator==(const Rank& o) const { return users == o.users && profile == o.profile; }
    };
    std::vector<std::pair<Rank, Name>> ranked;
    for (const auto& z : names) {
      Rank r{0, {}};
      for (const auto& it : items) {
        if (!occurs_free(z, it)) continue;
        r.users++;
        r.profile.push_back(canonical_key(it, [&](const Name& n) {
          if (n == z) return std::string("*");
          if (block.count(n)) return std::string("?");
          return render(n, env, {});
        }));
      }
      std::sort(r.profile.begin(), r.profile.end());
      ranked.emplace_back(std::move(r), z);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Name> order;
    for (const auto& r : ranked) order.push_back(r.second);

    // Names with equal rank: try each arrangement, keep the smallest result.
    std::vector<std::pair<std::size_t, std::size_t>> ties;
    std::size_t arrangements = 1;
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i + 1;
      while (j < k && ranked[j].first == ranked[i].first) ++j;
      if (j - i > 1) {
        ties.emplace_back(i, j);
        for (std::size_t f = 2; f <= j - i; ++f) arrangements *= f;
      }
      i = j;
    }
    if (!ties.empty() && arrangements <= 120) {
      auto saved = log_;
      log_ = nullptr;
      std::vector<Name> best = order;
      std::string best_key = key(finish(p, at, env, names, order), env);
      std::vector<Name> cand = order;
      // Odometer over the permutations of each tie group.
      for (auto& t : ties) std::sort(cand.begin() + t.first, cand.begin() + t.second);
      while (true) {
        std::string ck = key(finish(p, at, env, names, cand), env);
        if (ck < best_key) {
          best_key = ck;
          best = cand;
        }
        std::size_t g = 0;
        for (; g < ties.size(); ++g)
          if (std::next_permutation(cand.begin() + ties[g].first, cand.begin() + ties[g].second)) break;
        if (g == ties.size()) break;
      }
      log_ = saved;
      order = best;
    }
    return finish(std::move(p), at, env, names, order);
  }

  // From `new names. chain`, reorders the names to `order` and narrows each
  // one over its users, innermost first.
  Process finish(Process p, const Path& at, const std::vector<Name>& env, std::vector<Name> names,
                 const std::vector<Name>& order) {
    const std::size_t k = names.size();
    std::vector<std::size_t> target;
    for (const auto& n : names) target.push_back(std::find(order.begin(), order.end(), n) - order.begin());
    for (std::size_t pass = 0; pass + 1 < k; ++pass) {
      for (std::size_t i = 0; i + 1 < k - pass; ++i) {
        if (target[i + 1] < target[i]) {
          p = apply(p, at, 8, repeat(0, i), Direction::left_to_right);
          std::swap(target[i], target[i + 1]);
          std::swap(names[i], names[i + 1]);
        }
      }
    }
    for (std::size_t i = k; i-- > 0;) {
      Path node = repeat(0, i);  // the restriction of names[i]
      Path body = join(node, {0});
      auto chain = chain_items(subterm(p, body), K::parallel);
      std::vector<int> uses;
      for (const auto& it : chain) uses.push_back(occurs_free(names[i], it) ? 1 : 0);
      p = sort_chain(std::move(p), at, K::parallel, body, uses);
      std::size_t outside = std::count(uses.begin(), uses.end(), 0);
      Path cur = node;
      for (std::size_t j = 0; j < outside; ++j) {
        p = apply(p, at, 10, cur, Direction::left_to_right);
        cur.push_back(1);
      }
      std::vector<Name> local(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(i + 1));
      p = sort_top(std::move(p), at, env, join(cur, {0}), local);
    }
    return sort_top(std::move(p), at, env, {});
  }

  Process sort_top(Process p, const Path& at, const std::vector<Name>& env, const Path& node,
                   const std::vector<Name>& local = {}) {
    const Process here = subterm(p, node);
    if (!here.is(K::parallel)) return p;
    std::vector<std::string> keys;
    for (const auto& it : chain_items(here, K::parallel)) keys.push_back(key(it, env, local));
    return sort_chain(std::move(p), at, K::parallel, node, keys);
  }
};

}  // namespace

Process normalize(const Process& p) {
  Process start = needs_freshening(p) ? freshen_binders(p) : p;
  return Normalizer(nullptr).run(start);
}

CongruenceProof normalize_with_proof(const Process& p) {
  CongruenceProof proof;
  proof.start = needs_freshening(p) ? freshen_binders(p) : p;
  proof.end = Normalizer(&proof.steps).run(proof.start);
  return proof;
}

bool congruent(const Process& p, const Process& q) { return alpha_equivalent(normalize(p), normalize(q)); }

std::optional<CongruenceProof> congruence_proof(const Process& p, const Process& q) {
  CongruenceProof fp = normalize_with_proof(p);
  CongruenceProof fq = normalize_with_proof(q);
  if (!alpha_equivalent(fp.end, fq.end)) return std::nullopt;
  CongruenceProof out;
  out.start = fp.start;
  out.steps = fp.steps;
  for (auto it = fq.steps.rbegin(); it != fq.steps.rend(); ++it) out.steps.push_back(invert(*it));
  out.end = out.replay();
  return out;
}

Process CongruenceProof::replay() const {
  Process cur = start;
  for (const auto& s : steps) cur = apply_axiom(cur, s);
  return cur;
}

std::string CongruenceProof::str() const {
  std::string s = "start " + pretty(start) + "\n";
  for (const auto& st : steps) s += st.str() + "\n";
  s += "end " + pretty(end) + "\n";
  return s;
}

Process HoleProof::replay() const {
  Process expanded = expansion.replay();
  return insert_into_hole(make_hole(expanded, hole), plug);
}

std::string HoleProof::str() const {
  std::string s = "start " + pretty(expansion.start) + "\n";
  for (const auto& st : expansion.steps) s += st.str() + "\n";
  s += "hole at " + format_path(hole) + "\n";
  s += "insert " + pretty(plug) + "\n";
  s += "end " + pretty(result) + "\n";
  return s;
}

HoleProof signalgate_authz_proof() {
  HoleProof h;
  auto start = parse_process("rep recv h^{s,p}<um> | rep send h^{p,s}(ue)");
  auto plug = parse_process("send sigr^{i,sig}(un, z)");
  h.expansion.start = *start.process;
  h.expansion.steps.push_back(RewriteStep{7, {}, Direction::right_to_left, std::nullopt});
  h.expansion.steps.push_back(RewriteStep{9, {1}, Direction::right_to_left, Name::fresh("un", NameKind::channel)});
  h.expansion.end = h.expansion.replay();
  h.hole = {1, 0};
  h.plug = *plug.process;
  h.result = h.replay();
  return h;
}

}  // namespace picsif
