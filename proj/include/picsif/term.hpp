#pragma once

// Abstract syntax of the applied pi-calculus fragment used to model the SCIF:
// names, identity variables, directed channels, and process terms.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace picsif {

enum class NameKind { channel, message };

/// A channel or message name.
///
/// Names carry a freshness id. Id 0 is reserved for free, configuration-level
/// names (`a`, `tr`, `sigr`, ...) which are identified by their label. Every
/// binder (restriction or receive slot) gets a unique non-zero id, and two
/// such names are the same name iff their ids agree. Names minted while a
/// scenario runs use ids at or above `kRuntimeIdBase`.
class Name {
 public:
  static constexpr std::uint64_t kRuntimeIdBase = std::uint64_t{1} << 40;

  Name() = default;
  explicit Name(std::string label, NameKind kind = NameKind::message, std::uint64_t id = 0);

  /// A binder name with a process-wide unique id.
  static Name fresh(std::string label, NameKind kind = NameKind::message);
  /// A name minted by the reduction engine; `serial` comes from the scenario
  /// state's freshness counter so traces stay deterministic.
  static Name minted(std::string label, NameKind kind, std::uint64_t serial);

  const std::string& label() const { return label_; }
  NameKind kind() const { return kind_; }
  std::uint64_t id() const { return id_; }
  bool is_global() const { return id_ == 0; }
  bool is_minted() const { return id_ >= kRuntimeIdBase; }
  std::uint64_t minted_serial() const { return is_minted() ? id_ - kRuntimeIdBase : 0; }

  Name with_kind(NameKind k) const;
  /// Label as it appears in traces: minted names print as `label~serial`.
  std::string display() const;

  friend bool operator==(const Name& a, const Name& b) {
    return a.id_ == b.id_ && (a.id_ != 0 || a.label_ == b.label_);
  }
  friend bool operator!=(const Name& a, const Name& b) { return !(a == b); }
  friend bool operator<(const Name& a, const Name& b) {
    if (a.id_ != b.id_) return a.id_ < b.id_;
    return a.id_ == 0 && a.label_ < b.label_;
  }

 private:
  std::string label_;
  NameKind kind_ = NameKind::message;
  std::uint64_t id_ = 0;
};

/// An actor's immutable identity (`i`, `jd`, `sig`, ...). Never bound, never
/// substituted by communication.
struct Variable {
  std::string label;

  friend bool operator==(const Variable& a, const Variable& b) { return a.label == b.label; }
  friend bool operator!=(const Variable& a, const Variable& b) { return !(a == b); }
  friend bool operator<(const Variable& a, const Variable& b) { return a.label < b.label; }
};

/// A vector-clock value carried as a literal once a list name is evaluated.
struct ClockLiteral {
  std::vector<std::uint64_t> counters;

  friend bool operator==(const ClockLiteral& a, const ClockLiteral& b) {
    return a.counters == b.counters;
  }
};

using Term = std::variant<Name, Variable, ClockLiteral>;

bool terms_equal(const Term& a, const Term& b);
const Name* as_name(const Term& t);
const Variable* as_variable(const Term& t);

/// A channel, optionally directed: with endpoints (from, to) only `from` may
/// send and only `to` may receive. Endpoints are identity variables, or names
/// when they sit in a receive slot that will later carry an identity.
struct ChannelId {
  Name base;
  std::optional<std::pair<Term, Term>> endpoints;

  bool directed() const { return endpoints.has_value(); }
};

bool channels_equal(const ChannelId& a, const ChannelId& b);

enum class FunctionSymbol { IncEle, MaxVec, Delete };

const char* symbol_name(FunctionSymbol s);
std::optional<FunctionSymbol> symbol_from_name(const std::string& s);
std::size_t symbol_arity(FunctionSymbol s);

/// Immutable process term. Copies share structure.
class Process {
 public:
  enum class Kind { inaction, receive, send, restriction, parallel, choice, replication, match, call, hole };

  Process();  // inaction

  static Process inaction();
  static Process hole();
  static Process send(ChannelId channel, std::vector<Term> payload, Process cont = Process());
  static Process receive(ChannelId channel, std::vector<Name> slots, Process cont = Process());
  static Process restrict(Name fresh, Process body);
  static Process parallel(Process left, Process right);
  static Process choice(Process left, Process right);
  static Process replicate(Process body);
  static Process match(Term lhs, Term rhs, Process cont);
  static Process call(FunctionSymbol symbol, std::vector<Term> args, Process cont = Process());

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }

  const ChannelId& channel() const;        // send, receive
  const std::vector<Term>& terms() const;  // send payload, call args, match {lhs, rhs}
  const std::vector<Name>& slots() const;  // receive
  const Name& bound() const;               // restriction
  FunctionSymbol symbol() const;           // call

  /// Continuations, bodies and operands, in a fixed order: the single child
  /// of prefixes/restriction/replication, or (left, right) of | and +.
  std::size_t child_count() const;
  const Process& child(std::size_t i) const;
  Process with_child(std::size_t i, Process c) const;

  const Process& left() const { return child(0); }
  const Process& right() const { return child(1); }
  const Process& body() const { return child(0); }

  /// Source position of the node (1-based); 0 for synthesized terms.
  std::uint32_t line() const;
  std::uint32_t column() const;
  Process located(std::uint32_t line, std::uint32_t column) const;

  /// Node identity, used only for caching.
  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Names occurring free in a term.
std::set<Name> term_names(const Term& t);
std::set<Name> free_names(const Process& p);
bool occurs_free(const Name& n, const Process& p);

/// Capture-avoiding substitution of every free occurrence of `replace`.
Process substitute(const Process& p, const Name& replace, const Term& with);
Process substitute_all(const Process& p, const std::vector<std::pair<Name, Term>>& subst);

/// Renames every binder in `p` to a brand-new name (same label and kind).
Process freshen_binders(const Process& p);

/// Alpha-invariant structural key: bound names are replaced by binder depth.
/// Two terms are alpha-equivalent iff their keys coincide.
std::string canonical_key(const Process& p);
/// Same, with free names rendered by `free_name` instead of their labels.
std::string canonical_key(const Process& p, const std::function<std::string(const Name&)>& free_name);
bool alpha_equivalent(const Process& p, const Process& q);

std::size_t count_holes(const Process& p);
std::size_t term_size(const Process& p);
std::size_t term_depth(const Process& p);

}  // namespace picsif
