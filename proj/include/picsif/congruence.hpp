#pragma once

// Structural congruence: the eleven rewrite rows, context holes, a logged
// normalizer and the congruence decision procedure built on it.
//
//   row  left                  right
//    1   [x=x] P               P
//    2   M1 + (M2 + M3)        (M1 + M2) + M3
//    3   M1 + M2               M2 + M1
//    4   M + 0                 M
//    5   P1 | (P2 | P3)        (P1 | P2) | P3
//    6   P1 | P2               P2 | P1
//    7   P | 0                 P
//    8   new z. new w. P       new w. new z. P
//    9   new z. 0              0
//   10   new z. (P1 | P2)      P1 | new z. P2        z not free in P1
//   11   rep P                 P | rep P

#include <optional>
#include <string>
#include <vector>

#include "picsif/term.hpp"

namespace picsif {

/// Child indices from the root; see Process::child.
using Path = std::vector<std::size_t>;

std::string format_path(const Path& p);  // "root" or "1.0.2"
Path parse_path(const std::string& s);

enum class Direction { left_to_right, right_to_left };

struct RewriteStep {
  int axiom = 1;
  Path path;
  Direction direction = Direction::left_to_right;
  /// The term a right-to-left step has to invent: the restricted name for
  /// row 9, the matched term for row 1. Left-to-right steps of those rows
  /// record the term they erase so the step can be inverted.
  std::optional<Term> witness;
  /// For a row-1 witness that is a bound name: how many binders up from the
  /// rewritten position it is bound (0 is the innermost). Replay resolves it
  /// against the term at hand, so the step survives alpha-renaming.
  std::optional<std::size_t> binder;

  std::string str() const;  // step <row> at <path> <lr|rl> [witness[^binder]]
};

RewriteStep parse_step(const std::string& line);
RewriteStep invert(const RewriteStep& s);

struct CongruenceProof {
  Process start;
  std::vector<RewriteStep> steps;
  Process end;

  /// Replays the steps from `start`; throws on a mismatching step.
  Process replay() const;
  std::string str() const;
};

/// A congruence proof followed by turning an inaction into a hole and
/// plugging it, as in the signalgate authorization argument.
struct HoleProof {
  CongruenceProof expansion;
  Path hole;
  Process plug;
  Process result;

  Process replay() const;
  std::string str() const;
};

const Process& subterm(const Process& p, const Path& path);
Process replace_subterm(const Process& p, const Path& path, Process with);

/// Rewrites the subterm at `step.path` with one row of the table. Throws
/// PatternMismatch, SideConditionViolation or IndexOutOfRange.
Process apply_axiom(const Process& p, const RewriteStep& step);

/// Replaces the inaction at `path` by a hole.
Process make_hole(const Process& p, const Path& path);

/// Plugs `q` into the only hole of `context`. Free names of `q` whose label
/// matches a binder enclosing the hole are captured by that binder.
Process insert_into_hole(const Process& context, const Process& q);

/// Canonical representative of the congruence class (replication folded).
Process normalize(const Process& p);
/// Same, also returning the proof from (an alpha-variant of) `p` to it.
CongruenceProof normalize_with_proof(const Process& p);

bool congruent(const Process& p, const Process& q);
std::optional<CongruenceProof> congruence_proof(const Process& p, const Process& q);

/// The phone tunnel pair expanded by rows 7 and 9, then the Signal request
/// plugged into the hole left under the new name.
HoleProof signalgate_authz_proof();

}  // namespace picsif
