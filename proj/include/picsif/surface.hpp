#pragma once

// Textual scenario language (`.scif`) and the pretty-printer for terms.
//
//   scenario signalgate;
//   expect both;
//   actor U as u {
//     rep recv a<z>
//     | rep new x. send b(x)
//   }
//   authorize {
//     authenticated: so, alice;
//     channels: tr, cm;
//     unauthorized: a, b;
//   }
//   explore { depth: 12; fuel: 3; }
//
// Process grammar, loosest first: `P + Q`, then `P | Q`, then prefixes.
//   0 | [] | { P } | ( P )
//   send c(t, ...)[. P]     recv c<x, ...>[. P]     call IncEle(t, t)[. P]
//   new x. P                rep P                   match [t = t]. P
// Channels are `c` or directed `c^{from,to}`. Payload terms are names,
// identities written `@i`, or clock literals `[1,0,2]`. `#` starts a comment.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "picsif/term.hpp"

namespace picsif {

struct SourceSpan {
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

struct Diagnostic {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;

  /// `file:line:col: message`
  std::string str() const;
};

struct ActorDecl {
  std::string name;
  std::vector<Variable> identities;  // first is the actor's own identity
  Process process;
  SourceSpan span;
};

struct RegistryDecl {
  std::vector<Variable> authenticated;
  std::vector<ChannelId> authorized;
  std::vector<ChannelId> unauthorized;
};

struct ExplorationDecl {
  int depth = 12;
  int fuel = 3;
};

struct ScenarioFile {
  std::string name;
  std::string expect;  // accountable | auth-z-violated | auth-n-violated | both
  std::vector<ActorDecl> actors;
  RegistryDecl registry;
  std::optional<ExplorationDecl> exploration;
};

struct ScenarioParse {
  std::optional<ScenarioFile> scenario;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return scenario.has_value() && diagnostics.empty(); }
};

struct ProcessParse {
  std::optional<Process> process;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return process.has_value() && diagnostics.empty(); }
};

ScenarioParse parse_scenario(std::string_view text, const std::string& file = "<input>");
ProcessParse parse_process(std::string_view text, const std::string& file = "<input>");

/// Reads and parses a file; an unreadable file yields a diagnostic.
ScenarioParse parse_scenario_file(const std::string& path);

std::string pretty(const Process& p);
std::string pretty(const Term& t);
std::string pretty(const ChannelId& c);
std::string pretty(const ScenarioFile& s);

/// Marks every occurrence of a name used as a channel subject as a channel.
Process infer_name_kinds(const Process& p);

/// Same actors, identities, registry and alpha-equivalent processes.
bool scenarios_equivalent(const ScenarioFile& a, const ScenarioFile& b);

}  // namespace picsif
