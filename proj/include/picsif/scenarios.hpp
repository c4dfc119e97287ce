#pragma once

// The bundled actors and the two bundled configurations.

#include <string>
#include <vector>

#include "picsif/semantics.hpp"
#include "picsif/surface.hpp"
#include "picsif/term.hpp"

namespace picsif {

/// The SCIF operator: init, internal, memory, send, receive.
Process build_so();
Process build_so(const Variable& self);

/// An honest actor: the operator's five processes plus the forward to the SO.
Process build_alice();
Process build_alice(const Variable& self);

/// Who an adversary is and what its phone does.
struct AdversaryRole {
  Variable self;
  Variable scif;   // the SCIF-cleared computer
  Variable phone;  // the personal Signal app
  Variable peer;   // the other adversary
  Variable journalist;
  bool requester = true;  // asks Signal for channels; otherwise receives them
};

/// `A | B`: an honest actor plus the tunnel to a phone. The phone's third
/// component is a restriction over a hole, filled with the Signal requests
/// (requester) or the recipient side (otherwise).
Process build_adversary(const AdversaryRole& role);
Process build_adversary(const Variable& self);

/// The phone context with the hole left open.
Process build_phone_context(const AdversaryRole& role);
Process build_phone_fill(const AdversaryRole& role);

Process build_journalist();
Process build_signal_backend();
Process build_signal_delete();

struct ScenarioBundle {
  std::string name;
  ScenarioFile file;
  std::string expected;  // accountable | auth-z-violated | auth-n-violated | both

  ScenarioState state(std::optional<int> fuel = std::nullopt) const { return ScenarioState::load(file, fuel); }
};

ScenarioBundle signalgate_scenario();
ScenarioBundle honest_scenario(int n);

/// Every bundle shipped under `scenarios/`, with its file name.
std::vector<std::pair<std::string, ScenarioBundle>> bundled_scenarios();
/// Looks a bundle up by name (`signalgate`, `honest2`, `honest<N>`).
ScenarioBundle bundle_by_name(const std::string& name);

}  // namespace picsif
