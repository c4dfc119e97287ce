"""Pi-calculus model of SCIF accountability: scenarios, search and audit."""

from ._core import (
    EnumerationCapExceeded,
    Error,
    FormatError,
    ReplayDivergence,
    State,
    alpha_equivalent,
    congruent,
    explore,
    happened_before,
    inc_ele,
    load,
    max_vec,
    normalize,
    pretty,
    replay,
    run,
    scenario_text,
    scenarios,
    signalgate_proof,
)

__all__ = [
    "EnumerationCapExceeded",
    "Error",
    "FormatError",
    "ReplayDivergence",
    "State",
    "alpha_equivalent",
    "congruent",
    "explore",
    "happened_before",
    "inc_ele",
    "load",
    "max_vec",
    "normalize",
    "pretty",
    "replay",
    "run",
    "scenario_text",
    "scenarios",
    "signalgate_proof",
]
