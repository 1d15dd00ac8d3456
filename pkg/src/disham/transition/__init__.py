"""Zero-width transition rules at a Hamiltonian discontinuity."""

from .closed_form import cascade, step_closed_form
from .decisive import (
    DecisiveBranch,
    DecisivePoint,
    decisive_points,
    prolong_modified,
    prolong_vinogradov,
    select_outcome,
)
from .jump import EPS_GRAZE, ImpactState, OutcomeKind, TransitionOutcome, jump_arc, make_impact
from .limit import simulate_limit_scenario

__all__ = [
    "EPS_GRAZE",
    "OutcomeKind",
    "ImpactState",
    "TransitionOutcome",
    "DecisiveBranch",
    "DecisivePoint",
    "make_impact",
    "jump_arc",
    "step_closed_form",
    "cascade",
    "decisive_points",
    "prolong_vinogradov",
    "prolong_modified",
    "select_outcome",
    "simulate_limit_scenario",
]
