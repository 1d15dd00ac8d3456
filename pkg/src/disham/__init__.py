"""Simulation of Hamiltonian trajectories across discontinuous Hamiltonians.

Two pictures of the same physics are provided.  In the smooth picture the
jump between ``H-`` and ``H+`` is spread over a thin layer of width ``delta``
and Hamilton's equations are integrated through it
(:func:`simulate_smooth_scenario`).  In the limit picture the layer has zero
width and the trajectory continues along jump characteristics on the
discontinuity surface (:func:`simulate_limit_scenario`).
"""

from .dynamics import (
    ArcKind,
    IntegratorConfig,
    ParamKind,
    SampledArc,
    Trajectory,
    detect_crossing,
    integrate_layer,
    integrate_smooth,
    simulate_smooth_scenario,
)
from .errors import (
    BandViolation,
    DegenerateDiscontinuity,
    DishamError,
    GrazingContact,
    NoCrossing,
    ScenarioError,
    StepSizeUnderflow,
    TrappedInLayer,
    UnboundedCharacteristic,
)
from .geometry import (
    ExtendedPhasePoint,
    MetricSpace,
    PhaseHyperplane,
    PhasePoint,
    configuration_surface,
    eval_A,
    momentum_split,
    normalize_surface,
    pairing,
)
from .hamiltonian import (
    ConstantPotential,
    DiscontinuityStack,
    DiscontinuousPair,
    HarmonicPotential,
    MollifiedHamiltonian,
    NaturalHamiltonian,
    StepChainHamiltonian,
    StepChainPotential,
    constant_step_pair,
)
from .mollifier import StepProfile, chi, chi_step, dchi, dchi_step, dphi, phi
from .scenario import Scenario, load_scenario, parse_scenario
from .transition import (
    OutcomeKind,
    cascade,
    decisive_points,
    jump_arc,
    make_impact,
    prolong_modified,
    prolong_vinogradov,
    simulate_limit_scenario,
    step_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "ArcKind",
    "IntegratorConfig",
    "ParamKind",
    "SampledArc",
    "Trajectory",
    "detect_crossing",
    "integrate_layer",
    "integrate_smooth",
    "simulate_smooth_scenario",
    "BandViolation",
    "DegenerateDiscontinuity",
    "DishamError",
    "GrazingContact",
    "NoCrossing",
    "ScenarioError",
    "StepSizeUnderflow",
    "TrappedInLayer",
    "UnboundedCharacteristic",
    "ExtendedPhasePoint",
    "MetricSpace",
    "PhaseHyperplane",
    "PhasePoint",
    "configuration_surface",
    "eval_A",
    "momentum_split",
    "normalize_surface",
    "pairing",
    "ConstantPotential",
    "DiscontinuityStack",
    "DiscontinuousPair",
    "HarmonicPotential",
    "MollifiedHamiltonian",
    "NaturalHamiltonian",
    "StepChainHamiltonian",
    "StepChainPotential",
    "constant_step_pair",
    "StepProfile",
    "chi",
    "chi_step",
    "dchi",
    "dchi_step",
    "dphi",
    "phi",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "OutcomeKind",
    "cascade",
    "decisive_points",
    "jump_arc",
    "make_impact",
    "prolong_modified",
    "prolong_vinogradov",
    "simulate_limit_scenario",
    "step_closed_form",
]
