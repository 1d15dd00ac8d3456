"""Decisive points and the two competing prolongation rules.

A point on the surface characteristic ``s -> (q0, p0 + s b)`` through the
impact point is *decisive* when it has the impact energy under ``H-`` and
``X-`` points back into the closed minus side, or it has that energy under
``H+`` and ``X+`` points into the closed plus side.

:func:`prolong_vinogradov` starts a trajectory at every decisive point.
:func:`prolong_modified` starts exactly one, at the end of the directed jump
characteristic, and checks that this point is indeed decisive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..dynamics import ArcKind, IntegratorConfig, Trajectory, integrate_smooth
from ..errors import DishamError, GrazingContact
from ..geometry import ExtendedPhasePoint, PhasePoint, normal_velocity, pairing
from ..hamiltonian import ConstantPotential, DiscontinuousPair, NaturalHamiltonian
from ..homogeneous import EPS_REGION
from .jump import EPS_GRAZE, ImpactState, OutcomeKind, TransitionOutcome, _jump_samples, jump_arc

__all__ = [
    "DecisiveBranch",
    "DecisivePoint",
    "decisive_points",
    "prolong_vinogradov",
    "prolong_modified",
]


class DecisiveBranch(enum.Enum):
    IN_POINT_H_MINUS = "IN_POINT_H_MINUS"
    IN_POINT_H_PLUS = "IN_POINT_H_PLUS"


@dataclass(frozen=True, eq=False)
class DecisivePoint:
    point: PhasePoint
    branch: DecisiveBranch
    s: float


def _step_setting(pair: DiscontinuousPair):
    """``(mass, U_minus, U_plus)`` if ``pair`` is a constant potential step."""
    hm, hp = pair.h_minus, pair.h_plus
    ok = (
        isinstance(hm, NaturalHamiltonian)
        and isinstance(hp, NaturalHamiltonian)
        and isinstance(hm.potential, ConstantPotential)
        and isinstance(hp.potential, ConstantPotential)
        and hm.mass == hp.mass
        and np.array_equal(hm.space.g, hp.space.g)
        and pair.surface.is_configuration_only
    )
    if not ok:
        return None
    return hm.mass, hm.potential.level, hp.potential.level


def decisive_points(pair: DiscontinuousPair, impact: ImpactState) -> list:
    """All decisive points for an impact from the minus side.

    Only the setting of equal kinetic terms and constant potentials on a
    configuration surface is supported; there the energy conditions are
    quadratics in ``s``.

    Raises:
        ValueError: unsupported pair, or an impact that is not from the minus
            side moving toward the surface.
    """
    setting = _step_setting(pair)
    if setting is None:
        raise ValueError(
            "decisive points need natural Hamiltonians with equal kinetic terms, "
            "constant potentials and a configuration surface"
        )
    if impact.incoming_side != "MINUS":
        raise ValueError("decisive points are defined for impacts from the minus side")
    m, U_minus, U_plus = setting
    space = pair.surface.space
    b = pair.surface.b
    q0, p0 = impact.x.q, impact.x.p
    nu = pairing(b, p0, space)
    if not nu > 0.0:
        raise ValueError("impact momentum does not point toward the surface")

    points = []
    branches = (
        (DecisiveBranch.IN_POINT_H_MINUS, pair.h_minus, 0.0, -1.0),
        (DecisiveBranch.IN_POINT_H_PLUS, pair.h_plus, U_plus - U_minus, 1.0),
    )
    for branch, H, dU, inward in branches:
        # s**2 + 2 s nu + 2 m dU = 0
        disc = nu * nu - 2.0 * m * dU
        if disc / (2.0 * m) < -EPS_GRAZE * max(1.0, abs(dU)):
            continue
        if abs(disc) / (2.0 * m) <= EPS_GRAZE * max(1.0, abs(dU)):
            roots = [-nu]
        else:
            root = math.sqrt(disc)
            roots = [-nu - root, -nu + root]
        for s in roots:
            p1 = p0 + s * b
            v = normal_velocity(pair.surface, H.grad_q(q0, p1), H.grad_p(q0, p1))
            # in-point: X points into the closed side (tangent allowed)
            if v * inward >= -EPS_REGION * max(1.0, abs(nu)):
                points.append(DecisivePoint(PhasePoint(q0.copy(), p1), branch, s))
    return points


def _gamma_arc(impact: ImpactState, b, s1: float, samples: int = 33):
    """Segment of ``s -> (q0, p0 + s b)`` from the impact to ``s1``, parameterized by ``|s|``."""
    x = impact.x
    direction = np.sign(s1) * b
    params = np.linspace(0.0, abs(s1), samples)
    return _jump_samples(x.q, x.p, x.t, x.e, np.zeros_like(b), direction, params)


def _continue_from(H, point: ExtendedPhasePoint, t_end, cfg, kind, lead=None) -> Trajectory:
    arc = integrate_smooth(H, point, t_end, cfg, kind=kind)
    arcs = [arc] if lead is None else [lead, arc]
    return Trajectory(arcs=arcs)


def prolong_vinogradov(
    pair: DiscontinuousPair,
    impact: ImpactState,
    t_end: float,
    cfg: IntegratorConfig | None = None,
) -> list:
    """One prolongation per decisive point, integrated up to ``t_end``.

    A prolongation opens with the segment of the surface characteristic that
    leads from the impact to its decisive point (omitted when that point is
    the impact itself), so it is continuous in extended phase space.  Each
    trajectory's ``branch`` names the decisive branch and
    ``meta["decisive_point"]`` holds the point itself.
    """
    out = []
    for dp in decisive_points(pair, impact):
        if dp.branch is DecisiveBranch.IN_POINT_H_MINUS:
            H, kind = pair.h_minus, ArcKind.SMOOTH_MINUS
        else:
            H, kind = pair.h_plus, ArcKind.SMOOTH_PLUS
        lead = None
        if dp.s != 0.0:
            lead = _gamma_arc(impact, pair.surface.b, dp.s)
            lead.states[-1, impact.x.n : 2 * impact.x.n] = dp.point.p
        start = ExtendedPhasePoint(dp.point.q, dp.point.p, impact.x.t, impact.x.e)
        traj = _continue_from(H, start, t_end, cfg, kind, lead)
        traj.label = "vinogradov"
        traj.branch = dp.branch.value
        traj.meta["decisive_point"] = dp
        out.append(traj)
    return out


def _zero_jump(impact: ImpactState) -> TransitionOutcome:
    x = impact.x
    n = x.n
    arc = _jump_samples(x.q, x.p, x.t, x.e, np.zeros(n), np.zeros(n), [0.0])
    side = "PLUS" if impact.incoming_side == "MINUS" else "MINUS"
    return TransitionOutcome(OutcomeKind.TRANSMITTED, x, 0.0, arc, side)


def select_outcome(pair: DiscontinuousPair, impact: ImpactState, **kwargs) -> TransitionOutcome:
    """Jump characteristic outcome, or a zero-length transmission when ``H+ == H-``."""
    x = impact.x
    if abs(pair.jump(x.q, x.p)) <= EPS_REGION:
        impact.validate(pair, kwargs.get("energy_tol", EPS_REGION))
        return _zero_jump(impact)
    return jump_arc(pair, impact, **kwargs)


def prolong_modified(
    pair: DiscontinuousPair,
    impact: ImpactState,
    t_end: float,
    cfg: IntegratorConfig | None = None,
) -> Trajectory:
    """Single prolongation selected by the directed jump characteristic.

    The trajectory holds the jump arc (when it has positive length) and the
    smooth continuation.  For constant potential steps the selected point is
    checked against :func:`decisive_points`.

    Raises:
        GrazingContact: the jump ends tangentially.
    """
    outcome = select_outcome(pair, impact)
    if outcome.kind is OutcomeKind.GRAZING:
        raise GrazingContact(
            "jump characteristic ends tangentially", state=outcome.terminal
        )
    branch = (
        DecisiveBranch.IN_POINT_H_MINUS
        if outcome.exit_side == "MINUS"
        else DecisiveBranch.IN_POINT_H_PLUS
    )
    if _step_setting(pair) is not None and impact.incoming_side == "MINUS":
        members = [
            dp
            for dp in decisive_points(pair, impact)
            if dp.branch is branch
            and np.max(np.abs(dp.point.p - outcome.terminal.p)) <= 1e-9
        ]
        if not members:
            raise DishamError("jump characteristic ended at a point that is not decisive")

    H = pair.side(outcome.exit_side)
    kind = ArcKind.SMOOTH_MINUS if outcome.exit_side == "MINUS" else ArcKind.SMOOTH_PLUS
    continuation = integrate_smooth(H, outcome.terminal, t_end, cfg, kind=kind)
    arcs = [outcome.jump_arc] if len(outcome.jump_arc) > 1 else []
    traj = Trajectory(arcs=arcs + [continuation], label="modified", branch=branch.value)
    traj.meta["outcome"] = outcome
    return traj
