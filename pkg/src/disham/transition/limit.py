"""Zero-width simulation: smooth arcs joined by jump characteristics.

Away from the surface the particle follows the flow of the Hamiltonian of its
region.  At the surface the trajectory continues along jump characteristics,
one per adjacent pair of a :class:`DiscontinuityStack`, until it leaves the
surface into the bottom or the top region.
"""

from __future__ import annotations

import numpy as np

from ..dynamics import (
    EPS_TRANSVERSAL,
    ArcKind,
    IntegratorConfig,
    MaxTimeExceeded,
    ParamKind,
    Trajectory,
    _arc_from,
    _check_on_shell,
    _flow,
    _surface_event,
    _transversality,
)
from ..errors import DishamError, GrazingContact, NoCrossing
from ..geometry import ExtendedPhasePoint, eval_A
from ..hamiltonian import DiscontinuityStack, DiscontinuousPair
from ..homogeneous import EPS_REGION
from .decisive import select_outcome
from .jump import ImpactState, OutcomeKind

__all__ = ["simulate_limit_scenario"]


def _impact_energy_tol(cfg: IntegratorConfig, e: float) -> float:
    # the smooth flow only conserves energy to its own tolerance
    return max(EPS_REGION, 10.0 * cfg.rel_tol * abs(e) + cfg.abs_tol)


def _resolve_impact(stack: DiscontinuityStack, x: ExtendedPhasePoint, region: int, cfg, trajectory):
    """Run the chain of jumps at one impact; returns ``(exit_state, exit_region)``."""
    top = stack.depth
    heading = 1 if region == 0 else -1
    tol = _impact_energy_tol(cfg, x.e)
    for _ in range(4 * (top + 1)):
        if (heading > 0 and region == top) or (heading < 0 and region == 0):
            return x, region
        if heading > 0:
            pair, incoming = stack.pair(region), "MINUS"
        else:
            pair, incoming = stack.pair(region - 1), "PLUS"
        try:
            outcome = select_outcome(pair, ImpactState(x, incoming), energy_tol=tol)
        except DishamError as exc:
            if exc.partial is not None and len(exc.partial) > 1:
                trajectory.append(exc.partial)
            exc.partial = trajectory
            raise
        if len(outcome.jump_arc) > 1:
            trajectory.append(outcome.jump_arc)
        if outcome.kind is OutcomeKind.GRAZING:
            raise GrazingContact(
                "jump characteristic ends tangentially", state=outcome.terminal, partial=trajectory
            )
        x = outcome.terminal
        if outcome.kind is OutcomeKind.TRANSMITTED:
            region += heading
        else:
            heading = -heading
    raise DishamError("jump chain did not leave the surface", partial=trajectory)


def simulate_limit_scenario(
    model,
    x0: ExtendedPhasePoint,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    *,
    require_crossing: bool = True,
    max_impacts: int = 1000,
) -> Trajectory:
    """Integrate the zero-width model from ``x0`` up to ``t_end``.

    Args:
        model: A :class:`DiscontinuousPair` or a :class:`DiscontinuityStack`.
        x0: Initial state off the surface, on the energy shell of its side.
        t_end: Final time.
        cfg: Integrator settings.
        require_crossing: Raise :class:`NoCrossing` if the surface is never
            reached before ``t_end``.
        max_impacts: Safety bound on the number of impacts.

    Returns:
        A trajectory whose arcs join continuously (checked to 1e-9);
        ``meta["impacts"]`` lists the impact states.

    Raises:
        GrazingContact, NoCrossing, UnboundedCharacteristic, BandViolation:
            with the trajectory so far attached as ``partial``.
    """
    cfg = cfg or IntegratorConfig()
    stack = DiscontinuityStack.from_pair(model) if isinstance(model, DiscontinuousPair) else model
    surface = stack.surface
    if not t_end > x0.t:
        raise ValueError("t_end must be later than the initial time")
    if t_end - x0.t > cfg.max_time:
        raise MaxTimeExceeded(f"span {t_end - x0.t!r} exceeds max_time {cfg.max_time!r}")
    A0 = eval_A(surface, x0)
    if abs(A0) <= EPS_REGION:
        raise ValueError("initial state lies on the discontinuity surface")
    region = 0 if A0 < 0.0 else stack.depth
    _check_on_shell(stack.hamiltonians[region], x0)

    trajectory = Trajectory(label="limit")
    impacts = []
    x = x0
    while True:
        H = stack.hamiltonians[region]
        kind = ArcKind.SMOOTH_MINUS if region == 0 else ArcKind.SMOOTH_PLUS
        direction = 1 if region == 0 else -1
        event = _surface_event(surface, 0.0, direction, cfg.event_tol, "surface")
        try:
            result = _flow(H, x.as_array(), t_end, cfg, [event])
        except DishamError as exc:
            exc.partial = trajectory
            raise
        arc = _arc_from(result, kind, ParamKind.TIME)
        if len(arc) > 1:
            trajectory.append(arc)
        if result.event is None:
            break
        y = np.asarray(result.states[-1])
        x = ExtendedPhasePoint.from_array(y)
        if abs(_transversality(H, surface, y)) < EPS_TRANSVERSAL:
            raise GrazingContact(
                "trajectory meets the surface tangentially", state=x, partial=trajectory
            )
        impacts.append(x)
        if len(impacts) > max_impacts:
            raise DishamError(f"more than {max_impacts} impacts", partial=trajectory)
        x, region = _resolve_impact(stack, x, region, cfg, trajectory)
        if not x.t < t_end:
            break

    if require_crossing and not impacts:
        raise NoCrossing("the surface was not reached before t_end", partial=trajectory)
    trajectory.check_continuity(1e-9)
    trajectory.meta["impacts"] = impacts
    trajectory.meta["final_region"] = region
    return trajectory
