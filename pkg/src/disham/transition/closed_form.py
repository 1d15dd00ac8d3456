"""Closed-form jumps across constant potential steps.

For ``H = <p, g^-1(p)>/2m + U`` with ``U`` stepping from ``U_minus`` to
``U_plus`` across ``<b, q - q0> = 0`` (``<b, g^-1(b)> = 1``) the jump
characteristic only moves the momentum along ``b`` and its end point solves a
quadratic.  With ``nu = <b, g^-1(p0)>`` and ``dU = U_plus - U_minus``:

* ``dU > 0`` and ``nu**2 / 2m < dU``: reflection, ``p1 = p0 - 2 nu b``.
* ``dU > 0`` and ``nu**2 / 2m > dU``: transmission, normal momentum
  ``sqrt(nu**2 - 2m dU)``.
* ``dU <= 0``: transmission, normal momentum ``sqrt(nu**2 + 2m |dU|)``.
* ``nu**2 / 2m == dU`` (to ``EPS_GRAZE``): grazing, reported as such.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import GrazingContact
from ..geometry import ExtendedPhasePoint, MetricSpace, PhasePoint, pairing
from .jump import EPS_GRAZE, OutcomeKind, TransitionOutcome, _jump_samples

__all__ = ["step_closed_form", "cascade"]


def step_closed_form(
    U_minus: float,
    U_plus: float,
    p0,
    b,
    m: float,
    space: MetricSpace,
    q0=None,
    t0: float = 0.0,
    n_samples: int = 33,
) -> TransitionOutcome:
    """Analytic outcome of a particle hitting a potential step from below.

    Args:
        U_minus, U_plus: Potential before and after the step.
        p0: Momentum at impact; must satisfy ``<b, g^-1(p0)> > 0``.
        b: Normalized step covector.
        m: Mass.
        space: Metric.
        q0: Impact position (defaults to the origin).
        t0: Impact time.
        n_samples: Number of samples on the returned jump arc.

    Raises:
        ValueError: if the particle does not move toward the step.
    """
    p0 = np.asarray(p0, dtype=float)
    b = np.asarray(b, dtype=float)
    q0 = np.zeros(space.n) if q0 is None else np.asarray(q0, dtype=float)
    nu = pairing(b, p0, space)
    if not nu > 0.0:
        raise ValueError(f"particle does not approach the step: <b, g^-1(p0)> = {nu!r}")
    e0 = space.norm2_covector(p0) / (2.0 * m) + U_minus
    dU = U_plus - U_minus
    normal_energy = nu * nu / (2.0 * m)

    if dU > 0.0:
        direction = -b
        if abs(normal_energy - dU) <= EPS_GRAZE * max(1.0, abs(dU)):
            kind, s1, side = OutcomeKind.GRAZING, nu, None
        elif normal_energy < dU:
            kind, s1, side = OutcomeKind.REFLECTED, 2.0 * nu, "MINUS"
        else:
            kind, s1, side = OutcomeKind.TRANSMITTED, nu - math.sqrt(nu * nu - 2.0 * m * dU), "PLUS"
    else:
        direction = b
        kind, side = OutcomeKind.TRANSMITTED, "PLUS"
        s1 = math.sqrt(nu * nu - 2.0 * m * dU) - nu

    if kind is OutcomeKind.REFLECTED:
        p1 = p0 - 2.0 * nu * b
    elif kind is OutcomeKind.TRANSMITTED:
        # normal component set directly so the result does not inherit cancellation from s1
        p1 = p0 - nu * b + math.sqrt(nu * nu - 2.0 * m * dU) * b
    else:
        p1 = p0 - nu * b
    s_values = np.linspace(0.0, s1, n_samples) if s1 > 0.0 else np.array([0.0])
    arc = _jump_samples(q0, p0, t0, e0, np.zeros(space.n), direction, s_values)
    arc.states[-1, space.n : 2 * space.n] = p1
    terminal = ExtendedPhasePoint(q0, p1, t0, e0)
    return TransitionOutcome(kind, terminal, s1, arc, side)


def cascade(levels, p0, b, m: float, space: MetricSpace, q0=None, t0: float = 0.0):
    """Chain of steps ``levels[0] -> levels[1] -> ...`` collapsed onto one surface.

    Each stage is resolved with :func:`step_closed_form`.  A reflection turns
    the particle around; it then re-crosses the stages it has already passed
    in the opposite direction (with covector ``-b``) until it is back below
    the first one.

    Returns:
        ``(outcomes, final)`` where ``final`` is the :class:`PhasePoint`
        after the last stage.

    Raises:
        GrazingContact: a stage is tangential; the outcomes so far are
            attached as ``partial``.
    """
    levels = [float(u) for u in levels]
    if len(levels) < 2:
        raise ValueError("a cascade needs at least two levels")
    b = np.asarray(b, dtype=float)
    q0 = np.zeros(space.n) if q0 is None else np.asarray(q0, dtype=float)
    p = np.asarray(p0, dtype=float)
    if not pairing(b, p, space) > 0.0:
        raise ValueError("particle does not approach the first step")
    top = len(levels) - 1
    region, heading = 0, 1
    outcomes = []
    for _ in range(4 * len(levels)):
        if (heading > 0 and region == top) or (heading < 0 and region == 0):
            return outcomes, PhasePoint(q0, p)
        nxt = region + heading
        out = step_closed_form(
            levels[region], levels[nxt], p, heading * b, m, space, q0=q0, t0=t0
        )
        outcomes.append(out)
        if out.kind is OutcomeKind.GRAZING:
            raise GrazingContact(
                f"grazing contact at stage {region} -> {nxt}", state=out.terminal, partial=outcomes
            )
        p = out.terminal.p
        if out.kind is OutcomeKind.TRANSMITTED:
            region = nxt
        else:
            heading = -heading
    raise RuntimeError("cascade did not terminate")
