"""Jump characteristics on the discontinuity surface.

At zero layer width a trajectory that hits the surface ``A = 0`` continues,
at frozen time and energy, along the straight line
``s -> (q0 + s*sigma*a, p0 - s*sigma*b)`` inside the surface, where
``sigma`` is the sign of ``H+ - H-``.  The line is followed while the energy
stays strictly between ``H-`` and ``H+``; the first point where it equals one
of them decides between reflection and transmission.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..dynamics import EPS_TRANSVERSAL, ArcKind, ParamKind, SampledArc
from ..errors import (
    BandViolation,
    DegenerateDiscontinuity,
    GrazingContact,
    UnboundedCharacteristic,
)
from ..geometry import ExtendedPhasePoint, eval_A, normal_velocity
from ..hamiltonian import DiscontinuousPair
from ..homogeneous import EPS_REGION

__all__ = [
    "EPS_GRAZE",
    "OutcomeKind",
    "ImpactState",
    "TransitionOutcome",
    "make_impact",
    "jump_arc",
]

EPS_GRAZE = 1e-9


class OutcomeKind(enum.Enum):
    REFLECTED = "REFLECTED"
    TRANSMITTED = "TRANSMITTED"
    GRAZING = "GRAZING"


def _other(side: str) -> str:
    return "PLUS" if side == "MINUS" else "MINUS"


@dataclass(frozen=True, eq=False)
class ImpactState:
    """State at which a trajectory reaches the surface from ``incoming_side``."""

    x: ExtendedPhasePoint
    incoming_side: str = "MINUS"

    def __post_init__(self):
        if self.incoming_side not in ("MINUS", "PLUS"):
            raise ValueError(f"incoming_side must be MINUS or PLUS, got {self.incoming_side!r}")

    def validate(self, pair: DiscontinuousPair, energy_tol: float = EPS_REGION) -> float:
        """Check the impact invariants and return the incoming normal velocity.

        Raises:
            ValueError: the state is off the surface, off-shell, or moving away.
            GrazingContact: the incoming flow is tangent to the surface.
        """
        x = self.x
        A = eval_A(pair.surface, x)
        if abs(A) > EPS_REGION:
            raise ValueError(f"impact state is off the surface: A = {A!r}")
        H = pair.side(self.incoming_side)
        drift = abs(x.e - H.value(x.q, x.p))
        if drift > energy_tol:
            raise ValueError(f"impact energy is off-shell by {drift:.3e}")
        v = normal_velocity(pair.surface, H.grad_q(x.q, x.p), H.grad_p(x.q, x.p))
        if abs(v) <= EPS_TRANSVERSAL:
            raise GrazingContact("trajectory is tangent to the surface at impact", state=x)
        toward = 1.0 if self.incoming_side == "MINUS" else -1.0
        if v * toward < 0.0:
            raise ValueError("trajectory moves away from the surface at the impact point")
        return v


def make_impact(pair: DiscontinuousPair, q, p, t: float = 0.0, incoming_side: str = "MINUS") -> ImpactState:
    """Impact state on the incoming energy shell, validated."""
    H = pair.side(incoming_side)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    impact = ImpactState(ExtendedPhasePoint(q, p, t, H.value(q, p)), incoming_side)
    impact.validate(pair)
    return impact


@dataclass(eq=False)
class TransitionOutcome:
    """Result of following a jump characteristic.

    Attributes:
        kind: ``REFLECTED``, ``TRANSMITTED`` or ``GRAZING``.
        terminal: End point; ``t`` and ``e`` are copied from the impact.
        s1: Parameter of the end point along the characteristic.
        jump_arc: Samples of the characteristic, parameterized by ``s``.
        exit_side: Side the trajectory continues into, ``None`` when grazing.
    """

    kind: OutcomeKind
    terminal: ExtendedPhasePoint
    s1: float
    jump_arc: SampledArc
    exit_side: str | None


def _arc_states(q0, p0, t0, e0, direction_q, direction_p, s_values) -> np.ndarray:
    s = np.asarray(s_values, dtype=float)[:, None]
    rows = np.hstack(
        [
            q0[None, :] + s * direction_q[None, :],
            p0[None, :] + s * direction_p[None, :],
            np.full_like(s, t0),
            np.full_like(s, e0),
        ]
    )
    return rows


def jump_arc(
    pair: DiscontinuousPair,
    impact: ImpactState,
    s_max: float | None = None,
    *,
    energy_tol: float = EPS_REGION,
) -> TransitionOutcome:
    """Follow the jump characteristic from ``impact`` to its first border point.

    The parameter axis is scanned in steps of 1% of the momentum scale;
    sign changes of ``H-(s) - e`` and ``H+(s) - e`` are refined with Brent's
    method.  The incoming-side function vanishes at ``s = 0`` and is divided
    by ``s`` so that root is never mistaken for a border.  Extrema of either
    function that touch zero without crossing are tangential contacts and
    yield ``GRAZING``, as does any border point with exit normal velocity
    below ``EPS_TRANSVERSAL``.

    Raises:
        DegenerateDiscontinuity: ``H+ == H-`` at the impact point.
        UnboundedCharacteristic: no border point before ``s_max``.
        BandViolation: the energy left the band between ``H-`` and ``H+``
            without crossing a border.
    """
    impact.validate(pair, energy_tol)
    x = impact.x
    q0, p0, t0, e0 = x.q, x.p, x.t, x.e
    surface = pair.surface
    jump0 = pair.jump(q0, p0)
    if abs(jump0) <= EPS_REGION:
        raise DegenerateDiscontinuity("H+ equals H- at the impact point; there is no jump")
    sigma = 1.0 if jump0 > 0.0 else -1.0
    dq_dir = sigma * surface.a
    dp_dir = -sigma * surface.b

    scale = max(float(np.sqrt(surface.space.norm2_covector(p0))), 1e-3)
    h = 0.01 * scale
    if s_max is None:
        s_max = 100.0 * scale

    incoming = impact.incoming_side
    H_in, H_out = pair.side(incoming), pair.side(_other(incoming))

    def point(s):
        return q0 + s * dq_dir, p0 + s * dp_dir

    def slope(H, s):
        # d/ds of H along the characteristic
        q, p = point(s)
        return float(H.grad_q(q, p) @ dq_dir + dp_dir @ H.grad_p(q, p))

    def f_out(s):
        return H_out.value(*point(s)) - e0

    slope_in0 = slope(H_in, 0.0)

    def f_in(s):
        if s == 0.0:
            return slope_in0
        return (H_in.value(*point(s)) - e0) / s

    touch_tol = EPS_GRAZE * max(1.0, abs(jump0))

    def candidates(lo, hi, f_lo, f_hi, fn, H, side):
        found = []
        if f_lo == 0.0 and lo > 0.0:
            found.append((lo, side, False))
        elif f_lo * f_hi < 0.0:
            root = brentq(fn, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
            found.append((root, side, False))
        else:
            d_lo, d_hi = slope(H, lo), slope(H, hi)
            if d_lo * d_hi < 0.0:
                s_ext = brentq(lambda s: slope(H, s), lo, hi, xtol=1e-14, maxiter=200)
                value = H.value(*point(s_ext)) - e0
                if abs(value) <= touch_tol and s_ext > 0.0:
                    found.append((s_ext, side, True))
        return found

    s_prev = 0.0
    fi_prev, fo_prev = f_in(0.0), f_out(0.0)
    samples = [0.0]
    chosen = None
    while s_prev < s_max:
        s_next = min(s_prev + h, s_max)
        fi_next, fo_next = f_in(s_next), f_out(s_next)
        found = candidates(s_prev, s_next, fi_prev, fi_next, f_in, H_in, incoming)
        found += candidates(s_prev, s_next, fo_prev, fo_next, f_out, H_out, _other(incoming))
        if found:
            chosen = min(found, key=lambda c: c[0])
            break
        hm = pair.h_minus.value(*point(s_next))
        hp = pair.h_plus.value(*point(s_next))
        on_border = fi_next == 0.0 or fo_next == 0.0
        if not on_border and not (min(hm, hp) < e0 < max(hm, hp)):
            raise BandViolation(
                f"energy left the band at s = {s_next!r} without reaching a border",
                partial=_jump_samples(q0, p0, t0, e0, dq_dir, dp_dir, samples),
            )
        samples.append(s_next)
        s_prev, fi_prev, fo_prev = s_next, fi_next, fo_next
    if chosen is None:
        raise UnboundedCharacteristic(
            f"no border point on the jump characteristic before s = {s_max!r}",
            partial=_jump_samples(q0, p0, t0, e0, dq_dir, dp_dir, samples),
        )

    s1, side, touched = chosen
    if s1 > samples[-1]:
        samples.append(s1)
    arc = _jump_samples(q0, p0, t0, e0, dq_dir, dp_dir, samples)
    q1, p1 = point(s1)
    terminal = ExtendedPhasePoint(q1, p1, t0, e0)
    H_exit = pair.side(side)
    v_exit = normal_velocity(surface, H_exit.grad_q(q1, p1), H_exit.grad_p(q1, p1))
    if touched or abs(v_exit) < EPS_TRANSVERSAL:
        return TransitionOutcome(OutcomeKind.GRAZING, terminal, s1, arc, None)
    outward = -1.0 if side == "MINUS" else 1.0
    if v_exit * outward <= 0.0:
        raise BandViolation(
            f"border point on the {side} edge points back into the surface", partial=arc
        )
    kind = OutcomeKind.REFLECTED if side == incoming else OutcomeKind.TRANSMITTED
    return TransitionOutcome(kind, terminal, s1, arc, side)


def _jump_samples(q0, p0, t0, e0, dq_dir, dp_dir, samples) -> SampledArc:
    states = _arc_states(q0, p0, t0, e0, dq_dir, dp_dir, samples)
    return SampledArc(ArcKind.JUMP, ParamKind.S_PARAM, np.asarray(samples, dtype=float), states)
