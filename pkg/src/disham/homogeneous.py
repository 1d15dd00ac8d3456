"""Homogeneous (extended phase space) view of Hamiltonian dynamics.

Trajectories live in ``(q, p, t, e)`` space as directed characteristics of
level sets ``F = 0``.  The canonical level function used here is
``F = e - H(q, p)``: it vanishes on the energy surface and has
``dF/de = 1 > 0``, so the orientation class of ``(0, 0, 0, 1)`` is the
outer orientation and the resulting characteristics have ``t' > 0``.  The
generating family ``(H - e) * tau`` has the opposite sign of ``dF/de``; it is
still provided by :func:`generating_family_eval`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDiscontinuity
from .geometry import ExtendedPhasePoint, eval_A
from .hamiltonian import DiscontinuousPair, SmoothHamiltonian

__all__ = [
    "EPS_REGION",
    "LimitRegionLabel",
    "CharacteristicDirection",
    "LevelFunction",
    "energy_level_function",
    "generating_family_eval",
    "classify_limit_region",
    "characteristic_direction",
    "orientation_contains",
    "oriented_pairing",
    "is_dynamics_solution",
]

EPS_REGION = 1e-9


class LimitRegionLabel(enum.Enum):
    N_MINUS = "N_MINUS"
    N_PLUS = "N_PLUS"
    M = "M"
    M_MINUS_EDGE = "M_MINUS_EDGE"
    M_PLUS_EDGE = "M_PLUS_EDGE"
    OUTSIDE = "OUTSIDE"


@dataclass(frozen=True, eq=False)
class CharacteristicDirection:
    """Tangent vector ``(q', p', t', e')`` in extended phase space."""

    dq: np.ndarray
    dp: np.ndarray
    dt: float
    de: float

    def __post_init__(self):
        object.__setattr__(self, "dq", np.asarray(self.dq, dtype=float))
        object.__setattr__(self, "dp", np.asarray(self.dp, dtype=float))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "de", float(self.de))

    def scaled(self, k: float) -> CharacteristicDirection:
        return CharacteristicDirection(k * self.dq, k * self.dp, k * self.dt, k * self.de)

    def is_zero(self) -> bool:
        return not (np.any(self.dq) or np.any(self.dp) or self.dt or self.de)


class LevelFunction:
    """Function on extended phase space with its gradient.

    Args:
        value: ``F(q, p, t, e)``.
        gradient: returns ``(dF/dq, dF/dp, dF/dt, dF/de)``.
    """

    def __init__(self, value, gradient):
        self._value = value
        self._gradient = gradient

    def value(self, x: ExtendedPhasePoint) -> float:
        return float(self._value(x.q, x.p, x.t, x.e))

    def gradient(self, x: ExtendedPhasePoint):
        return self._gradient(x.q, x.p, x.t, x.e)


def energy_level_function(H: SmoothHamiltonian) -> LevelFunction:
    """``F = e - H(q, p)``, positively oriented along ``+e``."""

    def value(q, p, t, e):
        return e - H.value(q, p)

    def gradient(q, p, t, e):
        return -H.grad_q(q, p), -H.grad_p(q, p), 0.0, 1.0

    return LevelFunction(value, gradient)


def generating_family_eval(H: SmoothHamiltonian, x: ExtendedPhasePoint, tau: float) -> float:
    """``(H(q, p) - e) * tau`` for ``tau > 0``."""
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    return (H.value(x.q, x.p) - x.e) * tau


def classify_limit_region(
    pair: DiscontinuousPair, x: ExtendedPhasePoint, eps: float = EPS_REGION
) -> LimitRegionLabel:
    """Which piece of the zero-width limit set contains ``x``.

    The edges are tested before the open band, so labels never overlap.
    """
    A = eval_A(pair.surface, x)
    hm = pair.h_minus.value(x.q, x.p)
    hp = pair.h_plus.value(x.q, x.p)
    if A < -eps:
        return LimitRegionLabel.N_MINUS if abs(x.e - hm) <= eps else LimitRegionLabel.OUTSIDE
    if A > eps:
        return LimitRegionLabel.N_PLUS if abs(x.e - hp) <= eps else LimitRegionLabel.OUTSIDE
    if abs(x.e - hm) <= eps:
        return LimitRegionLabel.M_MINUS_EDGE
    if abs(x.e - hp) <= eps:
        return LimitRegionLabel.M_PLUS_EDGE
    if min(hm, hp) + eps < x.e < max(hm, hp) - eps:
        return LimitRegionLabel.M
    return LimitRegionLabel.OUTSIDE


def jump_orientation(pair: DiscontinuousPair, q, p) -> float:
    """+1 if ``H+ > H-`` at ``(q, p)``, -1 if ``H+ < H-``."""
    jump = pair.jump(q, p)
    if jump == 0.0:
        raise DegenerateDiscontinuity(
            "H+ equals H- at this point; the jump direction is undefined"
        )
    return 1.0 if jump > 0.0 else -1.0


def characteristic_direction(
    pair: DiscontinuousPair, label: LimitRegionLabel, x: ExtendedPhasePoint
) -> CharacteristicDirection:
    """Directed characteristic at ``x`` for the limit component ``label``.

    On ``N-``/``N+`` this is the time-parameterized Hamilton vector field.
    On ``M`` it is ``sigma * (a, -b, 0, 0)`` with ``sigma`` the sign of the
    jump ``H+ - H-``.
    """
    if label in (LimitRegionLabel.N_MINUS, LimitRegionLabel.N_PLUS):
        H = pair.h_minus if label is LimitRegionLabel.N_MINUS else pair.h_plus
        return CharacteristicDirection(H.grad_p(x.q, x.p), -H.grad_q(x.q, x.p), 1.0, 0.0)
    if label is LimitRegionLabel.M:
        sigma = jump_orientation(pair, x.q, x.p)
        surface = pair.surface
        return CharacteristicDirection(sigma * surface.a, -sigma * surface.b, 0.0, 0.0)
    raise ValueError(f"no characteristic direction for region {label.value}")


def orientation_contains(F: LevelFunction, x: ExtendedPhasePoint, dx, eps: float = EPS_REGION) -> bool:
    """True if the displacement ``dx`` points to the positive side of ``F = 0``."""
    if abs(F.value(x)) > eps:
        raise ValueError("orientation is only defined on the level set F = 0")
    fq, fp, ft, fe = F.gradient(x)
    return float(fq @ dx.dq + dx.dp @ fp + ft * dx.dt + fe * dx.de) > 0.0


def oriented_pairing(v: CharacteristicDirection, dx: CharacteristicDirection) -> float:
    """Symplectic pairing ``<p', dq> - <dp, q'> - e' dt + t' de``."""
    return float(v.dp @ dx.dq - dx.dp @ v.dq - v.de * dx.dt + v.dt * dx.de)


def is_dynamics_solution(
    H: SmoothHamiltonian,
    x: ExtendedPhasePoint,
    v: CharacteristicDirection,
    eps: float = EPS_REGION,
    rtol: float = 1e-10,
) -> bool:
    """Membership of ``(x, v)`` in the oriented dynamics equation of ``H``.

    Requires ``e = H(q, p)``, ``t' > 0``, ``e' = 0``, ``p' = -t' dH/dq`` and
    ``q' = t' dH/dp``.  Any positive multiple of a solution is a solution.
    """
    if abs(x.e - H.value(x.q, x.p)) > eps:
        return False
    if not v.dt > 0.0 or v.de != 0.0:
        return False
    want_dq = v.dt * H.grad_p(x.q, x.p)
    want_dp = -v.dt * H.grad_q(x.q, x.p)
    scale = max(1.0, float(np.max(np.abs(want_dq), initial=0.0)), float(np.max(np.abs(want_dp), initial=0.0)))
    return bool(
        np.all(np.abs(v.dq - want_dq) <= rtol * scale)
        and np.all(np.abs(v.dp - want_dp) <= rtol * scale)
    )
