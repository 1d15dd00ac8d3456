"""Smooth step functions built from the flat bump ``exp(-1/s)``.

``phi`` is the classic C-infinity function that vanishes identically for
``s <= 0``.  ``chi`` glues two copies of it into a smooth odd transition from
-1 to +1 over ``[-1, 1]`` and ``chi_step`` rescales that transition onto an
arbitrary interval ``(a, a')``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "StepProfile",
    "phi",
    "dphi",
    "chi",
    "dchi",
    "chi_step",
    "dchi_step",
]


def phi(s: float) -> float:
    """Flat bump: 0 for ``s <= 0`` and ``exp(-1/s)`` otherwise."""
    if s <= 0.0:
        return 0.0
    # math.exp underflows gracefully to 0.0 for tiny s
    return math.exp(-1.0 / s)


def dphi(s: float) -> float:
    """Derivative of :func:`phi`: ``exp(-1/s) / s**2`` for ``s > 0``."""
    if s <= 0.0:
        return 0.0
    e = math.exp(-1.0 / s)
    if e == 0.0:
        return 0.0
    return e / (s * s)


def _pair(s: float) -> tuple[float, float]:
    # fl(1 + (-s)) == fl(1 - s), so chi(-s) swaps u and v exactly
    return phi(1.0 + s), phi(1.0 - s)


def chi(s: float) -> float:
    """Smooth odd step from -1 (``s <= -1``) to +1 (``s >= 1``)."""
    u, v = _pair(s)
    return (u - v) / (u + v)


def dchi(s: float) -> float:
    """Closed-form derivative of :func:`chi`.

    Uses ``((1 - chi) phi'(1+s) + (1 + chi) phi'(1-s)) / (phi(1+s) + phi(1-s))``
    which is exactly zero for ``|s| >= 1`` and strictly positive inside.
    """
    if s <= -1.0 or s >= 1.0:
        return 0.0
    u, v = _pair(s)
    total = u + v
    c = (u - v) / total
    return ((1.0 - c) * dphi(1.0 + s) + (1.0 + c) * dphi(1.0 - s)) / total


@dataclass(frozen=True)
class StepProfile:
    """Interval ``(a, a_prime)`` over which a step climbs from -1 to +1."""

    a: float
    a_prime: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.a_prime)):
            raise ValueError("step profile edges must be finite")
        if not self.a_prime > self.a:
            raise ValueError(
                f"step profile needs a_prime > a, got ({self.a}, {self.a_prime})"
            )

    @property
    def width(self) -> float:
        return self.a_prime - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.a_prime)

    def contains(self, s: float) -> bool:
        """True for ``a < s < a_prime`` (the open interval)."""
        return self.a < s < self.a_prime

    def argument(self, s: float) -> float:
        """Affine map sending ``a`` to -1 and ``a_prime`` to +1."""
        return (2.0 * s - self.a_prime - self.a) / (self.a_prime - self.a)


def chi_step(profile: StepProfile, s: float) -> float:
    """Smooth step equal to -1 for ``s <= a`` and +1 for ``s >= a_prime``."""
    if s <= profile.a:
        return -1.0
    if s >= profile.a_prime:
        return 1.0
    return chi(profile.argument(s))


def dchi_step(profile: StepProfile, s: float) -> float:
    """Derivative of :func:`chi_step` with respect to ``s``.

    Scales like ``1 / width``, so it grows without bound as the interval
    shrinks.
    """
    if s <= profile.a or s >= profile.a_prime:
        return 0.0
    return dchi(profile.argument(s)) * 2.0 / profile.width
