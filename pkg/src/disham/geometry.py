"""Affine phase space ``Q x V*`` with a constant Euclidean metric.

Vectors (elements of ``V``: positions, velocities, the surface vector ``a``)
and covectors (elements of ``V*``: momenta, forces, the surface covector
``b``) share the ndarray representation.  The :data:`Vector` and
:data:`Covector` aliases exist so that type checkers flag a covector passed
where a vector is expected; crossing between the two always goes through
:meth:`MetricSpace.lower` or :meth:`MetricSpace.raise_`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NewType

import numpy as np
from numpy.typing import ArrayLike
from scipy.linalg import LinAlgError, cho_factor, cho_solve

__all__ = [
    "Vector",
    "Covector",
    "MetricSpace",
    "PhasePoint",
    "ExtendedPhasePoint",
    "PhaseHyperplane",
    "pairing",
    "eval_A",
    "normal_velocity",
    "normalize_surface",
    "configuration_surface",
    "momentum_split",
]

Vector = NewType("Vector", np.ndarray)
Covector = NewType("Covector", np.ndarray)


def _as_array(x: ArrayLike, n: int | None = None, name: str = "array") -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {n}")
    return arr


class MetricSpace:
    """Model vector space ``V`` of dimension ``n`` with metric tensor ``g``.

    The inverse is computed once from a Cholesky factorization; a matrix
    that is not symmetric positive definite is rejected.

    Args:
        g: Symmetric positive definite ``n x n`` matrix (or a scalar for n=1).
    """

    def __init__(self, g: ArrayLike):
        g = np.atleast_2d(np.asarray(g, dtype=float))
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValueError("metric has non-finite entries")
        if not np.allclose(g, g.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(g).max())):
            raise ValueError("metric is not symmetric")
        try:
            factor = cho_factor(g, lower=True)
        except LinAlgError as exc:
            raise ValueError("metric is not positive definite") from exc
        g_inv = cho_solve(factor, np.eye(g.shape[0]))
        self.g = g
        self.g_inv = 0.5 * (g_inv + g_inv.T)
        self.g.setflags(write=False)
        self.g_inv.setflags(write=False)

    @classmethod
    def euclidean(cls, n: int) -> MetricSpace:
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    def lower(self, v: Vector) -> Covector:
        """Apply ``g: V -> V*``."""
        return Covector(self.g @ _as_array(v, self.n, "vector"))

    def raise_(self, p: Covector) -> Vector:
        """Apply ``g^-1: V* -> V``."""
        return Vector(self.g_inv @ _as_array(p, self.n, "covector"))

    def norm2_covector(self, p: Covector) -> float:
        """``<p, g^-1(p)>``."""
        p = _as_array(p, self.n, "covector")
        return float(p @ self.g_inv @ p)

    def norm2_vector(self, v: Vector) -> float:
        """``<g(v), v>``."""
        v = _as_array(v, self.n, "vector")
        return float(v @ self.g @ v)

    def __repr__(self):
        return f"MetricSpace(n={self.n})"


@dataclass(frozen=True, eq=False)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _as_array(self.q, name="q")
        p = _as_array(self.p, q.shape[0], "p")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True, eq=False)
class ExtendedPhasePoint:
    """Point ``(q, p, t, e)`` of extended phase space.

    The flat layout ``[q, p, t, e]`` returned by :meth:`as_array` is the
    integrator state vector.
    """

    q: np.ndarray
    p: np.ndarray
    t: float = 0.0
    e: float = 0.0

    def __post_init__(self):
        q = _as_array(self.q, name="q")
        p = _as_array(self.p, q.shape[0], "p")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "e", float(self.e))

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def phase(self) -> PhasePoint:
        return PhasePoint(self.q, self.p)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.t, self.e]])

    @classmethod
    def from_array(cls, y: np.ndarray) -> ExtendedPhasePoint:
        n = (len(y) - 2) // 2
        return cls(np.array(y[:n]), np.array(y[n : 2 * n]), y[2 * n], y[2 * n + 1])

    def replace(self, **changes) -> ExtendedPhasePoint:
        fields = {"q": self.q, "p": self.p, "t": self.t, "e": self.e}
        fields.update(changes)
        return ExtendedPhasePoint(**fields)

    def __repr__(self):
        return (
            f"ExtendedPhasePoint(q={self.q.tolist()}, p={self.p.tolist()}, "
            f"t={self.t!r}, e={self.e!r})"
        )


@dataclass(frozen=True, eq=False)
class PhaseHyperplane:
    """Zero set of ``A(q, p) = <b, q - q0> + <p - p0, a>``.

    Construct through :func:`normalize_surface` unless ``(a, b)`` already
    satisfy ``<g(a), a> + <b, g^-1(b)> = 1``.
    """

    q0: np.ndarray
    p0: np.ndarray
    a: np.ndarray
    b: np.ndarray
    space: MetricSpace = field(repr=False)

    def __post_init__(self):
        n = self.space.n
        for name in ("q0", "p0", "a", "b"):
            object.__setattr__(self, name, _as_array(getattr(self, name), n, name))
        if not (np.any(self.a) or np.any(self.b)):
            raise ValueError("surface normal data (a, b) are both zero")
        norm = self.space.norm2_vector(self.a) + self.space.norm2_covector(self.b)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(
                f"surface is not normalized: <g(a),a> + <b,g^-1(b)> = {norm!r}"
            )

    @property
    def is_configuration_only(self) -> bool:
        return not np.any(self.a)

    @property
    def shift_q(self) -> Vector:
        """``g^-1(b)``: the position direction that raises ``A`` at unit rate."""
        return self.space.raise_(self.b)

    @property
    def shift_p(self) -> Covector:
        """``g(a)``: the momentum direction that raises ``A`` at unit rate."""
        return self.space.lower(self.a)


def pairing(b: Covector, p: Covector, space: MetricSpace) -> float:
    """Metric pairing ``<b, g^-1(p)>`` of two covectors."""
    b = _as_array(b, space.n, "b")
    p = _as_array(p, space.n, "p")
    return float(b @ space.g_inv @ p)


def eval_A(surface: PhaseHyperplane, x) -> float:
    """Affine function whose zero set is the surface.

    ``x`` may be a :class:`PhasePoint` or :class:`ExtendedPhasePoint`.
    """
    q = _as_array(x.q, surface.space.n, "q")
    p = _as_array(x.p, surface.space.n, "p")
    return float(surface.b @ (q - surface.q0) + (p - surface.p0) @ surface.a)


def _eval_A_raw(surface: PhaseHyperplane, q: np.ndarray, p: np.ndarray) -> float:
    return float(surface.b @ (q - surface.q0) + (p - surface.p0) @ surface.a)


def normal_velocity(surface: PhaseHyperplane, dH_dq: Covector, dH_dp: Vector) -> float:
    """Rate of change of ``A`` along a Hamiltonian flow.

    ``<b, dH/dp> - <dH/dq, a>``; positive means moving toward ``A > 0``.
    """
    return float(surface.b @ dH_dp - dH_dq @ surface.a)


def normalize_surface(q0, p0, a_raw, b_raw, space: MetricSpace) -> PhaseHyperplane:
    """Rescale ``(a, b)`` by the unique ``c > 0`` achieving unit norm.

    The zero set and the sign of ``A`` are unchanged.
    """
    a_raw = _as_array(a_raw, space.n, "a")
    b_raw = _as_array(b_raw, space.n, "b")
    norm2 = space.norm2_vector(a_raw) + space.norm2_covector(b_raw)
    if norm2 <= 0.0:
        raise ValueError("surface normal data (a, b) are both zero")
    if norm2 == 1.0:
        c = 1.0
    else:
        c = 1.0 / np.sqrt(norm2)
    return PhaseHyperplane(q0, p0, c * a_raw, c * b_raw, space)


def configuration_surface(q0, b, space: MetricSpace) -> PhaseHyperplane:
    """Surface ``<b, q - q0> = 0`` that ignores momentum (``a = 0``)."""
    zero = np.zeros(space.n)
    return normalize_surface(q0, zero, zero, b, space)


def momentum_split(p: Covector, b: Covector, space: MetricSpace):
    """Split ``p`` into its component along ``b`` and the remainder.

    Returns:
        ``(nu, tangential)`` with ``nu = <b, g^-1(p)>`` and
        ``tangential = p - nu * b``.

    Raises:
        ValueError: if ``<b, g^-1(b)>`` differs from 1 by more than 1e-9.
    """
    p = _as_array(p, space.n, "p")
    b = _as_array(b, space.n, "b")
    bb = space.norm2_covector(b)
    if abs(bb - 1.0) > 1e-9:
        raise ValueError(f"b is not normalized: <b, g^-1(b)> = {bb!r}")
    nu = pairing(b, p, space)
    return nu, Covector(p - nu * b)
