"""Hamiltonian evaluators.

Every Hamiltonian exposes ``value(q, p)``, ``grad_q(q, p)`` (a covector) and
``grad_p(q, p)`` (a vector).  Models that contain a thin transition layer
(:class:`MollifiedHamiltonian`, :class:`StepChainHamiltonian`) additionally
provide ``gradient(q, p) -> (dq, dp, K)`` where ``K`` is the coefficient of
the layer force along ``(b, a)``, plus ``surface`` and ``layer_span`` so the
integrators know where the layer sits.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import MetricSpace, PhaseHyperplane, _eval_A_raw
from .mollifier import StepProfile, chi_step, dchi_step

__all__ = [
    "SmoothHamiltonian",
    "FunctionHamiltonian",
    "ConstantPotential",
    "HarmonicPotential",
    "StepChainPotential",
    "LayeredPotential",
    "NaturalHamiltonian",
    "StepChainHamiltonian",
    "DiscontinuousPair",
    "DiscontinuityStack",
    "MollifiedHamiltonian",
    "mollified_value",
    "mollified_grad",
    "step_chain_value",
    "constant_step_pair",
]


class SmoothHamiltonian(ABC):
    """Smooth function on phase space with analytic gradients."""

    space: MetricSpace

    @abstractmethod
    def value(self, q: np.ndarray, p: np.ndarray) -> float: ...

    @abstractmethod
    def grad_q(self, q: np.ndarray, p: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def grad_p(self, q: np.ndarray, p: np.ndarray) -> np.ndarray: ...

    def gradient(self, q, p):
        """``(dH/dq, dH/dp, K)``; ``K`` is zero for Hamiltonians without a layer."""
        return self.grad_q(q, p), self.grad_p(q, p), 0.0

    def __call__(self, q, p) -> float:
        return self.value(np.asarray(q, dtype=float), np.asarray(p, dtype=float))


class FunctionHamiltonian(SmoothHamiltonian):
    """Hamiltonian assembled from three user-supplied callables."""

    def __init__(
        self,
        space: MetricSpace,
        value: Callable[[np.ndarray, np.ndarray], float],
        grad_q: Callable[[np.ndarray, np.ndarray], np.ndarray],
        grad_p: Callable[[np.ndarray, np.ndarray], np.ndarray],
    ):
        self.space = space
        self._value = value
        self._grad_q = grad_q
        self._grad_p = grad_p

    def value(self, q, p):
        return float(self._value(q, p))

    def grad_q(self, q, p):
        return np.asarray(self._grad_q(q, p), dtype=float)

    def grad_p(self, q, p):
        return np.asarray(self._grad_p(q, p), dtype=float)


# -- potentials on configuration space ---------------------------------------


@dataclass(frozen=True)
class ConstantPotential:
    level: float

    def value(self, q) -> float:
        return self.level

    def grad(self, q) -> np.ndarray:
        return np.zeros_like(q, dtype=float)


class HarmonicPotential:
    """``U(q) = k/2 <g(q - c), q - c>``."""

    def __init__(self, stiffness: float, center, space: MetricSpace):
        self.stiffness = float(stiffness)
        self.center = np.asarray(center, dtype=float)
        self.space = space

    def value(self, q) -> float:
        d = q - self.center
        return 0.5 * self.stiffness * float(d @ self.space.g @ d)

    def grad(self, q) -> np.ndarray:
        return self.stiffness * (self.space.g @ (q - self.center))


class StepChainPotential:
    """Piecewise-constant levels joined by smooth steps.

    On ``breakpoints[i]`` the value climbs from ``levels[i]`` to
    ``levels[i + 1]`` along :func:`~disham.mollifier.chi_step`; between
    layers it is exactly constant.  Layers may touch but not overlap.

    Args:
        levels: ``U^0, ..., U^k`` with ``k >= 1``.
        breakpoints: ``k`` step profiles in increasing order.
    """

    def __init__(self, levels: Sequence[float], breakpoints: Sequence[StepProfile]):
        levels = [float(u) for u in levels]
        breakpoints = list(breakpoints)
        if len(levels) < 2:
            raise ValueError("a step chain needs at least two levels")
        if len(breakpoints) != len(levels) - 1:
            raise ValueError(
                f"{len(levels)} levels need {len(levels) - 1} breakpoints, "
                f"got {len(breakpoints)}"
            )
        for left, right in zip(breakpoints, breakpoints[1:]):
            if right.a < left.a_prime:
                raise ValueError("step chain breakpoints overlap or are out of order")
        self.levels = levels
        self.breakpoints = breakpoints

    @classmethod
    def uniform(cls, levels: Sequence[float], delta: float, start: float = 0.0):
        """Split ``(start, start + delta)`` into equal consecutive layers."""
        k = len(levels) - 1
        edges = [start + delta * i / k for i in range(k + 1)]
        edges[-1] = start + delta
        return cls(levels, [StepProfile(lo, hi) for lo, hi in zip(edges, edges[1:])])

    @property
    def span(self) -> tuple[float, float]:
        return self.breakpoints[0].a, self.breakpoints[-1].a_prime

    def _locate(self, s: float) -> tuple[int, bool]:
        # (index, inside): inside layer `index`, or on the plateau `index`
        for i, bp in enumerate(self.breakpoints):
            if s <= bp.a:
                return i, False
            if s < bp.a_prime:
                return i, True
        return len(self.levels) - 1, False

    def value(self, s: float) -> float:
        i, inside = self._locate(s)
        if not inside:
            return self.levels[i]
        c = chi_step(self.breakpoints[i], s)
        return 0.5 * (1.0 - c) * self.levels[i] + 0.5 * (1.0 + c) * self.levels[i + 1]

    def derivative(self, s: float) -> float:
        i, inside = self._locate(s)
        if not inside:
            return 0.0
        jump = self.levels[i + 1] - self.levels[i]
        return 0.5 * jump * dchi_step(self.breakpoints[i], s)


def step_chain_value(chain: StepChainPotential, Bq: float) -> float:
    """Value of a step chain at surface coordinate ``Bq``."""
    return chain.value(Bq)


class LayeredPotential:
    """Step chain laid out along ``B(q) = <b, q - q0>`` of a configuration surface."""

    def __init__(self, chain: StepChainPotential, surface: PhaseHyperplane):
        if not surface.is_configuration_only:
            raise ValueError("a layered potential needs a configuration surface (a = 0)")
        self.chain = chain
        self.surface = surface

    def coordinate(self, q) -> float:
        return float(self.surface.b @ (q - self.surface.q0))

    def value(self, q) -> float:
        return self.chain.value(self.coordinate(q))

    def grad(self, q) -> np.ndarray:
        return self.chain.derivative(self.coordinate(q)) * self.surface.b


class NaturalHamiltonian(SmoothHamiltonian):
    """Kinetic plus potential energy ``<p, g^-1(p)> / 2m + U(q)``."""

    def __init__(self, space: MetricSpace, mass: float, potential):
        if not mass > 0.0:
            raise ValueError(f"mass must be positive, got {mass!r}")
        self.space = space
        self.mass = float(mass)
        self.potential = potential

    def kinetic(self, p) -> float:
        return float(p @ self.space.g_inv @ p) / (2.0 * self.mass)

    def value(self, q, p):
        return self.kinetic(p) + self.potential.value(q)

    def grad_q(self, q, p):
        return np.asarray(self.potential.grad(q), dtype=float)

    def grad_p(self, q, p):
        return (self.space.g_inv @ p) / self.mass


class StepChainHamiltonian(NaturalHamiltonian):
    """Natural Hamiltonian whose potential is a :class:`LayeredPotential`."""

    def __init__(self, space: MetricSpace, mass: float, potential: LayeredPotential):
        super().__init__(space, mass, potential)

    @classmethod
    def uniform(cls, space, mass, levels, delta, surface):
        chain = StepChainPotential.uniform(levels, delta)
        return cls(space, mass, LayeredPotential(chain, surface))

    @property
    def surface(self) -> PhaseHyperplane:
        return self.potential.surface

    @property
    def layer_span(self) -> tuple[float, float]:
        return self.potential.chain.span

    def gradient(self, q, p):
        k = self.potential.chain.derivative(self.potential.coordinate(q))
        return k * self.surface.b, self.grad_p(q, p), k


# -- discontinuities ---------------------------------------------------------


@dataclass(frozen=True)
class DiscontinuousPair:
    """Hamiltonian equal to ``h_minus`` where ``A < 0`` and ``h_plus`` where ``A > 0``.

    Both Hamiltonians are defined on the whole phase space.
    """

    h_minus: SmoothHamiltonian
    h_plus: SmoothHamiltonian
    surface: PhaseHyperplane

    def side(self, label: str) -> SmoothHamiltonian:
        """``h_minus`` for ``"MINUS"``, ``h_plus`` for ``"PLUS"``."""
        if label == "MINUS":
            return self.h_minus
        if label == "PLUS":
            return self.h_plus
        raise ValueError(f"side must be MINUS or PLUS, got {label!r}")

    def jump(self, q, p) -> float:
        """``H+(q, p) - H-(q, p)``."""
        return self.h_plus.value(q, p) - self.h_minus.value(q, p)


@dataclass(frozen=True)
class DiscontinuityStack:
    """Several Hamiltonians stacked on one surface, ``H^0`` below to ``H^k`` above.

    This is the zero-width limit of a multi-layer model such as a step chain.
    """

    hamiltonians: tuple
    surface: PhaseHyperplane

    def __post_init__(self):
        object.__setattr__(self, "hamiltonians", tuple(self.hamiltonians))
        if len(self.hamiltonians) < 2:
            raise ValueError("a discontinuity stack needs at least two Hamiltonians")

    @classmethod
    def from_pair(cls, pair: DiscontinuousPair) -> DiscontinuityStack:
        return cls((pair.h_minus, pair.h_plus), pair.surface)

    @property
    def depth(self) -> int:
        return len(self.hamiltonians) - 1

    def pair(self, j: int) -> DiscontinuousPair:
        """Pair formed by levels ``j`` and ``j + 1``."""
        return DiscontinuousPair(self.hamiltonians[j], self.hamiltonians[j + 1], self.surface)


def constant_step_pair(space, mass, U_minus, U_plus, surface) -> DiscontinuousPair:
    """Natural Hamiltonians with constant potentials on either side of ``surface``."""
    return DiscontinuousPair(
        NaturalHamiltonian(space, mass, ConstantPotential(float(U_minus))),
        NaturalHamiltonian(space, mass, ConstantPotential(float(U_plus))),
        surface,
    )


class MollifiedHamiltonian(SmoothHamiltonian):
    r"""Smooth model of a discontinuous pair at width ``delta``.

    .. math::

        H_\delta = \tfrac12(1 - \chi(A))\,H^-(q + g^{-1}(b)\delta, p + g(a)\delta)
                 + \tfrac12(1 + \chi(A))\,H^+(q - g^{-1}(b)\delta, p - g(a)\delta)

    with :math:`\chi` the smooth step over ``layer`` (default ``(-delta, delta)``).
    At the lower layer edge the shifted argument of ``H-`` lies on the surface,
    so a trajectory entering the layer carries the energy ``H-`` has on ``A = 0``.
    """

    def __init__(
        self,
        pair: DiscontinuousPair,
        delta: float,
        layer: StepProfile | None = None,
    ):
        if not delta > 0.0:
            raise ValueError(f"delta must be positive, got {delta!r}")
        self.pair = pair
        self.delta = float(delta)
        self.layer = layer if layer is not None else StepProfile(-delta, delta)
        self.space = pair.surface.space
        self._dq = pair.surface.shift_q * self.delta
        self._dp = pair.surface.shift_p * self.delta

    @property
    def surface(self) -> PhaseHyperplane:
        return self.pair.surface

    @property
    def layer_span(self) -> tuple[float, float]:
        return self.layer.a, self.layer.a_prime

    def _parts(self, q, p):
        A = _eval_A_raw(self.pair.surface, q, p)
        qm, pm = q + self._dq, p + self._dp
        qp, pp = q - self._dq, p - self._dp
        return A, (qm, pm), (qp, pp)

    def value(self, q, p):
        A, (qm, pm), (qp, pp) = self._parts(q, p)
        c = chi_step(self.layer, A)
        if c == -1.0:
            return self.pair.h_minus.value(qm, pm)
        if c == 1.0:
            return self.pair.h_plus.value(qp, pp)
        hm = self.pair.h_minus.value(qm, pm)
        hp = self.pair.h_plus.value(qp, pp)
        return 0.5 * (1.0 - c) * hm + 0.5 * (1.0 + c) * hp

    def gradient(self, q, p):
        """Chain-rule gradient of :meth:`value` and the layer factor ``K``.

        Returns:
            ``(dH/dq, dH/dp, K)`` with
            ``K = (H+(shifted) - H-(shifted)) / 2 * chi'(A)``.
        """
        A, (qm, pm), (qp, pp) = self._parts(q, p)
        c = chi_step(self.layer, A)
        hm_, hp_ = self.pair.h_minus, self.pair.h_plus
        if c == -1.0:
            return hm_.grad_q(qm, pm), hm_.grad_p(qm, pm), 0.0
        if c == 1.0:
            return hp_.grad_q(qp, pp), hp_.grad_p(qp, pp), 0.0
        wm, wp = 0.5 * (1.0 - c), 0.5 * (1.0 + c)
        K = 0.5 * (hp_.value(qp, pp) - hm_.value(qm, pm)) * dchi_step(self.layer, A)
        surface = self.pair.surface
        dq = wm * hm_.grad_q(qm, pm) + wp * hp_.grad_q(qp, pp) + K * surface.b
        dp = wm * hm_.grad_p(qm, pm) + wp * hp_.grad_p(qp, pp) + K * surface.a
        return dq, dp, K

    def grad_q(self, q, p):
        return self.gradient(q, p)[0]

    def grad_p(self, q, p):
        return self.gradient(q, p)[1]

    def divergent_factor(self, q, p) -> float:
        return self.gradient(q, p)[2]


def mollified_value(H: MollifiedHamiltonian, x) -> float:
    return H.value(np.asarray(x.q, dtype=float), np.asarray(x.p, dtype=float))


def mollified_grad(H: MollifiedHamiltonian, x):
    """``(dH/dq, dH/dp, K)`` at the phase point ``x``."""
    return H.gradient(np.asarray(x.q, dtype=float), np.asarray(x.p, dtype=float))
