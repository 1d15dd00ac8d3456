"""Numerical integration of smooth flows and of thin transition layers.

States are flat arrays ``[q, p, t, e]``.  Outside a layer the time
parameterized extended field ``(dH/dp, -dH/dq, 1, 0)`` is integrated.  Inside
a layer the same field is used until the layer factor ``|K|`` exceeds
``k_threshold``; from there on the field is divided by ``|K|`` (the
renormalized field), which traces the same orbit with bounded speed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import _rk
from .errors import DishamError, GrazingContact, NoCrossing, TrappedInLayer
from .geometry import ExtendedPhasePoint, PhaseHyperplane, _eval_A_raw, eval_A, normal_velocity
from .hamiltonian import SmoothHamiltonian
from .homogeneous import EPS_REGION

__all__ = [
    "EPS_TRANSVERSAL",
    "ArcKind",
    "ParamKind",
    "IntegratorConfig",
    "SampledArc",
    "Trajectory",
    "MaxTimeExceeded",
    "integrate_smooth",
    "detect_crossing",
    "integrate_layer",
    "simulate_smooth_scenario",
]

EPS_TRANSVERSAL = 1e-8


class MaxTimeExceeded(DishamError):
    """Requested integration span is longer than ``IntegratorConfig.max_time``."""


class ArcKind(enum.Enum):
    SMOOTH_MINUS = "SMOOTH_MINUS"
    SMOOTH_PLUS = "SMOOTH_PLUS"
    LAYER = "LAYER"
    JUMP = "JUMP"


class ParamKind(enum.Enum):
    TIME = "TIME"
    S_PARAM = "S_PARAM"


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits for every integration.

    ``k_threshold`` is the layer factor above which the renormalized field
    is used.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = 0.1
    event_tol: float = 1e-12
    max_time: float = 100.0
    k_threshold: float = 1e3

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "event_tol", "max_time", "k_threshold"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.event_tol > self.abs_tol:
            raise ValueError("event_tol must not exceed abs_tol")

    def with_overrides(self, **changes) -> IntegratorConfig:
        return replace(self, **changes)


@dataclass(eq=False)
class SampledArc:
    """Sampled curve in extended phase space.

    Attributes:
        kind: Which piece of the trajectory this is.
        parameterization: ``TIME`` arcs use ``t`` itself as parameter.
        params: Strictly increasing parameter values, shape ``(N,)``.
        states: Rows ``[q, p, t, e]``, shape ``(N, 2n + 2)``.
    """

    kind: ArcKind
    parameterization: ParamKind
    params: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float).reshape(-1)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        if self.states.shape[0] != self.params.shape[0]:
            raise ValueError("params and states have different lengths")
        if np.any(np.diff(self.params) <= 0.0):
            raise ValueError("arc parameters must be strictly increasing")
        if self.parameterization is ParamKind.TIME and not np.array_equal(
            self.params, self.states[:, -2]
        ):
            raise ValueError("time parameterized arc must use t as its parameter")

    @property
    def n(self) -> int:
        return (self.states.shape[1] - 2) // 2

    def __len__(self):
        return self.params.shape[0]

    def state(self, i: int) -> ExtendedPhasePoint:
        return ExtendedPhasePoint.from_array(self.states[i])

    @property
    def first(self) -> ExtendedPhasePoint:
        return self.state(0)

    @property
    def last(self) -> ExtendedPhasePoint:
        return self.state(-1)

    @property
    def q(self) -> np.ndarray:
        return self.states[:, : self.n]

    @property
    def p(self) -> np.ndarray:
        return self.states[:, self.n : 2 * self.n]

    @property
    def t(self) -> np.ndarray:
        return self.states[:, -2]

    @property
    def e(self) -> np.ndarray:
        return self.states[:, -1]

    def energy_drift(self, H: SmoothHamiltonian) -> float:
        """``max |H(q, p) - e|`` over the samples."""
        n = self.n
        return max(abs(H.value(row[:n], row[n : 2 * n]) - row[-1]) for row in self.states)


@dataclass(eq=False)
class Trajectory:
    """Ordered list of arcs; consecutive arcs share their junction state."""

    arcs: list = field(default_factory=list)
    label: str = ""
    branch: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def kinds(self) -> list:
        return [arc.kind for arc in self.arcs]

    @property
    def final_state(self) -> ExtendedPhasePoint:
        return self.arcs[-1].last

    @property
    def initial_state(self) -> ExtendedPhasePoint:
        return self.arcs[0].first

    def junction_mismatch(self) -> float:
        """Largest component gap between the end of one arc and the start of the next."""
        worst = 0.0
        for left, right in zip(self.arcs, self.arcs[1:]):
            worst = max(worst, float(np.max(np.abs(left.states[-1] - right.states[0]))))
        return worst

    def check_continuity(self, tol: float = 1e-9) -> None:
        gap = self.junction_mismatch()
        if gap > tol:
            raise DishamError(f"trajectory arcs do not join: junction gap {gap:.3e}")

    def append(self, arc: SampledArc) -> None:
        self.arcs.append(arc)


def _hamilton_rhs(H):
    def rhs(s, y):
        n = (len(y) - 2) // 2
        dq, dp, _ = H.gradient(y[:n], y[n : 2 * n])
        out = np.empty_like(y)
        out[:n] = dp
        out[n : 2 * n] = -dq
        out[2 * n] = 1.0
        out[2 * n + 1] = 0.0
        return out

    return rhs


def _arc_from(result: _rk.RKResult, kind: ArcKind, param_kind: ParamKind) -> SampledArc:
    states = np.array(result.states)
    params = np.array(result.params)
    if param_kind is ParamKind.TIME:
        params = states[:, -2].copy()
    return SampledArc(kind, param_kind, params, states)


def _check_on_shell(H, x: ExtendedPhasePoint):
    drift = abs(H.value(x.q, x.p) - x.e)
    if drift > EPS_REGION * max(1.0, abs(x.e)):
        raise ValueError(f"initial energy is off-shell by {drift:.3e}")


def _flow(H, y0, t_stop, cfg: IntegratorConfig, events=()):
    """Time-parameterized flow of ``H`` from ``y0`` until ``t_stop`` or an event."""
    t0 = float(y0[-2])
    result = _rk.integrate(
        _hamilton_rhs(H), t0, y0, t_stop, cfg.rel_tol, cfg.abs_tol, cfg.max_step, events
    )
    # the integrated t only repeats the parameter with rounding; use the parameter
    for s, y in zip(result.params, result.states):
        y[-2] = s
    return result


def _surface_event(surface: PhaseHyperplane, target: float, direction: int, tol: float, name=""):
    n = surface.space.n

    def g(s, y):
        return _eval_A_raw(surface, y[:n], y[n : 2 * n]) - target

    return _rk.Event(g, direction, tol, name)


def integrate_smooth(
    H: SmoothHamiltonian,
    x0: ExtendedPhasePoint,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    kind: ArcKind = ArcKind.SMOOTH_MINUS,
) -> SampledArc:
    """Integrate Hamilton's equations for ``H`` from ``x0`` to ``t_end``.

    Raises:
        ValueError: if ``t_end <= x0.t`` or ``x0.e`` is not ``H(q0, p0)``.
        MaxTimeExceeded: if ``t_end - x0.t`` exceeds ``cfg.max_time``.
        StepSizeUnderflow: if the adaptive step collapses.
    """
    cfg = cfg or IntegratorConfig()
    if not t_end > x0.t:
        raise ValueError("t_end must be later than the initial time")
    if t_end - x0.t > cfg.max_time:
        raise MaxTimeExceeded(f"span {t_end - x0.t!r} exceeds max_time {cfg.max_time!r}")
    _check_on_shell(H, x0)
    result = _flow(H, x0.as_array(), t_end, cfg)
    return _arc_from(result, kind, ParamKind.TIME)


def _transversality(H, surface, y) -> float:
    n = surface.space.n
    q, p = y[:n], y[n : 2 * n]
    return normal_velocity(surface, H.grad_q(q, p), H.grad_p(q, p))


def detect_crossing(
    H: SmoothHamiltonian,
    x0: ExtendedPhasePoint,
    surface: PhaseHyperplane,
    target_A: float,
    cfg: IntegratorConfig | None = None,
    kind: ArcKind = ArcKind.SMOOTH_MINUS,
):
    """Flow until ``A(q, p) = target_A``.

    Returns:
        ``(event_state, arc)``.  If ``x0`` is already on the level set the
        event is ``x0`` and the arc holds the single sample ``x0``.

    Raises:
        NoCrossing: the level was not reached within ``cfg.max_time``; the
            integrated arc is attached as ``partial``.
        GrazingContact: the flow reaches the level tangentially.
    """
    cfg = cfg or IntegratorConfig()
    y0 = x0.as_array()
    gap = eval_A(surface, x0) - target_A
    if abs(gap) <= cfg.event_tol:
        return x0, SampledArc(kind, ParamKind.TIME, [x0.t], [y0])
    direction = 1 if gap < 0.0 else -1
    event = _surface_event(surface, target_A, direction, cfg.event_tol, "surface")
    result = _flow(H, y0, x0.t + cfg.max_time, cfg, [event])
    arc = _arc_from(result, kind, ParamKind.TIME)
    if result.event is None:
        raise NoCrossing(
            f"no crossing of A = {target_A!r} within max_time {cfg.max_time!r}", partial=arc
        )
    y_ev = result.states[-1]
    if abs(_transversality(H, surface, y_ev)) < EPS_TRANSVERSAL:
        raise GrazingContact(
            "trajectory meets the surface tangentially", state=arc.last, partial=arc
        )
    return arc.last, arc


def _k_factor(H, y) -> float:
    n = (len(y) - 2) // 2
    return H.gradient(y[:n], y[n : 2 * n])[2]


def integrate_layer(
    Hd,
    x_entry: ExtendedPhasePoint,
    cfg: IntegratorConfig | None = None,
    *,
    k_threshold: float | None = None,
    t_stop: float | None = None,
):
    """Integrate through the transition layer of ``Hd`` until it is left.

    ``Hd`` is a layered model (:class:`~disham.hamiltonian.MollifiedHamiltonian`
    or :class:`~disham.hamiltonian.StepChainHamiltonian`).  Wherever
    ``|K| > k_threshold`` the renormalized field is integrated instead of the
    time field; the arc is then parameterized by a layer parameter that
    advances like ``t`` on time segments and like the renormalized parameter
    elsewhere (``S_PARAM``).

    Args:
        k_threshold: Override of ``cfg.k_threshold``; ``math.inf`` disables
            renormalization.
        t_stop: Stop early once ``t`` reaches this value; the exit side is
            then ``None``.

    Returns:
        ``(x_exit, arc, exit_side)`` with ``exit_side`` ``"MINUS"`` (left
        through the lower edge) or ``"PLUS"``.

    Raises:
        TrappedInLayer: no exit within ``cfg.max_time`` of time or layer
            parameter; the partial arc is attached.
    """
    cfg = cfg or IntegratorConfig()
    k_threshold = cfg.k_threshold if k_threshold is None else k_threshold
    if not k_threshold > 0.0:
        raise ValueError("k_threshold must be positive")
    surface = Hd.surface
    lo, hi = Hd.layer_span
    A0 = eval_A(surface, x_entry)
    if not (lo - cfg.event_tol * 10 <= A0 <= hi + cfg.event_tol * 10):
        raise ValueError(f"entry state A = {A0!r} is not in the layer [{lo!r}, {hi!r}]")
    _check_on_shell(Hd, x_entry)

    time_rhs = _hamilton_rhs(Hd)

    def renormalized_rhs(s, y):
        # trial stages can overshoot to where K vanishes; a floor keeps them finite
        return time_rhs(s, y) / max(abs(_k_factor(Hd, y)), 1e-3 * k_threshold)

    exit_lo = _surface_event(surface, lo, -1, cfg.event_tol, "MINUS")
    exit_hi = _surface_event(surface, hi, +1, cfg.event_tol, "PLUS")
    t_limit = x_entry.t + cfg.max_time
    stop_t = min(t_limit, t_stop) if t_stop is not None else t_limit
    time_up = _rk.Event(lambda s, y: y[-2] - stop_t, +1, 1e-14, "time")

    def k_event(direction):
        return _rk.Event(lambda s, y: abs(_k_factor(Hd, y)) - k_threshold, direction, 1e-9, "k")

    y = x_entry.as_array()
    sigma = 0.0
    params, states = [sigma], [y.copy()]
    renormalized_used = False
    renormalized = abs(_k_factor(Hd, y)) > k_threshold
    exit_side = None
    while True:
        if renormalized:
            renormalized_used = True
            events = [exit_lo, exit_hi, time_up, k_event(-1)]
            result = _rk.integrate(
                renormalized_rhs, sigma, y, sigma + cfg.max_time,
                cfg.rel_tol, cfg.abs_tol, cfg.max_step, events,
            )
        else:
            events = [exit_lo, exit_hi, time_up, k_event(+1)]
            result = _rk.integrate(
                time_rhs, sigma, y, sigma + (stop_t - y[-2]),
                cfg.rel_tol, cfg.abs_tol, cfg.max_step, events,
            )
        params.extend(result.params[1:])
        states.extend(result.states[1:])
        sigma, y = result.params[-1], result.states[-1]
        if result.event is not None:
            name = result.event.name
        else:
            # time segments end exactly at stop_t; renormalized ones ran out of parameter
            name = None if renormalized else "time"
        if name == "k":
            renormalized = not renormalized
            continue
        if name in ("MINUS", "PLUS"):
            exit_side = name
            break
        partial = _layer_arc(params, states, renormalized_used, x_entry.t)
        if name == "time" and t_stop is not None and y[-2] >= t_stop - 1e-12:
            return ExtendedPhasePoint.from_array(y), partial, None
        raise TrappedInLayer("trajectory did not leave the layer", partial=partial)

    arc = _layer_arc(params, states, renormalized_used, x_entry.t)
    return ExtendedPhasePoint.from_array(y), arc, exit_side


def _layer_arc(params, states, renormalized_used, t0) -> SampledArc:
    states = np.array(states)
    if renormalized_used:
        return SampledArc(ArcKind.LAYER, ParamKind.S_PARAM, np.array(params), states)
    return SampledArc(ArcKind.LAYER, ParamKind.TIME, states[:, -2].copy(), states)


def simulate_smooth_scenario(
    Hd,
    x0: ExtendedPhasePoint,
    t_end: float,
    cfg: IntegratorConfig | None = None,
    *,
    max_crossings: int = 1000,
) -> Trajectory:
    """Integrate a layered smooth model from ``x0`` up to ``t_end``.

    Free arcs outside the layer alternate with layer arcs produced by
    :func:`integrate_layer`.  ``x0`` must lie outside the layer.

    Raises:
        GrazingContact: a layer edge is met tangentially.
        TrappedInLayer, StepSizeUnderflow: propagated, with the trajectory so
            far attached as ``partial``.
    """
    cfg = cfg or IntegratorConfig()
    if not t_end > x0.t:
        raise ValueError("t_end must be later than the initial time")
    if t_end - x0.t > cfg.max_time:
        raise MaxTimeExceeded(f"span {t_end - x0.t!r} exceeds max_time {cfg.max_time!r}")
    _check_on_shell(Hd, x0)
    surface = Hd.surface
    lo, hi = Hd.layer_span
    A0 = eval_A(surface, x0)
    if lo < A0 < hi:
        raise ValueError("initial state lies inside the transition layer")
    side = "MINUS" if A0 <= lo else "PLUS"
    trajectory = Trajectory(label="smooth")
    y = x0.as_array()

    for _ in range(max_crossings):
        if side == "MINUS":
            event = _surface_event(surface, lo, +1, cfg.event_tol, "enter")
            kind = ArcKind.SMOOTH_MINUS
        else:
            event = _surface_event(surface, hi, -1, cfg.event_tol, "enter")
            kind = ArcKind.SMOOTH_PLUS
        try:
            result = _flow(Hd, y, t_end, cfg, [event])
        except DishamError as exc:
            exc.partial = trajectory
            raise
        arc = _arc_from(result, kind, ParamKind.TIME)
        if len(arc) > 1:
            trajectory.append(arc)
        y = result.states[-1]
        if result.event is None:
            return trajectory
        if abs(_transversality(Hd, surface, y)) < EPS_TRANSVERSAL:
            raise GrazingContact(
                "trajectory meets the layer edge tangentially",
                state=ExtendedPhasePoint.from_array(y),
                partial=trajectory,
            )
        try:
            x_exit, layer_arc, exit_side = integrate_layer(
                Hd, ExtendedPhasePoint.from_array(y), cfg, t_stop=t_end
            )
        except DishamError as exc:
            if exc.partial is not None:
                trajectory.append(exc.partial)
            exc.partial = trajectory
            raise
        trajectory.append(layer_arc)
        y = x_exit.as_array()
        if exit_side is None:
            return trajectory
        side = exit_side
    raise DishamError(f"more than {max_crossings} layer crossings", partial=trajectory)
