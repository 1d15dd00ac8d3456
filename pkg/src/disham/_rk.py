"""Dormand-Prince 5(4) integrator with PI step control and terminal events.

Events are located by bisection on the sign of the event function, where each
trial point is obtained by re-taking a single Runge-Kutta step of the trial
length from the start of the bracketing step.  This keeps event states as
accurate as ordinary accepted steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StepSizeUnderflow

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class Event:
    """Terminal event ``g(s, y) = 0`` crossed in ``direction``.

    ``direction=+1`` fires when ``g`` goes from negative to non-negative,
    ``-1`` from positive to non-positive.  An event is only armed once ``g``
    has been observed strictly on its starting side, so an integration that
    begins exactly on ``g = 0`` does not fire immediately.
    """

    g: Callable[[float, np.ndarray], float]
    direction: int
    tol: float = 1e-12
    name: str = ""


@dataclass
class RKResult:
    params: list = field(default_factory=list)
    states: list = field(default_factory=list)
    event: Event | None = None
    reached_end: bool = False


def _step(fun, s, y, h, f0):
    k = [f0]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(fun(s + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b != 0.0)
    err = h * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
    return y_new, err, k[6]


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(fun, s0, y0, f0, rtol, atol, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = y0 + h0 * f0
    f1 = fun(s0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def _locate(fun, s0, y0, f0, h, event, g0):
    """Bisect the step ``[s0, s0 + h]`` for the zero of ``event.g``."""
    lo, hi = 0.0, h
    y_hi = None
    y_lo, g_lo = y0, g0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        y_mid, _, _ = _step(fun, s0, y0, mid, f0)
        g_mid = event.g(s0 + mid, y_mid)
        if event.direction * g_mid >= 0.0:
            hi, y_hi, g_hi = mid, y_mid, g_mid
        else:
            lo, y_lo, g_lo = mid, y_mid, g_mid
        if y_hi is not None and abs(g_hi) <= event.tol:
            return s0 + hi, y_hi
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(s0) + abs(h)):
            break
    if y_hi is None:
        y_hi, _, _ = _step(fun, s0, y0, hi, f0)
        g_hi = event.g(s0 + hi, y_hi)
    if lo > 0.0 and abs(g_lo) < abs(g_hi):
        return s0 + lo, y_lo
    return s0 + hi, y_hi


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    s0: float,
    y0: np.ndarray,
    s_end: float,
    rtol: float,
    atol: float,
    max_step: float,
    events: Sequence[Event] = (),
) -> RKResult:
    """Integrate ``dy/ds = fun(s, y)`` from ``s0`` until ``s_end`` or an event.

    Returns every accepted point (including the start).  When an event fires
    the last recorded point is the located event state and ``result.event``
    names the event.

    Raises:
        StepSizeUnderflow: if the step size falls below floating point
            resolution of ``s``.
    """
    y = np.array(y0, dtype=float)
    s = float(s0)
    result = RKResult(params=[s], states=[y.copy()])
    if s_end <= s:
        result.reached_end = True
        return result

    f = fun(s, y)
    g_prev = [ev.g(s, y) for ev in events]
    armed = [ev.direction * gp < 0.0 for ev, gp in zip(events, g_prev)]
    h = _initial_step(fun, s, y, f, rtol, atol, max_step)
    err_prev = 1e-4

    while True:
        h = min(h, max_step, s_end - s)
        if h <= 8 * np.finfo(float).eps * max(1.0, abs(s)):
            raise StepSizeUnderflow(f"step size underflow at s = {s!r}")
        y_new, err, f_new = _step(fun, s, y, h, f)
        err_norm = _error_norm(err, y, y_new, rtol, atol)
        if not np.isfinite(err_norm):
            h *= _MIN_FACTOR
            continue
        if err_norm > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * err_norm ** (-1 / 5))
            continue

        s_new = s + h if s + h < s_end else s_end
        fired = None
        for i, ev in enumerate(events):
            g_new = ev.g(s_new, y_new)
            if armed[i] and ev.direction * g_new >= 0.0:
                # earliest event wins when several fire in one step
                s_ev, y_ev = _locate(fun, s, y, f, h, ev, g_prev[i])
                if fired is None or s_ev < fired[0]:
                    fired = (s_ev, y_ev, ev)
            if ev.direction * g_new < 0.0:
                armed[i] = True
            g_prev[i] = g_new
        if fired is not None:
            s_ev, y_ev, ev = fired
            result.params.append(s_ev)
            result.states.append(y_ev)
            result.event = ev
            return result

        s, y, f = s_new, y_new, f_new
        result.params.append(s)
        result.states.append(y.copy())
        if s >= s_end:
            result.reached_end = True
            return result

        factor = _SAFETY * max(err_norm, 1e-10) ** (-_ALPHA) * err_prev ** _BETA
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        err_prev = max(err_norm, 1e-4)
