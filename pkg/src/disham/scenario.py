"""Scenario files: flat ``key = value`` text describing one experiment.

Example::

    # particle hitting a potential step
    dim = 1
    mass = 1
    surface.b = 1
    levels = 0, 1
    init.q = -1
    init.p = 1
    t_end = 3
    mode = limit

Arrays are comma separated, ``#`` starts a comment.  Unset keys take the
defaults listed in :data:`DEFAULTS`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import IntegratorConfig
from .errors import ScenarioError
from .geometry import ExtendedPhasePoint, MetricSpace, PhaseHyperplane, PhasePoint, eval_A, normalize_surface
from .hamiltonian import (
    ConstantPotential,
    DiscontinuityStack,
    DiscontinuousPair,
    MollifiedHamiltonian,
    NaturalHamiltonian,
    StepChainHamiltonian,
)
from .homogeneous import EPS_REGION

__all__ = ["Mode", "Scenario", "parse_scenario", "load_scenario", "format_scenario", "DEFAULTS"]

KEYS = (
    "dim",
    "metric",
    "mass",
    "surface.q0",
    "surface.p0",
    "surface.a",
    "surface.b",
    "levels",
    "deltas",
    "init.q",
    "init.p",
    "init.t",
    "t_end",
    "mode",
    "tol.rel",
    "tol.abs",
)
REQUIRED = ("dim", "mass", "surface.b", "levels", "init.q", "init.p", "t_end")
DEFAULTS = {
    "metric": "identity",
    "surface.q0": "origin",
    "surface.p0": "origin",
    "surface.a": "zero",
    "deltas": "none",
    "init.t": "0",
    "mode": "limit",
    "tol.rel": repr(IntegratorConfig.rel_tol),
    "tol.abs": repr(IntegratorConfig.abs_tol),
}


class Mode(enum.Enum):
    SMOOTH = "smooth"
    LIMIT = "limit"
    VINOGRADOV = "vinogradov"
    COMPARE = "compare"

    @classmethod
    def parse(cls, text: str) -> Mode:
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown mode {text!r}; expected one of {names}") from None


@dataclass(eq=False)
class Scenario:
    """A validated scenario.

    The surface is stored normalized; ``notices`` records any rescaling.
    """

    dimension: int
    metric: np.ndarray
    mass: float
    surface: PhaseHyperplane
    levels: tuple
    deltas: tuple
    init_q: np.ndarray
    init_p: np.ndarray
    init_t: float
    t_end: float
    mode: Mode
    rel_tol: float
    abs_tol: float
    name: str = "scenario"
    notices: list = field(default_factory=list)

    @property
    def space(self) -> MetricSpace:
        return self.surface.space

    @property
    def hamiltonians(self) -> list:
        return [NaturalHamiltonian(self.space, self.mass, ConstantPotential(u)) for u in self.levels]

    @property
    def pair(self) -> DiscontinuousPair:
        """Outermost pair: bottom and top level."""
        hs = self.hamiltonians
        return DiscontinuousPair(hs[0], hs[-1], self.surface)

    @property
    def stack(self) -> DiscontinuityStack:
        return DiscontinuityStack(self.hamiltonians, self.surface)

    @property
    def start_side(self) -> str:
        return "MINUS" if eval_A(self.surface, PhasePoint(self.init_q, self.init_p)) < 0 else "PLUS"

    @property
    def initial_energy(self) -> float:
        H = self.hamiltonians[0 if self.start_side == "MINUS" else -1]
        return H.value(self.init_q, self.init_p)

    @property
    def initial_state(self) -> ExtendedPhasePoint:
        return ExtendedPhasePoint(self.init_q, self.init_p, self.init_t, self.initial_energy)

    def config(self) -> IntegratorConfig:
        # the scenario span is the search horizon
        return IntegratorConfig(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            event_tol=min(IntegratorConfig.event_tol, self.abs_tol),
            max_time=self.t_end - self.init_t,
        )

    def smooth_model(self, delta: float):
        """Smooth Hamiltonian of width ``delta``.

        Two levels give the mollified pair; longer chains give consecutive
        layers on ``(0, delta)`` and need a configuration surface.
        """
        if len(self.levels) == 2:
            return MollifiedHamiltonian(self.pair, delta)
        if not self.surface.is_configuration_only:
            raise ValueError("layered chains need surface.a = 0")
        return StepChainHamiltonian.uniform(self.space, self.mass, self.levels, delta, self.surface)


def _floats(text: str, key: str, line: int) -> list:
    try:
        values = [float(tok) for tok in text.split(",")]
    except ValueError:
        raise ScenarioError(f"{key}: expected comma separated numbers, got {text!r}", line) from None
    if not all(math.isfinite(v) for v in values):
        raise ScenarioError(f"{key}: values must be finite", line)
    return values


def _vector(entries: dict, key: str, n: int) -> np.ndarray:
    if key not in entries:
        return np.zeros(n)
    text, line = entries[key]
    values = _floats(text, key, line)
    if len(values) != n:
        raise ScenarioError(f"{key}: expected {n} entries, got {len(values)}", line)
    return np.array(values)


def _scalar(entries: dict, key: str, default: float | None = None) -> float:
    if key not in entries:
        return default
    text, line = entries[key]
    values = _floats(text, key, line)
    if len(values) != 1:
        raise ScenarioError(f"{key}: expected a single number", line)
    return values[0]


def _read_entries(text: str) -> dict:
    entries = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioError(f"expected 'key = value', got {body!r}", number)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in KEYS:
            raise ScenarioError(f"unknown key {key!r}", number)
        if key in entries:
            raise ScenarioError(f"duplicate key {key!r} (first set on line {entries[key][1]})", number)
        if not value:
            raise ScenarioError(f"{key}: empty value", number)
        entries[key] = (value, number)
    missing = [k for k in REQUIRED if k not in entries]
    if missing:
        raise ScenarioError("missing required key(s): " + ", ".join(missing))
    return entries


def parse_scenario(text: str, name: str = "scenario", overrides: dict | None = None) -> Scenario:
    """Parse and validate scenario text.

    Args:
        text: File content.
        name: Scenario name used for output files.
        overrides: ``key -> value text`` pairs that replace file entries
            before validation (used by command-line flags).

    Raises:
        ScenarioError: on any schema violation, anchored to the offending line
            where there is one.
    """
    entries = _read_entries(text)
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ScenarioError(f"unknown key {key!r}")
        entries[key] = (value, None)
    line_of = {k: v[1] for k, v in entries.items()}

    dim_value = _scalar(entries, "dim")
    if dim_value != int(dim_value) or dim_value < 1:
        raise ScenarioError("dim: expected a positive integer", line_of["dim"])
    n = int(dim_value)

    if "metric" in entries:
        text_m, line = entries["metric"]
        values = _floats(text_m, "metric", line)
        if len(values) == n * n:
            g = np.array(values).reshape(n, n)
        elif len(values) == n:
            g = np.diag(values)
        else:
            raise ScenarioError(f"metric: expected {n * n} entries (or {n} diagonal entries)", line)
        try:
            space = MetricSpace(g)
        except ValueError as exc:
            raise ScenarioError(f"metric: {exc}", line) from None
    else:
        space = MetricSpace.euclidean(n)

    mass = _scalar(entries, "mass")
    if not mass > 0.0:
        raise ScenarioError("mass: must be positive", line_of["mass"])

    q0 = _vector(entries, "surface.q0", n)
    p0 = _vector(entries, "surface.p0", n)
    a_raw = _vector(entries, "surface.a", n)
    b_raw = _vector(entries, "surface.b", n)
    try:
        surface = normalize_surface(q0, p0, a_raw, b_raw, space)
    except ValueError as exc:
        raise ScenarioError(f"surface: {exc}", line_of["surface.b"]) from None
    notices = []
    scale = float(np.sqrt(space.norm2_vector(a_raw) + space.norm2_covector(b_raw)))
    if abs(scale - 1.0) > 1e-12:
        notices.append(f"surface (a, b) normalized: divided by {scale!r}")

    text_l, line = entries["levels"]
    levels = tuple(_floats(text_l, "levels", line))
    if len(levels) < 2:
        raise ScenarioError("levels: need at least two potential levels", line)

    deltas = ()
    if "deltas" in entries:
        text_d, line = entries["deltas"]
        deltas = tuple(_floats(text_d, "deltas", line))
        if not all(d > 0.0 for d in deltas):
            raise ScenarioError("deltas: layer widths must be positive", line)

    init_q = _vector(entries, "init.q", n)
    init_p = _vector(entries, "init.p", n)
    init_t = _scalar(entries, "init.t", 0.0)
    t_end = _scalar(entries, "t_end")
    if not t_end > init_t:
        raise ScenarioError("t_end: must be later than init.t", line_of["t_end"])

    mode = Mode.LIMIT
    if "mode" in entries:
        try:
            mode = Mode.parse(entries["mode"][0])
        except ValueError as exc:
            raise ScenarioError(f"mode: {exc}", line_of["mode"]) from None
    if mode in (Mode.SMOOTH, Mode.COMPARE) and not deltas:
        raise ScenarioError(f"mode {mode.value} needs 'deltas'", line_of.get("mode"))
    if mode in (Mode.SMOOTH, Mode.COMPARE) and len(levels) > 2 and not surface.is_configuration_only:
        raise ScenarioError("layered chains need surface.a = 0", line_of.get("surface.a"))
    if mode is Mode.VINOGRADOV and (len(levels) != 2 or not surface.is_configuration_only):
        raise ScenarioError(
            "mode vinogradov needs exactly two levels and surface.a = 0", line_of.get("mode")
        )

    rel_tol = _scalar(entries, "tol.rel", IntegratorConfig.rel_tol)
    abs_tol = _scalar(entries, "tol.abs", IntegratorConfig.abs_tol)
    for key, value in (("tol.rel", rel_tol), ("tol.abs", abs_tol)):
        if not value > 0.0:
            raise ScenarioError(f"{key}: must be positive", line_of.get(key))

    scenario = Scenario(
        dimension=n,
        metric=space.g,
        mass=mass,
        surface=surface,
        levels=levels,
        deltas=deltas,
        init_q=init_q,
        init_p=init_p,
        init_t=init_t,
        t_end=t_end,
        mode=mode,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        name=name,
        notices=notices,
    )
    A_init = eval_A(surface, PhasePoint(init_q, init_p))
    if abs(A_init) <= EPS_REGION:
        raise ScenarioError("init: initial state lies on the discontinuity surface", line_of["init.q"])
    return scenario


def load_scenario(path, overrides: dict | None = None) -> Scenario:
    """Read a scenario file; the file stem becomes the scenario name."""
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem, overrides=overrides)


def _fmt(values) -> str:
    return ", ".join(repr(float(v)) for v in np.ravel(values))


def format_scenario(scenario: Scenario) -> str:
    """Canonical text for ``scenario``; parsing it gives the same scenario."""
    s = scenario.surface
    lines = [
        f"dim = {scenario.dimension}",
        f"metric = {_fmt(scenario.metric)}",
        f"mass = {scenario.mass!r}",
        f"surface.q0 = {_fmt(s.q0)}",
        f"surface.p0 = {_fmt(s.p0)}",
        f"surface.a = {_fmt(s.a)}",
        f"surface.b = {_fmt(s.b)}",
        f"levels = {_fmt(scenario.levels)}",
    ]
    if scenario.deltas:
        lines.append(f"deltas = {_fmt(scenario.deltas)}")
    lines += [
        f"init.q = {_fmt(scenario.init_q)}",
        f"init.p = {_fmt(scenario.init_p)}",
        f"init.t = {scenario.init_t!r}",
        f"t_end = {scenario.t_end!r}",
        f"mode = {scenario.mode.value}",
        f"tol.rel = {scenario.rel_tol!r}",
        f"tol.abs = {scenario.abs_tol!r}",
    ]
    return "\n".join(lines) + "\n"
