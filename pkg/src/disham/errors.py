"""Exception types raised by the simulators.

Errors that interrupt a trajectory carry whatever was computed before the
failure in ``partial`` (an arc or a trajectory) so callers can still inspect
or export it.
"""

from __future__ import annotations


class DishamError(Exception):
    """Base class for all simulation errors."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class GrazingContact(DishamError):
    """Trajectory meets a surface tangentially (transversality fails)."""

    def __init__(self, message: str, state=None, partial=None):
        super().__init__(message, partial)
        self.state = state


class NoCrossing(DishamError):
    """The trajectory never reached the target surface within ``max_time``."""


class UnboundedCharacteristic(DishamError):
    """A jump characteristic found no border point before ``s_max``."""


class BandViolation(DishamError):
    """A jump characteristic left the energy band before reaching a border."""


class DegenerateDiscontinuity(DishamError, ValueError):
    """``H+ == H-`` at the impact point, so the jump direction is undefined."""


class TrappedInLayer(DishamError):
    """A layer integration ran out of parameter without leaving the layer."""


class StepSizeUnderflow(DishamError):
    """Adaptive step size collapsed below floating point resolution."""


class ScenarioError(DishamError, ValueError):
    """Malformed or invalid scenario file."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
