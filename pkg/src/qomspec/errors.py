"""Exception hierarchy shared by all modules.

Two families matter for scripting: input/validation problems (CLI exit
code 2) and numerical failures (exit code 3).
"""


class QomspecError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class ValidationError(QomspecError):
    """Bad input: configuration, grids, sweep specs, preconditions."""

    exit_code = 2


class ParamError(ValidationError):
    """Invalid or missing physical parameter."""


class GridError(ValidationError):
    """Malformed detuning or sweep grid."""


class NumericalError(QomspecError):
    """A numerical procedure failed to produce a trustworthy result."""

    exit_code = 3


class FixedPointError(NumericalError):
    """Inner inversion fixed point did not converge (pathological parameters)."""


class BracketRangeError(NumericalError):
    """Root scan found no usable bracket; the search range must be widened."""


class SingularResponseError(NumericalError):
    """Sideband denominator collapsed; response is at an exact pole."""


class BranchSelectionError(ValidationError):
    """More than one stable steady branch; an explicit branch index is required."""


class UnstableOperatingPointError(NumericalError):
    """Requested operation needs a stable fixed point and none was selected."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class StiffnessError(NumericalError):
    """Adaptive step size underflowed; the integrator cannot proceed."""


class DivergenceError(NumericalError):
    """Trajectory amplitude blew up (unstable branch reached)."""


class WindowAlignmentError(ValidationError):
    """Harmonic-extraction window does not span an integer number of periods."""
