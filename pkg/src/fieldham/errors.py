"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for unreadable input, 3 for representation obstructions (including failed
preconditions), 4 for gauge or coordinate degeneracy and 5 for numerical
instability.
"""

from __future__ import annotations


class FieldhamError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidArgumentError(FieldhamError, ValueError):
    """An argument is outside the supported range or malformed."""

    exit_code = 2


class AmbiguousLiftError(InvalidArgumentError):
    """An angle step of exactly pi has no unique nearest lift."""

    def __init__(self, index: int, step: float):
        super().__init__(f"ambiguous step of magnitude pi at index {index} (raw step {step!r})")
        self.index = index
        self.step = step


class ParseError(InvalidArgumentError):
    """A field file could not be parsed or validated."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class DomainError(FieldhamError, ValueError):
    """A point lies outside the fibre domain."""

    exit_code = 3

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class RepresentationError(FieldhamError):
    """A construction is obstructed: the field cannot be represented as asked."""

    exit_code = 3
    stage = "representation"


class PreconditionError(RepresentationError):
    """A documented precondition does not hold; ``witness`` locates a violation."""

    stage = "precondition"

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class TransversalityError(PreconditionError):
    """The chosen angle is not strictly increasing along the field."""

    stage = "transversality"


class NoGlobalSectionError(PreconditionError):
    """No integer angle combination is transverse to the field.

    ``reports`` holds one candidate report per scanned angle.
    """

    stage = "global-section"

    def __init__(self, message: str, reports=()):
        super().__init__(message)
        self.reports = list(reports)


class CohomologyObstructionError(RepresentationError):
    """A two-form that should be exact has nonzero total integral."""

    stage = "cohomology-obstruction"

    def __init__(self, message: str, integral: float):
        super().__init__(message)
        self.integral = integral


class NonExactError(RepresentationError):
    """The family of closed one-forms has a nonzero loop period."""

    stage = "cohomology-period"

    def __init__(self, message: str, periods=None):
        super().__init__(message)
        self.periods = periods


class DegeneracyError(RepresentationError):
    """An area form vanishes or changes sign on the fibre."""

    stage = "degeneracy"

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class RepresentationFailureError(RepresentationError):
    """A pipeline residual exceeded its acceptance threshold."""

    stage = "residual"

    def __init__(self, message: str, worst_index: int | None = None, value: float | None = None):
        super().__init__(message)
        self.worst_index = worst_index
        self.value = value


class GaugeError(FieldhamError):
    """A gauge or coordinate construction degenerates."""

    exit_code = 4


class DegenerateTransformationError(GaugeError):
    """The flux-coordinate Jacobian vanishes on a set of nodes."""

    def __init__(self, message: str, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class SingularGaugeError(GaugeError):
    """The radial-gauge integrand is unbounded near the axis."""


class NumericalError(FieldhamError):
    """A numerical procedure failed to produce a trustworthy result."""

    exit_code = 5


class StagnationError(NumericalError):
    """The field vanishes at the seed of a trace."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class StiffnessError(NumericalError):
    """The adaptive step size underflowed."""


class InstabilityError(NumericalError):
    """A flow left the fibre or an iteration diverged."""


class BoundaryExitError(NumericalError):
    """A traced orbit left the closed domain."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point
