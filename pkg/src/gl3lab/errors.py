"""Exception taxonomy shared by all gl3lab modules.

Validation errors (bad arguments, unusable inputs) and numerical errors
(a computation that ran but could not certify its result) are kept in
separate branches so the command line tool can map them to distinct
exit codes.
"""


class Gl3LabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(Gl3LabError):
    """Arguments violate a documented precondition."""


class NumericalError(Gl3LabError):
    """A computation could not certify the requested accuracy."""


# -- validation branch ------------------------------------------------------

class NonInvertible(ValidationError):
    """Residue is not invertible modulo k."""


class NotPrime(ValidationError):
    """A prime modulus was required."""


class OutOfRange(ValidationError):
    """Index exceeds the built table."""


class RangeViolation(ValidationError):
    """A parameter leaves the window where the target statement applies."""


class MissingSeed(ValidationError):
    """Hecke seed data does not cover every prime up to the requested bound."""


class MissingParameter(ValidationError):
    """An input file lacks a required field."""


class ParseError(ValidationError):
    """An input file line could not be parsed."""

    def __init__(self, message, path=None, line_number=None):
        self.path = path
        self.line_number = line_number
        if line_number is not None:
            message = f"{path or '<input>'}:{line_number}: {message}"
        super().__init__(message)


class UnsupportedSource(ValidationError):
    """The coefficient source cannot provide the requested value."""


class ContourViolation(ValidationError):
    """Contour parameters violate an admissibility constraint."""


class BelowThreshold(ValidationError):
    """Argument is below the validity threshold of an asymptotic formula."""


class DegenerateInput(ValidationError):
    """Input data is degenerate (e.g. a fit over fewer than three points)."""


class InsufficientData(ValidationError):
    """Not enough table data to run the requested diagnostic."""


# -- numerical branch -------------------------------------------------------

class ImaginaryResidue(NumericalError):
    """A quantity that must be real carried a non-negligible imaginary part."""


class Pole(NumericalError):
    """Evaluation point coincides with a pole."""


class GammaPole(NumericalError):
    """A gamma factor degenerates at the requested point."""


class NonConvergent(NumericalError):
    """Quadrature tail estimate exceeds the acceptable fraction of the value."""


class SlowConvergence(NumericalError):
    """Series tail cannot reach the requested tolerance at the available size."""
