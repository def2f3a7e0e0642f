"""Desk-scale numerical laboratory for rationally twisted GL(3) exponential sums.

The package is organised bottom-up:

    numtheory    exact arithmetic: Kloosterman sums, sieved tables, twists
    coeffs       Hecke eigenvalue tables (symmetric square lifts, divisor cubed)
    special      log-gamma, gamma quotients, the oscillatory kernel J_{a,j}
    riesz        Riesz-weighted twisted sums and their residue polynomials
    voronoi      dual-side evaluations and identity residuals
    experiments  mean-square, short-interval and extreme-value scans
    cli          command line front end

Everything numerical is float64; errors split into validation versus
numerical certification failures (see :mod:`gl3lab.errors`).
"""

from .errors import (
    BelowThreshold,
    ContourViolation,
    DegenerateInput,
    GammaPole,
    Gl3LabError,
    ImaginaryResidue,
    InsufficientData,
    MissingParameter,
    MissingSeed,
    NonConvergent,
    NonInvertible,
    NotPrime,
    NumericalError,
    OutOfRange,
    ParseError,
    Pole,
    RangeViolation,
    SlowConvergence,
    UnsupportedSource,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "Gl3LabError",
    "ValidationError",
    "NumericalError",
    "NonInvertible",
    "NotPrime",
    "OutOfRange",
    "RangeViolation",
    "MissingSeed",
    "MissingParameter",
    "ParseError",
    "UnsupportedSource",
    "ContourViolation",
    "BelowThreshold",
    "DegenerateInput",
    "InsufficientData",
    "ImaginaryResidue",
    "Pole",
    "GammaPole",
    "NonConvergent",
    "SlowConvergence",
    "__version__",
]
