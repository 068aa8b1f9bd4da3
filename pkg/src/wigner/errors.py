"""Exception types shared across the package.

Two families matter to callers. Input/definition problems (malformed
expressions, unknown matrices, bad vector shapes, broken manifest files)
mean the question itself was ill-posed; the CLI maps them to exit code 1.
Verdict failures (the analyzed map turned out not to be a symmetry, or a
reconstruction check did not close) are legitimate analysis outcomes; the
CLI maps them to exit code 2 and still emits a diagnostic report.
"""


class WignerError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(WignerError):
    """A vector or matrix has a dimension inconsistent with the analysis."""


class NonFiniteEvaluation(WignerError):
    """A transformation produced NaN or Inf."""


class DegeneratePair(WignerError):
    """The pair (w, z) is numerically orthogonal; no relative phase exists."""


class NotProbabilityPreserving(WignerError):
    """|<Tw|Tz>| differs from |<w|z>| beyond tolerance."""


class OriginNotFixed(WignerError):
    """T(0) is not the zero vector within tolerance."""


class NotASymmetry(WignerError):
    """The modulus-preservation check failed.

    Carries the failing PreservationReport as `.report` so drivers can emit
    per-pair diagnostics.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MixedBranch(WignerError):
    """Neither Wirtinger block at the origin is negligible (or both are).

    Signals a map that is not twice differentiable, not gauge-fixable, or
    numerically pathological; never forced into a verdict.
    """


class NotUnitary(WignerError):
    """The candidate operator fails M*M = I beyond tolerance."""


class ReconstructionMismatch(WignerError):
    """The origin Jacobian does not reproduce the map away from the origin."""


class ZeroReference(WignerError):
    """Phase alignment was attempted against an all-zero reference matrix."""


class NotUnitaryInput(WignerError):
    """A generator was handed a matrix that is not unitary."""


class NotIsometry(WignerError):
    """The real scalar-product preservation check failed."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotOrthogonal(WignerError):
    """The reconstructed real Jacobian fails O^T O = I beyond tolerance."""


class NotRealMap(WignerError):
    """A map used in the real (Euclidean) analysis returned complex output."""


class ParseError(WignerError):
    """Syntax error in a transform definition file.

    `line` and `column` are 1-based; `expected` lists the token kinds that
    would have been accepted.
    """

    def __init__(self, message, line, column, expected=()):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.expected = tuple(expected)


class UnknownIdentifier(ParseError):
    """An identifier in an expression does not name a variable or function."""


class UnknownMatrix(WignerError):
    """A mat(...) reference has no entry in the constants mapping."""


class DivisionNearZero(WignerError):
    """A division node evaluated with a divisor of modulus below 1e-300."""

    def __init__(self, message, line=0, column=0):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(WignerError):
    """A JSON input file (constants, manifest) violates its schema."""
