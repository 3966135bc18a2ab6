"""Exception hierarchy.

Everything numerical derives from ``NumericalError`` so the CLI can map it to
exit status 3 with a single ``except``.
"""


class NhjumpError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(NhjumpError, ValueError):
    pass


class LengthMismatch(NhjumpError, ValueError):
    pass


class InvalidCap(NhjumpError, ValueError):
    pass


class IndexOutOfRange(NhjumpError, IndexError):
    pass


class InvalidState(NhjumpError, ValueError):
    """Initial density matrix is not Hermitian, PSD and unit-trace."""


class NumericalError(NhjumpError, ArithmeticError):
    pass


class DefectiveMatrix(NumericalError):
    """Eigendecomposition residuals too large: the input is (numerically) non-diagonalizable."""


class SingularFactor(NumericalError):
    pass


class VanishingNorm(NumericalError):
    """Trace collapsed before renormalization."""


class DegenerateCoupling(NumericalError):
    pass


class SingularNormalization(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class BranchAmbiguity(NumericalError):
    pass


class VanishingDissipation(NumericalError):
    pass


class InvariantViolation(NumericalError):
    """A property that must hold by construction failed numerically."""
