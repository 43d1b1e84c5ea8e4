"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`ChoiCholError`, so callers (and the CLI) can catch one type.
Shape and value problems also derive from :class:`ValueError`.
"""


class ChoiCholError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ChoiCholError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class NonSquare(DimensionMismatch):
    pass


class IndexOutOfRange(ChoiCholError, IndexError):
    pass


class InvalidMatrix(ChoiCholError, ValueError):
    """Non-finite entries or wrong number of axes."""


class NotHermitian(ChoiCholError, ValueError):
    pass


class NotPSD(ChoiCholError, ValueError):
    pass


class NumericalFailure(ChoiCholError, ArithmeticError):
    pass


class EmptyKrausList(ChoiCholError, ValueError):
    pass


class NotPSDBlock(NotPSD):
    """A Schur complement went negative beyond the tolerance."""

    def __init__(self, msg, block=None, min_eigenvalue=None):
        super().__init__(msg)
        self.block = block
        self.min_eigenvalue = min_eigenvalue


class NotUniTriangular(ChoiCholError, ValueError):
    pass


class NotCP(ChoiCholError, ValueError):
    def __init__(self, msg, min_eigenvalue=None):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class NotIsometry(ChoiCholError, ValueError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class UnitarityFailure(ChoiCholError, ArithmeticError):
    pass


class InvalidDimensions(ChoiCholError, ValueError):
    pass


class ParseError(ChoiCholError, ValueError):
    pass
