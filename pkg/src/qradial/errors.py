"""Exception types shared across the package."""


class QRadialError(Exception):
    """Base class for all package errors."""


class ValidationError(QRadialError, ValueError):
    """Invalid parameters or malformed input data."""


class NonConvergent(QRadialError, ArithmeticError):
    """An iterative procedure hit its cap before meeting its tolerance."""


class PoleError(QRadialError, ArithmeticError):
    """Evaluation at (or numerically at) a pole."""


class DivisionByZero(QRadialError, ZeroDivisionError):
    """A denominator q-Pochhammer factor vanished."""


class CapacityError(QRadialError, MemoryError):
    """A truncated index set exceeds the configured size cap."""
