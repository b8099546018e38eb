"""Exception hierarchy shared by all modules."""


class QrfError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(QrfError, ValueError):
    """Tensor-factor dimensions do not match the operand."""


class ShapeError(QrfError, ValueError):
    """Operand has the wrong shape or lacks a required symmetry."""


class InputError(QrfError, ValueError):
    """Argument outside the operation's domain."""
