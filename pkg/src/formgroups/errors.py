"""Exception hierarchy shared by every module.

The CLI maps :class:`CapacityError` to exit code 2 and every other
:class:`FormGroupError` to exit code 1.
"""


class FormGroupError(Exception):
    """Base class for domain errors."""


class DimensionMismatch(FormGroupError, ValueError):
    """Operands disagree on modulus or length."""


class CapacityError(FormGroupError):
    """An exhaustive pass would exceed its configured bound."""


class PreconditionError(FormGroupError):
    """Inputs violate a documented precondition."""


class InfeasibleError(FormGroupError):
    """A constructive procedure cannot satisfy one of its conditions."""


class StructuralError(FormGroupError):
    """Group data does not have the shape an operation requires."""
