"""Exception hierarchy for PDDL parsing, binding and grounding."""

from typing import Optional, Sequence


class PddlError(Exception):
    """Base class for every structured PDDL failure.

    Carries an optional source position so callers can report
    ``line:column`` without re-scanning the text.
    """

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __reduce__(self):
        return (self.__class__, (self.message, self.line, self.column))

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"{self.message} (line {self.line})"
        return f"{self.message} (at {self.line}:{self.column})"


class LexError(PddlError):
    """Illegal character or unbalanced parentheses."""


class StructureError(PddlError):
    """Unknown section, malformed typed list or broken invariant."""


class UnsupportedFeature(PddlError):
    """A construct outside the supported typed-STRIPS subset."""


class BindingError(PddlError):
    """An atom references an undeclared symbol or a mistyped object."""


class DomainMismatch(PddlError):
    """A problem names a different domain than the one it is parsed against."""


class PlanFormatError(PddlError):
    """A plan line does not have the ``<digits>: (<name> <args>)`` shape."""


class NonMonotonicTimestamps(PlanFormatError):
    """Plan timestamps do not strictly increase."""


class GroundingError(PddlError):
    """Base class for failures while instantiating an action schema."""


class UnknownAction(GroundingError):
    pass


class UnknownObject(GroundingError):
    pass


class ArityMismatch(GroundingError):
    pass


class TypeMismatch(GroundingError):
    """An argument's type is not a subtype of the parameter type."""

    def __init__(self, message: str, parameter: int, expected: str, received: str):
        self.parameter = parameter
        self.expected = expected
        self.received = received
        super().__init__(message)

    def __reduce__(self):
        return (TypeMismatch, (self.message, self.parameter, self.expected, self.received))


class UndefinedFunctionValue(GroundingError):
    """A cost term has no initial value in the problem."""


class PreconditionViolation(PddlError):
    """``apply`` was called with an inapplicable ground action."""

    def __init__(self, message: str, violated: Sequence):
        self.violated = tuple(violated)
        super().__init__(message)

    def __reduce__(self):
        return (PreconditionViolation, (self.message, self.violated))
