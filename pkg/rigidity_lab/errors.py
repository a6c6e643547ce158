"""Error hierarchy for rigidity-lab.

Every failure raised by the analysis modules is a ``RigidityLabError``. Input
problems (wrong shapes, out-of-range parameters) derive from ``InputError``;
mathematical obstructions (a matrix that is not hyperbolic, a cone that is not
preserved) derive from ``DomainError``. The CLI maps the two branches to exit
codes 1 and 2.
"""

from typing import Any, ClassVar

from pydantic_core import to_jsonable_python


def _jsonable_fallback(value: Any) -> Any:
    # numpy arrays and scalars
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


class RigidityLabError(Exception):
    """Base class for all rigidity-lab errors."""

    code: ClassVar[str] = "RigidityLabError"
    exit_code: ClassVar[int] = 1

    def __init__(self, message: str, **details: Any) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            **details: Structured data describing the failure
        """
        super().__init__(message)
        self.message: str = message
        self.details: dict[str, Any] = details

    def to_dict(self) -> dict[str, Any]:
        """Serialize the error for JSON reports.

        Returns:
            Dictionary with the error code, message and details
        """
        return {
            "schema": "v1",
            "error": self.code,
            "message": self.message,
            "details": to_jsonable_python(self.details, fallback=_jsonable_fallback),
        }


class InputError(RigidityLabError):
    """Malformed or out-of-range input."""

    code = "InputError"
    exit_code = 1


class UsageError(InputError):
    """Command-line arguments that do not parse."""

    code = "UsageError"


class DomainError(RigidityLabError):
    """The input is well formed but the mathematics obstructs the request."""

    code = "DomainError"
    exit_code = 2


# matrix-core


class NonSquare(InputError):
    code = "NonSquare"


class ToleranceOutOfRange(InputError):
    code = "ToleranceOutOfRange"


class DimensionMismatch(InputError):
    code = "DimensionMismatch"


class NotHyperbolic(DomainError):
    code = "NotHyperbolic"


class MarginTooLarge(InputError):
    code = "MarginTooLarge"


class NotUnimodular(DomainError):
    code = "NotUnimodular"


# rootdata


class InvalidRank(InputError):
    code = "InvalidRank"


class NotDominant(InputError):
    code = "NotDominant"


class NotIntegral(InputError):
    code = "NotIntegral"


class EmptyWeightSet(InputError):
    code = "EmptyWeightSet"


# nilpotent


class NotNilpotent(DomainError):
    code = "NotNilpotent"


class JacobiViolation(InputError):
    code = "JacobiViolation"


class BracketNotPreserved(DomainError):
    code = "BracketNotPreserved"


class LatticeNotPreserved(DomainError):
    code = "LatticeNotPreserved"


class LevelOutOfRange(InputError):
    code = "LevelOutOfRange"


# semiconj


class NotInvertible(DomainError):
    code = "NotInvertible"


class Budget(DomainError):
    code = "Budget"


class InsufficientSamples(InputError):
    code = "InsufficientSamples"


# cones


class TransversalityFailure(DomainError):
    code = "TransversalityFailure"


class NoFinitePower(DomainError):
    code = "NoFinitePower"


class ConeViolation(DomainError):
    code = "ConeViolation"


# cohomology


class UnknownGenerator(InputError):
    code = "UnknownGenerator"


class Unsolvable(DomainError):
    """The relator equations have no rational solution for this presentation."""

    code = "UNSOLVABLE"
