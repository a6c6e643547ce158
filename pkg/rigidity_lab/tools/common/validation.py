"""Parameter validation for rigidity-lab tools and CLI inputs."""

import json
import math
from typing import final


@final
class ValidationResult:
    """Result of a parameter validation."""

    def __init__(self, is_valid: bool, error_message: str = ""):
        """Initialize a validation result.

        Args:
            is_valid: Whether the parameter is valid
            error_message: Optional error message for invalid parameters
        """
        self.is_valid: bool = is_valid
        self.error_message: str = error_message

    @property
    def is_error(self) -> bool:
        return not self.is_valid


def validate_json_parameter(text: str | None, parameter_name: str) -> ValidationResult:
    """Check that an inline document is present and decodes as JSON."""
    if text is None or text.strip() == "":
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' is required but was empty",
        )
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' is not valid JSON: {e.msg}",
        )
    return ValidationResult(is_valid=True)


def validate_tolerance(
    value: float | None,
    parameter_name: str = "tol",
    upper: float = 0.5,
    inclusive_upper: bool = False,
) -> ValidationResult:
    """Check that a tolerance lies in (0, upper) (or (0, upper] when inclusive)."""
    if value is None:
        return ValidationResult(is_valid=True)
    if not math.isfinite(value) or value <= 0.0:
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' must be positive, got {value}",
        )
    too_large = value > upper if inclusive_upper else value >= upper
    if too_large:
        bracket = "]" if inclusive_upper else ")"
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' must lie in (0, {upper}{bracket}, got {value}",
        )
    return ValidationResult(is_valid=True)


def validate_positive_int(
    value: int | None, parameter_name: str, maximum: int | None = None
) -> ValidationResult:
    """Check that an integer parameter is at least 1 and at most ``maximum``."""
    if value is None:
        return ValidationResult(is_valid=True)
    if value < 1:
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' must be at least 1, got {value}",
        )
    if maximum is not None and value > maximum:
        return ValidationResult(
            is_valid=False,
            error_message=f"Parameter '{parameter_name}' must be at most {maximum}, got {value}",
        )
    return ValidationResult(is_valid=True)
