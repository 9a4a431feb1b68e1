"""
Validation system for run-configuration values.

Provides the bounded number, choice, list and matrix validators used by
the config schemas. Each schema field attaches one validator; a failed
:class:`ValidationResult` becomes a :class:`~.errors.ConfigError` naming the
field.
"""
import math
from abc import ABC, abstractmethod
from numbers import Integral, Real
from typing import Any, Optional, Sequence


class ValidationResult:
    """Result of a validation check."""

    def __init__(self, is_valid: bool, error_message: str = ""):
        self.is_valid = is_valid
        self.error_message = error_message

    def __bool__(self):
        return self.is_valid

    def __repr__(self):
        return f"ValidationResult({self.is_valid}, {self.error_message!r})"


class Validator(ABC):
    """Base class for all validators."""

    @abstractmethod
    def validate(self, value: Any) -> ValidationResult:
        """Validate the given value."""
        pass

    @property
    def allow_none(self) -> bool:
        """Whether a missing (None) value is considered valid."""
        return False


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


class IntegerValidator(Validator):
    """Validates integer values with optional min/max bounds."""

    def __init__(self, min_value: Optional[int] = None, max_value: Optional[int] = None,
                 allow_none: bool = False):
        self.min_value = min_value
        self.max_value = max_value
        self._allow_none = allow_none

    @property
    def allow_none(self) -> bool:
        return self._allow_none

    def validate(self, value: Any) -> ValidationResult:
        if value is None:
            if self.allow_none:
                return ValidationResult(True)
            return ValidationResult(False, "Integer value is required")

        if not isinstance(value, Integral) or isinstance(value, bool):
            return ValidationResult(False, f"Expected an integer, got {value!r}")

        if self.min_value is not None and value < self.min_value:
            return ValidationResult(False, f"Value must be at least {self.min_value}")

        if self.max_value is not None and value > self.max_value:
            return ValidationResult(False, f"Value must be at most {self.max_value}")

        return ValidationResult(True)


class FloatValidator(Validator):
    """Validates finite real values with optional, optionally open, bounds."""

    def __init__(self, min_value: Optional[float] = None, max_value: Optional[float] = None,
                 min_inclusive: bool = True, max_inclusive: bool = True,
                 allow_none: bool = False):
        self.min_value = min_value
        self.max_value = max_value
        self.min_inclusive = min_inclusive
        self.max_inclusive = max_inclusive
        self._allow_none = allow_none

    @property
    def allow_none(self) -> bool:
        return self._allow_none

    def validate(self, value: Any) -> ValidationResult:
        if value is None:
            if self.allow_none:
                return ValidationResult(True)
            return ValidationResult(False, "Number is required")

        if not _is_number(value):
            return ValidationResult(False, f"Expected a number, got {value!r}")
        if not math.isfinite(value):
            return ValidationResult(False, "Value must be finite")

        if self.min_value is not None:
            if value < self.min_value or (value == self.min_value and not self.min_inclusive):
                bound = "at least" if self.min_inclusive else "greater than"
                return ValidationResult(False, f"Value must be {bound} {self.min_value}")

        if self.max_value is not None:
            if value > self.max_value or (value == self.max_value and not self.max_inclusive):
                bound = "at most" if self.max_inclusive else "less than"
                return ValidationResult(False, f"Value must be {bound} {self.max_value}")

        return ValidationResult(True)


class ChoiceValidator(Validator):
    """Validates that a value is one of a fixed set of choices."""

    def __init__(self, choices: Sequence[Any], allow_none: bool = False):
        self.choices = tuple(choices)
        self._allow_none = allow_none

    @property
    def allow_none(self) -> bool:
        return self._allow_none

    def validate(self, value: Any) -> ValidationResult:
        if value is None and self.allow_none:
            return ValidationResult(True)
        if value in self.choices:
            return ValidationResult(True)
        options = ", ".join(str(c) for c in self.choices)
        return ValidationResult(False, f"Expected one of: {options}; got {value!r}")


class SequenceValidator(Validator):
    """Validates a list whose items all pass ``item_validator``."""

    def __init__(self, item_validator: Optional[Validator] = None,
                 min_length: Optional[int] = None, max_length: Optional[int] = None,
                 allow_none: bool = False):
        self.item_validator = item_validator
        self.min_length = min_length
        self.max_length = max_length
        self._allow_none = allow_none

    @property
    def allow_none(self) -> bool:
        return self._allow_none

    def validate(self, value: Any) -> ValidationResult:
        if value is None:
            if self.allow_none:
                return ValidationResult(True)
            return ValidationResult(False, "List is required")

        if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
            return ValidationResult(False, f"Expected a list, got {value!r}")

        if self.min_length is not None and len(value) < self.min_length:
            return ValidationResult(False, f"Must have at least {self.min_length} entries")
        if self.max_length is not None and len(value) > self.max_length:
            return ValidationResult(False, f"Must have at most {self.max_length} entries")

        if self.item_validator is not None:
            for index, item in enumerate(value):
                result = self.item_validator.validate(item)
                if not result:
                    return ValidationResult(False, f"Entry {index}: {result.error_message}")

        return ValidationResult(True)


class MatrixValidator(Validator):
    """Validates a square list-of-lists of finite numbers."""

    def __init__(self, min_size: int = 1, allow_none: bool = False):
        self.min_size = min_size
        self._allow_none = allow_none

    @property
    def allow_none(self) -> bool:
        return self._allow_none

    def validate(self, value: Any) -> ValidationResult:
        if value is None:
            if self.allow_none:
                return ValidationResult(True)
            return ValidationResult(False, "Matrix is required")

        if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
            return ValidationResult(False, "Expected a list of rows")
        size = len(value)
        if size < self.min_size:
            return ValidationResult(False, f"Matrix must be at least {self.min_size}x{self.min_size}")

        for i, row in enumerate(value):
            if isinstance(row, (str, bytes)) or not isinstance(row, Sequence) or len(row) != size:
                return ValidationResult(False, f"Row {i} must have {size} entries")
            for entry in row:
                if not _is_number(entry) or not math.isfinite(entry):
                    return ValidationResult(False, f"Row {i} holds a non-finite entry {entry!r}")

        return ValidationResult(True)


# Convenience functions for common validators
def integer(min_value: Optional[int] = None, max_value: Optional[int] = None,
            allow_none: bool = False) -> IntegerValidator:
    """Create an integer validator."""
    return IntegerValidator(min_value=min_value, max_value=max_value, allow_none=allow_none)


def float_num(min_value: Optional[float] = None, max_value: Optional[float] = None,
              min_inclusive: bool = True, max_inclusive: bool = True,
              allow_none: bool = False) -> FloatValidator:
    """Create a float validator."""
    return FloatValidator(min_value=min_value, max_value=max_value,
                          min_inclusive=min_inclusive, max_inclusive=max_inclusive,
                          allow_none=allow_none)


def probability(allow_none: bool = False) -> FloatValidator:
    """A value in the closed unit interval."""
    return FloatValidator(0.0, 1.0, allow_none=allow_none)


def open_fraction(allow_none: bool = False) -> FloatValidator:
    """A value in the open unit interval."""
    return FloatValidator(0.0, 1.0, min_inclusive=False, max_inclusive=False,
                          allow_none=allow_none)


def choice(*choices: Any, allow_none: bool = False) -> ChoiceValidator:
    """Create a choice validator."""
    return ChoiceValidator(choices, allow_none=allow_none)


def sequence(item_validator: Optional[Validator] = None, min_length: Optional[int] = None,
             max_length: Optional[int] = None, allow_none: bool = False) -> SequenceValidator:
    """Create a list validator."""
    return SequenceValidator(item_validator, min_length=min_length, max_length=max_length,
                             allow_none=allow_none)


def matrix(min_size: int = 1, allow_none: bool = False) -> MatrixValidator:
    """Create a square-matrix validator."""
    return MatrixValidator(min_size=min_size, allow_none=allow_none)

