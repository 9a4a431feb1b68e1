#!/usr/bin/env python3
"""
Tests for the config value validators.
"""

import math

import numpy as np

from affective_polarization.validators import (
    ValidationResult,
    choice,
    float_num,
    integer,
    matrix,
    open_fraction,
    probability,
    sequence,
)


def test_integer_bounds():
    validator = integer(1, 10)
    assert validator.validate(1).is_valid
    assert validator.validate(np.int64(10)).is_valid
    assert not validator.validate(0).is_valid
    assert not validator.validate(11).is_valid
    assert not validator.validate(2.0).is_valid
    assert not validator.validate(True).is_valid
    assert "at least 1" in validator.validate(0).error_message


def test_integer_none_handling():
    assert not integer().validate(None).is_valid
    assert integer(allow_none=True).validate(None).is_valid


def test_float_bounds_and_finiteness():
    validator = float_num(0.0, 0.1, min_inclusive=False)
    assert validator.validate(0.05).is_valid
    assert validator.validate(0.1).is_valid
    assert not validator.validate(0.0).is_valid
    assert "greater than 0.0" in validator.validate(0.0).error_message
    assert not validator.validate(math.inf).is_valid
    assert not validator.validate(math.nan).is_valid
    assert not validator.validate("0.05").is_valid
    assert float_num().validate(-1e9).is_valid


def test_probability_and_open_fraction():
    assert probability().validate(0.0).is_valid
    assert probability().validate(1.0).is_valid
    assert not probability().validate(1.01).is_valid
    assert not open_fraction().validate(0.0).is_valid
    assert not open_fraction().validate(1.0).is_valid
    assert open_fraction().validate(0.18).is_valid
    assert "less than 1.0" in open_fraction().validate(1.0).error_message


def test_choice():
    validator = choice("euler", "rk45")
    assert validator.validate("rk45").is_valid
    result = validator.validate("rk4")
    assert not result
    assert "euler, rk45" in result.error_message


def test_sequence_items_and_length():
    validator = sequence(probability(), min_length=2)
    assert validator.validate([0.1, 0.9]).is_valid
    assert not validator.validate([0.1]).is_valid
    result = validator.validate([0.1, 1.5])
    assert not result.is_valid
    assert result.error_message.startswith("Entry 1")
    assert not validator.validate("0.1 0.9").is_valid
    assert not sequence(max_length=1).validate([1, 2]).is_valid


def test_matrix_shape_and_entries():
    validator = matrix(2)
    assert validator.validate([[1, -1], [-1, 1]]).is_valid
    assert not validator.validate([[1]]).is_valid
    assert not validator.validate([[1, 2], [3]]).is_valid
    assert not validator.validate([[1, math.nan], [0, 1]]).is_valid
    assert "Row 1" in validator.validate([[1, 2], [3]]).error_message


def test_result_truthiness():
    assert ValidationResult(True)
    assert not ValidationResult(False, "bad")
    assert "bad" in repr(ValidationResult(False, "bad"))
