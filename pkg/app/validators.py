"""
Input validation utilities.
Provides validation functions for problem-file fields.
"""
import math
import re
from typing import Optional, Sequence, Tuple

from app.constants import (
    FREQUENCIES_AUTO,
    FREQUENCIES_NONE,
    OUTPUT_FORMATS,
    PROBLEM_FORMAT_VERSION,
)

RESERVED_NAMES = ('t', 'D', 'sin', 'cos', 'exp')
IDENTIFIER_PATTERN = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')


def validate_identifier(name: str) -> Tuple[bool, Optional[str]]:
    """
    Validate a coordinate or parameter name.

    Args:
        name: The name to validate

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not name:
        return False, "name is empty"
    if not IDENTIFIER_PATTERN.match(name):
        return False, f"'{name}' is not an identifier"
    if name in RESERVED_NAMES:
        return False, f"'{name}' is reserved"
    return True, None


def validate_coordinates(names: Sequence[str]) -> Tuple[bool, Optional[str]]:
    """Validate the declared coordinate list: nonempty, identifiers, no duplicates."""
    if not names:
        return False, "at least one coordinate is required"
    for name in names:
        is_valid, error = validate_identifier(name)
        if not is_valid:
            return False, error
    if len(set(names)) != len(names):
        return False, "coordinate names must be unique"
    return True, None


def validate_order(order: int) -> Tuple[bool, Optional[str]]:
    if order < 1:
        return False, f"order must be >= 1, got {order}"
    return True, None


def validate_degree(name: str, degree: int) -> Tuple[bool, Optional[str]]:
    if degree < 0:
        return False, f"{name} must be >= 0, got {degree}"
    return True, None


def validate_frequencies_keyword(value: str) -> Tuple[bool, Optional[str]]:
    """Frequencies are 'auto', 'none' or a comma list of rationals (checked by the parser)."""
    if not value.strip():
        return False, f"use '{FREQUENCIES_AUTO}', '{FREQUENCIES_NONE}' or a list of rationals"
    return True, None


def validate_step(step: float, t_end: float) -> Tuple[bool, Optional[str]]:
    """
    Validate the integration grid.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not math.isfinite(step) or step <= 0:
        return False, f"step must be a positive number, got {step}"
    if not math.isfinite(t_end) or t_end < 0:
        return False, f"t_end must be >= 0, got {t_end}"
    return True, None


def validate_tolerance(name: str, value: Optional[float]) -> Tuple[bool, Optional[str]]:
    if value is None:
        return True, None
    if not math.isfinite(value) or value <= 0:
        return False, f"{name} must be positive, got {value}"
    return True, None


def validate_initial_state(values: Sequence[float], dimension: Optional[int] = None) -> Tuple[bool, Optional[str]]:
    if not values:
        return False, "initial state is empty"
    if any(not math.isfinite(v) for v in values):
        return False, "initial state must be finite"
    if dimension is not None and len(values) != dimension:
        return False, f"initial state has {len(values)} values, state dimension is {dimension}"
    return True, None


def validate_format_version(version: int) -> Tuple[bool, Optional[str]]:
    if version != PROBLEM_FORMAT_VERSION:
        return False, f"unsupported format {version}, expected {PROBLEM_FORMAT_VERSION}"
    return True, None


def validate_output_format(name: str) -> Tuple[bool, Optional[str]]:
    if name not in OUTPUT_FORMATS:
        return False, f"format must be one of {', '.join(OUTPUT_FORMATS)}"
    return True, None
