"""
Number formatting utilities for reports.
"""
from fractions import Fraction


def format_rational(value: Fraction) -> str:
    """
    Render a rational as 'p' or 'p/q'.

    Args:
        value: Rational number

    Returns:
        Canonical text with the sign on the numerator
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_float(value: float, digits: int = 3) -> str:
    """
    Scientific notation with a fixed number of significant digits.

    Args:
        value: Number to format
        digits: Significant digits (default: 3)

    Returns:
        e.g. '1.23e-09', or 'inf' / 'nan'
    """
    if value != value:
        return 'nan'
    if value in (float('inf'), float('-inf')):
        return 'inf' if value > 0 else '-inf'
    return f"{value:.{digits - 1}e}"


def format_duration(seconds: float) -> str:
    """
    Convert seconds to a short duration string.

    Args:
        seconds: Elapsed time in seconds

    Returns:
        '850ms' below one second, '2.41s' below a minute, otherwise '[MM:SS]'
    """
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    if seconds < 60:
        return f"{seconds:.2f}s"
    total = int(seconds)
    return f"[{total // 60:02d}:{total % 60:02d}]"
