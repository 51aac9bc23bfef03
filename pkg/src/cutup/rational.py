"""Exact rational time values and their wire representation.

All timestamps and durations move through the pipeline as `fractions.Fraction`
seconds so that segment partitions, clip tilings, and overlap fractions can be
checked with zero tolerance.  On the wire they are decimal strings ("61.5"),
falling back to "num/den" for values with no finite decimal expansion
(e.g. NTSC frame rates).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError

MILLISECOND = Fraction(1, 1000)


def parse_seconds(value: str | int | float, field: str = "time") -> Fraction:
    """Parse a wire-format time: decimal string, "num/den" string, or JSON number."""
    try:
        if isinstance(value, float):
            # JSON numbers arrive as floats; take the exact binary value.
            return Fraction(value)
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"cannot parse {field} value {value!r} as a rational") from exc


def format_seconds(value: Fraction) -> str:
    """Exact string form of a rational: finite decimal when one exists, else num/den."""
    num, den = value.numerator, value.denominator
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{num}/{den}"
    k = max(twos, fives)
    scaled = num * 2 ** (k - twos) * 5 ** (k - fives)
    if k == 0:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def quantize_ms(value: float) -> Fraction:
    """Round a float number of seconds to the nearest millisecond, exactly."""
    return Fraction(round(value * 1000), 1000)
