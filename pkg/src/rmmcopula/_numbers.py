"""Exact-number helpers: rational parsing and fixed-precision formatting."""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from numbers import Rational

Number = int | float | str | Fraction | Decimal


def as_fraction(x: Number) -> Fraction:
    """Convert ``x`` to a Fraction, reading floats as their shortest decimal literal.

    ``as_fraction(0.1) == Fraction(1, 10)`` rather than the binary expansion, so
    that literals typed into presets and JSON files stay exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty number literal")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as a number")


def fmt(x: float) -> str:
    """Format with 12 significant digits (the CLI/serialisation precision)."""
    x = float(x)
    if x == 0.0:
        return "0"
    return f"{x:.12g}"


def frac_str(x: Fraction) -> str:
    """Serialise a Fraction as an exact literal (``"1/3"`` or ``"0.25"``)."""
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    # terminating decimal: scale to an integer over 10**k
    k = max(twos, fives)
    scaled = x.numerator * (10**k // x.denominator)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}".rstrip("0").rstrip(".")
