"""Exact rational scalars.

All numeric constants are gmpy2 ``mpq`` values.  ``mpq`` keeps numerator and
denominator coprime with a positive denominator, so no extra normalisation is
needed here.  Floats are refused everywhere a parameter enters the system.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral

import gmpy2

Rational = type(gmpy2.mpq(0))

ZERO = gmpy2.mpq(0)
ONE = gmpy2.mpq(1)


def Q(value, den=None) -> Rational:
    """Coerce ``value`` (optionally ``value/den``) to an exact rational.

    Accepts ints, Fractions, mpq/mpz and strings such as ``"-3/4"`` or ``"7"``.
    Floats are rejected because they would silently import rounding error.
    """
    if den is not None:
        return Q(value) / Q(den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (Integral, Fraction)) or type(value) is type(gmpy2.mpz(0)):
        return gmpy2.mpq(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE") and not _is_plain_fraction(text):
            raise ValueError(f"not an exact rational literal: {value!r}")
        try:
            return gmpy2.mpq(text)
        except ValueError as exc:
            raise ValueError(f"not an exact rational literal: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError(f"float {value!r} refused: use an exact 'p/q' rational")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def _is_plain_fraction(text: str) -> bool:
    body = text.lstrip("+-")
    parts = body.split("/")
    return 1 <= len(parts) <= 2 and all(p.strip().isdigit() for p in parts)


def is_square(q: Rational) -> bool:
    q = Q(q)
    return q >= 0 and gmpy2.is_square(q.numerator) and gmpy2.is_square(q.denominator)


def sqrt_exact(q: Rational) -> Rational | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    q = Q(q)
    if not is_square(q):
        return None
    return gmpy2.mpq(gmpy2.isqrt(q.numerator), gmpy2.isqrt(q.denominator))


def fmt(q: Rational) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"
