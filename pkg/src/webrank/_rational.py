"""Exact rational coefficient backend.

Coefficients are ``gmpy2.mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise.  Set ``WEBRANK_RATIONAL=fraction`` to force
the pure-Python path (used by the benchmark and the backend parity tests).
"""

from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational as _RationalABC

BACKEND = os.environ.get("WEBRANK_RATIONAL", "gmpy2").strip().lower()

if BACKEND == "gmpy2":
    try:
        import gmpy2

        _mpq = gmpy2.mpq
        _mpq_type = type(gmpy2.mpq(0))
    except ImportError:  # pragma: no cover - depends on environment
        BACKEND = "fraction"

if BACKEND not in ("gmpy2", "fraction"):
    raise ImportError(f"unknown WEBRANK_RATIONAL backend {BACKEND!r}")

if BACKEND == "gmpy2":
    ZERO = _mpq(0)
    ONE = _mpq(1)

    def rational(value, denominator=None):
        """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
        if denominator is not None:
            return _mpq(rational(value)) / rational(denominator)
        if isinstance(value, _mpq_type):
            return value
        if isinstance(value, bool) or isinstance(value, float):
            raise TypeError(f"refusing inexact or boolean coefficient {value!r}")
        if isinstance(value, int) or type(value).__name__ == "mpz":
            return _mpq(value)
        if isinstance(value, (Fraction, _RationalABC)):
            return _mpq(int(value.numerator), int(value.denominator))
        if isinstance(value, str):
            return _mpq(Fraction(value.strip()))
        raise TypeError(f"cannot interpret {value!r} as a rational")

    def is_rational(value) -> bool:
        return isinstance(value, _mpq_type)

else:
    ZERO = Fraction(0)
    ONE = Fraction(1)

    def rational(value, denominator=None):
        """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
        if denominator is not None:
            return rational(value) / rational(denominator)
        if isinstance(value, Fraction):
            return value
        if isinstance(value, bool) or isinstance(value, float):
            raise TypeError(f"refusing inexact or boolean coefficient {value!r}")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value.strip())
        if hasattr(value, "numerator") and hasattr(value, "denominator"):
            return Fraction(int(value.numerator), int(value.denominator))
        raise TypeError(f"cannot interpret {value!r} as a rational")

    def is_rational(value) -> bool:
        return isinstance(value, Fraction)


def to_fraction(value) -> Fraction:
    """Backend-neutral view of a coefficient."""
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(value) -> str:
    """Serialize as ``"num/den"`` (denominator always present)."""
    q = to_fraction(value)
    return f"{q.numerator}/{q.denominator}"
