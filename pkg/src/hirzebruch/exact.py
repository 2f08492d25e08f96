"""Exact integer and rational scalars.

All symbolic work in the package runs over the rationals.  The scalar type is
``gmpy2.mpq``; ``gmpy2.mpz`` serves as the integer type.  Both are immutable,
always stored in lowest terms with a positive denominator, and interoperate
with Python ``int``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC

from gmpy2 import mpq, mpz

Integer = type(mpz(0))
Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)


def rat(x, den=None) -> Rational:
    """Coerce ``x`` (optionally ``x/den``) to an exact rational.

    Accepts ints, ``mpz``/``mpq``, ``fractions.Fraction`` and strings of the
    form ``"a/b"`` or ``"a"``.  Floats are refused: they are not exact.
    """
    if den is not None:
        if den == 0:
            raise ZeroDivisionError(f"rational with zero denominator: {x}/{den}")
        return rat(x) / rat(den)
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Integer)):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError(f"refusing inexact float {x!r}; pass a string or Fraction")
    if isinstance(x, _RationalABC):
        return mpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def parse_rational(text: str) -> Rational:
    """Parse ``"num/den"`` or ``"num"``; whitespace around the parts is ignored."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational literal")
    num, sep, den = s.partition("/")
    try:
        p = int(num.strip())
        q = int(den.strip()) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational literal {text!r}") from None
    if q == 0:
        raise ZeroDivisionError(f"rational literal with zero denominator: {text!r}")
    return mpq(p, q)


def format_rational(x) -> str:
    """Text form ``"num/den"``, with the denominator omitted when it is 1."""
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_arith(x, y, op: str) -> Rational:
    """Apply one of ``+ - * /`` exactly.  Division by zero raises ``ZeroDivisionError``."""
    x, y = rat(x), rat(y)
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op in ("*", "×"):
        return x * y
    if op in ("/", "÷"):
        if y == 0:
            raise ZeroDivisionError(f"division of {format_rational(x)} by zero")
        return x / y
    raise ValueError(f"unknown operator {op!r}")


def is_rational(x) -> bool:
    return isinstance(x, (Rational, Integer, int)) and not isinstance(x, bool)
