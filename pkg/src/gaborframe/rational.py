"""Exact rationals for lattice parameters.

Backed by :class:`fractions.Fraction`, which already keeps values reduced with a
positive denominator and uses Python's unbounded integers.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Union

RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class RationalError(ValueError):
    """Raised for malformed or out-of-domain rational input."""


def make_rational(num: int, den: int = 1) -> Fraction:
    if den == 0:
        raise RationalError(f"zero denominator in {num}/{den}")
    return Fraction(num, den)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings. Floats are refused."""
    if isinstance(value, bool):
        raise RationalError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise RationalError(f"expected an exact rational, got {type(value).__name__} {value!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a bare integer.

    Decimal notation is rejected on purpose: guessing a fraction from ``0.333``
    would silently change the density p/q.
    """
    match = _RATIONAL_RE.match(text)
    if match is None:
        hint = ""
        if re.match(r"^\s*[+-]?\d*\.\d*\s*$", text) or "e" in text.lower():
            hint = " (decimal input is not accepted; write it as num/den, e.g. 1/3)"
        raise RationalError(f"malformed rational {text!r}{hint}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    return make_rational(num, den)


def format_rational(value: Fraction) -> str:
    """Render as ``"num/den"``; integers print without ``/1``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def density_fraction(alpha: RationalLike, beta: RationalLike) -> tuple[int, int, bool]:
    """Return ``(p, q, p <= q)`` with ``p/q = alpha*beta`` in lowest terms."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha <= 0 or beta <= 0:
        raise RationalError(f"lattice parameters must be positive, got alpha={alpha}, beta={beta}")
    prod = alpha * beta
    p, q = prod.numerator, prod.denominator
    assert gcd(p, q) == 1
    return p, q, p <= q
