"""Zak transform ``Z_a g(x, xi) = sum_r g(x - a r) exp(2 pi i r xi)``."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

from gaborframe.rational import as_rational
from gaborframe.windows import Window, WindowError

DEFAULT_TOL = 1e-13


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, "num/den" string or float (floats are dyadic)."""
    if isinstance(x, float):
        return Fraction(x)
    return as_rational(x)


def unit_phase(r: int, xi: Fraction) -> complex:
    """``exp(2 pi i r xi)`` with ``r*xi`` reduced mod 1 in exact arithmetic first."""
    t = (r * xi) % 1
    if t == 0:
        return 1 + 0j
    return cmath.exp(2j * math.pi * float(t))


def shift_range(g: Window, period: Fraction, x_lo, x_hi, tol: float = DEFAULT_TOL) -> range:
    """All shifts ``r`` for which ``x - period*r`` can reach the support (or truncation radius)
    for some ``x`` in ``[x_lo, x_hi]``."""
    if g.support is not None:
        a, b = g.support
    else:
        radius = g.truncation_radius(float(period), tol)
        a, b = -radius, radius
    r_lo = math.floor((x_lo - b) / period)
    r_hi = math.ceil((x_hi - a) / period)
    return range(r_lo, r_hi + 1)


def zak(g: Window, alpha, x, xi, tol: float = DEFAULT_TOL, reduce_xi: bool = True) -> complex:
    """Zak transform of ``g`` with period ``alpha`` at ``(x, xi)``.

    Each argument ``x - alpha*r`` is formed exactly and rounded once.  For
    Gaussians the sum is truncated where the tail bound drops below ``tol``.
    With ``reduce_xi=False`` the phase uses ``xi`` as given (no mod-1 step).
    """
    alpha = as_rational(alpha)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    xr = to_fraction(x)
    xi_exact = to_fraction(xi)
    if reduce_xi:
        xi_exact %= 1
    total = 0j
    for r in shift_range(g, alpha, xr, xr, tol):
        t = xr - alpha * r
        if g.support is not None and not (g.support[0] <= t < g.support[1]):
            continue
        val = g.eval(t) if g.exact else g.eval(float(t))
        if val == 0.0:
            continue
        phase = unit_phase(r, xi_exact) if reduce_xi else cmath.exp(2j * math.pi * r * float(xi))
        total += val * phase
    return total


def zak_exact(g: Window, alpha, x) -> Fraction:
    """Exact value of ``Z_alpha g(x, 0) = sum_r g(x - alpha r)`` for rational ``x``."""
    if not g.exact or g.support is None:
        raise WindowError("exact Zak values need an exact, compactly supported window")
    alpha, x = as_rational(alpha), as_rational(x)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return sum((g.eval_exact(x - alpha * r) for r in shift_range(g, alpha, x, x)), Fraction(0))
