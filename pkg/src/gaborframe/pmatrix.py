"""The p x q Zak-sample matrix P(x, xi) of a Gabor system at rational density.

``P(x, xi)[k, l] = Z_{alpha q} g(x + alpha l + k / beta, xi)`` with
``k < p``, ``l < q`` and ``alpha beta = p / q`` reduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from gaborframe.rational import as_rational, density_fraction, format_rational
from gaborframe.windows import Window, WindowError
from gaborframe.zak import DEFAULT_TOL, shift_range, to_fraction, zak_exact

_EXACT_FLOAT_INT = 2**53
_X_CHUNK = 16


class DensityAboveCritical(ValueError):
    """``alpha*beta > 1``: no Gabor frame exists and P is not built."""


@dataclass(frozen=True)
class LatticeParams:
    alpha: Fraction
    beta: Fraction
    p: int = field(init=False)
    q: int = field(init=False)

    def __post_init__(self):
        alpha, beta = as_rational(self.alpha), as_rational(self.beta)
        p, q, _ = density_fraction(alpha, beta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def zak_period(self) -> Fraction:
        return self.alpha * self.q

    @property
    def subcritical(self) -> bool:
        """True when ``p <= q`` (density at most one)."""
        return self.p <= self.q

    def offsets(self) -> list:
        """Exact offsets ``alpha*l + k/beta`` as a ``p x q`` nested list."""
        inv_beta = 1 / self.beta
        return [[self.alpha * l + inv_beta * k for l in range(self.q)] for k in range(self.p)]

    def __str__(self) -> str:
        return f"({format_rational(self.alpha)}, {format_rational(self.beta)}) p/q={self.p}/{self.q}"


@dataclass(frozen=True)
class PMatrix:
    entries: object  # complex ndarray (p, q), or nested list of Fractions when exact
    lattice: LatticeParams
    x: object
    xi: object
    exact: bool = False

    @property
    def rows(self) -> int:
        return self.lattice.p

    @property
    def cols(self) -> int:
        return self.lattice.q

    def as_array(self) -> np.ndarray:
        if self.exact:
            return np.array([[float(v) for v in row] for row in self.entries])
        return np.asarray(self.entries)

    def to_csv(self) -> str:
        lines = []
        for row in self.entries:
            if self.exact:
                cells = [format_rational(v) for v in row]
            else:
                cells = [f"{v.real + 0.0:.17g}{v.imag + 0.0:+.17g}j" for v in row]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _check_density(lat: LatticeParams) -> None:
    if not lat.subcritical:
        raise DensityAboveCritical(
            f"alpha*beta = {lat.p}/{lat.q} > 1: above critical density, no frame is possible"
        )


def _rounded_arguments(numerators: np.ndarray, denom: int) -> np.ndarray:
    """Correctly rounded ``numerators / denom`` for an integer (or object) array."""
    if denom < _EXACT_FLOAT_INT and numerators.dtype != object:
        return numerators.astype(np.float64) / float(denom)
    div = np.frompyfunc(lambda n: int(n) / denom, 1, 1)
    return div(numerators).astype(np.float64)


def iter_p_matrices(g: Window, lat: LatticeParams, xs: Sequence, xis: Sequence, tol: float = DEFAULT_TOL,
                    chunk: int = _X_CHUNK):
    """Yield ``P(x, xi)`` blocks of shape ``(len(x_chunk), len(xis), p, q)``, ``chunk`` x-values at a time.

    Every window argument ``x + alpha l + k/beta - alpha q r`` is formed in
    exact rational arithmetic and rounded once, so a given ``(x, xi)`` yields
    the same bits no matter how the sample lists are ordered or chunked.
    """
    _check_density(lat)
    xs = [to_fraction(x) for x in xs]
    xis = [to_fraction(s) % 1 for s in xis]
    period = lat.zak_period
    offs = lat.offsets()
    flat_offs = [o for row in offs for o in row]
    shifts = list(shift_range(g, period, min(xs) + min(flat_offs), max(xs) + max(flat_offs), tol))

    denom = math.lcm(period.denominator, *(x.denominator for x in xs), *(o.denominator for o in flat_offs))
    x_num = [x.numerator * (denom // x.denominator) for x in xs]
    off_num = np.array([[o.numerator * (denom // o.denominator) for o in row] for row in offs], dtype=object)
    shift_num = np.array([period.numerator * (denom // period.denominator) * r for r in shifts], dtype=object)
    biggest = max(map(abs, x_num)) + max(abs(int(v)) for v in off_num.flat) + max(abs(int(v)) for v in shift_num)
    use_int64 = biggest < _EXACT_FLOAT_INT and denom < _EXACT_FLOAT_INT
    if use_int64:
        off_num = off_num.astype(np.int64)
        shift_num = shift_num.astype(np.int64)

    phases = np.empty((len(shifts), len(xis)), dtype=complex)
    for a, r in enumerate(shifts):
        for b, xi in enumerate(xis):
            t = (r * xi) % 1
            phases[a, b] = 1.0 if t == 0 else np.exp(2j * np.pi * float(t))

    for start in range(0, len(xs), chunk):
        block = x_num[start : start + chunk]
        xcol = np.array(block, dtype=np.int64 if use_int64 else object)
        nums = xcol[:, None, None, None] + off_num[None, :, :, None] - shift_num[None, None, None, :]
        vals = g.eval_array(_rounded_arguments(nums, denom))
        acc = np.zeros((len(block), len(xis), lat.p, lat.q), dtype=complex)
        for a in range(len(shifts)):
            acc += vals[:, None, :, :, a] * phases[a][None, :, None, None]
        yield acc


def p_matrices(g: Window, lat: LatticeParams, xs: Sequence, xis: Sequence, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``P(x, xi)`` for every pair of the two sample lists, shape ``(len(xs), len(xis), p, q)``."""
    return np.concatenate(list(iter_p_matrices(g, lat, xs, xis, tol)), axis=0)


def build_p(g: Window, lat: LatticeParams, x, xi, tol: float = DEFAULT_TOL) -> PMatrix:
    """Floating ``P(x, xi)``; raises :class:`DensityAboveCritical` when ``p > q``."""
    entries = p_matrices(g, lat, [x], [xi], tol)[0, 0]
    return PMatrix(entries, lat, x, xi)


def build_p_exact(g: Window, lat: LatticeParams, x) -> PMatrix:
    """Exact rational ``P(x, 0)``: each entry is a period-``alpha q`` periodization of ``g``."""
    if not g.exact:
        raise WindowError("exact P matrices need an exact (piecewise polynomial) window")
    _check_density(lat)
    x = as_rational(x)
    period = lat.zak_period
    entries = [[zak_exact(g, period, x + o) for o in row] for row in lat.offsets()]
    return PMatrix(entries, lat, x, Fraction(0), exact=True)


def index_formula_consistency(lat: LatticeParams) -> bool:
    """Check ``k / beta == alpha q k / p`` exactly for every row index ``k``."""
    return all(Fraction(k) / lat.beta == lat.alpha * lat.q * k / lat.p for k in range(lat.p))
