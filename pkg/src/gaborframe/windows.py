"""Window functions: centered B-splines, indicators, Gaussians, user piecewise polynomials.

Piecewise windows are right-continuous: on ``[b_i, b_{i+1})`` the piece ``i`` is
used, and the window vanishes outside ``[b_0, b_n)``.  Piece coefficients are
stored in ascending powers of the local variable ``x - b_i`` (the same layout as
``scipy.interpolate.PPoly``, transposed).
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from pathlib import Path
from typing import Optional, Union

import numpy as np

from gaborframe.rational import RationalError, as_rational, format_rational, parse_rational

Real = Union[float, int, Fraction]


class WindowError(ValueError):
    """Bad window specification or an operation the window does not support."""


@dataclass(frozen=True)
class PiecewisePolyWindow:
    breakpoints: tuple
    pieces: tuple
    label: str = field(default="poly", compare=False)

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        pieces = tuple(tuple(as_rational(c) for c in piece) or (Fraction(0),) for piece in self.pieces)
        if len(bps) < 2:
            raise WindowError("a piecewise window needs at least two breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise WindowError("breakpoints must be strictly ascending")
        if len(pieces) != len(bps) - 1:
            raise WindowError(f"expected {len(bps) - 1} pieces for {len(bps)} breakpoints, got {len(pieces)}")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pieces)
        degree = max(len(piece) for piece in pieces) - 1
        coeffs = np.zeros((len(pieces), degree + 1))
        for i, piece in enumerate(pieces):
            coeffs[i, : len(piece)] = [float(c) for c in piece]
        object.__setattr__(self, "_coeffs", coeffs)
        object.__setattr__(self, "_float_bps", np.array([float(b) for b in bps]))

    exact = True

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def degree(self) -> int:
        return self._coeffs.shape[1] - 1

    def tail_bound(self, radius: float) -> float:
        a, b = self.support
        return 0.0 if radius >= max(abs(a), abs(b)) else math.inf

    def eval_exact(self, x) -> Fraction:
        x = as_rational(x)
        i = bisect_right(self.breakpoints, x) - 1
        if i < 0 or i >= len(self.pieces):
            return Fraction(0)
        u = x - self.breakpoints[i]
        acc = Fraction(0)
        for c in reversed(self.pieces[i]):
            acc = acc * u + c
        return acc

    def eval(self, x: Real) -> float:
        if isinstance(x, Fraction):
            return float(self.eval_exact(x))
        return float(self.eval_array(np.array([x], dtype=float))[0])

    def eval_array(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self._float_bps, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.pieces))
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        u = t - self._float_bps[idx]
        out = self._coeffs[idx, -1]
        for d in range(self.degree - 1, -1, -1):
            out = out * u + self._coeffs[idx, d]
        return np.where(inside, out, 0.0)

    def left_limit(self, i: int) -> Fraction:
        """Limit of the window at breakpoint ``i`` from the left (exact)."""
        if i == 0:
            return Fraction(0)
        piece, width = self.pieces[i - 1], self.breakpoints[i] - self.breakpoints[i - 1]
        acc = Fraction(0)
        for c in reversed(piece):
            acc = acc * width + c
        return acc

    def is_continuous(self) -> bool:
        return all(self.left_limit(i) == self.eval_exact(b) for i, b in enumerate(self.breakpoints))

    @property
    def known_in_m1(self) -> bool:
        # Continuous, compactly supported and piecewise polynomial is enough.
        return self.is_continuous()

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "pieces": [[format_rational(c) for c in piece] for piece in self.pieces],
        }


class CharacteristicWindow(PiecewisePolyWindow):
    """Indicator of the half-open interval ``[a, b)``."""

    def __init__(self, a, b, label: Optional[str] = None):
        a, b = as_rational(a), as_rational(b)
        if label is None:
            label = f"chi:{format_rational(a)},{format_rational(b)}"
        super().__init__((a, b), ((Fraction(1),),), label)

    @property
    def a(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def b(self) -> Fraction:
        return self.breakpoints[1]


@dataclass(frozen=True)
class GaussianWindow:
    """``g(x) = exp(-pi x^2 / width^2)``, normalized to ``g(0) = 1``."""

    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise WindowError(f"Gaussian width must be positive, got {self.width}")

    exact = False
    support = None
    known_in_m1 = True

    @property
    def label(self) -> str:
        return f"gauss:{self.width:g}"

    def eval(self, x: Real) -> float:
        return math.exp(-math.pi * float(x) ** 2 / self.width**2)

    def eval_array(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.exp(-np.pi * t**2 / self.width**2)

    def eval_exact(self, x) -> Fraction:
        raise WindowError("Gaussian windows have no exact rational values")

    def is_continuous(self) -> bool:
        return True

    def tail_bound(self, radius: float) -> float:
        """Upper bound for ``|g(x)|`` when ``|x| >= radius``."""
        return math.exp(-math.pi * radius**2 / self.width**2)

    def tail_sum_bound(self, radius: float, spacing: float) -> float:
        """Bound on ``sum |g(x - spacing*r)|`` over all ``r`` with ``|x - spacing*r| > radius``.

        Holds uniformly in ``x``: on each side the samples sit at least
        ``radius + k*spacing`` away, and ``g(R + k s) <= g(R) exp(-2 pi R k s / w^2)``.
        """
        if radius <= 0:
            return math.inf
        ratio = math.exp(-2 * math.pi * radius * spacing / self.width**2)
        return 2 * self.tail_bound(radius) / (1 - ratio)

    def truncation_radius(self, spacing: float, tol: float) -> float:
        """Smallest radius (on a 1/8-width grid) whose tail sum is below ``tol / 2``."""
        radius = self.width / 8
        while self.tail_sum_bound(radius, spacing) > tol / 2:
            radius += self.width / 8
        return radius


Window = Union[PiecewisePolyWindow, GaussianWindow]


def _binomial_shift(degree: int, c: int) -> list:
    """Ascending coefficients of ``(u + c)^degree``."""
    return [comb(degree, e) * c ** (degree - e) for e in range(degree + 1)]


@lru_cache(maxsize=None)
def bspline(order: int) -> PiecewisePolyWindow:
    """Centered cardinal B-spline ``B_N`` supported on ``[-N/2, N/2]``.

    Uses the truncated-power form
    ``B_N(x) = sum_k (-1)^k C(N,k) (x + N/2 - k)_+^(N-1) / (N-1)!``;
    on the ``i``-th unit interval only ``k <= i`` contribute.
    """
    if not isinstance(order, int) or order < 1:
        raise WindowError(f"B-spline order must be a positive integer, got {order!r}")
    deg = order - 1
    scale = Fraction(1, factorial(deg))
    pieces = []
    for i in range(order):
        acc = [0] * (deg + 1)
        for k in range(i + 1):
            sign = (-1) ** k * comb(order, k)
            for e, c in enumerate(_binomial_shift(deg, i - k)):
                acc[e] += sign * c
        pieces.append(tuple(scale * a for a in acc))
    half = Fraction(order, 2)
    bps = tuple(-half + i for i in range(order + 1))
    return PiecewisePolyWindow(bps, tuple(pieces), label=f"bspline:{order}")


def characteristic(a, b) -> CharacteristicWindow:
    a, b = as_rational(a), as_rational(b)
    if a >= b:
        raise WindowError(f"empty interval [{a}, {b})")
    return CharacteristicWindow(a, b)


def gaussian(width: float = 1.0) -> GaussianWindow:
    return GaussianWindow(float(width))


def load_poly_json(path) -> PiecewisePolyWindow:
    """Read ``{"breakpoints": [...], "pieces": [[...], ...]}`` with "num/den" strings."""
    try:
        data = json.loads(Path(path).read_text())
        bps = [parse_rational(str(b)) for b in data["breakpoints"]]
        pieces = [[parse_rational(str(c)) for c in piece] for piece in data["pieces"]]
    except (OSError, KeyError, TypeError, json.JSONDecodeError, RationalError) as exc:
        raise WindowError(f"cannot load polynomial window from {path}: {exc}") from exc
    return PiecewisePolyWindow(tuple(bps), tuple(tuple(p) for p in pieces), label=f"poly:{path}")


def parse_window(spec: str) -> Window:
    """Build a window from ``bspline:N``, ``chi:a,b``, ``gauss:width`` or ``poly:path``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "bspline":
            return bspline(int(arg))
        if kind == "chi":
            a, b = arg.split(",")
            return characteristic(parse_rational(a), parse_rational(b))
        if kind == "gauss":
            return gaussian(float(arg) if arg else 1.0)
        if kind == "poly":
            return load_poly_json(arg)
    except (ValueError, RationalError) as exc:
        raise WindowError(f"bad window spec {spec!r}: {exc}") from exc
    raise WindowError(f"unknown window kind {kind!r} in {spec!r} (expected bspline, chi, gauss or poly)")


# -- partition of unity ----------------------------------------------------------


@dataclass(frozen=True)
class PartitionOfUnityReport:
    holds: bool
    exact: bool
    witness: Fraction
    deviation: Union[Fraction, float]
    sample_count: int

    def __bool__(self) -> bool:
        return self.holds


def van_der_corput(i: int, base: int = 2) -> Fraction:
    out, denom = Fraction(0), 1
    while i:
        i, digit = divmod(i, base)
        denom *= base
        out += Fraction(digit, denom)
    return out


def pou_samples(g: Window, sample_count: int) -> list:
    """Deterministic rational points of ``[0, 1)``: van der Corput plus folded breakpoints."""
    pts = {van_der_corput(i) for i in range(sample_count)}
    for b in getattr(g, "breakpoints", ()):
        pts.add(b % 1)
    return sorted(pts)


def periodization_exact(g: PiecewisePolyWindow, x: Fraction, period: Fraction = Fraction(1)) -> Fraction:
    """``sum_s g(x - s*period)`` computed exactly over the finitely many nonzero terms."""
    a, b = g.support
    s_lo = math.floor((x - b) / period)
    s_hi = math.ceil((x - a) / period)
    return sum((g.eval_exact(x - s * period) for s in range(s_lo, s_hi + 1)), Fraction(0))


def _periodization_float(g: GaussianWindow, x: float, tol: float) -> float:
    radius = g.truncation_radius(1.0, tol)
    s = np.arange(math.floor(x - radius), math.ceil(x + radius) + 1)
    return float(np.sum(g.eval_array(x - s)))


def check_partition_of_unity(g: Window, sample_count: int = 64, tol: float = 1e-12) -> PartitionOfUnityReport:
    """Test ``sum_s g(x - s) = 1`` on a deterministic sample of ``[0, 1)``.

    Exact windows are summed in rational arithmetic and ``tol`` is ignored.
    """
    if sample_count < 1:
        raise WindowError("sample_count must be at least 1")
    return _check_pou_cached(g, sample_count, tol)


@lru_cache(maxsize=256)
def _check_pou_cached(g: Window, sample_count: int, tol: float) -> PartitionOfUnityReport:
    if getattr(g, "support", None) is None and not hasattr(g, "tail_sum_bound"):
        raise WindowError("window has neither compact support nor a tail bound")
    samples = pou_samples(g, sample_count)
    worst_x, worst = samples[0], None
    if g.exact:
        for x in samples:
            dev = abs(periodization_exact(g, x) - 1)
            if worst is None or dev > worst:
                worst_x, worst = x, dev
        return PartitionOfUnityReport(worst == 0, True, worst_x, worst, len(samples))
    for x in samples:
        dev = abs(_periodization_float(g, float(x), tol) - 1.0)
        if worst is None or dev > worst:
            worst_x, worst = x, dev
    return PartitionOfUnityReport(worst <= tol, False, worst_x, worst, len(samples))
