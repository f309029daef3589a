"""Lattice verdicts and frame-set maps.

A lattice is tested against the rank criterion "P(x, xi) has rank p for every
(x, xi)".  Structural shortcuts (density, integer beta, the kernel certificate)
give certified negative answers; otherwise ``sigma_p`` is scanned over a grid
of the fundamental domain.  A grid can only ever suggest a frame, never prove
one, so the positive verdict is called ``LikelyFrame``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from gaborframe.obstructions import (
    CertificateReport,
    certificate_points,
    delprete_applies,
    params_for_lattice,
    prop2_applies,
    verify_certificate,
)
from gaborframe.pmatrix import LatticeParams, iter_p_matrices
from gaborframe.rational import as_rational, format_rational
from gaborframe.ranktest import DEFAULT_REL_TOL
from gaborframe.windows import Window, check_partition_of_unity
from gaborframe.zak import DEFAULT_TOL

CERTIFIED = "CertifiedNotFrame"
NUMERIC = "NumericNotFrame"
LIKELY = "LikelyFrame"
INCONCLUSIVE = "Inconclusive"

# margins within this factor of rel_tol are too close to call
INCONCLUSIVE_FACTOR = 1e3
_SCAN_X_CHUNK = 8

DISCONTINUOUS_CAVEAT = "window_discontinuous: rank criterion hypothesis not met, verdict is heuristic"
UNCONFIRMED_CAVEAT = "numeric_confirmation_missing: no grid point with margin below rel_tol"


@dataclass(frozen=True)
class GridSpec:
    nx: int = 64
    nxi: int = 64
    reduced_domain: bool = False
    include_breakpoints: bool = True

    def __post_init__(self):
        if self.nx < 1 or self.nxi < 1:
            raise ValueError(f"grid sizes must be positive, got {self.nx}x{self.nxi}")

    def x_length(self, lat: LatticeParams) -> Fraction:
        return lat.alpha if self.reduced_domain else lat.zak_period

    def x_points(self, lat: LatticeParams, g: Optional[Window] = None) -> list:
        """Sorted rational x samples in ``[0, L)``; ``L = alpha`` when reduced, else ``alpha q``."""
        length = self.x_length(lat)
        pts = {length * i / self.nx for i in range(self.nx)}
        if self.include_breakpoints and g is not None:
            pts.update(b % length for b in getattr(g, "breakpoints", ()))
        return sorted(pts)

    def xi_points(self) -> list:
        return [Fraction(j, self.nxi) for j in range(self.nxi)]

    def __str__(self) -> str:
        return f"{self.nx}x{self.nxi}" + (" reduced" if self.reduced_domain else "")


@dataclass(frozen=True)
class ScanSummary:
    """Smallest ``sigma_p`` over the grid, relative to the largest ``sigma_1`` on the grid."""

    margin: float
    witness_x: Fraction
    witness_xi: Fraction
    sigma_p: float
    sigma_1: float
    points: int


def scan_grid(g: Window, lat: LatticeParams, grid: GridSpec, tol: float = DEFAULT_TOL) -> ScanSummary:
    xs = grid.x_points(lat, g)
    # Real windows: P(x, 1 - xi) = conj P(x, xi) has the same singular values,
    # and the lexicographic tie-break always prefers xi <= 1/2.
    xis = [xi for xi in grid.xi_points() if xi <= Fraction(1, 2)]
    smallest = []
    top = 0.0
    for mats in iter_p_matrices(g, lat, xs, xis, tol, chunk=_SCAN_X_CHUNK):
        sv = np.linalg.svd(mats.reshape(-1, lat.p, lat.q), compute_uv=False)
        smallest.append(sv[:, -1])
        top = max(top, float(sv[:, 0].max()))
    sig_p = np.concatenate(smallest)
    # argmin returns the first hit, i.e. the lexicographically smallest (x, xi)
    idx = int(np.argmin(sig_p))
    i, j = divmod(idx, len(xis))
    margin = float(sig_p[idx]) / top if top > 0 else 0.0
    return ScanSummary(margin, xs[i], xis[j], float(sig_p[idx]), top, len(sig_p))


@dataclass(frozen=True)
class Verdict:
    kind: str
    source: Optional[str]
    alpha: Fraction
    beta: Fraction
    p: int
    q: int
    grid: Optional[GridSpec] = None
    scan: Optional[ScanSummary] = None
    certificates: tuple = ()
    caveats: tuple = ()

    @property
    def label(self) -> str:
        return f"{self.kind}({self.source})" if self.source else self.kind

    @property
    def not_frame(self) -> bool:
        return self.kind in (CERTIFIED, NUMERIC)

    @property
    def margin(self) -> Optional[float]:
        return self.scan.margin if self.scan else None

    @property
    def witness(self) -> tuple:
        if self.scan is not None and (self.kind != CERTIFIED or self.source == "delprete"):
            return self.scan.witness_x, self.scan.witness_xi
        if self.certificates:
            return as_rational(self.certificates[0].x), Fraction(0)
        if self.scan is not None:
            return self.scan.witness_x, self.scan.witness_xi
        return None, None

    def to_dict(self) -> dict:
        wx, wxi = self.witness
        out = {
            "verdict": self.kind,
            "source": self.source,
            "label": self.label,
            "alpha": format_rational(self.alpha),
            "beta": format_rational(self.beta),
            "p": self.p,
            "q": self.q,
            "margin": self.margin,
            "witness_x": None if wx is None else format_rational(wx),
            "witness_xi": None if wxi is None else format_rational(wxi),
            "sigma_p": self.scan.sigma_p if self.scan else None,
            "sigma_1": self.scan.sigma_1 if self.scan else None,
            "grid": str(self.grid) if self.grid else None,
            "certificates": [
                {
                    "x": format_rational(as_rational(c.x)),
                    "rank": c.rank,
                    "rank_bound": c.rank_bound,
                    "residuals_zero": c.residuals_zero,
                }
                for c in self.certificates
            ],
            "caveats": list(self.caveats),
        }
        return out


def _prop2_certificates(g: Window, alpha: Fraction, beta: Fraction) -> tuple:
    params = params_for_lattice(alpha, beta)
    if params is None or not prop2_applies(params) or not g.exact:
        return ()
    if not check_partition_of_unity(g).holds:
        return ()
    reports = tuple(verify_certificate(g, params, x, "exact") for x in certificate_points(params, 3))
    return reports if all(rep.certified for rep in reports) else ()


def test_lattice(
    g: Window,
    alpha,
    beta,
    grid: Optional[GridSpec] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    force_scan: bool = False,
    tol: float = DEFAULT_TOL,
) -> Verdict:
    """Decide whether ``G(g, alpha, beta)`` fails to be a frame.

    Order: density above one, integer beta with a partition of unity, the
    kernel certificate at three rational ``x``, then the grid scan.
    ``force_scan`` runs the scan for certified lattices too.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha <= 0 or beta <= 0:
        raise ValueError(f"alpha and beta must be positive, got {alpha}, {beta}")
    grid = grid or GridSpec()
    lat = LatticeParams(alpha, beta)
    caveats = [] if g.known_in_m1 else [DISCONTINUOUS_CAVEAT]
    base = dict(alpha=alpha, beta=beta, p=lat.p, q=lat.q)

    if not lat.subcritical:
        return Verdict(CERTIFIED, "density", **base, caveats=tuple(caveats))

    if delprete_applies(g, beta):
        scan = scan_grid(g, lat, grid, tol)
        if scan.margin >= rel_tol:
            caveats.append(UNCONFIRMED_CAVEAT)
        return Verdict(CERTIFIED, "delprete", **base, grid=grid, scan=scan, caveats=tuple(caveats))

    certs = _prop2_certificates(g, alpha, beta)
    if certs:
        scan = scan_grid(g, lat, grid, tol) if force_scan else None
        if scan is not None and scan.margin >= rel_tol:
            caveats.append(UNCONFIRMED_CAVEAT)
        return Verdict(CERTIFIED, "prop2", **base, grid=grid, scan=scan, certificates=certs, caveats=tuple(caveats))

    scan = scan_grid(g, lat, grid, tol)
    if scan.margin < rel_tol:
        kind = NUMERIC
    elif scan.margin < INCONCLUSIVE_FACTOR * rel_tol:
        kind = INCONCLUSIVE
    else:
        kind = LIKELY
    return Verdict(kind, None, **base, grid=grid, scan=scan, caveats=tuple(caveats))


test_lattice.__test__ = False  # not a pytest test despite the name


# -- plane scans -----------------------------------------------------------------


def rationals_between(lo, hi, max_denominator: int) -> list:
    """Sorted reduced fractions ``a/b`` in ``[lo, hi]`` with ``b <= max_denominator``."""
    lo, hi = as_rational(lo), as_rational(hi)
    out = set()
    for b in range(1, max_denominator + 1):
        for a in range(math.ceil(lo * b), math.floor(hi * b) + 1):
            out.add(Fraction(a, b))
    return sorted(out)


@dataclass
class ScanResult:
    window: str
    alphas: list
    betas: list
    verdicts: list = field(default_factory=list)  # sorted by (alpha, beta)

    CSV_COLUMNS = ("alpha", "beta", "p", "q", "verdict", "source", "margin", "witness_x", "witness_xi")

    def to_csv(self) -> str:
        lines = [",".join(self.CSV_COLUMNS)]
        for v in self.verdicts:
            wx, wxi = v.witness
            lines.append(
                ",".join(
                    [
                        format_rational(v.alpha),
                        format_rational(v.beta),
                        str(v.p),
                        str(v.q),
                        v.kind,
                        v.source or "",
                        "" if v.margin is None else f"{v.margin:.6e}",
                        "" if wx is None else format_rational(wx),
                        "" if wxi is None else format_rational(wxi),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def select(self, alpha=None, source=None, kind=None) -> list:
        return [
            v
            for v in self.verdicts
            if (alpha is None or v.alpha == as_rational(alpha))
            and (source is None or v.source == source)
            and (kind is None or v.kind == kind)
        ]


def scan_plane(
    g: Window,
    alpha_range,
    beta_range,
    max_denominator: int,
    grid: Optional[GridSpec] = None,
    rel_tol: float = DEFAULT_REL_TOL,
    workers: int = 1,
) -> ScanResult:
    """Verdicts for every rational ``(alpha, beta)`` in the box with denominators up to ``max_denominator``.

    Lattice points are independent, so they are mapped over a thread pool and
    collected in input order; the output does not depend on ``workers``.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be at least 1")
    a_lo, a_hi = (as_rational(v) for v in alpha_range)
    b_lo, b_hi = (as_rational(v) for v in beta_range)
    if a_lo <= 0 or b_lo <= 0:
        raise ValueError("ranges must be positive")
    alphas = rationals_between(a_lo, a_hi, max_denominator)
    betas = rationals_between(b_lo, b_hi, max_denominator)
    if not alphas or not betas:
        raise ValueError("empty parameter range")
    grid = grid or GridSpec()
    points = [(a, b) for a in alphas for b in betas]

    def run(ab):
        return test_lattice(g, ab[0], ab[1], grid, rel_tol)

    if workers <= 1:
        verdicts = [run(ab) for ab in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(run, points))
    return ScanResult(getattr(g, "label", repr(g)), alphas, betas, verdicts)


# -- heatmap ---------------------------------------------------------------------

COLORS = {
    (CERTIFIED, "prop2"): (220, 30, 30),
    (CERTIFIED, "delprete"): (240, 150, 0),
    (CERTIFIED, "density"): (70, 70, 70),
    (NUMERIC, None): (150, 0, 170),
    (INCONCLUSIVE, None): (230, 230, 0),
}


def verdict_color(v: Verdict) -> tuple:
    if v.kind == LIKELY:
        # brighter green = larger margin; log10 margin mapped from [-8, 0] onto [0, 1]
        level = min(1.0, max(0.0, (math.log10(max(v.margin, 1e-300)) + 8) / 8))
        return (0, 80 + int(round(175 * level)), 60)
    return COLORS[(v.kind, v.source)]


def render_heatmap(result: ScanResult, path) -> Path:
    """Write a binary PPM (P6): one pixel per lattice, alpha left to right, beta top (largest) to bottom."""
    if not result.verdicts:
        raise ValueError("nothing to render")
    col = {a: i for i, a in enumerate(result.alphas)}
    row = {b: len(result.betas) - 1 - i for i, b in enumerate(result.betas)}
    width, height = len(result.alphas), len(result.betas)
    pixels = bytearray(width * height * 3)
    for v in result.verdicts:
        off = 3 * (row[v.beta] * width + col[v.alpha])
        pixels[off : off + 3] = bytes(verdict_color(v))
    path = Path(path)
    path.write_bytes(b"P6\n%d %d\n255\n" % (width, height) + bytes(pixels))
    return path
