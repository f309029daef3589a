"""Partition-of-unity obstructions.

For ``alpha = 1/m`` and ``beta = n + j/r`` with ``(r-1)m + 1 < rn + j < rm`` and
``gcd(rn + j, rm) = 1``, every ``P(x, 0)`` of a partition-of-unity window maps
the ``m`` disjointly supported 0/1 vectors ``v_l`` (ones at ``l, l+m, ..., l+(r-1)m``)
to the all-ones vector.  Hence ``v_0 - v_l`` span an ``(m-1)``-dimensional
subspace of the kernel and ``rank P(x, 0) <= (r-1)m + 1 < p``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from gaborframe.pmatrix import LatticeParams, build_p, build_p_exact
from gaborframe.rational import as_rational, density_fraction
from gaborframe.ranktest import DEFAULT_REL_TOL, exact_rank, numeric_rank, singular_values
from gaborframe.windows import Window, WindowError, check_partition_of_unity


class InadmissibleParams(ValueError):
    pass


class PartitionOfUnityViolated(WindowError):
    pass


@dataclass(frozen=True)
class PropTwoParams:
    m: int
    n: int
    r: int
    j: int

    def __post_init__(self):
        if min(self.m, self.n, self.r) < 1:
            raise ValueError(f"m, n, r must be positive integers: {self}")
        if not 1 <= self.j <= self.r - 1:
            raise ValueError(f"j must satisfy 1 <= j <= r-1, got j={self.j}, r={self.r}")

    @property
    def p(self) -> int:
        return self.r * self.n + self.j

    @property
    def q(self) -> int:
        return self.r * self.m

    @property
    def rank_bound(self) -> int:
        return (self.r - 1) * self.m + 1

    @property
    def alpha(self) -> Fraction:
        return Fraction(1, self.m)

    @property
    def beta(self) -> Fraction:
        return Fraction(self.p, self.r)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    inequality_ok: bool
    coprime_ok: bool
    # q after reducing p/q; below rm only when coprimality fails
    reduced_q: int

    @property
    def reason(self) -> Optional[str]:
        if self.admissible:
            return None
        failed = [name for name, ok in (("inequality", self.inequality_ok), ("coprimality", self.coprime_ok)) if not ok]
        return "+".join(failed)

    def __bool__(self) -> bool:
        return self.admissible


def prop2_applies(params: PropTwoParams) -> Admissibility:
    m, r = params.m, params.r
    ineq = (r - 1) * m + 1 < params.p < r * m
    g = math.gcd(params.p, params.q)
    return Admissibility(ineq and g == 1, ineq, g == 1, params.q // g)


def _require_admissible(params: PropTwoParams) -> None:
    adm = prop2_applies(params)
    if not adm:
        raise InadmissibleParams(f"{params} is inadmissible ({adm.reason})")


def lattice_of(params: PropTwoParams) -> tuple[Fraction, Fraction]:
    _require_admissible(params)
    return params.alpha, params.beta


def params_for_lattice(alpha, beta) -> Optional[PropTwoParams]:
    """Inverse of :func:`lattice_of`: the unique ``(m, n, r, j)`` with ``alpha = 1/m`` and
    ``beta = n + j/r`` (``beta`` in lowest terms), or None if the shape does not match."""
    alpha, beta = as_rational(alpha), as_rational(beta)
    if alpha.numerator != 1 or beta.denominator == 1 or beta < 1:
        return None
    r = beta.denominator
    n, j = divmod(beta.numerator, r)
    return PropTwoParams(alpha.denominator, n, r, j)


@dataclass(frozen=True)
class KernelCertificate:
    params: PropTwoParams
    vectors: tuple  # v_0 .. v_{m-1}, each a length-q tuple of 0/1
    image: tuple  # all-ones, length p
    kernel_basis: tuple  # v_0 - v_l for l = 1 .. m-1
    rank_bound: int


def kernel_certificate(params: PropTwoParams) -> KernelCertificate:
    _require_admissible(params)
    m, q = params.m, params.q
    vectors = []
    for l in range(m):
        support = {l + shift * m for shift in range(params.r)}
        vectors.append(tuple(1 if i in support else 0 for i in range(q)))
    basis = tuple(tuple(a - b for a, b in zip(vectors[0], v)) for v in vectors[1:])
    return KernelCertificate(params, tuple(vectors), (1,) * params.p, basis, params.rank_bound)


@dataclass(frozen=True)
class CertificateReport:
    params: PropTwoParams
    x: object
    mode: str
    image_residuals: tuple  # ||P v_l - e||_inf, l = 0..m-1
    kernel_residuals: tuple  # ||P (v_0 - v_l)||_inf, l = 1..m-1
    rank: int
    rank_bound: int
    p: int
    pou_holds: bool

    @property
    def residuals_zero(self) -> bool:
        return all(v == 0 for v in self.image_residuals + self.kernel_residuals)

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.p

    @property
    def certified(self) -> bool:
        """Exact mode only: zero residuals and rank at most the bound, below p."""
        return self.mode == "exact" and self.residuals_zero and self.rank <= self.rank_bound < self.p


def verify_certificate(g: Window, params: PropTwoParams, x, mode: str = "exact") -> CertificateReport:
    """Apply the kernel certificate to ``P(x, 0)`` built from ``g``.

    The lattice is rebuilt from ``params`` (``p = rn + j``, ``q = rm``); callers
    cannot pass a mismatched one.
    """
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    cert = kernel_certificate(params)
    pou = check_partition_of_unity(g)
    if not pou.holds:
        raise PartitionOfUnityViolated(
            f"window does not satisfy the partition of unity (deviation {float(pou.deviation):.3g} "
            f"at x={pou.witness}); the certificate does not apply"
        )
    lat = LatticeParams(*lattice_of(params))
    assert (lat.p, lat.q) == (params.p, params.q)

    if mode == "exact":
        P = build_p_exact(g, lat, as_rational(x))
        rows = P.entries

        def apply(v):
            return [sum((a * b for a, b in zip(row, v) if b), Fraction(0)) for row in rows]

        image_res = tuple(max(abs(y - 1) for y in apply(v)) for v in cert.vectors)
        kernel_res = tuple(max(abs(y) for y in apply(w)) for w in cert.kernel_basis)
        rank = exact_rank(P)
    else:
        P = build_p(g, lat, x, 0)
        arr = P.as_array()
        V = np.array(cert.vectors, dtype=float).T
        image_res = tuple(float(v) for v in np.max(np.abs(arr @ V - 1.0), axis=0))
        if cert.kernel_basis:
            K = np.array(cert.kernel_basis, dtype=float).T
            kernel_res = tuple(float(v) for v in np.max(np.abs(arr @ K), axis=0))
        else:
            kernel_res = ()
        rank = numeric_rank(singular_values(arr), DEFAULT_REL_TOL)
    return CertificateReport(params, x, mode, image_res, kernel_res, rank, cert.rank_bound, params.p, pou.holds)


def certificate_points(params: PropTwoParams, count: int, seed: int = 0) -> list:
    """Deterministic rational sample points in ``[0, 1/m)``; the first is 0."""
    rng = random.Random(seed)
    pts = [Fraction(0)]
    while len(pts) < count:
        pts.append(Fraction(rng.randrange(1, 997), 997 * params.m))
    return pts


def delprete_applies(g: Window, beta) -> bool:
    """Integer ``beta >= 2`` together with a partition-of-unity window."""
    beta = as_rational(beta)
    if beta.denominator != 1 or beta < 2:
        return False
    return check_partition_of_unity(g).holds


@dataclass(frozen=True)
class ExcludedPoint:
    params: PropTwoParams
    alpha: Fraction
    beta: Fraction
    # |beta - (n + 1)| when m = n + 1, else None
    accumulation_distance: Optional[Fraction]


def enumerate_excluded(n: int, m: int, r_max: int) -> list:
    """All admissible ``(m, n, r, j)`` with ``2 <= r <= r_max``, sorted by beta."""
    if r_max < 2:
        raise ValueError("r_max must be at least 2")
    found = {}
    for r in range(2, r_max + 1):
        for j in range(1, r):
            params = PropTwoParams(m, n, r, j)
            if prop2_applies(params):
                alpha, beta = lattice_of(params)
                dist = abs(beta - (n + 1)) if m == n + 1 else None
                found.setdefault(beta, ExcludedPoint(params, alpha, beta, dist))
    return [found[b] for b in sorted(found)]


def density_matches(params: PropTwoParams) -> bool:
    """True when reducing ``alpha*beta`` keeps ``p = rn + j`` and ``q = rm``."""
    p, q, _ = density_fraction(params.alpha, params.beta)
    return (p, q) == (params.p, params.q)
