"""Rank decisions for P matrices: singular values in floating point, exact rank over Q."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from gaborframe.pmatrix import PMatrix

DEFAULT_REL_TOL = 1e-8


@dataclass(frozen=True)
class SingularProfile:
    values: np.ndarray  # nonincreasing, length min(p, q)

    @property
    def largest(self) -> float:
        return float(self.values[0]) if len(self.values) else 0.0

    @property
    def smallest(self) -> float:
        return float(self.values[-1]) if len(self.values) else 0.0


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, PMatrix):
        return M.as_array()
    arr = np.asarray(M)
    if arr.dtype == object:
        arr = arr.astype(float)
    return arr


def singular_values(M) -> SingularProfile:
    """All singular values via LAPACK's SVD (``numpy.linalg.svd``)."""
    arr = _as_matrix(M)
    if arr.size == 0:
        return SingularProfile(np.zeros(0))
    return SingularProfile(np.linalg.svd(arr, compute_uv=False))


def numeric_rank(prof: SingularProfile, rel_tol: float = DEFAULT_REL_TOL) -> int:
    if not 0 < rel_tol < 1:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    top = prof.largest
    if top == 0.0:
        return 0
    return int(np.count_nonzero(prof.values > rel_tol * top))


def _integer_rows(rows) -> list:
    """Scale each row by the lcm of its denominators; rank over Q is unchanged."""
    out = []
    for row in rows:
        row = [Fraction(v) for v in row]
        scale = math.lcm(1, *(v.denominator for v in row))
        out.append([int(v * scale) for v in row])
    return out


def exact_rank(M) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination with full pivoting.

    Pivot choice is deterministic: largest absolute value among the remaining
    entries, ties broken by smallest (row, column).
    """
    rows = M.entries if isinstance(M, PMatrix) else M
    a = _integer_rows(rows)
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    prev = 1
    rank = 0
    for step in range(min(n_rows, n_cols)):
        best, pr, pc = 0, -1, -1
        for i in range(step, n_rows):
            for j in range(step, n_cols):
                v = abs(a[i][j])
                if v > best:
                    best, pr, pc = v, i, j
        if best == 0:
            break
        a[step], a[pr] = a[pr], a[step]
        if pc != step:
            for row in a:
                row[step], row[pc] = row[pc], row[step]
        piv = a[step][step]
        for i in range(step + 1, n_rows):
            ai = a[i]
            lead = ai[step]
            for j in range(step + 1, n_cols):
                # Bareiss: the division is exact.
                ai[j] = (piv * ai[j] - lead * a[step][j]) // prev
            ai[step] = 0
        prev = piv
        rank += 1
    return rank
