import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from gaborframe.pmatrix import (
    DensityAboveCritical,
    LatticeParams,
    build_p,
    build_p_exact,
    index_formula_consistency,
    p_matrices,
)
from gaborframe.ranktest import numeric_rank, singular_values
from gaborframe.windows import WindowError, bspline, characteristic, gaussian
from gaborframe.zak import zak

B2 = bspline(2)
F = Fraction


def test_lattice_params():
    lat = LatticeParams(F(1, 3), F(5, 2))
    assert (lat.p, lat.q) == (5, 6)
    assert lat.zak_period == 2
    assert lat.subcritical


def test_shape_and_first_entry():
    lat = LatticeParams(F(1, 3), F(5, 2))
    P = build_p(B2, lat, 0, 0)
    assert P.entries.shape == (5, 6)
    assert P.entries[0, 0] == 1


@pytest.mark.parametrize("g", [B2, bspline(3), gaussian(1), characteristic(0, 1)])
def test_critical_density_is_scalar_zak(g):
    lat = LatticeParams(F(2, 3), F(3, 2))
    P = build_p(g, lat, 0.3, 0.4)
    assert P.entries.shape == (1, 1)
    assert abs(P.entries[0, 0] - zak(g, F(2, 3), 0.3, 0.4)) < 1e-13


def test_entries_match_zak_definition():
    lat = LatticeParams(F(1, 5), F(7, 2))
    rng = random.Random(0)
    for g in (B2, bspline(4), gaussian(0.8)):
        for _ in range(5):
            x, xi = F(rng.randrange(0, 1000), 700), rng.random()
            P = build_p(g, lat, x, xi)
            for k in range(lat.p):
                for l in range(lat.q):
                    expected = zak(g, lat.zak_period, x + lat.alpha * l + k / lat.beta, xi)
                    assert abs(P.entries[k, l] - expected) < 1e-12


def test_exact_variant_values():
    lat = LatticeParams(F(1, 3), F(5, 2))
    P = build_p_exact(B2, lat, F(1, 10))
    assert len(P.entries) == 5 and all(len(r) == 6 for r in P.entries)
    assert P.entries[0][0] == F(9, 10)
    chi = build_p_exact(characteristic(0, 1), LatticeParams(1, 1), F(1, 3))
    assert chi.entries == [[F(1)]]


def test_exact_entries_bounded_by_direct_evaluation():
    lat = LatticeParams(F(1, 5), F(7, 2))
    P = build_p_exact(B2, lat, F(0))
    assert len(P.entries) == 7 and len(P.entries[0]) == 10
    for k in range(7):
        for l in range(10):
            t = F(l, 5) + F(2 * k, 7)
            direct = sum(max(F(0), 1 - abs(t - 2 * s)) for s in range(-5, 6))
            assert P.entries[k][l] == direct
            assert 0 <= P.entries[k][l] <= 1


def test_exact_requires_exact_window():
    with pytest.raises(WindowError):
        build_p_exact(gaussian(1), LatticeParams(1, F(1, 2)), F(0))


def test_above_critical_density():
    lat = LatticeParams(2, F(3, 4))
    with pytest.raises(DensityAboveCritical):
        build_p(B2, lat, 0, 0)
    with pytest.raises(DensityAboveCritical):
        build_p_exact(B2, lat, F(0))


@pytest.mark.parametrize("alpha, beta", [(F(1, 3), F(5, 2)), (F(1, 5), F(7, 2)), (F(1), F(1)), (F(3, 7), F(2, 9))])
def test_index_formula(alpha, beta):
    lat = LatticeParams(alpha, beta)
    assert index_formula_consistency(lat)


@pytest.mark.parametrize("order", [2, 3, 4])
def test_column_shift(order):
    g = bspline(order)
    rng = random.Random(order)
    for _ in range(20):
        lat = LatticeParams(F(1, rng.randint(2, 5)), F(rng.randint(1, 9), rng.randint(1, 4)))
        if not lat.subcritical:
            continue
        x, xi = F(rng.randrange(0, 1000), 997), rng.random()
        P0 = build_p(g, lat, x, xi).entries
        P1 = build_p(g, lat, x + lat.alpha, xi).entries
        expected = np.roll(P0, -1, axis=1)
        expected[:, -1] *= cmath.exp(2j * math.pi * xi)
        assert np.max(np.abs(P1 - expected)) < 1e-12
        assert numeric_rank(singular_values(P1)) == numeric_rank(singular_values(P0))


def test_xi_period_one():
    lat = LatticeParams(F(1, 3), F(5, 2))
    for xi in (F(1, 7), F(3, 4), 0.25):
        a = build_p(bspline(3), lat, F(2, 9), xi).entries
        b = build_p(bspline(3), lat, F(2, 9), xi + 1).entries
        assert np.array_equal(a, b)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_float_matches_exact(order):
    g = bspline(order)
    rng = random.Random(50 + order)
    for _ in range(20):
        lat = LatticeParams(F(1, rng.randint(1, 6)), F(rng.randint(1, 9), rng.randint(1, 5)))
        if not lat.subcritical:
            continue
        x = F(rng.randrange(-500, 500), rng.randint(1, 300))
        fl = build_p(g, lat, x, 0).entries
        ex = np.array([[float(v) for v in row] for row in build_p_exact(g, lat, x).entries])
        assert np.max(np.abs(fl - ex)) <= 1e-14


def test_nonnegative_and_bounded_at_xi_zero():
    rng = random.Random(7)
    for _ in range(30):
        g = bspline(rng.randint(1, 4))
        lat = LatticeParams(F(1, rng.randint(1, 5)), F(rng.randint(1, 7), rng.randint(1, 3)))
        if not lat.subcritical or lat.zak_period.denominator != 1:
            continue
        P = build_p(g, lat, rng.uniform(0, 2), 0).entries
        assert np.all(P.real >= 0) and np.all(P.real <= 1 + 1e-15)


def test_grid_is_order_independent():
    lat = LatticeParams(F(1, 4), F(7, 3))
    xs = [F(i, 13) for i in range(13)]
    xis = [F(j, 8) for j in range(8)]
    full = p_matrices(bspline(3), lat, xs, xis)
    perm = list(reversed(xs))
    again = p_matrices(bspline(3), lat, perm, list(reversed(xis)))
    assert np.array_equal(full, again[::-1, ::-1])
    one = build_p(bspline(3), lat, xs[5], xis[3]).entries
    assert np.array_equal(one, full[5, 3])


def test_csv_formats():
    lat = LatticeParams(F(1, 3), F(5, 2))
    text = build_p_exact(B2, lat, F(1, 10)).to_csv()
    assert text.splitlines()[0] == "9/10,17/30,7/30,1/10,13/30,23/30"
    row = build_p(B2, lat, 0, F(1, 4)).to_csv().splitlines()[0]
    assert row.split(",")[0] == "1+0j"
