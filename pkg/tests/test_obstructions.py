import random
from fractions import Fraction

import pytest

from gaborframe.obstructions import (
    InadmissibleParams,
    PartitionOfUnityViolated,
    PropTwoParams,
    certificate_points,
    delprete_applies,
    density_matches,
    enumerate_excluded,
    kernel_certificate,
    lattice_of,
    params_for_lattice,
    prop2_applies,
    verify_certificate,
)
from gaborframe.pmatrix import LatticeParams, build_p_exact
from gaborframe.ranktest import exact_rank
from gaborframe.windows import bspline, characteristic, gaussian
from oracles import brute_force_excluded, naive_rank

F = Fraction
B2 = bspline(2)


def test_admissible_examples():
    assert prop2_applies(PropTwoParams(3, 2, 2, 1))
    assert prop2_applies(PropTwoParams(3, 2, 5, 4))
    assert lattice_of(PropTwoParams(3, 2, 5, 4)) == (F(1, 3), F(14, 5))


def test_boundary_of_strict_inequality():
    adm = prop2_applies(PropTwoParams(2, 1, 2, 1))
    assert not adm and adm.reason == "inequality"


def test_coprimality_only_failure_flags_reduced_q():
    params = PropTwoParams(4, 3, 3, 1)
    adm = prop2_applies(params)
    assert adm.inequality_ok and not adm.coprime_ok and adm.reason == "coprimality"
    assert adm.reduced_q < params.q
    assert not density_matches(params)


def test_j_range_checked():
    with pytest.raises(ValueError):
        PropTwoParams(3, 2, 2, 2)
    with pytest.raises(ValueError):
        PropTwoParams(3, 2, 2, 0)


@pytest.mark.parametrize(
    "params, lattice",
    [((3, 2, 2, 1), (F(1, 3), F(5, 2))), ((5, 3, 2, 1), (F(1, 5), F(7, 2))), ((3, 2, 3, 2), (F(1, 3), F(8, 3)))],
)
def test_lattice_of(params, lattice):
    pr = PropTwoParams(*params)
    # brute force admissibility
    m, n, r, j = params
    assert (r - 1) * m + 1 < r * n + j < r * m
    assert lattice_of(pr) == lattice
    lat = LatticeParams(*lattice)
    assert (lat.p, lat.q) == (pr.p, pr.q)
    assert params_for_lattice(*lattice) == pr


def test_lattice_of_rejects_inadmissible():
    with pytest.raises(InadmissibleParams):
        lattice_of(PropTwoParams(2, 1, 2, 1))


def test_params_for_lattice_shapes():
    assert params_for_lattice(F(2, 3), F(5, 2)) is None
    assert params_for_lattice(F(1, 3), F(2)) is None
    assert params_for_lattice(F(1, 3), F(1, 2)) is None


def test_m_equal_one_never_admissible():
    for n in range(1, 6):
        for r in range(2, 12):
            for j in range(1, r):
                assert not prop2_applies(PropTwoParams(1, n, r, j))


def test_kernel_certificate_vectors():
    cert = kernel_certificate(PropTwoParams(3, 2, 2, 1))
    assert cert.vectors == ((1, 0, 0, 1, 0, 0), (0, 1, 0, 0, 1, 0), (0, 0, 1, 0, 0, 1))
    assert cert.kernel_basis == ((1, -1, 0, 1, -1, 0), (1, 0, -1, 1, 0, -1))
    assert cert.image == (1,) * 5
    assert cert.rank_bound == 4

    cert = kernel_certificate(PropTwoParams(5, 3, 2, 1))
    assert {i for i, v in enumerate(cert.vectors[0]) if v} == {0, 5}
    assert len(cert.kernel_basis) == 4
    for v in cert.vectors:
        assert sum(v) == 2


def test_kernel_basis_independent():
    for params in [PropTwoParams(3, 2, 2, 1), PropTwoParams(5, 3, 2, 1), PropTwoParams(3, 2, 5, 4)]:
        basis = kernel_certificate(params).kernel_basis
        gram = [[F(sum(a * b for a, b in zip(u, v))) for v in basis] for u in basis]
        assert exact_rank(gram) == naive_rank(gram) == params.m - 1


def test_verify_exact_example():
    rep = verify_certificate(B2, PropTwoParams(3, 2, 2, 1), F(1, 10), "exact")
    assert all(v == 0 and isinstance(v, Fraction) for v in rep.image_residuals + rep.kernel_residuals)
    assert rep.rank == 4 == rep.rank_bound < rep.p == 5
    lat = LatticeParams(F(1, 3), F(5, 2))
    assert naive_rank(build_p_exact(B2, lat, F(1, 10)).entries) == 4
    assert rep.certified


def test_verify_float_example():
    rep = verify_certificate(B2, PropTwoParams(3, 2, 2, 1), 0.37, "float")
    assert max(rep.image_residuals + rep.kernel_residuals) < 1e-12
    assert rep.rank == 4
    assert not rep.certified  # only exact mode certifies


def test_verify_refuses_without_partition_of_unity():
    with pytest.raises(PartitionOfUnityViolated):
        verify_certificate(gaussian(1), PropTwoParams(3, 2, 2, 1), F(0))
    with pytest.raises(PartitionOfUnityViolated):
        verify_certificate(characteristic(0, F(1, 2)), PropTwoParams(3, 2, 2, 1), F(0))


def test_verify_rejects_inadmissible():
    with pytest.raises(InadmissibleParams):
        verify_certificate(B2, PropTwoParams(2, 1, 2, 1), F(0))


ADMISSIBLE = [PropTwoParams(*t) for t in [(3, 2, 2, 1), (3, 2, 5, 4), (5, 3, 2, 1), (3, 2, 3, 2), (4, 3, 3, 2), (5, 4, 4, 3)]]
POU_WINDOWS = [bspline(1), bspline(2), bspline(3), bspline(4), characteristic(0, 1), characteristic(F(-1, 3), F(2, 3))]


@pytest.mark.parametrize("params", ADMISSIBLE, ids=str)
@pytest.mark.parametrize("g", POU_WINDOWS, ids=lambda g: g.label)
def test_certificate_holds_for_partition_of_unity_windows(params, g):
    assert prop2_applies(params)
    rng = random.Random(hash((params.m, params.n, params.r, params.j)) & 0xFFFF)
    for _ in range(20):
        x = F(rng.randrange(0, 1000), 1000 * params.m)
        rep = verify_certificate(g, params, x, "exact")
        assert rep.residuals_zero
        assert rep.rank <= rep.rank_bound < rep.p
        # every kernel vector annihilates the exact matrix
        assert all(v == 0 for v in rep.kernel_residuals)


def test_certificate_points_deterministic():
    params = PropTwoParams(3, 2, 2, 1)
    pts = certificate_points(params, 20, seed=4)
    assert pts == certificate_points(params, 20, seed=4)
    assert pts[0] == 0 and all(0 <= x < F(1, 3) for x in pts)


@pytest.mark.parametrize(
    "g, beta, expected",
    [(B2, F(2), True), (B2, F(5, 2), False), (gaussian(1), F(2), False), (B2, F(1), False), (bspline(3), F(7), True)],
)
def test_delprete(g, beta, expected):
    assert delprete_applies(g, beta) is expected


@pytest.mark.parametrize("n, m, r_max", [(2, 3, 5), (2, 3, 12), (3, 4, 9), (4, 5, 7), (1, 2, 3), (3, 5, 10), (5, 7, 8)])
def test_enumeration_matches_brute_force(n, m, r_max):
    got = [pt.beta for pt in enumerate_excluded(n, m, r_max)]
    assert got == brute_force_excluded(n, m, r_max)
    assert got == sorted(set(got))


def test_enumeration_n2_m3():
    pts = enumerate_excluded(2, 3, 5)
    assert [pt.beta for pt in pts] == [F(5, 2), F(8, 3), F(11, 4), F(14, 5)]
    assert [pt.accumulation_distance for pt in pts] == [F(1, 2), F(1, 3), F(1, 4), F(1, 5)]
    assert all(pt.alpha == F(1, 3) for pt in pts)


def test_enumeration_accumulates_at_n_plus_one():
    betas = [pt.beta for pt in enumerate_excluded(2, 3, 50)]
    assert max(betas) > 3 - F(1, 25)
    assert max(betas) < 3


def test_enumeration_empty_family():
    assert enumerate_excluded(1, 2, 3) == []


def test_enumeration_rejects_small_rmax():
    with pytest.raises(ValueError):
        enumerate_excluded(2, 3, 1)
