"""Rank tests and partition-of-unity obstructions for Gabor frames over rational lattices."""

from gaborframe.rational import density_fraction, format_rational, make_rational, parse_rational
from gaborframe.windows import (
    CharacteristicWindow,
    GaussianWindow,
    PiecewisePolyWindow,
    bspline,
    characteristic,
    check_partition_of_unity,
    gaussian,
    parse_window,
)
from gaborframe.zak import zak, zak_exact
from gaborframe.pmatrix import LatticeParams, PMatrix, build_p, build_p_exact, index_formula_consistency
from gaborframe.ranktest import SingularProfile, exact_rank, numeric_rank, singular_values
from gaborframe.obstructions import (
    PropTwoParams,
    delprete_applies,
    enumerate_excluded,
    kernel_certificate,
    lattice_of,
    prop2_applies,
    verify_certificate,
)
from gaborframe.frameset import GridSpec, Verdict, render_heatmap, scan_plane, test_lattice

__version__ = "0.1.0"

__all__ = [
    "CharacteristicWindow",
    "GaussianWindow",
    "GridSpec",
    "LatticeParams",
    "PMatrix",
    "PiecewisePolyWindow",
    "PropTwoParams",
    "SingularProfile",
    "Verdict",
    "bspline",
    "build_p",
    "build_p_exact",
    "characteristic",
    "check_partition_of_unity",
    "delprete_applies",
    "density_fraction",
    "enumerate_excluded",
    "exact_rank",
    "format_rational",
    "gaussian",
    "index_formula_consistency",
    "kernel_certificate",
    "lattice_of",
    "make_rational",
    "numeric_rank",
    "parse_rational",
    "parse_window",
    "prop2_applies",
    "render_heatmap",
    "scan_plane",
    "singular_values",
    "test_lattice",
    "verify_certificate",
    "zak",
    "zak_exact",
]
