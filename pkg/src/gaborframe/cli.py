"""Command line front end.

Exit status: 0 on success, 2 on usage errors, 1 on runtime errors.  Machine
readable output goes to stdout; human summaries go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from gaborframe.frameset import GridSpec, render_heatmap, scan_plane, test_lattice
from gaborframe.obstructions import (
    PropTwoParams,
    certificate_points,
    enumerate_excluded,
    prop2_applies,
    verify_certificate,
)
from gaborframe.pmatrix import LatticeParams, build_p, build_p_exact
from gaborframe.rational import RationalError, format_rational, parse_rational
from gaborframe.ranktest import DEFAULT_REL_TOL, exact_rank, numeric_rank, singular_values
from gaborframe.windows import WindowError, check_partition_of_unity, parse_window
from gaborframe.zak import DEFAULT_TOL, zak, zak_exact

log = logging.getLogger("gaborframe")


# -- argument types ----------------------------------------------------------------


def rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except RationalError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def positive_rational_arg(text: str) -> Fraction:
    value = rational_arg(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def real_arg(text: str):
    """Rational if written as num/den or an integer, otherwise a float."""
    try:
        return parse_rational(text)
    except RationalError:
        pass
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def window_arg(text: str):
    try:
        return parse_window(text)
    except WindowError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def grid_arg(text: str) -> tuple:
    try:
        nx, nxi = (int(v) for v in text.lower().split("x"))
        if nx < 1 or nxi < 1:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}") from None
    return nx, nxi


def _fmt_float(v: float) -> str:
    return f"{v + 0.0:.17g}"


# -- config files -------------------------------------------------------------------


@dataclass
class RunConfig:
    """Effective settings of one invocation, stored as ``key = value`` lines.

    Keys are the long option names with dashes replaced by underscores.
    """

    command: str
    values: dict = field(default_factory=dict)

    _SKIP = ("config", "save_config", "command", "func", "action")

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace, raw: dict) -> "RunConfig":
        values = {k: v for k, v in raw.items() if k not in cls._SKIP and v is not None and v is not False}
        return cls(ns.command, values)

    def to_text(self) -> str:
        lines = [f"command = {self.command}"]
        lines += [f"{k} = {'true' if v is True else v}" for k, v in sorted(self.values.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        command, values = None, {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, value = key.strip(), value.strip()
            if key == "command":
                command = value
            else:
                values[key] = value
        return cls(command, values)

    def to_argv(self) -> list:
        argv = [self.command] if self.command else []
        for key, value in self.values.items():
            flag = "--" + key.replace("_", "-")
            if value in (True, "true"):
                argv.append(flag)
            else:
                argv += [flag, str(value)]
        return argv


# -- subcommands ----------------------------------------------------------------------


def cmd_zak(args) -> int:
    if args.exact:
        if args.xi != 0:
            args.parser.error("--exact only evaluates at xi = 0")
        if not isinstance(args.x, Fraction):
            args.parser.error("--exact needs a rational --x (num/den)")
        print(format_rational(zak_exact(args.window, args.alpha, args.x)))
    else:
        z = zak(args.window, args.alpha, args.x, args.xi, tol=args.tol)
        print(f"{_fmt_float(z.real)} {_fmt_float(z.imag)}")
    return 0


def cmd_pmat(args) -> int:
    lat = LatticeParams(args.alpha, args.beta)
    if args.exact:
        if args.xi != 0:
            args.parser.error("--exact only builds P at xi = 0")
        if not isinstance(args.x, Fraction):
            args.parser.error("--exact needs a rational --x (num/den)")
        P = build_p_exact(args.window, lat, args.x)
    else:
        P = build_p(args.window, lat, args.x, args.xi, tol=args.tol)
    sys.stdout.write(P.to_csv())
    print(f"p={lat.p} q={lat.q}", file=sys.stderr)
    if args.rank:
        if args.exact:
            print(f"exact rank: {exact_rank(P)}", file=sys.stderr)
        prof = singular_values(P)
        print(f"numeric rank: {numeric_rank(prof, args.rel_tol)} (sigma_p/sigma_1 = "
              f"{prof.smallest / prof.largest if prof.largest else 0.0:.3e})", file=sys.stderr)
    return 0


def cmd_pou(args) -> int:
    rep = check_partition_of_unity(args.window, args.samples, args.tol)
    dev = format_rational(rep.deviation) if rep.exact else f"{rep.deviation:.6e}"
    if rep.holds:
        print("holds")
    else:
        print(f"fails {format_rational(rep.witness)} {dev}")
    print(f"{rep.sample_count} samples, {'exact' if rep.exact else 'floating'} sums, max deviation {dev}",
          file=sys.stderr)
    return 0


def cmd_obstruct(args) -> int:
    if args.action == "enumerate":
        if args.n is None or args.m is None:
            args.parser.error("obstruct enumerate needs --n and --m")
        print("m,n,r,j,alpha,beta,p,q,rank_bound")
        for pt in enumerate_excluded(args.n, args.m, args.rmax):
            pr = pt.params
            print(f"{pr.m},{pr.n},{pr.r},{pr.j},{format_rational(pt.alpha)},{format_rational(pt.beta)},"
                  f"{pr.p},{pr.q},{pr.rank_bound}")
        return 0
    if None in (args.m, args.n, args.r, args.j) or args.window is None:
        args.parser.error("obstruct needs --window, --m, --n, --r and --j")
    try:
        params = PropTwoParams(args.m, args.n, args.r, args.j)
    except ValueError as exc:
        args.parser.error(str(exc))
    adm = prop2_applies(params)
    if not adm:
        print(f"inadmissible ({adm.reason}); reduced q = {adm.reduced_q}", file=sys.stderr)
        return 1
    mode = "exact" if args.exact else "float"
    xs = [args.x] if args.x is not None else certificate_points(params, args.points, args.seed)
    if mode == "exact" and not all(isinstance(x, Fraction) for x in xs):
        args.parser.error("--exact needs a rational --x (num/den)")
    reports = [verify_certificate(args.window, params, x, mode) for x in xs]
    print("x,mode,max_image_residual,max_kernel_residual,rank,rank_bound,p")
    for x, rep in zip(xs, reports):
        res_img = max(rep.image_residuals)
        res_ker = max(rep.kernel_residuals, default=0)
        fmt = format_rational if mode == "exact" else (lambda v: f"{v:.3e}")
        xs_txt = format_rational(x) if isinstance(x, Fraction) else repr(x)
        print(f"{xs_txt},{mode},{fmt(res_img)},{fmt(res_ker)},{rep.rank},{rep.rank_bound},{rep.p}")
    return 0


def _grid(args) -> GridSpec:
    nx, nxi = args.grid
    return GridSpec(nx, nxi, reduced_domain=args.reduced_domain)


def cmd_test(args) -> int:
    verdict = test_lattice(args.window, args.alpha, args.beta, _grid(args), args.rel_tol, args.force_scan)
    if args.json:
        print(json.dumps(verdict.to_dict(), sort_keys=True))
    else:
        print(verdict.label)
    info = verdict.to_dict()
    print(f"alpha*beta = {verdict.p}/{verdict.q}; margin {info['margin']}; witness "
          f"({info['witness_x']}, {info['witness_xi']})", file=sys.stderr)
    for c in info["caveats"]:
        print(f"caveat: {c}", file=sys.stderr)
    return 0


def cmd_scan(args) -> int:
    result = scan_plane(
        args.window,
        (args.alpha_min, args.alpha_max),
        (args.beta_min, args.beta_max),
        args.max_den,
        _grid(args),
        args.rel_tol,
        workers=args.threads,
    )
    prefix = Path(args.out)
    csv_path = prefix.with_name(prefix.name + ".csv")
    csv_path.write_text(result.to_csv())
    ppm_path = render_heatmap(result, prefix.with_name(prefix.name + ".ppm"))
    print(csv_path)
    print(ppm_path)
    counts = {}
    for v in result.verdicts:
        counts[v.label] = counts.get(v.label, 0) + 1
    for label, n in sorted(counts.items()):
        print(f"{label}: {n}", file=sys.stderr)
    return 0


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaborframe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, window_required=True):
        p.add_argument("--window", type=window_arg, required=window_required,
                       help="bspline:N, chi:a,b, gauss:width or poly:path.json")
        p.add_argument("--config", help="key = value file; flags on the command line win")
        p.add_argument("--save-config", help="write the effective settings to this file")
        p.set_defaults(parser=p)

    p = sub.add_parser("zak", help="evaluate the Zak transform")
    common(p)
    p.add_argument("--alpha", type=positive_rational_arg, required=True)
    p.add_argument("--x", type=real_arg, required=True)
    p.add_argument("--xi", type=real_arg, default=Fraction(0))
    p.add_argument("--exact", action="store_true")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_zak)

    p = sub.add_parser("pmat", help="print the P matrix as CSV")
    common(p)
    p.add_argument("--alpha", type=positive_rational_arg, required=True)
    p.add_argument("--beta", type=positive_rational_arg, required=True)
    p.add_argument("--x", type=real_arg, default=Fraction(0))
    p.add_argument("--xi", type=real_arg, default=Fraction(0))
    p.add_argument("--exact", action="store_true")
    p.add_argument("--rank", action="store_true", help="report ranks on stderr")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p.set_defaults(func=cmd_pmat)

    p = sub.add_parser("pou", help="check the partition of unity")
    common(p)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_pou)

    p = sub.add_parser("obstruct", help="verify kernel certificates or enumerate excluded lattices")
    common(p, window_required=False)
    p.add_argument("action", nargs="?", choices=("verify", "enumerate"), default="verify")
    for name in ("m", "n", "r", "j"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--rmax", type=int, default=10)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--x", type=real_arg)
    p.add_argument("--points", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_obstruct)

    def lattice_test_opts(p):
        p.add_argument("--grid", type=grid_arg, default=(64, 64), help="NXxNXI, default 64x64")
        p.add_argument("--tol", "--rel-tol", dest="rel_tol", type=float, default=DEFAULT_REL_TOL,
                       help="relative singular value threshold")
        p.add_argument("--reduced-domain", action="store_true", help="scan x over [0, alpha) only")

    p = sub.add_parser("test", help="verdict for one lattice")
    common(p)
    p.add_argument("--alpha", type=positive_rational_arg, required=True)
    p.add_argument("--beta", type=positive_rational_arg, required=True)
    lattice_test_opts(p)
    p.add_argument("--force-scan", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("scan", help="verdict map over a box of rational lattices")
    common(p)
    for name in ("alpha-min", "alpha-max", "beta-min", "beta-max"):
        p.add_argument(f"--{name}", type=positive_rational_arg, required=True)
    p.add_argument("--max-den", type=int, required=True)
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.csv and PREFIX.ppm")
    p.add_argument("--threads", type=int, default=1)
    lattice_test_opts(p)
    p.set_defaults(func=cmd_scan)
    return parser


def _apply_config(argv: list) -> list:
    """Prepend values from ``--config FILE`` so explicit flags override them."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    try:
        cfg = RunConfig.from_text(Path(argv[i + 1]).read_text())
    except OSError as exc:
        print(f"gaborframe: error: cannot read config: {exc}", file=sys.stderr)
        raise SystemExit(2)
    rest = argv[:i] + argv[i + 2 :]
    command = next((a for a in rest if not a.startswith("-")), None) or cfg.command
    given = {a.split("=")[0] for a in rest if a.startswith("--")}
    extra = []
    for key, value in cfg.values.items():
        flag = "--" + key.replace("_", "-")
        if flag in given:
            continue
        extra += [flag] if value == "true" else [flag, value]
    if command in rest:
        k = rest.index(command)
        return rest[: k + 1] + extra + rest[k + 1 :]
    return [command] + extra + rest


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    if args.save_config:
        raw = {k: v for k, v in vars(args).items() if k not in ("parser", "verbose")}
        for k, v in raw.items():
            if isinstance(v, Fraction):
                raw[k] = format_rational(v)
            elif k == "window":
                raw[k] = v.label
            elif k == "grid":
                raw[k] = f"{v[0]}x{v[1]}"
        Path(args.save_config).write_text(RunConfig.from_namespace(args, raw).to_text())
    try:
        return args.func(args)
    except (ValueError, WindowError) as exc:
        print(f"gaborframe: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
