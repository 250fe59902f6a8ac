"""Command-line front end: ``scl-moments <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 tolerance failure under ``--check``.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys

from . import partitions as P
from .ensembles import parse_ensemble
from .relations import growth_report, parse_relation
from .spectra import empirical_moments, histogram, ks_distance, sample_spectra, variance_decay
from .tree_integrals import moment_table
from .weights import DEFAULT_GRID, is_phi_constant, parse_weight

# tolerances used by --check
SIM_TOL = {2: 0.05, 4: 0.1, 6: 0.3}
SIM_REL_TOL = 0.06
SIM_ODD_TOL = 0.1
THEORY_TOL = 1e-3
KS_TOL = 0.05
SLOPE_MAX = -0.8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def write_csv(rows, header, path=None, stream=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    elif stream is not None:
        stream.write(text)
    return text


def read_csv(path_or_text) -> list[dict]:
    """Parse a CSV written by this tool; numeric cells become floats."""
    if isinstance(path_or_text, str) and "\n" not in path_or_text and os.path.exists(path_or_text):
        with open(path_or_text, newline="") as fh:
            text = fh.read()
    else:
        text = path_or_text
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            try:
                row[k] = float(v) if v != "" else None
            except ValueError:
                row[k] = v
        out.append(row)
    return out


def _positive_int(name):
    def conv(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {s!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {v}")
        return v
    return conv


def _int_list(s):
    try:
        vals = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {s!r}")
    return vals


def _check_output(path):
    if not path:
        return
    d = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path) or not os.path.isdir(d) or not os.access(d, os.W_OK):
        raise OSError(f"cannot write output file {path!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int("--threads"), default=None,
                        help="worker threads (default: $SCL_WORKERS or 1)")
    common.add_argument("--out", default=None, help="CSV output path")
    common.add_argument("--check", action="store_true", help="exit 2 if results miss tolerances")
    common.add_argument("--quiet", action="store_true")

    parser = _Parser(prog="scl-moments", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("partitions", parents=[common], help="list non-crossing pair partitions")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--emit", choices=["sequences", "graphs"], default=None)

    p = sub.add_parser("phi", parents=[common], help="phi profile and constancy verdict")
    p.add_argument("--weight", required=True)
    p.add_argument("--grid", type=_positive_int("--grid"), default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=1e-3)

    p = sub.add_parser("theory", parents=[common], help="limiting moments from tree integrals")
    p.add_argument("--k-max", type=_positive_int("--k-max"), required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--grid", type=_positive_int("--grid"), default=DEFAULT_GRID)
    p.add_argument("--normalized", action="store_true")

    ens = _Parser(add_help=False)
    ens.add_argument("--ensemble", required=True, help="shorthand (wigner, band:0.25, ...) or JSON")
    ens.add_argument("--n", type=int, default=None)
    ens.add_argument("--dist", choices=["rademacher", "gaussian"], default=None)
    ens.add_argument("--normalized", action="store_true")

    p = sub.add_parser("simulate", parents=[common, ens], help="Monte Carlo trace moments")
    p.add_argument("--trials", type=_positive_int("--trials"), default=32)
    p.add_argument("--k-max", type=_positive_int("--k-max"), default=6)

    p = sub.add_parser("spectrum", parents=[common, ens], help="eigenvalue histogram and KS distance")
    p.add_argument("--trials", type=_positive_int("--trials"), default=4)
    p.add_argument("--bins", type=int, default=40)
    p.add_argument("--range", type=float, nargs=2, default=(-2.5, 2.5), metavar=("LO", "HI"))
    p.add_argument("--method", choices=["jacobi", "lapack"], default="lapack")

    p = sub.add_parser("variance", parents=[common], help="decay of Var(Y_N^(k)) with N")
    p.add_argument("--ensemble-family", required=True)
    p.add_argument("--ns", type=_int_list, default=[64, 128, 256, 512])
    p.add_argument("--k", type=_positive_int("--k"), default=4)
    p.add_argument("--trials", type=_positive_int("--trials"), default=64)
    p.add_argument("--dist", choices=["rademacher", "gaussian"], default=None)

    p = sub.add_parser("relation", help="dependence relation audits")
    rsub = p.add_subparsers(dest="relation_command", parser_class=_Parser)
    rsub.required = True
    r = rsub.add_parser("check", parents=[common], help="count the dependence conditions")
    r.add_argument("--relation", required=True)
    r.add_argument("--n", type=_positive_int("--n"), required=True)
    r.add_argument("--band", type=_positive_int("--band"), default=None)
    r.add_argument("--sweep", type=_int_list, default=None)
    return parser


def _say(args, *parts):
    if not args.quiet:
        print(*parts)


def cmd_partitions(args) -> int:
    parts = P.enumerate_nc_pair_partitions(args.k)
    ok = len(parts) == P.catalan(args.k // 2)
    for pi in parts:
        line = str(pi)
        if args.emit in ("sequences", "graphs"):
            seq = P.build_adopted_sequence(pi)
            ok &= P.verify_adopted(pi, seq)
            line += " seq=(" + ",".join(str(v) for v in seq.labels) + ")"
        if args.emit == "graphs":
            g = P.adopted_graph(pi)
            ok &= g.is_tree()
            edges = sorted(tuple(sorted(e)) for e in g.edges)
            line += " edges=" + ";".join(f"{a}-{b}" for a, b in edges)
        _say(args, line)
    if args.out:
        rows = [(i + 1, str(pi), " ".join(map(str, P.build_adopted_sequence(pi).labels)))
                for i, pi in enumerate(parts)]
        write_csv(rows, ["index", "blocks", "adopted_sequence"], args.out)
    _say(args, f"# {len(parts)} partitions (Catalan {P.catalan(args.k // 2)})")
    return 0 if ok or not args.check else 2


def cmd_phi(args) -> int:
    w = parse_weight(args.weight)
    if not args.tol > 0:
        raise ValueError("--tol must be positive")
    rep = is_phi_constant(w, args.tol, args.grid)
    verdict = "CONSTANT" if rep.constant_verdict else "NOT CONSTANT"
    _say(args, f"weight={w.label()} grid={args.grid} phi0={rep.phi0:.9g} "
               f"max_deviation={rep.max_deviation:.9g} verdict={verdict}")
    if args.out:
        rows = [(float(x), float(v), rep.phi0, float(v - rep.phi0))
                for x, v in zip(rep.x, rep.phi_values)]
        write_csv(rows, ["x", "phi", "phi0", "deviation"], args.out)
    return 0 if rep.constant_verdict or not args.check else 2


def cmd_theory(args) -> int:
    w = parse_weight(args.weight)
    table = moment_table(args.k_max, w, args.grid, args.normalized)
    rows = list(table.rows())
    ok = all(abs(gap) <= THEORY_TOL for k, _, _, gap in rows)
    write_csv(rows, ["k", "mu_theory", "catalan", "gap"], args.out,
              None if args.quiet else sys.stdout)
    return 0 if ok or not args.check else 2


def _ensemble(args, n=None):
    return parse_ensemble(args.ensemble if hasattr(args, "ensemble") else args.ensemble_family,
                          n=n if n is not None else args.n, dist=args.dist, seed=args.seed)


def sim_tolerance(k: int, theory: float) -> float:
    if k % 2:
        return SIM_ODD_TOL
    return SIM_TOL.get(k, SIM_REL_TOL * abs(theory))


def cmd_simulate(args) -> int:
    spec = _ensemble(args)
    rep = empirical_moments(spec, args.k_max, args.trials, args.normalized, args.threads)
    rows = [(r.k, r.theory, r.mean, r.var, r.abs_err) for r in rep.rows]
    write_csv(rows, ["k", "theory", "empirical_mean", "empirical_var", "abs_err"], args.out,
              None if args.quiet else sys.stdout)
    ok = all(r.theory is None or r.abs_err <= sim_tolerance(r.k, r.theory) for r in rep.rows)
    return 0 if ok or not args.check else 2


def cmd_spectrum(args) -> int:
    spec = _ensemble(args)
    lo, hi = args.range
    if not lo < hi:
        raise ValueError("--range needs LO < HI")
    if args.bins < 8:
        raise ValueError("--bins must be at least 8")
    spectra = sample_spectra(spec, args.trials, args.method, args.normalized, args.threads)
    h = histogram(spectra, args.bins, (lo, hi))
    ks = ks_distance(spectra)
    rows = zip(map(float, h.bin_left), map(float, h.bin_right),
               map(float, h.empirical_density), map(float, h.semicircle_density))
    write_csv(rows, ["bin_left", "bin_right", "empirical_density", "semicircle_density"],
              args.out, None if (args.quiet or args.out) else sys.stdout)
    _say(args, f"# ks_distance={ks:.9g} eigenvalues={sum(len(s) for s in spectra)}")
    return 0 if ks <= KS_TOL or not args.check else 2


def cmd_variance(args) -> int:
    if len(args.ns) < 3:
        raise ValueError("--ns needs at least 3 sizes")
    if args.trials < 16:
        raise ValueError("--trials must be at least 16")
    _ensemble(args, n=args.ns[0])
    res = variance_decay(lambda n: _ensemble(args, n=n), args.ns, args.k, args.trials, args.threads)
    rows = [(n, x, v) for n, x, v in zip(args.ns, res.xs, res.variances)]
    write_csv(rows, ["n", res.axis, "variance"], args.out, None if args.quiet else sys.stdout)
    _say(args, f"# slope={res.slope:.9g} (log variance vs log {res.axis})")
    return 0 if res.slope <= SLOPE_MAX or not args.check else 2


def cmd_relation(args) -> int:
    sizes = args.sweep or [args.n]

    def build(n):
        return parse_relation(args.relation, n)

    band_of = (lambda n: args.band) if args.band else None
    rep = growth_report(build, sizes, band_of)
    rows = [(r.n, r.report.c1_max, r.report.c2_max, r.report.c3_count, r.c1_ratio, r.c3_ratio)
            for r in rep.rows]
    write_csv(rows, ["n", "c1_max", "c2_max", "c3_count", "c1_ratio", "c3_ratio"], args.out,
              None if args.quiet else sys.stdout)
    ok = rep.monotone_decreasing if len(sizes) > 1 else True
    if len(sizes) > 1:
        _say(args, f"# ratios decreasing: {rep.monotone_decreasing}")
    return 0 if ok or not args.check else 2


COMMANDS = {
    "partitions": cmd_partitions,
    "phi": cmd_phi,
    "theory": cmd_theory,
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "variance": cmd_variance,
    "relation": cmd_relation,
}


def parse_and_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_output(getattr(args, "out", None))
        if getattr(args, "ensemble", None) is not None:
            _ensemble(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return parse_and_dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
