"""Command-line driver: ``hankel-schmidt <schmidt|verify|reproduce> ...``.

Exit codes: 0 success; 2 bad spec or refused symbol; 3 ambiguous clustering;
4 a verification check failed; 5 nothing applicable was checked.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AmbiguousClustering, NotSymmetric, SpecError
from .pipeline import SECTIONS, Tolerances, analyze, parse_which, schmidt_only
from .reproduce import EXAMPLES, format_table, reproduce
from .spec_io import build_symbol, load

EXIT_OK, EXIT_SPEC, EXIT_AMBIGUOUS, EXIT_FAIL, EXIT_NA = 0, 2, 3, 4, 5


def clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def write_json(path, obj):
    text = json.dumps(clean(obj), indent=1, sort_keys=True, allow_nan=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def build_parser():
    p = argparse.ArgumentParser(prog="hankel-schmidt",
                                description="Schmidt subspaces of block Hankel operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=("schmidt", "verify", "reproduce"))
    p.add_argument("example_pos", nargs="?", metavar="EXAMPLE",
                   help=f"example id for reproduce ({', '.join(EXAMPLES)})")
    p.add_argument("--spec", help="symbol spec JSON file")
    p.add_argument("--truncation", type=int, help="working window N (default degree + 4)")
    p.add_argument("--cluster-tol", type=float, default=Tolerances.cluster_tol)
    p.add_argument("--rank-tol", type=float, default=Tolerances.rank_tol)
    p.add_argument("--subspace-tol", type=float, default=Tolerances.subspace_tol)
    p.add_argument("--grid", type=int, default=256, help="minimum grid size for circle sampling")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--which", default="all", help=f"comma list from all, {', '.join(SECTIONS)}")
    p.add_argument("--example", help="example id for reproduce")
    return p


def _err(msg):
    print(f"hankel-schmidt: error: {msg}", file=sys.stderr)


def _config(args, N):
    return {"command": args.command, "spec": args.spec, "truncation": N,
            "which": args.which if args.command == "verify" else None,
            "example": args.example, "grid": args.grid}


def _load_symbol(args):
    if not args.spec:
        raise SpecError("--spec is required")
    U = build_symbol(load(args.spec))
    N = U.degree + 4 if args.truncation is None else args.truncation
    if N < U.degree:
        raise SpecError(f"truncation {N} is below the symbol degree {U.degree}")
    if not U.symmetric:
        raise NotSymmetric("symbol is not symmetric (U != U^t); refusing Schmidt analysis")
    return U, N


def _header(args, tol, U, N):
    return {"library_version": __version__, "config": _config(args, N),
            "tolerances": tol.to_dict(), "tail_bound": U.tail_bound, "m": U.m, "N": N}


def cmd_schmidt(args, tol, out):
    U, N = _load_symbol(args)
    clusters, G = schmidt_only(U, N, tol)
    report = _header(args, tol, U, N)
    report["clusters"] = [{"s": c.s, "multiplicity": c.multiplicity,
                           "cluster_residual": c.cluster_residual} for c in clusters]
    write_json(out / "schmidt.json", report)
    with open(out / "singular_values.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "multiplicity"])
        for c in clusters:
            w.writerow([repr(c.s), c.multiplicity])
    for c in clusters:
        print(f"s = {c.s:.15g}  multiplicity {c.multiplicity}")
    return EXIT_OK


def _verify_report(args, res, U):
    report = _header(args, res.tolerances, U, res.N)
    report["which"] = list(res.which)
    report["status"] = res.status()
    report["gamma_rank"] = res.gamma_rank
    report["global_checks"] = [c.to_dict() for c in
                               sorted(res.all_checks_global(), key=lambda c: c.name)]
    report["clusters"] = [cl.to_dict() for cl in res.clusters]
    return report


def _status_code(status):
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, "not_applicable": EXIT_NA}[status]


def _summary(res):
    for c in res.all_checks_global():
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.residual:.3e} <= {c.tolerance:.1e}")
    for cl in res.clusters:
        checks = cl.checks()
        bad = [c.name for c in checks if c.passed is not True]
        line = (f"s = {cl.s:.12g}  q = {cl.multiplicity}  r = {cl.r}  p = {cl.p}  "
                f"{len(checks) - len(bad)}/{len(checks)} checks pass")
        if bad:
            line += "  failing: " + ", ".join(bad)
        if cl.not_applicable:
            line += "  not applicable: " + ", ".join(sorted(cl.not_applicable))
        print(line)
    print(f"status: {res.status()}")


def cmd_verify(args, tol, out):
    U, N = _load_symbol(args)
    res = analyze(U, N, tol, parse_which(args.which), min_grid=args.grid)
    write_json(out / "verify.json", _verify_report(args, res, U))
    _summary(res)
    return _status_code(res.status())


def cmd_reproduce(args, tol, out):
    ex = args.example or args.example_pos
    if ex is None:
        raise SpecError(f"reproduce needs an example id ({', '.join(EXAMPLES)})")
    args.example = ex
    spec = load(args.spec) if args.spec else None
    facts, res, U = reproduce(ex, spec, args.truncation, tol, min_grid=args.grid)
    print(f"example {ex}: m = {U.m}, N = {res.N}, tail_bound = {U.tail_bound:.3e}")
    print(format_table(facts))
    ok = all(f.match for f in facts)
    print("all facts match" if ok else "MISMATCH")
    if args.out_given:
        report = _header(args, res.tolerances, U, res.N)
        report["facts"] = [f.to_dict() for f in facts]
        report["clusters"] = [cl.to_dict() for cl in res.clusters]
        write_json(out / "reproduce.json", report)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out_given = args.out is not None
    if args.example_pos and args.command != "reproduce":
        parser.error(f"unexpected argument {args.example_pos!r}")
    try:
        tol = Tolerances(cluster_tol=args.cluster_tol, rank_tol=args.rank_tol,
                         subspace_tol=args.subspace_tol)
        if args.command == "verify":
            parse_which(args.which)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_SPEC
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    cmd = {"schmidt": cmd_schmidt, "verify": cmd_verify, "reproduce": cmd_reproduce}[args.command]
    try:
        return cmd(args, tol, out)
    except SpecError as exc:
        _err(f"spec: {exc}")
        return EXIT_SPEC
    except NotSymmetric as exc:
        _err(str(exc))
        return EXIT_SPEC
    except AmbiguousClustering as exc:
        _err(f"ambiguous clustering: {exc}")
        return EXIT_AMBIGUOUS
    except OSError as exc:
        _err(str(exc))
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
