"""Command-line front end: ``torsion-lab <verb> ...``.

Exit codes: 0 success, 1 usage error (bad flags, unknown names, malformed or
mis-shaped files), 2 numerical failure (metric not positive definite, invalid
algebra, failed checks).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import canonical, catalog, optimize
from .errors import (
    DegenerateError,
    DimensionError,
    InvalidAlgebraError,
    NotAbelianIdealError,
    NotClosedError,
    NotPositiveDefiniteError,
)
from .hermitian import HermitianMetric, analyze
from .lie_core import DEFAULT_TOL, check_algebra, is_semisimple
from .serialization import (
    FormatError,
    algebra_to_dict,
    encode_array,
    load_algebra,
    load_metric,
    metric_to_dict,
    write_json,
)

TOL_ENV = "TORSION_LAB_TOL"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return tol


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="torsion-lab",
                     description="Chern torsion of left-invariant metrics on complex Lie algebras.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("catalog", help="inspect the shipped algebras")
    p.add_argument("action", choices=["list"])
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("analyze", help="criticality report for one metric")
    p.add_argument("--algebra", required=True, help="catalog name or algebra JSON file")
    p.add_argument("--metric", help="metric JSON file (default: identity)")
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("canonical", help="build and check the canonical metric")
    p.add_argument("--algebra", required=True, help="semi-simple catalog name")
    p.add_argument("--out-dir", type=Path, help="write algebra and metric JSON files here")
    p.add_argument("--tol", type=float)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("optimize", help="multi-start search for critical metrics")
    p.add_argument("--algebra", required=True)
    p.add_argument("--starts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=optimize.OptimizeConfig.max_iter)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="sl2 diagonal-family sweep and uniqueness scan")
    p.add_argument("--algebra", default="sl2")
    p.add_argument("--min", dest="grid_min", type=float, default=0.5)
    p.add_argument("--max", dest="grid_max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--out", type=Path, required=True, help="CSV output path")
    p.add_argument("--json", action="store_true")
    return parser


def _emit(data, as_json: bool, human) -> None:
    if as_json:
        print(json.dumps(data, indent=2))
    else:
        human(data)


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def _load(source: str):
    alg = load_algebra(source)
    check_algebra(alg)
    return alg


def cmd_catalog(args) -> int:
    rows = [{"name": n, "dim": catalog.get(n).dim, "description": catalog.describe(n),
             "compact_form": catalog.has_compact_form(n)} for n in catalog.names()]

    def human(data):
        print(f"{'name':<12} {'dim':>3}  description")
        for r in data:
            print(f"{r['name']:<12} {r['dim']:>3}  {r['description']}")

    _emit(rows, args.json, human)
    return EXIT_OK


def cmd_analyze(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    alg = _load(args.algebra)
    metric = load_metric(args.metric) if args.metric else HermitianMetric.identity(alg.dim)
    if metric.dim != alg.dim:
        raise DimensionError(f"metric is {metric.dim}x{metric.dim}, algebra has dim {alg.dim}")
    report = analyze(alg, metric, tol)
    out = {
        "algebra": args.algebra,
        **metric_to_dict(metric),
        "is_semisimple": is_semisimple(alg, tol),
        "report": report.to_dict(),
    }

    def human(data):
        print(f"algebra        {args.algebra} (dim {alg.dim})")
        print(f"semisimple     {data['is_semisimple']}")
        print(f"b = |T|^2      {_fmt(report.b)}")
        print(f"|eta|^2        {_fmt(report.eta_norm_sq)}")
        print(f"residual norm  {_fmt(report.residual_norm)}")
        print(f"critical       {report.is_critical}")
        print(f"balanced       {report.is_balanced}")
        print(f"kahler         {report.is_kahler}")
        print("spec(A)        " + " ".join(_fmt(v) for v in np.linalg.eigvalsh(report.A)))
        print("spec(B)        " + " ".join(_fmt(v) for v in np.linalg.eigvalsh(report.B)))

    _emit(out, args.json, human)
    return EXIT_OK


def cmd_canonical(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    if args.algebra not in catalog.names():
        raise KeyError(f"unknown catalog algebra {args.algebra!r}")
    if not catalog.has_compact_form(args.algebra):
        raise UsageError(f"{args.algebra!r} has no shipped compact real form "
                         f"(available: {', '.join(n for n in catalog.names() if catalog.has_compact_form(n))})")
    u, pkg = canonical.canonical_for(args.algebra)
    check = canonical.verify_proposition1(pkg, tol)
    report = analyze(pkg.complex_constants, pkg.metric, tol)
    out = {"algebra": args.algebra, "checks": check.to_dict(),
           "A": encode_array(report.A), "B": encode_array(report.B)}
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        alg_path = args.out_dir / f"{args.algebra}-canonical-algebra.json"
        met_path = args.out_dir / f"{args.algebra}-canonical-metric.json"
        write_json(alg_path, algebra_to_dict(pkg.complex_constants))
        write_json(met_path, metric_to_dict(pkg.metric))
        out["files"] = [str(alg_path), str(met_path)]

    def human(data):
        print(f"canonical metric on {args.algebra} (dim {pkg.dim})")
        for name, val in check.checks.items():
            status = "ok" if val <= tol else "FAIL"
            print(f"  {name:<16} {val:.3e}  {status}")
        print(f"  b = {_fmt(check.b)}")
        for f in data.get("files", []):
            print(f"wrote {f}")

    _emit(out, args.json, human)
    return EXIT_OK if check.passed else EXIT_NUMERIC


def cmd_optimize(args) -> int:
    if args.starts < 1:
        raise UsageError("--starts must be >= 1")
    alg = _load(args.algebra)
    config = optimize.OptimizeConfig(max_iter=args.max_iter, workers=args.workers)
    results = optimize.minimize(alg, args.starts, args.seed, config)
    out = [r.to_dict() for r in results]

    def human(_):
        print(f"{'start':>5} {'conv':>5} {'iters':>6} {'residual':>12}")
        for r in results:
            print(f"{r.start_index:>5} {str(r.converged):>5} {r.iterations:>6} {r.best_residual:>12.3e}")

    _emit(out, args.json, human)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.algebra != "sl2":
        raise UsageError("sweep supports only --algebra sl2")
    if not 0 < args.grid_min < args.grid_max or args.steps < 2:
        raise UsageError("need 0 < --min < --max and --steps >= 2")
    points = optimize.diagonal_sweep(args.grid_min, args.grid_max, args.steps)
    optimize.write_sweep_csv(args.out, points)
    zeros = optimize.diagonal_uniqueness_scan(args.grid_min, args.grid_max, args.steps)
    out = {"csv": str(args.out), "rows": len(points),
           "zeros": [[float(v) for v in z] for z in zeros]}

    def human(data):
        print(f"wrote {data['rows']} rows to {data['csv']}")
        print(f"critical points found (a3 = 1): {len(zeros)}")
        for z in data["zeros"]:
            print("  a = (" + ", ".join(f"{v:.10f}" for v in z) + ")")

    _emit(out, args.json, human)
    return EXIT_OK


_COMMANDS = {
    "catalog": cmd_catalog,
    "analyze": cmd_analyze,
    "canonical": cmd_canonical,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.verb](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"error: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotPositiveDefiniteError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidAlgebraError, DegenerateError, NotClosedError, NotAbelianIdealError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())
