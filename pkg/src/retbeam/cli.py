"""Command line interface: kernels | feasibility | solve | verify | example41."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig
from .kernels import make_kernel_set
from .oracle import verify
from .presets import make_preset
from .solver import DegenerateOperator, NonConvergence, SolverOptions, feasibility_value, sweep_rho

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGENCE = 2
EXIT_DEGENERATE = 3
EXIT_VERIFICATION = 4

BC_TOLERANCE = 1e-3
LAMBDA_RTOL = 1e-6
DEFAULT_RHOS = tuple(np.geomspace(0.1, 10.0, 10))

log = logging.getLogger("retbeam")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    """Write rows to ``path`` (``-`` or None for stdout)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) if not isinstance(x, str) else x for x in row])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


def parse_rhos(text: str) -> list[float]:
    try:
        rhos = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse radii {text!r}") from None
    if any(not x > 0 for x in rhos):
        raise ConfigError("radii must be positive")
    return sorted(rhos)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RETBEAM_THREADS", "1")))
    except ValueError:
        return 1


def _sweep_exit(results) -> int:
    if any(isinstance(r.error, DegenerateOperator) for r in results):
        return EXIT_DEGENERATE
    if any(isinstance(r.error, NonConvergence) for r in results):
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_kernels(args) -> int:
    ks = make_kernel_set(args.bc)
    t = np.arange(args.grid + 1) / args.grid
    tt, ss = np.meshgrid(t, t, indexing="ij")
    tt, ss = tt.ravel(), ss.ravel()
    krows = zip(tt, ss, ks.k(tt, ss, 0), ks.k(tt, ss, 1), ks.k(tt, ss, 2))
    grows = [
        (i, ti, *(ks.gamma(i, ti, d) for d in range(3))) for i in range(4) for ti in t
    ]
    if args.out:
        write_csv(f"{args.out}_kernel.csv", ["t", "s", "k", "kt", "ktt"], krows)
        write_csv(f"{args.out}_gamma.csv", ["i", "t", "gamma", "dgamma", "ddgamma"], grows)
    else:
        write_csv(None, ["t", "s", "k", "kt", "ktt"], krows)
        sys.stdout.write("\n")
        write_csv(None, ["i", "t", "gamma", "dgamma", "ddgamma"], grows)
    return EXIT_OK


def cmd_feasibility(args) -> int:
    cfg = RunConfig.load(args.config)
    spec = cfg.problem()
    if spec.bounds is None:
        raise ConfigError(f"preset {cfg.preset!r} declares no lower bounds")
    value = feasibility_value(spec, args.rho, cfg.solver)
    print(f"rho = {fmt(args.rho)}")
    print(f"condc = {fmt(value)}")
    if cfg.preset == "example41":
        bound = 1.0 / (6.0 * (1.0 + args.rho**2))
        print(f"bound 1/(6(1+rho^2)) = {fmt(bound)}")
        print(f"condc >= bound: {value >= bound}")
    print("feasible" if value > 0 else "infeasible")
    return EXIT_OK


def _profile_rows(pair):
    g = pair.u
    return zip(g.nodes, g.vals, g.d1, g.d2)


def cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    spec = cfg.problem()
    rhos = parse_rhos(args.rhos) if args.rhos else cfg.rhos
    if not rhos:
        raise ConfigError("no radii given (use --rhos or the config's 'rhos')")
    results = sweep_rho(spec, rhos, cfg.solver)
    rows = []
    for r in results:
        if r.pair is None:
            rows.append((r.rho, float("nan"), getattr(r.error, "residual", float("nan")),
                         getattr(r.error, "iterations", 0), float("nan"), float("nan")))
            continue
        p = r.pair
        rows.append((p.rho, p.lam, p.residual, p.iterations, p.min_u, p.norm_check))
    out = args.out or cfg.output.get("pairs")
    write_csv(out, ["rho", "lambda", "residual", "iterations", "min_u", "norm_check"], rows)
    profiles = args.profiles or cfg.output.get("profiles")
    if profiles:
        Path(profiles).mkdir(parents=True, exist_ok=True)
        for k, r in enumerate(results):
            if r.pair is not None:
                write_csv(Path(profiles) / f"profile_{k:03d}.csv", ["t", "u", "du", "ddu"],
                          _profile_rows(r.pair))
    return _sweep_exit(results)


def _verify_all(spec, pairs, threads):
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: verify(spec, p), pairs))


def read_pairs(path) -> list[tuple[float, float]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return [(float(r["rho"]), float(r["lambda"])) for r in rows]
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read pairs from {path}: {exc}") from None


def cmd_verify(args) -> int:
    cfg = RunConfig.load(args.config)
    spec = cfg.problem()
    listed = read_pairs(args.pairs)
    results = sweep_rho(spec, [rho for rho, _ in listed], cfg.solver)
    solved = [r.pair for r in results if r.pair is not None]
    reports = iter(_verify_all(spec, solved, _threads()))
    rows, failed = [], False
    for (rho, lam), r in zip(listed, results):
        if r.pair is None:
            failed = True
            rows.append((rho, lam, float("nan"), float("nan"), float("nan"),
                         float("nan"), float("nan"), float("nan"), False))
            continue
        rep = next(reports)
        lam_ok = abs(r.pair.lam - lam) <= LAMBDA_RTOL * abs(r.pair.lam) if np.isfinite(lam) else False
        if not (lam_ok and rep.ok and rep.bc_residual <= BC_TOLERANCE):
            failed = True
        rows.append((rho, lam, r.pair.lam, rep.max_deviation, rep.bc_residual, *rep.ic_residuals,
                     rep.rhs_sign_ok))
    header = ["rho", "lambda", "lambda_resolved", "max_deviation", "bc_residual",
              "ic0", "ic1", "ic2", "rhs_sign_ok"]
    write_csv(args.out, header, rows)
    return EXIT_VERIFICATION if failed else EXIT_OK


def cmd_example41(args) -> int:
    spec = make_preset("example41", bc_j=args.bc)
    opts = SolverOptions(n=args.n)
    rhos = parse_rhos(args.rhos) if args.rhos else list(DEFAULT_RHOS)
    results = sweep_rho(spec, rhos, opts)
    solved = [r.pair for r in results if r.pair is not None]
    reports = iter(_verify_all(spec, solved, _threads()))
    status = _sweep_exit(results)
    rows = []
    for r in results:
        value = feasibility_value(spec, r.rho, opts)
        bound = 1.0 / (6.0 * (1.0 + r.rho**2))
        if value < bound:
            status = status or EXIT_VERIFICATION
        if r.pair is None:
            rows.append((r.rho, float("nan"), float("nan"), value, bound, float("nan"), float("nan")))
            continue
        rep = next(reports)
        if not (rep.ok and rep.bc_residual <= BC_TOLERANCE):
            status = status or EXIT_VERIFICATION
        rows.append((r.rho, r.pair.lam, r.pair.residual, value, bound,
                     rep.max_deviation, rep.bc_residual))
    header = ["rho", "lambda", "residual", "condc", "bound", "max_deviation", "bc_residual"]
    if args.out:
        write_csv(args.out, header, rows)
    print(f"example41, u^({spec.bc.j})(1) = lambda B[u], n = {opts.n}")
    print("  ".join(f"{h:>13}" for h in header))
    for row in rows:
        print("  ".join(f"{x:13.6e}" for x in row))
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retbeam", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernels", help="dump Green's kernel and gamma tables as CSV")
    p.add_argument("--bc", type=int, choices=range(4), required=True)
    p.add_argument("--grid", type=int, default=16)
    p.add_argument("--out", help="file prefix; writes PREFIX_kernel.csv and PREFIX_gamma.csv")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("feasibility", help="print the feasibility value at one radius")
    p.add_argument("--config", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("solve", help="solve over a list of radii")
    p.add_argument("--config", required=True)
    p.add_argument("--rhos", help="comma separated radii; overrides the config")
    p.add_argument("--out", help="pairs CSV (default stdout)")
    p.add_argument("--profiles", help="directory for per-radius (t, u, u', u'') CSV files")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-solve and independently check emitted pairs")
    p.add_argument("--config", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", help="report CSV (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("example41", help="end-to-end run of the delay example")
    p.add_argument("--bc", type=int, choices=range(4), default=3)
    p.add_argument("--rhos", help="comma separated radii")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--out", help="also write the summary table as CSV")
    p.set_defaults(func=cmd_example41)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main():
    sys.exit(run())
