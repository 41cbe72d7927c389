"""Command line front end: ``kpmcurve {curve-report,periods,checks,render}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 at least one check failed.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .checks import (
    check_abel_vs_periods,
    check_kp_residual,
    check_omega_hat_symmetry,
    check_riemann_symmetry,
    check_soliton_concordance,
    grid_points,
)
from .config import ConfigError, RunConfig, load_config
from .curve import (
    ContinuationError,
    NodalCurveError,
    SpectralParams,
    branch_points,
    nodes,
)
from .cycles import TopologyError, build_cycles, oval_points, trace_real_ovals
from .numerics.quadrature import QuadratureError
from .periods import DegenerateBasisError, riemann_data
from .soliton import SolitonData, u_soliton
from .theta import DivisorCrossingError, FingapSolution, ThetaTruncationError, u_fingap

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4
NUMERICAL_ERRORS = (TopologyError, ContinuationError, QuadratureError, DegenerateBasisError,
                    DivisorCrossingError, ThetaTruncationError, NodalCurveError, ArithmeticError)


def _params(cfg: RunConfig) -> SpectralParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SpectralParams(cfg.kappa, cfg.epsilon, cfg.precision)


def _c(z) -> str:
    z = complex(z)
    return f"{z.real!r} {z.imag!r}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_curve_report(cfg: RunConfig, out: Path) -> int:
    params = _params(cfg)
    summary = [f"kappa = {', '.join(map(repr, params.kappa))}",
               f"epsilon = {params.epsilon!r}", f"beta = {params.beta!r}"]
    node_lines = ["# index lam mu lines"]
    for n, nd in enumerate(nodes(params)):
        node_lines.append(f"{n} {nd.lam!r} {nd.mu!r} {'x'.join(nd.lines)}")
    (out / "nodes.txt").write_text("\n".join(node_lines) + "\n")
    if params.epsilon == 0:
        summary += ["curve = nodal", f"nodes = {len(nodes(params))}"]
        (out / "curve_summary.txt").write_text("\n".join(summary) + "\n")
        print(f"nodal curve: {len(nodes(params))} nodes written to {out}")
        return EXIT_OK
    bps = branch_points(params)
    bp_lines = ["# index lam_re lam_im mu_re mu_im real node"]
    for n, b in enumerate(bps):
        bp_lines.append(f"{n} {_c(b.lam)} {_c(b.mu)} {int(b.is_real)} {b.node}")
    (out / "branch_points.txt").write_text("\n".join(bp_lines) + "\n")
    ovals = trace_real_ovals(params)
    ov_lines = []
    for ov in ovals:
        runs = " ".join(f"{i}:{r}" for i, r in ov.runs)
        ov_lines.append(f"oval {ov.label} bounded={int(ov.bounded)} runs={runs}")
        for lam, mu in oval_points(params, ov):
            ov_lines.append(f"  {lam!r} {mu!r}")
    (out / "ovals.txt").write_text("\n".join(ov_lines) + "\n")
    basis = build_cycles(params.with_precision("standard"))
    inter = "\n".join(" ".join(f"{int(v):d}" for v in row) for row in basis.intersection)
    (out / "cycles.txt").write_text(basis.dump() + "intersection (a1..a4, b1..b4)\n" + inter + "\n")
    n_real = sum(b.is_real for b in bps)
    summary += ["curve = smooth", f"branch_points = {len(bps)}", f"real_branch_points = {n_real}",
                f"real_ovals = {len(ovals)}"]
    (out / "curve_summary.txt").write_text("\n".join(summary) + "\n")
    print(f"{len(ovals)} real ovals, {n_real} real branch points ({len(bps)} total); "
          f"report in {out}")
    return EXIT_OK


def cmd_periods(cfg: RunConfig, out: Path) -> int:
    rd = riemann_data(_params(cfg))
    (out / "riemann_data.txt").write_text(rd.to_text())
    print(f"B symmetry defect {rd.diagnostics['B_symmetry_defect']:.3e}; "
          f"written to {out / 'riemann_data.txt'}")
    return EXIT_OK


def run_checks(cfg: RunConfig):
    params = _params(cfg)
    rd = riemann_data(params)
    sol = FingapSolution.from_riemann(riemann_data(params.with_precision("standard")), cfg.C)
    data = SolitonData.from_weights(*cfg.weights, kappa=cfg.kappa)
    t = cfg.tolerance
    reports = [
        check_riemann_symmetry(rd, t("riemann_symmetry")),
        check_abel_vs_periods(rd, params, tol=t("abel_vs_periods")),
        check_omega_hat_symmetry(rd, t("omega_hat_symmetry")),
        check_kp_residual(sol, cfg.check_grid(), t("kp_residual")),
        check_soliton_concordance(params.with_precision("standard"), data, cfg.concordance_eps,
                                  cfg.render_grid()[:6] + (cfg.t_values[:1],), cfg.C),
    ]
    if "soliton_concordance" in cfg.tolerances:
        r = reports[-1]
        reports[-1] = type(r).make(r.name, r.defect, t("soliton_concordance"), **r.context)
    return reports


def _finite(v):
    return v if math.isfinite(v) else None


def cmd_checks(cfg: RunConfig, out: Path) -> int:
    reports = run_checks(cfg)
    doc = {"precision": cfg.precision,
           "checks": [{k: (_finite(v) if isinstance(v, float) else v)
                       for k, v in r.as_dict().items()} for r in reports]}
    (out / "checks.json").write_text(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: defect {r.defect:.3e} "
              f"(tolerance {r.tolerance:.1e})")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def write_csv(path: Path, X, Y, U):
    lines = ["x,y,u"]
    for x, y, u in zip(X.ravel(), Y.ravel(), U.ravel()):
        lines.append(f"{float(x)!r},{float(y)!r},{float(u)!r}")
    path.write_text("\n".join(lines) + "\n")


def write_pgm(path: Path, U):
    """Plain PGM, smallest value white, largest black, top row = largest y."""
    lo, hi = float(np.min(U)), float(np.max(U))
    span = hi - lo if hi > lo else 1.0
    px = np.rint(255 * (hi - U) / span).astype(int)[::-1]
    rows = [" ".join(str(v) for v in row) for row in px]
    path.write_text(f"P2\n{U.shape[1]} {U.shape[0]}\n255\n" + "\n".join(rows) + "\n")


def cmd_render(cfg: RunConfig, out: Path, which: str = "both", heatmap: bool = False) -> int:
    families = ("fingap", "soliton") if which == "both" else (which,)
    params = _params(cfg)
    X, Y, T = grid_points(cfg.render_grid())
    for fam in families:
        if fam == "fingap":
            sol = FingapSolution.from_riemann(riemann_data(params), cfg.C)
            try:
                U = u_fingap(X, Y, T, sol)
            except DivisorCrossingError as exc:
                raise DivisorCrossingError(f"render aborted: {exc}") from exc
        else:
            U = u_soliton(X, Y, T, SolitonData.from_weights(*cfg.weights, kappa=cfg.kappa))
        for k in range(X.shape[0]):
            stem = fam if X.shape[0] == 1 else f"{fam}_t{k}"
            write_csv(out / f"{stem}.csv", X[k], Y[k], U[k])
            if heatmap:
                write_pgm(out / f"{stem}.pgm", U[k])
        print(f"{fam}: u in [{np.min(U):.6g}, {np.max(U):.6g}] on {X.size} points")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpmcurve", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("curve-report", "periods", "checks", "render"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--precision", choices=("standard", "extended"))
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if name == "render":
            p.add_argument("--which", choices=("fingap", "soliton", "both"), default="both")
            p.add_argument("--heatmap", action="store_true", help="also write PGM heatmaps")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.precision:
            cfg = cfg.with_precision(args.precision)
        SolitonData.from_weights(*cfg.weights, kappa=cfg.kappa)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "curve-report":
            return cmd_curve_report(cfg, args.out)
        if args.command == "periods":
            return cmd_periods(cfg, args.out)
        if args.command == "checks":
            return cmd_checks(cfg, args.out)
        return cmd_render(cfg, args.out, args.which, args.heatmap)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
