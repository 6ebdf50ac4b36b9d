"""Command-line driver: file-driven scans with seeded, reproducible output.

Commands
--------
analyze   per-sample Levi/gradient scan with stratum census and residual summary
trace     integrate one foliation leaf and run its diagnostics
weights   homogeneity weight recovery with residual verification
burns     bidegree-(k,k) verdict on a real grid
suite     run the invariant suite over a directory of potential files

Exit codes: 0 clean, 1 failed check or internal invariant, 2 input/usage
error. CSV columns are fixed (see --help of each command); identical seeds
and configs give byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

import numpy as np

from .burns import burns_check
from .foliation import IntegratorConfig, leaf_log_linearity, leaf_stratum_invariance, level_set_invariance, trace_leaf
from .gradient import gradient_field
from .homogeneity import (
    analyze_weights,
    default_lambda_samples,
    linear_field_agreement,
    verify_weights,
)
from .levi import levi_scan, ma_from_fields, ma_matrix, ma_scan, rank_identity_residual
from .potential import PotentialFormatError, parse_complex, parse_potential_file
from .sampling import real_grid, sample_domain

TRACE_LOG_LIN_TOL = 1e-6
TRACE_LEVEL_TOL = 1e-6
WEIGHT_VERIFY_TOL = 1e-9
WEIGHT_FIELD_TOL = 1e-8
RADIAL_TOL = 1e-8
IFF_TOL = 1e-9
NON_MA_FLOOR = 1e-3


@dataclass
class ScanConfig:
    box_radius: float = 1.5
    samples: int = 1000
    rng_seed: int = 1234
    tol_rank: float = 1e-8
    tol_ma: float = 1e-8
    step: float = 1e-3
    out_dir: Path = Path(".")


@dataclass
class CheckOutcome:
    name: str
    status: str          # pass | fail | skip
    measured: float
    threshold: float
    wall: float


def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _coord_header(dim):
    cols = []
    for j in range(dim):
        cols.extend([f"re_z{j + 1}", f"im_z{j + 1}"])
    return cols


def _coord_row(z):
    out = []
    for v in z:
        out.extend([_fmt(v.real), _fmt(v.imag)])
    return out


def _config_from(args):
    return ScanConfig(
        box_radius=args.box,
        samples=args.samples,
        rng_seed=args.seed,
        tol_rank=args.tol_rank,
        tol_ma=args.tol_ma,
        step=args.step,
        out_dir=Path(args.out),
    )


def _print_header(title, cfg):
    print(f"== {title}")
    print(
        f"seed = {cfg.rng_seed}; samples = {cfg.samples}; box = {cfg.box_radius}; "
        f"tol_rank = {cfg.tol_rank:g}; tol_ma = {cfg.tol_ma:g}; step = {cfg.step:g}"
    )


def _internal_invariants(p, scan, raw_ma, euler_res):
    """Invariants that must hold for any potential; failures mean a code bug."""
    outcomes = []

    t0 = time.perf_counter()
    vals = p.evaluate_many(scan.points)
    herm = float(np.max(np.abs(vals.imag) / np.maximum(1.0, np.abs(vals))))
    outcomes.append(
        CheckOutcome("hermitian_eval", "pass" if herm < 1e-12 else "fail", herm, 1e-12, time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    h = scan.hessian
    asym = np.max(np.abs(h - h.conj().transpose(0, 2, 1)))
    scale = max(1.0, float(np.max(np.abs(h))))
    hsym = float(asym / scale)
    outcomes.append(
        CheckOutcome("hessian_symmetry", "pass" if hsym < 1e-12 else "fail", hsym, 1e-12, time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    det_imag = float(
        np.max(np.abs(scan.det_hessian.imag) / np.maximum(1.0, np.abs(scan.det_hessian)))
    )
    outcomes.append(
        CheckOutcome("det_real", "pass" if det_imag < 1e-10 else "fail", det_imag, 1e-10, time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    worst = 0.0
    subset = scan.points[: min(200, len(scan.points))]
    for z in subset:
        rho = p.evaluate(z).real
        lhs = rank_identity_residual(p, z)
        rhs = rho ** (p.dim + 1) * np.linalg.det(ma_matrix(p, z)).real
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    outcomes.append(
        CheckOutcome("det_lemma", "pass" if worst < 1e-9 else "fail", worst, 1e-9, time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    mismatch = int(np.count_nonzero((euler_res < IFF_TOL) != (raw_ma < IFF_TOL)))
    outcomes.append(
        CheckOutcome("euler_ma_iff", "pass" if mismatch == 0 else "fail", float(mismatch), 0.0, time.perf_counter() - t0)
    )
    return outcomes


def _analyze_scan(p, cfg):
    rng = np.random.default_rng(cfg.rng_seed)
    pts = sample_domain(p, cfg.samples, cfg.box_radius, rng)
    scan = levi_scan(p, pts, cfg.tol_rank)
    raw, scaled = ma_from_fields(scan.rho, scan.grad, scan.hessian, p.dim)
    z_field = gradient_field(p, pts)
    euler = np.abs(np.einsum("ni,ni->n", z_field, scan.grad) - scan.rho)
    return pts, scan, raw, scaled, euler


def cmd_analyze(args):
    cfg = _config_from(args)
    p = parse_potential_file(args.potential)
    _print_header(f"analyze {args.potential}", cfg)
    pts, scan, raw, scaled, euler = _analyze_scan(p, cfg)

    census = {}
    for s in scan.strata:
        census[str(s)] = census.get(str(s), 0) + 1

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out_dir / (Path(args.potential).stem + "_analyze.csv")
    header = (
        ["sample"]
        + _coord_header(p.dim)
        + ["rho", "re_detH", "im_detH", "stratum", "ma_residual", "ma_residual_scaled", "euler_residual"]
    )
    rows = []
    for i in range(len(pts)):
        rows.append(
            [str(i)]
            + _coord_row(pts[i])
            + [
                _fmt(scan.rho[i]),
                _fmt(scan.det_hessian[i].real),
                _fmt(scan.det_hessian[i].imag),
                str(scan.strata[i]),
                _fmt(raw[i]),
                _fmt(scaled[i]),
                _fmt(euler[i]),
            ]
        )
    _write_csv(out_path, header, rows)

    total = len(pts)
    print("stratum census:")
    for name, count in sorted(census.items()):
        print(f"  {name:15} {count:6d}  ({100.0 * count / total:.1f}%)")
    print(f"max ma_residual        = {raw.max():.3e} (scaled {scaled.max():.3e}, threshold {cfg.tol_ma:g})")
    print(f"max euler_residual     = {euler.max():.3e} (threshold {cfg.tol_ma:g})")
    print(f"csv: {out_path}")

    failures = 0
    for oc in _internal_invariants(p, scan, raw, euler):
        mark = "ok " if oc.status == "pass" else "FAIL"
        print(f"invariant {oc.name:18} {mark} measured={oc.measured:.3e} threshold={oc.threshold:g}")
        failures += oc.status == "fail"
    return 1 if failures else 0


def cmd_trace(args):
    cfg = _config_from(args)
    p = parse_potential_file(args.potential)
    base = np.array([parse_complex(tok) for tok in args.base.split(",")], dtype=complex)
    if base.size != p.dim:
        raise ValueError(f"base point has {base.size} coordinates, potential has n = {p.dim}")
    _print_header(f"trace {args.potential}", cfg)
    icfg = IntegratorConfig(step=cfg.step, tol_rank=cfg.tol_rank)
    t_grid = np.linspace(0.0, args.t_max, args.t_nodes)
    s_grid = np.linspace(0.0, args.s_max, args.s_nodes)
    trace = trace_leaf(p, base, t_grid, s_grid, icfg)

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out_dir / (Path(args.potential).stem + "_trace.csv")
    header = ["t", "s"] + _coord_header(p.dim) + ["rho", "abs_detH", "stratum"]
    rows = []
    for it, t in enumerate(trace.t_values):
        for isx, s in enumerate(trace.s_values):
            rows.append(
                [_fmt(t), _fmt(s)]
                + _coord_row(trace.points[it, isx])
                + [
                    _fmt(trace.rho[it, isx]),
                    _fmt(abs(trace.det_hessian[it, isx])),
                    str(trace.strata[it, isx]),
                ]
            )
    _write_csv(out_path, header, rows)
    print(f"csv: {out_path}")
    if trace.truncated:
        print("note: trace truncated at the domain/box boundary")

    log_lin = leaf_log_linearity(trace)
    level = level_set_invariance(trace)
    strat = leaf_stratum_invariance(trace)
    checks = [
        ("log_linearity", log_lin, TRACE_LOG_LIN_TOL, log_lin < TRACE_LOG_LIN_TOL),
        ("level_set_invariance", level, TRACE_LEVEL_TOL, level < TRACE_LEVEL_TOL),
        ("stratum_invariance", float(len(strat.violations)), 0.0, strat.passed),
    ]
    failed = 0
    for name, measured, threshold, ok in checks:
        mark = "ok " if ok else "FAIL"
        print(f"{name:22} {mark} measured={measured:.3e} threshold={threshold:g}")
        failed += not ok
    print(f"final rho at (t_max, s=0): {float(trace.rho[-1, 0])!r}")
    return 1 if failed else 0


def cmd_weights(args):
    cfg = _config_from(args)
    p = parse_potential_file(args.potential)
    _print_header(f"weights {args.potential}", cfg)
    analysis = analyze_weights(p)
    if analysis.status == "infeasible":
        eqs = ", ".join(eq.label for eq in analysis.inconsistent_subset)
        print(f"infeasible: equations {{{eqs}}}")
        return 0
    weights = ", ".join(f"{w:.12g}" for w in analysis.weights)
    tag = "unique" if analysis.unique else "non-unique (minimum-norm)"
    if analysis.status == "not_positive":
        print(f"weights exist but not positive: c = ({weights}), {tag}")
        return 0
    print(f"c = ({weights}), {tag}, system residual {analysis.residual:.3e}")
    rng = np.random.default_rng(cfg.rng_seed)
    pts = sample_domain(p, min(cfg.samples, 100), cfg.box_radius, rng)
    ver = verify_weights(p, analysis.weights, pts, default_lambda_samples())
    lin = linear_field_agreement(p, analysis.weights, pts)
    ok_ver = ver < WEIGHT_VERIFY_TOL
    ok_lin = lin < WEIGHT_FIELD_TOL
    print(f"homogeneity residual   = {ver:.3e} (threshold {WEIGHT_VERIFY_TOL:g}) {'ok' if ok_ver else 'FAIL'}")
    print(f"linear field residual  = {lin:.3e} (threshold {WEIGHT_FIELD_TOL:g}) {'ok' if ok_lin else 'FAIL'}")
    return 0 if (ok_ver and ok_lin) else 1


def cmd_burns(args):
    cfg = _config_from(args)
    p = parse_potential_file(args.potential)
    _print_header(f"burns {args.potential}", cfg)
    grid = real_grid(p.dim, args.grid_n, cfg.box_radius)
    report = burns_check(p, grid, tol=cfg.tol_ma, tol_rank=cfg.tol_rank)
    print(report.format())
    if args.csv:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        out_path = cfg.out_dir / (Path(args.potential).stem + "_burns.csv")
        rho = p.evaluate_many(grid).real
        inside = rho > 1e-12
        raw, scaled = ma_scan(p, grid[inside])
        header = _coord_header(p.dim) + ["rho", "ma_residual", "ma_residual_scaled"]
        rows = []
        kept = grid[inside]
        rho_kept = rho[inside]
        for i in range(len(kept)):
            rows.append(
                _coord_row(kept[i]) + [_fmt(rho_kept[i]), _fmt(raw[i]), _fmt(scaled[i])]
            )
        _write_csv(out_path, header, rows)
        print(f"csv: {out_path}")
    if report.verdict and not (report.radial_field_residual < RADIAL_TOL):
        print(
            f"internal invariant FAIL: verdict passes but radial residual "
            f"{report.radial_field_residual:.3e} >= {RADIAL_TOL:g}"
        )
        return 1
    return 0


SUITE_GRID_BUDGET = 20_000  # total burns grid points per potential in the suite


def _suite_grid_axis(dim):
    return max(4, int(SUITE_GRID_BUDGET ** (1.0 / (2 * dim))))


def _suite_checks(p, expect, cfg):
    outcomes = []
    pts, scan, raw, scaled, euler = _analyze_scan(p, cfg)
    outcomes.extend(_internal_invariants(p, scan, raw, euler))

    exp_ma = expect.get("ma")
    if exp_ma is not None:
        t0 = time.perf_counter()
        if exp_ma:
            ok = scaled.max() < cfg.tol_ma
            outcomes.append(
                CheckOutcome("ma_holds", "pass" if ok else "fail", float(scaled.max()), cfg.tol_ma, time.perf_counter() - t0)
            )
        else:
            ok = scaled.max() > NON_MA_FLOOR
            outcomes.append(
                CheckOutcome("ma_fails", "pass" if ok else "fail", float(scaled.max()), NON_MA_FLOOR, time.perf_counter() - t0)
            )

    if "weights" in expect:
        t0 = time.perf_counter()
        exp_w = expect["weights"]
        analysis = analyze_weights(p)
        if exp_w is None:
            ok = analysis.status == "infeasible"
            outcomes.append(
                CheckOutcome("weights_infeasible", "pass" if ok else "fail", analysis.residual, 0.0, time.perf_counter() - t0)
            )
        else:
            ok = analysis.status == "ok" and np.allclose(
                analysis.weights, np.asarray(exp_w, dtype=float), atol=1e-9
            )
            measured = float(
                np.max(np.abs(analysis.weights - np.asarray(exp_w)))
                if analysis.status == "ok"
                else math.inf
            )
            outcomes.append(
                CheckOutcome("weights_match", "pass" if ok else "fail", measured, 1e-9, time.perf_counter() - t0)
            )
            if analysis.status == "ok":
                t0 = time.perf_counter()
                ver = verify_weights(p, analysis.weights, pts[:100], default_lambda_samples())
                lin = linear_field_agreement(p, analysis.weights, pts[:100])
                outcomes.append(
                    CheckOutcome("weights_verify", "pass" if ver < WEIGHT_VERIFY_TOL else "fail", ver, WEIGHT_VERIFY_TOL, time.perf_counter() - t0)
                )
                outcomes.append(
                    CheckOutcome("weights_field", "pass" if lin < WEIGHT_FIELD_TOL else "fail", lin, WEIGHT_FIELD_TOL, time.perf_counter() - t0)
                )

    exp_burns = expect.get("burns")
    if exp_burns is not None:
        t0 = time.perf_counter()
        grid = real_grid(p.dim, _suite_grid_axis(p.dim), cfg.box_radius)
        report = burns_check(p, grid, tol=cfg.tol_ma, tol_rank=cfg.tol_rank)
        got = "pass" if report.verdict else "fail"
        ok = got == exp_burns
        measured = report.ma_max_scaled if math.isfinite(report.ma_max_scaled) else math.inf
        outcomes.append(
            CheckOutcome("burns_verdict", "pass" if ok else "fail", measured, cfg.tol_ma, time.perf_counter() - t0)
        )
    return outcomes


def cmd_suite(args):
    cfg = _config_from(args)
    directory = Path(args.directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory} is not a directory")
    pot_files = sorted(directory.glob("*.pot"))
    if not pot_files:
        print(f"error: no .pot files in {directory}", file=sys.stderr)
        return 2
    expect_path = directory / "expect.json"
    expectations = {}
    if expect_path.exists():
        expectations = json.loads(expect_path.read_text(encoding="utf-8"))

    _print_header(f"suite {directory}", cfg)
    all_rows = []
    failed = 0
    for pot_path in pot_files:
        try:
            p = parse_potential_file(pot_path)
            outcomes = _suite_checks(p, expectations.get(pot_path.name, {}), cfg)
        except PotentialFormatError as exc:
            outcomes = [CheckOutcome("parse", "fail", math.inf, 0.0, 0.0)]
            print(f"{pot_path.name}: parse error: {exc}")
        for oc in outcomes:
            mark = "ok " if oc.status == "pass" else ("--  " if oc.status == "skip" else "FAIL")
            print(
                f"{pot_path.name:20} {oc.name:20} {mark} measured={oc.measured:.3e} "
                f"threshold={oc.threshold:g} [{oc.wall:.2f}s]"
            )
            failed += oc.status == "fail"
            all_rows.append(
                [pot_path.name, oc.name, oc.status, _fmt(oc.measured), _fmt(oc.threshold)]
            )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out_dir / "suite_summary.csv"
    _write_csv(out_path, ["potential", "check", "status", "measured", "threshold"], all_rows)
    print(f"csv: {out_path}")
    print(f"{'FAILED' if failed else 'OK'}: {failed} failing checks")
    return 1 if failed else 0


def bundled_corpus_dir():
    """Directory with the shipped example potentials and their expectations."""
    return Path(str(files("mafoliation").joinpath("data")))


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=1234, help="RNG seed (printed in the report header)")
    sub.add_argument("--samples", type=int, default=1000, help="number of random samples")
    sub.add_argument("--box", type=float, default=1.5, help="half-width of the real sampling cube")
    sub.add_argument("--tol-rank", dest="tol_rank", type=float, default=1e-8, help="rank tolerance for strata")
    sub.add_argument("--tol-ma", dest="tol_ma", type=float, default=1e-8, help="Monge-Ampere residual threshold")
    sub.add_argument("--step", type=float, default=1e-3, help="RK4 step size")
    sub.add_argument("--out", default=".", help="output directory for CSV artifacts")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mafoliation",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser(
        "analyze",
        help="per-sample Levi/gradient scan",
        description="CSV columns: sample, re_z*/im_z*, rho, re_detH, im_detH, "
        "stratum, ma_residual, ma_residual_scaled, euler_residual.",
    )
    pa.add_argument("potential")
    _add_common(pa)
    pa.set_defaults(func=cmd_analyze)

    pt = sub.add_parser(
        "trace",
        help="integrate one foliation leaf",
        description="CSV columns: t, s, re_z*/im_z*, rho, abs_detH, stratum.",
    )
    pt.add_argument("potential")
    pt.add_argument("--base", required=True, help="comma-separated complex coordinates, e.g. '1+0i,0.5-0.5i'")
    pt.add_argument("--t-max", dest="t_max", type=float, default=2.0)
    pt.add_argument("--t-nodes", dest="t_nodes", type=int, default=9)
    pt.add_argument("--s-max", dest="s_max", type=float, default=2 * math.pi)
    pt.add_argument("--s-nodes", dest="s_nodes", type=int, default=13)
    _add_common(pt)
    pt.set_defaults(func=cmd_trace)

    pw = sub.add_parser("weights", help="homogeneity weight recovery")
    pw.add_argument("potential")
    _add_common(pw)
    pw.set_defaults(func=cmd_weights)

    pb = sub.add_parser(
        "burns",
        help="bidegree-(k,k) verdict on a real grid",
        description="Optional CSV columns: re_z*/im_z*, rho, ma_residual, ma_residual_scaled.",
    )
    pb.add_argument("potential")
    pb.add_argument("--grid-n", dest="grid_n", type=int, default=20, help="grid points per real axis")
    pb.add_argument("--csv", action="store_true", help="also write per-grid-point residuals")
    _add_common(pb)
    pb.set_defaults(func=cmd_burns)

    ps = sub.add_parser("suite", help="invariant suite over a directory of .pot files")
    ps.add_argument("directory")
    _add_common(ps)
    ps.set_defaults(func=cmd_suite)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PotentialFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError, NotADirectoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
