"""Command-line driver.

Subcommands: ``approx``, ``hset-test``, ``reduce``, ``maps``, ``greedy`` and
``repro`` (the whole pipeline). Reports are written as JSON, grids and
contours as CSV with one header line.

Exit codes: 0 on success, 1 on errors, 2 when ``--expect-hset`` was given
and some tested set is not an H-set.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .errors import HSetKitError
from .experiment import (
    RESIDUAL_HEADER,
    ExperimentConfig,
    cmd_approx,
    cmd_greedy,
    cmd_hset_candidates,
    cmd_maps,
    cmd_reduce,
    cmd_repro,
    read_points_csv,
    residual_rows,
    select_threshold,
    evaluate_candidate,
    strip_private,
)
from .hset import SignedPointSet, kernel_hset_matrix, test_hset

log = logging.getLogger("hsetkit")

EXIT_OK, EXIT_ERROR, EXIT_NOT_HSET = 0, 1, 2


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(strip_private(payload), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        kernel=args.kernel,
        scale=args.scale,
        n_centers=args.centers,
        center_seed=args.seed,
        grid_resolution=args.grid,
        eval_grid_resolution=args.eval_grid,
        target=args.target,
        peaks_rescale=args.peaks_rescale,
        mu=tuple(args.mu) if args.mu else None,
        multiplier_threshold=args.multiplier_threshold,
        centers_file=args.centers_file,
    )


def _candidates_summary(cands):
    return [
        f"  {c['label']:<12} threshold={c['threshold']:.4g} count={c['count']:>4} "
        f"{c['verdict']:<9} mu={c['mu']:.4g}"
        for c in cands
    ]


def run_approx(args, out: Path) -> int:
    run = cmd_approx(_config(args))
    _write_json(out / "approx.json", run.report)
    _write_csv(out / "residuals.csv", RESIDUAL_HEADER, residual_rows(run))
    print(f"eta* on T: {run.cheb.eta_star:.6g}   sup error on eval grid: {run.sup_error:.6g}")
    return EXIT_OK


def run_hset_test(args, out: Path) -> int:
    run = cmd_approx(_config(args))
    if args.points:
        pts, signs = read_points_csv(args.points)
        if signs is None:
            raise HSetKitError(f"{args.points}: a sign column is required")
        H = SignedPointSet(pts, signs)
        cert = test_hset(kernel_hset_matrix(run.system.kernel, run.system.X, H))
        records = [{"label": "file", "source": str(args.points), "count": len(H), **cert.to_record()}]
    else:
        records = cmd_hset_candidates(run)
    _write_json(out / "hset.json", {**run.report, "candidate_sets": records})
    for line in _candidates_summary(records) if not args.points else [
            f"  file count={records[0]['count']} {records[0]['verdict']}"]:
        print(line)
    if args.expect_hset and any(r["verdict"] != "hset" for r in records):
        return EXIT_NOT_HSET
    return EXIT_OK


def run_reduce(args, out: Path) -> int:
    run = cmd_approx(_config(args))
    mu = args.mu[0] if args.mu else 0.1 * run.cheb.eta_star
    cand = evaluate_candidate(run, select_threshold(run, mu), "mu", mu)
    red = cmd_reduce(run, cand)
    _write_json(out / "reduce.json", {**run.report, "candidate": cand, "reduced_set": red})
    print(f"reduced {red['size_before']} -> {red['size_after']} points, "
          f"mu {red['mu_before']:.4g} -> {red['mu_after']:.4g}, recertified={red['recertified']}")
    return EXIT_OK


def run_maps(args, out: Path) -> int:
    run = cmd_approx(_config(args))
    maps = cmd_maps(run)
    _write_csv(out / "lagrangian_zero.csv", ("center", "x", "y"), maps["lagrangian_zero"].rows())
    _write_csv(out / "divdiff_map.csv", ("x", "y", "divdiff"), maps["divdiff"].rows())
    _write_csv(out / "error_zero.csv", ("is_center", "x", "y"), maps["error_zero"].rows())
    _write_json(out / "maps.json", {**run.report, **maps["summary"]})
    s = maps["summary"]
    print(f"fill distance {s['fill_distance']:.4g}, zero-set distance {s['zero_set_distance']:.4g}")
    return EXIT_OK


def run_greedy(args, out: Path) -> int:
    run = cmd_approx(_config(args))
    res = cmd_greedy(run, args.count, rule=args.rule)
    payload = {**run.report, "greedy": res}
    if args.compare:
        other = "error" if args.rule == "divdiff" else "divdiff"
        payload["greedy_" + other] = cmd_greedy(run, args.count, rule=other)
    _write_json(out / "greedy.json", payload)
    for i, (j, sc) in enumerate(zip(res["selected_grid_indices"], res["scores"])):
        print(f"  step {i + 1}: grid node {j} score {sc:.4g} sup error {res['sup_error_after_each'][i]:.4g}")
    return EXIT_OK


def run_repro(args, out: Path) -> int:
    report = cmd_repro(_config(args))
    run = report["_run"]
    _write_json(out / "repro.json", report)
    _write_csv(out / "residuals.csv", RESIDUAL_HEADER, residual_rows(run))
    print(f"eta* on T: {run.cheb.eta_star:.6g}   sup error on eval grid: {run.sup_error:.6g}")
    for line in _candidates_summary(report["candidate_sets"]):
        print(line)
    red = report["reduced_set"]
    if red:
        print(f"  reduction {red['size_before']} -> {red['size_after']} (recertified={red['recertified']})")
    if args.expect_hset and not any(c["verdict"] == "hset" for c in report["candidate_sets"]):
        return EXIT_NOT_HSET
    return EXIT_OK


COMMANDS = {
    "approx": run_approx,
    "hset-test": run_hset_test,
    "reduce": run_reduce,
    "maps": run_maps,
    "greedy": run_greedy,
    "repro": run_repro,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kernel", choices=["gaussian", "imq", "matern32"], default="gaussian")
    common.add_argument("--scale", type=float, default=1.0)
    common.add_argument("--centers", type=int, default=25, help="number of random centers")
    common.add_argument("--centers-file", default=None, help="CSV with x,y columns instead of random centers")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=11, help="points per axis of the approximation grid T")
    common.add_argument("--eval-grid", type=int, default=41, help="points per axis of the evaluation grid")
    common.add_argument("--target", default="peaks", help="peaks, linear, or path/to/file.py defining target(points)")
    common.add_argument("--peaks-rescale", action="store_true", help="evaluate peaks on [-3,3]^2 mapped to the box")
    common.add_argument("--mu", type=float, nargs="+", default=None, help="absolute residual thresholds")
    common.add_argument("--multiplier-threshold", type=float, default=1e-5,
                        help="dual-weight threshold for the multiplier candidate set")
    common.add_argument("--out-dir", type=Path, default=Path("hsetkit-out"))
    common.add_argument("--expect-hset", action="store_true", help="exit with code 2 on a negative verdict")
    common.add_argument("--timing", action="store_true", help="also write timing.json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hsetkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("approx", parents=[common], help="discrete Chebyshev approximation on the grid")
    p = sub.add_parser("hset-test", parents=[common], help="certify threshold candidates or a CSV point set")
    p.add_argument("--points", type=Path, default=None, help="CSV with x,y,sign columns")
    sub.add_parser("reduce", parents=[common], help="support reduction of a certified threshold set")
    sub.add_parser("maps", parents=[common], help="zero-set and divided-difference maps as CSV")
    p = sub.add_parser("greedy", parents=[common], help="greedy point selection from the grid")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--rule", choices=["divdiff", "error"], default="divdiff")
    p.add_argument("--compare", action="store_true", help="also run the other selection rule")
    sub.add_parser("repro", parents=[common], help="full experiment pipeline")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, args.out_dir)
    except (HSetKitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.timing:
        # kept out of the reports so those stay byte-identical across runs
        _write_json(args.out_dir / "timing.json",
                    {"command": args.command, "seconds": time.perf_counter() - t0})
    return code


if __name__ == "__main__":
    sys.exit(main())
