"""Experiment pipeline: Chebyshev approximation of a target on a grid by
kernel translates, threshold-based H-set candidates, support reduction,
zero-set maps and greedy point selection.

Functions here return plain ``dict`` records (JSON-ready) and leave file
output to :mod:`hsetkit.cli`.
"""
from __future__ import annotations

import importlib.util
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import targets
from .cheb import ChebSolution, solve_minimax
from .divdiff import divdiff_map, error_zero_map, greedy_select, lagrangian_zero_map
from .errors import DegeneratePoints, EmptySelection, NotAnHSet
from .grids import RegularGrid
from .hset import (
    HSetCertificate,
    SignedPointSet,
    assemble_A,
    error_sandwich,
    mu_bound,
    reduce_support,
    sign_of,
    test_hset,
)
from .interp import (
    DEGENERATE_TOL,
    KernelSystem,
    build_system,
    fill_distance,
    interpolate,
    lagrangian_matrix,
    zero_set_distance,
)
from .kernels import Kernel, PointSet

log = logging.getLogger(__name__)

RNG_NAME = "numpy.random.PCG64"
DEFAULT_MU_FRACTIONS = (0.99, 0.5, 0.25, 0.1)


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: str = "gaussian"
    scale: float = 1.0
    n_centers: int = 25
    center_seed: int = 0
    box: tuple = (-1.0, 1.0)
    grid_resolution: int = 11
    eval_grid_resolution: int = 41
    target: str = "peaks"
    peaks_rescale: bool = False
    mu: Optional[tuple] = None
    mu_fractions: tuple = DEFAULT_MU_FRACTIONS
    multiplier_threshold: Optional[float] = 1e-5
    centers_file: Optional[str] = None

    def __post_init__(self):
        if self.grid_resolution < 2 or self.eval_grid_resolution < 2:
            raise ValueError("grid resolutions must be at least 2")
        if self.mu is not None and any(m < 0 for m in self.mu):
            raise ValueError("thresholds must be nonnegative")
        if self.multiplier_threshold is not None and self.multiplier_threshold < 0:
            raise ValueError("multiplier threshold must be nonnegative")
        if self.n_centers < 1:
            raise ValueError("need at least one center")

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["rng"] = RNG_NAME
        return rec


def load_target(name: str, peaks_rescale: bool = False) -> Callable:
    """Built-in target by name, or ``path/to/file.py`` defining ``target(points)``."""
    if name == "peaks" and peaks_rescale:
        return targets.peaks_rescaled
    if name in targets.TARGETS:
        return targets.TARGETS[name]
    path = Path(name)
    if path.suffix == ".py" and path.exists():
        spec = importlib.util.spec_from_file_location("hsetkit_user_target", path)
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)
        return mod.target
    raise ValueError(f"unknown target {name!r}")


def random_centers(n: int, seed: int, box=(-1.0, 1.0), dim: int = 2) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(box[0], box[1], size=(n, dim))


def read_points_csv(path) -> tuple:
    """Read ``x,y[,sign]`` rows (header optional); returns ``(points, signs or None)``."""
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                continue  # header
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"{path}: expected columns x,y[,sign]")
    if arr.shape[1] == 3:
        return arr[:, :2], arr[:, 2].astype(int)
    return arr, None


@dataclass
class ApproxRun:
    """State shared by the pipeline stages."""

    config: ExperimentConfig
    system: KernelSystem
    f: Callable
    T: RegularGrid
    E: RegularGrid
    B: np.ndarray
    f_T: np.ndarray
    cheb: ChebSolution
    sup_error: float
    report: dict = field(default_factory=dict)


def cmd_approx(config: ExperimentConfig) -> ApproxRun:
    k = Kernel(config.kernel, config.scale)
    if config.centers_file:
        X, _ = read_points_csv(config.centers_file)
    else:
        X = random_centers(config.n_centers, config.center_seed, config.box)
    try:
        sys = build_system(k, PointSet.distinct(X))
    except DegeneratePoints as exc:
        raise DegeneratePoints(f"{exc}; try a different --seed") from exc
    lo, hi = config.box
    T = RegularGrid.square(config.grid_resolution, lo, hi)
    E = RegularGrid.square(config.eval_grid_resolution, lo, hi)
    f = load_target(config.target, config.peaks_rescale)
    B = sys.basis_values(T.points)
    fT = np.asarray(f(T.points), dtype=float)
    sol = solve_minimax(B, fT)
    err_E = np.asarray(f(E.points), dtype=float) - sys.basis_values(E.points) @ sol.coefficients
    sup = float(np.max(np.abs(err_E)))
    log.info("eta* on T = %.6g, sup error on eval grid = %.6g", sol.eta_star, sup)
    report = {
        "config": config.to_record(),
        "n_centers": sys.n,
        "grid_points": len(T),
        "eval_grid_points": len(E),
        "eta_star_on_T": sol.eta_star,
        "sup_error_on_eval_grid": sup,
        "dual_support_size": int(sol.support.size),
        "lp_iterations": sol.iterations,
    }
    return ApproxRun(config, sys, f, T, E, B, fT, sol, sup, report)


def residual_rows(run: ApproxRun):
    s = run.B @ run.cheb.coefficients
    for p, fv, sv, r, w in zip(run.T.points, run.f_T, s, run.cheb.residuals, run.cheb.dual_weights):
        yield (float(p[0]), float(p[1]), float(fv), float(sv), float(r), float(w))


RESIDUAL_HEADER = ("x", "y", "f", "approx", "residual", "dual_weight")


def evaluate_candidate(run: ApproxRun, idx: Sequence[int], label: str, threshold: float) -> dict:
    """Certify ``T[idx]`` with residual signs; report ``mu`` and the error bracket."""
    idx = np.asarray(idx, dtype=int)
    if idx.size == 0:
        raise EmptySelection(f"{label}: no grid point selected")
    r = run.cheb.residuals[idx]
    signs = sign_of(r)
    A = assemble_A(run.B[idx], signs)
    cert = test_hset(A)
    v = run.B[idx] @ run.cheb.coefficients
    mu = mu_bound(run.f_T[idx], v, signs)
    rec = {
        "label": label,
        "threshold": float(threshold),
        "count": int(idx.size),
        "verdict": "hset" if cert.is_hset else "not_hset",
        "mu": mu,
        "certificate_objective": cert.objective,
        "certificate_support": int(cert.support.size),
        "row_rank": cert.row_rank,
        "indices": idx.tolist(),
    }
    verdict = error_sandwich(mu, run.sup_error, cert)
    rec["sandwich"] = verdict.to_record()
    if verdict.applicable:
        eta_H = solve_minimax(run.B[idx], run.f_T[idx]).eta_star
        rec["sandwich"].update(eta_star_on_H=eta_H, eta_star_on_T=run.cheb.eta_star)
    rec["_cert"] = cert
    return rec


def select_threshold(run: ApproxRun, mu: float) -> np.ndarray:
    r = np.abs(run.cheb.residuals)
    if mu > r.max():
        raise EmptySelection(f"threshold {mu:g} exceeds the largest residual {r.max():g}")
    return np.nonzero(r >= mu)[0]


def cmd_hset_candidates(run: ApproxRun, mus: Optional[Sequence[float]] = None,
                        multiplier_threshold: Optional[float] = None,
                        include_top_n: bool = True) -> list:
    """Candidate sets: top-n residuals, dual multipliers above a threshold, and ``|r| >= mu``."""
    cfg = run.config
    eta = run.cheb.eta_star
    if mus is None:
        mus = cfg.mu if cfg.mu is not None else tuple(q * eta for q in cfg.mu_fractions)
    if multiplier_threshold is None:
        multiplier_threshold = cfg.multiplier_threshold
    out = []
    if include_top_n:
        n = run.system.n
        order = np.argsort(-np.abs(run.cheb.residuals), kind="stable")[:n]
        out.append(evaluate_candidate(run, np.sort(order), "top-n",
                                      float(np.abs(run.cheb.residuals[order]).min())))
    if multiplier_threshold is not None:
        idx = np.nonzero(np.abs(run.cheb.dual_weights) > multiplier_threshold)[0]
        if idx.size:
            out.append(evaluate_candidate(run, idx, "multipliers", multiplier_threshold))
    for mu in mus:
        out.append(evaluate_candidate(run, select_threshold(run, mu), "mu", mu))
    return out


def cmd_reduce(run: ApproxRun, candidate: dict) -> dict:
    """Drop zero-weight points of a certified candidate and recertify."""
    cert: HSetCertificate = candidate["_cert"]
    if not cert.is_hset:
        raise NotAnHSet(f"candidate {candidate['label']} is not certified")
    idx = np.asarray(candidate["indices"], dtype=int)
    H = SignedPointSet(PointSet(run.T.points[idx], idx), sign_of(run.cheb.residuals[idx]))
    reduced = reduce_support(H, cert)
    keep = reduced.points.labels
    recert = test_hset(assemble_A(run.B[keep], reduced.signs))
    v = run.B[keep] @ run.cheb.coefficients
    new_mu = mu_bound(run.f_T[keep], v, reduced.signs)
    max_res = float(np.max(np.abs(run.cheb.residuals[idx])))
    if new_mu > max_res + 1e-12:
        raise AssertionError("reduced mu exceeds the largest residual")
    return {
        "size_before": int(idx.size),
        "size_after": int(keep.size),
        "mu_before": candidate["mu"],
        "mu_after": new_mu,
        "recertified": bool(recert.is_hset),
        "indices": keep.tolist(),
    }


def cmd_maps(run: ApproxRun) -> dict:
    """Lagrangian zero sets, divided-difference surface and error zero set on the eval grid."""
    G = run.E
    sys, f = run.system, run.f
    lz = lagrangian_zero_map(sys, G)
    dd = divdiff_map(sys, f, G)
    ez = error_zero_map(sys, f, G)
    s = interpolate(sys, np.asarray(f(sys.X.points), dtype=float))
    h = fill_distance(sys.X, G)
    hz = zero_set_distance(sys, s, f, G)
    return {
        "lagrangian_zero": lz,
        "divdiff": dd,
        "error_zero": ez,
        "summary": {
            "map_grid_points": len(G),
            "grid_spacing": G.spacing,
            "lagrangian_crossings": len(lz),
            "error_zero_points": len(ez),
            "error_identically_zero": ez.identically_zero,
            "divdiff_missing_nodes": int(np.isnan(dd.values).sum()),
            "divdiff_max_abs": float(np.nanmax(np.abs(dd.values))) if np.any(~np.isnan(dd.values)) else 0.0,
            "fill_distance": h,
            "zero_set_distance": hz,
        },
    }


def cmd_greedy(run: ApproxRun, count: int, rule: str = "divdiff") -> dict:
    """Greedy enlargement of X from the nodes of T, then sup error of the interpolant on the eval grid."""
    sys, f = run.system, run.f
    C = run.T.pointset
    Kp = sys.basis_values(C.points)
    p2 = float(sys.kernel.radial(0.0)) - np.sum(lagrangian_matrix(sys, C.points) * Kp, axis=1)
    ok = np.nonzero(p2 > DEGENERATE_TOL)[0]
    cand = C.subset(ok)
    res = greedy_select(sys, f, cand, count, rule=rule)
    sup_errors = []
    cur = sys
    fE = np.asarray(f(run.E.points), dtype=float)
    for j in res.order:
        cur = build_system(cur.kernel, PointSet(np.vstack([cur.X.points, cand.points[j][None, :]])))
        s = interpolate(cur, np.asarray(f(cur.X.points), dtype=float))
        sup_errors.append(float(np.max(np.abs(fE - s(run.E.points)))))
    return {
        "rule": rule,
        "count": int(count),
        "selected_grid_indices": [int(ok[j]) for j in res.order],
        "selected_points": res.points.points.tolist(),
        "scores": list(res.scores),
        "sup_error_after_each": sup_errors,
    }


def strip_private(rec):
    """Drop in-memory objects (keys starting with ``_``) before serialization."""
    if isinstance(rec, dict):
        return {k: strip_private(v) for k, v in rec.items() if not k.startswith("_")}
    if isinstance(rec, list):
        return [strip_private(v) for v in rec]
    return rec


def cmd_repro(config: ExperimentConfig) -> dict:
    """Full pipeline: approximate, sweep candidates, reduce the lowest-threshold H-set."""
    run = cmd_approx(config)
    cands = cmd_hset_candidates(run)
    report = dict(run.report)
    report["candidate_sets"] = cands
    certified = [c for c in cands if c["label"] == "mu" and c["verdict"] == "hset"]
    if certified:
        target = min(certified, key=lambda c: c["threshold"])
        report["reduced_set"] = cmd_reduce(run, target)
        report["reduced_set"]["from_threshold"] = target["threshold"]
    else:
        report["reduced_set"] = None
    report["_run"] = run
    return report
