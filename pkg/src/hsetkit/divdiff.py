"""Kernel divided differences on ``T = X + {xi}``.

For ``n`` kernel translates on ``n + 1`` points the dual of the discrete
Chebyshev problem has a unique (up to sign) solution in closed form:
weight ``1 / (1 + L(xi))`` at ``xi`` and ``-u_i(xi) / (1 + L(xi))`` at
``x_i``, where ``u_i`` are the Lagrangians on X and ``L`` is the Lebesgue
function. The optimal Chebyshev error is then ::

    |f(xi) - s(xi)| / (1 + L(xi))

with ``s`` the interpolant of ``f`` on X.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cheb import ChebSolution, solve_minimax
from .errors import DimensionMismatch, ExhaustedCandidates, PointTooClose
from .grids import RegularGrid, edge_crossings
from .hset import SignedPointSet, sign_of
from .interp import (
    DEGENERATE_TOL,
    KernelSystem,
    TargetFunction,
    build_system,
    interpolate,
    lagrangian_matrix,
    lagrangians_at,
    power_function_sq,
)
from .kernels import PointSet, as_pointset
from .lp import LpProblem, solve_lp

DEGEN_TOL = 1e-9
EXTREMAL_TOL = 1e-7


def _f_on(f: TargetFunction, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.asarray(f(pts), dtype=float).reshape(-1)


@dataclass(frozen=True)
class DividedDifference:
    xi: np.ndarray
    weight_at_xi: float
    weights_at_X: np.ndarray
    value: float
    eta_star: float
    degenerate_indices: tuple
    lagrangians: np.ndarray = field(repr=False)

    @property
    def weights(self) -> np.ndarray:
        """Dual weights ordered as ``(x_1, ..., x_n, xi)``."""
        return np.append(self.weights_at_X, self.weight_at_xi)


def divided_difference(sys: KernelSystem, f: TargetFunction, xi, f_X=None) -> DividedDifference:
    xi = sys._check_point(xi)
    if power_function_sq(sys, xi) <= DEGENERATE_TOL:
        raise PointTooClose("xi coincides (numerically) with a center")
    fX = _f_on(f, sys.X.points) if f_X is None else np.asarray(f_X, dtype=float)
    u = lagrangians_at(sys, xi)
    denom = 1.0 + float(np.sum(np.abs(u)))
    value = (float(_f_on(f, xi)[0]) - float(u @ fX)) / denom
    degenerate = tuple(int(i) for i in np.nonzero(np.abs(u) <= DEGEN_TOL)[0])
    return DividedDifference(xi, 1.0 / denom, -u / denom, value, abs(value), degenerate, u)


def eta_star_identity(dd: DividedDifference) -> float:
    return dd.eta_star


def augmented_points(sys: KernelSystem, xi) -> PointSet:
    """``X`` followed by ``xi``."""
    return PointSet(np.vstack([sys.X.points, np.atleast_2d(xi)]))


def minimax_on_augmented(sys: KernelSystem, f: TargetFunction, xi) -> ChebSolution:
    """Best approximation from ``span{K(., x_i)}`` on ``X + {xi}`` by LP."""
    T = augmented_points(sys, xi)
    return solve_minimax(sys.basis_values(T), _f_on(f, T.points))


@dataclass(frozen=True)
class EquioscillationReport:
    eta_star_lp: float
    eta_star_closed: float
    residuals: np.ndarray
    extremal_count: int
    non_extremal_indices: tuple
    degenerate_indices: tuple
    free_indices: Optional[tuple] = None

    @property
    def n_points(self) -> int:
        return self.residuals.shape[0]

    @property
    def degeneration(self) -> int:
        return len(self.degenerate_indices)

    @property
    def equioscillates(self) -> bool:
        return self.extremal_count == self.n_points


def _slack_probe(B: np.ndarray, f: np.ndarray, k: int, eta: float, shrink: float = 0.5) -> float:
    """Minimax error when the residual at point ``k`` is held to ``shrink * eta``."""
    N, n = B.shape
    ones = np.ones((N, 1))
    ones_k = ones.copy()
    ones_k[k] = shrink
    A = np.block([[-B, -ones_k], [B, -ones_k]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    p = LpProblem(c, A, np.concatenate([-f, f]),
                  lower_bounds=np.full(n + 1, -np.inf), upper_bounds=np.full(n + 1, np.inf))
    return float(solve_lp(p).primal[-1])


def equioscillation_check(sys: KernelSystem, f: TargetFunction, xi, probe: bool = False,
                          probe_tol: float = 1e-9) -> EquioscillationReport:
    """Compare the LP best approximation on ``X + {xi}`` with the closed form.

    ``extremal_count`` counts points of the LP (vertex) solution with
    ``|r| >= eta* - 1e-7``. With ``probe=True`` each point is also tested for
    whether some best approximation leaves it strictly non-extremal: the
    minimax problem is re-solved with that residual capped at ``eta/2`` and
    the point is *free* if the optimal value does not increase (relative
    ``probe_tol``).
    """
    dd = divided_difference(sys, f, xi)
    T = augmented_points(sys, xi)
    B = sys.basis_values(T)
    fT = _f_on(f, T.points)
    sol = solve_minimax(B, fT)
    eta = sol.eta_star
    absr = np.abs(sol.residuals)
    extremal = absr >= eta - EXTREMAL_TOL
    free = None
    if probe:
        free = tuple(
            k for k in range(T.points.shape[0])
            if _slack_probe(B, fT, k, eta) <= eta * (1.0 + probe_tol) + 1e-14
        )
    return EquioscillationReport(
        eta_star_lp=eta,
        eta_star_closed=dd.eta_star,
        residuals=sol.residuals,
        extremal_count=int(extremal.sum()),
        non_extremal_indices=tuple(int(i) for i in np.nonzero(~extremal)[0]),
        degenerate_indices=dd.degenerate_indices,
        free_indices=free,
    )


def hset_from_point(sys: KernelSystem, f: TargetFunction, xi, oriented: bool = False) -> SignedPointSet:
    """``xi`` (sign +1) plus the centers with nonzero Lagrangian value at ``xi``.

    Signs follow the dual weights, ``-sign(u_i(xi))`` at ``x_i``. With
    ``oriented=True`` all signs are multiplied by the sign of
    ``f(xi) - s(xi)``, so they agree with the signs of the optimal residuals.
    """
    dd = divided_difference(sys, f, xi)
    keep = np.nonzero(np.abs(dd.lagrangians) > DEGEN_TOL)[0]
    pts = np.vstack([dd.xi[None, :], sys.X.points[keep]])
    labels = np.concatenate([[sys.n], keep])
    signs = np.concatenate([[1], -sign_of(dd.lagrangians[keep])])
    if oriented and dd.value < 0:
        signs = -signs
    return SignedPointSet(PointSet(pts, labels), signs)


@dataclass(frozen=True)
class ContourData:
    """Zero-crossing estimates; ``labels[k]`` names the function the crossing belongs to."""

    labels: np.ndarray
    points: np.ndarray
    identically_zero: bool = False

    def __len__(self) -> int:
        return self.labels.shape[0]

    def rows(self):
        for lab, p in zip(self.labels, self.points):
            yield (int(lab), *map(float, p))


def lagrangian_zero_map(sys: KernelSystem, grid: RegularGrid) -> ContourData:
    """Sign changes of every Lagrangian ``u_j`` along grid edges."""
    U = lagrangian_matrix(sys, grid.points)
    labels, pts = [], []
    for j in range(sys.n):
        p, _ = edge_crossings(grid, U[:, j])
        labels.append(np.full(p.shape[0], j))
        pts.append(p)
    if not labels:
        return ContourData(np.zeros(0, dtype=int), np.zeros((0, grid.dim)))
    return ContourData(np.concatenate(labels), np.vstack(pts))


def _divdiff_values(sys: KernelSystem, f: TargetFunction, points: np.ndarray, f_X=None):
    """Vectorized divided differences; entries too close to X are NaN."""
    fX = _f_on(f, sys.X.points) if f_X is None else f_X
    Kp = sys.basis_values(points)
    U = lagrangian_matrix(sys, points)
    p2 = float(sys.kernel.radial(0.0)) - np.sum(U * Kp, axis=1)
    L = np.sum(np.abs(U), axis=1)
    vals = (_f_on(f, points) - U @ fX) / (1.0 + L)
    vals[p2 <= DEGENERATE_TOL] = np.nan
    return vals


@dataclass(frozen=True)
class GridValues:
    grid: RegularGrid
    values: np.ndarray

    def rows(self):
        for p, v in zip(self.grid.points, self.values):
            yield (*map(float, p), float(v))


def divdiff_map(sys: KernelSystem, f: TargetFunction, grid: RegularGrid) -> GridValues:
    """Signed divided difference at every grid node; NaN marks nodes on X."""
    return GridValues(grid, _divdiff_values(sys, f, grid.points))


def error_zero_map(sys: KernelSystem, f: TargetFunction, grid: RegularGrid) -> ContourData:
    """Zero set of ``f - s`` on the grid: edge crossings (label 0) and centers (label 1)."""
    s = interpolate(sys, _f_on(f, sys.X.points))
    pts = grid.points
    fv = _f_on(f, pts)
    err = fv - s(pts)
    tol = 1e-10 * (1.0 + float(np.max(np.abs(fv), initial=0.0)))
    centers = sys.X.points
    if np.all(np.abs(err) <= tol):
        allp = np.vstack([pts, centers])
        lab = np.concatenate([np.zeros(len(pts), dtype=int), np.ones(len(centers), dtype=int)])
        return ContourData(lab, allp, identically_zero=True)
    cross, _ = edge_crossings(grid, err, tol)
    nodes = pts[np.abs(err) <= tol]
    zp = np.vstack([cross, nodes, centers])
    lab = np.concatenate([np.zeros(len(cross) + len(nodes), dtype=int), np.ones(len(centers), dtype=int)])
    return ContourData(lab, zp)


@dataclass(frozen=True)
class GreedyResult:
    order: tuple
    points: PointSet
    scores: tuple
    system: KernelSystem = field(repr=False)


def greedy_select(sys: KernelSystem, f: TargetFunction, candidates, count: int,
                  rule: str = "divdiff") -> GreedyResult:
    """Add ``count`` candidates to X one at a time.

    ``rule="divdiff"`` picks the candidate with the largest
    ``|f - s| / (1 + L)``; ``rule="error"`` picks the largest ``|f - s|``.
    Scores within a relative 1e-12 of the maximum count as ties and the
    lowest candidate index wins.
    """
    if rule not in ("divdiff", "error"):
        raise ValueError(f"unknown greedy rule {rule!r}")
    C = as_pointset(candidates)
    if len(C) and len(sys.X) and C.dim != sys.X.dim:
        raise DimensionMismatch("candidates and centers differ in dimension")
    fC = _f_on(f, C.points) if len(C) else np.zeros(0)
    available = np.ones(len(C), dtype=bool)
    order, scores = [], []
    cur = sys
    for _ in range(int(count)):
        fX = _f_on(f, cur.X.points) if cur.n else np.zeros(0)
        Kp = cur.basis_values(C.points)
        U = lagrangian_matrix(cur, C.points)
        p2 = float(cur.kernel.radial(0.0)) - np.sum(U * Kp, axis=1)
        err = np.abs(fC - U @ fX)
        sc = err / (1.0 + np.sum(np.abs(U), axis=1)) if rule == "divdiff" else err
        sc = np.where(available & (p2 > DEGENERATE_TOL), sc, -np.inf)
        best = np.max(sc) if sc.size else -np.inf
        if not np.isfinite(best):
            raise ExhaustedCandidates(f"no admissible candidate left after {len(order)} selections")
        j = int(np.nonzero(sc >= best - 1e-12 * (1.0 + abs(best)))[0][0])
        order.append(j)
        scores.append(float(sc[j]))
        available[j] = False
        cur = build_system(cur.kernel, PointSet(np.vstack([cur.X.points, C.points[j][None, :]])))
    return GreedyResult(tuple(order), C.subset(order) if order else PointSet(np.zeros((0, C.dim))),
                        tuple(scores), cur)
