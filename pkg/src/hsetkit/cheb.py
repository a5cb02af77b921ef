"""Discrete Chebyshev approximation by linear programming.

The primal problem is ::

    min eta   s.t.   -B x - eta <= -f,    B x - eta <= f

and the dual weights ``w = lambda_1 - lambda_2`` are read off the row
multipliers of the same simplex run, so ``(x*, eta*, w*)`` is always a
complementary pair. The support of ``w*`` consists of extremal points
and, with the signs of ``w*``, is an H-set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySupport
from .hset import SUPPORT_TOL, SignedPointSet, sign_of
from .kernels import as_pointset
from .lp import LpProblem, Status, solve_lp


@dataclass(frozen=True)
class ChebSolution:
    coefficients: np.ndarray
    eta_star: float
    residuals: np.ndarray
    sigma_star: np.ndarray
    dual_weights: np.ndarray
    iterations: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(np.abs(self.dual_weights) > SUPPORT_TOL)[0]


def solve_minimax(B, f_H) -> ChebSolution:
    B = np.asarray(B, dtype=float)
    f = np.asarray(f_H, dtype=float).ravel()
    if B.ndim == 1:
        B = B[:, None]
    N, n = B.shape
    if N < 1:
        raise DimensionMismatch("need at least one point")
    if f.shape[0] != N:
        raise DimensionMismatch(f"B has {N} rows, data has {f.shape[0]} values")
    ones = np.ones((N, 1))
    A = np.block([[-B, -ones], [B, -ones]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    p = LpProblem(c, A, np.concatenate([-f, f]),
                  lower_bounds=np.full(n + 1, -np.inf), upper_bounds=np.full(n + 1, np.inf))
    sol = solve_lp(p)
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"minimax LP ended with status {sol.status.value}")
    x = sol.primal[:n]
    lam = -sol.dual
    w = lam[:N] - lam[N:]
    r = f - B @ x
    return ChebSolution(x, float(sol.primal[-1]), r, sign_of(r), w, sol.iterations)


def extract_extremal_hset(sol: ChebSolution, H, support_tol: float = SUPPORT_TOL) -> SignedPointSet:
    """Support of the dual weights with the signs of the weights."""
    H = as_pointset(H)
    if len(H) != sol.dual_weights.shape[0]:
        raise DimensionMismatch("point set and solution differ in size")
    if sol.eta_star <= support_tol:
        raise EmptySupport("minimax error is zero; the data are reproduced exactly")
    keep = np.nonzero(np.abs(sol.dual_weights) > support_tol)[0]
    if keep.size == 0:
        raise EmptySupport("dual weights vanish")
    return SignedPointSet(H.subset(keep), sign_of(sol.dual_weights[keep]))


def minimax_on_subset_bound(eta_subset: float, eta_full: float, tol: float = 1e-9) -> bool:
    """Best error on a subset never exceeds the best error on the full set."""
    return eta_subset <= eta_full + tol
