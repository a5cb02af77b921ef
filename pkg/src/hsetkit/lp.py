"""Dense bounded-variable primal simplex.

Solves ::

    min/max  c @ x
    s.t.     A[i] @ x  (<= | >= | ==)  b[i]
             lower <= x <= upper        (bounds may be infinite)

Every row gets a slack (inequalities) and an artificial column; phase 1
minimizes the artificials that are actually needed. Redundant equality
rows keep their artificial in the basis, fixed at zero, so rank-deficient
systems need no special treatment.

The returned solution is basic, and ``dual`` holds the exact multipliers of
the final basis, ``c_B B^{-1}``. Pricing is Dantzig's rule with a Harris
ratio test; after ``DEGENERACY_STREAK`` consecutive degenerate pivots the
solver switches to Bland's rule until it makes progress again.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, MaxIterations

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
DEGENERACY_STREAK = 10
REFACTOR_EVERY = 100


class Sense(str, enum.Enum):
    MIN = "min"
    MAX = "max"


class RowSense(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "=="


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    constraint_sense: tuple = None
    sense: Sense = Sense.MIN
    lower_bounds: np.ndarray = None
    upper_bounds: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        A = np.asarray(self.constraint_matrix, dtype=float)
        if A.size == 0:
            A = A.reshape(-1, c.shape[0])
        b = np.asarray(self.rhs, dtype=float).ravel()
        m, n = A.shape
        if c.shape[0] != n or b.shape[0] != m:
            raise DimensionMismatch(f"objective {c.shape}, matrix {A.shape}, rhs {b.shape}")
        rs = self.constraint_sense
        rs = (RowSense.LE,) * m if rs is None else tuple(RowSense(s) for s in rs)
        if len(rs) != m:
            raise DimensionMismatch("constraint_sense needs one entry per row")
        lo = np.zeros(n) if self.lower_bounds is None else np.asarray(self.lower_bounds, float).ravel()
        up = np.full(n, np.inf) if self.upper_bounds is None else np.asarray(self.upper_bounds, float).ravel()
        if lo.shape != (n,) or up.shape != (n,):
            raise DimensionMismatch("bounds need one entry per variable")
        if np.any(lo > up):
            raise ValueError("lower bound exceeds upper bound")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        for name, val in (("objective", c), ("constraint_matrix", A), ("rhs", b),
                          ("constraint_sense", rs), ("sense", Sense(self.sense)),
                          ("lower_bounds", lo), ("upper_bounds", up)):
            object.__setattr__(self, name, val)

    @property
    def shape(self) -> tuple:
        return self.constraint_matrix.shape


@dataclass(frozen=True)
class LpSolution:
    """Basic solution of an :class:`LpProblem`.

    ``dual`` satisfies ``objective = A.T @ dual + reduced_costs`` in the
    problem's own sense. For an infeasible problem ``farkas`` holds the
    phase-1 multipliers ``y``: ``A.T @ y`` is (numerically) zero on free
    columns and ``b @ y > 0``.
    """

    status: Status
    primal: np.ndarray
    dual: np.ndarray
    objective_value: float
    basis: tuple
    reduced_costs: np.ndarray = field(repr=False)
    row_rank: int = 0
    iterations: int = 0
    farkas: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def dual_bound(self, p: LpProblem) -> float:
        """``b @ y`` plus bound terms of the reduced costs; equals the objective at optimality."""
        x = self.primal
        d = self.reduced_costs
        bound_term = 0.0
        for j in range(x.shape[0]):
            if d[j] != 0.0:
                bound_term += d[j] * x[j]
        return float(p.rhs @ self.dual + bound_term)


class _Tableau:
    """Working state: full column matrix, bounds, basis and its inverse."""

    def __init__(self, p: LpProblem):
        A, b = p.constraint_matrix, p.rhs
        m, n = A.shape
        ineq = [i for i, s in enumerate(p.constraint_sense) if s is not RowSense.EQ]
        S = np.zeros((m, len(ineq)))
        for k, i in enumerate(ineq):
            S[i, k] = 1.0 if p.constraint_sense[i] is RowSense.LE else -1.0
        self.m, self.n_struct, self.n_slack = m, n, len(ineq)
        lo = np.concatenate([p.lower_bounds, np.zeros(len(ineq))])
        up = np.concatenate([p.upper_bounds, np.full(len(ineq), np.inf)])

        # starting nonbasic values: a finite bound if there is one, else 0
        x0 = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
        MS = np.hstack([A, S])
        r = b - MS @ x0

        self.art0 = n + len(ineq)
        D = np.where(r >= 0.0, 1.0, -1.0)
        self.M = np.hstack([MS, np.diag(D)])
        self.b = b
        self.lo = np.concatenate([lo, np.zeros(m)])
        self.up = np.concatenate([up, np.zeros(m)])
        self.x = np.concatenate([x0, np.zeros(m)])

        basis = []
        needed = []
        slack_of_row = {i: n + k for k, i in enumerate(ineq)}
        for i in range(m):
            s = slack_of_row.get(i)
            if s is not None and self.M[i, s] * r[i] >= 0.0:
                basis.append(s)
            else:
                basis.append(self.art0 + i)
                self.up[self.art0 + i] = np.inf
                needed.append(self.art0 + i)
        self.basis = np.array(basis, dtype=int)
        self.needed_art = needed
        self.is_basic = np.zeros(self.M.shape[1], dtype=bool)
        self.is_basic[self.basis] = True
        self.refactor()
        self.iterations = 0
        self.pivots_since_refactor = 0

    @property
    def ncols(self) -> int:
        return self.M.shape[1]

    def refactor(self) -> None:
        self.Binv = np.linalg.inv(self.M[:, self.basis])
        self.pivots_since_refactor = 0
        self.update_basic_values()

    def update_basic_values(self) -> None:
        xn = self.x.copy()
        xn[self.basis] = 0.0
        self.x[self.basis] = self.Binv @ (self.b - self.M @ xn)

    def exact_basic_values(self) -> None:
        """Basic values by a fresh solve with one step of refinement."""
        B = self.M[:, self.basis]
        xn = self.x.copy()
        xn[self.basis] = 0.0
        rhs = self.b - self.M @ xn
        xb = np.linalg.solve(B, rhs)
        xb += np.linalg.solve(B, rhs - B @ xb)
        self.x[self.basis] = xb

    def duals(self, cost: np.ndarray) -> np.ndarray:
        B = self.M[:, self.basis]
        cb = cost[self.basis]
        y = np.linalg.solve(B.T, cb)
        y += np.linalg.solve(B.T, cb - B.T @ y)
        return y

    def pivot(self, r: int, j: int, alpha: np.ndarray) -> None:
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.basis[r] = j
        piv = alpha[r]
        self.Binv[r] /= piv
        col = alpha.copy()
        col[r] = 0.0
        self.Binv -= np.outer(col, self.Binv[r])
        self.pivots_since_refactor += 1
        if self.pivots_since_refactor >= REFACTOR_EVERY:
            self.refactor()


def _choose_entering(t: _Tableau, d: np.ndarray, bland: bool):
    lo, up, x = t.lo, t.up, t.x
    movable = ~t.is_basic & (up > lo)
    at_lo = movable & np.isfinite(lo) & (x <= lo)
    at_up = movable & np.isfinite(up) & (x >= up) & ~at_lo
    free = movable & ~at_lo & ~at_up
    score = np.zeros_like(d)
    score[at_lo] = np.maximum(-d[at_lo], 0.0)
    score[at_up] = np.maximum(d[at_up], 0.0)
    score[free] = np.abs(d[free])
    eligible = np.nonzero(score > OPT_TOL)[0]
    if eligible.size == 0:
        return None, 0
    j = int(eligible[0]) if bland else int(eligible[np.argmax(score[eligible])])
    direction = 1 if d[j] < 0 else -1
    return j, direction


def _ratio_test(t: _Tableau, j: int, direction: int, alpha: np.ndarray, bland: bool):
    """Return ``(step, row)``; ``row`` is None for a bound flip, step inf if unbounded."""
    xb = t.x[t.basis]
    lb, ub = t.lo[t.basis], t.up[t.basis]
    g = direction * alpha
    dec = (g > PIVOT_TOL) & np.isfinite(lb)
    inc = (g < -PIVOT_TOL) & np.isfinite(ub)
    rows = np.nonzero(dec | inc)[0]
    own = t.up[j] - t.lo[j]

    if rows.size == 0:
        return own, None

    gap = np.where(dec[rows], xb[rows] - lb[rows], ub[rows] - xb[rows])
    gap = np.maximum(gap, 0.0)
    ag = np.abs(g[rows])
    exact = gap / ag

    if bland:
        tmin = exact.min()
        ties = rows[exact <= tmin + 1e-12 * (1.0 + tmin)]
        r = int(ties[np.argmin(t.basis[ties])])
    else:
        # Harris: widest step allowed with bounds relaxed by FEAS_TOL, then
        # the largest pivot among rows blocking within that step
        relaxed = (gap + FEAS_TOL) / ag
        tmax = relaxed.min()
        cand = exact <= tmax
        k = np.nonzero(cand)[0]
        r = int(rows[k[np.argmax(ag[k])]])
    step = max(float((xb[r] - lb[r]) / g[r] if g[r] > 0 else (ub[r] - xb[r]) / -g[r]), 0.0)
    if own <= step:
        return own, None
    return step, r


def _run(t: _Tableau, cost: np.ndarray, max_iter: int, target: float = -np.inf) -> Status:
    """Iterate until optimal; stop early once the objective reaches ``target``."""
    streak = 0
    bland = False
    while True:
        if cost @ t.x <= target:
            return Status.OPTIMAL
        if t.iterations >= max_iter:
            raise MaxIterations(f"simplex exceeded {max_iter} iterations")
        y = cost[t.basis] @ t.Binv
        d = cost - y @ t.M
        j, direction = _choose_entering(t, d, bland)
        if j is None:
            return Status.OPTIMAL
        t.iterations += 1
        alpha = t.Binv @ t.M[:, j]
        step, r = _ratio_test(t, j, direction, alpha, bland)
        if not np.isfinite(step):
            return Status.UNBOUNDED
        if r is None:
            t.x[j] = t.up[j] if direction > 0 else t.lo[j]
            t.update_basic_values()
            streak, bland = 0, False
            continue
        leaving = t.basis[r]
        g = direction * alpha[r]
        t.x[j] += direction * step
        t.x[leaving] = t.lo[leaving] if g > 0 else t.up[leaving]
        t.pivot(r, j, alpha)
        t.update_basic_values()
        if step <= 1e-12:
            streak += 1
            if streak >= DEGENERACY_STREAK:
                bland = True
        else:
            streak, bland = 0, False


def _drive_out_artificials(t: _Tableau) -> int:
    """Pivot zero-level artificials out of the basis; return the number of redundant rows."""
    redundant = 0
    for r in range(t.m):
        if t.basis[r] < t.art0:
            continue
        rho = t.Binv[r] @ t.M[:, : t.art0]
        rho[t.is_basic[: t.art0]] = 0.0
        rho[t.up[: t.art0] <= t.lo[: t.art0]] = 0.0
        j = int(np.argmax(np.abs(rho)))
        if abs(rho[j]) <= 1e-7:
            redundant += 1
            continue
        alpha = t.Binv @ t.M[:, j]
        t.pivot(r, j, alpha)
        t.update_basic_values()
    return redundant


def solve_lp(p: LpProblem, max_iter: Optional[int] = None) -> LpSolution:
    m, n = p.shape
    if max_iter is None:
        max_iter = 50 * (m + n)
    t = _Tableau(p)
    sign = 1.0 if p.sense is Sense.MIN else -1.0
    ncols = t.ncols

    def finish(status, cost, farkas=None, rank=m):
        t.exact_basic_values()
        y = t.duals(cost)
        d = cost - t.M.T @ y
        x = t.x[:n].copy()
        return LpSolution(
            status=status,
            primal=x,
            dual=sign * y,
            objective_value=float(p.objective @ x),
            basis=tuple(int(k) for k in t.basis),
            reduced_costs=sign * d[:n],
            row_rank=rank,
            iterations=t.iterations,
            farkas=farkas,
        )

    if t.needed_art:
        c1 = np.zeros(ncols)
        c1[t.needed_art] = 1.0
        scale = 1.0 + float(np.max(np.abs(p.rhs), initial=0.0))
        # phase 1 is done as soon as the artificials are at zero; iterating
        # further would only make degenerate pivots
        _run(t, c1, max_iter, target=0.1 * FEAS_TOL * scale)
        t.exact_basic_values()
        infeas = float(c1 @ t.x)
        if infeas > FEAS_TOL * scale:
            y1 = t.duals(c1)
            sol = finish(Status.INFEASIBLE, np.zeros(ncols), farkas=y1)
            return sol
        t.up[t.art0:] = 0.0
        t.x[t.art0:] = np.where(t.is_basic[t.art0:], t.x[t.art0:], 0.0)
    rank = m - _drive_out_artificials(t)

    c2 = np.zeros(ncols)
    c2[:n] = sign * p.objective
    status = _run(t, c2, max_iter)
    return finish(status, c2, rank=rank)


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of :func:`check_feasible`: exactly one of ``x`` or ``certificate`` is set."""

    feasible: bool
    x: Optional[np.ndarray]
    certificate: Optional[np.ndarray]


def check_feasible(A, b) -> FeasibilityResult:
    """Decide ``A x <= b`` for free ``x``.

    Returns a solution ``x`` or a Farkas certificate ``w >= 0`` with
    ``w @ A == 0`` and ``w @ b < 0``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    p = LpProblem(
        objective=np.zeros(n),
        constraint_matrix=A,
        rhs=b,
        lower_bounds=np.full(n, -np.inf),
        upper_bounds=np.full(n, np.inf),
    )
    sol = solve_lp(p)
    if sol.status is Status.INFEASIBLE:
        w = np.maximum(-sol.farkas, 0.0)
        return FeasibilityResult(False, None, w)
    return FeasibilityResult(True, sol.primal, None)
