"""Kernel interpolation on a center set X.

Everything here is driven by a :class:`KernelSystem`, which holds the
Cholesky factor of the kernel matrix on X and its explicit inverse
``alpha``. Lagrangian values are computed by Cholesky solves with iterative
refinement rather than from ``alpha``. Residuals are accumulated in
``np.longdouble`` (extended precision on x86; plain double elsewhere), which
keeps the forward error near machine precision for Gaussian kernel matrices
with condition numbers up to about 1e12.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegeneratePoints, DimensionMismatch, EmptyInput, PointTooClose
from .grids import RegularGrid, edge_crossings, zero_nodes
from .kernels import Kernel, PointSet, as_pointset, kernel_matrix, kernel_vector
from .linalg import SpdFactorization, spd_factor, spd_solve, symmetric_inverse

DEGENERATE_TOL = 1e-10
POWER_CLAMP_TOL = 1e-12
REFINE_STEPS = 2

TargetFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class KernelSystem:
    kernel: Kernel
    X: PointSet
    fact: SpdFactorization
    alpha: np.ndarray

    @property
    def n(self) -> int:
        return len(self.X)

    @property
    def gram(self) -> np.ndarray:
        return kernel_matrix(self.kernel, self.X, self.X)

    def basis_values(self, points) -> np.ndarray:
        """``(N, n)`` matrix with entry ``(k, i) = K(points_k, x_i)``."""
        return kernel_matrix(self.kernel, as_pointset(points), self.X)

    def _check_point(self, xi) -> np.ndarray:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.n and xi.shape != (self.X.dim,):
            raise DimensionMismatch(f"point has shape {xi.shape}, expected ({self.X.dim},)")
        return xi


def build_system(k: Kernel, X) -> KernelSystem:
    X = as_pointset(X)
    fact = spd_factor(kernel_matrix(k, X, X))
    if not fact.ok:
        raise DegeneratePoints(
            "kernel matrix is numerically singular; the center set has (nearly) coincident points"
        )
    return KernelSystem(k, X, fact, symmetric_inverse(fact))


@dataclass(frozen=True)
class Interpolant:
    """``s(x) = sum_j c_j K(x, x_j)``."""

    system: KernelSystem
    coefficients: np.ndarray

    def __call__(self, points) -> np.ndarray:
        return self.system.basis_values(points) @ self.coefficients


def interpolate(sys: KernelSystem, f_values) -> Interpolant:
    f = np.asarray(f_values, dtype=float)
    if f.shape != (sys.n,):
        raise DimensionMismatch(f"need {sys.n} data values, got shape {f.shape}")
    return Interpolant(sys, spd_solve(sys.fact, f))


def _lagrange_solve_ext(sys: KernelSystem, kvals) -> np.ndarray:
    """Refined solution of ``K u = k`` kept in extended precision."""
    G = sys.gram.astype(np.longdouble)
    k = np.asarray(kvals, dtype=np.longdouble)
    u = spd_solve(sys.fact, kvals).astype(np.longdouble)
    for _ in range(REFINE_STEPS):
        r = (k - G @ u).astype(float)
        u = u + spd_solve(sys.fact, r)
    return u


def lagrange_solve(sys: KernelSystem, kvals) -> np.ndarray:
    """Solve ``K u = k`` for one right-hand side ``(n,)`` or many ``(n, N)``."""
    if sys.n == 0:
        return np.zeros_like(np.asarray(kvals, dtype=float))
    return _lagrange_solve_ext(sys, kvals).astype(float)


def lagrangians_at(sys: KernelSystem, xi) -> np.ndarray:
    """Values ``u_i(xi)`` of the Lagrange basis, ``K u = k(xi)``."""
    xi = sys._check_point(xi)
    return lagrange_solve(sys, kernel_vector(sys.kernel, sys.X, xi))


def lagrangian_matrix(sys: KernelSystem, points) -> np.ndarray:
    """``(N, n)`` matrix of ``u_i(points_k)`` for many evaluation points."""
    return lagrange_solve(sys, sys.basis_values(points).T).T


def _power_ext(sys: KernelSystem, xi):
    """``(P^2, u)`` at ``xi`` with both in extended precision, ``P^2`` unclamped."""
    k0 = np.longdouble(sys.kernel.radial(0.0))
    if sys.n == 0:
        return k0, np.zeros(0, dtype=np.longdouble)
    kv = kernel_vector(sys.kernel, sys.X, xi)
    u = _lagrange_solve_ext(sys, kv)
    return k0 - u @ kv.astype(np.longdouble), u


def power_function_sq(sys: KernelSystem, xi) -> float:
    """``K(xi, xi) - sum_i u_i(xi) K(x_i, xi)``, clamped at zero."""
    p2, _ = _power_ext(sys, sys._check_point(xi))
    # negative values are cancellation noise
    return max(float(p2), 0.0)


def lebesgue_function(sys: KernelSystem, xi) -> float:
    return float(np.sum(np.abs(lagrangians_at(sys, xi))))


@dataclass(frozen=True)
class CardinalFunction:
    """The function in ``span{K(., x_i)} + span{K(., xi)}`` vanishing on X and equal to 1 at xi.

    ``coeff_xi = 1/P^2`` and ``coeff_X = -u(xi)/P^2`` are the expansion
    coefficients. Evaluation uses the equivalent form
    ``(K(., xi) - sum_i u_i(xi) K(., x_i)) / P^2`` with the difference taken in
    extended precision, since the coefficients grow like ``1/P^2``.
    """

    system: KernelSystem
    xi: np.ndarray
    coeff_xi: float
    coeff_X: np.ndarray
    _u: np.ndarray = field(default=None, repr=False, compare=False)
    _p2: np.longdouble = field(default=None, repr=False, compare=False)

    def __call__(self, points) -> np.ndarray:
        pts = as_pointset(points)
        kx = kernel_matrix(self.system.kernel, pts, PointSet(self.xi[None, :]))[:, 0]
        if self._u is None:
            return self.coeff_xi * kx + self.system.basis_values(pts) @ self.coeff_X
        num = kx.astype(np.longdouble) - self.system.basis_values(pts).astype(np.longdouble) @ self._u
        return (num / self._p2).astype(float)


def cardinal_g(sys: KernelSystem, xi, degenerate_tol: float = DEGENERATE_TOL) -> CardinalFunction:
    xi = sys._check_point(xi)
    p2, u = _power_ext(sys, xi)
    if p2 <= degenerate_tol:
        raise PointTooClose(f"P_X^2(xi) = {float(p2):.3e} <= {degenerate_tol:g}; xi is too close to X")
    return CardinalFunction(sys, xi, float(1 / p2), (-u / p2).astype(float), u, p2)


def fill_distance(X, grid) -> float:
    """``max_{y in grid} min_{x in X} ||x - y||``."""
    X, G = as_pointset(X), as_pointset(grid.pointset if isinstance(grid, RegularGrid) else grid)
    if len(X) == 0 or len(G) == 0:
        raise EmptyInput("fill distance needs nonempty X and grid")
    if X.dim != G.dim:
        raise DimensionMismatch("X and grid differ in dimension")
    return float(cdist(G.points, X.points).min(axis=1).max())


def interpolation_error_zeros(sys: KernelSystem, s: Interpolant, f: TargetFunction, grid: RegularGrid):
    """Nodal error ``f - s`` and grid-resolution estimates of its zero set.

    Returns ``(errors, zero_points, identically_zero)``. ``zero_points`` holds
    nodes with (numerically) zero error plus linear-interpolation zeros on
    sign-changing edges; X itself is not included.
    """
    pts = grid.points
    fv = np.asarray(f(pts), dtype=float)
    err = fv - s(pts)
    tol = 1e-10 * (1.0 + float(np.max(np.abs(fv), initial=0.0)))
    if np.all(np.abs(err) <= tol):
        return err, pts.copy(), True
    crossings, _ = edge_crossings(grid, err, tol)
    nodes = pts[zero_nodes(err, tol)]
    return err, np.vstack([crossings, nodes]), False


def zero_set_distance(sys: KernelSystem, s: Interpolant, f: TargetFunction, grid: RegularGrid) -> float:
    """Grid estimate of ``sup_y inf{||x - y|| : f(x) = s(x)}``.

    Zeros of ``f - s`` are estimated on grid edges; X (where the error
    vanishes by construction) is always part of the zero set. If no zero is
    found on the grid the result is the ordinary fill distance.
    """
    if len(grid) == 0:
        raise EmptyInput("empty grid")
    _, zeros, _ = interpolation_error_zeros(sys, s, f, grid)
    if len(zeros) == 0:
        return fill_distance(sys.X, grid)
    Z = np.vstack([sys.X.points, zeros]) if sys.n else zeros
    return fill_distance(Z, grid)
