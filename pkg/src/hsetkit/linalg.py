"""Dense symmetric positive definite factorization, solves and inverse.

Matrices are plain 2-D ``numpy`` arrays. The Cholesky kernel is LAPACK's
(via scipy); this module adds the symmetry check and the explicit pivot
threshold used to flag degenerate point sets upstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-12


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D float array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class SpdFactorization:
    """Lower Cholesky factor ``L`` with ``L @ L.T == m``.

    ``ok`` is False when some pivot ``L[i, i]**2`` falls below ``PIVOT_TOL``;
    the factor is then unusable and solves refuse to run.
    """

    dimension: int
    factor: np.ndarray
    ok: bool

    def require_ok(self) -> None:
        if not self.ok:
            raise NotPositiveDefinite("factorization failed (pivot below tolerance)")


def spd_factor(m, pivot_tol: float = PIVOT_TOL) -> SpdFactorization:
    a = as_matrix(m)
    n, k = a.shape
    if n != k:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    if n and np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    if n == 0:
        return SpdFactorization(0, np.zeros((0, 0)), True)
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return SpdFactorization(n, np.full((n, n), np.nan), False)
    ok = bool(np.all(np.diag(L) ** 2 > pivot_tol))
    return SpdFactorization(n, L, ok)


def spd_solve(fact: SpdFactorization, rhs) -> np.ndarray:
    fact.require_ok()
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != fact.dimension:
        raise DimensionMismatch(
            f"rhs has length {b.shape[0]}, factorization has dimension {fact.dimension}"
        )
    if fact.dimension == 0:
        return b.copy()
    return sla.cho_solve((fact.factor, True), b)


def symmetric_inverse(fact: SpdFactorization) -> np.ndarray:
    fact.require_ok()
    n = fact.dimension
    inv = spd_solve(fact, np.eye(n))
    # exact symmetry is part of the contract
    return 0.5 * (inv + inv.T)
