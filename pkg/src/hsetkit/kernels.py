"""Radial kernels and kernel matrix assembly."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegeneratePoints, DimensionMismatch

DISTINCT_TOL = 1e-12


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    INVERSE_MULTIQUADRIC = "imq"
    MATERN32 = "matern32"


@dataclass(frozen=True)
class Kernel:
    """Strictly positive definite radial kernel ``K(x, y) = phi(||x - y|| / scale)``.

    Gaussian: ``exp(-r**2 / scale**2)``; inverse multiquadric:
    ``(1 + r**2 / scale**2) ** -0.5``; Matern 3/2:
    ``(1 + sqrt(3) r / scale) exp(-sqrt(3) r / scale)``.
    """

    family: Family = Family.GAUSSIAN
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.scale > 0:
            raise ValueError(f"kernel scale must be positive, got {self.scale}")

    def radial(self, r: np.ndarray) -> np.ndarray:
        t = np.asarray(r, dtype=float) / self.scale
        if self.family is Family.GAUSSIAN:
            return np.exp(-t * t)
        if self.family is Family.INVERSE_MULTIQUADRIC:
            return 1.0 / np.sqrt(1.0 + t * t)
        s = np.sqrt(3.0) * t
        return (1.0 + s) * np.exp(-s)

    @property
    def value_at_zero(self) -> float:
        return 1.0

    def __call__(self, x, y) -> float:
        return eval_kernel(self, x, y)


@dataclass(frozen=True)
class PointSet:
    """Ordered, pairwise distinct points of a common dimension.

    Stored as an ``(N, dim)`` array. ``labels`` optionally carries original
    indices, e.g. positions in the grid a subset was taken from.
    """

    points: np.ndarray
    labels: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim == 1:
            p = p.reshape(-1, 1)
        if p.ndim != 2:
            raise DimensionMismatch(f"points must be an (N, dim) array, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("points must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (p.shape[0],):
                raise DimensionMismatch("labels must have one entry per point")
            object.__setattr__(self, "labels", lab)

    @classmethod
    def distinct(cls, points, labels=None) -> "PointSet":
        """Construct and verify pairwise distinctness."""
        ps = cls(points, labels)
        if len(ps) > 1 and pdist(ps.points).min() <= DISTINCT_TOL:
            raise DegeneratePoints("point set contains (numerically) coincident points")
        return ps

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, idx) -> np.ndarray:
        return self.points[idx]

    def subset(self, idx: Sequence[int]) -> "PointSet":
        idx = np.asarray(idx, dtype=int)
        base = self.labels if self.labels is not None else np.arange(len(self))
        return PointSet(self.points[idx], base[idx])

    def union(self, other: "PointSet") -> "PointSet":
        if other.dim != self.dim and len(other) and len(self):
            raise DimensionMismatch("point sets of different dimension")
        return PointSet(np.vstack([self.points, other.points]))


def as_pointset(p) -> PointSet:
    return p if isinstance(p, PointSet) else PointSet(p)


def _as_point(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def eval_kernel(k: Kernel, x, y) -> float:
    x, y = _as_point(x), _as_point(y)
    if x.shape != y.shape:
        raise DimensionMismatch(f"points of different dimension: {x.shape} vs {y.shape}")
    return float(k.radial(np.linalg.norm(x - y)))


def kernel_matrix(k: Kernel, P, Q) -> np.ndarray:
    """Matrix of ``K(P_i, Q_j)``; symmetric when ``P is Q``."""
    P, Q = as_pointset(P), as_pointset(Q)
    if len(P) and len(Q) and P.dim != Q.dim:
        raise DimensionMismatch(f"dimensions differ: {P.dim} vs {Q.dim}")
    if len(P) == 0 or len(Q) == 0:
        return np.zeros((len(P), len(Q)))
    M = k.radial(cdist(P.points, Q.points))
    if P is Q:
        # cdist is not guaranteed bitwise symmetric
        M = np.triu(M) + np.triu(M, 1).T
    return M


def kernel_vector(k: Kernel, P, x) -> np.ndarray:
    """``(K(P_1, x), ..., K(P_n, x))``."""
    P = as_pointset(P)
    x = _as_point(x)
    if len(P) == 0:
        return np.zeros(0)
    if x.shape[0] != P.dim:
        raise DimensionMismatch(f"point of dimension {x.shape[0]}, set of dimension {P.dim}")
    return k.radial(np.linalg.norm(P.points - x, axis=1))
