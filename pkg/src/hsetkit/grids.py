"""Tensor-product grids and sign-change (zero crossing) detection on grid edges."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .kernels import PointSet


@dataclass(frozen=True)
class RegularGrid:
    """Tensor grid over a box; node order is C order over ``axes``.

    For 2-D grids node ``(i, j)`` sits at ``(axes[0][i], axes[1][j])``.
    """

    axes: tuple

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float], resolution) -> "RegularGrid":
        lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
        res = np.broadcast_to(np.atleast_1d(resolution), lower.shape)
        if np.any(res < 2):
            raise ValueError("grid resolution must be at least 2 per axis")
        return cls(tuple(np.linspace(a, b, int(r)) for a, b, r in zip(lower, upper, res)))

    @classmethod
    def square(cls, resolution: int, lo: float = -1.0, hi: float = 1.0, dim: int = 2):
        return cls.box([lo] * dim, [hi] * dim, resolution)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def dim(self) -> int:
        return len(self.axes)

    def __len__(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def pointset(self) -> PointSet:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return PointSet(np.stack([m.ravel() for m in mesh], axis=1))

    @property
    def points(self) -> np.ndarray:
        return self.pointset.points

    @property
    def spacing(self) -> float:
        """Largest edge length (the resolution of any grid-based estimate)."""
        return max(float(np.max(np.diff(a))) for a in self.axes)

    @cached_property
    def edges(self) -> np.ndarray:
        """``(E, 2)`` array of node index pairs joined by an axis-parallel edge."""
        idx = np.arange(len(self)).reshape(self.shape)
        pairs = []
        for ax in range(self.dim):
            lo = np.take(idx, np.arange(self.shape[ax] - 1), axis=ax)
            hi = np.take(idx, np.arange(1, self.shape[ax]), axis=ax)
            pairs.append(np.stack([lo.ravel(), hi.ravel()], axis=1))
        return np.concatenate(pairs, axis=0)


def edge_crossings(grid: RegularGrid, values: np.ndarray, zero_tol: float = 0.0):
    """Locate sign changes of nodal ``values`` along grid edges.

    Returns ``(points, edge_ids)``: one linearly interpolated zero estimate per
    edge whose endpoint values have strictly opposite signs. Nodes with
    ``|value| <= zero_tol`` are not crossings; they are reported separately by
    :func:`zero_nodes`.
    """
    v = np.asarray(values, dtype=float)
    e = grid.edges
    a, b = v[e[:, 0]], v[e[:, 1]]
    hit = ((a > zero_tol) & (b < -zero_tol)) | ((a < -zero_tol) & (b > zero_tol))
    ids = np.nonzero(hit)[0]
    pa, pb = grid.points[e[ids, 0]], grid.points[e[ids, 1]]
    t = (a[ids] / (a[ids] - b[ids]))[:, None]
    return pa + t * (pb - pa), ids


def zero_nodes(values: np.ndarray, zero_tol: float) -> np.ndarray:
    return np.nonzero(np.abs(np.asarray(values)) <= zero_tol)[0]
