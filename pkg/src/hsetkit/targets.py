"""Target functions, vectorized over ``(N, dim)`` point arrays."""
from __future__ import annotations

import numpy as np


def peaks(points, rescale: bool = False) -> np.ndarray:
    """The classical three-bump ``peaks`` surface.

    Evaluated literally at the given coordinates; ``rescale=True`` first maps
    ``[-1, 1]^2`` affinely onto ``[-3, 3]^2``, the surface's usual window.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    x, y = p[:, 0], p[:, 1]
    if rescale:
        x, y = 3.0 * x, 3.0 * y
    return (
        3.0 * (1.0 - x) ** 2 * np.exp(-x**2 - (y + 1.0) ** 2)
        - 10.0 * (x / 5.0 - x**3 - y**5) * np.exp(-x**2 - y**2)
        - np.exp(-((x + 1.0) ** 2) - y**2) / 3.0
    )


def peaks_rescaled(points) -> np.ndarray:
    return peaks(points, rescale=True)


def linear_x(points) -> np.ndarray:
    """``f(x) = x_1``; handy closed-form test target."""
    return np.atleast_2d(np.asarray(points, dtype=float))[:, 0].copy()


TARGETS = {"peaks": peaks, "peaks-rescaled": peaks_rescaled, "linear": linear_x}
