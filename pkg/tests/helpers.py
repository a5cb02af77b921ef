"""Shared constructions for the divdiff and acceptance tests."""
import numpy as np
from scipy.optimize import brentq

from hsetkit.interp import lagrangian_matrix, lagrangians_at


def segment_crossing(sys, j, a, b):
    """Root of ``u_j`` on the segment ``a -> b`` as a parameter in (0, 1), or None."""
    g = lambda t: lagrangians_at(sys, a + t * (b - a))[j]
    if g(0.0) * g(1.0) >= 0:
        return None
    return brentq(g, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def find_crossing(sys, rng, tries=500):
    """A random segment through a zero of some Lagrangian: ``(j, a, b, t)``."""
    for _ in range(tries):
        j = int(rng.integers(sys.n))
        a, b = rng.uniform(-1, 1, (2, sys.X.dim))
        t = segment_crossing(sys, j, a, b)
        if t is not None and 0.05 < t < 0.95:
            return j, a, b, t
    raise RuntimeError("no Lagrangian crossing found")


def off_crossings(sys, rng, margin=1e-3):
    """A random point where every Lagrangian is at least ``margin`` in size."""
    while True:
        xi = rng.uniform(-1, 1, sys.X.dim)
        if np.min(np.abs(lagrangian_matrix(sys, xi[None, :]))) > margin:
            return xi
