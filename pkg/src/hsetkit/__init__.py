"""H-sets, discrete Chebyshev approximation and kernel divided differences.

Submodules:

- ``linalg``: Cholesky-based SPD factorization and solves.
- ``kernels``: radial kernels, point sets, kernel matrices.
- ``interp``: kernel interpolation, Lagrangians, Power and Lebesgue functions.
- ``lp``: dense two-phase simplex with duals and Farkas certificates.
- ``cheb``: minimax approximation on finite sets and extremal H-sets.
- ``hset``: H-set certification, support reduction, error brackets.
- ``divdiff``: kernel divided differences, zero-set maps, greedy selection.
- ``cli``: the ``hsetkit`` command.
"""

__version__ = "0.1.0"
