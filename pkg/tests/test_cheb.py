import math

import numpy as np
import pytest
from scipy.optimize import linprog

from hsetkit.cheb import extract_extremal_hset, minimax_on_subset_bound, solve_minimax
from hsetkit.errors import DimensionMismatch, EmptySupport
from hsetkit.hset import kernel_hset_matrix, test_hset
from hsetkit.divdiff import hset_from_point
from hsetkit.interp import build_system
from hsetkit.kernels import Kernel, PointSet, kernel_matrix

E = math.exp(-1)


def _check_invariants(sol, B, f):
    eta = sol.eta_star
    assert np.max(np.abs(sol.residuals)) == pytest.approx(eta, abs=1e-8)
    np.testing.assert_allclose(sol.residuals, f - B @ sol.coefficients, atol=1e-12)
    assert np.max(np.abs(B.T @ sol.dual_weights)) <= 1e-8
    assert np.abs(sol.dual_weights).sum() == pytest.approx(1.0, abs=1e-8)
    assert f @ sol.dual_weights == pytest.approx(eta, abs=1e-7)
    slack = np.abs(sol.residuals) < eta - 1e-7
    assert np.all(np.abs(sol.dual_weights[slack]) <= 1e-12)
    nz = np.abs(sol.dual_weights) > 1e-12
    assert np.all(np.sign(sol.dual_weights[nz]) == sol.sigma_star[nz])


def _highs_eta(B, f):
    N, n = B.shape
    ones = np.ones((N, 1))
    res = linprog(np.r_[np.zeros(n), 1.0], A_ub=np.block([[-B, -ones], [B, -ones]]),
                  b_ub=np.r_[-f, f], bounds=[(None, None)] * (n + 1), method="highs")
    assert res.status == 0
    return res.fun


class TestExamples:
    def test_two_point(self):
        B = np.array([[1.0], [E]])
        f = np.array([0.0, 1.0])
        sol = solve_minimax(B, f)
        a = 1 / (1 + E)
        assert sol.eta_star == pytest.approx(a, abs=1e-12)
        # x* = -1/(1+e^-1) puts residual -eta at 0 and +eta at 1
        assert abs(sol.coefficients[0]) == pytest.approx(a, abs=1e-12)
        np.testing.assert_array_equal(sol.sigma_star, [-1, 1])
        np.testing.assert_allclose(sol.dual_weights, [-0.2689414, 0.7310586], atol=5e-8)
        H = extract_extremal_hset(sol, PointSet([[0.0], [1.0]]))
        np.testing.assert_array_equal(H.signs, [-1, 1])
        np.testing.assert_allclose(H.points.points.ravel(), [0.0, 1.0])

    def test_range_data(self):
        rng = np.random.default_rng(0)
        B = rng.normal(size=(8, 3))
        f = B @ rng.normal(size=3)
        sol = solve_minimax(B, f)
        assert sol.eta_star == pytest.approx(0.0, abs=1e-10)
        with pytest.raises(EmptySupport):
            extract_extremal_hset(sol, PointSet(rng.normal(size=(8, 2))))

    def test_zero_basis(self):
        f = np.array([0.3, -1.5, 0.7])
        sol = solve_minimax(np.zeros((3, 2)), f)
        assert sol.eta_star == pytest.approx(1.5)
        np.testing.assert_array_equal(sol.coefficients, [0.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_minimax(np.ones((3, 1)), [1.0, 2.0])


def test_chebyshev_polynomial_oracle():
    # best degree-n approximation of x^(n+1) on the n+2 Chebyshev extrema has error 2^-n
    for n in range(1, 8):
        t = np.cos(np.arange(n + 2) * np.pi / (n + 1))
        B = np.vander(t, n + 1, increasing=True)
        sol = solve_minimax(B, t ** (n + 1))
        assert sol.eta_star == pytest.approx(2.0 ** -n, abs=1e-10)
        signs = np.sign(sol.dual_weights)
        assert np.all(signs != 0)
        assert np.all(signs[1:] == -signs[:-1])


def test_random_instances_invariants_and_highs():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(1, 13))
        N = int(rng.integers(n + 1, 61))
        B = rng.normal(size=(N, n))
        f = rng.normal(size=N)
        sol = solve_minimax(B, f)
        _check_invariants(sol, B, f)
        assert sol.eta_star == pytest.approx(_highs_eta(B, f), abs=1e-8)
        assert sol.support.size <= n + 1


def test_kernel_instances_certify():
    rng = np.random.default_rng(1)
    k = Kernel("gaussian", 1.0)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        X = PointSet(rng.uniform(-1, 1, (n, 2)))
        H = PointSet(rng.uniform(-1, 1, (int(rng.integers(n + 1, 40)), 2)))
        B = kernel_matrix(k, H, X)
        f = np.sin(3 * H.points[:, 0]) + H.points[:, 1] ** 2
        sol = solve_minimax(B, f)
        _check_invariants(sol, B, f)
        hs = extract_extremal_hset(sol, H)
        assert test_hset(kernel_hset_matrix(k, X, hs)).is_hset


def test_subset_bound():
    rng = np.random.default_rng(3)
    g = np.linspace(-1, 1, 11)
    T = np.array([(a, b) for a in g for b in g])
    X = rng.uniform(-1, 1, (6, 2))
    B = kernel_matrix(Kernel("gaussian", 1.0), PointSet(T), PointSet(X))
    f = np.cos(2 * T[:, 0]) * T[:, 1]
    full = solve_minimax(B, f).eta_star
    assert minimax_on_subset_bound(full, full)
    for _ in range(10):
        idx = rng.choice(len(T), size=int(rng.integers(1, 60)), replace=False)
        sub = solve_minimax(B[idx], f[idx]).eta_star
        assert minimax_on_subset_bound(sub, full)
    assert not minimax_on_subset_bound(full + 1e-6, full)


def test_support_matches_hset_from_point():
    rng = np.random.default_rng(9)
    k = Kernel("gaussian", 1.0)
    f = lambda p: np.atleast_2d(p)[:, 0] ** 2 - np.atleast_2d(p)[:, 1]
    for _ in range(10):
        X = rng.uniform(-1, 1, (5, 2))
        sys = build_system(k, X)
        xi = rng.uniform(-1, 1, 2)
        T = PointSet(np.vstack([X, xi]))
        sol = solve_minimax(kernel_matrix(k, T, sys.X), f(T.points))
        H = extract_extremal_hset(sol, T)
        ref = hset_from_point(sys, f, xi)
        got = {tuple(p): s for p, s in zip(H.points.points, H.signs)}
        want = {tuple(p): s for p, s in zip(ref.points.points, ref.signs)}
        assert got.keys() == want.keys()
        # the LP fixes the sign of w only up to a global flip
        flip = got[tuple(xi)] * want[tuple(xi)]
        assert all(got[p] == flip * want[p] for p in got)
