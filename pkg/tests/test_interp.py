import math

import numpy as np
import pytest

from hsetkit.errors import DegeneratePoints, DimensionMismatch, EmptyInput, PointTooClose
from hsetkit.grids import RegularGrid
from hsetkit.interp import (
    build_system,
    cardinal_g,
    fill_distance,
    interpolate,
    lagrangians_at,
    lebesgue_function,
    power_function_sq,
    zero_set_distance,
)
from hsetkit.kernels import Kernel, PointSet, kernel_matrix, kernel_vector

E1, E2 = math.exp(-1.0), math.exp(-2.0)


def random_system(rng, kernel, n, dim=2):
    while True:
        try:
            return build_system(kernel, PointSet.distinct(rng.uniform(-1, 1, (n, dim))))
        except DegeneratePoints:
            continue


class TestBuildSystem:
    def test_single_point(self, gauss):
        np.testing.assert_array_equal(build_system(gauss, [[0.0]]).alpha, [[1.0]])

    def test_two_points(self, gauss):
        sys = build_system(gauss, PointSet([0.0, 1.0]))
        expected = np.array([[1.0, -E1], [-E1, 1.0]]) / (1.0 - E2)
        np.testing.assert_allclose(sys.alpha, expected, rtol=1e-14)

    def test_duplicates(self, gauss):
        with pytest.raises(DegeneratePoints):
            build_system(gauss, [[0.1, 0.2], [0.1, 0.2]])


class TestInterpolate:
    def test_zero_data(self, gauss, rng):
        sys = random_system(rng, gauss, 6)
        np.testing.assert_array_equal(interpolate(sys, np.zeros(6)).coefficients, np.zeros(6))

    def test_one_point(self, gauss):
        s = interpolate(build_system(gauss, [[0.0]]), [2.0])
        assert s.coefficients[0] == pytest.approx(2.0)
        assert s([[1.0]])[0] == pytest.approx(2 * E1, rel=1e-14)

    def test_basis_translate(self, gauss, rng):
        sys = random_system(rng, gauss, 7)
        col = sys.gram[:, 3]
        e = np.zeros(7)
        e[3] = 1.0
        np.testing.assert_allclose(interpolate(sys, col).coefficients, e, atol=1e-8)

    def test_length_checked(self, gauss):
        with pytest.raises(DimensionMismatch):
            interpolate(build_system(gauss, [[0.0]]), [1.0, 2.0])


def test_lagrangian_examples(gauss):
    sys = build_system(gauss, [[0.0]])
    assert lagrangians_at(sys, [1.0])[0] == pytest.approx(E1, rel=1e-15)
    u = lagrangians_at(build_system(gauss, PointSet([0.0, 1.0])), [0.5])
    assert u[0] == pytest.approx(u[1], rel=1e-14)
    with pytest.raises(DimensionMismatch):
        lagrangians_at(sys, [0.0, 1.0])


def test_power_function_examples(gauss):
    sys = build_system(gauss, [[0.0]])
    assert power_function_sq(sys, [0.0]) == 0.0
    assert power_function_sq(sys, [1.0]) == pytest.approx(1 - E2, rel=1e-14)
    empty = build_system(gauss, np.zeros((0, 2)))
    assert power_function_sq(empty, [0.3, 0.4]) == 1.0


def test_lebesgue_examples(gauss):
    sys = build_system(gauss, [[0.0]])
    assert lebesgue_function(sys, [1.0]) == pytest.approx(E1, rel=1e-15)
    assert lebesgue_function(sys, [0.0]) == pytest.approx(1.0)


class TestCardinal:
    def test_closed_form(self, gauss):
        g = cardinal_g(build_system(gauss, [[0.0]]), [1.0])
        assert g.coeff_xi == pytest.approx(1 / (1 - E2), rel=1e-14)
        assert g.coeff_xi == pytest.approx(1.1565176, abs=5e-8)
        assert g.coeff_X[0] == pytest.approx(-E1 / (1 - E2), rel=1e-14)
        assert g.coeff_X[0] == pytest.approx(-0.4254590, abs=1e-7)
        np.testing.assert_allclose(g([[0.0], [1.0]]), [0.0, 1.0], atol=1e-14)

    def test_too_close(self, gauss):
        with pytest.raises(PointTooClose):
            cardinal_g(build_system(gauss, [[0.0], [0.5]]), [0.0])


class TestFillDistance:
    def test_examples(self):
        assert fill_distance([[0.0], [1.0]], [[0.0], [1.0]]) == 0.0
        assert fill_distance([[0.0]], [[-1.0], [1.0]]) == 1.0
        grid = RegularGrid.box([-1.0], [1.0], 101)
        assert fill_distance([[-1.0], [1.0]], grid) == pytest.approx(1.0, abs=1e-15)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            fill_distance(np.zeros((0, 2)), [[0.0, 0.0]])


class TestZeroSetDistance:
    def test_exact_reproduction(self, gauss, rng):
        sys = random_system(rng, gauss, 5)
        c = rng.normal(size=5)
        f = lambda p: kernel_matrix(gauss, p, sys.X) @ c
        s = interpolate(sys, f(sys.X.points))
        grid = RegularGrid.square(21)
        assert zero_set_distance(sys, s, f, grid) <= grid.spacing

    def test_constant_sign_falls_back(self, gauss):
        sys = build_system(gauss, [[0.0, 0.0]])
        f = lambda p: np.full(len(p), 5.0)
        s = interpolate(sys, [0.0])  # s = 0, so f - s > 0 everywhere
        grid = RegularGrid.square(11)
        assert zero_set_distance(sys, s, f, grid) == fill_distance(sys.X, grid)

    def test_linear_1d(self, gauss):
        sys = build_system(gauss, [[0.0]])
        f = lambda p: p[:, 0]
        s = interpolate(sys, [0.0])
        grid = RegularGrid.box([-1.0], [1.0], 40)  # 0 is not a node
        assert zero_set_distance(sys, s, f, grid) == pytest.approx(1.0, abs=1e-12)

    def test_bounded_by_fill_plus_spacing(self, gauss, rng):
        from hsetkit.targets import peaks

        for _ in range(5):
            sys = random_system(rng, gauss, 12)
            s = interpolate(sys, peaks(sys.X.points))
            grid = RegularGrid.square(31)
            hz = zero_set_distance(sys, s, peaks, grid)
            assert hz <= fill_distance(sys.X, grid) + grid.spacing


class TestProperties:
    def test_lagrange_delta(self, gauss, rng):
        for _ in range(100):
            sys = random_system(rng, gauss, int(rng.integers(1, 26)))
            for j in range(sys.n):
                u = lagrangians_at(sys, sys.X[j])
                e = np.zeros(sys.n)
                e[j] = 1.0
                assert np.max(np.abs(u - e)) <= 1e-8

    def test_power_function_variational_form(self, gauss, rng):
        for _ in range(50):
            sys = random_system(rng, gauss, int(rng.integers(1, 16)))
            xi = rng.uniform(-1, 1, 2)
            k = kernel_vector(gauss, sys.X, xi)
            variational = 1.0 - k @ np.linalg.solve(sys.gram, k)
            assert abs(power_function_sq(sys, xi) - max(variational, 0.0)) <= 1e-9

    def test_power_function_monotone(self, gauss, rng):
        for _ in range(50):
            X = rng.uniform(-1, 1, (10, 2))
            small = build_system(gauss, X[:6])
            big = build_system(gauss, X)
            for xi in rng.uniform(-1, 1, (5, 2)):
                assert power_function_sq(big, xi) <= power_function_sq(small, xi) + 1e-9

    def test_cardinal_invariants(self, gauss, rng):
        for _ in range(50):
            sys = random_system(rng, gauss, int(rng.integers(1, 15)))
            xi = rng.uniform(-1, 1, 2)
            g = cardinal_g(sys, xi)
            assert np.max(np.abs(g(sys.X))) <= 1e-8
            assert abs(g(xi[None, :])[0] - 1.0) <= 1e-8

    def test_reproduction_of_trial_space(self, gauss, rng):
        for _ in range(50):
            sys = random_system(rng, gauss, int(rng.integers(1, 15)))
            c = rng.normal(size=sys.n)
            s = interpolate(sys, sys.gram @ c)
            pts = rng.uniform(-1, 1, (20, 2))
            np.testing.assert_allclose(s(pts), kernel_matrix(gauss, pts, sys.X) @ c, atol=1e-8)

    def test_other_kernels(self, rng):
        for fam in ("imq", "matern32"):
            sys = random_system(rng, Kernel(fam, 0.5), 10)
            for j in range(sys.n):
                assert power_function_sq(sys, sys.X[j]) <= 1e-10
                assert lebesgue_function(sys, sys.X[j]) == pytest.approx(1.0, abs=1e-8)
