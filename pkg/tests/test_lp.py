import math

import numpy as np
import pytest
from scipy.optimize import linprog

from hsetkit.errors import MaxIterations
from hsetkit.lp import LpProblem, RowSense, Sense, Status, check_feasible, solve_lp

INF = np.inf


def test_box_with_equality():
    p = LpProblem([1, 1], [[1, -1]], [0], ["=="], Sense.MAX, [0, 0], [1, 1])
    s = solve_lp(p)
    assert s.status is Status.OPTIMAL
    assert s.objective_value == pytest.approx(2.0)
    np.testing.assert_allclose(s.primal, [1.0, 1.0])


def test_infeasible():
    p = LpProblem([1], [[1], [1]], [-1, 0], ["<=", ">="], Sense.MAX)
    assert solve_lp(p).status is Status.INFEASIBLE


def test_unbounded():
    p = LpProblem([1, 0], [[1, -1]], [1], ["<="], Sense.MAX)
    assert solve_lp(p).status is Status.UNBOUNDED


def test_two_point_minimax():
    e = math.exp(-1)
    B = np.array([[1.0], [e]])
    f = np.array([0.0, 1.0])
    A = np.block([[-B, -np.ones((2, 1))], [B, -np.ones((2, 1))]])
    p = LpProblem([0, 1], A, np.r_[-f, f], lower_bounds=[-INF, -INF], upper_bounds=[INF, INF])
    s = solve_lp(p)
    assert s.objective_value == pytest.approx(1 / (1 + e), abs=1e-12)
    assert s.objective_value == pytest.approx(0.7310586, abs=5e-8)


def test_beale_cycling_example():
    # classic instance on which Dantzig's rule without anti-cycling loops forever
    c = [-0.75, 20, -0.5, 6]
    A = [[0.25, -8, -1, 9], [0.5, -12, -0.5, 3], [0, 0, 1, 0]]
    s = solve_lp(LpProblem(c, A, [0, 0, 1]))
    assert s.status is Status.OPTIMAL
    assert s.objective_value == pytest.approx(-1.25, abs=1e-12)


def test_iteration_cap():
    rng = np.random.default_rng(3)
    A = rng.uniform(0.1, 1, (20, 20))
    p = LpProblem(-np.ones(20), A, np.ones(20))
    with pytest.raises(MaxIterations):
        solve_lp(p, max_iter=1)


def test_rank_deficient_equalities():
    # second row duplicates the first
    p = LpProblem([1, 1, 1], [[1, -1, 0], [2, -2, 0], [0, 1, -1]], [0, 0, 0],
                  ["=="] * 3, Sense.MAX, [0] * 3, [1] * 3)
    s = solve_lp(p)
    assert s.objective_value == pytest.approx(3.0)
    assert s.row_rank == 2


def _random_lp(rng):
    m, n = int(rng.integers(1, 31)), int(rng.integers(1, 31))
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, n)
    senses = rng.choice(["<=", ">=", "=="], m, p=[0.5, 0.3, 0.2])
    b = A @ x0
    b = np.where(senses == "<=", b + rng.uniform(0, 1, m), b)
    b = np.where(senses == ">=", b - rng.uniform(0, 1, m), b)
    lo = np.where(rng.random(n) < 0.3, -INF, -1.0)
    up = np.where(rng.random(n) < 0.3, INF, 2.0)
    return LpProblem(rng.normal(size=n), A, b, senses, Sense.MIN, lo, up), senses


def _highs(p, senses):
    A, b = p.constraint_matrix, p.rhs
    le, ge, eq = senses == "<=", senses == ">=", senses == "=="
    Aub = np.vstack([A[le], -A[ge]])
    bub = np.r_[b[le], -b[ge]]
    return linprog(p.objective, A_ub=Aub if len(Aub) else None, b_ub=bub if len(bub) else None,
                   A_eq=A[eq] if eq.any() else None, b_eq=b[eq] if eq.any() else None,
                   bounds=list(zip(p.lower_bounds, p.upper_bounds)), method="highs")


def test_random_lps_against_highs():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p, senses = _random_lp(rng)
        s = solve_lp(p)
        ref = _highs(p, senses)
        if ref.status == 3:
            assert s.status is Status.UNBOUNDED
            continue
        assert ref.status == 0 and s.status is Status.OPTIMAL
        x = s.primal
        assert s.objective_value == pytest.approx(ref.fun, abs=1e-7 * (1 + abs(ref.fun)))
        # duality: b.y plus bound terms reproduces the objective
        assert abs(s.objective_value - s.dual_bound(p)) <= 1e-7 * (1 + abs(s.objective_value))
        # feasibility
        r = p.constraint_matrix @ x - p.rhs
        assert np.all(r[senses == "<="] <= 1e-9)
        assert np.all(r[senses == ">="] >= -1e-9)
        assert np.all(np.abs(r[senses == "=="]) <= 1e-9)
        assert np.all(x >= p.lower_bounds - 1e-9) and np.all(x <= p.upper_bounds + 1e-9)
        # complementary slackness per row
        assert np.all(np.abs(s.dual * r) <= 1e-8)
        # vertex: at most m variables strictly inside their bounds
        inside = (x > p.lower_bounds + 1e-9) & (x < p.upper_bounds - 1e-9)
        assert inside.sum() <= p.shape[0]


def test_deterministic():
    rng = np.random.default_rng(5)
    p, _ = _random_lp(rng)
    a, b = solve_lp(p), solve_lp(p)
    assert a.primal.tobytes() == b.primal.tobytes()
    assert a.dual.tobytes() == b.dual.tobytes()
    assert a.basis == b.basis


class TestCheckFeasible:
    def test_contradiction(self):
        r = check_feasible([[1.0], [-1.0]], [-1.0, -1.0])
        assert not r.feasible and r.x is None
        w = r.certificate
        assert np.all(w >= 0)
        np.testing.assert_allclose(w / w[0], [1.0, 1.0])
        assert w @ np.array([-1.0, -1.0]) < 0

    def test_trivial_feasible(self):
        r = check_feasible([[1.0]], [0.0])
        assert r.feasible
        np.testing.assert_allclose(r.x, [0.0])

    def test_substitute(self):
        r = check_feasible([[1.0], [2.0]], [-1.0, -1.0])
        assert r.feasible
        assert np.all(np.array([[1.0], [2.0]]) @ r.x <= np.array([-1.0, -1.0]) + 1e-9)

    def test_dichotomy_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m, n = int(rng.integers(1, 25)), int(rng.integers(1, 10))
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m) - rng.uniform(0, 1)
            r = check_feasible(A, b)
            assert (r.x is None) != (r.certificate is None)
            if r.feasible:
                assert np.all(A @ r.x <= b + 1e-9)
            else:
                w = r.certificate
                assert np.all(w >= 0)
                assert np.max(np.abs(w @ A)) <= 1e-8 * max(1.0, w.max())
                assert w @ b < 0
