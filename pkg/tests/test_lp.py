import numpy as np
import pytest
from scipy.optimize import linprog

from sapcert.errors import InputError
from sapcert.lp import LinearProgram, solve_lp


def test_simple_optimum():
    # min x + y  s.t.  x + y >= 1
    sol = solve_lp(LinearProgram([1, 1], A_ub=[[-1, -1]], b_ub=[-1]))
    assert sol.optimal
    assert np.isclose(sol.objective_value, 1.0)


def test_equality_and_bounds():
    sol = solve_lp(LinearProgram([1, 2], A_eq=[[1, 1]], b_eq=[2], upper=[1, np.inf]))
    assert sol.optimal
    assert np.allclose(sol.point, [1, 1])
    assert np.isclose(sol.objective_value, 3.0)


def test_unbounded_and_infeasible():
    assert solve_lp(LinearProgram([-1, 0], A_ub=[[1, -1]], b_ub=[0])).status == "unbounded"
    assert solve_lp(LinearProgram([1], A_ub=[[1], [-1]], b_ub=[-1, -1])).status == "infeasible"


def test_redundant_equalities():
    sol = solve_lp(LinearProgram([1, 1], A_eq=[[1, 1], [2, 2]], b_eq=[1, 2]))
    assert sol.optimal and np.isclose(sol.objective_value, 1.0)


def test_free_variables():
    # min |x - 3| written with a free x and slack t
    sol = solve_lp(LinearProgram([0, 1], A_ub=[[1, -1], [-1, -1]], b_ub=[3, -3],
                                 lower=[-np.inf, 0]))
    assert sol.optimal and np.isclose(sol.point[0], 3.0) and np.isclose(sol.objective_value, 0)


def test_input_validation():
    with pytest.raises(InputError):
        LinearProgram([1, 1], A_eq=[[1, 1, 1]], b_eq=[1])
    with pytest.raises(InputError):
        LinearProgram([np.inf])
    with pytest.raises(InputError):
        LinearProgram([1], lower=[np.inf])


def test_matches_scipy_on_random_problems(rng):
    mismatches = 0
    for _ in range(150):
        n = int(rng.integers(2, 8))
        me, mu = int(rng.integers(0, 3)), int(rng.integers(0, 6))
        c = rng.standard_normal(n)
        Ae = rng.standard_normal((me, n)) if me else None
        be = rng.standard_normal(me) if me else None
        Au = rng.standard_normal((mu, n)) if mu else None
        bu = rng.standard_normal(mu) + 1 if mu else None
        lo = np.where(rng.random(n) < 0.3, -np.inf, rng.uniform(-2, 0, n))
        up = np.where((rng.random(n) < 0.5) | np.isinf(lo), np.inf, lo + 2)
        ours = solve_lp(LinearProgram(c, Ae, be, Au, bu, lo, up))
        ref = linprog(c, A_ub=Au, b_ub=bu, A_eq=Ae, b_eq=be, bounds=list(zip(lo, up)))
        status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
        if status != ours.status or (status == "optimal" and abs(ref.fun - ours.objective_value) > 1e-7):
            mismatches += 1
    assert mismatches == 0
