import numpy as np
import pytest

from sapcert.errors import InputError
from sapcert.recovery import (
    RecoveryProblem,
    recover,
    solve_l1,
    solve_l1_l2,
    solve_lq_irls,
    sparse_oracle,
)

A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
Z = np.array([1.0, 1.0])


@pytest.mark.parametrize("p", [1, 2, np.inf])
def test_l1_picks_the_shared_column(p):
    res = solve_l1(RecoveryProblem(A, Z, 0.0, p))
    assert res.certified_optimal
    assert np.allclose(res.solution, [0, 0, 1], atol=1e-9)


def test_zero_is_returned_when_feasible():
    res = solve_l1(RecoveryProblem(A, Z, 5.0, 1))
    assert np.all(res.solution == 0)


def test_l1_with_noise_is_feasible_and_optimal(rng):
    M = rng.standard_normal((5, 10))
    z = rng.standard_normal(5)
    for p in (1, np.inf):
        res = solve_l1(RecoveryProblem(M, z, 0.1, p))
        assert res.residual_norm <= 0.1 + 1e-8
        # objective no larger than a feasible least-norm point scaled onto the ball
        y0 = np.linalg.lstsq(M, z, rcond=None)[0]
        assert res.objective <= np.abs(y0).sum() + 1e-9


def test_admm_solution_is_close_to_lp():
    res = solve_l1_l2(RecoveryProblem(A, Z, 1e-6, 2))
    assert res.residual_norm <= 1e-6 * (1 + 1e-9)
    assert np.allclose(res.solution, [0, 0, 1], atol=1e-5)
    with pytest.raises(InputError):
        solve_l1(RecoveryProblem(A, Z, 0.1, 2))


def test_irls_finds_sparse_solution():
    res = solve_lq_irls(RecoveryProblem(A, Z, 0.0, 1, 0.5))
    assert res.status == "converged"
    assert np.allclose(res.solution, [0, 0, 1], atol=1e-8)
    assert not res.certified_optimal


def test_oracle_and_dispatch():
    y, obj = sparse_oracle(RecoveryProblem(A, Z, 0.0, 1, 0.5), 1)
    assert np.allclose(y, [0, 0, 1])
    assert np.isclose(obj, 1.0)
    assert recover(RecoveryProblem(A, Z, 0.0, 1, 0.5)).status == "converged"


def test_exact_recovery_of_one_sparse_vector(rng):
    Q = np.linalg.qr(rng.standard_normal((12, 12)))[0][:6]
    x = np.zeros(12)
    x[4] = 1.5
    res = solve_l1(RecoveryProblem(Q, Q @ x, 0.0, np.inf))
    assert np.abs(res.solution - x).max() <= 1e-7


def test_problem_validation():
    with pytest.raises(InputError):
        RecoveryProblem(A, [1.0], 0.0)
    with pytest.raises(InputError):
        RecoveryProblem(A, Z, -1.0)
    with pytest.raises(InputError):
        RecoveryProblem(A, Z, 0.0, 3)
    with pytest.raises(InputError):
        RecoveryProblem(A, Z, 0.0, 1, 2.0)
