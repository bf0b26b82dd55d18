import math

import numpy as np
import pytest

from sapcert.certify import min_right_inverse_l1
from sapcert.errors import InputError
from sapcert.precondition import null_space_distance, invariance_check, null_space_residual, svd_preconditioner


def test_preconditioned_rows_are_orthonormal(rng):
    A = rng.standard_normal((4, 9))
    P, At = svd_preconditioner(A)
    assert np.allclose(At @ At.T, np.eye(4), atol=1e-9)
    assert null_space_residual(A, At) <= 1e-9


def test_preconditioner_examples():
    P, _ = svd_preconditioner(np.diag([2.0, 1.0]))
    assert np.allclose(np.abs(P.matrix), np.diag([0.5, 1.0]))
    _, At = svd_preconditioner(np.array([[1.0, 1.0]]))
    assert np.allclose(np.abs(At), [[2 ** -0.5, 2 ** -0.5]])
    with pytest.raises(InputError):
        svd_preconditioner(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_null_space_distance_examples():
    assert null_space_distance(np.eye(3)) == pytest.approx(1.0)
    assert null_space_distance(np.array([[1.0, 1.0]])) == pytest.approx(math.sqrt(2), abs=1e-9)


def test_null_space_distance_cap_and_right_inverse_identity(rng):
    for _ in range(10):
        A = rng.standard_normal((3, 7))
        v = null_space_distance(A)
        assert v <= math.sqrt(7) + 1e-9
        _, At = svd_preconditioner(A)
        assert v == pytest.approx(min_right_inverse_l1(At), abs=1e-8)
        assert v == pytest.approx(null_space_distance(At), abs=1e-8)


def test_invariance_checks(rng):
    A = rng.standard_normal((3, 6))
    out = invariance_check(A, np.eye(3), 1)
    assert all(r.passed for r in out.values())
    out = invariance_check(A, rng.standard_normal((3, 3)), 1)
    assert all(r.passed for r in out.values())
    out = invariance_check(np.array([[1.0, 1.0]]), np.array([[3.7]]), 1)
    assert out["gamma"].passed
    with pytest.raises(InputError):
        invariance_check(A, np.zeros((3, 3)), 1)


def test_diagonal_preconditioner_sup_norm(rng):
    from sapcert.certify import SapCertificate, convert_certificate, nsp_constant_l1, sap_from_nsp
    A = rng.standard_normal((3, 6))
    base = sap_from_nsp(A, nsp_constant_l1(A, 1))
    cert = convert_certificate(base, 3, p=np.inf)
    out = invariance_check(A, np.diag([2.5, 2.5, 2.5]), 1, cert=cert, samples=10000)
    assert out["transfer"].passed
    assert isinstance(cert, SapCertificate)
