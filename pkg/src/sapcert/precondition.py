"""SVD preconditioning and the l1 distance from row-space directions to the null space.

For ``A = U [S' 0] V^T`` with full row rank, ``P = S'^{-1} U^T`` gives
``PA = V_m^T``: the rows become orthonormal and the null space is unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .certify import (
    CheckReport,
    SapCertificate,
    nsp_constant_l1,
    sample_test_vectors,
    sap_from_nsp,
    verify_sap_inequality,
)
from .errors import InputError
from .linalg import SvdFactorization, as_matrix, null_space_basis, numerical_rank, operator_norm, svd
from .lp import LinearProgram, solve_lp

__all__ = [
    "Preconditioner",
    "svd_preconditioner",
    "null_space_distance",
    "l1_distance_to_subspace",
    "null_space_residual",
    "invariance_check",
]


@dataclass
class Preconditioner:
    matrix: np.ndarray
    factorization: SvdFactorization

    def apply(self, A) -> np.ndarray:
        return self.matrix @ as_matrix(A)


def _full_row_rank(A, name="A"):
    A = as_matrix(A, name)
    fac = svd(A)
    if numerical_rank(A, factorization=fac) < A.shape[0]:
        raise InputError(f"{name} must have full row rank")
    return A, fac


ORTHONORMAL_TOL = 1e-12


def _has_orthonormal_rows(A) -> bool:
    return bool(np.abs(A @ A.T - np.eye(A.shape[0])).max() <= ORTHONORMAL_TOL)


def _row_space_basis(A, fac):
    # singular vectors of a matrix with orthonormal rows are only defined up
    # to a rotation; use the rows themselves so the map is idempotent
    if _has_orthonormal_rows(A):
        return A.T.copy()
    return fac.right_vectors[:, :A.shape[0]]


def svd_preconditioner(A) -> tuple[Preconditioner, np.ndarray]:
    """Return ``P`` and ``PA``, whose rows are orthonormal.

    A matrix whose rows are already orthonormal gets ``P = I``.
    """
    A, fac = _full_row_rank(A)
    m = A.shape[0]
    if _has_orthonormal_rows(A):
        return Preconditioner(np.eye(m), fac), A.copy()
    P = (fac.left_vectors / fac.singular_values[:m]).T
    return Preconditioner(P, fac), P @ A


def l1_distance_to_subspace(v, N: np.ndarray) -> float:
    """``min_c ||v - N c||_1`` as an LP over the subspace coordinates c."""
    v = np.asarray(v, dtype=float).ravel()
    n, k = N.shape
    if k == 0:
        return float(np.abs(v).sum())
    # variables (c free, t >= 0): minimize sum t, -t <= v - N c <= t
    obj = np.concatenate([np.zeros(k), np.ones(n)])
    I = np.eye(n)
    A_ub = np.block([[-N, -I], [N, -I]])
    b_ub = np.concatenate([-v, v])
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(n)])
    sol = solve_lp(LinearProgram(obj, A_ub=A_ub, b_ub=b_ub, lower=lower))
    if not sol.optimal:
        raise RuntimeError(f"distance LP ended with status {sol.status}")
    return float(sol.objective_value)


def null_space_distance(A) -> float:
    """``max_i min_{u in N(A)} ||v_i - u||_1`` over the leading right singular vectors.

    Each column is handled separately, so the value equals the smallest
    ``||R||_{1->1}`` over right inverses of the preconditioned matrix.
    It never exceeds ``sqrt(n)``. When the rows of A are already
    orthonormal they serve as the v_i.
    """
    A, fac = _full_row_rank(A)
    m = A.shape[0]
    N = null_space_basis(A, factorization=fac)
    V = _row_space_basis(A, fac)
    return max(l1_distance_to_subspace(V[:, i], N) for i in range(m))


def null_space_residual(A, B) -> float:
    """Largest mutual residual between the null spaces of A and B.

    Zero (to rounding) exactly when the two null spaces coincide.
    """
    NA, NB = null_space_basis(A), null_space_basis(B)
    if NA.shape[1] != NB.shape[1]:
        return float("inf")
    if NA.shape[1] == 0:
        return 0.0
    ra = np.abs(as_matrix(B) @ NA).max() / max(1.0, np.abs(B).max())
    rb = np.abs(as_matrix(A) @ NB).max() / max(1.0, np.abs(A).max())
    return float(max(ra, rb))


def invariance_check(A, P, s: int, cert: SapCertificate | None = None,
                     samples: int = 10000, seed=0) -> dict:
    """Check that preconditioning by a nonsingular P keeps the null space constant
    and moves a certificate to PA with ``D`` scaled by ``||P^{-1}||_{p->p}^q``.

    Without ``cert`` the null space transfer certificate of A is used when
    its gamma is finite. Returns a dict of named :class:`CheckReport`.
    """
    A = as_matrix(A)
    P = as_matrix(P, "P")
    m = A.shape[0]
    if P.shape != (m, m):
        raise InputError(f"P must be {m}x{m}")
    if numerical_rank(P) < m:
        raise InputError("P must be nonsingular")
    PA = P @ A
    out = {}
    g_a = nsp_constant_l1(A, s).gamma
    g_pa = nsp_constant_l1(PA, s).gamma
    if np.isinf(g_a) or np.isinf(g_pa):
        same = np.isinf(g_a) and np.isinf(g_pa)
        gap = 0.0 if same else float("inf")
    else:
        gap = abs(g_a - g_pa)
        same = gap <= 1e-8
    out["gamma"] = CheckReport("gamma-invariance", bool(same), -gap, None,
                               f"gamma(A)={g_a:.12g}, gamma(PA)={g_pa:.12g}", 2)
    if cert is None and np.isfinite(g_a) and numerical_rank(A) == m:
        cert = sap_from_nsp(A, nsp_constant_l1(A, s))
    if cert is not None:
        X = sample_test_vectors(A, cert.order, samples, seed)
        base = verify_sap_inequality(A, cert, X)
        Pinv = np.linalg.inv(P)
        factor = operator_norm(Pinv, cert.p) ** cert.q
        moved = replace(cert, D=cert.D * factor,
                        details={**cert.details, "preconditioner_factor": factor})
        after = verify_sap_inequality(PA, moved, X)
        after.name = "sap-transfer"
        after.detail = f"base check passed={base.passed}; " + after.detail
        out["base"] = base
        out["transfer"] = after
    return out
