"""Dense real linear algebra built on Jacobi rotations.

The one-sided (Hestenes) Jacobi SVD and the cyclic Jacobi eigensolver are
accurate and deterministic at the matrix sizes used in this package
(a few dozen columns). Rotations on disjoint index pairs are applied in
parallel following a round-robin tournament schedule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

__all__ = [
    "SvdFactorization",
    "as_matrix",
    "svd",
    "symmetric_eigen",
    "batched_symmetric_eigvals",
    "null_space_basis",
    "numerical_rank",
    "submatrix_extreme_singular_values",
    "operator_norm",
    "batched_gram_extremes",
]

_EPS = np.finfo(float).eps
MAX_SWEEPS = 80


@dataclass(frozen=True)
class SvdFactorization:
    """Full SVD ``A = U @ diag(sigma) @ V.T`` with square orthogonal U and V.

    ``singular_values`` has ``min(m, n)`` entries in nonincreasing order.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.left_vectors.shape[0], self.right_vectors.shape[0]

    def sigma_matrix(self) -> np.ndarray:
        m, n = self.shape
        out = np.zeros((m, n))
        k = len(self.singular_values)
        out[:k, :k] = np.diag(self.singular_values)
        return out

    def reconstruct(self) -> np.ndarray:
        return self.left_vectors @ self.sigma_matrix() @ self.right_vectors.T


def as_matrix(A, name: str = "A") -> np.ndarray:
    """Validate and copy ``A`` into a finite 2-D float array."""
    M = np.array(A, dtype=float)
    if M.ndim == 1:
        M = M[None, :]
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise InputError(f"{name} must be a nonempty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} has non-finite entries")
    return M


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: each round is a set of disjoint pairs (p, q), p < q."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    k = len(players)
    rounds = []
    for _ in range(k - 1):
        ps, qs = [], []
        for i in range(k // 2):
            a, b = players[i], players[k - 1 - i]
            if a < 0 or b < 0:
                continue
            ps.append(min(a, b))
            qs.append(max(a, b))
        if ps:
            order = np.argsort(ps)
            rounds.append((np.array(ps)[order], np.array(qs)[order]))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _complete_basis(Q: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns ``Q`` (dim x k) to a dim x dim orthogonal matrix.

    Candidates are the coordinate vectors, taken in index order and twice
    orthogonalized, so the completion is deterministic.
    """
    cols = [Q[:, j] for j in range(Q.shape[1])]
    for i in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim)
        v[i] = 1.0
        for _ in range(2):
            for c in cols:
                v -= (c @ v) * c
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    if len(cols) != dim:
        raise ConvergenceError("failed to complete an orthonormal basis")
    return np.column_stack(cols) if cols else np.zeros((dim, 0))


def _one_sided_jacobi(W: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonalize the columns of tall W in place; returns (W, V)."""
    n = W.shape[1]
    V = np.eye(n)
    if n == 1:
        return W, V
    schedule = _round_robin(n)
    # columns below this energy are numerically zero and are left alone
    floor = (_EPS * np.linalg.norm(W)) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for p, q in schedule:
            wp, wq = W[:, p], W[:, q]
            alpha = np.einsum("ij,ij->j", wp, wp)
            beta = np.einsum("ij,ij->j", wq, wq)
            gamma = np.einsum("ij,ij->j", wp, wq)
            active = (np.abs(gamma) > _EPS * np.sqrt(alpha * beta)) & (np.minimum(alpha, beta) > floor)
            if not active.any():
                continue
            rotated = True
            p, q = p[active], q[active]
            alpha, beta, gamma = alpha[active], beta[active], gamma[active]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            for M in (W, V):
                mp, mq = M[:, p].copy(), M[:, q]
                M[:, p] = c * mp - s * mq
                M[:, q] = s * mp + c * mq
        if not rotated:
            return W, V
    raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")


def _svd_tall(A: np.ndarray, max_sweeps: int) -> SvdFactorization:
    m, n = A.shape
    # rescale so squared column norms neither underflow nor overflow
    amax = np.abs(A).max(initial=0.0)
    factor = amax if amax > 0 else 1.0
    W, V = _one_sided_jacobi(A / factor, max_sweeps)
    W *= factor
    sigma = np.linalg.norm(W, axis=0)
    # stable sort keeps original column order among exact ties
    order = np.argsort(-sigma, kind="stable")
    sigma, W, V = sigma[order], W[:, order], V[:, order]
    scale = sigma[0] if n else 0.0
    keep = sigma > max(scale * _EPS * max(m, n), np.finfo(float).tiny)
    U = W[:, keep] / sigma[keep]
    U = _complete_basis(U, m)
    sigma = np.where(keep, sigma, 0.0)
    return SvdFactorization(U, sigma, V)


def svd(A, max_sweeps: int = MAX_SWEEPS) -> SvdFactorization:
    """Full singular value decomposition by one-sided Jacobi rotations.

    Raises ``ConvergenceError`` if the sweep budget runs out.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m >= n:
        return _svd_tall(A, max_sweeps)
    f = _svd_tall(A.T, max_sweeps)
    return SvdFactorization(f.right_vectors, f.singular_values, f.left_vectors)


def _jacobi_eigh_batch(M: np.ndarray, max_sweeps: int, want_vectors: bool):
    B, k, _ = M.shape
    M = M.copy()
    V = np.broadcast_to(np.eye(k), (B, k, k)).copy() if want_vectors else None
    if k == 1:
        return M[:, 0, 0].reshape(B, 1), V
    schedule = _round_robin(k)
    scale = np.sqrt(np.einsum("bij,bij->b", M, M))
    thresh = (_EPS * scale)[:, None]
    for _ in range(max_sweeps):
        off = M - np.einsum("bii->bi", M)[:, :, None] * np.eye(k)
        if np.all(np.abs(off).max(axis=(1, 2)) <= thresh[:, 0] + 1e-300):
            break
        for p, q in schedule:
            apq = M[:, p, q]
            app = M[:, p, p]
            aqq = M[:, q, q]
            active = np.abs(apq) > thresh
            safe = np.where(active, apq, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c3, s3 = c[:, :, None], s[:, :, None]
            rp, rq = M[:, p, :].copy(), M[:, q, :]
            M[:, p, :] = c3 * rp - s3 * rq
            M[:, q, :] = s3 * rp + c3 * rq
            c2, s2 = c[:, None, :], s[:, None, :]
            cp, cq = M[:, :, p].copy(), M[:, :, q]
            M[:, :, p] = c2 * cp - s2 * cq
            M[:, :, q] = s2 * cp + c2 * cq
            M[:, p, q] = np.where(active, 0.0, M[:, p, q])
            M[:, q, p] = M[:, p, q]
            if want_vectors:
                vp, vq = V[:, :, p].copy(), V[:, :, q]
                V[:, :, p] = c2 * vp - s2 * vq
                V[:, :, q] = s2 * vp + c2 * vq
    else:
        raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    return np.einsum("bii->bi", M).copy(), V


def symmetric_eigen(M, max_sweeps: int = MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a symmetric matrix."""
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise InputError(f"matrix must be square, got {M.shape}")
    if np.max(np.abs(M - M.T)) > 1e-12 * max(1.0, np.max(np.abs(M))):
        raise InputError("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    w, V = _jacobi_eigh_batch(M[None], max_sweeps, True)
    order = np.argsort(w[0], kind="stable")
    return w[0][order], V[0][:, order]


def batched_symmetric_eigvals(Ms: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Ascending eigenvalues for a stack ``(B, k, k)`` of symmetric matrices."""
    Ms = np.asarray(Ms, dtype=float)
    if Ms.ndim != 3 or Ms.shape[1] != Ms.shape[2]:
        raise InputError(f"expected a (B, k, k) stack, got {Ms.shape}")
    if Ms.shape[0] == 0:
        return np.zeros((0, Ms.shape[1]))
    w, _ = _jacobi_eigh_batch(0.5 * (Ms + Ms.transpose(0, 2, 1)), max_sweeps, False)
    return np.sort(w, axis=1)


def _rank_tol(sigma: np.ndarray, tol: float | None) -> float:
    if tol is None:
        return 1e-10 * (sigma[0] if len(sigma) else 0.0)
    if tol <= 0:
        raise InputError("tol must be positive")
    return tol


def numerical_rank(A, tol: float | None = None, factorization: SvdFactorization | None = None) -> int:
    f = factorization if factorization is not None else svd(A)
    sigma = f.singular_values
    return int(np.sum(sigma > _rank_tol(sigma, tol)))


def null_space_basis(A, tol: float | None = None, factorization: SvdFactorization | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of ``A``.

    The default tolerance is ``1e-10 * sigma_max``. A zero matrix has the
    whole space as its null space.
    """
    A = as_matrix(A)
    f = factorization if factorization is not None else svd(A)
    r = numerical_rank(A, tol, f)
    return f.right_vectors[:, r:].copy()


def submatrix_extreme_singular_values(A, S) -> tuple[float, float]:
    """``(sigma_min, sigma_max)`` of the column submatrix ``A[:, S]``.

    ``sigma_min`` is the smallest of the ``|S|`` singular values of ``A_S``
    as a map on R^|S|, so it is zero whenever ``|S| > m``.
    """
    A = as_matrix(A)
    idx = np.asarray(list(S), dtype=int)
    n = A.shape[1]
    if idx.size == 0:
        raise InputError("index set must be nonempty")
    if len(set(idx.tolist())) != idx.size:
        raise InputError("index set has repeated entries")
    if idx.min() < 0 or idx.max() >= n:
        raise InputError(f"index out of range for {n} columns")
    sigma = svd(A[:, idx]).singular_values
    smin = 0.0 if idx.size > A.shape[0] else float(sigma[-1])
    return smin, float(sigma[0])


def operator_norm(M, p: float) -> float:
    """Induced operator norm ``||M||_{p->p}`` for p in {1, 2, inf}."""
    M = as_matrix(M, "M")
    if p == 1:
        return float(np.abs(M).sum(axis=0).max())
    if p == np.inf:
        return float(np.abs(M).sum(axis=1).max())
    if p == 2:
        return float(svd(M).singular_values[0])
    raise InputError(f"operator norm only implemented for p in (1, 2, inf), got {p}")


def batched_gram_extremes(A, supports: np.ndarray, chunk: int = 50000) -> tuple[np.ndarray, np.ndarray]:
    """Extreme eigenvalues of ``A_S^T A_S`` for every row ``S`` of ``supports``.

    Equivalent to squaring ``submatrix_extreme_singular_values`` support by
    support, but solved as one stacked Jacobi problem.
    """
    A = as_matrix(A)
    supports = np.asarray(supports, dtype=int)
    if supports.ndim != 2:
        raise InputError("supports must be a 2-D array of index rows")
    G = A.T @ A
    lo = np.empty(len(supports))
    hi = np.empty(len(supports))
    for start in range(0, len(supports), chunk):
        S = supports[start:start + chunk]
        w = batched_symmetric_eigvals(G[S[:, :, None], S[:, None, :]])
        lo[start:start + chunk] = w[:, 0]
        hi[start:start + chunk] = w[:, -1]
    if supports.shape[1] > A.shape[0]:
        lo[:] = 0.0
    return lo, hi
