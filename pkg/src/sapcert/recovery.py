"""Solvers for ``min ||y||_q^q  s.t.  ||A y - z||_p <= eps``.

``solve_l1`` is exact (LP lift) for q = 1 with p in {1, inf}, and for p = 2
when eps = 0. ``solve_l1_l2`` handles the l2 ball by ADMM, ``solve_lq_irls``
is a heuristic for 0 < q < 1, and ``sparse_oracle`` enumerates supports for
tiny instances.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import as_matrix, numerical_rank
from .lp import LinearProgram, solve_lp
from .signals import as_signal, lq_power, lq_quasinorm

__all__ = [
    "RecoveryProblem",
    "RecoveryResult",
    "solve_l1",
    "solve_l1_l2",
    "solve_lq_irls",
    "sparse_oracle",
    "recover",
]

FEAS_SLACK = 1e-7


@dataclass
class RecoveryProblem:
    matrix: np.ndarray
    measurements: np.ndarray
    noise_budget: float = 0.0
    residual_exponent: float = 1.0
    objective_exponent: float = 1.0

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix)
        self.measurements = as_signal(self.measurements, "z")
        if self.measurements.size != self.matrix.shape[0]:
            raise InputError(
                f"z has length {self.measurements.size}, expected {self.matrix.shape[0]}")
        if not (np.isfinite(self.noise_budget) and self.noise_budget >= 0):
            raise InputError("noise budget must be finite and nonnegative")
        if self.residual_exponent not in (1, 2, np.inf):
            raise InputError("residual exponent must be 1, 2 or inf")
        if not 0 < self.objective_exponent <= 1:
            raise InputError("objective exponent must lie in (0, 1]")

    @property
    def A(self):
        return self.matrix

    @property
    def z(self):
        return self.measurements

    @property
    def eps(self):
        return self.noise_budget

    @property
    def p(self):
        return self.residual_exponent

    @property
    def q(self):
        return self.objective_exponent

    def residual(self, y) -> float:
        return lq_quasinorm(self.matrix @ y - self.measurements, self.p)


@dataclass
class RecoveryResult:
    solution: np.ndarray
    residual_norm: float
    objective: float
    certified_optimal: bool
    status: str
    iterations: int = 0

    @property
    def success(self) -> bool:
        return self.status == "optimal" or self.status == "converged"


def _result(problem, y, certified, status, iterations=0):
    return RecoveryResult(y, problem.residual(y), lq_power(y, problem.q),
                          certified, status, iterations)


def _zero_if_feasible(problem: RecoveryProblem):
    # the zero vector is optimal as soon as it is feasible
    if lq_quasinorm(problem.z, problem.p) <= problem.eps:
        return np.zeros(problem.A.shape[1])
    return None


def solve_l1(problem: RecoveryProblem, max_iter: int = 20000) -> RecoveryResult:
    """Certified l1 minimizer through the split ``y = y+ - y-`` LP lift."""
    if problem.q != 1:
        raise InputError("solve_l1 needs q = 1")
    A, z, eps, p = problem.A, problem.z, problem.eps, problem.p
    if p == 2 and eps > 0:
        raise InputError("p = 2 with eps > 0 is not an LP; use solve_l1_l2")
    y0 = _zero_if_feasible(problem)
    if y0 is not None:
        return _result(problem, y0, True, "optimal")

    m, n = A.shape
    AA = np.hstack([A, -A])
    if eps == 0:
        lp = LinearProgram(np.ones(2 * n), A_eq=AA, b_eq=z)
    elif p == np.inf:
        lp = LinearProgram(np.ones(2 * n), A_ub=np.vstack([AA, -AA]),
                           b_ub=np.concatenate([z + eps, eps - z]))
    else:
        # slack u bounds |A y - z| componentwise, sum(u) <= eps
        I = np.eye(m)
        A_ub = np.block([
            [AA, -I],
            [-AA, -I],
            [np.zeros((1, 2 * n)), np.ones((1, m))],
        ])
        b_ub = np.concatenate([z, -z, [eps]])
        lp = LinearProgram(np.concatenate([np.ones(2 * n), np.zeros(m)]), A_ub=A_ub, b_ub=b_ub)
    sol = solve_lp(lp, max_iter=max_iter)
    if sol.status == "infeasible":
        raise RuntimeError("l1 LP lift reported infeasible; this indicates a solver fault")
    if not sol.optimal:
        return RecoveryResult(np.zeros(n), float("nan"), float("nan"), False, sol.status, sol.iterations)
    y = sol.point[:n] - sol.point[n:2 * n]
    return _result(problem, y, True, "optimal", sol.iterations)


def _project_ball(v, center, radius):
    d = v - center
    nd = np.linalg.norm(d)
    return v if nd <= radius else center + d * (radius / nd)


def solve_l1_l2(problem: RecoveryProblem, rho: float = 1.0, max_iter: int = 10000,
                tol: float = 1e-9) -> RecoveryResult:
    """ADMM for ``min ||y||_1`` over the l2 ball ``||A y - z||_2 <= eps``.

    Splits ``w = y`` (soft thresholding) and ``u = A y`` (ball projection).
    The returned point is pulled back onto the ball with a minimum-norm
    correction, so it is feasible whenever A has full row rank.
    """
    if problem.q != 1 or problem.p != 2:
        raise InputError("solve_l1_l2 needs q = 1 and p = 2")
    A, z, eps = problem.A, problem.z, problem.eps
    if eps <= 0:
        raise InputError("solve_l1_l2 needs eps > 0; use solve_l1 for eps = 0")
    y0 = _zero_if_feasible(problem)
    if y0 is not None:
        return _result(problem, y0, False, "converged")

    m, n = A.shape
    L = np.linalg.cholesky(np.eye(n) + A.T @ A)

    def ls_solve(rhs):
        return np.linalg.solve(L.T, np.linalg.solve(L, rhs))

    y = np.zeros(n)
    w, u = y.copy(), A @ y
    w_prev, u_prev = w, u
    lw, lu = np.zeros(n), np.zeros(m)
    status = "iteration_limit"
    it = 0
    for it in range(1, max_iter + 1):
        y_new = ls_solve(w - lw + A.T @ (u - lu))
        Ay = A @ y_new
        v = y_new + lw
        w = np.sign(v) * np.maximum(np.abs(v) - 1.0 / rho, 0.0)
        u = _project_ball(Ay + lu, z, eps)
        lw += y_new - w
        lu += Ay - u
        change = max(np.max(np.abs(y_new - y)), np.max(np.abs(w - w_prev)), np.max(np.abs(u - u_prev)))
        primal = max(np.max(np.abs(y_new - w)), np.max(np.abs(Ay - u)))
        y, w_prev, u_prev = y_new, w, u
        if change <= tol and primal <= tol:
            status = "converged"
            break
    # feasibility restoration: move A y onto the ball along the row space
    Ay = A @ y
    target = _project_ball(Ay, z, eps * (1 - 1e-12))
    if np.linalg.norm(target - Ay) > 0:
        y = y + np.linalg.lstsq(A, target - Ay, rcond=None)[0]
    return _result(problem, y, False, status, it)


def solve_lq_irls(problem: RecoveryProblem, smoothing_start: float = 1.0,
                  smoothing_factor: float = 0.1, smoothing_floor: float = 1e-10,
                  inner_iter: int = 100, max_epochs: int = 50, tol: float = 1e-12) -> RecoveryResult:
    """Iteratively reweighted least squares for ``0 < q < 1`` and ``eps = 0``.

    Each epoch runs weighted minimum-norm solves with weights
    ``(y_i^2 + mu^2)^(q/2 - 1)`` and then shrinks ``mu``. Heuristic: the
    result is a stationary point, not a certified global minimizer.
    """
    A, z, q = problem.A, problem.z, problem.q
    if not 0 < q < 1:
        raise InputError("IRLS path needs 0 < q < 1")
    if problem.eps != 0:
        raise InputError("IRLS path needs eps = 0")
    m, n = A.shape
    if numerical_rank(A) < m:
        raise InputError("IRLS needs A with full row rank")

    def weighted_min_norm(dinv):
        # argmin sum y_i^2 / dinv_i  subject to  A y = z
        AD = A * dinv
        return dinv * (A.T @ np.linalg.solve(AD @ A.T, z))

    y = weighted_min_norm(np.ones(n))
    mu = smoothing_start
    total = 0
    for _ in range(max_epochs):
        for _ in range(inner_iter):
            total += 1
            dinv = (y * y + mu * mu) ** (1.0 - q / 2.0)
            y_new = weighted_min_norm(dinv)
            change = np.max(np.abs(y_new - y))
            y = y_new
            if change <= tol * max(1.0, np.max(np.abs(y))):
                break
        if mu <= smoothing_floor:
            return _result(problem, y, False, "converged", total)
        mu = max(mu * smoothing_factor, smoothing_floor)
    return _result(problem, y, False, "iteration_limit", total)


def sparse_oracle(problem: RecoveryProblem, k: int, max_subproblems: int = 10**6):
    """Brute force over supports ``|S| <= k``: least squares on each support,
    keep the feasible candidate of smallest ``||y||_q^q``.

    Returns ``(y, objective)`` or ``None`` when no candidate is feasible.
    """
    A, z = problem.A, problem.z
    n = A.shape[1]
    if not 0 <= k <= n:
        raise InputError("k must lie in [0, n]")
    count = sum(math.comb(n, j) for j in range(k + 1))
    if count > max_subproblems:
        raise InputError(f"{count} supports exceed the cap {max_subproblems}")
    best = None
    for size in range(k + 1):
        for S in itertools.combinations(range(n), size):
            y = np.zeros(n)
            if size:
                idx = list(S)
                y[idx] = np.linalg.lstsq(A[:, idx], z, rcond=None)[0]
            if problem.residual(y) > problem.eps + 1e-9:
                continue
            obj = lq_power(y, problem.q)
            if best is None or obj < best[1] - 1e-15:
                best = (y, obj)
    return best


def recover(problem: RecoveryProblem) -> RecoveryResult:
    """Dispatch to the solver matching the problem's exponents."""
    if problem.q < 1:
        return solve_lq_irls(problem)
    if problem.p == 2 and problem.eps > 0:
        return solve_l1_l2(problem)
    return solve_l1(problem)
