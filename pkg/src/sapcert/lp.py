"""Two-phase revised simplex with Dantzig pricing and a Bland anti-cycling fallback.

Problems are stated as::

    minimize    c @ x
    subject to  A_eq @ x == b_eq
                A_ub @ x <= b_ub
                lower <= x <= upper

and converted internally to standard form (``x >= 0``, equalities only).
Degenerate problems are common here (tied magnitudes in l1 lifts), which is
why pricing falls back to the smallest-index rule when pivots stall, and
leaving ties always go to the smallest basic index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = ["LinearProgram", "LpSolution", "solve_lp", "FEAS_TOL"]

FEAS_TOL = 1e-8
_PIVOT_TOL = 1e-10
_COST_TOL = 1e-10
_REFRESH_EVERY = 30
_DEGENERATE_LIMIT = 20


@dataclass
class LinearProgram:
    objective: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if n == 0:
            raise InputError("LP needs at least one variable")
        self.A_eq, self.b_eq = _constraint_pair(self.A_eq, self.b_eq, n, "equality")
        self.A_ub, self.b_ub = _constraint_pair(self.A_ub, self.b_ub, n, "inequality")
        self.lower = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise InputError("bounds must not be NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise InputError("lower bound +inf or upper bound -inf")
        for arr in (self.objective, self.A_eq, self.b_eq, self.A_ub, self.b_ub):
            if not np.all(np.isfinite(arr)):
                raise InputError("LP data must be finite")

    @property
    def n_vars(self) -> int:
        return self.objective.size


def _constraint_pair(A, b, n, kind):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[1] != n or A.shape[0] != b.size:
        raise InputError(f"{kind} constraints have inconsistent shapes {A.shape} / {b.shape}")
    return A, b


@dataclass
class LpSolution:
    status: str
    point: np.ndarray | None = None
    objective_value: float = float("nan")
    iterations: int = 0
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass
class _Standard:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    const: float
    # x = offset + recover @ xs (slack columns carry zero weight)
    offset: np.ndarray
    recover: np.ndarray
    slack_rows: dict = field(default_factory=dict)


def _to_standard(lp: LinearProgram) -> _Standard:
    n = lp.n_vars
    lo, up = lp.lower, lp.upper
    cols = []  # (var index, sign) for each structural std column
    offset = np.zeros(n)
    bound_rows = []  # (std column, width) for finite two-sided bounds
    for j in range(n):
        if np.isfinite(lo[j]):
            offset[j] = lo[j]
            cols.append((j, 1.0))
            if np.isfinite(up[j]):
                if up[j] < lo[j]:
                    raise InputError(f"variable {j} has lower > upper")
                bound_rows.append((len(cols) - 1, up[j] - lo[j]))
        elif np.isfinite(up[j]):
            offset[j] = up[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    ns = len(cols)
    recover = np.zeros((n, ns))
    for k, (j, sgn) in enumerate(cols):
        recover[j, k] = sgn

    A_eq = lp.A_eq @ recover
    b_eq = lp.b_eq - lp.A_eq @ offset
    A_ub = lp.A_ub @ recover
    b_ub = lp.b_ub - lp.A_ub @ offset
    if bound_rows:
        extra = np.zeros((len(bound_rows), ns))
        for r, (k, _) in enumerate(bound_rows):
            extra[r, k] = 1.0
        A_ub = np.vstack([A_ub, extra])
        b_ub = np.concatenate([b_ub, [w for _, w in bound_rows]])

    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    A = np.zeros((m_eq + m_ub, ns + m_ub))
    A[:m_eq, :ns] = A_eq
    A[m_eq:, :ns] = A_ub
    A[m_eq:, ns:] = np.eye(m_ub)
    b = np.concatenate([b_eq, b_ub])
    c = np.concatenate([recover.T @ lp.objective, np.zeros(m_ub)])
    slack_rows = {m_eq + i: ns + i for i in range(m_ub)}
    recover_full = np.hstack([recover, np.zeros((n, m_ub))])
    return _Standard(A, b, c, float(lp.objective @ offset), offset, recover_full, slack_rows)


class _Revised:
    """Revised simplex state: original data plus the list of basic columns.

    Every iteration recomputes the basic solution, duals and entering
    direction from the original matrix, so rounding error cannot build up
    across pivots the way it does in a dense tableau.
    """

    def __init__(self, A, b, cost, basis):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.cost = np.asarray(cost, dtype=float)
        self.basis = list(basis)

    def basic_values(self):
        if not self.basis:
            return np.zeros(0)
        return np.linalg.solve(self.A[:, self.basis], self.b)

    def objective(self):
        return float(self.cost[self.basis] @ self.basic_values()) if self.basis else 0.0

    def run(self, allowed: np.ndarray, max_iter: int) -> tuple[str, int]:
        """Simplex iterations; ``allowed`` masks columns that may enter.

        Pricing is Dantzig's most-negative rule until a run of degenerate
        pivots is seen, then Bland's smallest-index rule (which cannot
        cycle) until the objective moves again. The basis inverse is kept
        by rank-one updates and recomputed from scratch periodically and
        before any terminal decision.
        """
        A, c = self.A, self.cost
        m = len(self.basis)
        if m == 0:
            return ("unbounded" if np.any((c < -_COST_TOL) & allowed) else "optimal"), 0
        scale = max(1.0, np.abs(c).max(initial=0.0))
        Binv = np.linalg.inv(A[:, self.basis])
        since_refresh = 0
        degenerate_run = 0
        fresh = True
        for it in range(max_iter):
            if since_refresh >= _REFRESH_EVERY:
                Binv = np.linalg.inv(A[:, self.basis])
                since_refresh, fresh = 0, True
            xb = np.maximum(Binv @ self.b, 0.0)
            d = c - (c[self.basis] @ Binv) @ A
            d[self.basis] = 0.0
            cand = np.flatnonzero((d < -_COST_TOL * scale) & allowed)
            if cand.size == 0:
                if not fresh:
                    since_refresh = _REFRESH_EVERY
                    continue
                return "optimal", it
            bland = degenerate_run >= _DEGENERATE_LIMIT
            e = cand[0] if bland else cand[np.argmin(d[cand])]
            colv = Binv @ A[:, e]
            pos = np.flatnonzero(colv > _PIVOT_TOL)
            if pos.size == 0:
                if not fresh:
                    since_refresh = _REFRESH_EVERY
                    continue
                return "unbounded", it
            ratios = xb[pos] / colv[pos]
            rmin = ratios.min()
            tied = pos[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
            r = min(tied, key=lambda i: self.basis[i])
            degenerate_run = degenerate_run + 1 if rmin <= 1e-12 else 0
            self.basis[r] = e
            # rank-one update of the basis inverse
            piv = colv[r]
            row_r = Binv[r] / piv
            Binv -= np.outer(colv, row_r)
            Binv[r] = row_r
            since_refresh += 1
            fresh = False
        return "iteration_limit", max_iter


def solve_lp(lp: LinearProgram, max_iter: int = 20000) -> LpSolution:
    """Solve ``lp`` by two-phase revised simplex.

    The status is one of ``optimal``, ``infeasible``, ``unbounded`` or
    ``iteration_limit``; a point is returned only when optimal.
    """
    std = _to_standard(lp)
    A, b, c = std.A.copy(), std.b.copy(), std.c
    m, N = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0

    basis = []
    art_rows = []
    for i in range(m):
        k = std.slack_rows.get(i)
        if k is not None and not flip[i]:
            basis.append(k)
        else:
            basis.append(N + len(art_rows))
            art_rows.append(i)
    n_art = len(art_rows)
    A1 = np.zeros((m, N + n_art))
    A1[:, :N] = A
    for a, i in enumerate(art_rows):
        A1[i, N + a] = 1.0

    iters = 0
    rows = list(range(m))
    if n_art:
        cost1 = np.concatenate([np.zeros(N), np.ones(n_art)])
        ph1 = _Revised(A1, b, cost1, basis)
        status, it = ph1.run(np.ones(N + n_art, dtype=bool), max_iter)
        iters += it
        if status == "iteration_limit":
            return LpSolution("iteration_limit", iterations=iters, message="phase 1 iteration cap")
        infeas = ph1.objective()
        if infeas > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return LpSolution("infeasible", iterations=iters,
                              message=f"phase 1 optimum {infeas:.3e} > 0")
        # drive remaining artificials out of the basis; drop redundant rows
        basis = list(ph1.basis)
        drop = []
        for pos_i in range(m):
            j = basis[pos_i]
            if j < N:
                continue
            Binv_row = np.linalg.solve(A1[:, basis].T, np.eye(m)[pos_i])
            row = Binv_row @ A
            row[[k for k in basis if k < N]] = 0.0
            nz = np.flatnonzero(np.abs(row) > 1e-9)
            if nz.size:
                basis[pos_i] = int(nz[0])
            else:
                drop.append(pos_i)
        for pos_i in drop:
            # the artificial's own row is a combination of the others
            art_row = art_rows[basis[pos_i] - N]
            rows.remove(art_row)
        basis = [j for k, j in enumerate(basis) if k not in drop]
        A, b = A[rows], b[rows]

    ph2 = _Revised(A, b, c, basis)
    status, it = ph2.run(np.ones(N, dtype=bool), max_iter - iters)
    iters += it
    if status != "optimal":
        return LpSolution(status, iterations=iters)

    xs = np.zeros(N)
    if ph2.basis:
        xs[ph2.basis] = ph2.basic_values()
    xs = np.maximum(xs, 0.0)
    x = std.offset + std.recover @ xs
    return LpSolution("optimal", x, float(lp.objective @ x), iters)
