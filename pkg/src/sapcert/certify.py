"""Matrix certificates and the constant transfers between them.

Three families of constants are computed here:

* the restricted isometry constant ``delta_s`` (exhaustive over supports),
* the l1 null space constant ``gamma_s`` (one LP per support and sign pattern),
* sparse approximation pairs ``(D, beta)`` obtained by transfer from either
  of the above, together with sampling checks that try to falsify them.

A sparse approximation certificate asserts, for all x,

    ||x_s||_r^q <= D ||A x||_p^q + beta * s^(q/r - 1) * sigma_{s,q}(x)^q .
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError
from .linalg import as_matrix, batched_gram_extremes, null_space_basis, numerical_rank, svd
from .lp import LinearProgram, solve_lp
from .recovery import RecoveryProblem, solve_l1

__all__ = [
    "RipCertificate",
    "NspCertificate",
    "SapCertificate",
    "CheckReport",
    "MAX_SUBPROBLEMS",
    "rip_constant",
    "rip_sampled_lower_bound",
    "nsp_constant_l1",
    "nsp_sampled_lower_bound",
    "min_right_inverse_l1",
    "rip_transfer_coefficients",
    "rip_transfer_threshold",
    "sap_from_rip",
    "sap_from_nsp",
    "convert_certificate",
    "sap_terms",
    "verify_sap_inequality",
    "sap_beta_lower_bound",
    "nsp_from_sap_check",
    "lower_frame_check",
    "converse_check",
    "sample_test_vectors",
    "null_vertex_vectors",
]

MAX_SUBPROBLEMS = 10**6
SLACK = 1e-9


@dataclass
class RipCertificate:
    order: int
    delta: float
    method: str
    witness_support: tuple[int, ...] | None = None

    def to_dict(self):
        return {"kind": "rip", "order": self.order, "delta": self.delta, "method": self.method,
                "witness_support": list(self.witness_support) if self.witness_support else None}


@dataclass
class NspCertificate:
    order: int
    q: float
    gamma: float
    method: str
    witness_support: tuple[int, ...] | None = None
    witness_vector: np.ndarray | None = None

    def to_dict(self):
        return {"kind": "nsp", "order": self.order, "q": self.q, "gamma": self.gamma,
                "method": self.method,
                "witness_support": list(self.witness_support) if self.witness_support else None,
                "witness_vector": None if self.witness_vector is None else self.witness_vector.tolist()}


@dataclass
class SapCertificate:
    order: int
    p: float
    q: float
    r: float
    D: float
    beta: float
    provenance: str
    details: dict = field(default_factory=dict)

    PROVENANCES = ("rip-transfer", "nsp-transfer", "expander", "direct-lower-bound")

    def __post_init__(self):
        if self.provenance not in self.PROVENANCES:
            raise InputError(f"unknown provenance {self.provenance!r}")
        if not self.D > 0:
            raise InputError("D must be positive")
        if not self.beta >= 0:
            raise InputError("beta must be nonnegative")

    @property
    def is_transfer(self) -> bool:
        """Whether the constants come from a proven transfer (not a sampled bound)."""
        return self.provenance != "direct-lower-bound"

    def to_dict(self):
        return {"kind": "sap", "order": self.order, "p": self.p, "q": self.q, "r": self.r,
                "D": self.D, "beta": self.beta, "provenance": self.provenance,
                "flagged": not self.is_transfer, "details": dict(self.details)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["order"], d["p"], d["q"], d["r"], d["D"], d["beta"], d["provenance"],
                   dict(d.get("details", {})))


@dataclass
class CheckReport:
    name: str
    passed: bool
    worst_margin: float = float("inf")
    witness: object = None
    detail: str = ""
    evaluated: int = 0

    def __bool__(self):
        return self.passed

    def to_dict(self):
        w = self.witness
        if isinstance(w, np.ndarray):
            w = w.tolist()
        elif isinstance(w, tuple):
            w = list(w)
        return {"name": self.name, "passed": self.passed, "worst_margin": self.worst_margin,
                "witness": w, "detail": self.detail, "evaluated": self.evaluated}


# ---------------------------------------------------------------- helpers

def _supports(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=int)
    return np.array(list(itertools.combinations(range(n), k)), dtype=int).reshape(-1, k)


def _norms(Y: np.ndarray, p: float) -> np.ndarray:
    """Row-wise lp norms (quasi-norms for p < 1)."""
    a = np.abs(Y)
    if np.isinf(p):
        return a.max(axis=1, initial=0.0)
    if p == 1:
        return a.sum(axis=1)
    if p == 2:
        return np.sqrt(np.einsum("ij,ij->i", a, a))
    return np.sum(a ** p, axis=1) ** (1.0 / p)


def _split_top(X: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise (kept part, tail) for the best s-term approximation, ties to lower index."""
    n = X.shape[1]
    order = np.argsort(-np.abs(X), axis=1, kind="stable")
    mask = np.zeros(X.shape, dtype=bool)
    np.put_along_axis(mask, order[:, :min(s, n)], True, axis=1)
    return np.where(mask, X, 0.0), np.where(mask, 0.0, X)


def sap_terms(A, X, s: int, p: float, q: float, r: float):
    """Row-wise ``(||x_s||_r^q, ||A x||_p^q, sigma_{s,q}(x)^q)`` for a batch X."""
    X = np.atleast_2d(X)
    kept, tail = _split_top(X, s)
    return (_norms(kept, r) ** q, _norms(X @ np.asarray(A).T, p) ** q, _norms(tail, q) ** q)


def null_vertex_vectors(N: np.ndarray, count: int, rng) -> np.ndarray:
    """Null space vectors that vanish on ``k - 1`` random coordinates (k = dim N).

    These are the extreme directions of the l1 ratio problems, so they make
    a sharp sampler for null space constants.
    """
    n, k = N.shape
    if k == 0 or count == 0:
        return np.zeros((0, n))
    if k == 1:
        return np.repeat(N.T, count, axis=0)
    Z = np.argsort(rng.random((count, n)), axis=1)[:, :k - 1]
    sub = N[Z]  # (count, k-1, k)
    _, _, vt = np.linalg.svd(sub)
    return vt[:, -1, :] @ N.T


def sample_test_vectors(A, s: int, count: int, seed=0, null_basis=None) -> np.ndarray:
    """Adversarial mix of unit-l2 test vectors for inequality checks.

    Includes dense Gaussians, null space vectors (random and vertex type),
    null vectors plus sparse spikes, sign patterns on random supports and
    power-law compressible vectors.
    """
    A = as_matrix(A)
    m, n = A.shape
    rng = np.random.default_rng(seed)
    N = null_space_basis(A) if null_basis is None else null_basis
    k = N.shape[1]
    parts = []
    share = max(1, count // 6)
    parts.append(rng.standard_normal((share, n)))
    if k:
        parts.append(rng.standard_normal((share, k)) @ N.T)
        parts.append(null_vertex_vectors(N, share, rng))
        spikes = np.zeros((share, n))
        idx = rng.integers(0, n, size=(share, max(1, s)))
        np.put_along_axis(spikes, idx, rng.standard_normal(idx.shape), axis=1)
        base = rng.standard_normal((share, k)) @ N.T
        parts.append(base + spikes * rng.uniform(0, 1, (share, 1)) * _norms(base, 2)[:, None])
    signs = np.zeros((share, n))
    supp = np.argsort(rng.random((share, n)), axis=1)[:, :min(2 * s, n)]
    np.put_along_axis(signs, supp, rng.choice([-1.0, 1.0], supp.shape), axis=1)
    signs += 0.05 * rng.standard_normal((share, n)) * rng.random((share, 1))
    parts.append(signs)
    decay = rng.uniform(0.3, 2.0, (share, 1))
    mags = np.arange(1, n + 1, dtype=float)[None, :] ** (-decay)
    perm = np.argsort(rng.random((share, n)), axis=1)
    comp = np.take_along_axis(mags, perm, axis=1) * rng.choice([-1.0, 1.0], (share, n))
    parts.append(comp)
    X = np.vstack(parts)
    total = X.shape[0]
    if total < count:
        X = np.vstack([X, rng.standard_normal((count - total, n))])
    X = X[:count]
    nrm = _norms(X, 2)
    X = X[nrm > 0] / nrm[nrm > 0, None]
    return X


# ---------------------------------------------------------------- RIP

def rip_constant(A, s: int, max_subproblems: int = MAX_SUBPROBLEMS, samples: int = 20000,
                 seed=0) -> RipCertificate:
    """Restricted isometry constant of order s.

    Exhaustive: ``max_S max(lambda_max - 1, 1 - lambda_min)`` over all
    ``|S| = s`` for the Gram blocks ``A_S^T A_S``. Beyond the cap, random
    supports are scored instead and the result is tagged as a lower bound.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if not 1 <= s <= n:
        raise InputError(f"s must lie in [1, {n}]")
    total = math.comb(n, s)
    if total <= max_subproblems:
        supports = _supports(n, s)
        method = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        supports = np.sort(np.argsort(rng.random((samples, n)), axis=1)[:, :s], axis=1)
        method = "sampled-lower-bound"
    lo, hi = batched_gram_extremes(A, supports)
    dev = np.maximum(hi - 1.0, 1.0 - lo)
    i = int(np.argmax(dev))
    return RipCertificate(s, float(max(dev[i], 0.0)), method, tuple(int(v) for v in supports[i]))


def rip_sampled_lower_bound(A, s: int, samples: int = 10000, seed=0) -> float:
    """``max |(||Ax||^2 / ||x||^2) - 1|`` over random s-sparse Gaussian vectors."""
    A = as_matrix(A)
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    X = np.zeros((samples, n))
    supp = np.argsort(rng.random((samples, n)), axis=1)[:, :s]
    np.put_along_axis(X, supp, rng.standard_normal(supp.shape), axis=1)
    ratio = _norms(X @ A.T, 2) ** 2 / _norms(X, 2) ** 2
    return float(np.max(np.abs(ratio - 1.0)))


# ---------------------------------------------------------------- NSP

def _gamma_lp(Ns: np.ndarray, Nc: np.ndarray, sign: np.ndarray):
    """max sign . (N_S c) subject to ||N_{S^c} c||_1 <= 1, c free."""
    k = Ns.shape[1]
    nc = Nc.shape[0]
    obj = np.concatenate([-(sign @ Ns), np.zeros(nc)])
    I = np.eye(nc)
    A_ub = np.block([[Nc, -I], [-Nc, -I], [np.zeros((1, k)), np.ones((1, nc))]])
    b_ub = np.concatenate([np.zeros(2 * nc), [1.0]])
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(nc)])
    return solve_lp(LinearProgram(obj, A_ub=A_ub, b_ub=b_ub, lower=lower))


def nsp_constant_l1(A, s: int, null_basis: np.ndarray | None = None,
                    max_subproblems: int = MAX_SUBPROBLEMS) -> NspCertificate:
    """Exact l1 null space constant ``gamma_s`` by LP enumeration.

    For each support ``|S| = s`` and sign pattern on S (one of each
    antipodal pair), maximize ``sign . x_S`` over null vectors with
    ``||x_{S^c}||_1 <= 1``. An unbounded LP means a nonzero null vector is
    supported inside S, and ``gamma_s = inf``.
    """
    A = as_matrix(A)
    n = A.shape[1]
    if not 1 <= s <= n:
        raise InputError(f"s must lie in [1, {n}]")
    N = null_space_basis(A) if null_basis is None else np.asarray(null_basis, dtype=float)
    if N.shape[1] == 0:
        return NspCertificate(s, 1.0, 0.0, "exhaustive-lp")
    if s == n:
        return NspCertificate(s, 1.0, np.inf, "exhaustive-lp", tuple(range(n)), N[:, 0].copy())
    n_signs = 2 ** (s - 1)
    total = math.comb(n, s) * n_signs
    if total > max_subproblems:
        raise InputError(f"{total} LPs exceed the cap {max_subproblems}")
    signs = [np.array((1.0,) + rest) for rest in itertools.product((1.0, -1.0), repeat=s - 1)]
    best, best_S, best_x = -np.inf, None, None
    for S in itertools.combinations(range(n), s):
        S = list(S)
        Sc = [i for i in range(n) if i not in S]
        Ns, Nc = N[S], N[Sc]
        for sign in signs:
            sol = _gamma_lp(Ns, Nc, sign)
            if sol.status == "unbounded":
                x = _null_vector_on(N, Sc)
                return NspCertificate(s, 1.0, np.inf, "exhaustive-lp", tuple(S), x)
            if not sol.optimal:
                raise RuntimeError(f"null space LP ended with status {sol.status}")
            val = -sol.objective_value
            if val > best:
                best, best_S = val, tuple(S)
                best_x = N @ sol.point[:N.shape[1]]
    return NspCertificate(s, 1.0, float(max(best, 0.0)), "exhaustive-lp", best_S, best_x)


def _null_vector_on(N, Sc):
    """A null vector vanishing on Sc (exists when the gamma LP is unbounded)."""
    if not Sc:
        return N[:, 0].copy()
    _, _, vt = np.linalg.svd(N[Sc])
    x = N @ vt[-1]
    return x / np.abs(x).max()


def nsp_sampled_lower_bound(A, s: int, q: float = 1.0, samples: int = 100000, seed=0,
                            null_basis=None) -> float:
    """Sampling lower bound for ``gamma_s`` in lq, for any ``0 < q <= 1``.

    Half of the draws are Gaussian null vectors, half are vertex-type null
    vectors; for each, the worst support is its top-s set.
    """
    A = as_matrix(A)
    N = null_space_basis(A) if null_basis is None else null_basis
    if N.shape[1] == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    half = samples // 2
    X = np.vstack([rng.standard_normal((samples - half, N.shape[1])) @ N.T,
                   null_vertex_vectors(N, half, rng)])
    kept, tail = _split_top(X, s)
    num = _norms(kept, q) ** q
    den = _norms(tail, q) ** q
    scale = _norms(X, np.inf)
    zero_tail = den <= 1e-12 * np.maximum(scale, 1e-300) ** q
    if np.any(zero_tail & (num > 1e-12)):
        return np.inf
    ok = ~zero_tail
    return float(np.max(num[ok] / den[ok], initial=0.0))


def min_right_inverse_l1(A) -> float:
    """``inf ||R||_{1->1}`` over right inverses of a full-row-rank A.

    Columns decouple: the value is ``max_i min { ||r||_1 : A r = e_i }``.
    """
    A = as_matrix(A)
    m = A.shape[0]
    if numerical_rank(A) < m:
        raise InputError("min_right_inverse_l1 needs A with full row rank")
    best = 0.0
    for i in range(m):
        e = np.zeros(m)
        e[i] = 1.0
        res = solve_l1(RecoveryProblem(A, e, 0.0, 1.0))
        if res.status != "optimal":
            raise RuntimeError(f"right-inverse LP ended with status {res.status}")
        best = max(best, res.objective)
    return best


# ---------------------------------------------------------------- transfers

def rip_transfer_coefficients(delta: float) -> tuple[float, float]:
    """Squared-form constants ``(C1, C2)`` with
    ``||x||_2^2 <= C1 ||Ax||_2^2 + C2 s^(1-2/q) sigma_{s,q}(x)^2`` under
    ``delta_2s = delta``."""
    if not 0 <= delta < 1:
        raise InputError("delta must lie in [0, 1)")
    a = math.sqrt(1.0 + delta) + math.sqrt(2.0 * delta)
    c1 = a / ((1.0 - delta) * math.sqrt(1.0 + delta))
    c2 = (a / (1.0 - delta)) ** 2 * delta
    return c1, c2


def rip_transfer_threshold(lo: float = 0.0, hi: float = 1.0 - 1e-12, tol: float = 1e-14) -> float:
    """The ``delta`` at which the transferred beta reaches 1, by bisection on C2."""
    f = lambda d: rip_transfer_coefficients(d)[1] - 1.0  # noqa: E731
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise InputError("bracket does not contain the threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sap_from_rip(delta_2s: float, s: int, q: float = 1.0) -> SapCertificate:
    """Certificate with ``p = r = 2`` from the restricted isometry constant of order 2s.

    ``D = C1^(q/2)`` and ``beta = C2^(q/2)``; the passage from the squared
    form uses ``||x_s||_2 <= ||x||_2`` and subadditivity of ``t -> t^(q/2)``.
    """
    if not 0 <= delta_2s < 1:
        raise InputError("delta_2s must lie in [0, 1)")
    if not 0 < q <= 1:
        raise InputError("q must lie in (0, 1]")
    c1, c2 = rip_transfer_coefficients(delta_2s)
    return SapCertificate(s, 2.0, q, 2.0, c1 ** (q / 2), c2 ** (q / 2), "rip-transfer",
                          {"delta_2s": delta_2s, "C1": c1, "C2": c2})


def sap_from_nsp(A, cert: NspCertificate, inf_right_inverse: float | None = None) -> SapCertificate | None:
    """Certificate with ``p = q = r`` from the null space constant.

    ``D = max(1, gamma) * inf_R ||R||_{q->q}^q`` and ``beta = gamma``. Only
    q = 1 is available, where the infimum is an LP. Returns ``None`` when
    gamma is infinite.
    """
    if cert.q != 1:
        raise InputError("only the q = 1 transfer is implemented")
    if not np.isfinite(cert.gamma):
        return None
    R = min_right_inverse_l1(A) if inf_right_inverse is None else inf_right_inverse
    D = max(1.0, cert.gamma) * R
    return SapCertificate(cert.order, 1.0, 1.0, 1.0, D, cert.gamma, "nsp-transfer",
                          {"gamma": cert.gamma, "inf_right_inverse_l1": R})


def convert_certificate(cert: SapCertificate, m: int, p: float | None = None,
                        r: float | None = None) -> SapCertificate:
    """Re-express a certificate for other exponents by norm equivalence.

    Changing p uses ``||y||_p0 <= m^(1/p0 - 1/p1) ||y||_p1`` on R^m (factor 1
    when p0 >= p1). Lowering r costs ``s^(q/r1 - q/r0)`` on D; raising r
    costs ``s^(q/r0 - q/r1)`` on beta.
    """
    p1 = cert.p if p is None else p
    r1 = cert.r if r is None else r
    if r1 < cert.q:
        raise InputError("r must be at least q")
    q, s = cert.q, cert.order
    D, beta = cert.D, cert.beta
    inv = lambda t: 0.0 if np.isinf(t) else 1.0 / t  # noqa: E731
    if p1 != cert.p and cert.p < p1:
        D *= float(m) ** (q * (inv(cert.p) - inv(p1)))
    if r1 < cert.r:
        D *= float(s) ** (q * (inv(r1) - inv(cert.r)))
    elif r1 > cert.r:
        beta *= float(s) ** (q * (inv(cert.r) - inv(r1)))
    details = dict(cert.details)
    details["converted_from"] = {"p": cert.p, "r": cert.r, "D": cert.D, "beta": cert.beta}
    return replace(cert, p=p1, r=r1, D=D, beta=beta, details=details)


# ---------------------------------------------------------------- checks

def verify_sap_inequality(A, cert: SapCertificate, X=None, samples: int = 10000,
                          seed=0) -> CheckReport:
    """Evaluate the certificate inequality on test vectors; fail with the worst witness."""
    A = as_matrix(A)
    if X is None:
        X = sample_test_vectors(A, cert.order, samples, seed)
    X = np.atleast_2d(X)
    s, q, r = cert.order, cert.q, cert.r
    kept, ax, tail = sap_terms(A, X, s, cert.p, q, r)
    rhs = cert.D * ax + cert.beta * s ** (q / r - 1.0) * tail
    margin = rhs - kept
    tol = SLACK * np.maximum(1.0, kept)
    i = int(np.argmin(margin + tol))
    ok = bool(np.all(margin >= -tol))
    return CheckReport("sap-inequality", ok, float(margin[i]), X[i].copy(),
                       f"D={cert.D:.6g}, beta={cert.beta:.6g}", len(X))


def sap_beta_lower_bound(A, s: int, p: float, q: float, r: float, D: float,
                         samples: int = 20000, seed=0, return_witness: bool = False):
    """Largest beta forced by sampled vectors for a fixed D.

    Returns ``inf`` when an s-sparse null space vector exists, since the
    inequality then fails for every beta.
    """
    A = as_matrix(A)
    if not D > 0:
        raise InputError("D must be positive")
    n = A.shape[1]
    s_eff = min(s, n)
    if math.comb(n, s_eff) <= MAX_SUBPROBLEMS:
        lo, _ = batched_gram_extremes(A, _supports(n, s_eff))
        smax = svd(A).singular_values[0]
        if np.min(lo) <= (1e-10 * max(smax, 1e-300)) ** 2 or smax == 0:
            j = int(np.argmin(lo))
            S = tuple(int(v) for v in _supports(n, s_eff)[j])
            return (np.inf, S) if return_witness else np.inf
    X = sample_test_vectors(A, s, samples, seed)
    kept, ax, tail = sap_terms(A, X, s, p, q, r)
    ok = tail > 1e-14
    if not np.any(ok):
        return (0.0, None) if return_witness else 0.0
    vals = (kept[ok] - D * ax[ok]) / (s ** (q / r - 1.0) * tail[ok])
    j = int(np.argmax(vals))
    best = float(max(vals[j], 0.0))
    return (best, X[ok][j].copy()) if return_witness else best


def nsp_from_sap_check(A, cert: SapCertificate, samples: int = 10000, seed=0,
                       gamma: NspCertificate | None = None) -> CheckReport:
    """Check that the null space constant does not exceed the certificate's beta.

    Sampled null vectors are tested against their worst support (the top-s
    set, which dominates every ``|S| <= s``); for q = 1 the exact LP value
    of ``gamma_s`` is compared as well.
    """
    A = as_matrix(A)
    N = null_space_basis(A)
    if N.shape[1] == 0:
        return CheckReport("nsp-from-sap", True, float("inf"), None, "trivial null space", 0)
    rng = np.random.default_rng(seed)
    half = samples // 2
    X = np.vstack([rng.standard_normal((samples - half, N.shape[1])) @ N.T,
                   null_vertex_vectors(N, half, rng)])
    X /= _norms(X, 2)[:, None]
    kept, tail = _split_top(X, cert.order)
    lhs = _norms(kept, cert.q) ** cert.q
    rhs = cert.beta * _norms(tail, cert.q) ** cert.q
    margin = rhs - lhs
    i = int(np.argmin(margin))
    if margin[i] < -SLACK * max(1.0, lhs[i]):
        return CheckReport("nsp-from-sap", False, float(margin[i]), X[i].copy(),
                           "sampled null vector violates the null space inequality", len(X))
    worst = float(margin[i])
    detail = "sampled null vectors pass"
    if cert.q == 1:
        g = gamma if gamma is not None else nsp_constant_l1(A, cert.order, N)
        gap = cert.beta - g.gamma
        worst = min(worst, gap)
        if not gap >= -SLACK:
            return CheckReport("nsp-from-sap", False, gap, g.witness_vector,
                               f"gamma_s={g.gamma:.10g} exceeds beta={cert.beta:.10g}", len(X))
        detail += f"; gamma_s={g.gamma:.10g} <= beta={cert.beta:.10g}"
    return CheckReport("nsp-from-sap", True, worst, None, detail, len(X))


def _sparse_samples(n: int, k: int, count: int, rng) -> np.ndarray:
    X = np.zeros((count, n))
    supp = np.argsort(rng.random((count, n)), axis=1)[:, :k]
    half = count // 2
    vals = rng.standard_normal(supp.shape)
    vals[:half] = rng.choice([-1.0, 1.0], (half, k))
    np.put_along_axis(X, supp, vals, axis=1)
    return X / _norms(X, 2)[:, None]


def lower_frame_check(A, cert: SapCertificate, samples: int = 10000, seed=0) -> CheckReport:
    """Lower frame bounds implied by a certificate.

    ``(1/D) ||x||_r^q <= ||Ax||_p^q`` on s-sparse x and
    ``((1 - beta) / (2D)) ||x||_r^q <= ||Ax||_p^q`` on 2s-sparse x. With
    ``p = r = 2`` both reduce to ``sigma_min(A_S)^q`` bounds and are checked
    over every support; other exponents are sampled.
    """
    A = as_matrix(A)
    m, n = A.shape
    s, q = cert.order, cert.q
    bounds = [(min(s, n), 1.0 / cert.D, "s-sparse"),
              (min(2 * s, n), (1.0 - cert.beta) / (2.0 * cert.D), "2s-sparse")]
    worst = np.inf
    evaluated = 0
    if cert.p == 2 and cert.r == 2:
        for k, bound, label in bounds:
            if math.comb(n, k) > MAX_SUBPROBLEMS:
                raise InputError(f"C({n},{k}) supports exceed the cap")
            S = _supports(n, k)
            lo, _ = batched_gram_extremes(A, S)
            smin_q = np.sqrt(np.maximum(lo, 0.0)) ** q
            margin = smin_q - bound
            j = int(np.argmin(margin))
            evaluated += len(S)
            worst = min(worst, float(margin[j]))
            if margin[j] < -SLACK:
                return CheckReport("lower-frame", False, float(margin[j]), tuple(int(v) for v in S[j]),
                                   f"{label}: sigma_min^q={smin_q[j]:.10g} < {bound:.10g}", evaluated)
        return CheckReport("lower-frame", True, worst, None, "exhaustive over supports", evaluated)
    rng = np.random.default_rng(seed)
    for k, bound, label in bounds:
        X = _sparse_samples(n, k, samples, rng)
        lhs = bound * _norms(X, cert.r) ** q
        rhs = _norms(X @ A.T, cert.p) ** q
        margin = rhs - lhs
        j = int(np.argmin(margin))
        evaluated += len(X)
        worst = min(worst, float(margin[j]))
        if margin[j] < -SLACK * max(1.0, lhs[j]):
            return CheckReport("lower-frame", False, float(margin[j]), X[j].copy(),
                               f"{label}: sampled vector violates the bound", evaluated)
    return CheckReport("lower-frame", True, worst, None, "sampled", evaluated)


def converse_check(A, B1: float, B2: float, s: int, p: float, q: float,
                   sample_count: int = 10000, seed=0) -> CheckReport:
    """Check ``||x||_p^q <= B1 ||Ax||_p^q + B2 s^(q/p - 1) sigma_{s,q}(x)^q``.

    This is what stable recovery with constants (B1, B2) forces, because
    the zero vector solves the problem with ``z = Ax`` and
    ``eps = ||Ax||_p``.
    """
    A = as_matrix(A)
    if not (B1 > 0 and B2 > 0):
        raise InputError("B1 and B2 must be positive")
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    X = np.vstack([np.zeros((1, n)),
                   sample_test_vectors(A, s, sample_count, seed),
                   _sparse_samples(n, min(s, n), max(1, sample_count // 10), rng)])
    lhs = _norms(X, p) ** q
    ax = _norms(X @ A.T, p) ** q
    _, tail = _split_top(X, s)
    sig = _norms(tail, q) ** q
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    rhs = B1 * ax + B2 * s ** (q * inv_p - 1.0) * sig
    margin = rhs - lhs
    j = int(np.argmin(margin))
    ok = bool(np.all(margin >= -SLACK * np.maximum(1.0, lhs)))
    return CheckReport("converse", ok, float(margin[j]), None if ok else X[j].copy(),
                       f"B1={B1:.6g}, B2={B2:.6g}", len(X))
