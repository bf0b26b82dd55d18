"""Left-regular bipartite graphs as measurement matrices.

A d-left-regular graph with n left and m right vertices gives the 0/1
adjacency matrix Phi (m x n) whose columns each hold d ones. When every
left set of size at most k has at least ``(1 - alpha) d |S|`` neighbours,
Phi satisfies an l1 sparse approximation inequality with constants that
depend only on d and alpha.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .certify import SapCertificate
from .errors import InputError

__all__ = [
    "BipartiteGraph",
    "ExpansionCertificate",
    "random_left_regular",
    "expansion_alpha",
    "sap_constants_expander",
    "corollary1_bound",
    "rip1_deviation",
    "format_graph",
    "parse_graph",
]

ENUMERATION_CAP = 10**7
SIGN_PATTERN_CAP = 2**15


@dataclass(frozen=True)
class BipartiteGraph:
    """Neighbour lists use 0-based right indices internally; the text format is 1-based."""

    left_count: int
    right_count: int
    left_degree: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, m, d = self.left_count, self.right_count, self.left_degree
        if n < 1 or m < 1 or d < 1:
            raise InputError("graph sizes and degree must be positive")
        if len(self.neighbors) != n:
            raise InputError(f"expected {n} neighbour lists, got {len(self.neighbors)}")
        for i, nb in enumerate(self.neighbors):
            if len(nb) != d or len(set(nb)) != d:
                raise InputError(f"left vertex {i} needs {d} distinct neighbours")
            if min(nb) < 0 or max(nb) >= m:
                raise InputError(f"left vertex {i} has a neighbour outside [0, {m})")
            if list(nb) != sorted(nb):
                raise InputError(f"left vertex {i} has an unsorted neighbour list")

    @property
    def adjacency(self) -> np.ndarray:
        Phi = np.zeros((self.right_count, self.left_count))
        for j, nb in enumerate(self.neighbors):
            Phi[list(nb), j] = 1.0
        return Phi


@dataclass(frozen=True)
class ExpansionCertificate:
    checked_size: int
    alpha_star: float
    method: str = "exhaustive"
    witness: tuple[int, ...] | None = None


def random_left_regular(n: int, m: int, d: int, seed, matching: bool = False) -> BipartiteGraph:
    """Random graph where each left vertex picks d distinct right vertices.

    With ``matching=True`` (needs ``d = 1`` and ``n <= m``) the left vertices
    get distinct neighbours, i.e. Phi is a partial permutation.
    """
    if d > m:
        raise InputError(f"degree {d} exceeds right count {m}")
    if n < 1 or d < 1:
        raise InputError("n and d must be positive")
    rng = np.random.default_rng(seed)
    if matching:
        if d != 1 or n > m:
            raise InputError("matching needs d = 1 and n <= m")
        perm = rng.permutation(m)[:n]
        nbrs = tuple((int(v),) for v in perm)
    else:
        nbrs = tuple(tuple(sorted(int(v) for v in rng.choice(m, size=d, replace=False)))
                     for _ in range(n))
    return BipartiteGraph(n, m, d, nbrs)


def expansion_alpha(G: BipartiteGraph, k: int) -> ExpansionCertificate:
    """Smallest alpha with ``|N(S)| >= (1 - alpha) d |S|`` for all ``1 <= |S| <= k``.

    Exhaustive over subsets, with neighbourhoods held as integer bitmasks.
    """
    n, d = G.left_count, G.left_degree
    if k < 1:
        raise InputError("k must be positive")
    k = min(k, n)
    work = sum(math.comb(n, j) * j for j in range(1, k + 1))
    if work > ENUMERATION_CAP:
        raise InputError(f"enumeration work {work} exceeds the cap {ENUMERATION_CAP}")
    masks = [sum(1 << v for v in nb) for nb in G.neighbors]
    worst, witness = 0.0, (0,)
    # alpha for |S| = 1 is always 0, so start at pairs
    for size in range(2, k + 1):
        need = d * size
        for S in itertools.combinations(range(n), size):
            u = 0
            for j in S:
                u |= masks[j]
            a = 1.0 - u.bit_count() / need
            if a > worst:
                worst, witness = a, S
    return ExpansionCertificate(k, worst, "exhaustive", witness)


def sap_constants_expander(d: int, alpha: float, s: int = 1) -> SapCertificate:
    """l1 certificate ``D = 1/(d(1 - 4 alpha))``, ``beta = 2 alpha/(1 - 4 alpha)``."""
    if d < 1:
        raise InputError("d must be positive")
    if not 0 <= alpha < 0.25:
        raise InputError("alpha must lie in [0, 1/4)")
    t = 1.0 - 4.0 * alpha
    return SapCertificate(s, 1.0, 1.0, 1.0, 1.0 / (d * t), 2.0 * alpha / t, "expander",
                          {"d": d, "alpha": alpha})


def corollary1_bound(d: int, alpha: float, eps: float, sigma: float) -> float:
    """``4/(d(1 - 6 alpha)) eps + (2 - 4 alpha)/(1 - 6 alpha) sigma``."""
    if not 0 <= alpha < 1.0 / 6.0:
        raise InputError("alpha must lie in [0, 1/6)")
    if d < 1:
        raise InputError("d must be positive")
    t = 1.0 - 6.0 * alpha
    return 4.0 / (d * t) * eps + (2.0 - 4.0 * alpha) / t * sigma


def rip1_deviation(G: BipartiteGraph, s: int, sample_count: int = 2000, seed=0,
                   max_supports: int = 20000) -> tuple[float, float]:
    """Range of ``||Phi x||_1 / (d ||x||_1)`` over 2s-sparse x.

    Supports are exhaustive when there are at most ``max_supports`` of
    them and sampled otherwise. Per support, sign patterns are enumerated
    when there are at most ``sample_count`` of them (capped at 2^15), else
    sampled; each pattern is tried with equal and with random magnitudes.
    """
    Phi = G.adjacency
    n, d = G.left_count, G.left_degree
    k = min(2 * s, n)
    rng = np.random.default_rng(seed)
    if math.comb(n, k) <= max_supports:
        supports = np.array(list(itertools.combinations(range(n), k)))
    else:
        supports = np.sort(np.argsort(rng.random((max_supports, n)), axis=1)[:, :k], axis=1)
    n_signs = min(2 ** k, SIGN_PATTERN_CAP)
    if 2 ** k <= min(sample_count, SIGN_PATTERN_CAP):
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
    else:
        signs = rng.choice([-1.0, 1.0], (min(sample_count, n_signs), k))
    lo, hi = np.inf, -np.inf
    for S in supports:
        sub = Phi[:, S]
        # equal magnitudes expose exact cancellations; random ones the rest
        X = np.vstack([signs, signs * rng.uniform(0.1, 1.0, signs.shape)])
        ratio = np.abs(X @ sub.T).sum(axis=1) / (d * np.abs(X).sum(axis=1))
        lo, hi = min(lo, float(ratio.min())), max(hi, float(ratio.max()))
    return lo, hi


def format_graph(G: BipartiteGraph) -> str:
    lines = [f"{G.left_count} {G.right_count} {G.left_degree}"]
    lines += [" ".join(str(v + 1) for v in nb) for nb in G.neighbors]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BipartiteGraph:
    rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    try:
        n, m, d = (int(t) for t in rows[0])
        nbrs = tuple(tuple(sorted(int(t) - 1 for t in r)) for r in rows[1:])
    except (ValueError, IndexError) as exc:
        raise InputError(f"malformed graph text: {exc}") from None
    return BipartiteGraph(n, m, d, nbrs)
