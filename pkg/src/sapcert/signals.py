"""Signals, lq quasi-norms, best s-term approximation and block partitions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "SparsityParams",
    "BlockPartition",
    "as_signal",
    "lq_quasinorm",
    "lq_power",
    "top_s_indices",
    "best_s_term",
    "sigma_s",
    "greedy_block_partition",
    "generate_s_sparse",
    "generate_compressible",
    "format_signal",
    "parse_signal",
]


@dataclass(frozen=True)
class SparsityParams:
    """Order ``s`` and the exponents used by the approximation inequality.

    ``q`` is the objective exponent, ``r`` the exponent on the kept part,
    ``p`` the residual exponent.
    """

    s: int
    q: float = 1.0
    r: float = 1.0
    p: float = 1.0

    def __post_init__(self):
        if self.s < 1:
            raise InputError("s must be a positive integer")
        if not 0 < self.q <= 1:
            raise InputError("q must lie in (0, 1]")
        if self.r < self.q:
            raise InputError("r must satisfy r >= q")
        if self.p <= 0:
            raise InputError("p must be positive")

    def check_dims(self, m: int, n: int) -> None:
        if not 2 * self.s <= m <= n:
            raise InputError(f"need 2s <= m <= n, got s={self.s}, m={m}, n={n}")


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, j):
        return self.blocks[j]


def as_signal(x, name: str = "x") -> np.ndarray:
    v = np.array(x, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def lq_quasinorm(x, q: float) -> float:
    """``(sum |x_i|^q)^(1/q)``, or ``max |x_i|`` for ``q = inf``."""
    if not q > 0:
        raise InputError("q must be positive")
    a = np.abs(as_signal(x))
    if a.size == 0:
        return 0.0
    if np.isinf(q):
        return float(a.max())
    if q == 1:
        return float(a.sum())
    if q == 2:
        return float(np.sqrt(a @ a))
    return float(np.sum(a ** q) ** (1.0 / q))


def lq_power(x, q: float) -> float:
    """``||x||_q^q`` computed without the outer root (exact for sums of powers)."""
    a = np.abs(as_signal(x))
    if np.isinf(q):
        raise InputError("lq_power needs finite q")
    return float(np.sum(a ** q)) if q != 1 else float(a.sum())


def top_s_indices(x, s: int) -> np.ndarray:
    """Indices of the ``s`` largest magnitudes, ties broken towards lower index."""
    a = np.abs(np.asarray(x, dtype=float))
    order = np.lexsort((np.arange(a.size), -a))
    return np.sort(order[:s])


def best_s_term(x, s: int, q: float = 1.0) -> tuple[np.ndarray, float]:
    """Best s-term approximation ``x_s`` and the error ``sigma_{s,q}(x)``.

    The kept set depends only on the magnitude ordering, so it is the same
    for every exponent.
    """
    x = as_signal(x)
    if not 0 <= s <= x.size:
        raise InputError(f"s must lie in [0, {x.size}], got {s}")
    xs = np.zeros_like(x)
    keep = top_s_indices(x, s)
    xs[keep] = x[keep]
    return xs, lq_quasinorm(x - xs, q)


def sigma_s(x, s: int, q: float = 1.0) -> float:
    return best_s_term(x, s, q)[1]


def greedy_block_partition(h, s: int, S0) -> BlockPartition:
    """Split ``{0..n-1}`` into ``S0`` followed by blocks of the ``s`` largest
    remaining magnitudes of ``h``, then the next ``s``, and so on."""
    h = as_signal(h, "h")
    S0 = tuple(sorted(int(i) for i in S0))
    if len(S0) > s:
        raise InputError("|S0| must not exceed s")
    if s < 1:
        raise InputError("s must be positive")
    rest = np.setdiff1d(np.arange(h.size), S0)
    a = np.abs(h[rest])
    rest = rest[np.lexsort((rest, -a))]
    blocks = [S0]
    for start in range(0, rest.size, s):
        blocks.append(tuple(sorted(int(i) for i in rest[start:start + s])))
    return BlockPartition(tuple(blocks))


def generate_s_sparse(n: int, s: int, seed, magnitude_range=(1.0, 2.0)) -> np.ndarray:
    """Random s-sparse vector: uniform support, uniform magnitudes, random signs."""
    if not 0 <= s <= n:
        raise InputError("need 0 <= s <= n")
    lo, hi = magnitude_range
    if not 0 <= lo <= hi:
        raise InputError("magnitude_range must satisfy 0 <= lo <= hi")
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    support = rng.choice(n, size=s, replace=False)
    x[support] = rng.uniform(lo, hi, s) * rng.choice([-1.0, 1.0], s)
    return x


def generate_compressible(n: int, decay: float, seed) -> np.ndarray:
    """Vector whose sorted magnitudes are ``k^(-decay)``, k = 1..n, with
    random signs and a random permutation."""
    if not decay > 0:
        raise InputError("decay must be positive")
    rng = np.random.default_rng(seed)
    mags = np.arange(1, n + 1, dtype=float) ** (-decay)
    return rng.permutation(mags) * rng.choice([-1.0, 1.0], n)


def format_signal(x) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(x, dtype=float).ravel())


def parse_signal(text: str) -> np.ndarray:
    try:
        return as_signal([float(t) for t in text.split()])
    except ValueError as exc:
        raise InputError(f"could not parse signal: {exc}") from None
