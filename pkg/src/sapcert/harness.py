"""Experiment orchestration: build a matrix, certify it, recover signals, compare bounds.

Every trial draws a signal, adds noise of exact lp norm eps, solves the
recovery problem and checks the observed error against each recovery
bound that an available certificate supports.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .certify import (
    MAX_SUBPROBLEMS,
    SapCertificate,
    convert_certificate,
    min_right_inverse_l1,
    nsp_constant_l1,
    rip_constant,
    sap_from_nsp,
    sap_from_rip,
)
from .errors import InputError
from .expander import corollary1_bound, expansion_alpha, random_left_regular, sap_constants_expander
from .linalg import as_matrix, numerical_rank
from .recovery import RecoveryProblem, recover
from .signals import SparsityParams, generate_compressible, generate_s_sparse, lq_quasinorm, sigma_s

__all__ = [
    "ExperimentConfig",
    "TrialRow",
    "BoundReport",
    "theorem1_rhs",
    "corollary2_bound",
    "build_matrix",
    "gather_certificates",
    "run_experiment",
    "emit_report",
    "report_to_json",
    "report_from_json",
    "report_to_csv",
    "read_matrix_file",
    "format_matrix",
    "thread_cap",
    "BOUND_TOL",
]

BOUND_TOL = 1e-9
ENSEMBLES = ("gaussian", "orthonormal-rows", "expander", "file")


@dataclass
class ExperimentConfig:
    ensemble: str
    m: int
    n: int
    s: int
    p: float = 1.0
    q: float = 1.0
    r: float = 1.0
    eps_grid: list = field(default_factory=lambda: [0.0])
    trials: int = 10
    seed: int = 0
    output: str | None = None
    signal: str = "sparse"
    decay: float = 1.0
    degree: int = 1
    matching: bool = False
    matrix_path: str | None = None

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise InputError(f"ensemble must be one of {ENSEMBLES}")
        if self.signal not in ("sparse", "compressible"):
            raise InputError("signal must be 'sparse' or 'compressible'")
        SparsityParams(self.s, self.q, self.r, self.p).check_dims(self.m, self.n)
        self.eps_grid = [float(e) for e in self.eps_grid]
        if any(not (math.isfinite(e) and e >= 0) for e in self.eps_grid):
            raise InputError("eps grid entries must be finite and nonnegative")
        if self.trials < 0:
            raise InputError("trial count must be nonnegative")
        if self.ensemble == "file" and not self.matrix_path:
            raise InputError("the file ensemble needs matrix_path")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise InputError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for key in ("p", "r"):
            if isinstance(d.get(key), str) and d[key].lower() in ("inf", "infinity"):
                d[key] = math.inf
        return cls(**d)


@dataclass
class TrialRow:
    trial: int
    seed: int
    eps: float
    sigma: float
    err_r: float
    err_q: float
    solver_status: str
    certified_optimal: bool
    bounds: dict = field(default_factory=dict)  # name -> {"rhs", "observed", "passed"}
    passed: bool = True


@dataclass
class BoundReport:
    config: dict
    certificates: list
    rows: list
    uncertified: bool = False
    notes: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(not r.passed for r in self.rows)

    def summary(self) -> dict:
        ratios = {}
        for row in self.rows:
            for name, b in row.bounds.items():
                if b["rhs"] > 0:
                    ratio = b["observed"] / b["rhs"]
                elif b["observed"] <= BOUND_TOL:
                    ratio = 0.0
                else:
                    ratio = math.inf
                ratios[name] = max(ratios.get(name, 0.0), ratio)
        return {
            "trials": len(self.rows),
            "failures": self.failures,
            "uncertified": self.uncertified,
            "max_ratio": max(ratios.values(), default=None),
            "max_ratio_by_bound": dict(sorted(ratios.items())),
        }

    def to_dict(self):
        return {
            "config": self.config,
            "certificates": self.certificates,
            "rows": [asdict(r) for r in self.rows],
            "uncertified": self.uncertified,
            "notes": list(self.notes),
            "summary": self.summary(),
        }

    @classmethod
    def from_dict(cls, d):
        rows = [TrialRow(**r) for r in d["rows"]]
        return cls(d["config"], d["certificates"], rows, d.get("uncertified", False),
                   list(d.get("notes", [])))


# ---------------------------------------------------------------- bounds

def theorem1_rhs(D: float, beta: float, eps: float, s: int, sigma: float,
                 p: float, q: float, r: float) -> tuple[float, float, float]:
    """Right-hand sides of the three recovery error bounds.

    Returns ``(rhs_r, rhs_q, rhs_qr)``. The first bounds ``||h||_r^q`` and the
    second ``||h||_q^q`` when ``q < r``; the third bounds ``||h||_q^q`` when
    ``q = r``. All three are computed; the caller picks the applicable ones.
    """
    if not D > 0:
        raise InputError("D must be positive")
    if not 0 <= beta < 1:
        raise InputError("beta must lie in [0, 1)")
    inv = lambda t: 0.0 if math.isinf(t) else 1.0 / t  # noqa: E731
    e = (2.0 * eps) ** q
    sq = sigma ** q
    a = (3.0 + beta) * D / (1.0 - beta)
    b = 2.0 * (1.0 + beta) ** 2 / (1.0 - beta)
    rhs_r = a * e + b * s ** (q * inv(r) - 1.0) * sq
    rhs_q = a * s ** (1.0 - q * inv(p)) * e + b * sq
    rhs_qr = 2.0 * D / (1.0 - beta) * e + 2.0 * (1.0 + beta) / (1.0 - beta) * sq
    return rhs_r, rhs_q, rhs_qr


def corollary2_bound(inf_right_inverse: float, gamma: float, eps: float, sigma: float) -> float:
    """l1 error bound from a null space constant below one."""
    if not 0 <= gamma < 1:
        raise InputError("gamma must lie in [0, 1)")
    return 4.0 * inf_right_inverse / (1.0 - gamma) * eps + (2.0 + 2.0 * gamma) / (1.0 - gamma) * sigma


# ---------------------------------------------------------------- matrices

def read_matrix_file(path) -> np.ndarray:
    """Parse the text format: ``m n`` on the first line, then m rows."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_matrix(text)


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    try:
        m, n = (int(t) for t in lines[0])
        rows = [[float(t) for t in ln] for ln in lines[1:]]
    except (ValueError, IndexError) as exc:
        raise InputError(f"malformed matrix text: {exc}") from None
    if len(rows) != m or any(len(r) != n for r in rows):
        raise InputError(f"matrix text does not match its header {m} x {n}")
    return as_matrix(np.array(rows).reshape(m, n))


def format_matrix(A) -> str:
    A = as_matrix(A)
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in A]
    return "\n".join(lines) + "\n"


def build_matrix(cfg: ExperimentConfig):
    """Return ``(A, graph_or_None)`` for the configured ensemble.

    Orthonormal-rows matrices are scaled by ``sqrt(n/m)`` so that columns
    have unit norm on average, which is the normalization the restricted
    isometry constant assumes.
    """
    rng = np.random.default_rng([cfg.seed, 0])
    m, n = cfg.m, cfg.n
    if cfg.ensemble == "gaussian":
        return rng.standard_normal((m, n)) / math.sqrt(m), None
    if cfg.ensemble == "orthonormal-rows":
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        Q *= np.sign(np.diag(R))
        rows = np.sort(rng.choice(n, size=m, replace=False))
        return Q[rows] * math.sqrt(n / m), None
    if cfg.ensemble == "expander":
        G = random_left_regular(n, m, cfg.degree, [cfg.seed, 0], matching=cfg.matching)
        return G.adjacency, G
    A = read_matrix_file(cfg.matrix_path)
    if A.shape != (m, n):
        raise InputError(f"matrix file is {A.shape}, config says {(m, n)}")
    return A, None


def gather_certificates(A, cfg: ExperimentConfig, graph=None) -> tuple[list, dict, list]:
    """Every certificate obtainable at this size.

    Returns ``(certificates, extras, notes)`` where certificates are in their
    native exponents and ``extras`` holds the quantities the corollaries use.
    """
    m, n = A.shape
    s = cfg.s
    certs, extras, notes = [], {}, []
    if math.comb(n, 2 * s) <= MAX_SUBPROBLEMS:
        rip = rip_constant(A, 2 * s)
        extras["delta_2s"] = rip.delta
        if rip.delta < 1:
            certs.append(sap_from_rip(rip.delta, s, cfg.q))
        else:
            notes.append(f"delta_2s = {rip.delta:.6g}: no restricted isometry transfer")
    else:
        notes.append("too many supports for an exhaustive restricted isometry constant")
    full_rank = numerical_rank(A) == m
    if cfg.q == 1 and full_rank and math.comb(n, s) * 2 ** (s - 1) <= MAX_SUBPROBLEMS:
        gamma = nsp_constant_l1(A, s)
        extras["gamma_s"] = gamma.gamma
        if math.isfinite(gamma.gamma):
            R = min_right_inverse_l1(A)
            extras["inf_right_inverse_l1"] = R
            certs.append(sap_from_nsp(A, gamma, R))
    elif not full_rank:
        notes.append("matrix is rank deficient: null space transfer skipped")
    if graph is not None:
        exp = expansion_alpha(graph, 2 * s)
        extras["alpha_star"] = exp.alpha_star
        extras["degree"] = graph.left_degree
        if exp.alpha_star < 0.25:
            certs.append(sap_constants_expander(graph.left_degree, exp.alpha_star, s))
        else:
            notes.append(f"alpha* = {exp.alpha_star:.6g} >= 1/4: no expander certificate")
    return certs, extras, notes


# ---------------------------------------------------------------- trials

def thread_cap() -> int:
    """Worker count from ``SAP_THREADS`` (default 1)."""
    raw = os.environ.get("SAP_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise InputError(f"SAP_THREADS must be an integer, got {raw!r}") from None
    if k < 1:
        raise InputError("SAP_THREADS must be at least 1")
    return k


def _noise(rng, m: int, p: float, eps: float) -> np.ndarray:
    """Uniform direction on the lp sphere (cone measure), scaled to norm eps."""
    if eps == 0:
        return np.zeros(m)
    if math.isinf(p):
        g = rng.uniform(-1.0, 1.0, m)
    else:
        g = rng.gamma(1.0 / p, 1.0, m) ** (1.0 / p) * rng.choice([-1.0, 1.0], m)
    return g * (eps / lq_quasinorm(g, p))


def _bound_checks(cfg, eps, sigma, err_r, err_q, usable, extras):
    out = {}
    q, r = cfg.q, cfg.r
    for cert in usable:
        rhs_r, rhs_q, rhs_qr = theorem1_rhs(cert.D, cert.beta, eps, cfg.s, sigma, cfg.p, q, r)
        tag = cert.provenance
        if q < r:
            out[f"{tag}:thm1_r"] = (rhs_r, err_r ** q)
            out[f"{tag}:thm1_q"] = (rhs_q, err_q ** q)
        else:
            out[f"{tag}:thm1_qr"] = (rhs_qr, err_q ** q)
    if cfg.p == 1 and q == 1:
        a = extras.get("alpha_star")
        if a is not None and a < 1.0 / 6.0:
            out["expander:cor1"] = (corollary1_bound(extras["degree"], a, eps, sigma), err_q)
        g = extras.get("gamma_s")
        if g is not None and g < 1:
            out["nsp-transfer:cor2"] = (corollary2_bound(extras["inf_right_inverse_l1"], g, eps, sigma), err_q)
    return {k: {"rhs": float(v[0]), "observed": float(v[1]),
                "passed": bool(v[1] <= v[0] + BOUND_TOL)} for k, v in out.items()}


def _run_trial(A, cfg, index, eps, usable, extras):
    seed = int(np.random.SeedSequence([cfg.seed, 1, index]).generate_state(1)[0])
    rng = np.random.default_rng(seed)
    n = A.shape[1]
    if cfg.signal == "sparse":
        x = generate_s_sparse(n, cfg.s, rng)
    else:
        x = generate_compressible(n, cfg.decay, rng)
    z = A @ x + _noise(rng, A.shape[0], cfg.p, eps)
    res = recover(RecoveryProblem(A, z, eps, cfg.p, cfg.q))
    h = res.solution - x
    sigma = sigma_s(x, cfg.s, cfg.q)
    err_r, err_q = lq_quasinorm(h, cfg.r), lq_quasinorm(h, cfg.q)
    bounds = _bound_checks(cfg, eps, sigma, err_r, err_q, usable, extras)
    passed = all(b["passed"] for b in bounds.values())
    return TrialRow(index, seed, eps, sigma, err_r, err_q, res.status, res.certified_optimal,
                    bounds, passed)


def run_experiment(cfg: ExperimentConfig, A=None, graph=None) -> BoundReport:
    """Run ``cfg.trials`` signals for every eps in the grid.

    One row is produced per (signal, eps) pair, ordered by trial index. A
    prebuilt matrix can be passed in ``A`` (``graph`` for expanders).
    """
    if A is None:
        A, graph = build_matrix(cfg)
    A = as_matrix(A)
    if A.shape != (cfg.m, cfg.n):
        raise InputError(f"matrix is {A.shape}, config says {(cfg.m, cfg.n)}")
    certs, extras, notes = gather_certificates(A, cfg, graph)
    cert_dicts, usable = [], []
    for cert in certs:
        entry = cert.to_dict()
        if cert.q == cfg.q:
            conv = convert_certificate(cert, cfg.m, p=cfg.p, r=cfg.r)
            entry["converted"] = {"p": conv.p, "r": conv.r, "D": conv.D, "beta": conv.beta}
            entry["usable"] = conv.beta < 1
            if conv.beta < 1:
                usable.append(conv)
        else:
            entry["usable"] = False
        cert_dicts.append(entry)
    has_cor = cfg.p == 1 and cfg.q == 1 and (
        extras.get("alpha_star", 1.0) < 1.0 / 6.0 or extras.get("gamma_s", 1.0) < 1)
    uncertified = not usable and not has_cor
    if uncertified:
        notes.append("uncertified: no certificate with beta < 1; bounds skipped")
    jobs = [(t * len(cfg.eps_grid) + k, eps)
            for t in range(cfg.trials) for k, eps in enumerate(cfg.eps_grid)]
    workers = min(thread_cap(), max(1, len(jobs)))
    if workers == 1:
        rows = [_run_trial(A, cfg, i, e, usable, extras) for i, e in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda j: _run_trial(A, cfg, j[0], j[1], usable, extras), jobs))
    rows.sort(key=lambda r: r.trial)
    extras_clean = {k: float(v) for k, v in extras.items()}
    notes.append("extras: " + json.dumps(extras_clean, sort_keys=True))
    return BoundReport(cfg.to_dict(), cert_dicts, rows, uncertified, notes)


# ---------------------------------------------------------------- output

def report_to_json(report: BoundReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)


def report_from_json(text: str) -> BoundReport:
    return BoundReport.from_dict(json.loads(text))


def report_to_csv(report: BoundReport) -> str:
    names = sorted({k for row in report.rows for k in row.bounds})
    base = ["trial", "seed", "eps", "sigma", "err_r", "err_q", "solver_status",
            "certified_optimal", "passed"]
    header = base + [f"{n}:{f}" for n in names for f in ("rhs", "observed", "passed")]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in report.rows:
        vals = [row.trial, row.seed, repr(row.eps), repr(row.sigma), repr(row.err_r),
                repr(row.err_q), row.solver_status, row.certified_optimal, row.passed]
        for n in names:
            b = row.bounds.get(n)
            vals += ["", "", ""] if b is None else [repr(b["rhs"]), repr(b["observed"]), b["passed"]]
        w.writerow(vals)
    return buf.getvalue()


def emit_report(report: BoundReport, path, fmt: str = "json") -> None:
    """Write the report as JSON or CSV."""
    if fmt not in ("json", "csv"):
        raise InputError("format must be json or csv")
    text = report_to_json(report) if fmt == "json" else report_to_csv(report)
    with open(path, "w") as fh:
        fh.write(text)
