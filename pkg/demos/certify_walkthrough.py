"""Walk through certifying a small Gaussian matrix and checking a recovery bound.

Run with ``python demos/certify_walkthrough.py``.
"""
import numpy as np

from sapcert.certify import (
    lower_frame_check,
    min_right_inverse_l1,
    nsp_constant_l1,
    nsp_from_sap_check,
    rip_constant,
    sap_from_nsp,
    verify_sap_inequality,
)
from sapcert.harness import theorem1_rhs
from sapcert.recovery import RecoveryProblem, solve_l1
from sapcert.signals import generate_compressible, sigma_s, lq_quasinorm

rng = np.random.default_rng(0)
A = rng.standard_normal((8, 12)) / np.sqrt(8)
s = 1

# Restricted isometry constants are usually too large at this size to give beta < 1.
print("delta_2 =", round(rip_constant(A, 2 * s).delta, 4))

# The exact l1 null space constant comes from one LP per support and sign pattern.
g = nsp_constant_l1(A, s)
print("gamma_1 =", round(g.gamma, 4), "attained on support", g.witness_support)

# A null space constant below 1 transfers to an l1 certificate with beta = gamma.
cert = sap_from_nsp(A, g, min_right_inverse_l1(A))
print(f"certificate: D = {cert.D:.4f}, beta = {cert.beta:.4f}")
for rep in (verify_sap_inequality(A, cert, samples=2000),
            nsp_from_sap_check(A, cert, samples=2000, gamma=g),
            lower_frame_check(A, cert, samples=2000)):
    print(f"  {rep.name}: passed={rep.passed} worst margin={rep.worst_margin:.3g}")

# Recover a compressible signal from noisy measurements and compare to the bound.
x = generate_compressible(12, 1.0, rng)
eps = 0.05
noise = rng.laplace(size=8)
noise *= eps / np.abs(noise).sum()
res = solve_l1(RecoveryProblem(A, A @ x + noise, eps, 1.0))
err = lq_quasinorm(res.solution - x, 1)
rhs = theorem1_rhs(cert.D, cert.beta, eps, s, sigma_s(x, s, 1.0), 1.0, 1.0, 1.0)[2]
print(f"l1 error {err:.4f} <= bound {rhs:.4f}: {err <= rhs}")
