"""Build a random left-regular graph, measure its expansion and recover through it.

Run with ``python demos/expander_recovery.py``.
"""
from sapcert.expander import expansion_alpha, random_left_regular, rip1_deviation
from sapcert.harness import ExperimentConfig, run_experiment

# A perfect matching expands perfectly, so alpha* = 0 and the corollary bound is 4 eps + 2 sigma.
G = random_left_regular(12, 12, 1, seed=0, matching=True)
print("matching alpha* =", expansion_alpha(G, 4).alpha_star)

cfg = ExperimentConfig("expander", 12, 12, 2, eps_grid=[0.0, 0.05], trials=20,
                       matching=True, signal="compressible", seed=1)
report = run_experiment(cfg, A=G.adjacency, graph=G)
print("harness summary:", report.summary())

# Denser random graphs expand less; the RIP-1 ratio range shows how far Phi is from an isometry.
H = random_left_regular(16, 24, 3, seed=2)
print("d=3 alpha* over |S| <= 2:", round(expansion_alpha(H, 2).alpha_star, 4))
lo, hi = rip1_deviation(H, 1)
print(f"||Phi x||_1 / (d ||x||_1) over 2-sparse x lies in [{lo:.3f}, {hi:.3f}]")
