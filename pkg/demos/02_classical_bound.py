"""
The classical bound
===================

Separable sources with deterministic Bob responses. The optimizer
rotates the two product qubit states of a single hidden-state atom;
mixtures cannot beat the best atom.
"""

from swapsteer import OptimizerConfig, Povm, bell_basis, sohs_bound_optimize

res = sohs_bound_optimize(bell_basis(), OptimizerConfig(restarts=20, seed=1))
print(f"Bell measurement: bound {res.bound:.9f}, spread over restarts {res.spread:.1e}")
print("best angles (theta1, phi1, theta2, phi2):", [round(x, 4) for x in res.angles])

# %%
# A product measurement for Alice gives nothing to beat: product states hit it exactly.
res = sohs_bound_optimize(Povm.computational(4), OptimizerConfig(restarts=5, seed=1))
print(f"computational product measurement: bound {res.bound:.9f}")
