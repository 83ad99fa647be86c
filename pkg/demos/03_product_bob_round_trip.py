"""
Product measurements on Bob are classical
=========================================

When Bob measures each source separately, the assemblage he steers can be
rebuilt from separable sources, so his score never exceeds one half.
"""

import numpy as np

from swapsteer import (
    Povm,
    Scenario,
    bell_basis,
    compute_assemblage,
    joint_probability,
    product_assemblage_from_scenario,
    sohs_from_product_assemblage,
    verify_same_assemblage,
    witness_value,
)
from swapsteer.assemblage import ppt_min_eigenvalue
from swapsteer.network import ideal_scenario

rng = np.random.default_rng(3)


def random_qubit_povm(n):
    g = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    g = np.einsum("bji,bjk->bik", g.conj(), g)
    w = np.linalg.inv(np.linalg.cholesky(g.sum(axis=0)))
    return Povm(np.einsum("ij,bjk,lk->bil", w, g, w.conj()))


# %%
# Even maximally entangled sources give W <= 1/2 when Bob's measurement factorizes.
first, second = random_qubit_povm(2), random_qubit_povm(2)
s = Scenario(ideal_scenario().ensemble, bell_basis(), Povm.product(first, second))
print("original W =", witness_value(joint_probability(s)))

# %%
# Rebuild classically and compare the steered states.
ens, bob = sohs_from_product_assemblage(product_assemblage_from_scenario(s, first, second), 2, 2)
rebuilt = Scenario(ens, bell_basis(), bob)
print("assemblage gap:", verify_same_assemblage(compute_assemblage(rebuilt), compute_assemblage(s)))
print("rebuilt W =", witness_value(joint_probability(rebuilt)))
print("rebuilt sources are separable:",
      all(ppt_min_eigenvalue(r) >= -1e-12 for _, r1, r2 in ens.components for r in (r1, r2)))
