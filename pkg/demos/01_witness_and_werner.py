"""
Witnessing swap-steering
========================

Two sources feed a trusted Alice, who performs a Bell measurement, and an
untrusted Bob. The score is the probability that their outcomes agree.
"""

import numpy as np

from swapsteer import (
    is_swap_steerable,
    joint_probability,
    ppt_min_eigenvalue,
    werner_scenario,
    werner_state,
    witness_value,
)
from swapsteer.network import ideal_scenario, saturating_scenario

# %%
# Two |phi+> sources with a Bell measurement on Bob's side: outcomes always agree.
p = joint_probability(ideal_scenario())
print(np.round(p.p, 3))
print("ideal W =", witness_value(p))

# %%
# A classical model with the same marginals only reaches one half.
print("saturating W =", witness_value(joint_probability(saturating_scenario())))

# %%
# Werner noise on both sources. The witness is (3 a1 a2 + 1)/4, so the
# network detects the pair as soon as a1 a2 > 1/3.
for a1, a2 in [(1.0, 0.3), (1.0, 0.34), (0.6, 0.6), (0.5, 0.5)]:
    w = witness_value(joint_probability(werner_scenario(a1, a2)))
    print(f"a1={a1:.2f} a2={a2:.2f}  W={w:.4f}  steerable={is_swap_steerable(w)}")

# %%
# With a perfect partner source the threshold coincides with entanglement:
# the partial transpose of a Werner state turns negative at alpha = 1/3.
for a in (0.30, 1 / 3, 0.36):
    print(f"alpha={a:.4f}  min eig of partial transpose = {ppt_min_eigenvalue(werner_state(a)):+.4f}")
