"""
How many bits does Bob's outcome hide?
======================================

Self-tested sources fix Bob's measurement to a Bell measurement, so an
eavesdropper guesses with probability 1/4: two bits. The assumption
matters, as the last section shows.
"""

import numpy as np

from swapsteer import OptimizerConfig, ProbTable, correlated_bell_strategy, eve_search, eve_strategy_value
from swapsteer.bundled import ideal_file
from swapsteer.cli import certified_report
from swapsteer.qobj import bell_basis

rep = certified_report(ideal_file(), np.random.default_rng(0), 4)
print(f"certified: G={rep.guessing_probability:.6f}  H_min={rep.min_entropy_bits:.6f} bits")

# %%
# A numerical search over eavesdropper strategies with independent
# sources, each purified on its own share of a four-dimensional register.
cfg = OptimizerConfig(restarts=10, seed=0)
indep = eve_search(ProbTable.ideal(), 4, cfg, sources="independent")
print(f"independent sources: G={indep.guessing_probability:.6f}")

# %%
# If the two sources may share a classical label, both can emit the same
# random Bell state. The table is still ideal, but Eve knows the label.
s = correlated_bell_strategy()
corr = eve_strategy_value(ProbTable.ideal(), s, bell_basis(), bell_basis())
print(f"correlated Bell pairs: G={corr.guessing_probability:.6f}  constraint violation={corr.constraint_violation:.1e}")
