"""Swap-steering in a two-source network without inputs.

A trusted Alice performs a Bell measurement on the halves of two sources;
an untrusted Bob measures his halves. The witness ``W = sum_a p(a, a)`` is
at most 1/2 for separable states with classical Bob responses and reaches 1
with two ``|phi+>`` sources.
"""

from .assemblage import (
    Assemblage,
    ProductAssemblage,
    compute_assemblage,
    ppt_min_eigenvalue,
    product_assemblage_from_scenario,
    sohs_from_product_assemblage,
    verify_same_assemblage,
)
from .errors import (
    CertificationGateError,
    DegenerateTermError,
    DimensionError,
    FullRankError,
    InconsistencyError,
    SeparableSourceError,
)
from .network import (
    ProbTable,
    Scenario,
    SourceEnsemble,
    bell_scenario,
    ideal_scenario,
    is_swap_steerable,
    joint_probability,
    saturating_scenario,
    werner_scenario,
    werner_witness_analytic,
    witness_value,
    witness_value_correlator_form,
)
from .qobj import (
    BellOrdering,
    Povm,
    bell_basis,
    correlators_from_probs,
    observable_from_povm,
    probs_from_correlators,
    trusted_observable_a0,
    werner_state,
)
from .randomness import (
    EveStrategy,
    RandomnessReport,
    certified_guessing_probability,
    correlated_bell_strategy,
    eve_search,
    eve_strategy_value,
    separable_strategy,
)
from .selftest import (
    Realization,
    SelfTestCertificate,
    commutant_residual,
    disguised_ideal_realization,
    extract_local_unitaries,
    ideal_realization,
    sos_residuals,
    support_orthogonality_check,
)
from .sohs import (
    NLHVModel,
    OptimizerConfig,
    SOHSModel,
    build_nlhv_model,
    nlhv_prob_table,
    saturating_sohs_model,
    sohs_bound_optimize,
    sohs_prob_table,
)

__version__ = "0.1.0"
