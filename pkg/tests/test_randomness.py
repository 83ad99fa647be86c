import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapsteer.errors import DimensionError
from swapsteer.linalg import ket, kron, max_abs, permute_subsystems, proj, random_state, random_unitary
from swapsteer.network import ProbTable, joint_probability, saturating_scenario
from swapsteer.qobj import BELL_VECTORS, PHI_PLUS, BellOrdering, Povm, bell_basis
from swapsteer.randomness import (
    INDEPENDENT_SOURCES,
    SEPARABLE_SOURCES,
    EveStrategy,
    RandomnessReport,
    certified_guessing_probability,
    correlated_bell_strategy,
    eve_search,
    eve_strategy_value,
    min_entropy,
    separable_strategy,
    split_eve_dim,
)
from swapsteer.sohs import OptimizerConfig
from test_qobj import random_povm


def certified_bob(m=1, ordering=None):
    return bell_basis(ordering).tensor_identity(m)


def trivial_eve(d_e=1):
    els = np.zeros((4, d_e, d_e))
    els[0] = np.eye(d_e)
    return Povm(els)


def test_bell_overlap_factors():
    phi4 = np.eye(4).reshape(16) / 2
    for q in bell_basis().elements:
        assert np.real(phi4 @ kron(np.eye(4), q) @ phi4) == pytest.approx(0.25, abs=1e-15)


def test_certified_random_aux(rng):
    for _ in range(20):
        m, d_e = rng.integers(1, 4), rng.integers(1, 6)
        eve = random_povm(rng, 4, d_e)
        rep = certified_guessing_probability(certified_bob(m), random_state(m * d_e, rng), eve)
        assert abs(rep.guessing_probability - 0.25) <= 1e-14
        assert abs(rep.min_entropy_bits - 2) <= 1e-14
        assert rep.certified


def test_certified_trivial_eve():
    rep = certified_guessing_probability(certified_bob(), np.array([1.0]), trivial_eve())
    assert rep.guessing_probability == pytest.approx(0.25, abs=1e-15)


def test_certified_any_ordering(rng):
    rep = certified_guessing_probability(certified_bob(2, BellOrdering.appendix()), random_state(6, rng),
                                         random_povm(rng, 4, 3))
    assert abs(rep.guessing_probability - 0.25) <= 1e-14


def test_certified_rejects_other_povms(rng):
    with pytest.raises(ValueError, match="eve_strategy_value"):
        certified_guessing_probability(Povm.computational(4), np.array([1.0]), trivial_eve())
    # Bell measurement entangled with the junk is not of the certified form
    u = random_unitary(8, rng)
    twisted = Povm(np.array([u @ e @ u.conj().T for e in certified_bob(2).elements]))
    with pytest.raises(ValueError, match="eve_strategy_value"):
        certified_guessing_probability(twisted, random_state(2, rng), trivial_eve())
    with pytest.raises(DimensionError):
        certified_guessing_probability(certified_bob(), random_state(3, rng), trivial_eve(2))


def test_min_entropy():
    assert min_entropy(0.25) == 2
    assert min_entropy(1.0) == 0
    gs = np.linspace(0.01, 1, 50)
    assert np.all(np.diff([min_entropy(g) for g in gs]) < 0)
    rep = RandomnessReport.from_guess(0.3)
    assert rep.min_entropy_bits == pytest.approx(-np.log2(0.3), abs=1e-12)


def test_ideal_strategy_uncorrelated_eve():
    s = separable_strategy([1.0], [PHI_PLUS], [PHI_PLUS], trivial_eve())
    rep = eve_strategy_value(ProbTable.ideal(), s, bell_basis(), bell_basis())
    assert rep.guessing_probability == pytest.approx(0.25, abs=1e-15)
    assert rep.constraint_violation < 1e-15


def test_copy_flag_without_reproduction():
    # sources |ll> on each A_i B_i with Eve keeping (l1, l2): Eve is right, but the table is wrong
    basis = [ket(l, l) for l in (0, 1)]
    first, second = zip(*[(basis[l1], basis[l2]) for l1, l2 in itertools.product((0, 1), repeat=2)])
    s = separable_strategy([0.25] * 4, first, second, Povm.computational(4))
    bob = Povm.computational(4)
    rep = eve_strategy_value(ProbTable.ideal(), s, bell_basis(), bob)
    assert rep.constraint_violation > 0.1
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-12)


def test_uniform_table_fully_guessable():
    # Alice's qubits maximally mixed, Bob's qubits carry classical labels Eve also holds
    terms = list(itertools.product((0, 1), repeat=4))  # x1 l1 x2 l2
    first = [ket(x1, l1) for x1, l1, _, _ in terms]
    second = [ket(x2, l2) for _, _, x2, l2 in terms]
    eve = np.zeros((4, 16, 16))
    for e, (_, l1, _, l2) in enumerate(terms):
        eve[2 * l1 + l2, e, e] = 1
    s = separable_strategy([1 / 16] * 16, first, second, Povm(eve))
    rep = eve_strategy_value(ProbTable.uniform(), s, bell_basis(), Povm.computational(4))
    assert rep.constraint_violation < 1e-15
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-14)


def test_correlated_bell_strategy_reproduces_ideal_and_is_guessable():
    s = correlated_bell_strategy()
    rep = eve_strategy_value(ProbTable.ideal(), s, bell_basis(), bell_basis())
    assert rep.constraint_violation < 1e-15
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-14)
    assert rep.min_entropy_bits == pytest.approx(0, abs=1e-14)
    # the state is separable across the sources: a mixture of products on A1B1 | A2B2
    psi = s.state.reshape(2, 2, 2, 2, 4)  # a1 a2 b1 b2 e
    rho = np.einsum("abcde,fghie->abcdfghi", psi, psi.conj()).reshape(16, 16)
    mix = sum(0.25 * permute_subsystems(kron(proj(v), proj(v)), [2, 2, 2, 2], [0, 2, 1, 3])
              for v in BELL_VECTORS.values())
    assert max_abs(rho - mix) < 1e-15


def test_strategy_validation():
    with pytest.raises(DimensionError):
        EveStrategy(np.ones(8) / np.sqrt(8), trivial_eve(2))
    with pytest.raises(ValueError):
        EveStrategy(np.ones(16), trivial_eve(1))


def test_strategy_value_dimension_checks():
    s = separable_strategy([1.0], [PHI_PLUS], [PHI_PLUS], trivial_eve())
    with pytest.raises(DimensionError):
        eve_strategy_value(ProbTable.ideal(), s, bell_basis(), Povm.computational(8))


@pytest.mark.parametrize("d,expected", [(1, (1, 1)), (4, (2, 2)), (6, (2, 3)), (7, (1, 7)), (16, (4, 4))])
def test_split_eve_dim(d, expected):
    assert split_eve_dim(d) == expected


def test_search_validation():
    with pytest.raises(ValueError):
        eve_search(ProbTable.ideal(), 17)
    with pytest.raises(ValueError):
        eve_search(ProbTable.ideal(), 4, sources="entangled")
    with pytest.raises(DimensionError):
        eve_search(ProbTable.ideal(3), 4)


def test_search_saturating_table():
    p = joint_probability(saturating_scenario())
    rep = eve_search(p, 4, OptimizerConfig(restarts=5, seed=0))
    assert rep.feasible and rep.constraint_violation <= 1e-9
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-6)


def test_search_uniform_with_product_bob():
    rep = eve_search(ProbTable.uniform(), 4, OptimizerConfig(restarts=5, seed=0), bob=Povm.computational(4))
    assert rep.feasible
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-6)


def test_search_ideal_correlated_sources_finds_perfect_guess():
    rep = eve_search(ProbTable.ideal(), 4, OptimizerConfig(restarts=5, seed=1))
    assert rep.feasible
    assert rep.guessing_probability == pytest.approx(1.0, abs=1e-6)


@pytest.mark.slow
@settings(max_examples=4, deadline=None)
@given(st.integers(0, 2**16))
def test_search_ideal_independent_sources(seed):
    rep = eve_search(ProbTable.ideal(), 4, OptimizerConfig(restarts=3, seed=seed), sources="independent")
    if rep.feasible:
        assert rep.guessing_probability <= 0.25 + 1e-6


def test_search_report_consistency():
    # a crippled search: whatever comes back must be labelled consistently
    rep = eve_search(ProbTable.ideal(), 1, OptimizerConfig(restarts=2, seed=0, max_iters=50),
                     penalty_schedule=(1e1,))
    assert rep.constraint_violation >= 0
    if not rep.feasible:
        assert rep.constraint_violation > 1e-9


def test_search_records_source_model():
    cfg = OptimizerConfig(restarts=1, max_iters=50, seed=0)
    assert eve_search(ProbTable.uniform(), 1, cfg).assumption == SEPARABLE_SOURCES
    assert eve_search(ProbTable.uniform(), 1, cfg, sources="independent").assumption == INDEPENDENT_SOURCES
