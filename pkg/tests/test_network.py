import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import permutation_matrix
from swapsteer.errors import DimensionError
from swapsteer.linalg import ket, max_abs, partial_trace, proj, random_density
from swapsteer.network import (
    ProbTable,
    Scenario,
    SourceEnsemble,
    correlator,
    ideal_scenario,
    is_swap_steerable,
    joint_probability,
    saturating_bob_povm,
    saturating_scenario,
    werner_scenario,
    werner_witness_analytic,
    witness_value,
    witness_value_correlator_form,
)
from swapsteer.qobj import BellOrdering, Povm, bell_basis
from test_qobj import random_povm

seeds = st.integers(0, 2**32 - 1)
REORDER = permutation_matrix([2, 2, 2, 2], [0, 2, 1, 3])


def oracle_probability(s: Scenario) -> np.ndarray:
    """Brute force: build every M_a (x) N_b on the full space."""
    d1, d2 = s.bob_dims
    perm = permutation_matrix([2, d1, 2, d2], [0, 2, 1, 3])
    rho = sum(w * perm @ np.kron(r1, r2) @ perm.T for w, r1, r2 in s.ensemble.components)
    return np.array([[np.trace(np.kron(m, n) @ rho).real for n in s.bob.elements] for m in s.alice.elements])


def random_ensemble(rng, n, d1=2, d2=2):
    w = rng.dirichlet(np.ones(n))
    return SourceEnsemble(tuple((w[j], random_density(2 * d1, rng), random_density(2 * d2, rng)) for j in range(n)))


def random_table(rng, d=4):
    return ProbTable(rng.dirichlet(np.ones(d * d)).reshape(d, d))


def test_ideal_table():
    p = joint_probability(ideal_scenario())
    assert max_abs(p.p - np.eye(4) / 4) < 1e-12
    assert max_abs(p.p - oracle_probability(ideal_scenario())) < 1e-12
    assert witness_value(p) == pytest.approx(1, abs=1e-12)


def test_maximally_mixed_with_product_bob():
    mixed = np.eye(4) / 4
    s = Scenario(SourceEnsemble.single(mixed, mixed), bell_basis(), Povm.computational(4))
    assert np.allclose(joint_probability(s).p, 1 / 16, atol=1e-15)


def test_saturating_scenario():
    assert witness_value(joint_probability(saturating_scenario())) == pytest.approx(0.5, abs=1e-12)


def test_naive_computational_labels_do_not_saturate():
    # Bob's outcomes 00, 01, 10, 11 in that order only match two of four
    # Bell states in the canonical or appendix ordering
    rho = (proj(ket(0, 0)) + proj(ket(1, 1))) / 2
    for ordering in (BellOrdering.canonical(), BellOrdering.appendix()):
        s = Scenario(SourceEnsemble.single(rho, rho), bell_basis(ordering), Povm.computational(4))
        assert witness_value(joint_probability(s)) == pytest.approx(0.25, abs=1e-15)
    s = Scenario(SourceEnsemble.single(rho, rho), bell_basis(BellOrdering.appendix()),
                 saturating_bob_povm(BellOrdering.appendix()))
    assert witness_value(joint_probability(s)) == pytest.approx(0.5, abs=1e-15)


@given(seeds, st.integers(1, 4), st.sampled_from([(2, 2), (2, 4), (4, 2)]))
@settings(max_examples=25, deadline=None)
def test_joint_probability_matches_oracle(seed, n, dims):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(rng, n, *dims)
    s = Scenario(ens, random_povm(rng, 4, 4), random_povm(rng, 3, dims[0] * dims[1]))
    p = joint_probability(s)
    assert max_abs(p.p - oracle_probability(s)) < 1e-12
    rho_a = partial_trace(ens.state_ab(), [4, dims[0] * dims[1]], [0])
    marg = [np.trace(m @ rho_a).real for m in s.alice.elements]
    assert max_abs(p.p.sum(axis=1) - marg) < 1e-12
    assert max_abs(ens.alice_marginal() - rho_a) < 1e-12


def test_scenario_dimension_checks(rng):
    ens = random_ensemble(rng, 1)
    with pytest.raises(DimensionError):
        Scenario(ens, bell_basis(), Povm.computational(8))
    with pytest.raises(DimensionError):
        Scenario(ens, Povm.computational(2), bell_basis())


def test_ensemble_validation(rng):
    rho = random_density(4, rng)
    with pytest.raises(ValueError):
        SourceEnsemble(((0.7, rho, rho), (0.7, rho, rho)))
    with pytest.raises(ValueError):
        SourceEnsemble(((1.0, 2 * rho, rho),))


def test_prob_table_clipping():
    raw = np.eye(4) / 4
    raw[0, 1] = -5e-13
    raw[0, 0] += 5e-13
    p = ProbTable.from_raw(raw)
    assert p.p[0, 1] == 0 and p.raw[0, 1] == -5e-13
    raw[0, 1] = -1e-6
    with pytest.raises(ValueError):
        ProbTable.from_raw(raw)


def test_witness_examples():
    assert witness_value(ProbTable.ideal()) == 1
    assert witness_value(ProbTable.uniform()) == pytest.approx(0.25)
    assert witness_value_correlator_form(ProbTable.ideal()) == pytest.approx(1, abs=1e-12)
    assert witness_value_correlator_form(ProbTable.uniform()) == pytest.approx(0.25, abs=1e-12)


def test_correlator_examples():
    assert correlator(ProbTable.ideal(), 0, 0) == pytest.approx(1)
    for k in (1, 2, 3):
        assert correlator(ProbTable.ideal(), k, 4 - k) == pytest.approx(1, abs=1e-15)
    for k in range(4):
        for l in range(4):
            if (k, l) != (0, 0):
                assert abs(correlator(ProbTable.uniform(), k, l)) < 1e-15


@given(seeds, st.integers(2, 6))
@settings(max_examples=50)
def test_witness_forms_agree(seed, d):
    p = random_table(np.random.default_rng(seed), d)
    assert witness_value_correlator_form(p) == pytest.approx(witness_value(p), abs=1e-12)


@given(seeds, st.permutations(range(4)))
@settings(max_examples=30)
def test_witness_relabel_invariance(seed, perm):
    p = random_table(np.random.default_rng(seed))
    perm = list(perm)
    assert witness_value(ProbTable(p.p[np.ix_(perm, perm)])) == pytest.approx(witness_value(p), abs=1e-15)


@given(seeds, st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_product_bob_never_exceeds_half(seed, n):
    rng = np.random.default_rng(seed)
    bob = Povm.product(random_povm(rng, 2, 2), random_povm(rng, 2, 2))
    s = Scenario(random_ensemble(rng, n), bell_basis(), bob)
    assert witness_value(joint_probability(s)) <= 0.5 + 1e-9


@pytest.mark.parametrize("a1,a2,w", [(0.5, 0.5, 0.4375), (1, 1, 1.0), (1, 1 / 3, 0.5), (0, 0, 0.25), (0.8, 0.8, 0.73)])
def test_werner_points(a1, a2, w):
    assert werner_witness_analytic(a1, a2) == pytest.approx(w, abs=1e-15)
    assert witness_value(joint_probability(werner_scenario(a1, a2))) == pytest.approx(w, abs=1e-12)


def test_werner_any_ordering():
    for ordering in (BellOrdering.appendix(), BellOrdering.fourier()):
        assert witness_value(joint_probability(werner_scenario(0.6, 0.9, ordering))) == pytest.approx(
            (3 * 0.54 + 1) / 4, abs=1e-12)


def test_steerability_verdict():
    assert is_swap_steerable(0.5 + 2e-9)
    assert not is_swap_steerable(0.5 + 5e-10)
    assert not is_swap_steerable(0.5)
