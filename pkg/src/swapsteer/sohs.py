"""Classical explanations of network correlations.

SOHS models send pure product states to the trusted Alice and classical
instructions to Bob; NLHV models replace both parties by response
functions of two hidden variables. This module evaluates both, builds the
standard examples, and computes the largest single-outcome probability a
product state can reach under a trusted POVM, which bounds every SOHS model
for the diagonal witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .linalg import STRUCT_TOL, dag, kron, max_abs, proj
from .network import ProbTable, Scenario, SourceEnsemble
from .qobj import Povm

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SOHSAtom:
    """One value of ``(lambda1, lambda2)``.

    ``components`` is a list of ``(weight, psi1, psi2)`` qubit product states
    sent to Alice; ``bob_response`` is ``p(b | lambda1, lambda2)``.
    """

    weight: float
    components: tuple
    bob_response: np.ndarray

    def __post_init__(self):
        comps = tuple((float(w), np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
                      for w, a, b in self.components)
        ws = np.array([w for w, _, _ in comps])
        if self.weight < 0 or (ws < 0).any() or abs(ws.sum() - 1) > STRUCT_TOL:
            raise ValueError("SOHS atom weights must be a distribution")
        for _, a, b in comps:
            if a.shape != (2,) or b.shape != (2,):
                raise ValueError("SOHS components are qubit states")
            if abs(np.linalg.norm(a) - 1) > STRUCT_TOL or abs(np.linalg.norm(b) - 1) > STRUCT_TOL:
                raise ValueError("SOHS component states must be normalized")
        resp = np.asarray(self.bob_response, dtype=float)
        if (resp < 0).any() or abs(resp.sum() - 1) > STRUCT_TOL:
            raise ValueError("Bob's response must be a distribution")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "bob_response", resp)


@dataclass(frozen=True)
class SOHSModel:
    atoms: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if abs(sum(a.weight for a in atoms) - 1) > STRUCT_TOL:
            raise ValueError("SOHS atom weights must sum to 1")
        object.__setattr__(self, "atoms", atoms)


def sohs_prob_table(model: SOHSModel, alice: Povm) -> ProbTable:
    rows = []
    for atom in model.atoms:
        p_a = np.zeros(alice.outcome_count)
        for w, a, b in atom.components:
            v = kron(a, b)
            p_a += w * np.einsum("i,aij,j->a", v.conj(), alice.elements, v).real
        rows.append(atom.weight * np.outer(p_a, atom.bob_response))
    return ProbTable.from_raw(np.sum(rows, axis=0))


def saturating_sohs_model(bob_labels=None) -> SOHSModel:
    """Two fair coins; Alice gets ``|l1 l2>``, Bob announces ``(l1, l2)``.

    ``bob_labels[(l1, l2)]`` is Bob's outcome for that pair; the default
    matches :func:`swapsteer.network.saturating_bob_povm` in canonical order.
    """
    if bob_labels is None:
        bob_labels = {(0, 0): 0, (1, 1): 1, (0, 1): 2, (1, 0): 3}
    basis = np.eye(2, dtype=complex)
    atoms = []
    for l1 in (0, 1):
        for l2 in (0, 1):
            resp = np.zeros(4)
            resp[bob_labels[(l1, l2)]] = 1.0
            atoms.append(SOHSAtom(0.25, ((1.0, basis[l1], basis[l2]),), resp))
    return SOHSModel(tuple(atoms))


def coin_toss_example(heads: np.ndarray, tails: np.ndarray, alice: Povm):
    """Each source tosses a coin, sends ``heads``/``tails`` to Alice and the result to Bob.

    Returns the quantum :class:`Scenario` and the equivalent :class:`SOHSModel`.
    Bob reads both flags in the computational basis, outcome ``2 l1 + l2``.
    """
    states = [np.asarray(heads, dtype=complex), np.asarray(tails, dtype=complex)]
    flag = np.eye(2)
    rho = sum(0.5 * kron(proj(states[l]), proj(flag[l])) for l in (0, 1))
    scenario = Scenario(SourceEnsemble.single(rho, rho), alice, Povm.computational(4))
    atoms = []
    for l1 in (0, 1):
        for l2 in (0, 1):
            resp = np.zeros(4)
            resp[2 * l1 + l2] = 1.0
            atoms.append(SOHSAtom(0.25, ((1.0, states[l1], states[l2]),), resp))
    return scenario, SOHSModel(tuple(atoms))


# bound optimizer ------------------------------------------------------------

@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 100
    max_iters: int = 500
    step_tol: float = 1e-9
    spread_tol: float = 1e-6
    seed: int = 0
    constraint_tol: float = 1e-9


@dataclass
class SOHSBoundResult:
    bound: float
    states: tuple[np.ndarray, np.ndarray]
    angles: tuple[float, float, float, float]
    outcome: int
    spread: float
    restart_values: np.ndarray = field(repr=False)
    iterations: int = 0
    warning: str | None = None

    @property
    def converged(self) -> bool:
        return self.warning is None


def qubit_from_angles(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def angles_from_qubit(psi: np.ndarray) -> tuple[float, float]:
    theta = 2 * np.arctan2(abs(psi[1]), abs(psi[0]))
    phi = float(np.angle(psi[1]) - np.angle(psi[0])) % (2 * np.pi) if abs(psi[1]) > 0 else 0.0
    return float(theta), phi


def product_value(povm_element: np.ndarray, psi1: np.ndarray, psi2: np.ndarray) -> float:
    v = kron(psi1, psi2)
    return float(np.real(v.conj() @ povm_element @ v))


def _top_eigvecs(mats: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(mats)
    return vecs[..., :, -1]


def _step(new: np.ndarray, old: np.ndarray) -> np.ndarray:
    # phase-insensitive distance between unit vectors
    ov = np.einsum("...i,...i->...", old.conj(), new)
    phase = np.where(np.abs(ov) > 0, ov / np.where(np.abs(ov) > 0, np.abs(ov), 1), 1)
    return np.linalg.norm(new - phase[..., None] * old, axis=-1)


def sohs_bound_optimize(alice: Povm, cfg: OptimizerConfig | None = None) -> SOHSBoundResult:
    """Maximize ``<psi1 psi2| M_a |psi1 psi2>`` over qubit product states and outcomes.

    Every restart draws uniform angles ``(theta, phi)`` per qubit and then
    alternates exact maximizations: with one qubit fixed the objective is a
    2x2 Hermitian form in the other, maximized by its top eigenvector. Each
    outcome is handled separately and restarts are merged by max.
    """
    cfg = OptimizerConfig() if cfg is None else cfg
    if alice.dim != 4:
        raise ValueError("the bound is defined for POVMs on two qubits")
    rng = np.random.default_rng(cfg.seed)
    n_out, n_rs = alice.outcome_count, cfg.restarts
    theta = rng.uniform(0, np.pi, size=(n_rs, 2))
    phi = rng.uniform(0, 2 * np.pi, size=(n_rs, 2))
    seeds = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)
    psi1 = np.broadcast_to(seeds[:, None, 0, :], (n_rs, n_out, 2)).copy()
    psi2 = np.broadcast_to(seeds[:, None, 1, :], (n_rs, n_out, 2)).copy()
    m = alice.elements.reshape(n_out, 2, 2, 2, 2)  # [a, i1, i2, j1, j2]

    it = 0
    for it in range(1, cfg.max_iters + 1):
        r2 = np.einsum("rai,aikjl,raj->rakl", psi1.conj(), m, psi1)
        new2 = _top_eigvecs(r2)
        r1 = np.einsum("rak,aikjl,ral->raij", new2.conj(), m, new2)
        new1 = _top_eigvecs(r1)
        step = np.maximum(_step(new1, psi1), _step(new2, psi2))
        psi1, psi2 = new1, new2
        if step.max() < cfg.step_tol:
            break
    vecs = np.einsum("rai,raj->raij", psi1, psi2).reshape(n_rs, n_out, 4)
    values = np.einsum("rai,aij,raj->ra", vecs.conj(), alice.elements, vecs).real
    best_a = values.argmax(axis=1)
    per_restart = values[np.arange(n_rs), best_a]
    r_best = int(per_restart.argmax())
    a_best = int(best_a[r_best])
    s1, s2 = psi1[r_best, a_best], psi2[r_best, a_best]
    spread = float(per_restart.max() - per_restart.min())
    warning = None
    if spread > cfg.spread_tol:
        warning = f"restart spread {spread:.3e} exceeds {cfg.spread_tol:.1e}"
        log.warning(warning)
    elif step.max() >= cfg.step_tol:
        warning = f"step size {step.max():.3e} above tolerance after {it} iterations"
        log.warning(warning)
    return SOHSBoundResult(
        bound=float(per_restart[r_best]),
        states=(s1, s2),
        angles=angles_from_qubit(s1) + angles_from_qubit(s2),
        outcome=a_best,
        spread=spread,
        restart_values=per_restart,
        iterations=it,
        warning=warning,
    )


# NLHV models ----------------------------------------------------------------

@dataclass(frozen=True)
class NLHVModel:
    """``p(a,b) = sum p1[l1] p2[l2] alice[l1,l2,a] bob[l1,l2,b]``."""

    p1: np.ndarray
    p2: np.ndarray
    alice: np.ndarray
    bob: np.ndarray

    def __post_init__(self):
        p1, p2 = np.asarray(self.p1, float), np.asarray(self.p2, float)
        alice, bob = np.asarray(self.alice, float), np.asarray(self.bob, float)
        for w in (p1, p2):
            if (w < 0).any() or abs(w.sum() - 1) > STRUCT_TOL:
                raise ValueError("hidden-variable weights must be distributions")
        for resp in (alice, bob):
            if resp.shape[:2] != (p1.size, p2.size):
                raise ValueError("response table shape does not match hidden variables")
            if (resp < 0).any() or max_abs(resp.sum(axis=-1) - 1) > STRUCT_TOL:
                raise ValueError("responses must be distributions")
        for name, val in zip(("p1", "p2", "alice", "bob"), (p1, p2, alice, bob)):
            object.__setattr__(self, name, val)

    @property
    def atom_count(self) -> int:
        return self.p1.size * self.p2.size


def nlhv_prob_table(model: NLHVModel) -> ProbTable:
    raw = np.einsum("i,j,ija,ijb->ab", model.p1, model.p2, model.alice, model.bob)
    return ProbTable.from_raw(raw)


def build_nlhv_model(p: ProbTable) -> NLHVModel:
    """Deterministic model with ``lambda1 = (a', b')`` drawn from ``p`` and trivial ``lambda2``.

    Zero-probability pairs are dropped.
    """
    na, nb = p.shape
    pairs = [(a, b) for a in range(na) for b in range(nb) if p.p[a, b] > 0]
    p1 = np.array([p.p[a, b] for a, b in pairs])
    alice = np.zeros((len(pairs), 1, na))
    bob = np.zeros((len(pairs), 1, nb))
    for i, (a, b) in enumerate(pairs):
        alice[i, 0, a] = 1.0
        bob[i, 0, b] = 1.0
    return NLHVModel(p1, np.ones(1), alice, bob)
