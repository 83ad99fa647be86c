"""Guessing probability and min-entropy of Bob's outcomes.

Security rests on the sources being at most classically correlated; this
is a stated precondition of every report and is not checked. Strategies in
which an adversary entangles the two sources are outside the model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .linalg import kron, max_abs, partial_trace, proj
from .network import ProbTable
from .qobj import BELL_VECTORS, BellOrdering, Povm, bell_basis
from .sohs import OptimizerConfig

log = logging.getLogger(__name__)

MAX_EVE_DIM = 16
SEPARABLE_SOURCES = "sources assumed at most classically correlated"
INDEPENDENT_SOURCES = "sources assumed independent"
# |phi+>_{A1B1'}|phi+>_{A2B2'} in A1 A2 B1' B2' order
_PHI4 = np.eye(4, dtype=complex).reshape(16) / 2


@dataclass
class EveStrategy:
    """Pure state on ``A1A2 (x) B (x) E`` and Eve's four-outcome POVM on ``E``."""

    state: np.ndarray
    eve_povm: Povm
    bob_dim: int = 4

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=complex)
        d_e = self.eve_povm.dim
        if self.state.shape != (4 * self.bob_dim * d_e,):
            raise DimensionError(f"state size {self.state.size} != 4 * {self.bob_dim} * {d_e}")
        if abs(np.linalg.norm(self.state) - 1) > 1e-12:
            raise ValueError("strategy state is not normalized")


@dataclass
class RandomnessReport:
    guessing_probability: float
    min_entropy_bits: float
    constraint_violation: float
    feasible: bool = True
    certified: bool = False
    assumption: str = SEPARABLE_SOURCES
    strategy: EveStrategy | None = field(default=None, repr=False)
    bob_povm: Povm | None = field(default=None, repr=False)

    @classmethod
    def from_guess(cls, g: float, violation: float = 0.0, **kw) -> RandomnessReport:
        return cls(float(g), min_entropy(g), float(violation), **kw)


def min_entropy(g: float) -> float:
    # rounding can push a perfect guess a few ulps above 1
    return float("inf") if g <= 0 else 0.0 - float(np.log2(min(g, 1.0)))


def _certified_bell_factors(bob_povm: Povm, tol: float = 1e-10) -> np.ndarray:
    """Reduce ``N_b = |phi_b><phi_b| (x) 1`` to the Bell projectors ``|phi_b><phi_b|``."""
    if bob_povm.outcome_count != 4 or bob_povm.dim % 4:
        raise ValueError("certified form needs four outcomes on B1' B2' (x) junk")
    m = bob_povm.dim // 4
    factors, used = [], set()
    for el in bob_povm.elements:
        q = partial_trace(el, [4, m], [0]) / m
        if max_abs(el - kron(q, np.eye(m))) > tol:
            raise ValueError("Bob's POVM is not of the form Q_b (x) 1; use eve_strategy_value")
        label = next((lab for lab, v in BELL_VECTORS.items() if max_abs(q - proj(v)) <= tol), None)
        if label is None or label in used:
            raise ValueError("Bob's POVM is not the Bell measurement; use eve_strategy_value")
        used.add(label)
        factors.append(q)
    return np.array(factors)


def certified_guessing_probability(bob_povm: Povm, aux_state: np.ndarray, eve_povm: Povm) -> RandomnessReport:
    """Guessing probability on the self-tested form of the experiment.

    ``G = sum_b <phi+ phi+|(1 (x) Q_b)|phi+ phi+> <aux|1 (x) E_b|aux>`` with
    ``aux_state`` on ``B'' (x) E``.
    """
    factors = _certified_bell_factors(bob_povm)
    m, d_e = bob_povm.dim // 4, eve_povm.dim
    aux = np.asarray(aux_state, dtype=complex)
    if aux.shape != (m * d_e,):
        raise DimensionError(f"aux state must live on junk ({m}) x Eve ({d_e})")
    if eve_povm.outcome_count != 4:
        raise ValueError("Eve guesses one of four outcomes")
    bell_overlap = np.array([np.real(_PHI4.conj() @ kron(np.eye(4), q) @ _PHI4) for q in factors])
    eve_part = np.array([np.real(aux.conj() @ kron(np.eye(m), e) @ aux) for e in eve_povm.elements])
    return RandomnessReport.from_guess(float(bell_overlap @ eve_part), certified=True)


def eve_strategy_value(target: ProbTable, s: EveStrategy, alice: Povm, bob: Povm) -> RandomnessReport:
    """Guessing value ``sum_b <psi|1 (x) N_b (x) E_b|psi>`` and max deviation from ``target``."""
    d_b, d_e = s.bob_dim, s.eve_povm.dim
    if bob.dim != d_b or alice.dim != 4:
        raise DimensionError("measurement dimensions do not match the strategy")
    psi = s.state.reshape(4, d_b, d_e)
    p = np.einsum("ike,aij,bkl,jle->ab", psi.conj(), alice.elements, bob.elements, psi).real
    g = np.einsum("ike,bkl,bef,ilf->", psi.conj(), bob.elements, s.eve_povm.elements, psi).real
    violation = max_abs(p - target.p)
    return RandomnessReport.from_guess(float(g), violation, strategy=s, bob_povm=bob)


def separable_strategy(weights, first, second, eve_povm: Povm) -> EveStrategy:
    """Purification ``sum_l sqrt(w_l) |u_l>_{A1B1} |v_l>_{A2B2} |l>_E`` of a separable state.

    Qubit Bob factors; the flag register has dimension ``eve_povm.dim``.
    """
    d_e = eve_povm.dim
    psi = np.zeros((2, 2, 2, 2, d_e), dtype=complex)  # a1 a2 b1 b2 e
    for l, (w, u, v) in enumerate(zip(weights, first, second)):
        t = np.einsum("ij,kl->ikjl", np.reshape(u, (2, 2)), np.reshape(v, (2, 2)))
        psi[..., l] += np.sqrt(w) * t
    return EveStrategy(psi.reshape(-1), eve_povm)


def correlated_bell_strategy() -> EveStrategy:
    """Both sources emit the same Bell state, chosen uniformly; Eve keeps the label.

    Seen across the ``A|B`` cut the purification is
    ``sum_k 1/2 |phi_k>_A |phi_k>_B |e_k>_E`` with orthonormal ``e_k`` (rows
    of a Hadamard matrix in the label basis), so measuring ``e_k`` reveals
    Bob's Bell outcome exactly.
    """
    bells = [BELL_VECTORS[lab] for lab in ("phi+", "phi-", "psi+", "psi-")]
    probe = separable_strategy([0.25] * 4, bells, bells, Povm.computational(4))
    psi = probe.state.reshape(4, 4, 4)
    rows = []
    for v in (BELL_VECTORS[lab] for lab in BellOrdering.canonical().labels):
        # <phi_k|_B psi = |phi_k>_A |e_k>_E / 2 is rank one; keep the flag factor
        _, _, vh = np.linalg.svd(np.einsum("ike,k->ie", psi, v.conj()))
        rows.append(vh[0])
    return EveStrategy(probe.state, Povm.from_vectors(rows))


# search ---------------------------------------------------------------------

PENALTY_SCHEDULE = (1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7)


SOURCE_MODELS = ("correlated", "independent")


def split_eve_dim(d_e: int) -> tuple[int, int]:
    """Most balanced factorization ``d_e = d1 * d2`` with ``d1 <= d2``."""
    d1 = max(k for k in range(1, int(np.sqrt(d_e)) + 1) if d_e % k == 0)
    return d1, d_e // d1


def _build_objective(target, alice_els, d_e, bob_els=None, sources="correlated"):
    import jax

    jax.config.update("jax_enable_x64", True)
    import jax.numpy as jnp

    nb = 4
    if sources == "correlated":
        sizes = [("u", (d_e, 4)), ("v", (d_e, 4))]
    else:
        d1, d2 = split_eve_dim(d_e)
        sizes = [("w1", (2, 2, d1)), ("w2", (2, 2, d2))]
    sizes.append(("y", (4, d_e, d_e)))
    if bob_els is None:
        sizes.append(("x", (nb, 4, 4)))
    offsets, total = {}, 0
    for name, shape in sizes:
        n = int(np.prod(shape))
        offsets[name] = (total, shape)
        total += 2 * n

    def unpack(z):
        out = {}
        for name, (start, shape) in offsets.items():
            n = int(np.prod(shape))
            out[name] = (z[start:start + n] + 1j * z[start + n:start + 2 * n]).reshape(shape)
        return out

    def povm(mats):
        s = jnp.einsum("bji,bjk->ik", mats.conj(), mats)
        chol = jnp.linalg.cholesky(s)
        w = jax.scipy.linalg.solve_triangular(chol, jnp.eye(s.shape[0]), lower=True)
        return jnp.einsum("ij,bkj,bkl,ml->bim", w, mats.conj(), mats, w.conj())

    tgt = jnp.asarray(target)
    m_a = jnp.asarray(alice_els)
    fixed_bob = None if bob_els is None else jnp.asarray(bob_els)

    def measures(z):
        q = unpack(z)
        if sources == "correlated":
            psi = jnp.einsum("lij,lkm->ikjml", q["u"].reshape(d_e, 2, 2), q["v"].reshape(d_e, 2, 2))
        else:
            psi = jnp.einsum("ace,bdf->abcdef", q["w1"], q["w2"])
        psi = psi.reshape(4, 4, d_e)
        psi = psi / jnp.sqrt(jnp.sum(jnp.abs(psi) ** 2))
        n_b = fixed_bob if fixed_bob is not None else povm(q["x"])
        e_b = povm(q["y"])
        p = jnp.einsum("ike,aij,bkl,jle->ab", psi.conj(), m_a, n_b, psi).real
        g = jnp.einsum("ike,bkl,bef,ilf->", psi.conj(), n_b, e_b, psi).real
        return psi, n_b, e_b, p, g

    def objective(z, mu):
        _, _, _, p, g = measures(z)
        return -g + mu * jnp.sum((p - tgt) ** 2)

    def deviation(z):
        _, _, _, p, _ = measures(z)
        return 1e8 * jnp.sum((p - tgt) ** 2)

    return (total, jax.jit(jax.value_and_grad(objective)), jax.jit(measures),
            jax.jit(jax.value_and_grad(deviation)))


def eve_search(
    target: ProbTable,
    dim_e: int,
    cfg: OptimizerConfig | None = None,
    alice: Povm | None = None,
    bob: Povm | None = None,
    penalty_schedule=PENALTY_SCHEDULE,
    sources: str = "correlated",
) -> RandomnessReport:
    """Multi-start penalized maximization of Eve's guessing probability.

    With ``sources="correlated"`` strategies are purifications of separable
    states with at most ``dim_e`` product terms, Eve holding the shared
    label. With ``"independent"`` each source is purified on its own factor
    of ``E = E1 (x) E2`` (see ``split_eve_dim``). Bob's POVM on two qubits
    is optimized too unless ``bob`` is given.

    Classically correlated sources do not protect the outcome: the uniform
    mixture of ``|phi_l>|phi_l>`` over the four Bell states reproduces the
    ideal table while Eve guesses perfectly (``correlated_bell_strategy``). The reproduction constraint is a
    quadratic penalty whose weight follows ``penalty_schedule``; every
    restart ending infeasible gets a final pass minimizing the deviation
    alone. Results are re-scored in numpy and kept only if the max deviation
    is at most ``cfg.constraint_tol``. If nothing is feasible the least-violating
    result is returned with ``feasible=False``.
    """
    from scipy.optimize import minimize

    cfg = OptimizerConfig() if cfg is None else cfg
    if not 1 <= dim_e <= MAX_EVE_DIM:
        raise ValueError(f"Eve dimension {dim_e} outside 1..{MAX_EVE_DIM}")
    if sources not in SOURCE_MODELS:
        raise ValueError(f"sources must be one of {SOURCE_MODELS}")
    if target.shape != (4, 4):
        raise DimensionError("Eve search targets four-outcome tables")
    alice = bell_basis() if alice is None else alice
    n_par, value_grad, measures, restore_grad = _build_objective(
        target.p, alice.elements, dim_e, None if bob is None else bob.elements, sources)
    rng = np.random.default_rng(cfg.seed)

    def fun(z, mu):
        val, grad = value_grad(z, mu)
        return float(val), np.asarray(grad, dtype=float)

    def restore(z):
        val, grad = restore_grad(z)
        return float(val), np.asarray(grad, dtype=float)

    opts = {"maxiter": cfg.max_iters, "ftol": 1e-16, "gtol": 1e-12}

    best, fallback = None, None
    for _ in range(cfg.restarts):
        z = rng.standard_normal(n_par)
        report = None
        for mu in penalty_schedule:
            z = minimize(fun, z, args=(mu,), jac=True, method="L-BFGS-B", options=opts).x
            report = _score(target, alice, measures(z))
            if report.constraint_violation <= cfg.constraint_tol:
                break
        else:
            # pull the last iterate onto the constraint set, ignoring G
            z = minimize(restore, z, jac=True, method="L-BFGS-B", options=opts).x
            report = _score(target, alice, measures(z))
        if report.constraint_violation <= cfg.constraint_tol:
            if best is None or report.guessing_probability > best.guessing_probability:
                best = report
        elif fallback is None or report.constraint_violation < fallback.constraint_violation:
            fallback = report
    assumption = SEPARABLE_SOURCES if sources == "correlated" else INDEPENDENT_SOURCES
    if best is not None:
        best.assumption = assumption
        return best
    log.warning("no feasible strategy within %d restarts (best violation %.3e)",
                cfg.restarts, fallback.constraint_violation)
    fallback.feasible = False
    fallback.assumption = assumption
    return fallback


def _score(target: ProbTable, alice: Povm, measured) -> RandomnessReport:
    psi, n_b, e_b, _, _ = (np.asarray(x) for x in measured)
    bob = Povm(_symmetrize(n_b))
    eve = Povm(_symmetrize(e_b))
    return eve_strategy_value(target, EveStrategy(psi.reshape(-1) / np.linalg.norm(psi), eve, 4), alice, bob)


def _symmetrize(els: np.ndarray) -> np.ndarray:
    els = (els + np.conj(np.swapaxes(els, -1, -2))) / 2
    # push the completeness rounding onto the last element
    els[-1] += np.eye(els.shape[-1]) - els.sum(axis=0)
    return els
