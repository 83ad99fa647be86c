"""Two-source, two-party network without inputs.

Each source ``i`` emits a state on ``A_i B_i``; Alice measures ``A1 A2`` and
Bob measures ``B1 B2``. States are stored source by source (``A1 B1 A2 B2``)
and reordered to ``A1 A2 B1 B2`` before the measurement is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InconsistencyError
from .linalg import STRUCT_TOL, check_density, ket, kron, max_abs, permute_subsystems, proj
from .qobj import BellOrdering, Povm, bell_basis, correlators_from_probs, werner_state

STEERING_BOUND = 0.5


@dataclass(frozen=True)
class ProbTable:
    """Joint outcome distribution ``p[a, b]``.

    ``raw`` keeps the unclipped values when tiny negative entries were
    rounded to zero.
    """

    p: np.ndarray
    raw: np.ndarray | None = field(default=None, repr=False, compare=False)
    tol: float = field(default=STRUCT_TOL, repr=False, compare=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2:
            raise DimensionError(f"probability table must be 2-D, got shape {p.shape}")
        if p.min() < -self.tol:
            raise ValueError(f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1) > self.tol:
            raise ValueError(f"probabilities sum to {p.sum():.15f}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_raw(cls, raw: np.ndarray, tol: float = STRUCT_TOL) -> ProbTable:
        raw = np.array(raw, dtype=float)
        clipped = np.where((raw < 0) & (raw >= -tol), 0.0, raw)
        return cls(clipped, raw=raw, tol=tol)

    @classmethod
    def uniform(cls, d: int = 4) -> ProbTable:
        return cls(np.full((d, d), 1 / d**2))

    @classmethod
    def ideal(cls, d: int = 4) -> ProbTable:
        return cls(np.eye(d) / d)

    @property
    def shape(self):
        return self.p.shape

    def __getitem__(self, idx):
        return self.p[idx]


@dataclass(frozen=True)
class SourceEnsemble:
    """Classically correlated sources ``sum_j w_j rho1_j (x) rho2_j``.

    ``rho1`` lives on ``A1 B1`` and ``rho2`` on ``A2 B2``; Alice's factor is
    always a qubit, Bob's factor of source ``i`` has dimension ``bob_dims[i]``.
    """

    components: tuple = ()

    def __post_init__(self):
        comps = []
        for w, r1, r2 in self.components:
            if w < -STRUCT_TOL:
                raise ValueError(f"negative source weight {w}")
            comps.append((float(w), check_density(r1), check_density(r2)))
        if not comps:
            raise ValueError("source ensemble is empty")
        if abs(sum(w for w, _, _ in comps) - 1) > STRUCT_TOL:
            raise ValueError("source weights do not sum to 1")
        shapes = {(r1.shape[0], r2.shape[0]) for _, r1, r2 in comps}
        if len(shapes) != 1:
            raise DimensionError("all ensemble components must share dimensions")
        d1, d2 = shapes.pop()
        if d1 % 2 or d2 % 2:
            raise DimensionError("each source must carry a qubit for Alice")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def bob_dims(self) -> tuple[int, int]:
        _, r1, r2 = self.components[0]
        return r1.shape[0] // 2, r2.shape[0] // 2

    @classmethod
    def single(cls, rho1: np.ndarray, rho2: np.ndarray) -> SourceEnsemble:
        return cls(((1.0, rho1, rho2),))

    def state_ab(self) -> np.ndarray:
        """Joint state in ``A1 A2 B1 B2`` order."""
        d1, d2 = self.bob_dims
        dims = [2, d1, 2, d2]
        return sum(w * permute_subsystems(kron(r1, r2), dims, [0, 2, 1, 3])
                   for w, r1, r2 in self.components)

    def alice_marginal(self) -> np.ndarray:
        """``sum_j w_j rho1_A (x) rho2_A`` on ``A1 A2``."""
        from .linalg import partial_trace

        d1, d2 = self.bob_dims
        return sum(w * kron(partial_trace(r1, [2, d1], [0]), partial_trace(r2, [2, d2], [0]))
                   for w, r1, r2 in self.components)


@dataclass(frozen=True)
class Scenario:
    ensemble: SourceEnsemble
    alice: Povm
    bob: Povm

    def __post_init__(self):
        d1, d2 = self.ensemble.bob_dims
        if self.alice.dim != 4:
            raise DimensionError(f"Alice's POVM acts on dimension {self.alice.dim}, expected 4")
        if self.bob.dim != d1 * d2:
            raise DimensionError(f"Bob's POVM acts on dimension {self.bob.dim}, sources give {d1 * d2}")

    @property
    def bob_dims(self) -> tuple[int, int]:
        return self.ensemble.bob_dims


def joint_probability(s: Scenario) -> ProbTable:
    """``p(a,b) = sum_j w_j Tr[(M_a (x) N_b) rho1_j (x) rho2_j]`` after reordering."""
    d_b = s.bob.dim
    rho = s.ensemble.state_ab().reshape(4, d_b, 4, d_b)
    raw = np.einsum("aij,bkl,jlik->ab", s.alice.elements, s.bob.elements, rho).real
    return ProbTable.from_raw(raw)


def witness_value(p: ProbTable) -> float:
    """``W = sum_a p(a, a)``."""
    return float(np.trace(p.p))


def correlator(p: ProbTable, k: int, l: int) -> complex:
    """``<A^(k) B^(l)> = sum_ab omega**(ak + bl) p(a, b)``."""
    d = p.shape[0]
    if not (0 <= k < d and 0 <= l < d):
        raise ValueError(f"Fourier indices ({k}, {l}) outside 0..{d - 1}")
    idx = np.arange(d)
    w = np.exp(2j * np.pi * (np.add.outer(idx * k, idx * l)) / d)
    return complex(np.sum(w * p.p))


def witness_value_correlator_form(p: ProbTable, imag_tol: float = 1e-9) -> float:
    """``W = (1/d) sum_k <A^(k) B^(d-k)>``; must agree with :func:`witness_value`."""
    d = p.shape[0]
    table = correlators_from_probs(p.p)
    total = sum(table[k, (d - k) % d] for k in range(d)) / d
    if abs(total.imag) > imag_tol:
        raise InconsistencyError(f"imaginary residue {total.imag:.3e} in correlator witness")
    return float(total.real)


def is_swap_steerable(w: float, tol: float = 1e-9) -> bool:
    return w > STEERING_BOUND + tol


def werner_witness_analytic(alpha1: float, alpha2: float) -> float:
    return (3 * alpha1 * alpha2 + 1) / 4


# scenario constructors ------------------------------------------------------

def bell_scenario(rho1: np.ndarray, rho2: np.ndarray, ordering: BellOrdering | None = None) -> Scenario:
    """Both parties measure in the Bell basis on the given independent sources."""
    bell = bell_basis(ordering)
    return Scenario(SourceEnsemble.single(rho1, rho2), bell, bell)


def ideal_scenario(ordering: BellOrdering | None = None) -> Scenario:
    phi = proj(np.array([1, 0, 0, 1]) / np.sqrt(2))
    return bell_scenario(phi, phi, ordering)


def werner_scenario(alpha1: float, alpha2: float, ordering: BellOrdering | None = None) -> Scenario:
    return bell_scenario(werner_state(alpha1), werner_state(alpha2), ordering)


# computational state sharing the most weight with each Bell state
_BELL_PARTNER = {"phi+": (0, 0), "phi-": (1, 1), "psi+": (0, 1), "psi-": (1, 0)}


def saturating_bob_povm(ordering: BellOrdering | None = None) -> Povm:
    """Computational-basis measurement labelled so outcome ``b`` overlaps Bell state ``b``."""
    ordering = BellOrdering.canonical() if ordering is None else ordering
    return Povm.from_vectors([ket(*_BELL_PARTNER[lab]) for lab in ordering.labels])


def saturating_scenario(ordering: BellOrdering | None = None) -> Scenario:
    """Classically correlated sources ``(|00><00| + |11><11|)/2`` reaching ``W = 1/2``."""
    rho = (proj(ket(0, 0)) + proj(ket(1, 1))) / 2
    return Scenario(SourceEnsemble.single(rho, rho), bell_basis(ordering), saturating_bob_povm(ordering))
