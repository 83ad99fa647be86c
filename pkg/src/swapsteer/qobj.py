"""Concrete quantum objects: POVMs, the Bell basis, Werner states, A0.

Two Bell orderings appear in practice. Outcomes ``0..3`` of the canonical
ordering are ``(phi+, phi-, psi+, psi-)``. Independently of the ordering,
every Bell label carries an eigenphase exponent used by the trusted
observable ``A0 = sum_k i**k |phi_k><phi_k|`` with
``phi_1, phi_2, phi_3, phi_4 = phi+, psi+, phi-, psi-``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InconsistencyError
from .linalg import STRUCT_TOL, dag, kron, max_abs, proj

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")

# power of i attached to each Bell state in A0 (i**4 == i**0)
BELL_EIGENPHASE = {"phi+": 1, "psi+": 2, "phi-": 3, "psi-": 0}

_S = 1 / np.sqrt(2)
BELL_VECTORS = {
    "phi+": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "psi+": np.array([0, _S, _S, 0], dtype=complex),
    "psi-": np.array([0, _S, -_S, 0], dtype=complex),
}

PHI_PLUS = BELL_VECTORS["phi+"]


@dataclass(frozen=True)
class BellOrdering:
    """Assignment of Bell states to measurement outcomes ``0..3``."""

    labels: tuple[str, ...] = BELL_LABELS

    def __post_init__(self):
        if sorted(self.labels) != sorted(BELL_LABELS):
            raise ValueError(f"{self.labels} is not a permutation of {BELL_LABELS}")
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def eigenphases(self) -> tuple[int, ...]:
        """Exponent of ``i`` carried by each outcome in ``A0``."""
        return tuple(BELL_EIGENPHASE[lab] for lab in self.labels)

    def vector(self, outcome: int) -> np.ndarray:
        return BELL_VECTORS[self.labels[outcome]].copy()

    @classmethod
    def canonical(cls) -> BellOrdering:
        return cls(BELL_LABELS)

    @classmethod
    def appendix(cls) -> BellOrdering:
        """``(phi+, psi+, phi-, psi-)``, the ``phi_1..phi_4`` listing."""
        return cls(("phi+", "psi+", "phi-", "psi-"))

    @classmethod
    def fourier(cls) -> BellOrdering:
        """Ordering whose outcome index equals its eigenphase exponent."""
        return cls(tuple(sorted(BELL_LABELS, key=BELL_EIGENPHASE.__getitem__)))


@dataclass(frozen=True)
class Povm:
    """Positive operator valued measure stored as an ``(n, d, d)`` array."""

    elements: np.ndarray = field(repr=False)
    tol: float = STRUCT_TOL

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1] != els.shape[2]:
            raise DimensionError(f"POVM elements must have shape (n, d, d), got {els.shape}")
        for el in els:
            if max_abs(el - dag(el)) > self.tol:
                raise ValueError("POVM element is not Hermitian")
            if np.linalg.eigvalsh((el + dag(el)) / 2)[0] < -self.tol:
                raise ValueError("POVM element is not positive semidefinite")
        if max_abs(els.sum(axis=0) - np.eye(els.shape[1])) > self.tol:
            raise ValueError("POVM elements do not sum to the identity")
        els.setflags(write=False)
        object.__setattr__(self, "elements", els)

    @property
    def outcome_count(self) -> int:
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.outcome_count

    def __getitem__(self, b):
        return self.elements[b]

    def is_projective(self, tol: float = 1e-10) -> bool:
        return all(max_abs(el @ el - el) <= tol for el in self.elements)

    @classmethod
    def from_vectors(cls, vectors) -> Povm:
        """Rank-one projective measurement onto the given orthonormal vectors."""
        return cls(np.array([proj(np.asarray(v, dtype=complex)) for v in vectors]))

    @classmethod
    def computational(cls, dim: int) -> Povm:
        return cls.from_vectors(np.eye(dim))

    @classmethod
    def product(cls, first: Povm, second: Povm) -> Povm:
        """``N[b0 * n1 + b1] = first[b0] (x) second[b1]``."""
        return cls(np.array([kron(x, y) for x in first.elements for y in second.elements]))

    def tensor_identity(self, dim: int) -> Povm:
        return Povm(np.array([kron(el, np.eye(dim)) for el in self.elements]))


def bell_basis(ordering: BellOrdering | None = None) -> Povm:
    ordering = BellOrdering.canonical() if ordering is None else ordering
    return Povm.from_vectors([ordering.vector(a) for a in range(4)])


def werner_state(alpha: float) -> np.ndarray:
    """``alpha |phi+><phi+| + (1 - alpha) I/4`` for alpha in ``[-1/3, 1]``."""
    if not -1 / 3 - 1e-15 <= alpha <= 1 + 1e-15:
        raise ValueError(f"Werner parameter {alpha} outside [-1/3, 1]")
    return alpha * proj(PHI_PLUS) + (1 - alpha) * np.eye(4, dtype=complex) / 4


def trusted_observable_a0() -> np.ndarray:
    """``A0 = sum_k i**k |phi_k><phi_k|``; fixed by Bell labels, not by outcome order."""
    return sum((1j) ** BELL_EIGENPHASE[lab] * proj(vec) for lab, vec in BELL_VECTORS.items())


def observable_from_povm(
    povm: Povm, k: int, d: int | None = None, exponents=None
) -> np.ndarray:
    """Fourier observable ``sum_a omega**(e(a) k) P_a`` with ``omega = exp(2 pi i/d)``.

    ``exponents`` maps outcomes to ``e(a)``; the default is ``e(a) = a``.
    """
    d = povm.outcome_count if d is None else d
    if povm.outcome_count != d:
        raise ValueError(f"POVM has {povm.outcome_count} outcomes, expected {d}")
    if not 0 <= k < d:
        raise ValueError(f"Fourier index {k} outside 0..{d - 1}")
    exps = np.arange(d) if exponents is None else np.asarray(exponents)
    weights = np.exp(2j * np.pi * exps * k / d)
    return np.tensordot(weights, povm.elements, axes=1)


def _omega_table(d: int) -> np.ndarray:
    idx = np.arange(d)
    return np.exp(2j * np.pi * np.outer(idx, idx) / d)


def correlators_from_probs(p: np.ndarray) -> np.ndarray:
    """Full table ``E[k, l] = sum_ab omega**(ak + bl) p(a, b)``."""
    p = np.asarray(p, dtype=float)
    d = p.shape[0]
    if p.shape != (d, d):
        raise DimensionError("correlator transform needs a square table")
    w = _omega_table(d)
    return w @ p @ w.T


def probs_from_correlators(table: np.ndarray, d: int | None = None, imag_tol: float = 1e-9):
    """Inverse transform ``p(a,b) = d**-2 sum_kl omega**-(ak+bl) E[k,l]``.

    Returns a :class:`~swapsteer.network.ProbTable`.
    """
    from .network import ProbTable

    table = np.asarray(table, dtype=complex)
    d = table.shape[0] if d is None else d
    if table.shape != (d, d):
        raise DimensionError(f"correlator table must be {d}x{d}")
    if abs(table[0, 0] - 1) > imag_tol:
        raise InconsistencyError(f"E[0,0] = {table[0, 0]} is not 1")
    w = _omega_table(d).conj()
    p = w @ table @ w.T / d**2
    if max_abs(p.imag) > imag_tol:
        raise InconsistencyError(f"imaginary residue {max_abs(p.imag):.3e}")
    return ProbTable.from_raw(p.real)
