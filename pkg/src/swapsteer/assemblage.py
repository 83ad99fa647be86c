"""Assemblages steered onto Alice, the PPT test, and the product-assemblage
reconstruction that turns a separable assemblage into an explicit
separable-source realization with a classical Bob."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTermError, DimensionError
from .linalg import STRUCT_TOL, dag, kron, max_abs, partial_trace, proj
from .network import Scenario, SourceEnsemble
from .qobj import Povm


@dataclass(frozen=True)
class Assemblage:
    """Subnormalized states ``sigma[b]`` on ``A1 A2``, one per Bob outcome."""

    sigmas: np.ndarray

    def __post_init__(self):
        sig = np.asarray(self.sigmas, dtype=complex)
        if sig.ndim != 3 or sig.shape[1] != sig.shape[2]:
            raise DimensionError(f"assemblage must have shape (n, d, d), got {sig.shape}")
        for s in sig:
            if max_abs(s - dag(s)) > STRUCT_TOL or np.linalg.eigvalsh((s + dag(s)) / 2)[0] < -STRUCT_TOL:
                raise ValueError("assemblage element is not positive semidefinite")
        if abs(np.trace(sig.sum(axis=0)) - 1) > STRUCT_TOL:
            raise ValueError("assemblage traces do not sum to 1")
        object.__setattr__(self, "sigmas", sig)

    def __len__(self):
        return self.sigmas.shape[0]

    def total(self) -> np.ndarray:
        return self.sigmas.sum(axis=0)


@dataclass(frozen=True)
class ProductAssemblage:
    """Separable decomposition of an assemblage with outcomes ``b = b0 * n2 + b1``.

    ``terms`` is a list of ``(first, second)`` where ``first`` has shape
    ``(n1, 2, 2)`` and ``second`` has shape ``(n2, 2, 2)``, giving
    ``sigma[b0 n2 + b1] = sum_terms first[b0] (x) second[b1]``.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((np.asarray(f, dtype=complex), np.asarray(s, dtype=complex)) for f, s in self.terms)
        if not terms:
            raise ValueError("product assemblage has no terms")
        n1, n2 = terms[0][0].shape[0], terms[0][1].shape[0]
        for f, s in terms:
            if f.shape != (n1, 2, 2) or s.shape != (n2, 2, 2):
                raise DimensionError("inconsistent product assemblage term shapes")
        object.__setattr__(self, "terms", terms)

    @property
    def split(self) -> tuple[int, int]:
        return self.terms[0][0].shape[0], self.terms[0][1].shape[0]

    def assemblage(self) -> Assemblage:
        n1, n2 = self.split
        sig = np.zeros((n1 * n2, 4, 4), dtype=complex)
        for f, s in self.terms:
            sig += np.einsum("aij,bkl->abikjl", f, s).reshape(n1 * n2, 4, 4)
        return Assemblage(sig)


def compute_assemblage(s: Scenario) -> Assemblage:
    """``sigma_b = sum_j w_j Tr_B[(1_A (x) N_b) rho1_j (x) rho2_j]``."""
    d_b = s.bob.dim
    rho = s.ensemble.state_ab().reshape(4, d_b, 4, d_b)
    sig = np.einsum("blk,ikjl->bij", s.bob.elements, rho)
    return Assemblage(sig)


def ppt_min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the two-qubit partial transpose on the second qubit."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError("PPT test is implemented for two qubits")
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh((pt + dag(pt)) / 2)[0])


def product_assemblage_from_scenario(s: Scenario, first: Povm, second: Povm) -> ProductAssemblage:
    """Separable decomposition when Bob measures ``first (x) second`` on ``B1 | B2``.

    Each ensemble component contributes one term
    ``(w_j Tr_B1[N1 rho1_j], Tr_B2[N2 rho2_j])``.
    """
    d1, d2 = s.bob_dims
    if first.dim != d1 or second.dim != d2:
        raise DimensionError("product POVM factors do not match Bob's source dimensions")
    terms = []
    for w, r1, r2 in s.ensemble.components:
        t1 = np.einsum("blk,ikjl->bij", first.elements, r1.reshape(2, d1, 2, d1))
        t2 = np.einsum("blk,ikjl->bij", second.elements, r2.reshape(2, d2, 2, d2))
        terms.append((w * t1, t2))
    return ProductAssemblage(tuple(terms))


def sohs_from_product_assemblage(pa: ProductAssemblage, n1: int | None = None, n2: int | None = None):
    """Separable states with classical flags reproducing a product assemblage.

    Source ``i`` of term ``j`` emits
    ``sum_b sigma_j[b] (x) |b><b| / N_ij`` with ``N_ij = sum_b Tr sigma_j[b]``,
    the term weight is ``N_1j N_2j``, and Bob reads both flags in the
    computational basis. Returns ``(SourceEnsemble, bob_povm)``.
    """
    s1, s2 = pa.split
    n1 = s1 if n1 is None else n1
    n2 = s2 if n2 is None else n2
    if (n1, n2) != (s1, s2):
        raise DimensionError(f"requested split ({n1}, {n2}) does not match assemblage ({s1}, {s2})")
    comps = []
    for f, s in pa.terms:
        norms = []
        tilde = []
        for sig, n in ((f, n1), (s, n2)):
            norm = float(np.trace(sig.sum(axis=0)).real)
            if norm <= STRUCT_TOL:
                raise DegenerateTermError("product assemblage term has zero trace")
            norms.append(norm)
            tilde.append(sum(kron(sig[b], proj(np.eye(n)[b])) for b in range(n)) / norm)
        comps.append((norms[0] * norms[1], tilde[0], tilde[1]))
    bob = Povm.product(Povm.computational(n1), Povm.computational(n2))
    return SourceEnsemble(tuple(comps)), bob


def verify_same_assemblage(a: Assemblage, b: Assemblage) -> float:
    if a.sigmas.shape != b.sigmas.shape:
        raise DimensionError(f"assemblage shapes differ: {a.sigmas.shape} vs {b.sigmas.shape}")
    return max_abs(a.sigmas - b.sigmas)


def alice_reduced(s: Scenario) -> np.ndarray:
    d1, d2 = s.bob_dims
    return partial_trace(s.ensemble.state_ab(), [2, 2, d1 * d2], [0, 1])
