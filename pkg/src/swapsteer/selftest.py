"""Verification of the self-testing chain for a maximally violating realization.

Bob's space is ``B1 (x) B2`` where ``B_i`` (dimension ``2 m_i``) is the part
sent by source ``i``. Extracted unitaries ``U_i`` map ``B_i`` onto the
reference frame ``B_i' (x) B_i''`` (a qubit times junk, qubit most
significant), after which the sources emit ``|phi+>`` on ``A_i B_i'`` and
Bob's observable is ``A0 (x) 1`` on ``B1' B2' | B1'' B2''``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationGateError, DimensionError, FullRankError, SeparableSourceError
from .linalg import (
    check_density,
    dag,
    hermitian_eig,
    kron,
    max_abs,
    partial_trace,
    permute_subsystems,
    polar_unitary,
    proj,
    random_density,
    random_unitary,
    schmidt_decompose,
)
from .qobj import PHI_PLUS, trusted_observable_a0

SOS_GATE = 1e-8
FULL_RANK_TOL = 1e-10
SCHMIDT_TOL = 1e-8
EIG_CUTOFF = 1e-12

A0 = trusted_observable_a0()
# |phi+>_{A1B1}|phi+>_{A2B2} in A1 A2 B1 B2 order: maximally entangled across A|B
PHI_PLUS_4 = np.eye(4, dtype=complex).reshape(16) / 2


@dataclass
class Realization:
    """State on ``A1 A2 B1 B2`` plus Bob's observable on ``B1 B2``.

    ``decomposition`` optionally lists ``(weight, psi1, psi2)`` with
    ``psi_i`` a pure state on ``A_i B_i``.
    """

    rho_ab: np.ndarray
    bob_observable: np.ndarray
    bob_dims: tuple[int, int] = (2, 2)
    decomposition: list | None = None

    def __post_init__(self):
        d1, d2 = self.bob_dims
        self.rho_ab = check_density(self.rho_ab, tol=1e-10)
        if self.rho_ab.shape[0] != 4 * d1 * d2:
            raise DimensionError(f"state dimension {self.rho_ab.shape[0]} != 4 * {d1} * {d2}")
        self.bob_observable = np.asarray(self.bob_observable, dtype=complex)
        if self.bob_observable.shape != (d1 * d2, d1 * d2):
            raise DimensionError("Bob's observable does not act on B1 B2")

    @classmethod
    def from_decomposition(cls, decomposition, bob_observable, bob_dims=None) -> Realization:
        decomposition = [(float(w), np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
                         for w, a, b in decomposition]
        if bob_dims is None:
            bob_dims = (decomposition[0][1].size // 2, decomposition[0][2].size // 2)
        d1, d2 = bob_dims
        rho = sum(w * permute_subsystems(kron(proj(a), proj(b)), [2, d1, 2, d2], [0, 2, 1, 3])
                  for w, a, b in decomposition)
        return cls(rho, bob_observable, tuple(bob_dims), decomposition)

    def bob_reduced(self) -> np.ndarray:
        d_b = self.bob_dims[0] * self.bob_dims[1]
        return partial_trace(self.rho_ab, [4, d_b], [1])


@dataclass
class SelfTestCertificate:
    max_sos_residual: float
    sos_residuals: list
    bob_unitarity_residual: float
    extracted_unitaries: tuple
    state_fidelity: float
    observable_residual: float
    p_operators: tuple = field(repr=False)
    commutant_residual: float = 0.0
    support_overlap: float = 0.0
    witness: float = float("nan")

    def passed(self, tol: float = 1e-8) -> bool:
        return self.state_fidelity >= 1 - tol and self.observable_residual <= tol


def _bob_power(b0: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(b0, k % 4)


def sos_residuals(r: Realization) -> list[float]:
    """``||(A0^k (x) B0^(4-k)) rho - rho||_max`` for ``k = 0..3``."""
    out = []
    for k in range(4):
        op = kron(np.linalg.matrix_power(A0, k), _bob_power(r.bob_observable, 4 - k))
        out.append(max_abs(op @ r.rho_ab - r.rho_ab))
    return out


def realization_witness(r: Realization) -> float:
    """``(1/4) sum_k Tr[(A0^k (x) B0^(4-k)) rho]``."""
    total = sum(np.trace(kron(np.linalg.matrix_power(A0, k), _bob_power(r.bob_observable, 4 - k)) @ r.rho_ab)
                for k in range(4)) / 4
    return float(total.real)


def bob_projectivity_check(r: Realization) -> float:
    """Operator-norm distance of ``B0`` from unitarity.

    Raises :class:`FullRankError` if Bob's reduced state is rank deficient,
    since the observable is only constrained on its support.
    """
    rho_b = r.bob_reduced()
    min_eig = np.linalg.eigvalsh((rho_b + dag(rho_b)) / 2)[0]
    if min_eig < FULL_RANK_TOL:
        raise FullRankError(f"Bob's reduced state has eigenvalue {min_eig:.3e}")
    b0 = r.bob_observable
    eye = np.eye(b0.shape[0])
    return float(max(np.linalg.norm(b0 @ dag(b0) - eye, 2), np.linalg.norm(dag(b0) @ b0 - eye, 2)))


def commutant_residual(p1: np.ndarray, p2: np.ndarray) -> float:
    """``||[A0, (P1 (x) P2)^2]||_max``."""
    sq = np.linalg.matrix_power(kron(p1, p2), 2)
    return max_abs(A0 @ sq - sq @ A0)


@dataclass
class _SourceAnalysis:
    weights: np.ndarray
    states: list
    coeffs: list
    left: list
    right: list


def _source_states(r: Realization, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Weights and states of source ``i``, one column per state.

    The distinct states of the decomposition are used when they are
    orthonormal; otherwise the eigenbasis of the source marginal. This keeps
    a degenerate marginal (say, an equal mixture of Bell states) from being
    resolved in an arbitrary basis.
    """
    distinct, weights = [], []
    for c in r.decomposition:
        v = c[1 + i] / np.linalg.norm(c[1 + i])
        for k, u in enumerate(distinct):
            if abs(abs(np.vdot(u, v)) - 1) < EIG_CUTOFF:
                weights[k] += c[0]
                break
        else:
            distinct.append(v)
            weights.append(c[0])
    vecs = np.array(distinct).T
    if max_abs(dag(vecs) @ vecs - np.eye(len(distinct))) < 1e-10:
        return np.array(weights), vecs
    marginal = sum(c[0] * proj(c[1 + i]) for c in r.decomposition)
    vals, vecs = hermitian_eig(marginal)
    keep = vals > EIG_CUTOFF
    return vals[keep], vecs[:, keep]


def _analyse_source(r: Realization, i: int) -> _SourceAnalysis:
    d_b = r.bob_dims[i]
    weights, vecs = _source_states(r, i)
    out = _SourceAnalysis(weights, [], [], [], [])
    for vec in vecs.T:
        lam, e, f = schmidt_decompose(vec, 2, d_b)
        if lam.size < 2 or lam[1] < SCHMIDT_TOL:
            raise SeparableSourceError(f"source {i + 1} eigenvector has Schmidt rank 1")
        out.states.append(vec)
        out.coeffs.append(lam)
        out.left.append(e)
        out.right.append(f)
    return out


def support_orthogonality_check(r: Realization) -> float:
    """Largest ``|<f_{j,l}|f_{j',s}>|`` between Bob-side Schmidt vectors of
    distinct states of the same source (0 when nothing to compare)."""
    if r.decomposition is None:
        raise ValueError("support check needs a separable decomposition")
    worst = 0.0
    for i in (0, 1):
        src = _analyse_source(r, i)
        for l in range(len(src.right)):
            for s in range(l):
                worst = max(worst, max_abs(dag(src.right[l]) @ src.right[s]))
    return worst


def _frame_unitary(src: _SourceAnalysis, d_b: int) -> np.ndarray:
    """Map ``f_{j,s} -> conj(e_{j,s}) (x) |s>`` on one source, completed to a unitary.

    The junk frame is then rotated so the map is as close to the identity
    as possible; any junk rotation preserves every certified property.
    """
    m = d_b // 2
    n_comp = len(src.states)
    if d_b % 2 or n_comp > m:
        raise CertificationGateError("Bob's source space cannot hold orthogonal qubit supports")
    targets, sources = [], []
    for s in range(n_comp):
        for j in range(2):
            targets.append(kron(src.left[s][:, j].conj(), np.eye(m)[s]))
            sources.append(src.right[s][:, j])
    t = np.array(targets).T
    f = np.array(sources).T
    if n_comp < m:
        t = np.hstack([t, _complement(t)])
        f = np.hstack([f, _complement(f)])
    u = polar_unitary(t @ dag(f))
    junk = partial_trace(u, [2, m], [1])
    gauge = kron(np.eye(2), dag(polar_unitary(junk)))
    return gauge @ u


def _complement(cols: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    return u[:, cols.shape[1]:]


def extract_local_unitaries(r: Realization) -> SelfTestCertificate:
    """Run the extraction chain and return residuals of every identity.

    Order of checks: Schmidt rank of source eigenvectors, the SOS gate
    (``CertificationGateError`` above ``1e-8``), full rank of Bob's state.
    """
    if r.decomposition is None:
        raise ValueError("extraction needs a separable decomposition")
    sources = [_analyse_source(r, i) for i in (0, 1)]
    sos = sos_residuals(r)
    if max(sos) > SOS_GATE:
        raise CertificationGateError(f"SOS residual {max(sos):.3e} above {SOS_GATE:.0e}: not maximally violating")
    unitarity = bob_projectivity_check(r)

    d1, d2 = r.bob_dims
    m1, m2 = d1 // 2, d2 // 2
    u1 = _frame_unitary(sources[0], d1)
    u2 = _frame_unitary(sources[1], d2)
    u_b = kron(u1, u2)
    full = kron(np.eye(4), u_b)
    rotated = full @ r.rho_ab @ dag(full)
    reduced = partial_trace(rotated, [2, 2, 2, m1, 2, m2], [0, 1, 2, 4])
    fidelity = float(np.real(PHI_PLUS_4.conj() @ reduced @ PHI_PLUS_4))

    b_ref = permute_subsystems(u_b @ r.bob_observable @ dag(u_b), [2, m1, 2, m2], [0, 2, 1, 3])
    obs_res = max_abs(b_ref - kron(A0, np.eye(m1 * m2)))

    p_ops = tuple([np.sqrt(2) * (e * lam) @ dag(e) for lam, e in zip(src.coeffs, src.left)]
                  for src in sources)
    comm = max(commutant_residual(p, q) for p in p_ops[0] for q in p_ops[1])
    return SelfTestCertificate(
        max_sos_residual=max(sos),
        sos_residuals=sos,
        bob_unitarity_residual=unitarity,
        extracted_unitaries=(u1, u2),
        state_fidelity=fidelity,
        observable_residual=obs_res,
        p_operators=p_ops,
        commutant_residual=comm,
        support_overlap=support_orthogonality_check(r),
        witness=realization_witness(r),
    )


def rotate_realization(r: Realization, u1: np.ndarray, u2: np.ndarray) -> Realization:
    """Apply ``U1 (x) U2`` on Bob's side of state, observable and decomposition."""
    u_b = kron(u1, u2)
    full = kron(np.eye(4), u_b)
    decomp = None
    if r.decomposition is not None:
        decomp = [(w, kron(np.eye(2), u1) @ a, kron(np.eye(2), u2) @ b) for w, a, b in r.decomposition]
    return Realization(full @ r.rho_ab @ dag(full), u_b @ r.bob_observable @ dag(u_b), r.bob_dims, decomp)


def ideal_realization(aux_dims: tuple[int, int] = (1, 1), junk_spectra=None) -> Realization:
    """Two ``|phi+>`` sources, each tensored with a diagonal full-rank junk state.

    ``junk_spectra[i]`` are the junk eigenvalues of source ``i`` (uniform by default).
    """
    m1, m2 = aux_dims
    if junk_spectra is None:
        junk_spectra = (np.full(m1, 1 / m1), np.full(m2, 1 / m2))
    decomp = []
    for s, q1 in enumerate(junk_spectra[0]):
        for t, q2 in enumerate(junk_spectra[1]):
            decomp.append((q1 * q2, kron(PHI_PLUS, np.eye(m1)[s]), kron(PHI_PLUS, np.eye(m2)[t])))
    b0 = permute_subsystems(kron(A0, np.eye(m1 * m2)), [2, 2, m1, m2], [0, 2, 1, 3])
    return Realization.from_decomposition(decomp, b0, (2 * m1, 2 * m2))


def disguised_ideal_realization(aux_dims: tuple[int, int], rng: np.random.Generator):
    """Ideal realization with random full-rank junk, hidden by Haar-random unitaries on ``B1``, ``B2``.

    Junk states are drawn at random and their eigenbases folded into the
    decomposition. Returns ``(realization, (D1, D2))`` where ``D_i`` maps the
    reference frame to the physical one.
    """
    m1, m2 = aux_dims
    spectra, bases = [], []
    for m in (m1, m2):
        vals, vecs = np.linalg.eigh(random_density(m, rng))
        spectra.append(np.clip(vals, 1e-3, None) / np.clip(vals, 1e-3, None).sum())
        bases.append(vecs)
    decomp = []
    for s, q1 in enumerate(spectra[0]):
        for t, q2 in enumerate(spectra[1]):
            decomp.append((q1 * q2, kron(PHI_PLUS, bases[0][:, s]), kron(PHI_PLUS, bases[1][:, t])))
    b0 = permute_subsystems(kron(A0, np.eye(m1 * m2)), [2, 2, m1, m2], [0, 2, 1, 3])
    ref = Realization.from_decomposition(decomp, b0, (2 * m1, 2 * m2))
    d1, d2 = random_unitary(2 * m1, rng), random_unitary(2 * m2, rng)
    return rotate_realization(ref, d1, d2), (d1, d2)
