"""Dense linear algebra for small multi-qubit systems.

Index convention: subsystem 0 is the most significant digit of a composite
basis index, so ``kron(A, B)`` places ``A`` on subsystem 0.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import DimensionError

HERMITIAN_TOL = 1e-10
STRUCT_TOL = 1e-12


def kron(*ops: np.ndarray) -> np.ndarray:
    """Tensor product of any number of matrices or vectors, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


def ket(*digits: int, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational basis vector ``|d0 d1 ...>`` (qubits unless ``dims`` given)."""
    dims = [2] * len(digits) if dims is None else list(dims)
    vec = np.zeros(int(np.prod(dims)), dtype=complex)
    vec[np.ravel_multi_index(digits, dims)] = 1.0
    return vec


def proj(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec)
    return np.outer(vec, vec.conj())


def dag(mat: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(mat, -1, -2))


def max_abs(mat: np.ndarray) -> float:
    """Max-entry norm."""
    return float(np.max(np.abs(mat))) if np.size(mat) else 0.0


def _check_shape(dim: int, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != dim:
        raise DimensionError(f"subsystem dims {dims} do not factor dimension {dim}")
    return dims


def partial_trace(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in ascending order in the result.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"partial_trace needs a square matrix, got {mat.shape}")
    dims = _check_shape(mat.shape[0], dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    tensor = mat.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out_idx = keep + [n + k for k in keep]
    reduced = np.einsum(tensor, row + col, out_idx)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def permute_subsystems(obj: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder subsystems of a state vector or square operator.

    Position ``i`` of the output holds old subsystem ``perm[i]`` (the
    ``np.transpose`` convention).
    """
    obj = np.asarray(obj)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation")
    if len(perm) != len(dims):
        raise DimensionError("perm and dims must have the same length")
    dims = _check_shape(obj.shape[0], dims)
    dim = obj.shape[0]
    if obj.ndim == 1:
        return obj.reshape(dims).transpose(perm).reshape(dim)
    if obj.ndim == 2 and obj.shape[1] == dim:
        n = len(dims)
        axes = perm + [n + p for p in perm]
        return obj.reshape(dims + dims).transpose(axes).reshape(dim, dim)
    raise DimensionError(f"cannot permute an array of shape {obj.shape}")


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    mat = np.asarray(mat)
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1] and max_abs(mat - dag(mat)) <= tol


def hermitian_eig(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and orthonormal eigenvector columns.

    Each eigenvector is rotated so its largest-magnitude entry is real and
    positive. Vectors inside a degenerate cluster are an arbitrary basis.
    """
    mat = np.asarray(mat, dtype=complex)
    if not is_hermitian(mat, tol):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh((mat + dag(mat)) / 2)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    pivot = np.argmax(np.abs(vecs), axis=0)
    phase = vecs[pivot, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(phase) / phase)
    return vals, vecs


def schmidt_decompose(
    psi: np.ndarray, dim_a: int, dim_b: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Schmidt decomposition ``psi = sum_j c_j e_j (x) f_j``.

    Returns ``(coeffs, left, right)`` with ``left[:, j] = e_j`` and
    ``right[:, j] = f_j``; coefficients are descending and there are
    ``min(dim_a, dim_b)`` of them.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size != dim_a * dim_b:
        raise DimensionError(f"state of size {psi.size} does not split as {dim_a}x{dim_b}")
    u, s, vh = np.linalg.svd(psi.reshape(dim_a, dim_b), full_matrices=False)
    return s, u, vh.T


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


def check_density(rho: np.ndarray, tol: float = STRUCT_TOL) -> np.ndarray:
    """Validate a density operator, returning it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density operator must be square, got {rho.shape}")
    if max_abs(rho - dag(rho)) > tol:
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density operator has trace {np.trace(rho).real}")
    if np.linalg.eigvalsh((rho + dag(rho)) / 2)[0] < -tol:
        raise ValueError("density operator has a negative eigenvalue")
    return rho


def sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((mat + dag(mat)) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0, None))) @ dag(vecs)


def polar_unitary(mat: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition (closest unitary in Frobenius norm)."""
    u, _, vh = np.linalg.svd(mat)
    return u @ vh


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_theta ||u - exp(i theta) v||_max`` with theta from the trace overlap."""
    overlap = np.trace(dag(v) @ u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return max_abs(u - phase * v)
