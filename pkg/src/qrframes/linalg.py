"""Dense complex linear algebra on finite tensor-product spaces.

Matrices and kets are plain numpy arrays (complex128). Subsystem 0 is the
leftmost tensor factor throughout the package.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionError, ShapeError

HERMITIAN_TOL = 1e-10


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, first argument most significant."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    return reduce(np.kron, ops)


def ket(amplitudes: Sequence[complex]) -> np.ndarray:
    return np.asarray(amplitudes, dtype=complex)


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def _check_dims(rho: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {rho.shape}")
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"dims {tuple(dims)} do not multiply to {rho.shape[0]}")
    return rho


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int] | int) -> np.ndarray:
    """Reduced operator on the factors listed in ``keep`` (kept in ascending order)."""
    rho = _check_dims(rho, dims)
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep={keep} out of range for {n} factors")
    t = rho.reshape(tuple(dims) * 2)
    # trace out from the highest index so axis numbers stay valid
    for k in reversed([i for i in range(n) if i not in keep]):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(rho: np.ndarray, dims: Sequence[int], subsystem: Sequence[int] | int) -> np.ndarray:
    """Transpose the indices of the named factor(s) only."""
    rho = _check_dims(rho, dims)
    subs = {subsystem} if isinstance(subsystem, (int, np.integer)) else set(subsystem)
    n = len(dims)
    if any(s < 0 or s >= n for s in subs):
        raise DimensionError(f"subsystem {subsystem} out of range for {n} factors")
    t = rho.reshape(tuple(dims) * 2)
    axes = list(range(2 * n))
    for s in subs:
        axes[s], axes[s + n] = axes[s + n], axes[s]
    return t.transpose(axes).reshape(rho.shape)


def eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = np.asarray(m)
    if not is_hermitian(m):
        raise ShapeError("eigh requires a square Hermitian matrix")
    # symmetrize so LAPACK sees an exactly Hermitian operand
    return np.linalg.eigh((m + m.conj().T) / 2)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"trace_norm requires a square matrix, got {m.shape}")
    if is_hermitian(m, 1e-12):
        return float(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2)).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())


def von_neumann_entropy(rho: np.ndarray, base: float = 2.0) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-(w * np.log(w)).sum() / np.log(base))


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the same seed reproduces the same stream."""
    return np.random.Generator(np.random.PCG64(seed))


def derived_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """Independent child streams ``(seed, 0..n-1)``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase-fixed diagonal."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
