"""Figures of merit for frame quality.

Units
-----
``negativity`` is the standard (||rho^T_B||_1 - 1) / 2, which is 1/2 for a
two-qubit maximally entangled state. Preservation results are quoted as a
fraction of that maximum (:func:`singlet_fraction`), so a frame that keeps
all of a singlet's entanglement scores 1.

Bloch coordinates of the protected qubit are ``Tr(sigma_i rho)`` of the
*unnormalized* post-projection state. The affine-map figures divide these by
:data:`MEAN_SECTOR_WEIGHT`, the protected-sector weight of a maximally mixed
three-spin state, which is what puts the product-frame determinant at
``(2/9) sin^2 beta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError
from .linalg import partial_transpose, trace_norm
from .sectors import three_qubit_decomposition
from .twirl import QrfParams, TwirlOutcome, canonical_qrf_state

MAX_QUBIT_NEGATIVITY = 0.5
MEAN_SECTOR_WEIGHT = 0.5
NEG_CLAMP = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def negativity(rho: np.ndarray, dims: Sequence[int], cut: Sequence[int] | int) -> float:
    """Negativity across the bipartition ``cut`` | rest (transpose on ``cut``).

    Works for unnormalized ``rho`` too, returning ``Tr(rho) * N(rho / Tr rho)``.
    """
    rho = np.asarray(rho, dtype=complex)
    n = (trace_norm(partial_transpose(rho, dims, cut)) - np.trace(rho).real) / 2
    return 0.0 if n < NEG_CLAMP else float(n)


def negativity_batch(X: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Negativity of a stack ``(..., dA*dB, dA*dB)`` of (unnormalized) states, cut A|B."""
    da, db = dims
    sh = X.shape[:-2]
    pt = X.reshape(sh + (da, db, da, db)).swapaxes(-3, -1).reshape(sh + (da * db, da * db))
    pt = (pt + np.conj(np.swapaxes(pt, -1, -2))) / 2
    w = np.linalg.eigvalsh(pt)
    n = (np.abs(w).sum(-1) - w.sum(-1)) / 2
    return np.where(n < NEG_CLAMP, 0.0, n)


def singlet_fraction(n: float) -> float:
    """Negativity as a fraction of the two-qubit maximum."""
    return n / MAX_QUBIT_NEGATIVITY


def block_negativity(outcome: TwirlOutcome) -> float:
    """Probability-weighted negativity of the conditional states."""
    return float(sum(e.p * negativity(e.sigma, e.dims, 1) for e in outcome.entries if min(e.dims) > 1))


def entropy_of_entanglement(psi: np.ndarray, dims: tuple[int, int]) -> float:
    """Entropy (bits) of either reduced state of a bipartite pure state."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dims[0] * dims[1],):
        raise InputError(f"ket length {psi.shape} does not match dims {dims}")
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise InputError("ket is not normalized")
    s = np.linalg.svd(psi.reshape(dims), compute_uv=False) ** 2
    s = s[s > 1e-16]
    return float(-(s * np.log2(s)).sum())


def spin_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta)|0> + e^{i phi} sin(theta)|1>  (Bloch polar angle is 2 theta)."""
    return np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)])


def protected_state(params: QrfParams, rho_in: np.ndarray) -> np.ndarray:
    """Unnormalized protected-qubit state Tr_M[Pi_2 (frame (x) rho_in) Pi_2]."""
    if not params.primitive:
        raise InputError("Bloch images are defined for spin-1/2 frames")
    V = three_qubit_decomposition().isometries[1].reshape(2, 2, 8)
    q = canonical_qrf_state(params)
    full = np.kron(np.outer(q, q.conj()), rho_in)
    return np.einsum("spi,ij,sqj->pq", V.conj(), full, V)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    return np.array([np.trace(p @ rho).real for p in PAULI])


def bloch_image(params: QrfParams, theta: float, phi: float, normalize: bool = False) -> np.ndarray:
    """Protected-qubit Bloch vector for input ``|theta, phi>``.

    By default the vector of the unnormalized projected state (the form of
    the closed-form images); ``normalize=True`` divides by the sector weight.
    """
    psi = spin_state(theta, phi)
    rho = protected_state(params, np.outer(psi, psi.conj()))
    r = bloch_vector(rho)
    if normalize:
        w = np.trace(rho).real
        return r / w if w > 1e-15 else np.zeros(3)
    return r


@dataclass(frozen=True)
class AffineMap:
    """x -> A x + b on Bloch vectors, in sector-weight-normalized coordinates.

    ``A / scale`` and ``b / scale`` give the raw (unnormalized) map, which is
    contractive.
    """

    A: np.ndarray
    b: np.ndarray
    scale: float

    @property
    def det_a(self) -> float:
        return float(np.linalg.det(self.A))

    @property
    def volume_factor(self) -> float:
        return abs(self.det_a)

    @property
    def radius(self) -> float:
        return self.volume_factor ** (1 / 3)

    def __call__(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.b

    def raw(self, x) -> np.ndarray:
        return self(x) / self.scale


def affine_map(params: QrfParams) -> AffineMap:
    """Linear part and offset from the images of the Bloch vectors 0, x, y, z."""
    def image(x):
        rho_in = (np.eye(2) + sum(c * p for c, p in zip(x, PAULI))) / 2
        return bloch_vector(protected_state(params, rho_in))

    scale = 1 / MEAN_SECTOR_WEIGHT
    b = image((0.0, 0.0, 0.0))
    A = np.column_stack([image(e) - b for e in np.eye(3)])
    return AffineMap(A * scale, b * scale, scale)


@dataclass(frozen=True)
class MeritReport:
    negativity: float
    det_a: float
    volume_factor: float
    radius: float
    entropy: float


def merit_report(params: QrfParams, outcome: TwirlOutcome | None = None) -> MeritReport:
    amap = affine_map(params)
    return MeritReport(
        negativity=block_negativity(outcome) if outcome is not None else 0.0,
        det_a=amap.det_a,
        volume_factor=amap.volume_factor,
        radius=amap.radius,
        entropy=entropy_of_entanglement(canonical_qrf_state(params), (2, 2)),
    )


def approx_negativity(beta: float, gamma: float) -> float:
    """Reference curve |sin beta sin 2 gamma| / (3 sqrt 2), in singlet-fraction units."""
    return abs(np.sin(beta) * np.sin(2 * gamma)) / (3 * np.sqrt(2))
