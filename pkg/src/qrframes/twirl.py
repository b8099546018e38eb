"""G-twirling over rotations and the operations it induces on a single spin.

Ordering convention: on Alice's side the two frame spins come first and the
system spin last (``H_frame (x) H_system``); anything else (Bob's spin) is a
trailing untouched factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InputError
from .linalg import derived_rngs, tensor
from .sectors import SectorDecomposition, SectorLabel, qrf_system_decomposition, three_qubit_decomposition
from .spin import SpinJ, as_spin, coherent_state, rotation_matrix

KRAUS_FORMS = ("projection", "printed")


@dataclass(frozen=True)
class QrfParams:
    """Frame state parameters: Schmidt angle, inclination, relative phase, spin.

    For ``L > 1/2`` only product coherent-state frames are modelled and
    ``alpha``/``delta`` are ignored.
    """

    alpha: float = 0.0
    beta: float = np.pi / 2
    delta: float = 0.0
    L: SpinJ = SpinJ(1)
    product_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "L", as_spin(self.L))
        if self.L.two_j < 1:
            raise InputError("frame spin must be at least 1/2")
        if not -1e-12 <= self.beta <= np.pi + 1e-12:
            raise InputError(f"beta must lie in [0, pi], got {self.beta}")
        if self.product_only and self.alpha != 0.0:
            object.__setattr__(self, "alpha", 0.0)

    @property
    def primitive(self) -> bool:
        return self.L.two_j == 1

    def decomposition(self) -> SectorDecomposition:
        return three_qubit_decomposition() if self.primitive else qrf_system_decomposition(self.L)


def _primitive_kets(alpha, beta, delta) -> np.ndarray:
    """Canonical two-qubit frame kets; broadcasts over array arguments."""
    alpha, beta, delta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, delta)))
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta / 2), np.sin(beta / 2)
    ph = np.exp(1j * delta)
    return np.stack([ca * cb, ca * ph * sb, sa * sb, -sa * np.conj(ph) * cb], axis=-1)


def canonical_qrf_state(params: QrfParams) -> np.ndarray:
    """Ket of the reference frame (two spins, first factor most significant)."""
    if params.primitive:
        return _primitive_kets(params.alpha, params.beta, params.delta)
    up = coherent_state(params.L, 0.0)
    return np.kron(up, coherent_state(params.L, params.beta))


def _check_state(phi: np.ndarray, dim: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (dim,):
        raise DimensionError(f"expected a ket of length {dim}, got {phi.shape}")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise InputError("input ket is not normalized")
    return phi


# ---------------------------------------------------------------------------
# Twirl channels
# ---------------------------------------------------------------------------

def gtwirl_exact(rho: np.ndarray, decomp: SectorDecomposition, extra_dim: int = 1) -> np.ndarray:
    """Rotation average via the sector formula.

    ``rho`` acts on ``decomp``'s space tensored with a trailing untouched
    factor of dimension ``extra_dim``.
    """
    rho = np.asarray(rho, dtype=complex)
    D, E = decomp.dim, extra_dim
    if rho.shape != (D * E, D * E):
        raise DimensionError(f"rho has shape {rho.shape}, expected {(D * E, D * E)}")
    out = np.zeros_like(rho)
    for label, V in zip(decomp.sectors, decomp.isometries):
        dM, dN = label.decohered_dim, label.multiplicity_dim
        W = np.kron(V, np.eye(E))
        X = (W @ rho @ W.conj().T).reshape(dM, dN * E, dM, dN * E)
        Y = np.einsum("aiaj->ij", X)
        virt = np.kron(np.eye(dM) / dM, Y)
        out += W.conj().T @ virt @ W
    return out


def haar_su2(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar-random SU(2) matrices from uniform unit quaternions."""
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q.T
    # U = w I - i (x sx + y sy + z sz)
    U = np.empty((n, 2, 2), dtype=complex)
    U[:, 0, 0] = w - 1j * z
    U[:, 0, 1] = -y - 1j * x
    U[:, 1, 0] = y - 1j * x
    U[:, 1, 1] = w + 1j * z
    return U


def spin_representation(U: np.ndarray, j) -> np.ndarray:
    """Spin-j matrix of the rotation carried by the SU(2) element ``U``."""
    s = as_spin(j)
    if s.two_j == 1:
        return U
    if s.two_j == 0:
        return np.ones((1, 1), dtype=complex)
    w = np.clip(np.real(U[0, 0] + U[1, 1]) / 2, -1.0, 1.0)
    vec = np.array([-np.imag(U[0, 1] + U[1, 0]) / 2, np.real(U[1, 0] - U[0, 1]) / 2, -np.imag(U[0, 0] - U[1, 1]) / 2])
    nrm = np.linalg.norm(vec)
    if nrm < 1e-15:
        return np.eye(s.dim, dtype=complex) * (1 if w > 0 else (-1) ** s.two_j)
    return rotation_matrix(s, vec / nrm, 2 * np.arctan2(nrm, w))


def gtwirl_montecarlo(rho: np.ndarray, spins: Sequence, samples: int, seed: int,
                      extra_dim: int = 1, chunk: int = 4096) -> np.ndarray:
    """Sample average of ``U(g) rho U(g)^dagger`` over Haar-random rotations.

    The same rotation acts on every listed spin; a trailing factor of
    dimension ``extra_dim`` is left alone. Chunk ``i`` draws from the child
    stream ``(seed, i)`` and chunks are summed in order.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    spins = [as_spin(j) for j in spins]
    D = int(np.prod([s.dim for s in spins])) * extra_dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (D, D):
        raise DimensionError(f"rho has shape {rho.shape}, expected {(D, D)}")
    n_chunks = -(-samples // chunk)
    acc = np.zeros_like(rho)
    all_half = all(s.two_j == 1 for s in spins)
    for i, rng in enumerate(derived_rngs(seed, n_chunks)):
        n = min(chunk, samples - i * chunk)
        Us = haar_su2(n, rng)
        if all_half:
            full = Us
            for _ in spins[1:]:
                full = np.einsum("nab,ncd->nacbd", full, Us).reshape(n, full.shape[1] * 2, -1)
            if extra_dim > 1:
                full = np.einsum("nab,cd->nacbd", full, np.eye(extra_dim)).reshape(n, D, D)
        else:
            full = np.stack([tensor(*[spin_representation(U, s) for s in spins], np.eye(extra_dim)) for U in Us])
        acc += np.einsum("nab,bc,ndc->ad", full, rho, full.conj())
    return acc / samples


# ---------------------------------------------------------------------------
# Induced operations on the system spin
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KrausSet:
    """Selective operations on one spin-1/2, grouped by sector.

    ``operators[k]`` has shape ``(dM, dN, 2)``: one ``dN x 2`` operator per
    decohered index, mapping the input spin to sector ``k``'s protected factor.
    """

    sectors: tuple[SectorLabel, ...]
    operators: tuple[np.ndarray, ...] = field(repr=False)

    def completeness(self) -> np.ndarray:
        """Sum of M^dagger M over every operator in the set."""
        return sum(np.einsum("api,apj->ij", ops.conj(), ops) for ops in self.operators)

    def matrices(self, k: int) -> list[np.ndarray]:
        return list(self.operators[k])


def _kraus_from_kets(kets: np.ndarray, decomp: SectorDecomposition) -> list[np.ndarray]:
    """Contract frame kets ``(..., d_frame)`` through every sector isometry.

    Returns per sector an array ``(..., dM, dN, 2)`` with entries
    ``<J, s, p| frame (x) x>``.
    """
    out = []
    for label, V in zip(decomp.sectors, decomp.isometries):
        dM, dN = label.decohered_dim, label.multiplicity_dim
        Vr = V.conj().reshape(dM, dN, -1, 2)
        out.append(np.einsum("spqx,...q->...spx", Vr, kets))
    return out


def induced_kraus(params: QrfParams) -> KrausSet:
    """Operators on the system spin obtained by projecting onto each sector.

    Every sector is included (those without a protected factor give 1 x 2
    operators), so the set is complete.
    """
    decomp = params.decomposition()
    ops = _kraus_from_kets(canonical_qrf_state(params), decomp)
    return KrausSet(decomp.sectors, tuple(ops))


def printed_kraus_batch(alpha, beta, delta) -> np.ndarray:
    """Closed-form pair of J=1/2 operators with ``M_2[1, 0]`` dropped, broadcast.

    Returns ``(..., 2, 2, 2)``. This form has a zero where the projection gives
    ``M_2[1, 0] = sqrt(2/3) e^{-i delta} sin(alpha) cos(beta/2)``; the two agree
    whenever ``alpha = 0``.
    """
    alpha, beta, delta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, beta, delta)))
    ph = np.exp(1j * delta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    sb, cb = np.sin(beta / 2), np.cos(beta / 2)
    minus = (ph * ca - sa) * sb / np.sqrt(2)
    plus = (ph * ca + sa) * sb / np.sqrt(6)
    M = np.zeros(alpha.shape + (2, 2, 2), dtype=complex)
    M[..., 0, 0, 0] = minus
    M[..., 0, 1, 0] = -plus
    M[..., 0, 1, 1] = np.sqrt(2 / 3) * ca * cb
    M[..., 1, 0, 1] = minus
    M[..., 1, 1, 1] = plus
    return M


def printed_kraus(params: QrfParams) -> KrausSet:
    """Closed-form J=1/2 operators without the ``M_2[1, 0]`` entry (spin-1/2 frames).

    Not complete for entangled frames. Selected with ``form="printed"`` to
    reproduce the reference entangled-frame optima.
    """
    if not params.primitive:
        raise InputError("closed-form operators exist only for spin-1/2 frames")
    label = three_qubit_decomposition().sectors[1]
    return KrausSet((label,), (printed_kraus_batch(params.alpha, params.beta, params.delta),))


def kraus_for(params: QrfParams, form: str = "projection") -> KrausSet:
    if form == "projection":
        return induced_kraus(params)
    if form == "printed":
        return printed_kraus(params)
    raise InputError(f"unknown Kraus form {form!r}; choose from {KRAUS_FORMS}")


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutcomeEntry:
    label: tuple[SectorLabel, ...]
    p: float
    sigma: np.ndarray = field(repr=False)
    dims: tuple[int, int]

    @property
    def name(self) -> str:
        return " & ".join(str(s.total_j) for s in self.label)


@dataclass(frozen=True)
class TwirlOutcome:
    """Sector-resolved result: probabilities and conditional A:B states."""

    entries: tuple[OutcomeEntry, ...]

    @property
    def total_probability(self) -> float:
        return float(sum(e.p for e in self.entries))

    def assembled(self) -> tuple[np.ndarray, tuple[int, int, int]]:
        """Flag-labelled global state ``sum_k p_k |k><k| (x) sigma_k``.

        Conditional states are zero-padded to common local dimensions.
        Returns the matrix and dims ``(flag, A, B)``; the cut is A|B with the
        flag on A's side.
        """
        K = len(self.entries)
        da = max(e.dims[0] for e in self.entries)
        db = max(e.dims[1] for e in self.entries)
        out = np.zeros((K * da * db, K * da * db), dtype=complex)
        for k, e in enumerate(self.entries):
            a, b = e.dims
            pad = np.zeros((da, db, da, db), dtype=complex)
            pad[:a, :b, :a, :b] = e.sigma.reshape(a, b, a, b)
            flag = np.zeros((K, K))
            flag[k, k] = 1.0
            out += e.p * np.kron(flag, pad.reshape(da * db, da * db))
        return out, (K, da, db)


def _entry(label, X: np.ndarray, dims) -> OutcomeEntry:
    p = float(np.trace(X).real)
    if p > 1e-15:
        sigma = X / p
    else:
        p = 0.0
        sigma = np.eye(X.shape[0], dtype=complex) / X.shape[0]
    return OutcomeEntry(tuple(label), p, sigma, tuple(dims))


def apply_local(ops: np.ndarray, phi: np.ndarray, side: int) -> np.ndarray:
    """Unnormalized ``sum_s (M_s (x) 1) phi phi^dagger (M_s (x) 1)^dagger``.

    ``ops`` is ``(dM, dOut, 2)``; ``phi`` a ket on (A-like, B-like) factors
    given as a matrix ``(dA, dB)`` of amplitudes. ``side`` 0 acts on the row
    index, 1 on the column index.
    """
    if side == 0:
        vecs = np.einsum("spx,xb->spb", ops, phi)
    else:
        vecs = np.einsum("spx,ax->sap", ops, phi)
    flat = vecs.reshape(vecs.shape[0], -1)
    return flat.T @ flat.conj()


def twirl_alice(params: QrfParams, phi: np.ndarray, form: str = "projection") -> TwirlOutcome:
    """Twirl Alice's frame together with her half of the two-qubit state ``phi``."""
    amps = _check_state(phi, 4).reshape(2, 2)
    kraus = kraus_for(params, form)
    entries = []
    for label, ops in zip(kraus.sectors, kraus.operators):
        X = apply_local(ops, amps, side=0)
        entries.append(_entry((label,), X, (ops.shape[1], 2)))
    return TwirlOutcome(tuple(entries))


def twirl_both(params_a: QrfParams, params_b: QrfParams, phi: np.ndarray,
               form: str = "projection") -> TwirlOutcome:
    """Independent twirls at both ends: composed selective operations E_B o E_A."""
    if params_a.primitive != params_b.primitive:
        raise InputError("both frames must be primitive or both spin-L")
    amps = _check_state(phi, 4).reshape(2, 2)
    ka, kb = kraus_for(params_a, form), kraus_for(params_b, form)
    entries = []
    for la, opa in zip(ka.sectors, ka.operators):
        # vectors after Alice's operator: (sA, pA, b)
        va = np.einsum("spx,xb->spb", opa, amps)
        for lb, opb in zip(kb.sectors, kb.operators):
            vecs = np.einsum("tqy,spy->stpq", opb, va)
            flat = vecs.reshape(vecs.shape[0] * vecs.shape[1], -1)
            X = flat.T @ flat.conj()
            entries.append(_entry((la, lb), X, (opa.shape[1], opb.shape[1])))
    return TwirlOutcome(tuple(entries))


def singlet() -> np.ndarray:
    return np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def partially_entangled(gamma: float) -> np.ndarray:
    """cos(gamma)|01> - sin(gamma)|10>."""
    return np.array([0, np.cos(gamma), -np.sin(gamma), 0], dtype=complex)
