"""Rotation-invariant three-spin observables that read out the protected qubit.

On the J=1/2 sector basis ``|1/2, s, p>`` the readout operators act as
``1_s (x) sigma_i / 2`` on the protected index, so they carry spin-1/2
normalization: they obey [N_i, N_j] = i eps_ijk N_k and N_i^2 = Pi_2 / 4.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .linalg import tensor
from .sectors import three_qubit_decomposition
from .spin import angular_momentum_ops


@lru_cache(maxsize=1)
def spin_vectors() -> tuple[tuple[np.ndarray, ...], ...]:
    """J_a = (Jx, Jy, Jz) of each of three spin-1/2 particles on the 8-dim space."""
    ops = angular_momentum_ops(0.5)
    eye = np.eye(2)
    out = []
    for a in range(3):
        out.append(tuple(tensor(*[o if k == a else eye for k in range(3)]) for o in ops))
    return tuple(out)


def dot(a: int, b: int) -> np.ndarray:
    Ja, Jb = spin_vectors()[a], spin_vectors()[b]
    return sum(x @ y for x, y in zip(Ja, Jb))


def triple(a: int, b: int, c: int) -> np.ndarray:
    """(J_a x J_b) . J_c"""
    A, B, C = spin_vectors()[a], spin_vectors()[b], spin_vectors()[c]
    cross = (A[1] @ B[2] - A[2] @ B[1], A[2] @ B[0] - A[0] @ B[2], A[0] @ B[1] - A[1] @ B[0])
    return sum(x @ y for x, y in zip(cross, C))


@dataclass(frozen=True)
class ObservableSet:
    S: np.ndarray
    Nx: np.ndarray
    Ny: np.ndarray
    Nz: np.ndarray

    @property
    def N(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.Nx, self.Ny, self.Nz


@lru_cache(maxsize=1)
def build_observables() -> ObservableSet:
    r3 = np.sqrt(3)
    S = (dot(0, 1) + dot(1, 2) + dot(0, 2)) / 3
    Nx = (dot(1, 2) - dot(0, 2)) / r3
    Ny = 2 / r3 * triple(0, 1, 2)
    Nz = (dot(1, 2) + dot(0, 2) - 2 * dot(0, 1)) / 3
    return ObservableSet(S, Nx, Ny, Nz)


def permutation_unitary(perm: tuple[int, int, int]) -> np.ndarray:
    """Unitary moving the state of qubit ``k`` to position ``perm[k]``."""
    P = np.zeros((8, 8))
    for i in range(8):
        bits = [(i >> (2 - k)) & 1 for k in range(3)]
        new = [0, 0, 0]
        for k, b in enumerate(bits):
            new[perm[k]] = b
        P[new[0] * 4 + new[1] * 2 + new[2], i] = 1.0
    return P


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def cyclic_rotation_residual(obs: ObservableSet | None = None) -> tuple[float, float]:
    """Best 120-degree virtual rotation matching the cyclic relabelling.

    Returns ``(residual, angle_degrees)`` where the conjugated triple
    ``P N_i P^dagger`` is compared with ``R_y(angle) N`` for angles +-120.
    """
    obs = obs or build_observables()
    P = permutation_unitary((1, 2, 0))
    moved = [P @ n @ P.T for n in obs.N]
    best = (np.inf, 0.0)
    for deg in (120.0, -120.0):
        R = _rot_y(np.radians(deg))
        pred = [sum(R[i, j] * obs.N[j] for j in range(3)) for i in range(3)]
        res = max(np.abs(m - p).max() for m, p in zip(moved, pred))
        best = min(best, (res, deg))
    return best


def verify_identities() -> dict[str, float]:
    """Maximum residuals of the operator identities behind the readout observables."""
    obs = build_observables()
    Pi2 = three_qubit_decomposition().projectors[1]
    out = {}
    # order-2 with order-2, all ordered distinct triples (a, b, c)
    out["twotwo"] = max(
        np.abs(_comm(dot(a, c), dot(b, c)) - 1j * triple(a, b, c)).max()
        for a, b, c in permutations(range(3))
    )
    out["fifthorder"] = max(
        np.abs(_comm(dot(b, c), triple(a, b, c)) - 0.5j * (dot(a, c) - dot(a, b))).max()
        for a, b, c in permutations(range(3))
    )
    N = obs.N
    eps = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    out["su2"] = max(np.abs(_comm(N[i], N[j]) - 1j * N[k]).max() for i, j, k in eps)
    out["square_quarter_projector"] = max(np.abs(n @ n - Pi2 / 4).max() for n in N)
    out["square_projector"] = max(np.abs(n @ n - Pi2).max() for n in N)
    out["hermitian"] = max(np.abs(m - m.conj().T).max() for m in (obs.S, *N))
    out["cyclic_rotation"] = cyclic_rotation_residual(obs)[0]
    return out
