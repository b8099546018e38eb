"""Total-angular-momentum sector decompositions.

A sector ``q`` is described by an isometry ``V_q`` whose rows are the basis
vectors ``|J, M, p>`` written in the physical product basis. Row index is
``iM * multiplicity_dim + p``, i.e. the decohered factor M_q comes first and
the protected factor N_q second.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, InputError
from .spin import SpinJ, as_spin, coupling_isometry


@dataclass(frozen=True)
class SectorLabel:
    total_j: SpinJ
    multiplicity_dim: int
    decohered_dim: int

    @property
    def j(self) -> float:
        return self.total_j.j

    @property
    def protected(self) -> bool:
        return self.multiplicity_dim > 1

    def __str__(self) -> str:
        return f"J={self.total_j} (x{self.multiplicity_dim})"


@dataclass(frozen=True)
class SectorDecomposition:
    space_dims: tuple[int, ...]
    sectors: tuple[SectorLabel, ...]
    isometries: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return int(np.prod(self.space_dims))

    @property
    def projectors(self) -> tuple[np.ndarray, ...]:
        return tuple(V.conj().T @ V for V in self.isometries)

    def unitary(self) -> np.ndarray:
        """All sector bases stacked: physical -> virtual coordinates."""
        return np.vstack(self.isometries)

    def sector(self, j: float) -> int:
        """Index of the sector with total spin ``j``."""
        target = as_spin(j)
        for i, s in enumerate(self.sectors):
            if s.total_j == target:
                return i
        raise InputError(f"no sector with J={j}")


def _label(two_J: int, mult: int) -> SectorLabel:
    return SectorLabel(SpinJ(two_J), mult, two_J + 1)


def _freeze(arrs):
    for a in arrs:
        a.setflags(write=False)
    return tuple(arrs)


@lru_cache(maxsize=1)
def three_qubit_decomposition() -> SectorDecomposition:
    """Hand-written Schur-Weyl basis of three spin-1/2 particles.

    Rows of the J=1/2 isometry are ``|1/2, s, p>`` with ``s`` the decohered
    (M) index and ``p`` the protected index.
    """
    def e(bits: str) -> np.ndarray:
        v = np.zeros(8, dtype=complex)
        v[int(bits, 2)] = 1.0
        return v

    r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    quartet = np.array([
        e("000"),
        (e("001") + e("010") + e("100")) / r3,
        (e("110") + e("101") + e("011")) / r3,
        e("111"),
    ])
    doublet = np.array([
        (e("010") - e("100")) / r2,                  # s=0, p=0
        (2 * e("001") - e("010") - e("100")) / r6,   # s=0, p=1
        (e("011") - e("101")) / r2,                  # s=1, p=0
        (-2 * e("110") + e("101") + e("011")) / r6,  # s=1, p=1
    ])
    return SectorDecomposition(
        space_dims=(2, 2, 2),
        sectors=(_label(3, 1), _label(1, 2)),
        isometries=_freeze([quartet, doublet]),
    )


@lru_cache(maxsize=16)
def _qrf_system_decomposition(two_L: int) -> SectorDecomposition:
    d = two_L + 1
    U12 = coupling_isometry(SpinJ(two_L), SpinJ(two_L))  # (d*d, d*d), rows (J', M')
    # coupled-pair rows grouped by J' (descending), each block of length 2J'+1
    pair_rows = {}
    start = 0
    for two_Jp in range(2 * two_L, -1, -2):
        pair_rows[two_Jp] = U12[start:start + two_Jp + 1]
        start += two_Jp + 1

    # second coupling J' (x) 1/2 -> J, expressed on the physical basis
    # coupled[(two_J, two_Jp)] has rows M = J..-J
    coupled = {}
    for two_Jp, rows in pair_rows.items():
        W = coupling_isometry(SpinJ(two_Jp), SpinJ(1))  # rows (J, M) over |M'>|ms>
        phys = np.kron(rows, np.eye(2))                  # |M'>|ms> -> physical
        offset = 0
        for two_J in range(two_Jp + 1, abs(two_Jp - 1) - 1, -2):
            block = W[offset:offset + two_J + 1] @ phys
            coupled[(two_J, two_Jp)] = block
            offset += two_J + 1

    sectors, isos = [], []
    for two_J in range(2 * two_L + 1, 0, -2):
        # protected index ordered J' = J - 1/2 first, then J + 1/2
        parents = [tp for tp in (two_J - 1, two_J + 1) if 0 <= tp <= 2 * two_L]
        blocks = [coupled[(two_J, tp)] for tp in parents]
        V = np.stack(blocks, axis=1).reshape((two_J + 1) * len(parents), d * d * 2)
        sectors.append(_label(two_J, len(parents)))
        isos.append(V.astype(complex))
    return SectorDecomposition(space_dims=(d, d, 2), sectors=tuple(sectors), isometries=_freeze(isos))


def qrf_system_decomposition(L) -> SectorDecomposition:
    """Sectors of spin-L (x) spin-L (x) spin-1/2 by double Clebsch-Gordan coupling."""
    s = as_spin(L)
    if s.two_j < 1:
        raise InputError("frame spin must be at least 1/2")
    return _qrf_system_decomposition(s.two_j)


def two_spin_sector_probabilities(L, psi: np.ndarray) -> dict[float, float]:
    """Weight of a two spin-L state on each total-J sector, keyed by J (descending)."""
    s = as_spin(L)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (s.dim ** 2,):
        raise DimensionError(f"expected a ket of length {s.dim ** 2}, got {psi.shape}")
    amps = coupling_isometry(s, s) @ psi
    out = {}
    start = 0
    for two_J in range(2 * s.two_j, -1, -2):
        n = two_J + 1
        out[two_J / 2] = float(np.sum(np.abs(amps[start:start + n]) ** 2))
        start += n
    return out


def clear_caches() -> None:
    _qrf_system_decomposition.cache_clear()
