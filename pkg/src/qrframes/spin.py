"""Spin-j representations: angular momentum matrices, rotations, coherent
states and Clebsch-Gordan coupling.

Basis order is descending m everywhere, so index 0 is ``|m = +j>`` and for
spin-1/2 ``|0> = |m=+1/2>``, ``|1> = |m=-1/2>``. Phases follow Condon-Shortley.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InputError


@dataclass(frozen=True, order=True)
class SpinJ:
    """Spin magnitude stored as ``two_j`` so half-integers are exact."""

    two_j: int

    def __post_init__(self):
        if self.two_j < 0:
            raise InputError(f"spin must be non-negative, got two_j={self.two_j}")

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order (descending)."""
        return self.j - np.arange(self.dim)

    def __str__(self) -> str:
        return str(self.two_j // 2) if self.two_j % 2 == 0 else f"{self.two_j}/2"


def as_spin(j) -> SpinJ:
    """Coerce a float, int, Fraction or SpinJ to SpinJ."""
    if isinstance(j, SpinJ):
        return j
    two_j = 2 * Fraction(j).limit_denominator(4)
    if two_j.denominator != 1:
        raise InputError(f"{j!r} is not a multiple of 1/2")
    return SpinJ(int(two_j))


def angular_momentum_ops(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Jx, Jy, Jz) for spin ``j`` from the ladder operators."""
    s = as_spin(j)
    m = s.m_values()
    # <m+1|J+|m> sits on the superdiagonal in descending-m order
    raise_amp = np.sqrt(s.j * (s.j + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(raise_amp, k=1).astype(complex)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


def ladder_ops(j) -> tuple[np.ndarray, np.ndarray]:
    jx, jy, _ = angular_momentum_ops(j)
    return jx + 1j * jy, jx - 1j * jy


def _unit_axis(axis) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise InputError(f"rotation axis must be a unit 3-vector, got {axis!r}")
    return n


def rotation_matrix(j, axis, angle: float) -> np.ndarray:
    """exp(-i angle n.J) in the spin-j representation."""
    n = _unit_axis(axis)
    jx, jy, jz = angular_momentum_ops(j)
    gen = n[0] * jx + n[1] * jy + n[2] * jz
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


def rotate_ket(j, axis, angle: float, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (as_spin(j).dim,):
        raise InputError(f"ket of length {psi.shape} does not match spin {j}")
    return rotation_matrix(j, axis, angle) @ psi


def coherent_state(L, beta: float) -> np.ndarray:
    """Highest-weight state rotated about y by ``beta`` (polar angle from z).

    Uses the top row of the Wigner d-matrix,
    ``sqrt(C(2L, L-m)) cos(beta/2)^(L+m) sin(beta/2)^(L-m)``, which is real and
    exact at the poles.
    """
    s = as_spin(L)
    c, sn = math.cos(beta / 2), math.sin(beta / 2)
    amps = [math.sqrt(math.comb(s.two_j, k)) * c ** (s.two_j - k) * sn ** k for k in range(s.dim)]
    return np.array(amps, dtype=complex)


def expectation(op: np.ndarray, psi: np.ndarray) -> complex:
    return np.vdot(psi, op @ psi)


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _cg_blocks(two_j1: int, two_j2: int) -> tuple[tuple[int, np.ndarray], ...]:
    """Per total-J coefficient arrays ``C[iM, i1, i2] = <j1 m1; j2 m2 | J M>``.

    Each fixed-M subspace is resolved by diagonalizing the (tridiagonal)
    total Casimir, whose eigenvalues J(J+1) are separated by at least 2, so
    the vectors stay accurate for large spins where repeated lowering does
    not. Phases: the stretched state has a positive ``m1 = j1`` component and
    each lower M is signed to overlap positively with J- applied to the one
    above (Condon-Shortley). Blocks are ordered by descending J.
    """
    j1, j2 = two_j1 / 2, two_j2 / 2
    d1, d2 = two_j1 + 1, two_j2 + 1
    m1 = j1 - np.arange(d1)
    m2 = j2 - np.arange(d2)
    low1 = np.sqrt(j1 * (j1 + 1) - m1[:-1] * (m1[:-1] - 1))
    low2 = np.sqrt(j2 * (j2 + 1) - m2[:-1] * (m2[:-1] - 1))
    two_Js = list(range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2))
    C = {tJ: np.zeros((tJ + 1, d1, d2)) for tJ in two_Js}
    casimir_base = j1 * (j1 + 1) + j2 * (j2 + 1)
    for two_M in range(two_j1 + two_j2, -(two_j1 + two_j2) - 1, -2):
        M = two_M / 2
        # product states with m1 + m2 = M, ordered by descending m1
        i1 = np.array([i for i in range(d1) if 0 <= round(j2 - (M - m1[i])) < d2])
        i2 = np.array([round(j2 - (M - m1[i])) for i in i1])
        mm1, mm2 = m1[i1], m2[i2]
        diag = casimir_base + 2 * mm1 * mm2
        # <m1, m2 | J1+ J2- + J1- J2+ | m1 - 1, m2 + 1>
        off = np.sqrt(j1 * (j1 + 1) - mm1[:-1] * (mm1[:-1] - 1)) * np.sqrt(j2 * (j2 + 1) - mm2[:-1] * (mm2[:-1] + 1))
        T = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
        _, vecs = np.linalg.eigh(T)
        # ascending eigenvalues <-> ascending J, starting at J = |M| or |j1-j2|
        allowed = [tJ for tJ in sorted(two_Js) if tJ >= abs(two_M)]
        for col, tJ in enumerate(allowed):
            v = vecs[:, col]
            iM = (tJ - two_M) // 2
            if iM == 0:
                sign = np.sign(v[0])
            else:
                prev = C[tJ][iM - 1]
                lowered = np.zeros((d1, d2))
                lowered[1:, :] += low1[:, None] * prev[:-1, :]
                lowered[:, 1:] += low2[None, :] * prev[:, :-1]
                sign = np.sign(v @ lowered[i1, i2])
            C[tJ][iM, i1, i2] = sign * v
    return tuple((tJ, C[tJ]) for tJ in two_Js)


@dataclass(frozen=True)
class CgTable:
    """Clebsch-Gordan table for ``j1 (x) j2``; ``entries[(J, M, m1, m2)]``."""

    j1: SpinJ
    j2: SpinJ
    entries: dict = field(repr=False)

    def __call__(self, J: float, M: float, m1: float, m2: float) -> float:
        return self.entries.get((float(J), float(M), float(m1), float(m2)), 0.0)

    def total_spins(self) -> list[float]:
        return sorted({k[0] for k in self.entries}, reverse=True)


def clebsch_gordan(j1, j2) -> CgTable:
    s1, s2 = as_spin(j1), as_spin(j2)
    m1 = s1.m_values()
    m2 = s2.m_values()
    entries = {}
    for two_J, C in _cg_blocks(s1.two_j, s2.two_j):
        J = two_J / 2
        for iM, i1, i2 in zip(*np.nonzero(C)):
            entries[(J, float(J - iM), float(m1[i1]), float(m2[i2]))] = float(C[iM, i1, i2])
    return CgTable(s1, s2, entries)


@lru_cache(maxsize=32)
def _coupling_isometry(two_j1: int, two_j2: int) -> np.ndarray:
    d = (two_j1 + 1) * (two_j2 + 1)
    rows = [C.reshape(two_J + 1, d) for two_J, C in _cg_blocks(two_j1, two_j2)]
    U = np.vstack(rows)
    U.setflags(write=False)
    return U


def coupling_isometry(j1, j2) -> np.ndarray:
    """Real orthogonal map from ``|m1>|m2>`` to coupled ``|J M>``.

    Rows are ordered by descending J, then descending M; columns follow the
    product basis with the first factor most significant.
    """
    s1, s2 = as_spin(j1), as_spin(j2)
    return _coupling_isometry(s1.two_j, s2.two_j)


def coupled_labels(j1, j2) -> list[tuple[float, float]]:
    """(J, M) label of each row of :func:`coupling_isometry`."""
    s1, s2 = as_spin(j1), as_spin(j2)
    out = []
    for two_J in range(s1.two_j + s2.two_j, abs(s1.two_j - s2.two_j) - 1, -2):
        out.extend((two_J / 2, two_J / 2 - k) for k in range(two_J + 1))
    return out


def clear_caches() -> None:
    """Drop memoized coupling data (after monkeypatching, in fault-injection tests)."""
    _coupling_isometry.cache_clear()
    from . import sectors

    sectors.clear_caches()


def cg_racah(j1: float, j2: float, J: float, m1: float, m2: float, M: float) -> float:
    """Racah's closed formula in exact integer arithmetic.

    Independent of the recursion used by :func:`clebsch_gordan`; used as an
    oracle by tests and ``verify``.
    """
    t = [Fraction(x).limit_denominator(2) for x in (j1, j2, J, m1, m2, M)]
    j1, j2, J, m1, m2, M = t
    if m1 + m2 != M or not abs(j1 - j2) <= J <= j1 + j2:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0.0
    f = lambda x: math.factorial(int(x))  # noqa: E731
    pre = Fraction((2 * J + 1) * f(J + j1 - j2) * f(J - j1 + j2) * f(j1 + j2 - J), f(j1 + j2 + J + 1))
    pre *= f(J + M) * f(J - M) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2)
    total = Fraction(0)
    for k in range(0, int(j1 + j2 - J) + 1):
        den = [k, j1 + j2 - J - k, j1 - m1 - k, j2 + m2 - k, J - j2 + m1 + k, J - j1 - m2 + k]
        if any(x < 0 for x in den):
            continue
        term = Fraction(1, math.prod(f(x) for x in den))
        total += -term if k % 2 else term
    return math.sqrt(pre) * float(total)
