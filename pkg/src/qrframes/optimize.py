"""Parameter sweeps and study drivers.

Every sweep is an exhaustive grid followed (optionally) by coordinate-wise
golden-section refinement from the best grid point. Objectives are
vectorized over the grid and evaluated in fixed-size chunks, so results do
not depend on the number of worker threads.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import InputError
from .measures import MAX_QUBIT_NEGATIVITY, MEAN_SECTOR_WEIGHT, negativity_batch
from .sectors import three_qubit_decomposition, qrf_system_decomposition, two_spin_sector_probabilities
from .spin import SpinJ, angular_momentum_ops, as_spin, coherent_state
from .twirl import KRAUS_FORMS, QrfParams, _kraus_from_kets, _primitive_kets, printed_kraus_batch

OBJECTIVES = ("volume", "negativity_a", "negativity_ab")
PARAM_NAMES = ("alpha", "beta", "delta", "gamma")
DEFAULT_FIXED = {"alpha": 0.0, "beta": np.pi / 2, "delta": 0.0, "gamma": np.pi / 4}
DEFAULT_RANGES = {
    "alpha": (-np.pi / 2, np.pi / 2, 41),
    "beta": (0.0, np.pi, 181),
    "delta": (-np.pi, np.pi, 25),
    "gamma": (0.0, np.pi / 2, 25),
}
MAX_L = 8
CHUNK = 32768


@dataclass(frozen=True)
class SweepConfig:
    """What to sweep and how.

    ``grid`` maps swept parameter names to ``(min, max, steps)`` in radians;
    parameters not in ``grid`` are held at ``fixed`` (or :data:`DEFAULT_FIXED`).
    """

    objective: str = "negativity_a"
    grid: dict = field(default_factory=lambda: {"beta": DEFAULT_RANGES["beta"]})
    fixed: dict = field(default_factory=dict)
    gamma: float | None = None
    refine: bool = True
    refine_tolerance: float = 1e-4
    L: float = 0.5
    seed: int = 0
    kraus: str = "projection"
    identical_frames: bool = True
    threads: int = 1
    allow_large_L: bool = False

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise InputError(f"objective must be one of {OBJECTIVES}")
        if self.kraus not in KRAUS_FORMS:
            raise InputError(f"kraus must be one of {KRAUS_FORMS}")
        for name, (lo, hi, steps) in self.grid.items():
            if name not in PARAM_NAMES:
                raise InputError(f"unknown parameter {name!r}")
            if steps < 2 or not hi > lo:
                raise InputError(f"grid for {name} needs steps >= 2 and max > min")
        if self.refine_tolerance <= 0:
            raise InputError("refine_tolerance must be positive")
        s = as_spin(self.L)
        if s.two_j > 2 * MAX_L and not self.allow_large_L:
            raise InputError(f"L > {MAX_L} is disabled by default (allow_large_L=True to override)")
        if s.two_j > 1 and (set(self.grid) - {"beta"} or self.objective != "negativity_a"):
            raise InputError("spin-L frames support only the beta sweep of the negativity_a objective")
        if s.two_j > 1 and self.kraus != "projection":
            raise InputError("closed-form operators exist only for spin-1/2 frames")
        if self.objective == "negativity_ab" and not self.identical_frames:
            raise InputError("only identical frames are supported for negativity_ab")

    def value_of(self, name: str) -> float:
        if name == "gamma" and self.gamma is not None:
            return float(self.gamma)
        return float(self.fixed.get(name, DEFAULT_FIXED[name]))

    def axes(self) -> dict[str, np.ndarray]:
        return {k: np.linspace(lo, hi, int(n)) for k, (lo, hi, n) in self.grid.items()}

    def as_record(self) -> dict:
        return {
            "objective": self.objective,
            "grid": {k: [float(lo), float(hi), int(n)] for k, (lo, hi, n) in sorted(self.grid.items())},
            "fixed": {k: self.value_of(k) for k in PARAM_NAMES if k not in self.grid},
            "refine": self.refine,
            "refine_tolerance": self.refine_tolerance,
            "L": float(self.L),
            "seed": self.seed,
            "kraus": self.kraus,
            "identical_frames": self.identical_frames,
        }


@dataclass
class OptimumReport:
    best_params: dict
    best_value: float
    grid_best_params: dict
    grid_best_value: float
    axes: dict = field(repr=False)
    values: np.ndarray = field(repr=False)
    wall_time: float = 0.0
    evaluations: int = 0

    def qrf_params(self, L: float = 0.5) -> QrfParams:
        p = self.best_params
        return QrfParams(alpha=p["alpha"], beta=p["beta"], delta=p["delta"], L=L)

    def grid_trace(self):
        """Yield ``(params, value)`` over the grid in C order."""
        names = list(self.axes)
        for idx in np.ndindex(self.values.shape):
            yield {n: float(self.axes[n][i]) for n, i in zip(names, idx)}, float(self.values[idx])

    def profiles(self) -> dict[str, np.ndarray]:
        """Best objective along each swept axis, maximized over the others."""
        names = list(self.axes)
        out = {}
        for k, n in enumerate(names):
            other = tuple(i for i in range(len(names)) if i != k)
            out[n] = self.values.max(axis=other) if other else self.values
        return out


# ---------------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------------

def _phi_amps(gamma: np.ndarray) -> np.ndarray:
    """Amplitude matrices (..., 2, 2) of cos g |01> - sin g |10>."""
    a = np.zeros(np.shape(gamma) + (2, 2), dtype=complex)
    a[..., 0, 1] = np.cos(gamma)
    a[..., 1, 0] = -np.sin(gamma)
    return a


def _local_states(ops: np.ndarray, amps: np.ndarray) -> np.ndarray:
    """Unnormalized sum_s (M_s (x) 1) phi phi^dag (...)^dag, batched.

    ``ops`` (..., dM, dN, 2), ``amps`` (..., 2, 2) -> (..., dN*2, dN*2).
    """
    v = np.einsum("...spx,...xb->...spb", ops, amps)
    sh = v.shape
    flat = v.reshape(sh[:-3] + (sh[-3], sh[-2] * sh[-1]))
    return np.einsum("...si,...sj->...ij", flat, flat.conj())


def _both_states(ops_a: np.ndarray, ops_b: np.ndarray, amps: np.ndarray) -> np.ndarray:
    v = np.einsum("...spx,...tqy,...xy->...stpq", ops_a, ops_b, amps)
    sh = v.shape
    flat = v.reshape(sh[:-4] + (sh[-4] * sh[-3], sh[-2] * sh[-1]))
    return np.einsum("...si,...sj->...ij", flat, flat.conj())


class _SpinLFrames:
    """Cached per-L data for coherent-state frames |L,L> (x) |n(beta), L>."""

    def __init__(self, L: SpinJ):
        self.L = L
        self.decomp = qrf_system_decomposition(L)
        _, jy, _ = angular_momentum_ops(L)
        self.w, self.v = np.linalg.eigh(jy)
        self.top = self.v.conj().T[:, 0]
        d = L.dim
        # only m1 = L (first block of the frame's product basis) is populated
        self.rows = []
        for label, V in zip(self.decomp.sectors, self.decomp.isometries):
            Vr = V.conj().reshape(label.decohered_dim, label.multiplicity_dim, d, d, 2)[:, :, 0]
            self.rows.append((label, Vr))

    def coherent(self, beta: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * np.multiply.outer(beta, self.w))
        return np.einsum("ij,...j,j->...i", self.v, phases, self.top)

    def kraus(self, beta: np.ndarray):
        kets = self.coherent(beta)
        for label, Vr in self.rows:
            yield label, np.einsum("spqx,...q->...spx", Vr, kets)


_SPIN_L_CACHE: dict[int, _SpinLFrames] = {}


def _spin_l_frames(L: SpinJ) -> _SpinLFrames:
    cached = _SPIN_L_CACHE.get(L.two_j)
    if cached is None or cached.decomp is not qrf_system_decomposition(L):
        _SPIN_L_CACHE[L.two_j] = _SpinLFrames(L)
    return _SPIN_L_CACHE[L.two_j]


def _primitive_kraus(cfg: SweepConfig, a, b, d) -> np.ndarray:
    """(..., dM=2, dN=2, 2) operators for the protected sector of a spin-1/2 frame."""
    if cfg.kraus == "printed":
        return printed_kraus_batch(a, b, d)
    kets = _primitive_kets(a, b, d)
    return _kraus_from_kets(kets, three_qubit_decomposition())[1]


def evaluate(cfg: SweepConfig, points: dict[str, np.ndarray]) -> np.ndarray:
    """Objective at broadcastable parameter arrays (missing names use fixed values).

    Units: ``volume`` returns |det A| (normalized Bloch coordinates);
    negativity objectives return the singlet fraction.
    """
    P = {n: np.asarray(points[n], dtype=float) if n in points else cfg.value_of(n) for n in PARAM_NAMES}
    a, b, d, g = np.broadcast_arrays(P["alpha"], P["beta"], P["delta"], P["gamma"])
    L = as_spin(cfg.L)
    if cfg.objective == "volume":
        return _volume(a, b, d)
    amps = _phi_amps(g)
    if L.two_j > 1:
        total = np.zeros(b.shape)
        for label, ops in _spin_l_frames(L).kraus(b):
            if label.multiplicity_dim < 2:
                continue
            total += negativity_batch(_local_states(ops, amps), (label.multiplicity_dim, 2))
        return total / MAX_QUBIT_NEGATIVITY
    ops = _primitive_kraus(cfg, a, b, d)
    if cfg.objective == "negativity_a":
        X = _local_states(ops, amps)
    else:
        X = _both_states(ops, ops, amps)
    return negativity_batch(X, (2, 2)) / MAX_QUBIT_NEGATIVITY


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _volume(a, b, d) -> np.ndarray:
    kets = _primitive_kets(a, b, d)
    ops = _kraus_from_kets(kets, three_qubit_decomposition())[1]  # (..., 2, 2, 2)

    def bloch(rho_in):
        out = np.einsum("...spx,xy,...sqy->...pq", ops, rho_in, ops.conj())
        return np.einsum("kqp,...pq->...k", _PAULI, out).real

    b0 = bloch(np.eye(2) / 2)
    cols = [bloch((np.eye(2) + _PAULI[k]) / 2) - b0 for k in range(3)]
    A = np.stack(cols, axis=-1) / MEAN_SECTOR_WEIGHT
    return np.abs(np.linalg.det(A))


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi] to bracket width ``tol``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _grid_values(cfg: SweepConfig, axes: dict[str, np.ndarray]) -> np.ndarray:
    names = list(axes)
    shape = tuple(len(axes[n]) for n in names)
    mesh = np.meshgrid(*[axes[n] for n in names], indexing="ij")
    flat = {n: m.ravel() for n, m in zip(names, mesh)}
    total = int(np.prod(shape))
    starts = range(0, total, CHUNK)

    def run(s):
        return evaluate(cfg, {n: v[s:s + CHUNK] for n, v in flat.items()})

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return np.concatenate(parts).reshape(shape)


def _refine(cfg: SweepConfig, start: dict[str, float], axes: dict[str, np.ndarray]) -> tuple[dict, float, int]:
    point = dict(start)
    calls = 0

    def f_at(name):
        def f(x):
            nonlocal calls
            calls += 1
            return float(evaluate(cfg, {**point, name: np.array(x)}))
        return f

    best = float(evaluate(cfg, point))
    steps = {n: (ax[1] - ax[0]) for n, ax in axes.items()}
    bounds = {n: (cfg.grid[n][0], cfg.grid[n][1]) for n in axes}
    for _ in range(200):
        before = best
        for name in axes:
            lo = max(bounds[name][0], point[name] - steps[name])
            hi = min(bounds[name][1], point[name] + steps[name])
            x, fx = golden_section_max(f_at(name), lo, hi, cfg.refine_tolerance)
            if fx > best:
                point[name], best = x, fx
        if best - before <= 1e-13:
            break
    return point, best, calls


def _wrap(x: float) -> float:
    return float((x + np.pi) % (2 * np.pi) - np.pi)


def _canonical(cfg: SweepConfig, point: dict, value: float) -> dict:
    """Pick a representative among exactly equivalent optima.

    The frame state maps to itself (up to phase or relabelling) under
    alpha -> -alpha with delta -> delta + pi, and under alpha -> +-pi/2 - alpha.
    Prefer small |delta|, then small |alpha|, then alpha <= 0.
    """
    if "alpha" not in point and "delta" not in point:
        return point
    a0, d0 = point.get("alpha", cfg.value_of("alpha")), point.get("delta", cfg.value_of("delta"))
    cands = []
    for a in (a0, -a0, np.pi / 2 - a0, -np.pi / 2 - a0, a0 - np.pi / 2, a0 + np.pi / 2):
        for d in (d0, _wrap(d0 + np.pi), -d0, _wrap(np.pi - d0)):
            cands.append((float(a), float(d)))
    out, key = point, None
    for a, d in cands:
        trial = dict(point)
        if "alpha" in point:
            trial["alpha"] = a
        elif not np.isclose(a, a0):
            continue
        if "delta" in point:
            trial["delta"] = d
        elif not np.isclose(d, d0):
            continue
        if any(not (cfg.grid[n][0] - 1e-12 <= trial[n] <= cfg.grid[n][1] + 1e-12) for n in trial):
            continue
        if abs(float(evaluate(cfg, trial)) - value) > 1e-10 * max(1.0, abs(value)):
            continue
        k = (round(abs(trial.get("delta", 0.0)), 9), round(abs(trial.get("alpha", 0.0)), 9), trial.get("alpha", 0.0) > 0)
        if key is None or k < key:
            out, key = trial, k
    return out


def optimize(cfg: SweepConfig) -> OptimumReport:
    t0 = time.perf_counter()
    axes = cfg.axes()
    values = _grid_values(cfg, axes)
    idx = np.unravel_index(int(np.argmax(values)), values.shape)
    grid_best = {n: float(axes[n][i]) for n, i in zip(axes, idx)}
    grid_value = float(values[idx])
    best, value, calls = grid_best, grid_value, 0
    if cfg.refine:
        best, value, calls = _refine(cfg, grid_best, axes)
    best = _canonical(cfg, best, value)
    full = {n: (best[n] if n in best else cfg.value_of(n)) for n in PARAM_NAMES}
    grid_full = {n: (grid_best[n] if n in grid_best else cfg.value_of(n)) for n in PARAM_NAMES}
    return OptimumReport(
        best_params=full,
        best_value=value,
        grid_best_params=grid_full,
        grid_best_value=grid_value,
        axes=axes,
        values=values,
        wall_time=time.perf_counter() - t0,
        evaluations=int(values.size) + calls,
    )


def optimize_volume(cfg: SweepConfig) -> OptimumReport:
    if cfg.objective != "volume":
        raise InputError("optimize_volume needs objective='volume'")
    return optimize(cfg)


def optimize_negativity(cfg: SweepConfig) -> OptimumReport:
    if cfg.objective not in ("negativity_a", "negativity_ab"):
        raise InputError("optimize_negativity needs a negativity objective")
    return optimize(cfg)


def sweep(objective: str, params: tuple[str, ...], **kw) -> SweepConfig:
    """SweepConfig over ``params`` with the default ranges and step counts."""
    return SweepConfig(objective=objective, grid={p: DEFAULT_RANGES[p] for p in params}, **kw)


# ---------------------------------------------------------------------------
# Spin-L studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassicalPoint:
    L: float
    beta_opt: float
    n_max: float          # raw negativity
    fraction: float       # n_max / (1/2)


def classical_limit_study(L_values, beta_grid: SweepConfig | None = None) -> list[ClassicalPoint]:
    """Optimal inclination and preserved negativity of coherent-state frames, per L."""
    base = beta_grid or SweepConfig(objective="negativity_a", grid={"beta": DEFAULT_RANGES["beta"]})
    out = []
    for L in L_values:
        cfg = replace(base, L=float(as_spin(L).j), objective="negativity_a", kraus="projection",
                      fixed={**base.fixed, "alpha": 0.0, "delta": 0.0, "gamma": np.pi / 4})
        rep = optimize(cfg)
        frac = rep.best_value
        out.append(ClassicalPoint(float(as_spin(L).j), rep.best_params["beta"], frac * MAX_QUBIT_NEGATIVITY, frac))
    return out


def pythagoras_distribution(L) -> list[tuple[float, float, float]]:
    """Sector weights of |Jz=L> (x) |Jx=L>: rows (J, J/L, p_J), J descending."""
    s = as_spin(L)
    psi = np.kron(coherent_state(s, 0.0), coherent_state(s, np.pi / 2))
    probs = two_spin_sector_probabilities(s, psi)
    return [(J, J / s.j, p) for J, p in probs.items()]
