"""Invariant suites behind ``qrf verify``.

Each check returns a residual compared against a fixed tolerance. Random
inputs come from seeded generators, so a given (level, seed) pair always
produces the same report.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg, measures, observables, optimize, sectors, spin, twirl

LEVELS = ("fast", "full")


@dataclass(frozen=True)
class CheckResult:
    module: str
    invariant: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.module:<10} {self.invariant:<40} residual={self.residual:.3e} tol={self.tolerance:.1e}"


def _maxabs(a) -> float:
    return float(np.max(np.abs(a)))


# -- linalg ------------------------------------------------------------------

def _linalg(level, seed):
    rng = linalg.make_rng(seed)
    a, b = linalg.random_density_matrix(2, rng), linalg.random_density_matrix(3, rng)
    rho = linalg.random_density_matrix(12, rng)
    U = linalg.haar_unitary(6, rng)
    yield "partial_trace_of_product", _maxabs(linalg.partial_trace(np.kron(a, b), (2, 3), 0) - a), 1e-13
    yield "partial_transpose_involution", _maxabs(
        linalg.partial_transpose(linalg.partial_transpose(rho, (3, 4), 1), (3, 4), 1) - rho), 0.0
    yield "trace_norm_vs_svd", abs(linalg.trace_norm(rho - np.eye(12) / 12)
                                   - np.linalg.svd(rho - np.eye(12) / 12, compute_uv=False).sum()), 1e-12
    yield "haar_unitary_unitarity", _maxabs(U @ U.conj().T - np.eye(6)), 1e-13


# -- spin --------------------------------------------------------------------

def _spin(level, seed):
    jmax = 3 if level == "fast" else 5
    worst = 0.0
    for t1 in range(1, 2 * jmax + 1):
        for t2 in range(1, t1 + 1):
            j1, j2 = t1 / 2, t2 / 2
            table = spin.clebsch_gordan(j1, j2)
            for (J, M, m1, m2), c in table.entries.items():
                worst = max(worst, abs(c - spin.cg_racah(j1, j2, J, m1, m2, M)))
    yield f"cg_vs_racah_j<={jmax}", worst, 1e-12
    worst = 0.0
    for t in range(1, 2 * jmax + 1):
        U = spin.coupling_isometry(t / 2, 1 / 2)
        worst = max(worst, _maxabs(U @ U.T - np.eye(U.shape[0])))
    yield "coupling_isometry_orthogonal", worst, 1e-12
    worst = 0.0
    for t in range(1, 9):
        jx, jy, jz = spin.angular_momentum_ops(t / 2)
        worst = max(worst, _maxabs(jx @ jy - jy @ jx - 1j * jz))
    yield "angular_momentum_algebra", worst, 1e-12
    worst = 0.0
    for t in range(1, 9):
        L = t / 2
        psi = spin.coherent_state(L, 1.1)
        jx, _, jz = spin.angular_momentum_ops(L)
        n = np.array([spin.expectation(jx, psi).real, spin.expectation(jz, psi).real])
        worst = max(worst, _maxabs(n - L * np.array([np.sin(1.1), np.cos(1.1)])))
    yield "coherent_state_direction", worst, 1e-12


# -- sectors -----------------------------------------------------------------

def _sectors(level, seed):
    ref = sectors.three_qubit_decomposition()
    gen = sectors.qrf_system_decomposition(0.5)
    yield "general_matches_three_qubit_basis", max(
        _maxabs(a - b) for a, b in zip(ref.isometries, gen.isometries)), 1e-12
    Lmax = 2 if level == "fast" else 4
    worst_u, worst_c = 0.0, 0.0
    rng = linalg.make_rng(seed)
    for t in range(1, 2 * Lmax + 1):
        d = sectors.qrf_system_decomposition(t / 2)
        U = d.unitary()
        worst_u = max(worst_u, _maxabs(U @ U.conj().T - np.eye(d.dim)))
        # projectors commute with a collective rotation
        g = twirl.haar_su2(1, rng)[0]
        R = linalg.tensor(*(twirl.spin_representation(g, s) for s in (t / 2, t / 2, 0.5)))
        for P in d.projectors:
            worst_c = max(worst_c, _maxabs(R @ P - P @ R))
    yield f"decomposition_unitary_L<={Lmax}", worst_u, 1e-12
    yield "projectors_rotation_invariant", worst_c, 1e-11
    probs = optimize.pythagoras_distribution(0.5)
    yield "pythagoras_half", _maxabs(np.array([p for *_, p in probs]) - [0.75, 0.25]), 1e-12


# -- twirl -------------------------------------------------------------------

def _twirl(level, seed):
    worst = 0.0
    for L in (0.5, 1.0, 1.5):
        for beta in (0.0, 0.7, np.pi / 2):
            k = twirl.induced_kraus(twirl.QrfParams(alpha=0.2 if L == 0.5 else 0.0, beta=beta, delta=0.3, L=L))
            worst = max(worst, _maxabs(k.completeness() - np.eye(2)))
    yield "kraus_completeness", worst, 1e-12
    rng = linalg.make_rng(seed)
    decomp = sectors.three_qubit_decomposition()
    rho = linalg.random_density_matrix(8, rng)
    once = twirl.gtwirl_exact(rho, decomp)
    yield "exact_twirl_idempotent", _maxabs(twirl.gtwirl_exact(once, decomp) - once), 1e-13
    g = twirl.haar_su2(1, rng)[0]
    R = linalg.tensor(g, g, g)
    yield "exact_twirl_invariant", _maxabs(twirl.gtwirl_exact(R @ rho @ R.conj().T, decomp) - once), 1e-13
    samples, n_states = (20_000, 3) if level == "fast" else (100_000, 10)
    worst = 0.0
    for i in range(n_states):
        r = linalg.random_density_matrix(8, rng)
        mc = twirl.gtwirl_montecarlo(r, (0.5, 0.5, 0.5), samples, seed=seed + i)
        worst = max(worst, _maxabs(mc - twirl.gtwirl_exact(r, decomp)))
    yield f"montecarlo_vs_exact_{samples}", worst, 5 / np.sqrt(samples)
    # Alice's twirl on the frame-plus-qubit state equals the Kraus outcome
    params = twirl.QrfParams(alpha=-0.3, beta=1.2, delta=0.4, L=0.5)
    phi = twirl.singlet()
    psi = np.kron(twirl.canonical_qrf_state(params), phi)
    full = twirl.gtwirl_exact(np.outer(psi, psi.conj()), decomp, extra_dim=2)
    V = decomp.isometries[1]
    W = np.kron(V, np.eye(2))
    X = (W @ full @ W.conj().T).reshape(2, 4, 2, 4)
    blk = np.einsum("aiaj->ij", X)
    out = twirl.twirl_alice(params, phi)
    e = out.entries[1]
    yield "kraus_matches_global_twirl", _maxabs(blk - e.p * e.sigma), 1e-13


# -- measures ----------------------------------------------------------------

def _measures(level, seed):
    betas = np.linspace(0, np.pi, 19)
    dets = [measures.affine_map(twirl.QrfParams(beta=b, L=0.5)).det_a for b in betas]
    yield "product_det_a", _maxabs(np.array(dets) - 2 / 9 * np.sin(betas) ** 2), 1e-12
    out = twirl.twirl_alice(twirl.QrfParams(beta=np.pi / 2, L=0.5), twirl.singlet())
    yield "product_singlet_fraction", abs(measures.singlet_fraction(measures.block_negativity(out))
                                          - 1 / (3 * np.sqrt(2))), 1e-12
    rng = linalg.make_rng(seed)
    worst = 0.0
    for _ in range(5):
        a, b, d = rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi)
        phi = linalg.random_pure_state(4, rng)
        res = twirl.twirl_both(twirl.QrfParams(alpha=a, beta=b, delta=d, L=0.5),
                               twirl.QrfParams(alpha=-a, beta=b / 2, delta=d, L=0.5), phi)
        rho, (K, da, db) = res.assembled()
        direct = measures.negativity(rho, (K * da, db), 1)
        worst = max(worst, abs(direct - measures.block_negativity(res)))
    yield "block_vs_direct_negativity", worst, 1e-10
    p = twirl.QrfParams(alpha=0.3, beta=1.0, delta=0.5, L=0.5)
    amap = measures.affine_map(p)
    x = np.array([0.3, -0.5, 0.6])
    rho_in = (np.eye(2) + sum(c * s for c, s in zip(x, measures.PAULI))) / 2
    direct = measures.bloch_vector(measures.protected_state(p, rho_in))
    yield "affine_map_reconstruction", _maxabs(amap.raw(x) - direct), 1e-13


# -- virtual observables -------------------------------------------------------

def _observables(level, seed):
    ids = observables.verify_identities()
    for key in ("twotwo", "fifthorder", "su2", "square_quarter_projector", "hermitian"):
        yield key, ids[key], 1e-12
    yield "cyclic_rotation", ids["cyclic_rotation"], 1e-10
    w = np.linalg.eigvalsh(observables.build_observables().S)
    yield "S_spectrum", _maxabs(np.sort(w) - np.repeat([-0.25, 0.25], 4)), 1e-12


# -- optimize ----------------------------------------------------------------

def _optimize(level, seed):
    cfg = optimize.SweepConfig(objective="negativity_a", grid={"beta": (0.0, np.pi, 37)}, seed=seed)
    r1, r2 = optimize.optimize(cfg), optimize.optimize(cfg)
    same = r1.best_value == r2.best_value and np.array_equal(r1.values, r2.values)
    yield "determinism", 0.0 if same else 1.0, 0.0
    yield "refinement_dominance", max(0.0, r1.grid_best_value - r1.best_value), 0.0
    b = np.linspace(0.1, 3.0, 7)
    fwd = optimize.evaluate(optimize.replace(cfg, grid={}), {"beta": b, "delta": 0.7})
    back = optimize.evaluate(optimize.replace(cfg, grid={}), {"beta": b, "delta": -0.7})
    yield "delta_reflection_symmetry", _maxabs(fwd - back), 1e-10


SUITES: tuple[tuple[str, Callable], ...] = (
    ("linalg", _linalg),
    ("spin", _spin),
    ("sectors", _sectors),
    ("twirl", _twirl),
    ("measures", _measures),
    ("virtual-obs", _observables),
    ("optimize", _optimize),
)


def run_checks(level: str = "fast", seed: int = 0) -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    out = []
    for module, suite in SUITES:
        try:
            for name, residual, tol in suite(level, seed):
                out.append(CheckResult(module, name, float(residual), float(tol)))
        except Exception as exc:  # a crash inside a suite is itself a failure
            out.append(CheckResult(module, f"crashed: {type(exc).__name__}", float("inf"), 0.0))
    return out
