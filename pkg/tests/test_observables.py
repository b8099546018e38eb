import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qrframes import linalg, measures, observables, sectors, twirl


def test_identities_hold_in_spin_half_normalization():
    ids = observables.verify_identities()
    for key in ("twotwo", "fifthorder", "su2", "square_quarter_projector", "hermitian"):
        assert ids[key] <= 1e-12
    assert ids["cyclic_rotation"] <= 1e-10


def test_s_spectrum_and_eigenspaces():
    obs = observables.build_observables()
    d = sectors.three_qubit_decomposition()
    assert np.allclose(np.sort(np.linalg.eigvalsh(obs.S)), [-0.25] * 4 + [0.25] * 4, atol=1e-12)
    assert np.abs(obs.S - (d.projectors[0] - d.projectors[1]) / 4).max() <= 1e-12


def test_readout_operators_live_on_the_doublet():
    obs = observables.build_observables()
    P1 = sectors.three_qubit_decomposition().projectors[0]
    for n in obs.N:
        assert np.abs(n @ P1).max() <= 1e-12


def test_nz_basis_action():
    obs = observables.build_observables()
    V = sectors.three_qubit_decomposition().isometries[1]
    for row, (s, p) in zip(V, itertools.product(range(2), range(2))):
        sign = 1 if p == 0 else -1
        assert np.abs(obs.Nz @ row - sign * 0.5 * row).max() <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_rotation_invariance(seed):
    g = twirl.haar_su2(1, linalg.make_rng(seed))[0]
    R = linalg.tensor(g, g, g)
    obs = observables.build_observables()
    for m in (obs.S, *obs.N):
        assert np.abs(R @ m @ R.conj().T - m).max() <= 1e-10


def test_permutation_behaviour():
    obs = observables.build_observables()
    moved = False
    for perm in itertools.permutations(range(3)):
        P = observables.permutation_unitary(perm)
        assert np.abs(P @ obs.S @ P.T - obs.S).max() <= 1e-12
        moved |= np.abs(P @ obs.Nx @ P.T - obs.Nx).max() > 1e-6
    assert moved
    res, deg = observables.cyclic_rotation_residual()
    assert res <= 1e-10 and abs(abs(deg) - 120) < 1e-12


@given(st.floats(-1.5, 1.5), st.floats(0.05, np.pi), st.floats(-np.pi, np.pi),
       st.floats(0, np.pi / 2), st.floats(-np.pi, np.pi))
def test_expectations_match_bloch_image(alpha, beta, delta, theta, phi):
    obs = observables.build_observables()
    p = twirl.QrfParams(alpha, beta, delta, L=0.5)
    psi = np.kron(twirl.canonical_qrf_state(p), measures.spin_state(theta, phi))
    weight = np.vdot(psi, sectors.three_qubit_decomposition().projectors[1] @ psi).real
    if weight < 1e-6:
        return
    vec = np.array([np.vdot(psi, n @ psi).real for n in obs.N])
    # spin-1/2 normalization: <N_i> is half the Bloch component
    assert np.abs(2 * vec / weight - measures.bloch_image(p, theta, phi, normalize=True)).max() <= 1e-10
