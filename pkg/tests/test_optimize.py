import numpy as np
import pytest
from hypothesis import given, strategies as st

from qrframes import measures, optimize, twirl
from qrframes.errors import InputError
from qrframes.optimize import SweepConfig


def test_config_validation():
    with pytest.raises(InputError):
        SweepConfig(objective="nope")
    with pytest.raises(InputError):
        SweepConfig(grid={"beta": (0, 1, 1)})
    with pytest.raises(InputError):
        SweepConfig(refine_tolerance=0)
    with pytest.raises(InputError):
        SweepConfig(L=8.5)
    with pytest.raises(InputError):
        SweepConfig(L=2, grid={"alpha": (0, 1, 3)})
    SweepConfig(L=8.5, allow_large_L=True)


def test_golden_section():
    x, fx = optimize.golden_section_max(lambda t: -(t - 0.3) ** 2, -1, 2, 1e-9)
    assert abs(x - 0.3) < 1e-8 and fx <= 0


@given(st.floats(-1.5, 1.5), st.floats(0, np.pi), st.floats(-np.pi, np.pi), st.floats(0, np.pi / 2))
def test_vectorized_objective_matches_pipeline(alpha, beta, delta, gamma):
    p = twirl.QrfParams(alpha, beta, delta, L=0.5)
    phi = twirl.partially_entangled(gamma)
    pts = {"alpha": alpha, "beta": beta, "delta": delta, "gamma": gamma}
    neg_a = optimize.evaluate(SweepConfig(grid={}), pts)
    assert abs(neg_a - measures.singlet_fraction(measures.block_negativity(twirl.twirl_alice(p, phi)))) <= 1e-10
    neg_ab = optimize.evaluate(SweepConfig(objective="negativity_ab", grid={}), pts)
    assert abs(neg_ab - measures.singlet_fraction(measures.block_negativity(twirl.twirl_both(p, p, phi)))) <= 1e-10
    printed = optimize.evaluate(SweepConfig(grid={}, kraus="printed"), pts)
    ref = measures.block_negativity(twirl.twirl_alice(p, phi, form="printed"))
    assert abs(printed - measures.singlet_fraction(ref)) <= 1e-10
    vol = optimize.evaluate(SweepConfig(objective="volume", grid={}), pts)
    assert abs(vol - measures.affine_map(p).volume_factor) <= 1e-10


@pytest.mark.parametrize("L", [1, 2.5])
def test_spin_l_objective_matches_pipeline(L):
    for beta in (0.3, 1.7):
        val = optimize.evaluate(SweepConfig(L=L, grid={}), {"beta": beta})
        out = twirl.twirl_alice(twirl.QrfParams(beta=beta, L=L), twirl.singlet())
        assert abs(val - measures.singlet_fraction(measures.block_negativity(out))) <= 1e-10


@given(st.floats(0, np.pi), st.floats(-np.pi, np.pi))
def test_product_frame_delta_reflection(beta, delta):
    cfg = SweepConfig(grid={})
    assert abs(optimize.evaluate(cfg, {"beta": beta, "delta": delta})
               - optimize.evaluate(cfg, {"beta": beta, "delta": -delta})) <= 1e-10


def test_report_is_deterministic_and_thread_independent():
    cfg = SweepConfig(grid={"alpha": (-1.0, 1.0, 9), "beta": (0.5, 2.5, 11)})
    a, b = optimize.optimize(cfg), optimize.optimize(cfg)
    c = optimize.optimize(optimize.replace(cfg, threads=3))
    for other in (b, c):
        assert a.best_params == other.best_params and a.best_value == other.best_value
        assert np.array_equal(a.values, other.values)


def test_refinement_dominates_grid():
    rep = optimize.optimize(SweepConfig(grid={"beta": (0.0, np.pi, 7)}))
    assert rep.best_value >= rep.grid_best_value
    assert rep.grid_best_value == rep.values.max()
    unrefined = optimize.optimize(SweepConfig(grid={"beta": (0.0, np.pi, 7)}, refine=False))
    assert unrefined.best_value == unrefined.grid_best_value


def test_trace_and_profiles():
    rep = optimize.optimize(SweepConfig(grid={"alpha": (-0.5, 0.5, 3), "beta": (1.0, 2.0, 4)}, refine=False))
    trace = list(rep.grid_trace())
    assert len(trace) == 12
    assert max(v for _, v in trace) == rep.best_value
    prof = rep.profiles()
    assert prof["beta"].shape == (4,) and prof["alpha"].shape == (3,)


def test_product_volume_optimum():
    rep = optimize.optimize_volume(SweepConfig(objective="volume"))
    assert rep.best_value == pytest.approx(2 / 9, abs=1e-9)
    assert abs(np.degrees(rep.best_params["beta"]) - 90) <= 0.1
    with pytest.raises(InputError):
        optimize.optimize_volume(SweepConfig())
    with pytest.raises(InputError):
        optimize.optimize_negativity(SweepConfig(objective="volume"))


def test_canonical_representative_prefers_zero_phase():
    cfg = optimize.sweep("negativity_a", ("alpha", "beta", "delta"), kraus="printed")
    rep = optimize.optimize(cfg)
    assert rep.best_params["delta"] == 0.0 and rep.best_params["alpha"] < 0


def test_pythagoras_rows():
    rows = optimize.pythagoras_distribution(0.5)
    assert [r[0] for r in rows] == [1.0, 0.0]
    assert sum(r[2] for r in rows) == pytest.approx(1.0, abs=1e-12)
    for L in (3, 8.5, 12):
        assert sum(r[2] for r in optimize.pythagoras_distribution(L)) == pytest.approx(1.0, abs=1e-12)


def test_classical_study_small():
    pts = optimize.classical_limit_study([0.5, 1], SweepConfig(grid={"beta": (0.0, np.pi, 61)}))
    assert np.degrees(pts[0].beta_opt) < 90 < np.degrees(pts[1].beta_opt)
    assert pts[1].n_max > pts[0].n_max
    assert pts[0].fraction == pytest.approx(2 * pts[0].n_max)
