"""Time stepping, the run loop, existence bounds and the Duhamel iteration."""

import math

import numpy as np
import pytest

from strainlab import (
    Grid3,
    InitialSpec,
    NumericalFailure,
    SimConfig,
    TensorField,
    blowup_monitor,
    build_initial,
    existence_time_bounds,
    gronwall_check,
    picard_fixed_point,
    random_band_strain,
    run,
    sobolev_norm_sq,
    step,
    taylor_green_strain,
    taylor_green_velocity,
    write_field_snapshot,
)
from strainlab.solver import SimState, choose_dt, grad_sup_norm

from conftest import rel_err


def _cfg(**kw):
    defaults = dict(
        mu=1.0,
        grid_n=16,
        dt=5e-3,
        t_end=0.05,
        sample_every=100,
        initial=InitialSpec(kind="taylor_green", amplitude=1.0),
        diagnostics_level="light",
    )
    defaults.update(kw)
    return SimConfig(**defaults)


# ---------------------------------------------------------------------------
# configuration validation


def test_config_rejects_dt_and_cfl_together():
    with pytest.raises(ValueError):
        _cfg(dt=1e-3, cfl_factor=0.5)


def test_config_defaults_to_cfl():
    cfg = _cfg(dt=None)
    assert cfg.cfl_factor == 0.5


@pytest.mark.parametrize(
    "kw",
    [
        dict(t_end=-1.0),
        dict(sample_every=0),
        dict(blowup_threshold=1.0),
        dict(diagnostics_level="loud"),
        dict(grid_n=20),
    ],
)
def test_config_validation_errors(kw):
    with pytest.raises(ValueError):
        _cfg(**kw)


def test_initial_spec_validation():
    with pytest.raises(ValueError):
        InitialSpec(kind="vortex_tube")
    with pytest.raises(ValueError):
        InitialSpec(kind="taylor_green", amplitude=0.0)
    with pytest.raises(ValueError):
        InitialSpec(kind="snapshot")  # needs a path
    with pytest.raises(ValueError):
        InitialSpec(kind="random_band", band=0)


# ---------------------------------------------------------------------------
# initial states


def test_build_initial_taylor_green():
    s = build_initial(_cfg())
    want = taylor_green_strain(Grid3(16))
    assert np.max(np.abs(s.coeffs - want.coeffs)) < 1e-14


def test_build_initial_from_velocity_snapshot(tmp_path):
    path = tmp_path / "vel.mnss"
    u = taylor_green_velocity(Grid3(16), amplitude=0.5)
    write_field_snapshot(path, u, time=0.0)
    cfg = _cfg(initial=InitialSpec(kind="snapshot", path=str(path)))
    s = build_initial(cfg)
    want = taylor_green_strain(Grid3(16), amplitude=0.5)
    assert np.max(np.abs(s.coeffs - want.coeffs)) < 1e-13


def test_build_initial_from_strain_snapshot(tmp_path):
    path = tmp_path / "strain.mnss"
    s0 = random_band_strain(Grid3(16), seed=2, amplitude=0.7)
    write_field_snapshot(path, s0, time=1.5)
    cfg = _cfg(initial=InitialSpec(kind="snapshot", path=str(path)))
    s = build_initial(cfg)
    assert np.max(np.abs(s.coeffs - s0.coeffs)) < 1e-13


# ---------------------------------------------------------------------------
# stepping


def test_choose_dt_fixed_and_cfl():
    cfg = _cfg(dt=2e-3)
    state = SimState(0.0, build_initial(cfg))
    assert choose_dt(state, cfg) == 2e-3
    cfl_cfg = _cfg(dt=None, cfl_factor=0.4, initial=InitialSpec(kind="taylor_green", amplitude=1e-6))
    tiny = SimState(0.0, build_initial(cfl_cfg))
    # gradient far below 1: the cap at 1 makes dt equal the cfl factor
    assert choose_dt(tiny, cfl_cfg) == 0.4
    big_cfg = _cfg(dt=None, cfl_factor=0.4, initial=InitialSpec(kind="taylor_green", amplitude=50.0))
    loud = SimState(0.0, build_initial(big_cfg))
    g = grad_sup_norm(loud.strain)
    assert g > 1
    assert rel_err(choose_dt(loud, big_cfg), 0.4 / g) < 1e-12


def test_step_advances_time_and_count():
    cfg = _cfg()
    state = SimState(0.0, build_initial(cfg))
    out = step(state, cfg)
    assert out.state.t == pytest.approx(5e-3)
    assert out.state.step_count == 1
    assert out.blowup_flag == "none"


def test_step_is_deterministic():
    cfg = _cfg(mu=2.0 / 3.0, advection=True)
    state = SimState(0.0, build_initial(cfg))
    a = step(state, cfg).state.strain.coeffs
    b = step(state, cfg).state.strain.coeffs
    assert np.array_equal(a, b)


def test_near_heat_decay():
    # at amplitude 1e-5 the quadratic terms are negligible and the flow
    # must track the exact heat decay of every mode
    cfg = _cfg(
        advection=True,
        dt=5e-3,
        t_end=0.1,
        initial=InitialSpec(kind="taylor_green", amplitude=1e-5),
    )
    res = run(cfg)
    grid = Grid3(16)
    s0 = taylor_green_strain(grid, 1e-5)
    decayed = s0.with_coeffs(s0.coeffs * np.exp(-0.1 * grid.ksq))
    gap = math.sqrt(sobolev_norm_sq(res.final_state.strain - decayed))
    assert gap / math.sqrt(sobolev_norm_sq(decayed)) < 1e-5


# ---------------------------------------------------------------------------
# the run loop


def test_run_samples_every_k_steps():
    cfg = _cfg(t_end=0.05, sample_every=2)  # 10 steps
    res = run(cfg)
    assert res.stop_reason == "t_end"
    assert res.final_state.step_count == 10
    assert [r.t for r in res.records] == pytest.approx([0.0, 0.01, 0.02, 0.03, 0.04, 0.05])


def test_run_appends_final_partial_sample():
    cfg = _cfg(t_end=0.025, sample_every=3)  # 5 steps, last sample off-stride
    res = run(cfg)
    assert res.records[-1].t == pytest.approx(0.025)


def test_run_t_end_zero():
    res = run(_cfg(t_end=0.0))
    assert res.stop_reason == "t_end"
    assert len(res.records) == 1
    assert res.final_state.step_count == 0


def test_run_deterministic_across_calls():
    cfg = _cfg(mu=2.0 / 3.0, t_end=0.02)
    a = run(cfg).final_state.strain.coeffs
    b = run(cfg).final_state.strain.coeffs
    assert np.array_equal(a, b)


def test_run_threshold_stop():
    cfg = _cfg(
        mu=2.0 / 3.0,
        dt=None,
        cfl_factor=0.4,
        t_end=1.0,
        sample_every=1,
        initial=InitialSpec(kind="amplified_band", seed=3),
        blowup_threshold=1.002,
    )
    res = run(cfg)
    assert res.stop_reason == "threshold_hit"
    assert res.records[-1].enstrophy > 1.002 * res.initial_enstrophy
    assert res.final_state.t < 1.0


def test_run_dt_underflow():
    cfg = _cfg(dt=None, cfl_factor=1e-20, t_end=1.0)
    res = run(cfg)
    assert res.stop_reason == "dt_underflow"
    assert res.final_state.step_count == 0


def test_run_numerical_failure_keeps_records():
    cfg = _cfg(
        mu=2.0 / 3.0,
        dt=1e-3,
        t_end=10.0,
        sample_every=1,
        initial=InitialSpec(kind="amplified_band", seed=3),
        blowup_threshold=1e300,
    )
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NumericalFailure) as info:
            run(cfg)
    assert info.value.records, "partial records should survive the failure"
    assert info.value.state.t > 0


# ---------------------------------------------------------------------------
# scaling symmetry


def test_parabolic_rescaling_commutes_with_the_discrete_flow():
    # doubling every wavevector and quadrupling the amplitude is the
    # lattice version of S -> 4 S(2x); running the fine state for a
    # quarter of the time with a quarter of the step must land on the
    # rescaled coarse result, mode for mode
    grid_a = Grid3(16)
    s_a = random_band_strain(grid_a, seed=11, band=1, amplitude=1.0)
    t_final, dt_a = 0.08, 2e-3

    cfg_a = _cfg(mu=2.0 / 3.0, grid_n=16, dt=dt_a, t_end=t_final, sample_every=10**9)
    res_a = run(cfg_a, initial=s_a)

    grid_b = Grid3(32)
    k16 = np.fft.fftfreq(16, 1 / 16).astype(int)
    pos32 = {k: i for i, k in enumerate(np.fft.fftfreq(32, 1 / 32).astype(int))}
    doubled = np.zeros((6, 32, 32, 32), dtype=complex)
    for i, ki in enumerate(k16):
        for j, kj in enumerate(k16):
            for l, kl in enumerate(k16):
                doubled[:, pos32[2 * ki], pos32[2 * kj], pos32[2 * kl]] = 4.0 * s_a.coeffs[:, i, j, l]
    s_b = TensorField(grid_b, doubled)

    cfg_b = _cfg(mu=2.0 / 3.0, grid_n=32, dt=dt_a / 4, t_end=t_final / 4, sample_every=10**9)
    res_b = run(cfg_b, initial=s_b)

    fa, fb = res_a.final_state.strain.coeffs, res_b.final_state.strain.coeffs
    worst = 0.0
    for i, ki in enumerate(k16):
        for j, kj in enumerate(k16):
            for l, kl in enumerate(k16):
                gap = np.max(np.abs(fb[:, pos32[2 * ki], pos32[2 * kj], pos32[2 * kl]] - 4.0 * fa[:, i, j, l]))
                worst = max(worst, float(gap))
    assert worst / np.max(np.abs(fb)) < 1e-10


# ---------------------------------------------------------------------------
# existence bounds and the fixed point


def test_existence_bounds_arithmetic(grid16):
    s = random_band_strain(grid16, seed=12, amplitude=np.sqrt(2.0))
    b = existence_time_bounds(s, 0.0)
    c0 = 1.0 / (8.0**5 * 16.0)
    assert rel_err(b.t_general, c0 / 4.0) < 1e-10
    assert rel_err(b.t_enstrophy, 1728.0 * math.pi**4 / 4.0) < 1e-10
    zero = TensorField(grid16, np.zeros((6, 16, 16, 16), dtype=complex))
    zb = existence_time_bounds(zero, 1.0)
    assert zb.t_general == math.inf and zb.t_enstrophy == math.inf


def test_picard_contracts_and_matches_stepper(grid16):
    s0 = random_band_strain(grid16, seed=12, amplitude=0.1)
    t_final = 0.5 * existence_time_bounds(s0, 1.0).t_general
    cfg = _cfg(dt=t_final / 64, t_end=t_final, sample_every=10**9)
    pic = picard_fixed_point(s0, cfg, t_final)
    assert len(pic.ratios) >= 4
    assert all(r < 1.0 for r in pic.ratios[:4])
    assert pic.contracting
    res = run(cfg, initial=s0)
    gap = math.sqrt(sobolev_norm_sq(pic.final - res.final_state.strain))
    assert gap / math.sqrt(sobolev_norm_sq(s0)) < 1e-6


def test_picard_rejects_bad_horizon(grid16):
    s0 = random_band_strain(grid16, seed=12, amplitude=0.1)
    with pytest.raises(ValueError):
        picard_fixed_point(s0, _cfg(), 0.0)


# ---------------------------------------------------------------------------
# envelopes along a run


def test_gronwall_envelope_holds_on_decaying_run():
    cfg = _cfg(
        mu=0.0,
        dt=5e-3,
        t_end=0.1,
        sample_every=4,
        initial=InitialSpec(kind="random_band", seed=5),
        diagnostics_level="standard",
    )
    res = run(cfg)
    for alpha in (0.0, 1.0):
        worst, envelope = gronwall_check(res.records, alpha)
        assert worst <= 1.0 + 1e-9
        assert envelope.shape == (len(res.records),)


def test_blowup_monitor_weak_seed():
    cfg = _cfg(mu=0.0, t_end=0.02, diagnostics_level="standard", sample_every=1)
    res = run(cfg)
    verdict = blowup_monitor(res, cfg)
    assert verdict.stop_reason == "t_end"
    assert not verdict.report.seed_ok
    assert "seed condition not met" in verdict.claim


def test_blowup_monitor_threshold_suffix():
    cfg = _cfg(
        mu=2.0 / 3.0,
        dt=None,
        cfl_factor=0.4,
        t_end=1.0,
        sample_every=1,
        initial=InitialSpec(kind="amplified_band", seed=3),
        blowup_threshold=1.002,
    )
    res = run(cfg)
    verdict = blowup_monitor(res, cfg)
    assert verdict.report.seed_ok
    assert "stopped at" in verdict.claim
