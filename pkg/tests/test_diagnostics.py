"""Identity checks, criterion integrands, infima and the growth bookkeeping."""

import math

import numpy as np
import pytest

from strainlab import (
    Grid3,
    TensorField,
    blowup_report,
    compute_record,
    enstrophy_rate,
    gronwall_check,
    identity_suite,
    inf_rho_halpha,
    inf_rho_l2,
    inf_rho_lq,
    laplacian,
    random_band_strain,
    reference_constants,
    regularity_integrands,
    riccati_envelope,
    sobolev_norm_sq,
    taylor_green_strain,
)
from strainlab.diagnostics import (
    RegularityIntegrands,
    blowup_t_star,
    cubic_triple,
    det_integral,
    existence_coefficient,
    interpolation_constant,
    lambda2_plus_lq,
    resolution_fraction,
    trace_cubed_integral,
)
from strainlab.eigen import sym3_det
from strainlab.nonlinearity import compute_terms
from strainlab.spectral import to_physical
from strainlab.operators import vorticity_from_strain

from conftest import rel_err


def _shell_strain(grid, shells):
    """Strain-space field with unit L2 mass on each listed |k|^2 shell."""
    s = random_band_strain(grid, seed=40, band=2, amplitude=1.0)
    ksq = grid.ksq
    coeffs = np.zeros_like(s.coeffs)
    for target in shells:
        pick = ksq == target
        part = s.coeffs * pick
        mass = sobolev_norm_sq(TensorField(grid, part))
        coeffs += part / math.sqrt(mass)
    return TensorField(grid, coeffs)


# ---------------------------------------------------------------------------
# cubic integrals


def test_det_integral_against_padded_quadrature(strain16):
    # determinant of a band-limited field is band-limited on the doubled
    # grid, where plain quadrature of the physical samples is exact
    big = strain16.grid.padded(2)
    samples = to_physical(strain16.pad_to(big))
    brute = float(np.sum(sym3_det(samples))) * big.cell_volume
    assert rel_err(det_integral(strain16), brute) < 1e-12


def test_trace_cubed_relation(strain16):
    # for trace-free symmetric tensors, tr(S^3) = 3 det(S) pointwise
    assert rel_err(trace_cubed_integral(strain16), 3.0 * det_integral(strain16)) < 1e-12


def test_cubic_triple_pairwise(strain16):
    w = vorticity_from_strain(strain16)
    pairing, det4, tr43, scale = cubic_triple(strain16, w)
    assert scale > 0
    assert abs(pairing - det4) / scale < 1e-12
    assert abs(pairing - tr43) / scale < 1e-12


def test_identity_suite_residuals(strain16):
    suite = identity_suite(strain16)
    assert suite.ortho_resid < 1e-12
    assert max(suite.cubic_resids) < 1e-12
    assert max(suite.pairing_resids) < 1e-12


def test_enstrophy_rate_routes_agree(strain16):
    for mu in (0.0, 2.0 / 3.0, 1.0):
        rate = enstrophy_rate(strain16, mu, advection=False)
        assert rel_err(rate.measured, rate.identity) < 1e-11
        assert rel_err(rate.measured, rate.vorticity_form) < 1e-11
    with_adv = enstrophy_rate(strain16, 1.0, advection=True)
    assert rel_err(with_adv.measured, with_adv.identity) < 1e-11


def test_enstrophy_rate_is_mu_independent(strain16):
    rates = [enstrophy_rate(strain16, mu, advection=False).measured for mu in (0.0, 0.5, 1.0)]
    spread = (max(rates) - min(rates)) / abs(rates[0])
    assert spread < 1e-11


# ---------------------------------------------------------------------------
# infima


def test_inf_rho_l2_matches_dense_scan(grid16):
    s = random_band_strain(grid16, seed=41, amplitude=1.3)
    value, rho_star = inf_rho_l2(s)
    lap = laplacian(s)
    best = min(
        sobolev_norm_sq(TensorField(grid16, -rho * lap.coeffs - s.coeffs))
        for rho in np.linspace(0.0, 2.0 * rho_star, 401)
    )
    assert value <= best + 1e-12
    assert rel_err(value, best) < 1e-4  # scan resolution limits the match
    assert 0.0 < rho_star < 1.0


def test_single_shell_infimum_is_zero(grid16):
    s = _shell_strain(grid16, [1])
    value, rho = inf_rho_l2(s)
    assert abs(value) < 1e-12
    assert rel_err(rho, 1.0) < 1e-12


def test_two_shell_worked_values(grid16):
    s = _shell_strain(grid16, [1, 4])
    value, rho = inf_rho_l2(s)
    assert abs(value - 9.0 / 17.0) < 1e-12
    assert abs(rho - 5.0 / 17.0) < 1e-12
    value_h1, _ = inf_rho_halpha(s, 1.0)
    assert abs(value_h1 - 36.0 / 65.0) < 1e-12


def test_inf_rho_lq_at_q2_matches_closed_form(grid16):
    s = random_band_strain(grid16, seed=42, amplitude=0.8)
    closed_sq, rho_closed = inf_rho_l2(s)
    res = inf_rho_lq(s, 2.0)
    assert res.bracket_ok
    assert rel_err(res.value**2, closed_sq) < 1e-6
    assert rel_err(res.rho_star, rho_closed) < 1e-4


def test_inf_rho_lq_beats_dense_scan(grid16):
    s = random_band_strain(grid16, seed=43, amplitude=1.0)
    res = inf_rho_lq(s, 3.0)
    lap = laplacian(s)
    from strainlab import lq_norm

    scanned = min(
        lq_norm(TensorField(grid16, -rho * lap.coeffs - s.coeffs), 3.0)
        for rho in np.linspace(0.0, 2.0 * res.rho_star, 301)
    )
    assert res.value <= scanned * (1.0 + 1e-7)


def test_lambda2_plus_constant_tensor(grid8):
    # diag(c, c, -2c) has eigenvalues (-2c, c, c); the positive middle one
    # is c, so the L^q norm is c * volume^(1/q)
    c = 0.7
    coeffs = np.zeros((6, 8, 8, 8), dtype=complex)
    coeffs[0, 0, 0, 0] = c
    coeffs[3, 0, 0, 0] = c
    coeffs[5, 0, 0, 0] = -2 * c
    s = TensorField(grid8, coeffs)
    assert rel_err(lambda2_plus_lq(s, 3.0), c * (2 * math.pi)) < 1e-12
    assert rel_err(lambda2_plus_lq(s, math.inf), c) < 1e-12
    with pytest.raises(ValueError):
        lambda2_plus_lq(s, 0.5)


def test_regularity_integrand_exponents():
    assert RegularityIntegrands.p_of_alpha(0.0) == 2.0
    assert RegularityIntegrands.p_of_alpha(1.0) == 1.0
    assert RegularityIntegrands.p_of_q(2.0) == 4.0
    assert RegularityIntegrands.p_of_q(3.0) == 2.0
    assert RegularityIntegrands.p_of_q(np.inf) == 2.0
    with pytest.raises(ValueError):
        RegularityIntegrands.p_of_q(1.5)


def test_regularity_integrands_shape(strain16):
    reg = regularity_integrands(strain16, alphas=(0.0, 1.0), qs=(2.0, np.inf))
    assert set(reg.q_h_alpha) == {0.0, 1.0}
    assert set(reg.lambda2_plus_lq) == {2.0, np.inf}
    assert reg.endpoint_ratio > 0
    # crit at alpha combines the reported norm with the stated exponent
    p = RegularityIntegrands.p_of_alpha(1.0)
    h1 = sobolev_norm_sq(strain16, 1.0)
    want = reg.q_h_alpha[1.0] ** p / h1 ** (p / 2)
    assert rel_err(reg.crit_alpha[1.0], want) < 1e-12


# ---------------------------------------------------------------------------
# resolution gate


def test_resolution_fraction_band_limited(grid16):
    s = random_band_strain(grid16, seed=44, band=2)
    assert resolution_fraction(s) == 0.0


def test_resolution_fraction_with_tail(grid16):
    s = random_band_strain(grid16, seed=44, band=2)
    coeffs = s.coeffs.copy()
    coeffs[0, 5, 0, 0] += 1.0  # plant mass above two thirds of the cutoff
    tainted = TensorField(grid16, coeffs)
    frac = resolution_fraction(tainted)
    assert frac > 0.1
    rec = compute_record(tainted, 0.0, 0.0, False, level="light")
    assert not rec.resolution_ok


# ---------------------------------------------------------------------------
# constants, envelope, seed arithmetic


def test_existence_coefficient_values():
    assert rel_err(existence_coefficient(0.0), 1.0 / (8.0**5 * 16.0)) < 1e-15
    assert existence_coefficient(2.0 / 3.0) > existence_coefficient(1.0)


def test_interpolation_constant_bounds():
    assert interpolation_constant(0.0) == 1.0
    with pytest.raises(ValueError):
        interpolation_constant(1.5)


def test_reference_constants_keys():
    table = reference_constants()
    assert len(table) == 8
    assert rel_err(table["enstrophy_existence_coefficient"], 1728.0 * math.pi**4) < 1e-15
    assert table["riccati_rate_coefficient"] < 1e-5


def test_riccati_envelope_exact_points():
    assert riccati_envelope(1.0, 0.0) == 1.0
    horizon = 1728.0 * math.pi**4
    assert riccati_envelope(1.0, 0.75 * horizon) == 2.0
    assert riccati_envelope(1.0, horizon) == math.inf
    assert riccati_envelope(0.0, 5.0) == 0.0


def test_blowup_t_star_arithmetic():
    assert blowup_t_star(1.0, 1.0, 3.0) == 1.0
    assert blowup_t_star(2.0, 3.0, 7.0) == 1.0
    assert blowup_t_star(1.0, 4.0, 2.0) == 0.5
    assert blowup_t_star(1.0, 0.0, 3.0) == math.inf
    assert blowup_t_star(1.0, -2.0, 3.0) == math.inf


def test_blowup_report_seed_arithmetic(grid16):
    from strainlab import amplified_blowup_seed

    s = amplified_blowup_seed(grid16, seed=6)
    rep = blowup_report(s)
    assert rep.seed_ok and rep.f0 > 0
    assert math.isfinite(rep.t_star) and rep.t_star > 0
    assert "seed condition met" in rep.claim
    # a small random state does not meet the seed condition
    weak = random_band_strain(grid16, seed=7, amplitude=0.1)
    rep2 = blowup_report(weak)
    assert not rep2.seed_ok
    assert rep2.t_star == math.inf


# ---------------------------------------------------------------------------
# records


def test_compute_record_levels(strain16):
    light = compute_record(strain16, 0.1, 1.0, True, level="light")
    assert math.isnan(light.det_int) and math.isnan(light.rate_measured)
    assert light.enstrophy > 0 and light.h2_sq > 0

    std = compute_record(strain16, 0.1, 1.0, True, level="standard")
    assert math.isfinite(std.det_int)
    assert std.ortho_resid < 1e-12
    assert not std.inf_rho_lq  # L^q infima only at the full level

    full = compute_record(strain16, 0.1, 1.0, True, level="full", qs=(2.0,))
    assert 2.0 in full.inf_rho_lq
    assert full.crit_lq[2.0] == pytest.approx(full.inf_rho_lq[2.0] ** 4, rel=1e-12)

    with pytest.raises(ValueError):
        compute_record(strain16, 0.0, 1.0, True, level="verbose")


def test_compute_record_zero_field(grid16):
    z = TensorField(grid16, np.zeros((6, 16, 16, 16), dtype=complex))
    rec = compute_record(z, 0.0, 1.0, True, level="full")
    assert rec.enstrophy == 0.0
    assert math.isnan(rec.det_int)


def test_gronwall_check_requires_integrand(strain16):
    rec = compute_record(strain16, 0.0, 0.0, False, level="light")
    with pytest.raises(ValueError):
        gronwall_check([rec, rec], 0.0)
