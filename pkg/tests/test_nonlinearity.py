"""Quadratic terms, the model right-hand side and the perturbation ratio.

The exact (padded) and truncated product routes must agree on every mode
inside the dealiasing cube; that is the two-thirds rule in action.
"""

import numpy as np
import pytest

from strainlab import (
    Grid3,
    TensorField,
    compute_terms,
    inner_product,
    laplacian,
    mu_rhs,
    q_perturbation,
    random_band_strain,
    sobolev_norm_sq,
    taylor_green_strain,
)
from strainlab.nonlinearity import blowup_ratio_terms, rhs_from_terms

from conftest import rel_err


def test_exact_terms_live_on_doubled_grid(strain16):
    terms = compute_terms(strain16, advection=True, exact=True)
    assert terms.grid.n == 32
    assert terms.exact
    assert terms.advection is not None


def test_truncated_terms_match_exact_inside_cutoff(strain16):
    grid = strain16.grid
    exact = compute_terms(strain16, advection=True, exact=True)
    trunc = compute_terms(strain16, advection=True, exact=False)
    for name in ("strain_sq", "vort_outer", "advection"):
        e = getattr(exact, name).crop_to(grid).coeffs * grid.dealias_mask
        t = getattr(trunc, name).coeffs
        scale = np.max(np.abs(e)) or 1.0
        assert np.max(np.abs(e - t)) / scale < 1e-13, name
        # truncation leaves nothing outside the cube
        assert np.all(t[:, ~grid.dealias_mask] == 0), name


def test_terms_without_advection(strain16):
    terms = compute_terms(strain16, advection=False)
    assert terms.advection is None


def test_mu_rhs_equals_rhs_from_terms(strain16):
    for mu in (0.0, 2.0 / 3.0, 1.0):
        direct = mu_rhs(strain16, mu, advection=True)
        terms = compute_terms(strain16, advection=True, exact=False)
        rebuilt = rhs_from_terms(strain16, terms, mu)
        assert np.max(np.abs(direct.coeffs - rebuilt.coeffs)) < 1e-12


def test_laplacian_split(strain16):
    full = mu_rhs(strain16, 1.0, advection=True, include_laplacian=True)
    quad = mu_rhs(strain16, 1.0, advection=True, include_laplacian=False)
    lap = laplacian(strain16)
    assert np.max(np.abs(full.coeffs - quad.coeffs - lap.coeffs)) < 1e-12


def test_mu_zero_has_no_strain_square(grid16):
    # at mu = 0 the rhs depends on S only through the vorticity outer product
    s = taylor_green_strain(grid16)
    terms = compute_terms(s, advection=False)
    rhs = rhs_from_terms(s, terms, 0.0)
    # compare with a hand-assembled version: Lap S - P_st(-1/2 w (x) w)
    from strainlab import strain_project

    want = laplacian(s) - strain_project(-0.5 * terms.vort_outer)
    assert np.max(np.abs(rhs.coeffs - want.coeffs)) < 1e-13


def test_q_perturbation_orthogonal_to_state(strain16):
    q = q_perturbation(strain16)
    s_padded = strain16.pad_to(q.grid)
    scale = np.sqrt(sobolev_norm_sq(q) * sobolev_norm_sq(s_padded))
    assert abs(inner_product(q, s_padded)) / scale < 1e-12


def test_q_perturbation_needs_exact_advection_terms(strain16):
    terms = compute_terms(strain16, advection=False, exact=True)
    with pytest.raises(ValueError):
        q_perturbation(strain16, terms=terms)
    trunc = compute_terms(strain16, advection=True, exact=False)
    with pytest.raises(ValueError):
        blowup_ratio_terms(strain16, terms=trunc)


def test_blowup_ratio_small_field_below_threshold(grid16):
    # for weak fields the denominator is dominated by -Lap S, keeping the
    # ratio far under the Riccati gate value 2
    s = random_band_strain(grid16, seed=30, amplitude=1e-3)
    num, den = blowup_ratio_terms(s)
    ratio = np.sqrt(sobolev_norm_sq(num) / sobolev_norm_sq(den))
    assert np.isfinite(ratio)
    assert ratio < 0.01


def test_blowup_ratio_scales_with_amplitude(grid16):
    a = random_band_strain(grid16, seed=31, amplitude=1.0)
    num_a, den_a = blowup_ratio_terms(a)
    b = 2.0 * a
    num_b, den_b = blowup_ratio_terms(b)
    # the numerator is purely quadratic: doubling S quadruples it
    assert rel_err(sobolev_norm_sq(num_b), 16.0 * sobolev_norm_sq(num_a)) < 1e-10
