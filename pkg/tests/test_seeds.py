"""Initial-state constructors: norms, constraints, determinism."""

import numpy as np
import pytest

from strainlab import (
    SpectralError,
    amplified_blowup_seed,
    random_band_strain,
    random_solenoidal_velocity,
    sobolev_norm_sq,
    taylor_green_strain,
    taylor_green_velocity,
)
from strainlab.diagnostics import det_integral
from strainlab.operators import constraint_residual, divergence_residual

from conftest import rel_err


def test_taylor_green_norms(grid32):
    u = taylor_green_velocity(grid32)
    s = taylor_green_strain(grid32)
    assert rel_err(sobolev_norm_sq(u), 2 * np.pi**3) < 1e-13
    assert rel_err(sobolev_norm_sq(s), 3 * np.pi**3) < 1e-13
    assert divergence_residual(u) < 1e-14


def test_taylor_green_amplitude_scaling(grid16):
    assert rel_err(sobolev_norm_sq(taylor_green_strain(grid16, 3.0)), 27 * np.pi**3) < 1e-13


def test_random_velocity_is_solenoidal_and_banded(grid16):
    v = random_solenoidal_velocity(grid16, seed=5, band=3)
    assert divergence_residual(v) < 1e-13
    keep = np.abs(grid16.k_axis) <= 3
    outside = ~(keep[:, None, None] & keep[None, :, None] & keep[None, None, :])
    assert np.max(np.abs(v.coeffs[:, outside])) == 0.0
    assert np.max(np.abs(v.coeffs[:, 0, 0, 0])) == 0.0


def test_random_velocity_deterministic(grid16):
    a = random_solenoidal_velocity(grid16, seed=9)
    b = random_solenoidal_velocity(grid16, seed=9)
    assert np.array_equal(a.coeffs, b.coeffs)
    c = random_solenoidal_velocity(grid16, seed=10)
    assert not np.array_equal(a.coeffs, c.coeffs)


def test_random_band_rejects_band_beyond_cutoff(grid16):
    with pytest.raises(SpectralError):
        random_solenoidal_velocity(grid16, seed=1, band=6)
    with pytest.raises(SpectralError):
        random_band_strain(grid16, seed=1, band=0)


def test_random_strain_normalised(grid16):
    s = random_band_strain(grid16, seed=2, amplitude=0.25)
    assert rel_err(sobolev_norm_sq(s), 0.25**2) < 1e-12
    assert constraint_residual(s) < 1e-12


def test_amplified_seed_satisfies_growth_condition(grid16):
    s = amplified_blowup_seed(grid16, seed=3, margin=1.5)
    d = det_integral(s)
    h1 = sobolev_norm_sq(s, 1.0)
    # scaled so that -int det = margin * (3/4) ||S||_H1^2 exactly
    assert rel_err(-d, 1.5 * 0.75 * h1) < 1e-10
    f0 = -3.0 * h1 - 4.0 * d
    assert f0 > 0
    assert constraint_residual(s) < 1e-10


def test_amplified_seed_margin_validation(grid16):
    with pytest.raises(ValueError):
        amplified_blowup_seed(grid16, seed=3, margin=1.0)
