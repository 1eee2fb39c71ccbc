"""Initial data: the classic vortex cell, random band-limited states, and
amplified states that satisfy the finite-time growth seed condition."""

from __future__ import annotations

import numpy as np

from . import operators as ops
from .diagnostics import det_integral
from .spectral import Grid3, SpectralError, TensorField, VectorField, from_physical, sobolev_norm_sq


def taylor_green_velocity(grid: Grid3, amplitude: float = 1.0) -> VectorField:
    """Single-cell vortex array u = A (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0).

    Divergence-free and band-limited to |k_i| <= 1, so every spectral
    operation on it is exact.
    """
    x1, x2, x3 = grid.meshgrid()
    u = amplitude * np.stack(
        [
            np.sin(x1) * np.cos(x2) * np.cos(x3),
            -np.cos(x1) * np.sin(x2) * np.cos(x3),
            np.zeros_like(x1),
        ]
    )
    return from_physical(u, grid)


def taylor_green_strain(grid: Grid3, amplitude: float = 1.0) -> TensorField:
    return ops.sym_grad(taylor_green_velocity(grid, amplitude))


def random_solenoidal_velocity(grid: Grid3, seed: int, band: int = 2) -> VectorField:
    """Random mean-zero divergence-free velocity supported on |k_i| <= band."""
    if not 1 <= band <= grid.dealias_cutoff:
        raise SpectralError(
            f"band must lie in [1, {grid.dealias_cutoff}] for this grid, got {band}"
        )
    rng = np.random.default_rng(seed)
    n = grid.n
    raw = rng.standard_normal((3, n, n, n)) + 1j * rng.standard_normal((3, n, n, n))
    keep = np.abs(grid.k_axis) <= band
    mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    raw *= mask
    raw[:, 0, 0, 0] = 0.0
    # Hermitian part in the spectral sense, so the field is real.
    reflected = np.roll(raw[..., ::-1, ::-1, ::-1], 1, axis=(-3, -2, -1))
    sym = 0.5 * (raw + np.conj(reflected))
    return ops.leray_project(VectorField(grid, sym))


def random_band_strain(
    grid: Grid3, seed: int, band: int = 2, amplitude: float = 1.0
) -> TensorField:
    """Random strain-space tensor with ||S||_L2 = amplitude, supported on |k_i| <= band."""
    s = ops.sym_grad(random_solenoidal_velocity(grid, seed, band))
    norm = np.sqrt(sobolev_norm_sq(s))
    if norm == 0.0:
        raise SpectralError("random strain came out identically zero; change the seed")
    return s * (amplitude / norm)


def amplified_blowup_seed(
    grid: Grid3, seed: int, band: int = 2, margin: float = 1.5
) -> TensorField:
    """Random strain state scaled until the cubic production term dominates.

    The returned S satisfies -int det(S) = margin * (3/4) ||S||_H1^2, i.e. the
    growth seed condition with the given safety margin.  Scaling works because
    the determinant integral is cubic in S while the gradient term is only
    quadratic; the sign of S is flipped first if needed to make the
    determinant integral negative.
    """
    if margin <= 1.0:
        raise ValueError(f"margin must exceed 1, got {margin}")
    base = None
    for attempt in range(8):
        cand = random_band_strain(grid, seed + 1000 * attempt, band, 1.0)
        d = det_integral(cand)
        # Reject seeds whose determinant integral nearly cancels; the required
        # amplification would be absurd.
        if abs(d) > 1e-4:
            base = cand if d < 0 else -cand
            break
    if base is None:
        raise SpectralError("no usable seed found; determinant integral kept cancelling")
    d = -det_integral(base)
    h1 = sobolev_norm_sq(base, 1.0)
    lam = margin * 0.75 * h1 / d
    return base * lam
