"""Fourier-multiplier operators: derivatives, projections, field conversions.

Everything here acts mode by mode, so operations are exact on band-limited
fields and cost O(n^3) with no transforms.  The divergence-free projection
acts on vectors; the strain projection acts on symmetric tensors and is the
orthogonal projection onto symmetrised gradients of divergence-free vector
fields, which is exactly the constraint space of strain tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    Grid3,
    ScalarField,
    SpectralError,
    TENSOR_SLOT,
    TensorField,
    VectorField,
    sobolev_norm_sq,
)

#: Constraint residual above which a tensor is rejected as strain input.
STRAIN_RESIDUAL_LIMIT = 1e-8
#: Divergence residual above which a vector is rejected as solenoidal input.
DIVERGENCE_RESIDUAL_LIMIT = 1e-8


def _kvecs(grid: Grid3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return grid.k1, grid.k2, grid.k3


def grad(f: ScalarField) -> VectorField:
    """Gradient of a scalar field."""
    k1, k2, k3 = _kvecs(f.grid)
    c = f.coeffs
    return VectorField(f.grid, 1j * np.stack([k1 * c, k2 * c, k3 * c]))


def divergence(v: VectorField) -> ScalarField:
    """Divergence of a vector field."""
    k1, k2, k3 = _kvecs(v.grid)
    c = v.coeffs
    return ScalarField(v.grid, 1j * (k1 * c[0] + k2 * c[1] + k3 * c[2]))


def curl(v: VectorField) -> VectorField:
    """Curl of a vector field."""
    k1, k2, k3 = _kvecs(v.grid)
    c = v.coeffs
    out = np.stack(
        [
            k2 * c[2] - k3 * c[1],
            k3 * c[0] - k1 * c[2],
            k1 * c[1] - k2 * c[0],
        ]
    )
    return VectorField(v.grid, 1j * out)


def _sym_grad_coeffs(grid: Grid3, u: np.ndarray) -> np.ndarray:
    k1, k2, k3 = _kvecs(grid)
    half = 0.5j
    return np.stack(
        [
            1j * k1 * u[0],
            half * (k1 * u[1] + k2 * u[0]),
            half * (k1 * u[2] + k3 * u[0]),
            1j * k2 * u[1],
            half * (k2 * u[2] + k3 * u[1]),
            1j * k3 * u[2],
        ]
    )


def sym_grad(v: VectorField) -> TensorField:
    """Symmetric gradient (1/2)(du_i/dx_j + du_j/dx_i) as a tensor field."""
    return TensorField(v.grid, _sym_grad_coeffs(v.grid, v.coeffs))


def tensor_divergence(t: TensorField) -> VectorField:
    """Row-wise divergence (div T)_i = d_j T_ij of a symmetric tensor field."""
    rows = _tensor_dot_k(t.grid, t.coeffs)
    return VectorField(t.grid, 1j * rows)


def _tensor_dot_k(grid: Grid3, s: np.ndarray) -> np.ndarray:
    """Matrix-vector contraction (S k)_i from six-component storage."""
    k1, k2, k3 = _kvecs(grid)
    return np.stack(
        [
            s[0] * k1 + s[1] * k2 + s[2] * k3,
            s[1] * k1 + s[3] * k2 + s[4] * k3,
            s[2] * k1 + s[4] * k2 + s[5] * k3,
        ]
    )


def laplacian(field):
    """Componentwise Laplacian."""
    return field.with_coeffs(field.coeffs * (-field.grid.ksq))


def inv_laplacian(field):
    """Inverse Laplacian with the zero mode mapped to zero."""
    return field.with_coeffs(field.coeffs * (-field.grid.inv_ksq))


def heat_semigroup(field, t: float):
    """Heat flow exp(t * Laplacian); requires t >= 0."""
    if t < 0:
        raise SpectralError(f"heat semigroup needs t >= 0, got {t}")
    if t == 0:
        return field
    return field.with_coeffs(field.coeffs * np.exp(-t * field.grid.ksq))


def leray_project(v: VectorField) -> VectorField:
    """Orthogonal projection onto divergence-free vector fields."""
    k1, k2, k3 = _kvecs(v.grid)
    c = v.coeffs
    kdotv = k1 * c[0] + k2 * c[1] + k3 * c[2]
    scale = kdotv * v.grid.inv_ksq
    out = np.stack([c[0] - k1 * scale, c[1] - k2 * scale, c[2] - k3 * scale])
    return VectorField(v.grid, out)


def _velocity_coeffs(grid: Grid3, s: np.ndarray) -> np.ndarray:
    """u_hat = -2i (S_hat k) / |k|^2, the unique mean-zero velocity of a strain."""
    rows = _tensor_dot_k(grid, s)
    return -2j * rows * grid.inv_ksq


def _strain_project_coeffs(grid: Grid3, m: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the strain constraint space, mode by mode.

    Per wavevector the projection solves the least-squares problem
    min_{u perp k} |sym(i k u^T) - M|_F; the minimiser is
    u = (2/|k|^2) (I - k k^T/|k|^2)(-i M k), and the projected tensor is the
    symmetrised gradient built from u.  The zero mode is annihilated.
    """
    k1, k2, k3 = _kvecs(grid)
    rows = _tensor_dot_k(grid, m)  # (M k)_i
    inv = grid.inv_ksq
    kdotrows = (k1 * rows[0] + k2 * rows[1] + k3 * rows[2]) * inv
    u = np.stack(
        [
            rows[0] - k1 * kdotrows,
            rows[1] - k2 * kdotrows,
            rows[2] - k3 * kdotrows,
        ]
    )
    u *= -2j * inv
    out = _sym_grad_coeffs(grid, u)
    out[:, 0, 0, 0] = 0.0
    return out


def strain_project(m: TensorField) -> TensorField:
    """Orthogonal projection of a symmetric tensor field onto strain space."""
    return TensorField(m.grid, _strain_project_coeffs(m.grid, m.coeffs))


def constraint_residual(s: TensorField) -> float:
    """Relative L2 residual of S + 2*sym_grad(div((-Lap)^-1 S)).

    Vanishes exactly when S is the symmetrised gradient of a mean-zero
    divergence-free velocity field; returns 0 for the zero field.
    """
    grid = s.grid
    u = _velocity_coeffs(grid, s.coeffs)
    # The mean mode of sym_grad(u) vanishes, so any mean in S lands in the
    # residual, as the constraint demands.
    resid = s.coeffs - _sym_grad_coeffs(grid, u)
    num = sobolev_norm_sq(TensorField(grid, resid))
    den = sobolev_norm_sq(s)
    return float(np.sqrt(num / den)) if den > 0 else 0.0


def divergence_residual(v: VectorField) -> float:
    """||div v||_L2 relative to ||v||_H1; 0 for the zero field."""
    num = sobolev_norm_sq(divergence(v))
    den = sobolev_norm_sq(v, 1.0)
    return float(np.sqrt(num / den)) if den > 0 else 0.0


def velocity_from_strain(s: TensorField, check: bool = True) -> VectorField:
    """Recover the mean-zero velocity whose symmetric gradient is S.

    Args:
        s: strain field; rejected if its constraint residual exceeds
            STRAIN_RESIDUAL_LIMIT (unless check=False).
    """
    if check:
        resid = constraint_residual(s)
        if resid > STRAIN_RESIDUAL_LIMIT:
            raise SpectralError(
                f"tensor is not a strain field (constraint residual {resid:.3e})"
            )
    return VectorField(s.grid, _velocity_coeffs(s.grid, s.coeffs))


def strain_from_vorticity(w: VectorField, check: bool = True) -> TensorField:
    """Strain of the velocity recovered from a mean-zero, solenoidal vorticity."""
    if check:
        resid = divergence_residual(w)
        if resid > DIVERGENCE_RESIDUAL_LIMIT:
            raise SpectralError(
                f"vorticity must be divergence-free (residual {resid:.3e})"
            )
    grid = w.grid
    k1, k2, k3 = _kvecs(grid)
    c = w.coeffs
    cross = np.stack(
        [
            k2 * c[2] - k3 * c[1],
            k3 * c[0] - k1 * c[2],
            k1 * c[1] - k2 * c[0],
        ]
    )
    u = 1j * cross * grid.inv_ksq
    return TensorField(grid, _sym_grad_coeffs(grid, u))


def vorticity_from_strain(s: TensorField, check: bool = True) -> VectorField:
    """Curl of the velocity recovered from a strain field."""
    return curl(velocity_from_strain(s, check=check))


def trace_field(t: TensorField) -> ScalarField:
    """Pointwise trace of a symmetric tensor field."""
    c = t.coeffs
    return ScalarField(t.grid, c[0] + c[3] + c[5])


def identity_times(fscalar: ScalarField) -> TensorField:
    """Tensor field phi(x) * I from a scalar field phi."""
    c = fscalar.coeffs
    zero = np.zeros_like(c)
    return TensorField(fscalar.grid, np.stack([c, zero, zero, c, zero, c]))


@dataclass(frozen=True)
class OperatorSymbol:
    """Named Fourier multiplier; heat carries its nonnegative time."""

    name: str
    t: float | None = None

    _NAMES = ("grad", "sym_grad", "curl", "laplacian", "inv_laplacian", "heat")

    def __post_init__(self) -> None:
        if self.name not in self._NAMES:
            raise SpectralError(f"unknown operator {self.name!r}")
        if self.name == "heat":
            if self.t is None or self.t < 0:
                raise SpectralError("heat operator needs a time t >= 0")
        elif self.t is not None:
            raise SpectralError(f"operator {self.name!r} takes no time argument")


def apply_operator(symbol: OperatorSymbol, field):
    """Apply a named operator; rank changes follow the operator."""
    if symbol.name == "grad":
        return grad(field)
    if symbol.name == "sym_grad":
        return sym_grad(field)
    if symbol.name == "curl":
        return curl(field)
    if symbol.name == "laplacian":
        return laplacian(field)
    if symbol.name == "inv_laplacian":
        return inv_laplacian(field)
    return heat_semigroup(field, symbol.t)


def gradient_tensor_coeffs(v: VectorField) -> np.ndarray:
    """Full velocity gradient du_j/dx_i as a (3, 3, n, n, n) coefficient array."""
    k = _kvecs(v.grid)
    c = v.coeffs
    return np.stack([np.stack([1j * k[i] * c[j] for j in range(3)]) for i in range(3)])


def tensor_component(t: TensorField, i: int, j: int) -> np.ndarray:
    """Coefficient array of component (i, j), using symmetry for i > j."""
    if i > j:
        i, j = j, i
    return t.coeffs[TENSOR_SLOT[(i, j)]]
