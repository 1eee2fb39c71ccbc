"""Quadratic terms of the strain dynamics and the model right-hand sides.

The evolution solved here is, for a model weight mu,

    dS/dt = Lap S + (1/2) P_st(w (x) w) - mu P_st(S^2 + (3/4) w (x) w)
            [- P_st((u.grad) S) when advection is on]

with u the velocity recovered from S, w its vorticity and P_st the strain
projection.  mu = 0 keeps only the strain-vorticity interaction, mu = 2/3
reduces (by cancellation of the vorticity terms) to the self-amplification
model (2/3) P_st(S^2), and mu = 1 with advection reproduces the strain form
of the incompressible flow equations.

All quadratic products are formed pointwise in physical space, dealiased by
the two-thirds rule on the native grid (solver paths) or computed exactly on
a doubled grid (verification and diagnostics paths, `exact=True`, results
living on the padded grid).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .spectral import (
    Grid3,
    TensorField,
    VectorField,
    coeffs_from_physical,
    physical_from_coeffs,
)


@dataclass(frozen=True)
class NonlinearTerms:
    """The three quadratic tensors plus the fields they were built from.

    With `exact` set, every field lives on the doubled grid and carries the
    complete product band; otherwise everything is truncated to the native
    dealias cutoff.
    """

    strain_sq: TensorField
    vort_outer: TensorField
    advection: TensorField | None
    velocity: VectorField
    vorticity: VectorField
    exact: bool

    @property
    def grid(self) -> Grid3:
        return self.strain_sq.grid


def _tensor_square(sp: np.ndarray) -> np.ndarray:
    s11, s12, s13, s22, s23, s33 = sp
    return np.stack(
        [
            s11 * s11 + s12 * s12 + s13 * s13,
            s11 * s12 + s12 * s22 + s13 * s23,
            s11 * s13 + s12 * s23 + s13 * s33,
            s12 * s12 + s22 * s22 + s23 * s23,
            s12 * s13 + s22 * s23 + s23 * s33,
            s13 * s13 + s23 * s23 + s33 * s33,
        ]
    )


def _outer(w: np.ndarray) -> np.ndarray:
    return np.stack(
        [w[0] * w[0], w[0] * w[1], w[0] * w[2], w[1] * w[1], w[1] * w[2], w[2] * w[2]]
    )


def _grad_stack_coeffs(grid: Grid3, s: np.ndarray) -> np.ndarray:
    """d_j S_c as a (3, 6, n, n, n) coefficient array."""
    return 1j * np.stack([grid.k1 * s, grid.k2 * s, grid.k3 * s])


class _Workspace:
    """Physical-space views of one strain state, on the native or padded grid."""

    def __init__(self, s: TensorField, exact: bool):
        base = s.with_coeffs(s.coeffs * s.grid.dealias_mask)
        self.exact = exact
        self.grid = base.grid.padded(2) if exact else base.grid
        self.s_coeffs = base.pad_to(self.grid).coeffs if exact else base.coeffs
        self._phys: dict[str, np.ndarray] = {}

    def strain_phys(self) -> np.ndarray:
        if "s" not in self._phys:
            self._phys["s"] = physical_from_coeffs(self.grid, self.s_coeffs)
        return self._phys["s"]

    def velocity_coeffs(self) -> np.ndarray:
        if "uc" not in self._phys:
            self._phys["uc"] = ops._velocity_coeffs(self.grid, self.s_coeffs)
        return self._phys["uc"]

    def velocity_phys(self) -> np.ndarray:
        if "u" not in self._phys:
            self._phys["u"] = physical_from_coeffs(self.grid, self.velocity_coeffs())
        return self._phys["u"]

    def vorticity_coeffs(self) -> np.ndarray:
        if "wc" not in self._phys:
            g, u = self.grid, self.velocity_coeffs()
            self._phys["wc"] = 1j * np.stack(
                [
                    g.k2 * u[2] - g.k3 * u[1],
                    g.k3 * u[0] - g.k1 * u[2],
                    g.k1 * u[1] - g.k2 * u[0],
                ]
            )
        return self._phys["wc"]

    def vorticity_phys(self) -> np.ndarray:
        if "w" not in self._phys:
            self._phys["w"] = physical_from_coeffs(self.grid, self.vorticity_coeffs())
        return self._phys["w"]

    def advection_phys(self) -> np.ndarray:
        """(u . grad) S sampled pointwise."""
        if "adv" not in self._phys:
            ds = physical_from_coeffs(
                self.grid, _grad_stack_coeffs(self.grid, self.s_coeffs)
            )
            u = self.velocity_phys()
            self._phys["adv"] = np.einsum("jabc,jdabc->dabc", u, ds)
        return self._phys["adv"]

    def spectral_tensor(self, samples: np.ndarray) -> TensorField:
        """Transform product samples back, truncating unless exact."""
        coeffs = coeffs_from_physical(self.grid, samples)
        if not self.exact:
            coeffs = coeffs * self.grid.dealias_mask
        return TensorField(self.grid, coeffs)


def compute_terms(s: TensorField, advection: bool = True, exact: bool = False) -> NonlinearTerms:
    """All quadratic tensors of one strain state.

    Args:
        s: strain field (band-limited to its grid cutoff on entry).
        advection: also form (u.grad) S.
        exact: build products on the doubled grid with no truncation.
    """
    ws = _Workspace(s, exact)
    s2 = ws.spectral_tensor(_tensor_square(ws.strain_phys()))
    ww = ws.spectral_tensor(_outer(ws.vorticity_phys()))
    adv = ws.spectral_tensor(ws.advection_phys()) if advection else None
    return NonlinearTerms(
        strain_sq=s2,
        vort_outer=ww,
        advection=adv,
        velocity=VectorField(ws.grid, ws.velocity_coeffs()),
        vorticity=VectorField(ws.grid, ws.vorticity_coeffs()),
        exact=exact,
    )


def mu_rhs(
    s: TensorField,
    mu: float,
    advection: bool = False,
    exact: bool = False,
    include_laplacian: bool = True,
) -> TensorField:
    """Time derivative dS/dt of the model with weight mu.

    The quadratic pieces are combined pointwise before the single return
    transform, so one call costs one forward transform set regardless of mu.
    In exact mode the result lives on the doubled grid.  Integrators that
    handle the viscous part exactly ask for the quadratic terms alone with
    include_laplacian=False.
    """
    ws = _Workspace(s, exact)
    c_s2 = mu
    c_ww = 0.75 * mu - 0.5
    combo = None
    if c_s2 != 0.0:
        combo = c_s2 * _tensor_square(ws.strain_phys())
    if c_ww != 0.0:
        piece = c_ww * _outer(ws.vorticity_phys())
        combo = piece if combo is None else combo + piece
    if advection:
        piece = ws.advection_phys()
        combo = piece if combo is None else combo + piece
    lap = (
        TensorField(ws.grid, ws.s_coeffs * (-ws.grid.ksq))
        if include_laplacian
        else None
    )
    if combo is None:
        return lap if lap is not None else TensorField(ws.grid, np.zeros_like(ws.s_coeffs))
    n_term = ops.strain_project(ws.spectral_tensor(combo))
    return lap - n_term if lap is not None else -n_term


def rhs_from_terms(s: TensorField, terms: NonlinearTerms, mu: float) -> TensorField:
    """Assemble dS/dt from precomputed quadratic terms (cross-check path)."""
    combo = mu * terms.strain_sq + (0.75 * mu - 0.5) * terms.vort_outer
    if terms.advection is not None:
        combo = combo + terms.advection
    lap = ops.laplacian(s.pad_to(terms.grid) if terms.exact else s)
    return lap - ops.strain_project(combo)


def q_perturbation(s: TensorField, terms: NonlinearTerms | None = None) -> TensorField:
    """Projected perturbation P_st((u.grad) S + S^2 + (3/4) w (x) w).

    The result is orthogonal to S in L2 and lives on the doubled grid;
    pass precomputed exact terms (with advection) to reuse transforms.
    """
    if terms is None:
        terms = compute_terms(s, advection=True, exact=True)
    if terms.advection is None or not terms.exact:
        raise ValueError("q_perturbation needs exact terms with advection")
    combo = terms.advection + terms.strain_sq + 0.75 * terms.vort_outer
    return ops.strain_project(combo)


def blowup_ratio_terms(
    s: TensorField, terms: NonlinearTerms | None = None
) -> tuple[TensorField, TensorField]:
    """Numerator and denominator tensors of the perturbation-ratio criterion.

    numerator   = P_st((u.grad) S + (1/3) S^2 + (1/4) w (x) w)
    denominator = -Lap S + P_st((1/2)(u.grad) S + (5/6) S^2 + (1/8) w (x) w)

    The Laplacian in the denominator is applied to the strain tensor; both
    fields live on the doubled grid.
    """
    if terms is None:
        terms = compute_terms(s, advection=True, exact=True)
    if terms.advection is None or not terms.exact:
        raise ValueError("blowup_ratio_terms needs exact terms with advection")
    num = ops.strain_project(
        terms.advection + (1.0 / 3.0) * terms.strain_sq + 0.25 * terms.vort_outer
    )
    den_inner = ops.strain_project(
        0.5 * terms.advection + (5.0 / 6.0) * terms.strain_sq + 0.125 * terms.vort_outer
    )
    den = den_inner - ops.laplacian(s.pad_to(terms.grid))
    return num, den
