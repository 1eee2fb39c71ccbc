"""Spectral fields on the periodic box [0, 2*pi)^3.

Conventions used throughout the package:

* A real field is represented by Fourier coefficients f_hat(k) with
  f(x) = sum_k f_hat(k) exp(i k.x) over integer wavevectors k, stored in
  numpy's standard FFT index order on an n^3 collocation grid.
* Parseval then reads ||f||_L2^2 = (2*pi)^3 * sum_k |f_hat(k)|^2, and the
  homogeneous Sobolev multiplier is |k|^(2*alpha).
* Symmetric 3x3 tensor fields are stored as six components in the order
  (11, 12, 13, 22, 23, 33); every norm and inner product weights the
  off-diagonal slots twice so that the full nine-entry Frobenius pairing
  is reproduced.
* Quadratic and cubic products are formed pointwise in physical space,
  either truncated by the two-thirds rule on the native grid (solver use)
  or on a zero-padded grid that makes them exact (verification use).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.fft as _fft

TWO_PI = 2.0 * np.pi
#: Volume of the periodic box, the constant in Parseval's identity.
BOX_VOLUME = TWO_PI**3

#: Index pairs of the six stored tensor components.
TENSOR_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
#: Frobenius multiplicity of each stored component.
TENSOR_WEIGHTS = np.array([1.0, 2.0, 2.0, 1.0, 2.0, 1.0])
#: Position of component (i, j) in the six-slot storage, for i <= j.
TENSOR_SLOT = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}


class SpectralError(ValueError):
    """Raised when a field operation violates its contract."""


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid3:
    """Cubic collocation grid with a dealiasing cutoff.

    Args:
        n: points per axis; a power of two, at least 8, so that the
            two-thirds cutoff never collides with aliased images.
        dealias_cutoff: largest retained |k_i| for products; defaults to
            floor(n / 3) and may not exceed it.
    """

    n: int
    dealias_cutoff: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)):
            raise SpectralError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or not _is_power_of_two(self.n):
            raise SpectralError(f"grid size must be a power of two >= 8, got {self.n}")
        if self.dealias_cutoff == 0:
            object.__setattr__(self, "dealias_cutoff", self.n // 3)
        if not 1 <= self.dealias_cutoff <= self.n // 3:
            raise SpectralError(
                f"dealias cutoff must lie in [1, {self.n // 3}] for n={self.n}, "
                f"got {self.dealias_cutoff}"
            )

    @cached_property
    def k_axis(self) -> np.ndarray:
        """Integer wavenumbers along one axis in FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def k1(self) -> np.ndarray:
        return self.k_axis[:, None, None].astype(np.float64)

    @cached_property
    def k2(self) -> np.ndarray:
        return self.k_axis[None, :, None].astype(np.float64)

    @cached_property
    def k3(self) -> np.ndarray:
        return self.k_axis[None, None, :].astype(np.float64)

    @cached_property
    def ksq(self) -> np.ndarray:
        """|k|^2 on the full grid, shape (n, n, n)."""
        return self.k1**2 + self.k2**2 + self.k3**2

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        """1 / |k|^2 with the zero mode mapped to zero (mean-zero convention)."""
        out = np.empty_like(self.ksq)
        np.divide(1.0, self.ksq, out=out, where=self.ksq > 0)
        out[0, 0, 0] = 0.0
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean mask keeping modes with max_i |k_i| <= dealias_cutoff."""
        keep = np.abs(self.k_axis) <= self.dealias_cutoff
        return keep[:, None, None] & keep[None, :, None] & keep[None, None, :]

    @cached_property
    def x_axis(self) -> np.ndarray:
        """Collocation coordinates along one axis."""
        return TWO_PI * np.arange(self.n) / self.n

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full physical coordinate arrays (x1, x2, x3), each (n, n, n)."""
        return np.meshgrid(self.x_axis, self.x_axis, self.x_axis, indexing="ij")

    @property
    def cell_volume(self) -> float:
        return (TWO_PI / self.n) ** 3

    def padded(self, factor: int = 2) -> "Grid3":
        """Grid with `factor` times the resolution, cutoff scaled to match."""
        m = factor * self.n
        return Grid3(m, min(factor * self.dealias_cutoff, m // 3))


def _pad_coeffs(coeffs: np.ndarray, n: int, m: int) -> np.ndarray:
    """Embed FFT-ordered coefficients of an n-grid into an m-grid (m > n)."""
    out = np.zeros(coeffs.shape[:-3] + (m, m, m), dtype=coeffs.dtype)
    h = n // 2
    src = (slice(0, h), slice(n - h, n))
    dst = (slice(0, h), slice(m - h, m))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                out[..., dst[a], dst[b], dst[c]] = coeffs[..., src[a], src[b], src[c]]
    return out


def _crop_coeffs(coeffs: np.ndarray, m: int, n: int) -> np.ndarray:
    """Restrict FFT-ordered coefficients of an m-grid to an n-grid (n < m)."""
    out = np.zeros(coeffs.shape[:-3] + (n, n, n), dtype=coeffs.dtype)
    h = n // 2
    src = (slice(0, h), slice(m - h, m))
    dst = (slice(0, h), slice(n - h, n))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                out[..., dst[a], dst[b], dst[c]] = coeffs[..., src[a], src[b], src[c]]
    return out


@dataclass(frozen=True)
class _Field:
    """Shared behaviour of scalar, vector and symmetric tensor fields."""

    grid: Grid3
    coeffs: np.ndarray

    ncomp = 1
    component_weights = np.array([1.0])

    def __post_init__(self) -> None:
        n = self.grid.n
        want = (n, n, n) if self.ncomp == 1 else (self.ncomp, n, n, n)
        if self.coeffs.shape != want:
            raise SpectralError(
                f"{type(self).__name__} expects coefficients of shape {want}, "
                f"got {self.coeffs.shape}"
            )
        if self.coeffs.dtype != np.complex128:
            object.__setattr__(self, "coeffs", self.coeffs.astype(np.complex128))
        self.coeffs.setflags(write=False)

    @property
    def component_array(self) -> np.ndarray:
        """Coefficients with an explicit leading component axis."""
        if self.ncomp == 1:
            return self.coeffs[None]
        return self.coeffs

    def with_coeffs(self, coeffs: np.ndarray, grid: Grid3 | None = None) -> "_Field":
        return type(self)(grid if grid is not None else self.grid, coeffs)

    def pad_to(self, grid: Grid3) -> "_Field":
        """Embed this field on a finer grid without changing its content."""
        if grid.n == self.grid.n:
            return self
        if grid.n < self.grid.n:
            raise SpectralError("pad_to requires a finer grid")
        return self.with_coeffs(_pad_coeffs(self.coeffs, self.grid.n, grid.n), grid)

    def crop_to(self, grid: Grid3) -> "_Field":
        """Restrict this field to a coarser grid, discarding the spectral tail."""
        if grid.n == self.grid.n:
            return self
        if grid.n > self.grid.n:
            raise SpectralError("crop_to requires a coarser grid")
        return self.with_coeffs(_crop_coeffs(self.coeffs, self.grid.n, grid.n), grid)

    def physical(self) -> np.ndarray:
        """Real collocation samples; see :func:`to_physical`."""
        return to_physical(self)

    def __add__(self, other: "_Field") -> "_Field":
        self._check_mate(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "_Field") -> "_Field":
        self._check_mate(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "_Field":
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "_Field":
        return self.with_coeffs(-self.coeffs)

    def _check_mate(self, other: "_Field") -> None:
        if type(other) is not type(self) or other.grid != self.grid:
            raise SpectralError("field arithmetic requires matching type and grid")


class ScalarField(_Field):
    ncomp = 1
    component_weights = np.array([1.0])


class VectorField(_Field):
    ncomp = 3
    component_weights = np.array([1.0, 1.0, 1.0])


class TensorField(_Field):
    """Symmetric 3x3 tensor field stored as (11, 12, 13, 22, 23, 33)."""

    ncomp = 6
    component_weights = TENSOR_WEIGHTS


_FIELD_BY_NCOMP: dict[int, type] = {1: ScalarField, 3: VectorField, 6: TensorField}


def field_from_coeffs(grid: Grid3, coeffs: np.ndarray):
    """Wrap a coefficient array in the field class matching its leading axis."""
    if coeffs.ndim == 3:
        return ScalarField(grid, coeffs)
    try:
        cls = _FIELD_BY_NCOMP[coeffs.shape[0]]
    except (KeyError, IndexError):
        raise SpectralError(f"no field type with {coeffs.shape[0]} components") from None
    return cls(grid, coeffs)


def to_physical(field: _Field) -> np.ndarray:
    """Evaluate a field on its collocation grid.

    Returns:
        Real samples of shape (n, n, n) for scalars, (ncomp, n, n, n)
        otherwise.  The imaginary part produced by round-off is discarded;
        fields built by the package keep it at machine epsilon.
    """
    n3 = field.grid.n**3
    samples = _fft.ifftn(field.coeffs, axes=(-3, -2, -1)) * n3
    return np.ascontiguousarray(samples.real)


def from_physical(samples: np.ndarray, grid: Grid3):
    """Build a field from real collocation samples.

    Args:
        samples: real array of shape (n, n, n), (3, n, n, n) or (6, n, n, n).
        grid: grid the samples live on.

    Raises:
        SpectralError: on complex input or a shape mismatch.
    """
    samples = np.asarray(samples)
    if np.iscomplexobj(samples):
        raise SpectralError("physical samples must be real")
    n = grid.n
    if samples.shape not in {(n, n, n), (3, n, n, n), (6, n, n, n)}:
        raise SpectralError(
            f"sample shape {samples.shape} does not match grid n={n}"
        )
    coeffs = _fft.fftn(samples.astype(np.float64), axes=(-3, -2, -1)) / n**3
    return field_from_coeffs(grid, coeffs)


def physical_from_coeffs(grid: Grid3, coeffs: np.ndarray) -> np.ndarray:
    """Raw-array version of :func:`to_physical` for arbitrarily stacked components."""
    samples = _fft.ifftn(coeffs, axes=(-3, -2, -1)) * grid.n**3
    return np.ascontiguousarray(samples.real)


def coeffs_from_physical(grid: Grid3, samples: np.ndarray) -> np.ndarray:
    """Raw-array version of :func:`from_physical` for arbitrarily stacked components."""
    return _fft.fftn(np.asarray(samples, dtype=np.float64), axes=(-3, -2, -1)) / grid.n**3


def sobolev_multiplier(grid: Grid3, alpha: float) -> np.ndarray:
    """|k|^(2*alpha) with the zero mode set to 0 for alpha > 0 and 1 for alpha = 0."""
    if alpha == 0.0:
        return np.ones_like(grid.ksq)
    with np.errstate(divide="ignore"):
        mult = grid.ksq**alpha
    mult[0, 0, 0] = 0.0
    return mult


def sobolev_norm_sq(field: _Field, alpha: float = 0.0) -> float:
    """Squared homogeneous Sobolev norm ||f||_{H^alpha}^2.

    alpha = 0 gives the squared L2 norm including the mean mode.  Negative
    alpha (down to -1) requires a mean-zero field.
    """
    if alpha < -1.0:
        raise SpectralError(f"alpha must be >= -1, got {alpha}")
    comp = field.component_array
    if alpha < 0.0:
        mean_mag = float(np.max(np.abs(comp[:, 0, 0, 0])))
        scale = float(np.max(np.abs(comp))) or 1.0
        if mean_mag > 1e-13 * scale:
            raise SpectralError("negative-order norm requires a mean-zero field")
    mult = sobolev_multiplier(field.grid, alpha)
    power = np.abs(comp) ** 2
    weighted = np.tensordot(field.component_weights, power, axes=(0, 0))
    return float(BOX_VOLUME * np.sum(mult * weighted))


def inner_product(f: _Field, g: _Field) -> float:
    """L2 pairing <f, g>; tensors use the full Frobenius pairing.

    Both fields must be real in physical space, so the pairing is returned
    as the real part of the spectral sum.
    """
    if type(f) is not type(g) or f.grid != g.grid:
        raise SpectralError("inner product requires matching field type and grid")
    prod = f.component_array * np.conj(g.component_array)
    weighted = np.tensordot(f.component_weights, prod.real, axes=(0, 0))
    return float(BOX_VOLUME * np.sum(weighted))


def pointwise_magnitude(samples: np.ndarray, ncomp: int) -> np.ndarray:
    """Euclidean (scalar/vector) or Frobenius (tensor) magnitude per grid point."""
    if ncomp == 1:
        return np.abs(samples if samples.ndim == 3 else samples[0])
    if ncomp == 3:
        return np.sqrt(np.sum(samples**2, axis=0))
    sq = samples**2
    return np.sqrt(np.tensordot(TENSOR_WEIGHTS, sq, axes=(0, 0)))


def lq_norm(field: _Field, q: float) -> float:
    """Lebesgue L^q norm of the pointwise magnitude, by grid quadrature.

    q = inf returns the grid maximum.  The quadrature is exact only for
    band-limited integrands; otherwise it carries the usual trapezoidal
    error of the collocation grid.
    """
    if q != np.inf and q < 1.0:
        raise SpectralError(f"q must be >= 1 or inf, got {q}")
    mag = pointwise_magnitude(to_physical(field), field.ncomp)
    if q == np.inf:
        return float(np.max(mag))
    return float(np.sum(mag**q) * field.grid.cell_volume) ** (1.0 / q)


def conjugate_symmetry_residual(field: _Field) -> float:
    """Max |f_hat(-k) - conj(f_hat(k))| relative to the largest coefficient."""
    comp = field.component_array
    reflected = np.roll(comp[..., ::-1, ::-1, ::-1], 1, axis=(-3, -2, -1))
    resid = float(np.max(np.abs(reflected - np.conj(comp))))
    scale = float(np.max(np.abs(comp)))
    return resid / scale if scale > 0 else resid


def band_limit(field: _Field, cutoff: int | None = None) -> _Field:
    """Zero all modes with max_i |k_i| above the cutoff (grid cutoff by default)."""
    grid = field.grid
    if cutoff is None or cutoff == grid.dealias_cutoff:
        mask = grid.dealias_mask
    else:
        keep = np.abs(grid.k_axis) <= cutoff
        mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
    return field.with_coeffs(field.coeffs * mask)


def alias_free_product(
    fields: Sequence[_Field],
    pointwise_map: Callable[..., np.ndarray],
    mode: str = "truncate",
    pad_factor: int = 2,
    degree: int | None = None,
):
    """Pointwise product of band-limited fields without aliasing error.

    Args:
        fields: input fields on one grid; each is band-limited to the grid
            cutoff before use.
        pointwise_map: called with one physical sample array per field
            (component axis first for vectors/tensors); must return samples
            of a scalar, vector or tensor field.
        mode: "truncate" multiplies on the native grid and keeps only modes
            inside the cutoff cube (two-thirds rule); "full" multiplies on a
            grid enlarged by `pad_factor` and returns the complete product
            band on that padded grid.
        degree: polynomial degree of the map in its inputs, used to check
            that the requested mode is actually alias-free; defaults to the
            number of fields.

    Returns:
        A field on the native grid ("truncate") or padded grid ("full").
    """
    if not fields:
        raise SpectralError("alias_free_product needs at least one field")
    grid = fields[0].grid
    if any(f.grid != grid for f in fields):
        raise SpectralError("all product inputs must share one grid")
    if degree is None:
        degree = len(fields)
    K = grid.dealias_cutoff

    if mode == "truncate":
        # Aliased images of a degree-d product of cutoff-K fields land at
        # |k| >= n - d*K; they must stay outside the retained cube.
        if degree * K > grid.n - K - 1:
            raise SpectralError(
                f"cutoff {K} too large for degree-{degree} products on n={grid.n}"
            )
        phys = [to_physical(band_limit(f)) for f in fields]
        out = np.asarray(pointwise_map(*phys))
        result = from_physical(out, grid)
        return result.with_coeffs(result.coeffs * grid.dealias_mask)

    if mode == "full":
        big = grid.padded(pad_factor)
        if degree * K >= big.n // 2:
            raise SpectralError(
                f"cutoff {K} too large for exact degree-{degree} products "
                f"with padding factor {pad_factor}"
            )
        phys = [to_physical(band_limit(f).pad_to(big)) for f in fields]
        out = np.asarray(pointwise_map(*phys))
        return from_physical(out, big)

    raise SpectralError(f"unknown product mode {mode!r}")
