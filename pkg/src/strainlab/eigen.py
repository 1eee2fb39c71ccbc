"""Closed-form eigenvalues of symmetric 3x3 tensors, batched over a grid.

Uses the trace-shifted trigonometric form: after removing the mean of the
diagonal the characteristic polynomial is depressed, and the three real
roots come from the arccosine of the normalised determinant.  No iteration,
no per-point LAPACK calls, fully vectorised.
"""

from __future__ import annotations

import numpy as np


def sym3_det(six: np.ndarray) -> np.ndarray:
    """Determinant of symmetric tensors stored as (11, 12, 13, 22, 23, 33)."""
    a11, a12, a13, a22, a23, a33 = six
    return (
        a11 * (a22 * a33 - a23 * a23)
        - a12 * (a12 * a33 - a23 * a13)
        + a13 * (a12 * a23 - a22 * a13)
    )


def sym3_trace_cubed(six: np.ndarray) -> np.ndarray:
    """Pointwise trace of M^3 for symmetric tensors in six-component storage."""
    a11, a12, a13, a22, a23, a33 = six
    return (
        a11**3
        + a22**3
        + a33**3
        + 3.0 * (a12**2 * (a11 + a22) + a13**2 * (a11 + a33) + a23**2 * (a22 + a33))
        + 6.0 * a12 * a13 * a23
    )


def sym3_eigenvalues(six: np.ndarray) -> np.ndarray:
    """Sorted eigenvalues lam1 <= lam2 <= lam3 of a batch of symmetric tensors.

    Args:
        six: array of shape (6, ...) holding (11, 12, 13, 22, 23, 33).

    Returns:
        Array of shape (3, ...) with ascending eigenvalues per point.
    """
    six = np.asarray(six, dtype=np.float64)
    a11, a12, a13, a22, a23, a33 = six
    q = (a11 + a22 + a33) / 3.0
    d11, d22, d33 = a11 - q, a22 - q, a33 - q
    p2 = (d11**2 + d22**2 + d33**2 + 2.0 * (a12**2 + a13**2 + a23**2)) / 6.0
    p = np.sqrt(p2)

    # Normalised determinant; where p == 0 the tensor is isotropic and the
    # angle is irrelevant, so guard the division and force r into range.
    safe_p = np.where(p > 0.0, p, 1.0)
    b = np.stack([d11, a12, a13, d22, a23, d33]) / safe_p
    r = np.clip(sym3_det(b) / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0

    lam3 = q + 2.0 * p * np.cos(phi)
    lam1 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    lam2 = 3.0 * q - lam1 - lam3
    return np.stack([lam1, lam2, lam3])


def characteristic_residual(six: np.ndarray, lams: np.ndarray) -> float:
    """Largest |det(M - lam I)| over the batch, relative to the tensor scale.

    Cheap independent certificate that returned values are eigenvalues.
    """
    a11, a12, a13, a22, a23, a33 = np.asarray(six, dtype=np.float64)
    scale = float(np.max(np.sqrt(a11**2 + a22**2 + a33**2 + 2 * (a12**2 + a13**2 + a23**2))))
    if scale == 0.0:
        scale = 1.0
    worst = 0.0
    for lam in lams:
        shifted = np.stack([a11 - lam, a12, a13, a22 - lam, a23, a33 - lam])
        worst = max(worst, float(np.max(np.abs(sym3_det(shifted)))))
    return worst / scale**3
