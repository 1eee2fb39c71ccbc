"""Closed-form symmetric 3x3 eigenvalues against numpy's LAPACK route."""

import numpy as np

from strainlab.eigen import (
    characteristic_residual,
    sym3_det,
    sym3_eigenvalues,
    sym3_trace_cubed,
)

# component order is (11, 12, 13, 22, 23, 33)


def _as_matrices(six):
    a, b, c, d, e, f = six
    m = np.empty(six.shape[1:] + (3, 3))
    m[..., 0, 0] = a
    m[..., 0, 1] = m[..., 1, 0] = b
    m[..., 0, 2] = m[..., 2, 0] = c
    m[..., 1, 1] = d
    m[..., 1, 2] = m[..., 2, 1] = e
    m[..., 2, 2] = f
    return m


def test_eigenvalues_match_lapack():
    rng = np.random.default_rng(21)
    six = rng.standard_normal((6, 512))
    lams = sym3_eigenvalues(six)
    want = np.linalg.eigvalsh(_as_matrices(six))
    assert np.max(np.abs(lams - np.moveaxis(want, -1, 0))) < 1e-10
    assert characteristic_residual(six, lams) < 1e-10


def test_eigenvalues_ascending():
    rng = np.random.default_rng(22)
    six = 10.0 * rng.standard_normal((6, 64, 3))
    lams = sym3_eigenvalues(six)
    assert np.all(np.diff(lams, axis=0) >= -1e-12)


def test_eigenvalues_diagonal_matrix():
    six = np.array([3.0, 0.0, 0.0, -1.0, 0.0, 2.0]).reshape(6, 1)
    lams = sym3_eigenvalues(six)
    assert np.allclose(lams[:, 0], [-1.0, 2.0, 3.0], atol=1e-13)


def test_eigenvalues_repeated_and_isotropic():
    # isotropic part only: all three eigenvalues coincide
    iso = np.array([2.0, 0.0, 0.0, 2.0, 0.0, 2.0]).reshape(6, 1)
    assert np.allclose(sym3_eigenvalues(iso)[:, 0], [2.0, 2.0, 2.0], atol=1e-12)
    # rank-one perturbation: eigenvalues (0, 0, 3) for the all-ones matrix
    ones = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).reshape(6, 1)
    assert np.allclose(sym3_eigenvalues(ones)[:, 0], [0.0, 0.0, 3.0], atol=1e-12)


def test_det_and_trace_cubed_against_dense():
    rng = np.random.default_rng(23)
    six = rng.standard_normal((6, 200))
    m = _as_matrices(six)
    assert np.max(np.abs(sym3_det(six) - np.linalg.det(m))) < 1e-12
    tr3 = np.trace(m @ m @ m, axis1=-2, axis2=-1)
    assert np.max(np.abs(sym3_trace_cubed(six) - tr3)) < 1e-11


def test_eigenvalue_sum_is_trace():
    rng = np.random.default_rng(24)
    six = rng.standard_normal((6, 100))
    lams = sym3_eigenvalues(six)
    assert np.max(np.abs(lams.sum(axis=0) - (six[0] + six[3] + six[5]))) < 1e-12
