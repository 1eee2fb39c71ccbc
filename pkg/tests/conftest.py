import pytest

from strainlab import Grid3, random_band_strain


@pytest.fixture(scope="session")
def grid8():
    return Grid3(8)


@pytest.fixture(scope="session")
def grid16():
    return Grid3(16)


@pytest.fixture(scope="session")
def grid32():
    return Grid3(32)


@pytest.fixture(scope="session")
def strain16(grid16):
    """One deterministic band-2 strain field, shared where the seed is irrelevant."""
    return random_band_strain(grid16, seed=7, band=2, amplitude=1.0)


def rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@pytest.fixture(scope="session")
def rel():
    return rel_err
