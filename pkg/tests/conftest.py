import numpy as np
import pytest

from vaccpareto import zoo


@pytest.fixture(scope="session")
def models():
    return zoo()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def radius(entries, weights, eta):
    """Spectral radius by dense eigenvalues, independent of the power iteration."""
    m = np.asarray(entries) * (np.asarray(eta) * np.asarray(weights))[None, :]
    return float(np.abs(np.linalg.eigvals(m)).max())
