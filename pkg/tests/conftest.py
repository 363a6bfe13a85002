import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_blob_data():
    """Two well-separated Gaussian blobs in 5-D with labels."""
    gen = np.random.default_rng(7)
    a = gen.normal(0.0, 0.5, size=(30, 5))
    b = gen.normal(8.0, 0.5, size=(30, 5))
    X = np.vstack([a, b])
    labels = np.array([0] * 30 + [1] * 30)
    return X, labels
