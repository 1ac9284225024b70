import numpy as np
import pytest


def random_hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
