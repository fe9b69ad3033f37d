import numpy as np
import pytest
import scipy.linalg

from qee.oracles import random_density


@pytest.fixture
def rng():
    return np.random.default_rng(20201018)


def fidelity_svd(rho1, rho2):
    """Independent route: (sum of singular values of sqrt(rho1) sqrt(rho2))**2."""
    s1 = scipy.linalg.sqrtm(rho1)
    s2 = scipy.linalg.sqrtm(rho2)
    return float(np.sum(np.linalg.svd(s1 @ s2, compute_uv=False)) ** 2)


def ket(*amps):
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def full_rank_pair(rng, n):
    return random_density(rng, n), random_density(rng, n)
