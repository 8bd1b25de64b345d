import math

import numpy as np
import pytest

from pathident.entmeas import MixedStateParams
from pathident.interf import SetupParams, consistent_xi
from pathident.tables import TABLE_PHI, TABLE_SETUP


def brute_partial_trace(matrix, basis, keep):
    """Reference partial trace by explicit double loop over basis pairs."""
    keep = set(keep)
    kept = []
    for s in basis.states:
        k = tuple(m for m in s if m.particle.value in keep)
        if k not in kept:
            kept.append(k)
    out = np.zeros((len(kept), len(kept)), dtype=complex)
    for i, si in enumerate(basis.states):
        for j, sj in enumerate(basis.states):
            di = tuple(m for m in si if m.particle.value not in keep)
            dj = tuple(m for m in sj if m.particle.value not in keep)
            if di == dj:
                ki = kept.index(tuple(m for m in si if m.particle.value in keep))
                kj = kept.index(tuple(m for m in sj if m.particle.value in keep))
                out[ki, kj] += matrix[i, j]
    return out


def random_density(rng, n, rank=None):
    g = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(rng, lo=0.0):
    return MixedStateParams(rng.uniform(lo, 1.0), rng.uniform(), rng.uniform(-math.pi, math.pi))


def random_setup(rng, p, theta=None, t_lo=0.5):
    """Random physical setup consistent with the state's phase."""
    a1 = math.sqrt(rng.uniform(0.02, 0.98))
    a2 = math.sqrt(1 - a1 ** 2)
    return SetupParams(
        b1=a1 * np.exp(1j * rng.uniform(-math.pi, math.pi)),
        b2=a2 * np.exp(1j * rng.uniform(-math.pi, math.pi)),
        t_h=rng.uniform(t_lo, 1.0), t_v=rng.uniform(t_lo, 1.0),
        theta=rng.uniform(0, math.pi) if theta is None else theta,
        xi=consistent_xi(p.phi, rng.uniform(-math.pi, math.pi)),
        phi_alpha=rng.uniform(-math.pi, math.pi), phi_beta=rng.uniform(-math.pi, math.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def table_setup():
    return TABLE_SETUP


@pytest.fixture
def table_state():
    def make(coh, i_h=0.5):
        return MixedStateParams(i_h, coh, TABLE_PHI)
    return make
