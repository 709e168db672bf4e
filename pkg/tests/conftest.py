import numpy as np
import pytest

from qubitchain.model import AmplitudeField, SystemParams

# Lines collected by test_acceptance.py, printed after the run.
ACCEPTANCE_LINES = []


def dense_circulant(coeffs):
    """Dense oracle: sum_j c_j E^j with E the explicit cyclic shift matrix."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size
    E = np.zeros((n, n))
    for r in range(n):
        E[r, (r + 1) % n] = 1.0
    out = np.zeros((n, n), dtype=complex)
    power = np.eye(n)
    for cj in c:
        out += cj * power
        power = power @ E
    return out


def two_level_inversion(t, g, l):
    return np.cos(2 * g * np.sqrt(l + 1) * np.asarray(t))


def jcm_inversion(t, g, weights):
    t = np.asarray(t)[:, None]
    l = np.arange(len(weights))[None, :]
    return np.sum(np.asarray(weights)[None, :] * np.cos(2 * g * np.sqrt(l + 1) * t), axis=1)


def single_site(l_max, block=None, amps=None, **kw):
    """One-site, one-chain parameters and a state excited in the given block(s)."""
    base = dict(n_chains=1, n_sites=1, xi1=(0.0,), xi2=(0.0,), l_max=l_max, x0=0.0, sigma=1.0)
    base.update(kw)
    p = SystemParams(**base)
    A = np.zeros((1, 1, l_max + 1), dtype=complex)
    if block is not None:
        A[0, 0, block] = 1.0
    else:
        A[0, 0, :] = amps
    return p, AmplitudeField(A)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
