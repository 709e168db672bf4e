import math

import numpy as np
import pytest

from qubitchain.discrete import (
    LatticeOperator,
    Trajectory,
    integrate,
    integrate_modes,
    propagate,
    rhs,
    rk4_step,
)
from qubitchain.errors import EdgeContactError
from qubitchain.model import AmplitudeField, SystemParams, initial_state
from qubitchain.observables import block_norms, inversion, total_norm

from conftest import single_site, two_level_inversion


def random_field(rng, n, M, L):
    A = rng.normal(size=(n, M, L)) + 1j * rng.normal(size=(n, M, L))
    B = rng.normal(size=(n, M, L)) + 1j * rng.normal(size=(n, M, L))
    return AmplitudeField(A, B)


def test_rhs_free_rotation(rng):
    p = SystemParams(n_sites=4, g=0.0, omega0=1.3, l_max=2, x0=0.0)
    s = random_field(rng, 1, 4, 3)
    d = rhs(s, 0.7, p)
    assert np.allclose(d.A, -0.65j * s.A)
    assert np.allclose(d.B, 0.65j * s.B)
    # phase rotation only: d|A|^2/dt = 2 Re(conj(A) dA) = 0
    assert np.allclose((s.A.conj() * d.A).real, 0)


def test_rhs_two_level_cross_coupling():
    g, w, t, l = 0.8, 0.7, 0.3, 3
    p, _ = single_site(l_max=l, g=g, omega0=w, omega=w)
    A = np.zeros((1, 1, l + 1), complex)
    B = np.zeros_like(A)
    A[0, 0, l], B[0, 0, l] = 0.6, 0.8j
    d = rhs(AmplitudeField(A, B), t, p)
    c = g * math.sqrt(l + 1)
    assert d.A[0, 0, l] == pytest.approx(-0.5j * w * 0.6 - 1j * c * 0.8j * np.exp(-1j * w * t))
    assert d.B[0, 0, l] == pytest.approx(0.5j * w * 0.8j - 1j * c * 0.6 * np.exp(1j * w * t))


def test_rhs_relaxation_uniform(rng):
    p = SystemParams(n_sites=3, g=0.0, lambda_=0.2, l_max=1, x0=1.0)
    s = random_field(rng, 1, 3, 2)
    d = rhs(s, 0.0, p)
    assert np.allclose(d.A, -0.1 * s.A) and np.allclose(d.B, -0.1 * s.B)


def test_rhs_chain_uniform_hopping():
    xi = 0.9
    p = SystemParams(n_chains=3, xi1=(0, xi, xi), xi2=(0, 0, 0), n_sites=6, g=0.0, l_max=0, x0=2.5)
    profile = np.array([1.0, -2.0, 0.5, 3.0, 1.5, -1.0])
    A = np.tile(profile[None, :, None], (3, 1, 1)).astype(complex)
    d = rhs(AmplitudeField(A), 0.0, p)
    nbr = np.zeros(6)
    nbr[1:] += profile[:-1]
    nbr[:-1] += profile[1:]
    for j in range(3):
        assert np.allclose(d.A[j, :, 0], 1j * 2 * xi * nbr)


def test_rhs_open_ends():
    p = SystemParams(n_sites=3, xi1=(1.0,), xi2=(0.0,), g=0.0, l_max=0, x0=1.0)
    A = np.array([1.0, 10.0, 100.0], complex).reshape(1, 3, 1)
    d = rhs(AmplitudeField(A), 0.0, p)
    assert np.allclose(d.A[0, :, 0], 1j * np.array([10.0, 101.0, 10.0]))


def test_rhs_rejects_shape_mismatch():
    p = SystemParams(n_sites=4, l_max=2, x0=0.0)
    with pytest.raises(ValueError):
        rhs(AmplitudeField.zeros(1, 5, 2), 0.0, p)


@pytest.mark.parametrize("n, xi1, xi2", [(1, (3.0,), (2.0,)), (3, (1.0, 0.5, 0.5), (0.7, 0.2, 0.2)), (4, (2.0, 1.0, 0.3, 1.0), (1.0, 0.4, 0.0, 0.4))])
def test_kernel_matches_numpy_reference(rng, n, xi1, xi2):
    p = SystemParams(n_chains=n, xi1=xi1, xi2=xi2, n_sites=7, g=0.9, omega0=1.7, omega=0.4,
                     wavenumber=0.3, lambda_=0.05, l_max=3, dt=0.005, t_end=0.1, sample_stride=20, x0=0.0)
    s = random_field(rng, n, 7, 4)
    final = integrate(s, p, check_edges=False).final
    op = LatticeOperator(p)
    y = np.stack([s.A, s.B])
    for step in range(20):
        y = rk4_step(op, y, step * p.dt, p.dt)
    assert np.max(np.abs(final.A - y[0])) < 1e-13
    assert np.max(np.abs(final.B - y[1])) < 1e-13


@pytest.mark.parametrize("l", [0, 2, 7])
def test_rabi_population(l):
    p, s = single_site(l_max=l, block=l, g=1.0, omega0=0.4, omega=0.4, dt=1e-3, t_end=20.0, sample_stride=100)
    traj = integrate(s, p)
    pa = np.array([abs(x.A[0, 0, l]) ** 2 for x in traj.snapshots])
    assert np.max(np.abs(pa - np.cos(math.sqrt(l + 1) * traj.times) ** 2)) < 1e-6


def test_relaxation_without_coupling():
    p = SystemParams(n_sites=64, sigma=5.0, xi1=(1.0,), xi2=(0.5,), g=0.0, lambda_=0.05, l_max=2,
                     dt=1e-3, t_end=5.0, sample_stride=250)
    traj = integrate(initial_state(p), p)
    norms = np.array([total_norm(x) for x in traj.snapshots])
    assert np.max(np.abs(norms - norms[0] * np.exp(-0.05 * traj.times))) < 1e-8


def test_block_norms_conserved(rng):
    p = SystemParams(n_sites=96, sigma=6.0, xi1=(2.0,), xi2=(1.5,), g=1.0, omega0=1.0, omega=0.5,
                     wavenumber=0.5, mean_photons=2.0, l_max=6, dt=2e-3, t_end=5.0, sample_stride=500)
    s = initial_state(p)
    # give each block an independent B component so the blocks differ
    s = AmplitudeField(s.A, 0.3 * s.A[:, :, ::-1])
    traj = integrate(s, p)
    start = block_norms(traj.snapshots[0])
    for snap in traj.snapshots[1:]:
        assert np.max(np.abs(block_norms(snap) - start)) < 1e-9


def test_convergence_order():
    l, g, T = 3, 1.0, 5.0
    errors = []
    for dt in (0.04, 0.02):
        p, s = single_site(l_max=l, block=l, g=g, dt=dt, t_end=T, sample_stride=int(round(T / dt)))
        final = integrate(s, p).final
        exact = math.cos(g * math.sqrt(l + 1) * T)
        errors.append(abs(final.A[0, 0, l] - exact))
    ratio = errors[0] / errors[1]
    assert 12 < ratio < 20


def test_translation_covariance():
    shift, k = 7, 0.5
    base = dict(n_sites=160, sigma=6.0, xi1=(1.5,), xi2=(1.0,), g=0.8, omega0=1.0, omega=0.2,
                wavenumber=k, mean_photons=1.0, l_max=6, dt=2e-3, t_end=3.0, sample_stride=1500)
    p1 = SystemParams(x0=70.0, **base)
    p2 = SystemParams(x0=70.0 + shift, **base)
    f1 = integrate(initial_state(p1), p1).final
    f2 = integrate(initial_state(p2), p2).final
    assert np.max(np.abs(np.abs(f2.A[:, shift:]) - np.abs(f1.A[:, :-shift]))) < 1e-8
    assert np.max(np.abs(np.abs(f2.B[:, shift:]) - np.abs(f1.B[:, :-shift]))) < 1e-8
    # full phase structure: B picks up exp(-i k s a)
    assert np.max(np.abs(f2.A[:, shift:] - f1.A[:, :-shift])) < 1e-8
    assert np.max(np.abs(f2.B[:, shift:] - f1.B[:, :-shift] * np.exp(-1j * k * shift))) < 1e-8


def test_mode_factorisation_small():
    p = SystemParams(n_chains=3, xi1=(1.0, 0.4, 0.4), xi2=(0.8, 0.3, 0.3), n_sites=80, sigma=5.0,
                     g=1.0, omega0=0.5, mean_photons=1.0, l_max=5, dt=2e-3, t_end=1.0, sample_stride=100,
                     chain_profile=(0.6, 0.0, 0.8j))
    s = initial_state(p)
    full = integrate(s, p)
    modes = integrate_modes(s, p)
    assert np.allclose(full.times, modes.times)
    for a, b in zip(full.snapshots, modes.snapshots):
        assert np.max(np.abs(a.A - b.A)) < 1e-10
        assert np.max(np.abs(a.B - b.B)) < 1e-10


def test_sample_times_and_determinism():
    p, s = single_site(l_max=2, block=1, dt=0.003, t_end=0.3, sample_stride=7)
    t1 = integrate(s, p)
    t2 = integrate(s, p)
    assert np.array_equal(t1.times, np.arange(0, 101, 7) * 0.003)
    assert all(np.array_equal(a.A, b.A) and np.array_equal(a.B, b.B) for a, b in zip(t1.snapshots, t2.snapshots))
    assert np.array_equal(t1.snapshots[0].A, s.A)


def test_propagate_does_not_alias_initial():
    p, s = single_site(l_max=1, block=0, dt=0.01, t_end=0.1, sample_stride=1)
    before = s.A.copy()
    snaps = [x for _, x in propagate(s, p)]
    assert np.array_equal(s.A, before)
    assert not np.shares_memory(snaps[0].A, snaps[1].A)


def test_edge_contact_detected():
    p = SystemParams(n_sites=40, sigma=2.5, x0=20.0, xi1=(3.0,), xi2=(3.0,), l_max=1, mean_photons=0.5,
                     dt=1e-3, t_end=5.0, sample_stride=50)
    with pytest.raises(EdgeContactError):
        integrate(initial_state(p), p)
    traj = integrate(initial_state(p), p, check_edges=False)
    assert len(traj) == 101


def test_propagate_rejects_shape_mismatch():
    p = SystemParams(n_sites=4, l_max=2, x0=0.0)
    with pytest.raises(ValueError):
        next(propagate(AmplitudeField.zeros(1, 4, 5), p))


def test_trajectory_invariants():
    f = AmplitudeField.zeros(1, 1, 1)
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [f])
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [f, f])


def test_inversion_of_two_level_run():
    p, s = single_site(l_max=4, block=4, g=0.5, dt=1e-3, t_end=10.0, sample_stride=50)
    traj = integrate(s, p)
    w = np.array([inversion(x) for x in traj.snapshots])
    assert np.max(np.abs(w - two_level_inversion(traj.times, 0.5, 4))) < 1e-6
