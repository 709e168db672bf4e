"""Fixed-step RK4 integration of the lattice amplitude equations.

For chain j, site m and photon block l::

    dA/dt = (-i w0/2 - lam/2) A + i sum_r xi1[d(j,r)] (A[r,m-1] + A[r,m+1])
            - i g sqrt(l+1) B exp(+i(k m a - w t))
    dB/dt = (+i w0/2 - lam/2) B + i sum_r xi2[d(j,r)] (B[r,m-1] + B[r,m+1])
            - i g sqrt(l+1) A exp(-i(k m a - w t))

with cyclic chain distance d and open lattice ends.  The two-level
splitting enters as -(i/2) w0 sigma_z so that only the detuning w0 - w
survives in the rotating frame, and relaxation is a uniform -lam/2 decay
of both components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import _kernels
from .circulant import mode_synthesis, mode_transform
from .errors import EdgeContactError
from .model import EDGE_TOL, AmplitudeField, SystemParams


class LatticeOperator:
    """Right-hand side of the amplitude equations on stacked ``(2, n, M, L)`` arrays."""

    def __init__(self, p: SystemParams):
        self.p = p
        self.c1 = p.coupling1()
        self.c2 = p.coupling2()
        self.site_phase = np.exp(1j * p.wavenumber * p.positions)[:, None]
        self.gsq = p.g * np.sqrt(np.arange(1, p.n_blocks + 1))
        self.diag = np.array([-0.5j * p.omega0, 0.5j * p.omega0]) - 0.5 * p.lambda_
        self._scalar = p.n_chains == 1
        self._nbr = np.empty((p.n_chains, p.n_sites, p.n_blocks), dtype=complex)

    def _hop(self, x: np.ndarray, coupling) -> np.ndarray:
        nbr = self._nbr
        nbr[:, 0] = 0.0
        nbr[:, 1:] = x[:, :-1]
        nbr[:, :-1] += x[:, 1:]
        if self._scalar:
            return (1j * coupling.coeffs[0]) * nbr
        return 1j * coupling.apply(nbr, axis=0)

    def __call__(self, y: np.ndarray, t: float) -> np.ndarray:
        A, B = y[0], y[1]
        mix = (-1j * math.cos(self.p.omega * t) - math.sin(self.p.omega * t)) * self.site_phase * self.gsq
        out = np.empty_like(y)
        out[0] = self.diag[0] * A + self._hop(A, self.c1) + mix * B
        out[1] = self.diag[1] * B + self._hop(B, self.c2) - mix.conj() * A
        return out


def rhs(state: AmplitudeField, t: float, p: SystemParams) -> AmplitudeField:
    """Time derivative of ``state`` (returned as an AmplitudeField)."""
    if not state.matches(p):
        raise ValueError(
            f"state shape {state.A.shape} does not match parameters "
            f"{(p.n_chains, p.n_sites, p.n_blocks)}"
        )
    d = LatticeOperator(p)(np.stack([state.A, state.B]), t)
    return AmplitudeField(d[0], d[1])


def rk4_step(f, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    k1 = f(y, t)
    k2 = f(y + (0.5 * dt) * k1, t + 0.5 * dt)
    k3 = f(y + (0.5 * dt) * k2, t + 0.5 * dt)
    k4 = f(y + dt * k3, t + dt)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_edges(state: AmplitudeField, t: float) -> None:
    frac = state.edge_fraction()
    if frac > EDGE_TOL:
        raise EdgeContactError(
            f"wave packet reached the open lattice ends at t={t:g} "
            f"(edge/peak amplitude {frac:.3g} > {EDGE_TOL:g}); enlarge n_sites or shorten t_end"
        )


def propagate(
    initial: AmplitudeField, p: SystemParams, *, check_edges: bool = True
) -> Iterator[tuple[float, AmplitudeField]]:
    """Yield ``(t, state)`` at t = 0 and every ``sample_stride`` steps.

    Sample times are ``step * dt`` (never accumulated).  When the lattice
    has hopping, every sample is checked for contact with the open ends
    and :class:`EdgeContactError` is raised on contact.  Pass
    ``check_edges=False`` only for quantities that do not rely on the
    lattice emulating an infinite line (norms, for instance).
    """
    if not initial.matches(p):
        raise ValueError(
            f"initial state shape {initial.A.shape} does not match parameters "
            f"{(p.n_chains, p.n_sites, p.n_blocks)}"
        )
    # kernels use the (n, L, M) layout
    A = np.array(np.transpose(initial.A, (0, 2, 1)), dtype=complex, order="C")
    B = np.array(np.transpose(initial.B, (0, 2, 1)), dtype=complex, order="C")
    work = np.empty((3, 2) + A.shape, dtype=complex)
    phases = np.empty(p.n_sites, dtype=complex)
    c1 = np.ascontiguousarray(p.coupling1().coeffs)
    c2 = np.ascontiguousarray(p.coupling2().coeffs)
    site_phase = np.exp(1j * p.wavenumber * p.positions)
    gsq = p.g * np.sqrt(np.arange(1, p.n_blocks + 1))
    dA = complex(-0.5j * p.omega0 - 0.5 * p.lambda_)
    dB = complex(0.5j * p.omega0 - 0.5 * p.lambda_)
    check = check_edges and p.has_hopping

    def snapshot():
        return AmplitudeField(np.transpose(A, (0, 2, 1)).copy(), np.transpose(B, (0, 2, 1)).copy())

    state = snapshot()
    if check:
        _check_edges(state, 0.0)
    yield 0.0, state
    for step in range(1, p.n_steps + 1):
        _kernels.rk4_step(
            A, B, (step - 1) * p.dt, p.dt, c1, c2, site_phase, gsq, p.omega, dA, dB, work, phases
        )
        if step % p.sample_stride == 0:
            t = step * p.dt
            state = snapshot()
            if check:
                _check_edges(state, t)
            yield t, state


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list = field(default_factory=list)
    params: SystemParams = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.snapshots):
            raise ValueError("times and snapshots differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> AmplitudeField:
        return self.snapshots[-1]


def integrate(initial: AmplitudeField, p: SystemParams, *, check_edges: bool = True) -> Trajectory:
    """Propagate from 0 to ``t_end`` and keep every sampled snapshot."""
    times, snaps = [], []
    for t, s in propagate(initial, p, check_edges=check_edges):
        times.append(t)
        snaps.append(s)
    return Trajectory(np.array(times), snaps, p)


def mode_params(p: SystemParams, q: int) -> SystemParams:
    """Single-chain parameters that evolve chain eigenmode ``q`` on its own."""
    k1 = mode_transform(np.asarray(p.xi1), axis=0)[q].real
    k2 = mode_transform(np.asarray(p.xi2), axis=0)[q].real
    return p.replace(n_chains=1, xi1=(k1,), xi2=(k2,), chain_profile=None)


def integrate_modes(initial: AmplitudeField, p: SystemParams, *, check_edges: bool = True) -> Trajectory:
    """Integrate each chain eigenmode separately and reassemble the chains.

    Uses ``A_j = sum_q Theta_q exp(-2 pi i q j / n)`` with
    ``Theta_q = (1/n) sum_j A_j exp(2 pi i q j / n)``; agreement with
    :func:`integrate` checks that the modes really decouple.
    """
    n = p.n_chains
    theta_A = mode_transform(initial.A, axis=0) / n
    theta_B = mode_transform(initial.B, axis=0) / n
    per_mode = []
    for q in range(n):
        seed = AmplitudeField(theta_A[q : q + 1], theta_B[q : q + 1])
        per_mode.append(integrate(seed, mode_params(p, q), check_edges=check_edges))
    times = per_mode[0].times
    snaps = []
    for i in range(len(times)):
        tA = np.concatenate([tr.snapshots[i].A for tr in per_mode]) * n
        tB = np.concatenate([tr.snapshots[i].B for tr in per_mode]) * n
        snaps.append(AmplitudeField(mode_synthesis(tA, axis=0), mode_synthesis(tB, axis=0)))
    return Trajectory(times, snaps, p)
