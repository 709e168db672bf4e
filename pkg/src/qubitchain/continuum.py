"""Continuum-limit solution at exact resonance.

In the frame ``Phi = exp(i(w0 t - k x) sigma_z / 2) exp(lam t / 2) Psi``
each chain eigenmode q and photon block l evolves in wavenumber space
under the 2x2 generator

    H_q(h, l) = [[theta1_q(h), -g sqrt(l+1)],
                 [-g sqrt(l+1), theta2_q(h)]]

with ``theta1_q(h) = k_q(xi1) (2 - a^2 (h + k/2)^2)`` and
``theta2_q(h) = k_q(xi2) (2 - a^2 (h - k/2)^2)``, i.e.
``Phi_hat(h, t) = exp(i t H_q) Phi_hat(h, 0)``.  The field on a grid of
positions is recovered by a uniform-grid quadrature over h followed by
the inverse chain-mode transform.

Only w = w0 is supported: away from resonance the coupling matrix picks
up a time dependence and a single exponential no longer solves the
equations.  Detuned runs go through :mod:`qubitchain.discrete`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circulant import mode_synthesis, mode_transform
from .model import AmplitudeField, SystemParams, coherent_amplitudes, coupling_eigenvalues

#: Relative spectral weight tolerated at the ends of the h grid.
EDGE_WEIGHT_TOL = 1e-10


class QuadratureWarning(UserWarning):
    """The h-space quadrature is likely to be inaccurate."""


@dataclass(frozen=True)
class ModeDispersion:
    q: int
    xi1: float  # k_q([xi1])
    xi2: float  # k_q([xi2])
    a: float
    k: float

    def theta1(self, h):
        return self.xi1 * (2 - self.a**2 * (np.asarray(h) + self.k / 2) ** 2)

    def theta2(self, h):
        return self.xi2 * (2 - self.a**2 * (np.asarray(h) - self.k / 2) ** 2)


def mode_dispersions(p: SystemParams) -> list[ModeDispersion]:
    k1 = coupling_eigenvalues(p.xi1)
    k2 = coupling_eigenvalues(p.xi2)
    return [ModeDispersion(q, k1[q], k2[q], p.site_spacing, p.wavenumber) for q in range(p.n_chains)]


def require_resonance(p: SystemParams) -> None:
    scale = max(abs(p.omega0), abs(p.omega), 1.0)
    if abs(p.omega0 - p.omega) > 1e-12 * scale:
        raise ValueError(
            f"continuum solution needs omega == omega0 (got detuning {p.omega0 - p.omega:g}); "
            "use the discrete solver for detuned runs"
        )


def h_grid(p: SystemParams, x_extent: float) -> np.ndarray:
    """Symmetric uniform grid on ``[-H, H]``.

    ``H = k/2 + 8/sigma`` and the spacing is at most
    ``min(pi / (4 x_extent), 1 / (8 sigma))``, where ``x_extent`` is the
    largest distance from the packet centre that will be evaluated.
    ``h_max`` and ``h_step`` in the parameters override both.
    """
    H = p.h_max if p.h_max is not None else abs(p.wavenumber) / 2 + 8 / p.sigma
    step = p.h_step
    if step is None:
        step = min(math.pi / (4 * max(x_extent, p.site_spacing)), 1 / (8 * p.sigma))
    count = int(math.ceil(2 * H / step)) + 1
    return np.linspace(-H, H, count)


def propagate_mode(q: int, l, h, t: float, p: SystemParams) -> np.ndarray:
    """``exp(i t H_q(h, l))`` as an array of shape ``broadcast(l, h) + (2, 2)``.

    Closed form of the 2x2 exponential: with mean ``m = (th1 + th2)/2``,
    half splitting ``d = (th1 - th2)/2`` and coupling ``c``,
    ``exp(itH) = e^{itm} [cos(Wt) I + i sin(Wt)/W (H - m I)]``,
    ``W = sqrt(d^2 + c^2)``.
    """
    require_resonance(p)
    disp = mode_dispersions(p)[q]
    return _propagator(disp.theta1(h), disp.theta2(h), p.g * np.sqrt(np.asarray(l) + 1.0), t)


def _propagator(th1, th2, c, t: float) -> np.ndarray:
    th1, th2, c = np.broadcast_arrays(np.asarray(th1, float), np.asarray(th2, float), np.asarray(c, float))
    mean = 0.5 * (th1 + th2)
    half = 0.5 * (th1 - th2)
    W = np.sqrt(half**2 + c**2)
    cos = np.cos(W * t)
    # sin(W t)/W, finite at W = 0
    sinc = t * np.sinc(W * t / np.pi)
    phase = np.exp(1j * t * mean)
    P = np.empty(th1.shape + (2, 2), dtype=complex)
    P[..., 0, 0] = phase * (cos + 1j * sinc * half)
    P[..., 1, 1] = phase * (cos - 1j * sinc * half)
    P[..., 0, 1] = P[..., 1, 0] = phase * (-1j * sinc * c)
    return P


def initial_transform(p: SystemParams, h: np.ndarray, initial: Optional[AmplitudeField] = None) -> np.ndarray:
    """Chain-mode spectral functions ``Theta[q, l, c, h]`` at t = 0.

    ``c`` indexes the (A, B) components of the Phi frame and
    ``Theta_q = (1/n) sum_j Phi_hat_j exp(2 pi i q j / n)`` with
    ``Phi(x) = integral Phi_hat(h) exp(i h x) dh``.  Without ``initial``
    the Gaussian packet of :func:`qubitchain.model.initial_state` is
    transformed analytically; otherwise the lattice amplitudes (which
    carry a ``sqrt(a)`` factor per site) are transformed by direct sum.
    """
    h = np.asarray(h, dtype=float)
    n, L, a, k = p.n_chains, p.n_blocks, p.site_spacing, p.wavenumber
    if initial is None:
        c, _ = coherent_amplitudes(p.mean_photons, p.l_max)
        s = p.sigma
        shifted = h + k / 2
        gauss = (
            s * math.sqrt(2 * math.pi) / (2 * math.pi) / (math.pi * s**2) ** 0.25
            * np.exp(-0.5 * s**2 * shifted**2 - 1j * shifted * p.x0)
        )
        phi_hat = np.zeros((n, L, 2, h.size), dtype=complex)
        phi_hat[:, :, 0, :] = p.profile[:, None, None] * c[None, :, None] * gauss[None, None, :]
    else:
        if not initial.matches(p):
            raise ValueError("initial state does not match the parameters")
        x = p.positions
        kernel = np.exp(-1j * np.outer(x, h)) * (a / (2 * math.pi))
        rot = np.exp(-0.5j * k * x)
        fa = np.transpose(initial.A, (0, 2, 1)) * rot / math.sqrt(a)
        fb = np.transpose(initial.B, (0, 2, 1)) * rot.conj() / math.sqrt(a)
        phi_hat = np.stack([fa @ kernel, fb @ kernel], axis=2)
    return mode_transform(phi_hat, axis=0) / n


@dataclass
class ContinuumField:
    """Phi-frame amplitudes ``phi[j, l, c, x]`` at time ``t`` on ``x_grid``."""

    x_grid: np.ndarray
    t: float
    phi: np.ndarray
    params: SystemParams

    def psi(self) -> np.ndarray:
        """Lab-frame (continuum-normalised) amplitudes ``Psi[j, l, c, x]``."""
        p = self.params
        ang = 0.5 * (p.omega0 * self.t - p.wavenumber * self.x_grid)
        decay = math.exp(-0.5 * p.lambda_ * self.t)
        out = np.empty_like(self.phi)
        out[:, :, 0] = self.phi[:, :, 0] * np.exp(-1j * ang) * decay
        out[:, :, 1] = self.phi[:, :, 1] * np.exp(1j * ang) * decay
        return out

    def phi_norm(self) -> float:
        dx = float(np.mean(np.diff(self.x_grid))) if self.x_grid.size > 1 else self.params.site_spacing
        return float(np.sum(np.abs(self.phi) ** 2) * dx)

    def to_amplitude_field(self) -> AmplitudeField:
        """Lattice amplitudes (with the ``sqrt(a)`` factor), for grids on the sites."""
        psi = self.psi() * math.sqrt(self.params.site_spacing)
        return AmplitudeField(np.transpose(psi[:, :, 0], (0, 2, 1)), np.transpose(psi[:, :, 1], (0, 2, 1)))


class ContinuumSolver:
    """Caches the spectral data and quadrature weights for repeated evaluation.

    ``x_grid`` defaults to the lattice sites of ``p``.
    """

    def __init__(self, p: SystemParams, x_grid=None, initial: Optional[AmplitudeField] = None):
        require_resonance(p)
        self.p = p
        self.x = p.positions if x_grid is None else np.asarray(x_grid, dtype=float)
        extent = float(np.max(np.abs(self.x - p.x0))) if self.x.size else p.site_spacing
        self.h = h_grid(p, extent)
        self.dh = float(self.h[1] - self.h[0])
        self.theta0 = initial_transform(p, self.h, initial)
        self._check_quadrature(extent)
        self.modes = mode_dispersions(p)
        self.coupling = p.g * np.sqrt(np.arange(1, p.n_blocks + 1))
        self._synth = np.exp(1j * np.outer(self.h, self.x)) * self.dh

    def _check_quadrature(self, extent: float) -> None:
        weight = np.abs(self.theta0)
        peak = weight.max()
        if peak == 0:
            return
        ends = max(weight[..., :2].max(), weight[..., -2:].max()) / peak
        if ends > EDGE_WEIGHT_TOL:
            warnings.warn(
                f"spectral weight at the h-grid ends is {ends:.2e} of the peak; raise h_max",
                QuadratureWarning,
                stacklevel=3,
            )
        if self.dh * extent > math.pi:
            warnings.warn(
                f"h spacing {self.dh:.3g} aliases positions beyond {math.pi / self.dh:.3g}; lower h_step",
                QuadratureWarning,
                stacklevel=3,
            )

    def spectral(self, t: float) -> np.ndarray:
        """Evolved spectral functions ``Theta[q, l, c, h]`` at time ``t``."""
        out = np.empty_like(self.theta0)
        for q, disp in enumerate(self.modes):
            P = _propagator(
                disp.theta1(self.h)[None, :], disp.theta2(self.h)[None, :], self.coupling[:, None], t
            )
            th = self.theta0[q]
            out[q, :, 0] = P[..., 0, 0] * th[:, 0] + P[..., 0, 1] * th[:, 1]
            out[q, :, 1] = P[..., 1, 0] * th[:, 0] + P[..., 1, 1] * th[:, 1]
        return out

    def field(self, t: float) -> ContinuumField:
        modes = self.spectral(t) @ self._synth
        phi = mode_synthesis(modes, axis=0) * self.p.n_chains
        return ContinuumField(self.x, t, phi, self.p)

    def inversion(self, t: float, normalized: bool = True) -> float:
        rho = np.abs(self.field(t).phi) ** 2
        pa = rho[:, :, 0].sum()
        pb = rho[:, :, 1].sum()
        if normalized:
            return float((pa - pb) / (pa + pb))
        return float((pa - pb) * math.exp(-self.p.lambda_ * t) * self.p.site_spacing)


def evaluate_field(x_grid, t: float, p: SystemParams, initial: Optional[AmplitudeField] = None) -> ContinuumField:
    """Continuum field at time ``t`` on ``x_grid``."""
    return ContinuumSolver(p, x_grid, initial).field(t)
