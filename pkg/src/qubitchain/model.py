"""Physical and numerical parameters, couplings and the initial packet.

Units: hbar = 1.  The bundled scenarios use g = 1 and a = 1, so rates
are in units of g and lengths in units of the site spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .circulant import Circulant, eigenvalues
from .errors import ConfigError

#: Poisson weight allowed beyond ``l_max`` when it is chosen automatically.
AUTO_TAIL_TOL = 1e-8
#: Edge amplitude (relative to the field maximum) treated as boundary contact.
EDGE_TOL = 1e-4
EDGE_SITES = 2
STABILITY_LIMIT = 0.1


def auto_l_max(mean_photons: float, tol: float = AUTO_TAIL_TOL) -> int:
    """Smallest truncation with Poisson tail weight below ``tol`` (at least 1)."""
    if mean_photons < 0:
        raise ValueError("mean_photons must be nonnegative")
    if mean_photons == 0:
        return 1
    l_max = max(1, int(mean_photons))
    while stats.poisson.sf(l_max, mean_photons) >= tol:
        l_max += 1
    return l_max


def coherent_amplitudes(mean_photons: float, l_max: int) -> tuple[np.ndarray, float]:
    """Real coherent-state amplitudes ``c(l)``, l = 0..l_max.

    Returns ``(c, tail)`` where ``tail`` is the Poisson weight beyond
    ``l_max`` that the truncation discards.  Callers decide whether the
    tail is acceptable.
    """
    if mean_photons < 0:
        raise ValueError("mean_photons must be nonnegative")
    if l_max < 0:
        raise ValueError("l_max must be nonnegative")
    c = np.zeros(l_max + 1)
    if mean_photons == 0:
        c[0] = 1.0
        return c, 0.0
    log_n = math.log(mean_photons)
    for l in range(l_max + 1):
        c[l] = math.exp(-mean_photons / 2 + 0.5 * l * log_n - 0.5 * math.lgamma(l + 1))
    return c, float(stats.poisson.sf(l_max, mean_photons))


def _symmetric(xi: np.ndarray, atol: float = 1e-12) -> bool:
    n = xi.size
    d = np.arange(n)
    return bool(np.all(np.abs(xi - xi[(-d) % n]) <= atol * max(1.0, np.max(np.abs(xi)))))


def build_coupling(xi: Sequence[float]) -> Circulant:
    """Coupling n-number ``sum_d xi[d] [e_1]^d`` over chain distance d.

    ``xi`` must satisfy ``xi[d] == xi[n-d]``; otherwise the lattice
    Hamiltonian would not be Hermitian.
    """
    x = np.asarray(xi, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("coupling needs at least one entry")
    if not _symmetric(x):
        raise ValueError(f"coupling {list(x)} is not symmetric under d <-> n-d")
    return Circulant(x)


def coupling_eigenvalues(xi: Sequence[float]) -> np.ndarray:
    """Real mode couplings ``k_q([xi])``."""
    return eigenvalues(build_coupling(xi)).real


@dataclass(frozen=True)
class SystemParams:
    n_chains: int = 1
    n_sites: int = 1024
    site_spacing: float = 1.0
    omega0: float = 0.0
    omega: float = 0.0
    g: float = 1.0
    wavenumber: float = 0.0
    xi1: tuple = (0.0,)
    xi2: tuple = (0.0,)
    # ``lambda`` in config files; relaxation rate.
    lambda_: float = 0.0
    mean_photons: float = 4.0
    # None selects the smallest truncation with tail weight < AUTO_TAIL_TOL.
    l_max: Optional[int] = None
    sigma: float = 20.0
    # None centres the packet on the lattice.
    x0: Optional[float] = None
    dt: float = 1e-3
    t_end: float = 10.0
    sample_stride: int = 10
    # Normalised chain profile u_j; None means uniform 1/sqrt(n).
    chain_profile: Optional[tuple] = None
    # Continuum quadrature overrides (half-width and spacing of the h grid).
    h_max: Optional[float] = None
    h_step: Optional[float] = None

    def __post_init__(self):
        def fix(name, value):
            object.__setattr__(self, name, value)

        for name in ("n_chains", "n_sites", "sample_stride"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(name, f"must be a positive integer, got {v!r}")
            fix(name, int(v))
        for name in ("site_spacing", "sigma", "dt", "t_end"):
            if not getattr(self, name) > 0:
                raise ConfigError(name, f"must be positive, got {getattr(self, name)!r}")
        for name in ("g", "lambda_", "mean_photons"):
            if not getattr(self, name) >= 0:
                raise ConfigError(_config_key(name), f"must be nonnegative, got {getattr(self, name)!r}")
        for name in ("omega0", "omega", "wavenumber"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")

        n = self.n_chains
        for name in ("xi1", "xi2"):
            xi = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if xi.size != n:
                raise ConfigError(name, f"needs {n} entries (one per chain distance), got {xi.size}")
            if not _symmetric(xi):
                raise ConfigError(name, f"{list(xi)} is not symmetric under d <-> n-d")
            fix(name, tuple(float(v) for v in xi))

        if self.chain_profile is not None:
            u = np.asarray(self.chain_profile, dtype=complex).reshape(-1)
            if u.size != n:
                raise ConfigError("chain_profile", f"needs {n} entries, got {u.size}")
            if abs(np.vdot(u, u).real - 1.0) > 1e-9:
                raise ConfigError("chain_profile", "must be normalised to unit length")
            fix("chain_profile", tuple(complex(v) for v in u))

        if self.l_max is None:
            fix("l_max", auto_l_max(self.mean_photons))
        elif int(self.l_max) != self.l_max or self.l_max < 0:
            raise ConfigError("l_max", f"must be a nonnegative integer, got {self.l_max!r}")
        else:
            fix("l_max", int(self.l_max))

        if self.x0 is None:
            fix("x0", 0.5 * (self.n_sites - 1) * self.site_spacing)

        for name in ("h_max", "h_step"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(name, f"must be positive, got {v!r}")

        rate = max(
            abs(self.omega0),
            abs(self.omega),
            self.g * math.sqrt(self.l_max + 1),
            4 * max(abs(v) for v in self.xi1 + self.xi2),
        )
        if self.dt * rate >= STABILITY_LIMIT:
            raise ConfigError(
                "dt",
                f"dt*max_rate = {self.dt * rate:.4g} >= {STABILITY_LIMIT}; "
                f"use dt < {STABILITY_LIMIT / rate:.4g}",
            )

    @property
    def n_blocks(self) -> int:
        return self.l_max + 1

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega

    @property
    def has_hopping(self) -> bool:
        return any(self.xi1) or any(self.xi2)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.site_spacing

    @property
    def profile(self) -> np.ndarray:
        if self.chain_profile is None:
            return np.full(self.n_chains, 1 / math.sqrt(self.n_chains), dtype=complex)
        return np.asarray(self.chain_profile, dtype=complex)

    def coupling1(self) -> Circulant:
        return build_coupling(self.xi1)

    def coupling2(self) -> Circulant:
        return build_coupling(self.xi2)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_config(self) -> dict:
        """Flat key -> value mapping using config-file key names."""
        out = {}
        for f in fields(self):
            out[_config_key(f.name)] = getattr(self, f.name)
        return out


def _config_key(name: str) -> str:
    return "lambda" if name == "lambda_" else name


@dataclass
class AmplitudeField:
    """Amplitudes of ``|a_mj, l>`` (``A``) and ``|b_mj, l+1>`` (``B``).

    Both arrays have shape ``(n_chains, n_sites, l_max + 1)``.  ``B`` at
    block index l holds the amplitude with l + 1 photons, so block l is
    exactly the pair coupled by the field.
    """

    A: np.ndarray
    B: np.ndarray = field(default=None)

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        if self.A.ndim != 3:
            raise ValueError(f"amplitude arrays must be 3-D, got shape {self.A.shape}")
        self.B = np.zeros_like(self.A) if self.B is None else np.asarray(self.B, dtype=complex)
        if self.B.shape != self.A.shape:
            raise ValueError(f"A has shape {self.A.shape} but B has {self.B.shape}")

    @classmethod
    def zeros(cls, n_chains: int, n_sites: int, l_max: int) -> "AmplitudeField":
        return cls(np.zeros((n_chains, n_sites, l_max + 1), dtype=complex))

    @property
    def n_chains(self) -> int:
        return self.A.shape[0]

    @property
    def n_sites(self) -> int:
        return self.A.shape[1]

    @property
    def l_max(self) -> int:
        return self.A.shape[2] - 1

    def copy(self) -> "AmplitudeField":
        return AmplitudeField(self.A.copy(), self.B.copy())

    def matches(self, p: SystemParams) -> bool:
        return self.A.shape == (p.n_chains, p.n_sites, p.n_blocks)

    def edge_fraction(self, sites: int = EDGE_SITES) -> float:
        """Largest amplitude on the outermost sites relative to the global maximum."""
        mag = np.maximum(np.abs(self.A), np.abs(self.B))
        peak = mag.max()
        if peak == 0:
            return 0.0
        s = min(sites, self.n_sites)
        edge = max(mag[:, :s].max(), mag[:, -s:].max())
        return float(edge / peak)


def gaussian_packet(x: np.ndarray, x0: float, sigma: float) -> np.ndarray:
    """Continuum-normalised Gaussian ``exp(-(x-x0)^2/2s^2) / (pi s^2)^(1/4)``."""
    return np.exp(-((x - x0) ** 2) / (2 * sigma**2)) / (math.pi * sigma**2) ** 0.25


def initial_state(p: SystemParams) -> AmplitudeField:
    """Single Gaussian packet in the excited state times a coherent field.

    ``A[j, m, l] = c(l) * G(x_m) * sqrt(a) * u_j`` and ``B = 0``.  The
    ``sqrt(a)`` factor makes the discrete sum of ``|A|^2`` match the
    continuum norm.
    """
    c, _ = coherent_amplitudes(p.mean_photons, p.l_max)
    env = gaussian_packet(p.positions, p.x0, p.sigma) * math.sqrt(p.site_spacing)
    A = p.profile[:, None, None] * env[None, :, None] * c[None, None, :]
    state = AmplitudeField(A)
    if p.has_hopping and state.edge_fraction() > EDGE_TOL:
        raise ConfigError(
            "x0",
            f"initial packet (x0={p.x0:g}, sigma={p.sigma:g}) touches the lattice ends; "
            f"keep it at least ~5 sigma away from both edges or enlarge n_sites",
        )
    return state
