"""Hypercomplex n-numbers realised as circulant matrices.

An n-number is stored by the generating row of its circulant matrix:
``coeffs[j]`` multiplies the j-th power of the cyclic shift generator,
whose dense form has ones on the first superdiagonal and in the
lower-left corner.  Row ``r`` of the dense matrix is row 0 shifted
right by ``r``.

The chain-mode transform uses the kernel ``exp(+2*pi*i*q*j/n)``::

    k_q = sum_j coeffs[j] * exp(2*pi*i*q*j/n)

and ``synthesize`` is its exact inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class Circulant:
    """Immutable n-number given by its generating coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            raise ValueError("a Circulant needs at least one coefficient")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return self.coeffs.size

    @classmethod
    def identity(cls, n: int) -> "Circulant":
        _check_order(n)
        c = np.zeros(n, dtype=complex)
        c[0] = 1.0
        return cls(c)

    @classmethod
    def zeros(cls, n: int) -> "Circulant":
        _check_order(n)
        return cls(np.zeros(n, dtype=complex))

    def __add__(self, other: "Circulant") -> "Circulant":
        _check_same(self, other)
        return Circulant(self.coeffs + other.coeffs)

    def __sub__(self, other: "Circulant") -> "Circulant":
        _check_same(self, other)
        return Circulant(self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, Circulant):
            return multiply(self, other)
        return Circulant(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Circulant":
        if power < 0:
            raise ValueError("negative powers are not supported")
        out = Circulant.identity(self.n)
        base = self
        while power:
            if power & 1:
                out = multiply(out, base)
            base = multiply(base, base)
            power >>= 1
        return out

    def allclose(self, other: "Circulant", atol: float = 1e-12) -> bool:
        return self.n == other.n and bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)

    def apply(self, x: np.ndarray, axis: int = 0) -> np.ndarray:
        """Act with the dense circulant on ``x`` along ``axis``.

        ``out[j] = sum_r coeffs[(r - j) % n] * x[r]``.  Only nonzero
        coefficients cost work, so short-range couplings stay cheap.
        """
        x = np.asarray(x)
        if x.shape[axis] != self.n:
            raise ValueError(f"axis {axis} has length {x.shape[axis]}, expected {self.n}")
        if self.n == 1:
            return self.coeffs[0] * x
        out = np.zeros(x.shape, dtype=np.result_type(x, complex))
        for d, c in enumerate(self.coeffs):
            if c != 0:
                out += c * np.roll(x, -d, axis=axis)
        return out

    def __repr__(self) -> str:
        return f"Circulant({np.array2string(self.coeffs, precision=6)})"


def _check_order(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"chain count must be a positive integer, got {n!r}")


def _check_same(a: Circulant, b: Circulant) -> None:
    if a.n != b.n:
        raise ValueError(f"mismatched orders: {a.n} vs {b.n}")


def generator(n: int) -> Circulant:
    """The cyclic shift ``[e_1]``; ``generator(1)`` is the 1x1 identity."""
    _check_order(n)
    c = np.zeros(n, dtype=complex)
    c[1 % n] = 1.0
    return Circulant(c)


def multiply(a: Circulant, b: Circulant) -> Circulant:
    """Ring product, i.e. cyclic convolution of the coefficient rows."""
    _check_same(a, b)
    out = np.zeros(a.n, dtype=complex)
    for i, ai in enumerate(a.coeffs):
        if ai != 0:
            out += ai * np.roll(b.coeffs, i)
    return Circulant(out)


def eigenvalues(c: Circulant) -> np.ndarray:
    """Raw eigenvalues ``k_q``, ordered by mode index q (no 1/n factor)."""
    return mode_transform(c.coeffs, axis=0)


def projectors(n: int) -> list[Circulant]:
    """Primitive idempotents ``pi_q`` with ``eigenvalues(pi_q) = e_q``."""
    _check_order(n)
    j = np.arange(n)
    return [Circulant(np.exp(-2j * np.pi * q * j / n) / n) for q in range(n)]


def synthesize(eigvals: Sequence[complex]) -> Circulant:
    """Build ``sum_q k_q pi_q`` from eigenvalues ordered by q."""
    k = np.asarray(eigvals, dtype=complex).reshape(-1)
    _check_order(k.size)
    return Circulant(mode_synthesis(k, axis=0))


def mode_transform(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """``sum_j x[j] exp(2 pi i q j / n)`` along ``axis`` (unnormalised)."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[axis]
    return n * np.fft.ifft(x, axis=axis)


def mode_synthesis(k: np.ndarray, axis: int = 0) -> np.ndarray:
    """Inverse of :func:`mode_transform`."""
    k = np.asarray(k, dtype=complex)
    n = k.shape[axis]
    return np.fft.fft(k, axis=axis) / n

