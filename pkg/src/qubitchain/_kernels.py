"""Compiled RK4 step for the lattice equations.

Same arithmetic as :class:`qubitchain.discrete.LatticeOperator`, fused
into loops so a step allocates nothing.  The kernels work on arrays laid
out as ``(n, L, M)`` (site index innermost), which keeps the hopping
loop long and branch-free; :func:`qubitchain.discrete.propagate`
transposes at the boundary.  A single chain gets its own kernel because
it dominates the runtime of long runs.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def _phases(t, site_phase, omega, e):
    # e[m] = -i exp(i(k m a - omega t))
    rot = np.cos(omega * t) - 1j * np.sin(omega * t)
    for m in range(e.size):
        e[m] = -1j * site_phase[m] * rot


@numba.njit(cache=True)
def _deriv_single(A, B, c1, c2, gsq, dA, dB, e, outA, outB):
    L, M = A.shape
    ic1 = 1j * c1
    ic2 = 1j * c2
    for l in range(L):
        g = gsq[l]
        a, b, oa, ob = A[l], B[l], outA[l], outB[l]
        if M == 1:
            oa[0] = dA * a[0] + g * e[0] * b[0]
            ob[0] = dB * b[0] - g * np.conj(e[0]) * a[0]
            continue
        oa[0] = dA * a[0] + ic1 * a[1] + g * e[0] * b[0]
        ob[0] = dB * b[0] + ic2 * b[1] - g * np.conj(e[0]) * a[0]
        for m in range(1, M - 1):
            em = e[m]
            oa[m] = dA * a[m] + ic1 * (a[m - 1] + a[m + 1]) + g * em * b[m]
            ob[m] = dB * b[m] + ic2 * (b[m - 1] + b[m + 1]) - g * np.conj(em) * a[m]
        k = M - 1
        oa[k] = dA * a[k] + ic1 * a[k - 1] + g * e[k] * b[k]
        ob[k] = dB * b[k] + ic2 * b[k - 1] - g * np.conj(e[k]) * a[k]


@numba.njit(cache=True)
def _deriv_chains(A, B, c1, c2, gsq, dA, dB, e, outA, outB):
    n, L, M = A.shape
    for j in range(n):
        for l in range(L):
            g = gsq[l]
            oa, ob = outA[j, l], outB[j, l]
            a, b = A[j, l], B[j, l]
            for m in range(M):
                oa[m] = dA * a[m] + g * e[m] * b[m]
                ob[m] = dB * b[m] - g * np.conj(e[m]) * a[m]
            for d in range(n):
                cA = 1j * c1[d]
                cB = 1j * c2[d]
                if c1[d] == 0 and c2[d] == 0:
                    continue
                r = (j + d) % n
                ra, rb = A[r, l], B[r, l]
                for m in range(M):
                    na = 0j
                    nb = 0j
                    if m > 0:
                        na += ra[m - 1]
                        nb += rb[m - 1]
                    if m < M - 1:
                        na += ra[m + 1]
                        nb += rb[m + 1]
                    oa[m] += cA * na
                    ob[m] += cB * nb


@numba.njit(cache=True)
def _deriv(A, B, t, c1, c2, site_phase, gsq, omega, dA, dB, e, outA, outB):
    _phases(t, site_phase, omega, e)
    if A.shape[0] == 1:
        _deriv_single(A[0], B[0], c1[0], c2[0], gsq, dA, dB, e, outA[0], outB[0])
    else:
        _deriv_chains(A, B, c1, c2, gsq, dA, dB, e, outA, outB)


@numba.njit(cache=True)
def rk4_step(A, B, t, dt, c1, c2, site_phase, gsq, omega, dA, dB, work, e):
    """Advance ``(n, L, M)`` arrays ``A``, ``B`` in place by one step.

    ``work`` is ``(3, 2, n, L, M)`` scratch and ``e`` a length-M scratch vector.
    """
    kA, kB = work[0, 0], work[0, 1]
    tA, tB = work[1, 0], work[1, 1]
    accA, accB = work[2, 0], work[2, 1]
    a, b = A.reshape(-1), B.reshape(-1)
    ka, kb = kA.reshape(-1), kB.reshape(-1)
    ta, tb = tA.reshape(-1), tB.reshape(-1)
    sa, sb = accA.reshape(-1), accB.reshape(-1)
    size = a.size
    h = 0.5 * dt

    _deriv(A, B, t, c1, c2, site_phase, gsq, omega, dA, dB, e, kA, kB)
    for i in range(size):
        sa[i] = ka[i]
        sb[i] = kb[i]
        ta[i] = a[i] + h * ka[i]
        tb[i] = b[i] + h * kb[i]

    _deriv(tA, tB, t + h, c1, c2, site_phase, gsq, omega, dA, dB, e, kA, kB)
    for i in range(size):
        sa[i] += 2.0 * ka[i]
        sb[i] += 2.0 * kb[i]
        ta[i] = a[i] + h * ka[i]
        tb[i] = b[i] + h * kb[i]

    _deriv(tA, tB, t + h, c1, c2, site_phase, gsq, omega, dA, dB, e, kA, kB)
    for i in range(size):
        sa[i] += 2.0 * ka[i]
        sb[i] += 2.0 * kb[i]
        ta[i] = a[i] + dt * ka[i]
        tb[i] = b[i] + dt * kb[i]

    _deriv(tA, tB, t + dt, c1, c2, site_phase, gsq, omega, dA, dB, e, kA, kB)
    w = dt / 6.0
    for i in range(size):
        a[i] += w * (sa[i] + ka[i])
        b[i] += w * (sb[i] + kb[i])
