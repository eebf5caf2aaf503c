"""Compiled inner loops for fixed-step RK4 propagation over a CSR matrix."""

import numba
import numpy as np

STATUS_COMPLETE = 0
STATUS_DECAYED = 1
STATUS_DIVERGED = 2


@numba.njit(cache=True, nogil=True)
def _derivative(indptr, indices, data, shift, y, out):
    # out = -i (H - shift) y
    for i in range(y.shape[0]):
        s = 0j
        for p in range(indptr[i], indptr[i + 1]):
            s += data[p] * y[indices[p]]
        out[i] = -1j * (s - shift * y[i])


@numba.njit(cache=True, nogil=True)
def rk4_correlation(indptr, indices, data, shift, psi0, dt, n_steps, floor):
    """Integrate d/dt psi = -i (H - shift) psi from psi0.

    Returns (overlaps <psi0|psi(t_k)>, squared norms, final state, status).
    Stops early once ||psi|| < floor, which bounds every later overlap.
    """
    n = psi0.shape[0]
    psi = psi0.copy()
    k = np.empty(n, np.complex128)
    acc = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    overlaps = np.empty(n_steps + 1, np.complex128)
    norms = np.empty(n_steps + 1, np.float64)
    ov = 0j
    nrm = 0.0
    for i in range(n):
        ov += np.conj(psi0[i]) * psi[i]
        nrm += psi[i].real ** 2 + psi[i].imag ** 2
    overlaps[0] = ov
    norms[0] = nrm
    half = 0.5 * dt
    floor2 = floor * floor
    for step in range(n_steps):
        _derivative(indptr, indices, data, shift, psi, k)
        for i in range(n):
            acc[i] = k[i]
            tmp[i] = psi[i] + half * k[i]
        _derivative(indptr, indices, data, shift, tmp, k)
        for i in range(n):
            acc[i] += 2.0 * k[i]
            tmp[i] = psi[i] + half * k[i]
        _derivative(indptr, indices, data, shift, tmp, k)
        for i in range(n):
            acc[i] += 2.0 * k[i]
            tmp[i] = psi[i] + dt * k[i]
        _derivative(indptr, indices, data, shift, tmp, k)
        ov = 0j
        nrm = 0.0
        for i in range(n):
            psi[i] += (dt / 6.0) * (acc[i] + k[i])
            ov += np.conj(psi0[i]) * psi[i]
            nrm += psi[i].real ** 2 + psi[i].imag ** 2
        overlaps[step + 1] = ov
        norms[step + 1] = nrm
        # H_eff is dissipative, so any large growth is an unstable step
        if not np.isfinite(nrm) or nrm > 1e8:
            return overlaps[: step + 2], norms[: step + 2], psi, STATUS_DIVERGED
        if nrm < floor2:
            return overlaps[: step + 2], norms[: step + 2], psi, STATUS_DECAYED
    return overlaps, norms, psi, STATUS_COMPLETE
