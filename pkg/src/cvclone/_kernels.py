"""Numeric kernels with a numba fast path and a pure-numpy fallback.

The numba path compiles scalar recurrences; the numpy path vectorizes the same
recurrences over the batch axis. They are independent implementations and the
test suite cross-checks them against each other and against dense matrix
exponentials.

Set ``CVCLONE_NO_NUMBA=1`` before import to force the numpy path (also the
automatic fallback when numba is unavailable).

The central recurrence builds displacement-operator matrix elements
``<m|D(z)|n>`` column by column without factorials:

    col_0[m]    = exp(-|z|^2/2) z^m / sqrt(m!)
    col_{n+1}[m] = (sqrt(m) col_n[m-1] - conj(z) col_n[m]) / sqrt(n+1)
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("CVCLONE_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false")

NUMBA_ENABLED = False
if not _disabled:
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False


# ---------------------------------------------------------------- numpy path

def displacement_columns_batch_numpy(zs, dim, ncols):
    """<m|D(z)|n> for m < dim, n < ncols, for every z in the batch.

    Returns a (len(zs), dim, ncols) complex array.
    """
    zs = np.ascontiguousarray(zs, dtype=np.complex128)
    nb = zs.shape[0]
    out = np.empty((nb, dim, ncols), np.complex128)
    col = np.empty((nb, dim), np.complex128)
    col[:, 0] = np.exp(-0.5 * (zs.real**2 + zs.imag**2))
    for m in range(1, dim):
        col[:, m] = col[:, m - 1] * zs / math.sqrt(m)
    out[:, :, 0] = col
    zc = np.conj(zs)[:, None]
    roots = np.sqrt(np.arange(dim, dtype=np.float64))
    for n in range(ncols - 1):
        nxt = np.empty_like(col)
        nxt[:, 0] = -zc[:, 0] * col[:, 0]
        nxt[:, 1:] = roots[1:] * col[:, :-1] - zc * col[:, 1:]
        nxt *= 1.0 / math.sqrt(n + 1.0)
        out[:, :, n + 1] = nxt
        col = nxt
    return out


def povm_grid_values_numpy(zs, s_dag, rho, weights, prefactor):
    """Outcome densities prefactor * sum_n weights[n] <u_n|rho|u_n>.

    u_n = s_dag @ D(z)|n>, evaluated for every z in the batch.
    """
    dim = s_dag.shape[0]
    nth = weights.shape[0]
    cols = displacement_columns_batch_numpy(zs, dim, nth)
    u = np.einsum("ij,bjn->bin", s_dag, cols)
    ru = np.einsum("ij,bjn->bin", rho, u)
    vals = np.einsum("bmn,bmn,n->b", u.conj(), ru, weights).real
    return prefactor * vals


def smear_accumulate_numpy(disp_mats, weights, rho):
    """sum_k weights[k] * D_k rho D_k^dagger over a batch of displacements."""
    return np.einsum("b,bij,jk,blk->il", weights, disp_mats, rho,
                     disp_mats.conj(), optimize=True)


# ---------------------------------------------------------------- numba path

if NUMBA_ENABLED:

    @numba.njit(cache=False)
    def _disp_fill(z, dim, ncols, out):
        out[0, 0] = math.exp(-0.5 * (z.real * z.real + z.imag * z.imag))
        for m in range(1, dim):
            out[m, 0] = out[m - 1, 0] * z / math.sqrt(float(m))
        zc = np.conj(z)
        for n in range(ncols - 1):
            r = 1.0 / math.sqrt(n + 1.0)
            out[0, n + 1] = -zc * out[0, n] * r
            for m in range(1, dim):
                out[m, n + 1] = (math.sqrt(float(m)) * out[m - 1, n]
                                 - zc * out[m, n]) * r

    @numba.njit(cache=False)
    def _disp_batch(zs, dim, ncols):
        nb = zs.shape[0]
        out = np.empty((nb, dim, ncols), np.complex128)
        for b in range(nb):
            _disp_fill(zs[b], dim, ncols, out[b])
        return out

    @numba.njit(cache=False)
    def _povm_grid(zs, s_dag, rho, weights, prefactor):
        nb = zs.shape[0]
        dim = s_dag.shape[0]
        nth = weights.shape[0]
        res = np.empty(nb, np.float64)
        cols = np.empty((dim, nth), np.complex128)
        for b in range(nb):
            _disp_fill(zs[b], dim, nth, cols)
            u = s_dag @ cols
            ru = rho @ u
            acc = 0.0
            for n in range(nth):
                s = 0.0
                for m in range(dim):
                    s += (u[m, n].conjugate() * ru[m, n]).real
                acc += weights[n] * s
            res[b] = prefactor * acc
        return res

    @numba.njit(cache=False)
    def _smear(disp_mats, weights, rho):
        dim = rho.shape[0]
        out = np.zeros((dim, dim), np.complex128)
        for b in range(disp_mats.shape[0]):
            d = disp_mats[b]
            out += weights[b] * (d @ rho @ d.conj().T)
        return out

    def displacement_columns_batch(zs, dim, ncols):
        return _disp_batch(np.ascontiguousarray(zs, dtype=np.complex128),
                           dim, ncols)

    def povm_grid_values(zs, s_dag, rho, weights, prefactor):
        return _povm_grid(np.ascontiguousarray(zs, dtype=np.complex128),
                          np.ascontiguousarray(s_dag),
                          np.ascontiguousarray(rho),
                          np.ascontiguousarray(weights), prefactor)

    def smear_accumulate(disp_mats, weights, rho):
        return _smear(np.ascontiguousarray(disp_mats),
                      np.ascontiguousarray(weights),
                      np.ascontiguousarray(rho))

else:
    displacement_columns_batch = displacement_columns_batch_numpy
    povm_grid_values = povm_grid_values_numpy
    smear_accumulate = smear_accumulate_numpy


def displacement_columns(z, dim, ncols):
    """<m|D(z)|n> as a (dim, ncols) matrix for a single z."""
    return displacement_columns_batch(np.array([z], np.complex128),
                                      dim, ncols)[0]


def displacement_matrix(z, dim):
    """Full dim x dim truncated displacement operator D(z)."""
    return displacement_columns(z, dim, dim)
