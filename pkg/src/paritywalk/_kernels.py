"""Hot loops for the hypercube-walk propagator.

Numba-compiled when available, with equivalent vectorized numpy fallbacks.
The Hamiltonian is applied matrix-free: a diagonal multiply plus one
single-bit-flip hop per qubit, each hop carrying coefficient -gamma.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("PARITYWALK_DISABLE_NUMBA", "") not in ("", "0")

try:  # pragma: no cover - exercised via the fallback flag in tests
    if _DISABLE:
        raise ImportError("numba disabled by PARITYWALK_DISABLE_NUMBA")
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def _hop_sum_numpy(p: np.ndarray, m: int) -> np.ndarray:
    """Sum of p over all single-bit-flip neighbours."""
    t = p.reshape((2,) * m)
    out = np.zeros_like(t)
    for axis in range(m):
        out += np.flip(t, axis=axis)
    return out.reshape(-1)


def _h_apply_numpy(p, out, diag, masks, gamma):
    m = len(masks)
    out[:] = diag * p - gamma * _hop_sum_numpy(p, m)


def _cheb_acc_term_numpy(p, q, acc, diag2, masks, g2, ck):
    m = len(masks)
    v = diag2 * p - g2 * _hop_sum_numpy(p, m) - q
    q[:] = v
    acc += ck * v


def _cheb_phi_term_numpy(p, q, out, diag2, masks, g2):
    m = len(masks)
    out[:] = diag2 * p - g2 * _hop_sum_numpy(p, m) - q


def _contract_numpy(phi, coeffs, acc):
    acc += coeffs @ phi


if HAVE_NUMBA:

    @numba.njit(cache=True, boundscheck=False, fastmath=True)
    def _h_apply_numba(p, out, diag, masks, gamma):  # pragma: no cover - jitted
        n = p.shape[0]
        nm = masks.shape[0]
        for z in range(n):
            hop = 0.0 + 0.0j
            for j in range(nm):
                hop += p[z ^ masks[j]]
            out[z] = diag[z] * p[z] - gamma * hop

    @numba.njit(cache=True, boundscheck=False, fastmath=True)
    def _cheb_acc_term_numba(p, q, acc, diag2, masks, g2, ck):  # pragma: no cover
        n = p.shape[0]
        nm = masks.shape[0]
        for z in range(n):
            hop = 0.0 + 0.0j
            for j in range(nm):
                hop += p[z ^ masks[j]]
            v = diag2[z] * p[z] - g2 * hop - q[z]
            q[z] = v
            acc[z] += ck * v

    @numba.njit(cache=True, boundscheck=False, fastmath=True)
    def _cheb_phi_term_numba(p, q, out, diag2, masks, g2):  # pragma: no cover
        n = p.shape[0]
        nm = masks.shape[0]
        for z in range(n):
            hop = 0.0 + 0.0j
            for j in range(nm):
                hop += p[z ^ masks[j]]
            out[z] = diag2[z] * p[z] - g2 * hop - q[z]

    @numba.njit(cache=True, boundscheck=False, fastmath=True)
    def _contract_numba(phi, coeffs, acc):  # pragma: no cover
        K = phi.shape[0]
        dim = phi.shape[1]
        W = coeffs.shape[0]
        block = 4096
        for z0 in range(0, dim, block):
            z1 = min(z0 + block, dim)
            for k in range(K):
                for s in range(W):
                    c = coeffs[s, k]
                    for z in range(z0, z1):
                        acc[s, z] += c * phi[k, z]

    h_apply = _h_apply_numba
    cheb_acc_term = _cheb_acc_term_numba
    cheb_phi_term = _cheb_phi_term_numba
    contract = _contract_numba
else:
    h_apply = _h_apply_numpy
    cheb_acc_term = _cheb_acc_term_numpy
    cheb_phi_term = _cheb_phi_term_numpy
    contract = _contract_numpy
