# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled reduction core: same contract as lithoqed._corepy.

The pairwise phase-factor assembly runs in fused C loops (no large
temporaries); the beta-contraction uses BLAS zgemm.  Semantics match the
numpy fallback to rounding (same series switch, same truncation rules).
"""
import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx

cdef double _SMALL2 = 1e-12
cdef int BLOCK = 64


cdef inline cplx _pair(cplx e1_lo, cplx e1_hi, cplx e1_mid,
                       cplx e2_lo, cplx e2_hi, cplx e2_mid,
                       cplx delta, double length) nogil:
    cdef cplx num, u
    cdef double dr = delta.real, di = delta.imag
    cdef double mag2 = dr * dr + di * di
    if mag2 * length * length < _SMALL2:
        u = delta * length
        return length * e1_mid * e2_mid * (1.0 - u * u / 24.0)
    num = e1_hi * e2_hi - e1_lo * e2_lo
    # num / (i delta) = num * conj(i delta) / |delta|^2
    return num * ((-di - 1j * dr) / mag2)


def reduce_composition(A, B, kx1, ky1, kz1, kx2, ky2, kz2, cp, cq,
                       x_intervals, y_interval, z_interval, skip00):
    """Accumulate the quadrature sum for all nine tensor entries.

    See lithoqed._corepy.reduce_composition for the contract.
    """
    cdef int M = kx1.size
    cdef int Mp = kx2.size
    cdef int nx = len(x_intervals)
    cdef double y0 = y_interval[0], y1 = y_interval[1]
    cdef double z0 = z_interval[0], z1 = z_interval[1]
    cdef double ylen = y1 - y0, zlen = z1 - z0
    cdef bint skip = bool(skip00)

    cdef cnp.ndarray[cplx, ndim=1] d1x = np.ascontiguousarray(-kx1, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=1] d2x = np.ascontiguousarray(kx2, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=1] d1y = np.ascontiguousarray(-ky1, dtype=complex)
    cdef cnp.ndarray[cplx, ndim=1] d2y = np.ascontiguousarray(ky2, dtype=complex)

    # per-side edge-phase tables (numpy prep, O(M))
    xlo = np.array([iv[0] for iv in x_intervals])
    xhi = np.array([iv[1] for iv in x_intervals])
    cdef cnp.ndarray[cplx, ndim=2] x1lo = np.exp(1j * d1x[None, :] * xlo[:, None])
    cdef cnp.ndarray[cplx, ndim=2] x1hi = np.exp(1j * d1x[None, :] * xhi[:, None])
    cdef cnp.ndarray[cplx, ndim=2] x1mid = np.exp(1j * d1x[None, :] * (0.5 * (xlo + xhi))[:, None])
    cdef cnp.ndarray[cplx, ndim=2] x2lo = np.exp(1j * d2x[None, :] * xlo[:, None])
    cdef cnp.ndarray[cplx, ndim=2] x2hi = np.exp(1j * d2x[None, :] * xhi[:, None])
    cdef cnp.ndarray[cplx, ndim=2] x2mid = np.exp(1j * d2x[None, :] * (0.5 * (xlo + xhi))[:, None])
    cdef cnp.ndarray[double, ndim=1] xlen = np.asarray(xhi - xlo, dtype=float)

    cdef cnp.ndarray[cplx, ndim=1] y1lo = np.exp(1j * d1y * y0)
    cdef cnp.ndarray[cplx, ndim=1] y1hi = np.exp(1j * d1y * y1)
    cdef cnp.ndarray[cplx, ndim=1] y1mid = np.exp(1j * d1y * 0.5 * (y0 + y1))
    cdef cnp.ndarray[cplx, ndim=1] y2lo = np.exp(1j * d2y * y0)
    cdef cnp.ndarray[cplx, ndim=1] y2hi = np.exp(1j * d2y * y1)
    cdef cnp.ndarray[cplx, ndim=1] y2mid = np.exp(1j * d2y * 0.5 * (y0 + y1))

    # z: per part, signed kz enters the phase
    cdef cnp.ndarray[cplx, ndim=2] dz1 = np.ascontiguousarray(
        np.stack([cp[0] * kz1, cp[1] * kz1]), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] dz2 = np.ascontiguousarray(
        np.stack([cq[0] * kz2, cq[1] * kz2]), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] z1lo = np.exp(1j * dz1 * z0)
    cdef cnp.ndarray[cplx, ndim=2] z1hi = np.exp(1j * dz1 * z1)
    cdef cnp.ndarray[cplx, ndim=2] z1mid = np.exp(1j * dz1 * 0.5 * (z0 + z1))
    cdef cnp.ndarray[cplx, ndim=2] z2lo = np.exp(1j * dz2 * z0)
    cdef cnp.ndarray[cplx, ndim=2] z2hi = np.exp(1j * dz2 * z1)
    cdef cnp.ndarray[cplx, ndim=2] z2mid = np.exp(1j * dz2 * 0.5 * (z0 + z1))

    cdef cnp.ndarray[cplx, ndim=4] Aarr = np.ascontiguousarray(A, dtype=complex)
    # Bmat[q]: (M', 9) C-contiguous, column (m*3+j)
    Bm = [np.ascontiguousarray(np.asarray(B[q], dtype=complex)
                               .reshape(9, Mp).T) for q in range(2)]
    cdef cnp.ndarray[cplx, ndim=2] B0 = Bm[0]
    cdef cnp.ndarray[cplx, ndim=2] B1 = Bm[1]

    cdef cnp.ndarray[cplx, ndim=2] exy = np.empty((BLOCK, Mp), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] ker = np.empty((BLOCK, Mp), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] G = np.empty((BLOCK, 9), dtype=complex)
    cdef cnp.ndarray[cplx, ndim=2] out = np.zeros((3, 3), dtype=complex)

    cdef int a0, blk, ia, ib, ix, p, q, i, j, m
    cdef cplx ex, acc, alpha = 1.0, beta = 0.0
    cdef cplx *bptr
    cdef int nine = 9, kdim
    cdef char notrans = b'N'

    for a0 in range(0, M, BLOCK):
        blk = min(BLOCK, M - a0)
        # transverse phase-factor block
        with nogil:
            for ia in range(blk):
                for ib in range(Mp):
                    ex = 0.0
                    for ix in range(nx):
                        ex = ex + _pair(x1lo[ix, a0 + ia], x1hi[ix, a0 + ia],
                                        x1mid[ix, a0 + ia], x2lo[ix, ib],
                                        x2hi[ix, ib], x2mid[ix, ib],
                                        d1x[a0 + ia] + d2x[ib], xlen[ix])
                    exy[ia, ib] = ex * _pair(y1lo[a0 + ia], y1hi[a0 + ia],
                                             y1mid[a0 + ia], y2lo[ib],
                                             y2hi[ib], y2mid[ib],
                                             d1y[a0 + ia] + d2y[ib], ylen)
        for p in range(2):
            for q in range(2):
                if skip and p == 0 and q == 0:
                    continue
                with nogil:
                    for ia in range(blk):
                        for ib in range(Mp):
                            ker[ia, ib] = exy[ia, ib] * _pair(
                                z1lo[p, a0 + ia], z1hi[p, a0 + ia],
                                z1mid[p, a0 + ia], z2lo[q, ib], z2hi[q, ib],
                                z2mid[q, ib],
                                dz1[p, a0 + ia] + dz2[q, ib], zlen)
                # G (blk, 9) = ker (blk, M') @ Bmat (M', 9) via Fortran view
                bptr = &B0[0, 0] if q == 0 else &B1[0, 0]
                kdim = Mp
                zgemm(&notrans, &notrans, &nine, &blk, &kdim, &alpha,
                      bptr, &nine, &ker[0, 0], &kdim, &beta, &G[0, 0], &nine)
                with nogil:
                    for i in range(3):
                        for j in range(3):
                            acc = 0.0
                            for m in range(3):
                                for ia in range(blk):
                                    acc = acc + Aarr[p, i, m, a0 + ia] \
                                        * G[ia, 3 * m + j]
                            out[i, j] = out[i, j] + acc
    return np.asarray(out)


def backend_name():
    return "compiled"
