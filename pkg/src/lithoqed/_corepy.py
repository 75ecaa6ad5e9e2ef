"""Pure-numpy reduction core for the single-scattering wave-vector sums.

The hot object is the fourfold quadrature sum

    out[i,j] = sum_{p,q} sum_m sum_{alpha,beta}
               A[p,i,m,alpha] * E^{pq}(alpha,beta) * B[q,m,j,beta]

where alpha/beta run over the flattened (radial x angular) grids of the two
wave-vector integrals, A and B are per-node folded factor tables, and
E^{pq} is the product of the three analytic 1-D box integrals of the
plane-wave phases

    E_axis(alpha, beta) = int_lo^hi exp(i (d1[alpha] + d2[beta]) t) dt

with d1 = -kx, d2 = kx' for the transverse axes and d1 = cp[p] kz,
d2 = cq[q] kz' for z.  exp(i (d1+d2) * edge) factorizes into per-side
vectors, so the pairwise work is arithmetic only; transcendentals are O(M).

This module is the fallback implementation; a Cython twin with identical
semantics is selected at import when available (see _backend).
"""
from __future__ import annotations

import numpy as np

BLOCK = 256
_SMALL = 1e-6


def _edge_phases(d, lo, hi):
    mid = 0.5 * (lo + hi)
    return np.exp(1j * d * lo), np.exp(1j * d * hi), np.exp(1j * d * mid)


def _pair_factor(ph1, ph2, d1, d2, length):
    """E(alpha, beta) = (e^{i D hi} - e^{i D lo})/(i D), D = d1[a]+d2[b]."""
    e1_lo, e1_hi, e1_mid = ph1
    e2_lo, e2_hi, e2_mid = ph2
    delta = d1[:, None] + d2[None, :]
    num = e1_hi[:, None] * e2_hi[None, :] - e1_lo[:, None] * e2_lo[None, :]
    small = np.abs(delta) * abs(length) < _SMALL
    safe = np.where(small, 1.0, delta)
    E = num / (1j * safe)
    if np.any(small):
        u = delta * length
        series = length * (e1_mid[:, None] * e2_mid[None, :]) \
            * (1.0 - u * u / 24.0)
        E = np.where(small, series, E)
    return E


def reduce_composition(A, B, kx1, ky1, kz1, kx2, ky2, kz2, cp, cq,
                       x_intervals, y_interval, z_interval, skip00):
    """Accumulate the quadrature sum for all nine tensor entries.

    A: (2, 3, 3, M) complex, indexed [p, i, m, alpha]
    B: (2, 3, 3, M') complex, indexed [q, m, j, beta]
    cp, cq: length-2 z-phase coefficients of the direct/reflected parts
    x_intervals: (nx, 2) float array (a grating presums its strips here)
    Returns a 3x3 complex array; deterministic accumulation order.
    """
    M = kx1.size
    out = np.zeros((3, 3), dtype=complex)

    d1x, d2x = -kx1, kx2
    d1y, d2y = -ky1, ky2
    x_ph = [(_edge_phases(d1x, lo, hi), _edge_phases(d2x, lo, hi), hi - lo,
             lo, hi) for lo, hi in x_intervals]
    y_ph = (_edge_phases(d1y, *y_interval), _edge_phases(d2y, *y_interval))
    ylen = y_interval[1] - y_interval[0]
    zlen = z_interval[1] - z_interval[0]
    z_ph = [[(_edge_phases(cp[p] * kz1, *z_interval),
              _edge_phases(cq[q] * kz2, *z_interval))
             for q in range(2)] for p in range(2)]

    Bmat = [np.ascontiguousarray(B[q].reshape(9, -1).T) for q in range(2)]
    Amat = [np.ascontiguousarray(A[p].reshape(9, -1)) for p in range(2)]

    for a0 in range(0, M, BLOCK):
        a1 = min(a0 + BLOCK, M)
        sl = slice(a0, a1)
        ex = None
        for ph1, ph2, ln, lo, hi in x_ph:
            e = _pair_factor(tuple(v[sl] for v in ph1), ph2,
                             d1x[sl], d2x, ln)
            ex = e if ex is None else ex + e
        exy = ex * _pair_factor(tuple(v[sl] for v in y_ph[0]), y_ph[1],
                                d1y[sl], d2y, ylen)
        for p in range(2):
            for q in range(2):
                if skip00 and p == 0 and q == 0:
                    continue
                zp1, zp2 = z_ph[p][q]
                ker = exy * _pair_factor(tuple(v[sl] for v in zp1), zp2,
                                         cp[p] * kz1[sl], cq[q] * kz2, zlen)
                # G[alpha, (m,j)] = sum_beta ker[alpha,beta] Bmat[beta, (m,j)]
                G = (ker @ Bmat[q]).reshape(a1 - a0, 3, 3)
                # out[i,j] += sum_{m,alpha} A[p,i,m,alpha] G[alpha,m,j]
                out += np.einsum("ima,amj->ij",
                                 Amat[p].reshape(3, 3, -1)[:, :, sl], G)
    return out


def backend_name():
    return "numpy"
