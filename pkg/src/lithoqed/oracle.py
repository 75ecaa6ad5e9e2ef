"""Independent brute-force verification paths.

Two oracles validate the analytic single-scattering machinery without
touching it:

* ``born_correction_riemann`` evaluates the correction as a plain midpoint
  sum over the deposition volume of products of numerically evaluated
  half-space Green's tensors.  It deliberately knows nothing about the
  kernel catalogue or the analytic structure factors (a test audits its
  imports), and its uniform cells make the O(n^-2) convergence-order check
  meaningful.

* ``kernel_operator_check`` re-derives every catalogue element by applying
  the TE/TM differential operators to the plane-wave mode functions with
  Richardson-extrapolated central finite differences, exploiting that each
  mode function factorizes in its two position arguments.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DepositionGeometry
from .halfspace import HalfSpaceEnvironment, halfspace_whole_batch
from .kernels import kernel_entry
from .kinematics import Frequency, WaveContext
from .quadrature import DEFAULT_CONFIG, QuadratureConfig


@dataclass(frozen=True)
class OracleConfig:
    cells_per_axis: int = 20
    fd_step: float = 1e-3
    seed: int = 1234

    def __post_init__(self):
        if self.cells_per_axis < 2:
            raise ValueError("need at least 2 cells per axis")
        if self.fd_step <= 0:
            raise ValueError("fd_step must be positive")


def _midpoint_cells(box, n):
    axes = []
    for lo, hi in (box.x_range, box.y_range, box.z_range):
        axes.append(lo + (hi - lo) * (np.arange(n) + 0.5) / n)
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    S = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    return S, box.volume / n**3


def born_correction_riemann(env: HalfSpaceEnvironment,
                            geometry: DepositionGeometry, r, r_prime,
                            frequency: Frequency,
                            config: OracleConfig = OracleConfig(),
                            quad_config: QuadratureConfig = DEFAULT_CONFIG,
                            scattering=False):
    """Midpoint-rule volume sum of w^2 de W^HS(r,s) W^HS(s,r') over cells.

    With ``scattering`` the reflection-independent product of vacuum parts
    is removed cell by cell (same subtraction the analytic path performs).
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(r_prime, dtype=float)
    if geometry.contains(r) or geometry.contains(rp):
        raise ValueError("oracle field points must lie outside the volume")
    de = geometry.delta_eps(frequency)
    acc = np.zeros((3, 3), dtype=complex)
    chunk = 4096  # bounds the per-batch Sommerfeld work arrays
    for box in geometry.boxes:
        S_all, dv = _midpoint_cells(box, config.cells_per_axis)
        for lo in range(0, S_all.shape[0], chunk):
            S = S_all[lo:lo + chunk]
            R = np.broadcast_to(r, S.shape)
            RP = np.broadcast_to(rp, S.shape)
            W1 = halfspace_whole_batch(env, R, S, frequency, quad_config)
            W2 = halfspace_whole_batch(env, S, RP, frequency, quad_config)
            acc += dv * np.einsum("nij,njk->ik", W1, W2)
            if scattering:
                from .halfspace import vacuum_gf_batch
                V1 = vacuum_gf_batch(R, S, frequency)
                V2 = vacuum_gf_batch(S, RP, frequency)
                acc -= dv * np.einsum("nij,njk->ik", V1, V2)
    return frequency.omega_sq * de * acc


def riemann_convergence_study(env, geometry, r, r_prime, frequency,
                              reference, cells=(5, 10, 20),
                              quad_config: QuadratureConfig = DEFAULT_CONFIG):
    """Relative deviations from ``reference`` per cell count and the fitted
    convergence order (midpoint rule is second order)."""
    scale = np.max(np.abs(reference))
    devs = []
    for n in cells:
        got = born_correction_riemann(env, geometry, r, r_prime, frequency,
                                      OracleConfig(cells_per_axis=n),
                                      quad_config)
        devs.append(float(np.max(np.abs(got - reference)) / scale))
    slope = np.polyfit(np.log(np.asarray(cells, float)), np.log(devs), 1)[0]
    return list(cells), devs, float(-slope)


# ----------------------------------------------------------------------
# finite-difference operator oracle for the kernel catalogue
# ----------------------------------------------------------------------

def _plane_phase(kx, ky, kz_first, kz_second):
    """Separable mode function factors: F(a) = exp(i(kx ax + ky ay + kzf az)),
    G(b) = exp(i(-kx bx - ky by + kzs bz))."""

    def F(a):
        return np.exp(1j * (kx * a[0] + ky * a[1] + kz_first * a[2]))

    def G(b):
        return np.exp(1j * (-kx * b[0] - ky * b[1] + kz_second * b[2]))

    return F, G


def _curl_z_vec(f, p, h):
    """(nabla x z)f = (df/dy, -df/dx, 0) by central differences."""
    def d(axis):
        e = np.zeros(3)
        e[axis] = h
        return (f(p + e) - f(p - e)) / (2 * h)
    return np.array([d(1), -d(0), 0.0 * d(0)])


def _curlcurl_z_vec(f, p, h):
    """(nabla x nabla x z)f = (dzdx, dzdy, -(dxx+dyy)) f."""
    def dd(a1, a2):
        e1 = np.zeros(3)
        e2 = np.zeros(3)
        e1[a1] = h
        e2[a2] = h
        return (f(p + e1 + e2) - f(p + e1 - e2) - f(p - e1 + e2)
                + f(p - e1 - e2)) / (4 * h * h)

    def d2(axis):
        e = np.zeros(3)
        e[axis] = h
        return (f(p + e) - 2 * f(p) + f(p - e)) / (h * h)

    return np.array([dd(2, 0), dd(2, 1), -(d2(0) + d2(1))])


def _richardson(vec_fn, h):
    v1 = vec_fn(h)
    v2 = vec_fn(h / 2)
    return (4.0 * v2 - v1) / 3.0


def _operator_dyad(sigma, F, G, p_first, p_second, h, omega_sq):
    """FD dyad of one factor: [D_sigma]_ij = (op_i F)(p1) (op_j G)(p2)."""
    if sigma == "TE":
        u = _richardson(lambda s: _curl_z_vec(F, p_first, s), h)
        v = _richardson(lambda s: _curl_z_vec(G, p_second, s), h)
        return np.outer(u, v)
    u = _richardson(lambda s: _curlcurl_z_vec(F, p_first, s), h)
    v = _richardson(lambda s: _curlcurl_z_vec(G, p_second, s), h)
    return np.outer(u, v) / omega_sq


def kernel_operator_check(tau, ordering, ctx: WaveContext,
                          ctx_prime: WaveContext,
                          config: OracleConfig = OracleConfig(),
                          points=None):
    """Max deviation of the catalogue from the FD operator construction.

    Returns the worst-case deviation over all (i, j): relative where the
    catalogue entry is nonzero, absolute (scaled by the matrix magnitude)
    where it vanishes identically.
    """
    rng = np.random.default_rng(config.seed)
    greater = ordering in ("greater", ">")
    if points is None:
        s_z = rng.uniform(0.2, 0.8)
        if greater:
            r_z = s_z + rng.uniform(0.3, 1.0)
            rp_z = s_z + rng.uniform(0.3, 1.0)
        else:
            r_z = s_z - rng.uniform(0.1, min(s_z - 0.05, 0.6))
            rp_z = s_z - rng.uniform(0.1, min(s_z - 0.05, 0.6))
        r = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), r_z])
        rp = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rp_z])
        s = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), s_z])
    else:
        r, s, rp = (np.asarray(p, float) for p in points)

    w2 = ctx.frequency.omega_sq
    kx, ky, kzv = ctx.k_x, ctx.k_y, ctx.k_z
    kxp, kyp, kzp = ctx_prime.k_x, ctx_prime.k_y, ctx_prime.k_z
    a = 1.0 if greater else -1.0
    h = config.fd_step

    # factor 1 connects r to s; factor 2 connects s to r'
    F1_0, G1_0 = _plane_phase(kx, ky, a * kzv, -a * kzv)
    F1_R, G1_R = _plane_phase(kx, ky, kzv, kzv)
    F2_0, G2_0 = _plane_phase(kxp, kyp, -a * kzp, a * kzp)
    F2_R, G2_R = _plane_phase(kxp, kyp, kzp, kzp)

    def dyad1(sigma, part):
        F, G = (F1_0, G1_0) if part == "0" else (F1_R, G1_R)
        return _operator_dyad(sigma, F, G, r, s, h, w2)

    def dyad2(sigma, part):
        F, G = (F2_0, G2_0) if part == "0" else (F2_R, G2_R)
        return _operator_dyad(sigma, F, G, s, rp, h, w2)

    norm = (F1_R(r) * G1_R(s) * F2_R(s) * G2_R(rp))
    w4 = w2 * w2
    if tau == "TETE":
        K = dyad1("TE", "R") * dyad2("TE", "R")
    elif tau == "TMTM":
        K = dyad1("TM", "R") * dyad2("TM", "R")
    elif tau == "TETM":
        K = (dyad1("TE", "R") * dyad2("TM", "R")
             + dyad1("TM", "R") * dyad2("TE", "R"))
    elif tau in ("TE", "TM"):
        d1_free = dyad1("TE", "0") + dyad1("TM", "0")
        d2_free = dyad2("TE", "0") + dyad2("TM", "0")
        K = d1_free * dyad2(tau, "R") + dyad1(tau, "R") * d2_free
    else:
        raise ValueError(f"unknown tau {tau!r}")
    K = w4 * K / norm

    kw = dict(s_z=s[2]) if greater else dict(r_z=r[2], r_z_prime=rp[2])
    ref = np.array([[kernel_entry(tau, i, j, ordering, ctx, ctx_prime, **kw)
                     for j in range(3)] for i in range(3)])
    scale = np.max(np.abs(ref))
    worst = 0.0
    for i in range(3):
        for j in range(3):
            if ref[i, j] == 0:
                dev = abs(K[i, j]) / scale
            else:
                dev = abs(K[i, j] - ref[i, j]) / abs(ref[i, j])
            worst = max(worst, float(dev))
    return worst
