"""Single-scattering integrand building blocks.

Two related objects live here:

* ``kernel_entry`` serves the catalogue of polarization-resolved matrix
  elements K^tau_ij for the two orderings r_z >< s_z, written exactly in the
  per-factor product form (each factor is the differential-operator dyad of
  one plane-wave half-space mode, and the (i, j) element of the catalogue is
  the product of the (i, j) elements of the two factor dyads).  These are the
  quantities the finite-difference operator oracle verifies term by term.

* ``born_integrand`` evaluates the actual single-scattering integrand as the
  matrix product of the two half-space plane-wave factor tensors.  The matrix
  product carries cross-polarization contraction terms that the per-factor
  catalogue does not; all physical observables are built from this form,
  which is what the brute-force volume-integral oracle reproduces.
"""
from __future__ import annotations

import numpy as np

from .geometry import DepositionGeometry
from .halfspace import HalfSpaceEnvironment
from .kinematics import TE, TM, WaveContext, fresnel

_IDX = {"x": 0, "y": 1, "z": 2, 0: 0, 1: 1, 2: 2}
ORDER_GREATER = "greater"
ORDER_LESSER = "lesser"
TAUS = ("TE", "TM", "TETE", "TMTM", "TETM")


def _kq(ctx: WaveContext):
    """Scalar kinematic bundle (kx, ky, kz, kpar) of one wave context."""
    return ctx.k_x, ctx.k_y, ctx.k_z, ctx.k_par


def _base_entry(tau, i, j, k, kp, w2, e1, e2, sgn):
    """Catalogue entries for (i, j) in the x/z sub-block, before symmetry.

    k, kp are (kx, ky, kz, kpar) tuples for the two factors; e1 (e2) is the
    ordering exponential attached to the term whose unprimed (primed) factor
    is reflection-free; sgn is +1 for the greater ordering and -1 for the
    lesser (the direct-propagation dyads reverse their vertical direction,
    which flips the xz/zx cores).  Entries quadratic in reflections carry
    no exponential and no ordering sign.
    """
    kx, ky, kzv, kpar = k
    kxp, kyp, kzp, kparp = kp
    if tau == "TE":
        if i == "x" and j == "x":
            return (e1 * w2 * kyp**2 * (kx**2 * kzv**2 + ky**2 * w2)
                    + e2 * w2 * ky**2 * (kxp**2 * kzp**2 + kyp**2 * w2))
        if i == "x" and j == "y":
            return (e1 * kx * kxp * ky * kyp * w2 * kpar**2
                    + e2 * kxp * kx * kyp * ky * w2 * kparp**2)
        return 0j
    if tau == "TM":
        if i == "x" and j == "x":
            return (-e1 * kxp**2 * kzp**2 * (kx**2 * kzv**2 + ky**2 * w2)
                    - e2 * kx**2 * kzv**2 * (kxp**2 * kzp**2 + kyp**2 * w2))
        if i == "x" and j == "y":
            return (e1 * kpar**2 * kxp * ky * kyp * kx * kzp**2
                    + e2 * kparp**2 * kx * kyp * ky * kxp * kzv**2)
        if i == "x" and j == "z":
            core = kx * kxp * kzv * kzp * kpar**2 * kparp**2
            return sgn * (e1 - e2) * core
        if i == "z" and j == "x":
            core = kx * kxp * kzv * kzp * kpar**2 * kparp**2
            return sgn * (-e1 + e2) * core
        if i == "z" and j == "z":
            return (e1 + e2) * kpar**4 * kparp**4
        return 0j
    if tau == "TETE":
        if i == "x" and j == "x":
            return ky**2 * kyp**2 * w2**2
        if i == "x" and j == "y":
            return kxp * kx * kyp * ky * w2**2
        return 0j
    if tau == "TMTM":
        if i == "x" and j == "x":
            return kx**2 * kxp**2 * kzv**2 * kzp**2
        if i == "x" and j == "y":
            return kx * kxp * ky * kyp * kzv**2 * kzp**2
        if i == "x" and j == "z":
            return kx * kxp * kzv * kzp * kpar**2 * kparp**2
        if i == "z" and j == "x":
            return kx * kxp * kzv * kzp * kpar**2 * kparp**2
        if i == "z" and j == "z":
            return kpar**4 * kparp**4
        return 0j
    if tau == "TETM":
        if i == "x" and j == "x":
            return -w2 * (kx**2 * kyp**2 * kzv**2 + kxp**2 * ky**2 * kzp**2)
        if i == "x" and j == "y":
            return kx * kxp * ky * kyp * w2 * (kzv**2 + kzp**2)
        return 0j
    raise ValueError(f"unknown tau {tau!r}")


_NAMES = ("x", "y", "z")


def kernel_entry(tau, i, j, ordering, ctx: WaveContext, ctx_prime: WaveContext,
                 s_z=None, r_z=None, r_z_prime=None):
    """One catalogue element K^tau_ij for the given ordering.

    The greater ordering (field point above the source height) needs ``s_z``
    for the entries linear in a reflection coefficient; the lesser ordering
    needs ``r_z`` and ``r_z_prime`` instead.  Entries quadratic in the
    reflection coefficients are ordering-independent.

    y-indexed elements follow from the x-indexed ones by the in-plane mirror
    symmetry: K_yy = K_xx(kx <-> ky), K_yz = K_xz(kx <-> ky),
    K_zy = K_zx(kx <-> ky) and K_yx = K_xy (swapping primed and unprimed
    wave vectors alike).
    """
    if tau not in TAUS:
        raise ValueError(f"unknown tau {tau!r}")
    if ordering not in (ORDER_GREATER, ORDER_LESSER, ">", "<"):
        raise ValueError(f"unknown ordering {ordering!r}")
    greater = ordering in (ORDER_GREATER, ">")
    i = _NAMES[_IDX[i]]
    j = _NAMES[_IDX[j]]
    if ctx.frequency != ctx_prime.frequency:
        raise ValueError("both wave contexts must share one frequency")
    w2 = ctx.frequency.omega_sq

    kx, ky, kzv, kpar = _kq(ctx)
    kxp, kyp, kzp, kparp = _kq(ctx_prime)

    if tau in ("TE", "TM"):
        if greater:
            if s_z is None:
                raise ValueError("greater ordering needs s_z")
            e1 = np.exp(-2j * kzv * s_z)
            e2 = np.exp(-2j * kzp * s_z)
        else:
            if r_z is None or r_z_prime is None:
                raise ValueError("lesser ordering needs r_z and r_z_prime")
            e1 = np.exp(-2j * kzv * r_z)
            e2 = np.exp(-2j * kzp * r_z_prime)
    else:
        e1 = e2 = 1.0

    # reduce y-indexed entries to the stored x/z sub-block
    swap = False
    if (i, j) == ("y", "x"):
        i, j = "x", "y"
    elif i == "y" or j == "y":
        pair = {("y", "y"): ("x", "x"), ("y", "z"): ("x", "z"),
                ("z", "y"): ("z", "x")}
        if (i, j) in pair:
            i, j = pair[(i, j)]
            swap = True
        elif (i, j) == ("x", "y"):
            pass  # stored directly
    if swap:
        k = (ky, kx, kzv, kpar)
        kp = (kyp, kxp, kzp, kparp)
    else:
        k = (kx, ky, kzv, kpar)
        kp = (kxp, kyp, kzp, kparp)
    return complex(_base_entry(tau, i, j, k, kp, w2, e1, e2,
                               1.0 if greater else -1.0))


def kernel_matrix(tau, ordering, ctx, ctx_prime, s_z=None, r_z=None,
                  r_z_prime=None):
    """Full 3x3 catalogue matrix for one polarization tag."""
    out = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            out[i, j] = kernel_entry(tau, i, j, ordering, ctx, ctx_prime,
                                     s_z=s_z, r_z=r_z, r_z_prime=r_z_prime)
    return out


# ----------------------------------------------------------------------
# plane-wave factor tensors and the assembled integrand
# ----------------------------------------------------------------------

def factor_dyad(ctx: WaveContext, part: str, sign: float):
    """Operator dyads {sigma: u (x) v / norm} of one plane-wave GF factor.

    For the factor W(A, B), part "direct" is the reflection-free piece with
    ``sign`` = sgn(A_z - B_z); part "reflected" is the piece proportional to
    a Fresnel coefficient (always an up-going wave at the first argument).
    """
    kx, ky, kzv, kpar = _kq(ctx)
    w2 = ctx.frequency.omega_sq
    uTE = np.array([1j * ky, -1j * kx, 0.0])
    vTE = np.array([-1j * ky, 1j * kx, 0.0])
    if part == "direct":
        uTM = np.array([-sign * kx * kzv, -sign * ky * kzv, kpar**2])
        vTM = uTM.copy()
    elif part == "reflected":
        uTM = np.array([-kx * kzv, -ky * kzv, kpar**2])
        vTM = np.array([kx * kzv, ky * kzv, kpar**2])
    else:
        raise ValueError(f"unknown part {part!r}")
    return {TE: np.outer(uTE, vTE), TM: np.outer(uTM, vTM) / w2}


def plane_wave_factor(env: HalfSpaceEnvironment, A, B, ctx: WaveContext,
                      include_direct=True, include_reflected=True):
    """Integrand tensor of the half-space Green's function W(A, B).

    The Green's function is the d^2k integral of this tensor; it contains
    the i/(8 pi^2 kpar^2 k_z) measure, the transverse phase
    exp(i k.(A - B)_par) and the z mode functions with Fresnel weights.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    kx, ky, kzv, kpar = _kq(ctx)
    phase_t = np.exp(1j * (kx * (A[0] - B[0]) + ky * (A[1] - B[1])))
    z, zp = A[2], B[2]
    sign = 1.0 if z >= zp else -1.0
    out = np.zeros((3, 3), dtype=complex)
    if include_direct:
        dyads = factor_dyad(ctx, "direct", sign)
        zphase = np.exp(1j * kzv * abs(z - zp))
        out += (dyads[TE] + dyads[TM]) * zphase
    if include_reflected:
        dyads = factor_dyad(ctx, "reflected", sign)
        zphase = np.exp(1j * kzv * (z + zp))
        out += (dyads[TE] * fresnel(TE, env.substrate, ctx)
                + dyads[TM] * fresnel(TM, env.substrate, ctx)) * zphase
    return (1j / (8 * np.pi**2)) * phase_t * out / (kpar**2 * kzv)


def born_prefactor(geometry: DepositionGeometry, s, r, r_prime,
                   ctx: WaveContext, ctx_prime: WaveContext) -> complex:
    """The scalar prefactor P of the bracketed integrand form:

    P = -delta_eps / (64 pi^4 w^4 kpar^2 kpar'^2 k_z k_z')
        * exp{i[k.(r-s) + k'.(s-r') + k_z(r_z+s_z) + k_z'(r'_z+s_z)]}
    """
    de = geometry.delta_eps(ctx.frequency)
    kx, ky, kzv, kpar = _kq(ctx)
    kxp, kyp, kzp, kparp = _kq(ctx_prime)
    w4 = ctx.frequency.omega_sq**2
    phase = np.exp(1j * (kx * (r[0] - s[0]) + ky * (r[1] - s[1])
                         + kxp * (s[0] - r_prime[0]) + kyp * (s[1] - r_prime[1])
                         + kzv * (r[2] + s[2]) + kzp * (r_prime[2] + s[2])))
    return -de * phase / (64 * np.pi**4 * w4 * kpar**2 * kparp**2 * kzv * kzp)


def born_integrand(env: HalfSpaceEnvironment, geometry: DepositionGeometry,
                   s, r, r_prime, ctx: WaveContext, ctx_prime: WaveContext,
                   scattering=False):
    """Single-scattering integrand: w^2 delta_eps W_k(r,s) . W_k'(s,r').

    The two plane-wave factor tensors are composed by a matrix product, so
    the result carries the full intermediate polarization contraction.  With
    ``scattering=True`` the term independent of all reflection coefficients
    (the product of the two direct pieces) is removed.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    rp = np.asarray(r_prime, dtype=float)
    de = geometry.delta_eps(ctx.frequency)
    w2 = ctx.frequency.omega_sq
    f1 = plane_wave_factor(env, r, s, ctx)
    f2 = plane_wave_factor(env, s, rp, ctx_prime)
    out = f1 @ f2
    if scattering:
        d1 = plane_wave_factor(env, r, s, ctx, include_reflected=False)
        d2 = plane_wave_factor(env, s, rp, ctx_prime, include_reflected=False)
        out = out - d1 @ d2
    return w2 * de * out
