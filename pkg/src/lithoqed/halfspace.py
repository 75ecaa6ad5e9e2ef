"""Vacuum and half-space dyadic Green's functions.

The half-space Green's function for field points in the vacuum region z > 0
above a substrate filling z < 0 splits into a homogeneous (vacuum) part and a
reflection ("scattering") part proportional to the Fresnel coefficients.  The
vacuum part has the standard closed form; the scattering part is evaluated by
one-dimensional Sommerfeld integrals after the azimuthal integral is done
analytically in terms of Bessel functions J0, J1, J2.

For a perfect mirror the scattering part also has a closed form via an image
source, which serves as an independent cross-check of the quadrature engine.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j0, j1

from .kinematics import Frequency, MaterialModel, fresnel_arrays, kz
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, gauss_panel,
                         truncation_radius)


class CoincidentPointsError(ValueError):
    """The requested Green's function part is singular at r = r'."""


def _j2(x, J0, J1):
    """J2 from the recurrence 2 J1/x - J0, with its series near x = 0."""
    small = x < 1e-4
    safe = np.where(small, 1.0, x)
    out = 2.0 * J1 / safe - J0
    if np.any(small):
        out = np.where(small, x * x / 8.0 * (1.0 - x * x / 12.0), out)
    return out


class QuadratureConvergenceError(RuntimeError):
    """Quadrature failed to converge; carries the best estimate."""

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass
class GreenTensor:
    """3x3 dyadic Green's function sample with its evaluation metadata."""

    entries: np.ndarray
    r: np.ndarray
    r_prime: np.ndarray
    frequency: Frequency
    part: str  # "whole" | "scattering" | "homogeneous"

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.shape != (3, 3):
            raise ValueError("GreenTensor entries must be 3x3")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("GreenTensor entries must be finite")


@dataclass(frozen=True)
class HalfSpaceEnvironment:
    """Substrate material filling z < 0; field points must have z > 0."""

    substrate: MaterialModel


# ----------------------------------------------------------------------
# vacuum closed form
# ----------------------------------------------------------------------

def vacuum_gf_entries(r, r_prime, frequency: Frequency):
    """Closed-form free-space dyadic GF of (curl curl - omega^2 eps)."""
    R = np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float)
    Rn = np.linalg.norm(R)
    if Rn == 0:
        raise CoincidentPointsError("vacuum Green's function diverges at r = r'")
    n = R / Rn
    w = frequency.omega
    x = w * Rn
    scalar = np.exp(1j * x) / (4 * np.pi * Rn)
    t_iso = 1 + 1j / x - 1 / x**2
    t_dir = -1 - 3j / x + 3 / x**2
    return scalar * (t_iso * np.eye(3) + t_dir * np.outer(n, n))


def vacuum_gf(r, r_prime, frequency: Frequency) -> GreenTensor:
    return GreenTensor(vacuum_gf_entries(r, r_prime, frequency),
                       np.asarray(r, float), np.asarray(r_prime, float),
                       frequency, "whole")


def vacuum_gf_batch(A, B, frequency: Frequency):
    """Vacuum GF for paired point arrays A, B of shape (N, 3) -> (N, 3, 3)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    R = A - B
    Rn = np.linalg.norm(R, axis=1)
    if np.any(Rn == 0):
        raise CoincidentPointsError("vacuum Green's function diverges at r = r'")
    n = R / Rn[:, None]
    w = frequency.omega
    x = w * Rn
    scalar = np.exp(1j * x) / (4 * np.pi * Rn)
    t_iso = 1 + 1j / x - 1 / x**2
    t_dir = -1 - 3j / x + 3 / x**2
    out = (t_iso[:, None, None] * np.eye(3)[None]
           + t_dir[:, None, None] * n[:, :, None] * n[:, None, :])
    return scalar[:, None, None] * out


_MIRROR_FLIP = np.diag([-1.0, -1.0, 1.0])


def mirror_image_scattering(A, B, frequency: Frequency):
    """Perfect-mirror scattering part via the image of the source point:
    G^R(a, b) = W^vac(a, b_image) . diag(-1, -1, 1)."""
    B = np.asarray(B, dtype=float)
    Bim = B * np.array([1.0, 1.0, -1.0])
    return vacuum_gf_batch(A, Bim, frequency) @ _MIRROR_FLIP


# ----------------------------------------------------------------------
# Sommerfeld engine for the reflection part
# ----------------------------------------------------------------------

def medium_branch_points(material, frequency):
    """Radial breakpoints beyond k = omega where Fresnel coefficients kink.

    On the real axis a (nearly) lossless substrate has a second branch point
    at k = sqrt(Re eps) * omega; the imaginary axis is kink-free.
    """
    if frequency.is_imaginary or material.is_mirror \
            or material.kind == "vacuum":
        return ()
    from .kinematics import permittivity
    eps = permittivity(material, frequency)
    if eps.real > 1.0 and abs(eps.imag) < 0.2 * eps.real:
        return (frequency.value * float(np.sqrt(eps.real)),)
    return ()


def _evanescent_edges(w, lam, extra_breaks):
    edges = [w]
    while edges[-1] < lam:
        edges.append(min(2 * edges[-1], lam))
    for b in extra_breaks:
        if w < b < lam:
            edges.append(float(b))
    return sorted(set(edges))


def _reflection_radial_grid(frequency, z_sum_min, z_sum_max, rho_max,
                            config: QuadratureConfig, boost=1.0,
                            extra_breaks=()):
    """Node/weight arrays resolving both exp(i k_z Z) and J_n(k rho)."""
    w = frequency.value
    lam = truncation_radius(frequency, max(z_sum_min, 1e-12), config)
    if frequency.is_imaginary:
        nodes = []
        weights = []
        edges = [0.0] + _evanescent_edges(w, lam, ())
        for lo, hi in zip(edges[:-1], edges[1:]):
            if lo * z_sum_min > 55:
                break
            n = int(boost * (18 + 1.0 * (hi - lo) * rho_max
                             + 0.35 * hi * z_sum_max * np.exp(-lo * z_sum_min)))
            n = min(max(n, 12), 512)
            x, wx = gauss_panel(lo, hi, n)
            nodes.append(x)
            weights.append(wx)
        return np.concatenate(nodes), np.concatenate(weights)
    # real axis: sin-map on [0, w], cosh-mapped panels on [w, lam]; the
    # mapped weights carry a k_z factor that cancels the branch-point
    # singularity of the 1/k_z measures analytically.  A weakly absorbing
    # substrate adds a kink at k = sqrt(eps) w, handled by a panel edge.
    n_prop = int(boost * (config.radial_nodes_propagating
                          + 1.6 * w * (z_sum_max + rho_max)))
    n_prop = min(max(n_prop, 16), 768)
    th, wth = gauss_panel(0.0, np.pi / 2, n_prop)
    nodes = [w * np.sin(th)]
    weights = [wth * w * np.cos(th)]
    edges = _evanescent_edges(w, lam, extra_breaks)
    for k_lo, k_hi in zip(edges[:-1], edges[1:]):
        kap_lo = np.sqrt(max(k_lo**2 - w**2, 0.0))
        if kap_lo * z_sum_min > 55:
            break
        n = int(boost * (12 + 0.9 * (k_hi - k_lo) * rho_max
                         + 0.35 * np.sqrt(k_hi**2 - w**2) * z_sum_max
                         * np.exp(-kap_lo * z_sum_min)))
        n = min(max(n, 10), 512)
        t_lo = float(np.arccosh(k_lo / w))
        t_hi = float(np.arccosh(k_hi / w))
        tau, wtau = gauss_panel(t_lo, t_hi, n)
        nodes.append(w * np.cosh(tau))
        weights.append(wtau * w * np.sinh(tau))
    return np.concatenate(nodes), np.concatenate(weights)


def _assemble_reflection(points_geom, frequency, substrate, config, boost=1.0):
    """Scattering-part tensors for arrays (rho, psi, Z) -> (N, 3, 3).

    Six master Sommerfeld integrals are shared by all tensor entries:
      Q0e, Q2e : TE with J0 / J2 weights
      Q0m, Q2m : TM (k_z^2/omega^2 weighted) with J0 / J2
      Q1m      : TM mixed-entry integral with J1
      Qzz      : TM zz integral with J0
    """
    rho, psi, Z = points_geom
    N = rho.size
    w2 = frequency.omega_sq
    k, wk = _reflection_radial_grid(frequency, float(Z.min()), float(Z.max()),
                                    float(rho.max()), config, boost,
                                    medium_branch_points(substrate, frequency))
    kzv = kz(frequency, k)
    rte, rtm = fresnel_arrays(substrate, frequency, k)

    kr = k[:, None] * rho[None, :]
    J0 = j0(kr)
    J1 = j1(kr)
    J2 = _j2(kr, J0, J1)
    E = np.exp(1j * kzv[:, None] * Z[None, :])

    base_e = (wk * k / kzv * rte)[:, None] * E
    base_m = (wk * k * kzv / w2 * rtm)[:, None] * E
    q0e = np.sum(base_e * J0, axis=0)
    q2e = np.sum(base_e * J2, axis=0)
    q0m = np.sum(base_m * J0, axis=0)
    q2m = np.sum(base_m * J2, axis=0)
    q1m = np.sum((wk * k**2 / w2 * rtm)[:, None] * E * J1, axis=0)
    qzz = np.sum((wk * k**3 / (kzv * w2) * rtm)[:, None] * E * J0, axis=0)

    c1, s1 = np.cos(psi), np.sin(psi)
    c2, s2 = np.cos(2 * psi), np.sin(2 * psi)
    pref = 1j / (8 * np.pi)
    out = np.zeros((N, 3, 3), dtype=complex)
    out[:, 0, 0] = pref * (q0e + c2 * q2e - q0m + c2 * q2m)
    out[:, 1, 1] = pref * (q0e - c2 * q2e - q0m - c2 * q2m)
    out[:, 0, 1] = out[:, 1, 0] = pref * (s2 * q2e + s2 * q2m)
    out[:, 0, 2] = (1 / (4 * np.pi)) * c1 * q1m
    out[:, 2, 0] = -out[:, 0, 2]
    out[:, 1, 2] = (1 / (4 * np.pi)) * s1 * q1m
    out[:, 2, 1] = -out[:, 1, 2]
    out[:, 2, 2] = (1j / (4 * np.pi)) * qzz
    return out


def _pair_geometry(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    dx = A[:, 0] - B[:, 0]
    dy = A[:, 1] - B[:, 1]
    rho = np.hypot(dx, dy)
    psi = np.arctan2(dy, dx)
    Z = A[:, 2] + B[:, 2]
    return rho, psi, Z


def halfspace_scattering_batch(env: HalfSpaceEnvironment, A, B,
                               frequency: Frequency,
                               config: QuadratureConfig = DEFAULT_CONFIG,
                               check=None):
    """Reflection-part tensors for paired points A, B -> (N, 3, 3).

    ``check`` overrides config.refine: when truthy, a 40%-denser grid is
    compared against the base grid and a QuadratureConvergenceError raised if
    the difference misses the configured tolerance.
    """
    A2 = np.atleast_2d(np.asarray(A, dtype=float))
    B2 = np.atleast_2d(np.asarray(B, dtype=float))
    if np.any(A2[:, 2] <= 0) or np.any(B2[:, 2] <= 0):
        raise ValueError("half-space field points must satisfy z > 0")
    geom = _pair_geometry(A2, B2)
    out = _assemble_reflection(geom, frequency, env.substrate, config)
    do_check = config.refine if check is None else check
    if do_check:
        ref = _assemble_reflection(geom, frequency, env.substrate, config,
                                   boost=1.4)
        err = float(np.max(np.abs(ref - out)))
        scale = float(np.max(np.abs(ref)))
        if err > max(config.abs_tol, 10 * config.rel_tol * max(scale, 1e-300)):
            raise QuadratureConvergenceError(
                f"reflection-part quadrature not converged (err {err:.2e}, "
                f"scale {scale:.2e})", estimate=ref, error_bound=err)
        out = ref
    return out


def halfspace_gf(env: HalfSpaceEnvironment, r, r_prime, frequency: Frequency,
                 part: str = "whole",
                 config: QuadratureConfig = DEFAULT_CONFIG) -> GreenTensor:
    """Half-space Green's function at one point pair.

    part = "scattering" is finite at r = r_prime; "whole"/"homogeneous"
    require distinct points (the delta-function term is never represented).
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(r_prime, dtype=float)
    if part not in ("whole", "scattering", "homogeneous"):
        raise ValueError(f"unknown part {part!r}")
    if part == "homogeneous":
        return GreenTensor(vacuum_gf_entries(r, rp, frequency), r, rp,
                           frequency, part)
    if r[2] <= 0 or rp[2] <= 0:
        raise ValueError("field points must satisfy z > 0")
    scat = halfspace_scattering_batch(env, r[None, :], rp[None, :],
                                      frequency, config)[0]
    if part == "scattering":
        return GreenTensor(scat, r, rp, frequency, part)
    if np.array_equal(r, rp):
        raise CoincidentPointsError(
            "the whole Green's function diverges at r = r'")
    return GreenTensor(vacuum_gf_entries(r, rp, frequency) + scat, r, rp,
                       frequency, part)


def halfspace_whole_batch(env, A, B, frequency,
                          config: QuadratureConfig = DEFAULT_CONFIG):
    """Whole (vacuum + reflection) tensors for paired point arrays."""
    return (vacuum_gf_batch(A, B, frequency)
            + halfspace_scattering_batch(env, A, B, frequency, config))


# ----------------------------------------------------------------------
# vacuum part by quadrature (validation path for the R -> 0 reduction)
# ----------------------------------------------------------------------

def vacuum_gf_quadrature(r, r_prime, frequency: Frequency,
                         config: QuadratureConfig = DEFAULT_CONFIG,
                         boost=1.0):
    """Vacuum GF from the k_par integral representation (tests only).

    Mirrors the reflection-part assembly with the homogeneous z-phase
    exp(i k_z |z - z'|) and the direct-propagation TM dyad.
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(r_prime, dtype=float)
    dz = r[2] - rp[2]
    if dz == 0 and np.allclose(r[:2], rp[:2]):
        raise CoincidentPointsError("vacuum Green's function diverges at r = r'")
    c = 1.0 if dz >= 0 else -1.0
    rho = float(np.hypot(r[0] - rp[0], r[1] - rp[1]))
    psi = float(np.arctan2(r[1] - rp[1], r[0] - rp[0]))
    Z = abs(dz)
    w2 = frequency.omega_sq
    k, wk = _reflection_radial_grid(frequency, max(Z, 1e-3), max(Z, 1e-3),
                                    rho, config, boost=2.0 * boost)
    kzv = kz(frequency, k)
    kr = k * rho
    J0, J1 = j0(kr), j1(kr)
    J2 = _j2(kr, J0, J1)
    E = np.exp(1j * kzv * Z)
    q0e = np.sum(wk * k / kzv * E * J0)
    q2e = np.sum(wk * k / kzv * E * J2)
    q0m = np.sum(wk * k * kzv / w2 * E * J0)
    q2m = np.sum(wk * k * kzv / w2 * E * J2)
    q1m = np.sum(wk * k**2 / w2 * E * J1)
    qzz = np.sum(wk * k**3 / (kzv * w2) * E * J0)
    c1, s1 = np.cos(psi), np.sin(psi)
    c2, s2 = np.cos(2 * psi), np.sin(2 * psi)
    pref = 1j / (8 * np.pi)
    out = np.zeros((3, 3), dtype=complex)
    out[0, 0] = pref * (q0e + c2 * q2e + q0m - c2 * q2m)
    out[1, 1] = pref * (q0e - c2 * q2e + q0m + c2 * q2m)
    out[0, 1] = out[1, 0] = pref * (s2 * q2e - s2 * q2m)
    out[0, 2] = out[2, 0] = (c / (4 * np.pi)) * c1 * q1m
    out[1, 2] = out[2, 1] = (c / (4 * np.pi)) * s1 * q1m
    out[2, 2] = (1j / (4 * np.pi)) * qzz
    return out


# ----------------------------------------------------------------------
# printed closed forms for the perfect mirror
# ----------------------------------------------------------------------

def halfspace_decay_closed_forms(z: float, omega_A: float):
    """Closed-form decay-rate shifts near a perfect mirror (|d|^2 = 1).

    Returns (dGamma_parallel, dGamma_perp):
      dGamma_par  = 1/(16 pi z^3) [ (1 - 4 w^2 z^2) sin(2wz) - 2wz cos(2wz) ]
      dGamma_perp = 1/(8 pi z^3)  [ sin(2wz) - 2wz cos(2wz) ]
    """
    if z <= 0 or omega_A <= 0:
        raise ValueError("z and omega_A must be positive")
    u = 2 * omega_A * z
    d_par = ((1 - u**2) * np.sin(u) - u * np.cos(u)) / (16 * np.pi * z**3)
    d_perp = (np.sin(u) - u * np.cos(u)) / (8 * np.pi * z**3)
    return d_par, d_perp


def vacuum_im_zz_coincidence(omega: float) -> float:
    """Im W^vac_zz in the coincidence limit: omega / 6 pi."""
    return omega / (6 * np.pi)
