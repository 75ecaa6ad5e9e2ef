"""Physical observables: decay rates, Casimir-Polder potentials and forces.

Decay rates are evaluated on the real frequency axis at the transition
frequency; dispersion potentials are integrals over the imaginary axis where
every Green's tensor entry is real and exponentially damped.  All outputs are
in natural units (c = hbar = eps0 = 1); the classic reference values

    Gamma_0 = w^3 |d|^2 / 3 pi            free-space decay rate
    U_0     = -|d|^2 / 48 pi z^3          non-retarded mirror CP potential
    F_0     = -|d|^2 / 16 pi z^4          non-retarded mirror CP force

are provided for normalization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .born import delta_w_tensor
from .geometry import DepositionGeometry, empty_geometry
from .halfspace import HalfSpaceEnvironment, halfspace_scattering_batch
from .kinematics import Frequency, imaginary_frequency, real_frequency
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_xi

_DIRECTIONS = {"x": np.array([1.0, 0.0, 0.0]),
               "y": np.array([0.0, 1.0, 0.0]),
               "z": np.array([0.0, 0.0, 1.0])}


@dataclass(frozen=True)
class AtomModel:
    """Two-level atom: transition frequency, dipole magnitude and direction.

    polarization is "x", "y", "z" or "isotropic"; the magnitude is |d|.
    """

    omega_A: float
    polarization: str = "isotropic"
    dipole_magnitude: float = 1.0

    def __post_init__(self):
        if self.omega_A <= 0:
            raise ValueError("transition frequency must be positive")
        if self.polarization not in ("x", "y", "z", "isotropic"):
            raise ValueError(f"unknown polarization {self.polarization!r}")
        if self.dipole_magnitude < 0:
            raise ValueError("dipole magnitude must be >= 0")

    @property
    def isotropic(self):
        return self.polarization == "isotropic"

    def direction(self):
        if self.isotropic:
            return None
        return _DIRECTIONS[self.polarization]

    def frequency(self) -> Frequency:
        return real_frequency(self.omega_A)


@dataclass
class DecayRateResult:
    gamma_total: float
    gamma_0: float
    delta_gamma_surface: float
    delta_gamma_deposition: float
    position: np.ndarray
    error_estimate: float = 0.0
    converged: bool = True


@dataclass
class CPResult:
    u_total: float
    u_halfspace: float
    delta_u_deposition: float
    u0_reference: float
    position: np.ndarray
    error_estimate: float = 0.0
    converged: bool = True


def polarisability(atom: AtomModel, xi) -> float:
    """Ground-state polarisability on the imaginary axis:
    alpha(i xi) = (2/3) w |d|^2 / (w^2 + xi^2)."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("xi must be >= 0")
    out = (2.0 / 3.0) * atom.omega_A * atom.dipole_magnitude**2 \
        / (atom.omega_A**2 + xi**2)
    return float(out) if out.ndim == 0 else out


def gamma_0(atom: AtomModel) -> float:
    """Free-space decay rate w^3 |d|^2 / 3 pi."""
    return atom.omega_A**3 * atom.dipole_magnitude**2 / (3 * np.pi)


def _project(atom: AtomModel, tensor):
    """d . T . d for a directed dipole, |d|^2 Tr T / 3 for isotropic."""
    d2 = atom.dipole_magnitude**2
    if atom.isotropic:
        return d2 * np.trace(tensor) / 3.0
    e = atom.direction()
    return d2 * (e @ tensor @ e)


def u0_nonretarded(z: float, dipole_magnitude: float = 1.0) -> float:
    """Non-retarded CP potential at a perfect mirror: -|d|^2 / 48 pi z^3."""
    return -dipole_magnitude**2 / (48 * np.pi * z**3)


def f0_nonretarded(z: float, dipole_magnitude: float = 1.0) -> float:
    """Non-retarded CP force at a perfect mirror: -|d|^2 / 16 pi z^4."""
    return -dipole_magnitude**2 / (16 * np.pi * z**4)


# ----------------------------------------------------------------------
# decay rates
# ----------------------------------------------------------------------

def decay_rate(atom: AtomModel, green_scattering, gamma0_included=True
               ) -> DecayRateResult:
    """Decay rate from a scattering Green's tensor at the atom's position:
    Gamma = 2 w^2 d . Im G . d*, plus Gamma_0 when flagged."""
    if green_scattering.frequency != atom.frequency():
        raise ValueError("Green's tensor frequency differs from the atom's "
                         "transition frequency")
    if not np.array_equal(green_scattering.r, green_scattering.r_prime):
        raise ValueError("decay rate needs a coincidence-limit tensor")
    w = atom.omega_A
    dg = 2 * w**2 * float(np.real(_project(atom, np.imag(green_scattering.entries))))
    g0 = gamma_0(atom) if gamma0_included else 0.0
    return DecayRateResult(g0 + dg, g0, dg, 0.0, green_scattering.r)


def decay_rate_deposition(atom: AtomModel, env: HalfSpaceEnvironment,
                          geometry: DepositionGeometry, position,
                          config: QuadratureConfig = DEFAULT_CONFIG,
                          path="auto") -> DecayRateResult:
    """Full decay-rate decomposition at a point outside the deposition.

    gamma_total = gamma_0 + surface shift (bare half-space scattering part)
    + deposition shift (single-scattering correction, reflection-free term
    included).
    """
    r = np.asarray(position, dtype=float)
    if r[2] <= 0:
        raise ValueError("the atom must sit in the vacuum region z > 0")
    if geometry.contains(r):
        raise ValueError("field point inside the deposition: local-field "
                         "regime is out of scope")
    freq = atom.frequency()
    w = atom.omega_A
    g0 = gamma_0(atom)
    gs_tensor = halfspace_scattering_batch(env, r[None, :], r[None, :], freq,
                                           config)[0]
    d_surface = 2 * w**2 * float(np.real(_project(atom, np.imag(gs_tensor))))
    err = 0.0
    converged = True
    d_dep = 0.0
    if not geometry.is_empty():
        res = delta_w_tensor(env, geometry, r, r, freq, config,
                             scattering=False, path=path)
        d_dep = 2 * w**2 * float(np.real(_project(atom, np.imag(res.entries))))
        err = 2 * w**2 * res.error_estimate
        converged = res.converged
    total = g0 + d_surface + d_dep
    return DecayRateResult(total, g0, d_surface, d_dep, r, err, converged)


def bare_halfspace_decay(atom: AtomModel, env: HalfSpaceEnvironment, position,
                         config: QuadratureConfig = DEFAULT_CONFIG
                         ) -> DecayRateResult:
    """Decay rate above the bare half-space (no deposition)."""
    return decay_rate_deposition(atom, env, empty_geometry(), position, config)


# ----------------------------------------------------------------------
# Casimir-Polder potential and force
# ----------------------------------------------------------------------

def _cp_weight(atom: AtomModel, xi):
    """xi^2-weighted polarisability prefactor of the frequency integral."""
    if atom.isotropic:
        return xi**2 * polarisability(atom, xi)
    # directed dipole: alpha_ij = 3 alpha * e_i e_j
    return xi**2 * 3.0 * polarisability(atom, xi)


def _cp_contract(atom: AtomModel, tensor):
    if atom.isotropic:
        return float(np.real(np.trace(tensor)))
    e = atom.direction()
    return float(np.real(e @ tensor @ e))


def cp_potential(atom: AtomModel, env: HalfSpaceEnvironment,
                 geometry: DepositionGeometry, position,
                 config: QuadratureConfig = DEFAULT_CONFIG,
                 path="auto") -> CPResult:
    """Ground-state CP potential split into half-space and deposition parts.

    U = (1/2 pi) int_0^inf dxi xi^2 alpha(i xi) Tr G(r, r, i xi) with G the
    scattering Green's function; the deposition part uses the scattering
    variant of the single-scattering correction (all terms independent of
    the substrate reflection removed).
    """
    r = np.asarray(position, dtype=float)
    if r[2] <= 0:
        raise ValueError("the atom must sit in the vacuum region z > 0")
    if geometry.contains(r):
        raise ValueError("field point inside the deposition")

    def hs_integrand(xis):
        out = np.empty_like(xis)
        for n, xi in enumerate(xis):
            freq = imaginary_frequency(xi)
            g = halfspace_scattering_batch(env, r[None, :], r[None, :], freq,
                                           config, check=False)[0]
            out[n] = _cp_weight(atom, xi) * _cp_contract(atom, g)
        return out

    res_hs = integrate_xi(hs_integrand, atom.omega_A, config)
    u_hs = res_hs.value / (2 * np.pi)
    err = res_hs.error_estimate / (2 * np.pi)
    converged = res_hs.converged

    u_dep = 0.0
    if not geometry.is_empty():
        flags = []

        def dep_integrand(xis):
            out = np.empty_like(xis)
            for n, xi in enumerate(xis):
                freq = imaginary_frequency(xi)
                res = delta_w_tensor(env, geometry, r, r, freq, config,
                                     scattering=True, path=path)
                flags.append(res.converged)
                out[n] = _cp_weight(atom, xi) * _cp_contract(atom, res.entries)
            return out

        res_dep = integrate_xi(dep_integrand, atom.omega_A, config)
        u_dep = res_dep.value / (2 * np.pi)
        err += res_dep.error_estimate / (2 * np.pi)
        converged = converged and res_dep.converged and all(flags)

    return CPResult(u_hs + u_dep, u_hs, u_dep,
                    u0_nonretarded(r[2], atom.dipole_magnitude), r, err,
                    converged)


def cp_force(atom: AtomModel, env: HalfSpaceEnvironment,
             geometry: DepositionGeometry, position, direction,
             config: QuadratureConfig = DEFAULT_CONFIG, step=None,
             path="auto") -> float:
    """Force component -dU/d(direction) by Richardson-extrapolated central
    differences of the potential.

    ``direction`` is "x", "y", "z" or a 3-vector.  The stencil points must
    stay outside the deposition; the step shrinks automatically near edges
    and a ValueError is raised if no admissible step remains.
    """
    r = np.asarray(position, dtype=float)
    if isinstance(direction, str):
        e = _DIRECTIONS[direction]
    else:
        e = np.asarray(direction, dtype=float)
        e = e / np.linalg.norm(e)
    h = step if step is not None else 5e-3 * max(r[2], 0.3 / atom.omega_A)
    for _ in range(20):
        stencil = [r + s * h * e for s in (-1.0, -0.5, 0.5, 1.0)]
        ok = all(p[2] > 0 and not geometry.contains(p) for p in stencil)
        if ok:
            break
        h *= 0.5
    else:
        raise ValueError("no admissible finite-difference step near the "
                         "geometry edge")

    def u_at(p):
        return cp_potential(atom, env, geometry, p, config, path).u_total

    um1, um05, up05, up1 = (u_at(p) for p in stencil)
    d_h = (up1 - um1) / (2 * h)
    d_h2 = (up05 - um05) / h
    return -float((4 * d_h2 - d_h) / 3.0)
