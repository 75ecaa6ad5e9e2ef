"""Frequency/wave-vector kinematics, material response and Fresnel coefficients.

Natural units c = hbar = eps0 = 1 are used throughout the package, so a real
frequency ``omega`` and an imaginary frequency ``xi`` (meaning omega = i xi)
are both plain positive numbers and all lengths appear as omega*z products.

The branch of the perpendicular wave number is fixed once and for all:
Im k_z >= 0, so that every exp(i k_z (z + z')) factor decays for z, z' > 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TE = "TE"
TM = "TM"


@dataclass(frozen=True)
class Frequency:
    """A strictly positive frequency on the real or imaginary axis.

    ``axis="imaginary"`` means omega = i*value (Wick-rotated evaluation);
    ``value`` itself is always real and positive.
    """

    value: float
    axis: str = "real"

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError(f"frequency must be positive, got {self.value}")
        if self.axis not in ("real", "imaginary"):
            raise ValueError(f"axis must be 'real' or 'imaginary', got {self.axis!r}")

    @property
    def is_imaginary(self):
        return self.axis == "imaginary"

    @property
    def omega(self) -> complex:
        """The complex frequency omega (i*value on the imaginary axis)."""
        return 1j * self.value if self.is_imaginary else complex(self.value)

    @property
    def omega_sq(self) -> complex:
        return -self.value**2 if self.is_imaginary else complex(self.value**2)


def real_frequency(omega):
    return Frequency(float(omega), "real")


def imaginary_frequency(xi):
    return Frequency(float(xi), "imaginary")


@dataclass(frozen=True)
class MaterialModel:
    """Dielectric response model.

    kind is one of "vacuum", "constant", "drude-lorentz", "perfect-mirror".
    For "constant", ``epsilon`` holds a real permittivity >= 1.  For
    "drude-lorentz", ``oscillators`` is a tuple of (wp, w0, gamma) triples and
    eps(omega) = 1 + sum wp^2 / (w0^2 - omega^2 - i gamma omega).

    The perfect mirror is a sentinel: it never evaluates a permittivity and
    forces R_TE = -1, R_TM = +1 exactly, which the closed-form reference
    results rely on.
    """

    kind: str
    epsilon: float = 1.0
    oscillators: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in ("vacuum", "constant", "drude-lorentz", "perfect-mirror"):
            raise ValueError(f"unknown material kind {self.kind!r}")
        if self.kind == "constant" and self.epsilon < 1.0:
            raise ValueError("constant permittivity must be >= 1")
        if self.kind == "drude-lorentz" and not self.oscillators:
            raise ValueError("drude-lorentz model needs at least one oscillator")

    @property
    def is_mirror(self):
        return self.kind == "perfect-mirror"

    @staticmethod
    def vacuum():
        return MaterialModel("vacuum")

    @staticmethod
    def constant(epsilon):
        return MaterialModel("constant", epsilon=float(epsilon))

    @staticmethod
    def perfect_mirror():
        return MaterialModel("perfect-mirror")

    @staticmethod
    def drude_lorentz(oscillators):
        return MaterialModel("drude-lorentz",
                             oscillators=tuple(tuple(map(float, o)) for o in oscillators))


def permittivity(material: MaterialModel, frequency: Frequency) -> complex:
    """Evaluate eps(omega) for the given material.

    On the imaginary axis the result is real and > 1 for any physical model.
    Raises for the perfect-mirror sentinel (it has no finite permittivity) and
    at a real-axis pole of an undamped oscillator.
    """
    if material.is_mirror:
        raise ValueError("perfect mirror has no finite permittivity")
    if material.kind == "vacuum":
        return 1.0 + 0j
    if material.kind == "constant":
        return complex(material.epsilon)
    # drude-lorentz
    eps = 1.0 + 0j
    if frequency.is_imaginary:
        xi = frequency.value
        for wp, w0, gamma in material.oscillators:
            eps += wp**2 / (w0**2 + xi**2 + gamma * xi)
    else:
        w = frequency.value
        for wp, w0, gamma in material.oscillators:
            den = w0**2 - w**2 - 1j * gamma * w
            if den == 0:
                raise ValueError(
                    f"permittivity pole at omega = {w} (undamped oscillator)")
            eps += wp**2 / den
    return eps


def kz(frequency: Frequency, k_par):
    """Perpendicular wave number sqrt(omega^2 - k_par^2) on the Im >= 0 branch.

    Accepts scalar or array k_par.  On the imaginary axis this is
    i*sqrt(xi^2 + k_par^2) exactly (no cancellation).
    """
    k_par = np.asarray(k_par, dtype=float)
    if np.any(k_par < 0):
        raise ValueError("k_par must be >= 0")
    if frequency.is_imaginary:
        out = np.asarray(1j * np.sqrt(frequency.value**2 + k_par**2))
    else:
        out = np.sqrt(np.asarray(frequency.value**2 - k_par**2, dtype=complex))
        out = np.where(out.imag < 0, -out, out)
    if out.ndim == 0:
        return complex(out)
    return out


def kz_medium(material: MaterialModel, frequency: Frequency, k_par):
    """Perpendicular wave number inside the substrate, same branch rule."""
    eps = permittivity(material, frequency)
    k_par = np.asarray(k_par, dtype=float)
    out = np.sqrt(np.asarray(eps * frequency.omega_sq - k_par**2, dtype=complex))
    out = np.asarray(np.where(out.imag < 0, -out, out))
    if out.ndim == 0:
        return complex(out)
    return out


@dataclass(frozen=True)
class WaveContext:
    """One (k_par, phi) point of the angular-spectrum integrand.

    Uses the polar map k_x = k_par*sin(phi), k_y = k_par*cos(phi), i.e.
    chi = cos(phi) pairs with k_y and eta = sin(phi) with k_x.  k_z_medium is
    only populated when a substrate material is supplied.
    """

    frequency: Frequency
    k_par: float
    phi: float
    k_z: complex
    k_z_medium: complex | None = None

    @property
    def chi(self):
        return np.cos(self.phi)

    @property
    def eta(self):
        return np.sin(self.phi)

    @property
    def k_x(self):
        return self.k_par * self.eta

    @property
    def k_y(self):
        return self.k_par * self.chi

    @staticmethod
    def create(frequency: Frequency, k_par: float, phi: float = 0.0,
               material: MaterialModel | None = None) -> "WaveContext":
        kzm = None
        if material is not None and not material.is_mirror:
            kzm = kz_medium(material, frequency, k_par)
        return WaveContext(frequency, float(k_par), float(phi),
                           kz(frequency, k_par), kzm)


def fresnel(sigma: str, material: MaterialModel, ctx: WaveContext) -> complex:
    """Reflection coefficient for radiation incident from vacuum.

    R_TE = (k_z - k_z^d)/(k_z + k_z^d),
    R_TM = (eps k_z - k_z^d)/(eps k_z + k_z^d).
    The perfect mirror returns exactly -1 (TE) / +1 (TM); vacuum returns 0.
    """
    if sigma not in (TE, TM):
        raise ValueError(f"polarization must be 'TE' or 'TM', got {sigma!r}")
    if material.is_mirror:
        return -1.0 + 0j if sigma == TE else 1.0 + 0j
    if material.kind == "vacuum":
        return 0j
    kzv = ctx.k_z
    kzd = ctx.k_z_medium
    if kzd is None:
        kzd = kz_medium(material, ctx.frequency, ctx.k_par)
    if sigma == TE:
        return (kzv - kzd) / (kzv + kzd)
    eps = permittivity(material, ctx.frequency)
    return (eps * kzv - kzd) / (eps * kzv + kzd)


def fresnel_arrays(material: MaterialModel, frequency: Frequency, k_par):
    """Vectorized (R_TE, R_TM) over an array of k_par values."""
    k_par = np.asarray(k_par, dtype=float)
    if material.is_mirror:
        shape = k_par.shape
        return (np.full(shape, -1.0 + 0j), np.full(shape, 1.0 + 0j))
    if material.kind == "vacuum":
        z = np.zeros(k_par.shape, dtype=complex)
        return z, z.copy()
    kzv = np.atleast_1d(kz(frequency, k_par))
    kzd = np.atleast_1d(kz_medium(material, frequency, k_par))
    eps = permittivity(material, frequency)
    rte = (kzv - kzd) / (kzv + kzd)
    rtm = (eps * kzv - kzd) / (eps * kzv + kzd)
    return rte.reshape(k_par.shape), rtm.reshape(k_par.shape)
