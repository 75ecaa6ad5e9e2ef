"""Deposition geometries: unions of axis-aligned boxes on the interface.

A deposition is a union of pairwise-disjoint boxes sitting on z >= 0 with a
single homogeneous permittivity contrast delta_eps(omega) = eps_dep(omega)-1
against the vacuum above the substrate.  The plane-wave volume integrals over
a box factorize into three one-dimensional factors of the form
(exp(i b x1) - exp(i b x0)) / (i b), evaluated in series form across the
removable singularity b -> 0.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .kinematics import Frequency, MaterialModel, WaveContext, permittivity

SINC_SWITCH = 1e-4


@dataclass(frozen=True)
class DepositionBox:
    """Axis-aligned box; z_range must sit inside [0, inf)."""

    x_range: tuple
    y_range: tuple
    z_range: tuple

    def __post_init__(self):
        for lo, hi in (self.x_range, self.y_range, self.z_range):
            if not hi > lo:
                raise ValueError(f"empty interval ({lo}, {hi})")
        if self.z_range[0] < 0:
            raise ValueError("boxes must lie in z >= 0")

    @property
    def volume(self):
        return ((self.x_range[1] - self.x_range[0])
                * (self.y_range[1] - self.y_range[0])
                * (self.z_range[1] - self.z_range[0]))

    @property
    def centroid(self):
        return np.array([0.5 * (self.x_range[0] + self.x_range[1]),
                         0.5 * (self.y_range[0] + self.y_range[1]),
                         0.5 * (self.z_range[0] + self.z_range[1])])

    def contains(self, point, tol=0.0):
        x, y, z = point
        return (self.x_range[0] - tol <= x <= self.x_range[1] + tol
                and self.y_range[0] - tol <= y <= self.y_range[1] + tol
                and self.z_range[0] - tol <= z <= self.z_range[1] + tol)

    def split_z(self, z):
        """Split at height z; returns one or two boxes."""
        z0, z1 = self.z_range
        if not z0 < z < z1:
            return [self]
        return [DepositionBox(self.x_range, self.y_range, (z0, z)),
                DepositionBox(self.x_range, self.y_range, (z, z1))]


def _overlap(a, b):
    def ov(r, s):
        return r[0] < s[1] and s[0] < r[1]
    return ov(a.x_range, b.x_range) and ov(a.y_range, b.y_range) and ov(a.z_range, b.z_range)


@dataclass(frozen=True)
class DepositionGeometry:
    """Union of disjoint boxes with a shared permittivity contrast."""

    boxes: tuple
    contrast: MaterialModel

    def __post_init__(self):
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        for i, a in enumerate(boxes):
            for b in boxes[i + 1:]:
                if _overlap(a, b):
                    raise ValueError("boxes in a union must be pairwise disjoint")
        if self.contrast.is_mirror:
            raise ValueError("a deposition cannot be a perfect mirror "
                             "(Born series needs a weak contrast)")

    def delta_eps(self, frequency: Frequency) -> complex:
        """Contrast delta_eps = eps_dep - 1; warns when the Born series is
        outside its validity range |delta_eps| >= 1."""
        de = permittivity(self.contrast, frequency) - 1.0
        if abs(de) >= 1.0:
            warnings.warn(
                f"|delta_eps| = {abs(de):.3f} >= 1: single-scattering "
                "truncation is outside its validity range", stacklevel=2)
        return de

    @property
    def total_volume(self):
        return sum(b.volume for b in self.boxes)

    @property
    def z_top(self):
        return max(b.z_range[1] for b in self.boxes)

    def contains(self, point, tol=0.0):
        return any(b.contains(point, tol) for b in self.boxes)

    def is_empty(self):
        return len(self.boxes) == 0


def empty_geometry():
    return DepositionGeometry((), MaterialModel.vacuum())


def build_cube(a: float, contrast: MaterialModel | float = 1.8) -> DepositionGeometry:
    """Cube of side a sitting on the interface, centered in x and y.

    ``contrast`` may be a MaterialModel or a plain constant permittivity.
    """
    if a <= 0:
        raise ValueError("cube side must be positive")
    if not isinstance(contrast, MaterialModel):
        contrast = MaterialModel.constant(contrast)
    box = DepositionBox((-a / 2, a / 2), (-a / 2, a / 2), (0.0, a))
    return DepositionGeometry((box,), contrast)


@dataclass(frozen=True)
class GratingSpec:
    """Finite grating: N strips of width w, height h, depth L.

    Strip n spans x in [x0 + 2nw, x0 + (2n+1)w] with x0 = -w(N - 3/4) unless
    overridden.  Note the default places the middle strip center at x = w/4,
    not at 0; x0_override allows recentering.
    """

    N: int
    w: float
    h: float
    L: float
    x0_override: float | None = None

    def __post_init__(self):
        if self.N < 1 or self.w <= 0 or self.h <= 0 or self.L <= 0:
            raise ValueError("grating parameters must be positive (N >= 1)")

    @property
    def x0(self):
        if self.x0_override is not None:
            return self.x0_override
        return -self.w * (self.N - 0.75)


def build_grating(spec: GratingSpec,
                  contrast: MaterialModel | float = 1.8) -> DepositionGeometry:
    if not isinstance(contrast, MaterialModel):
        contrast = MaterialModel.constant(contrast)
    boxes = []
    for n in range(spec.N):
        x0 = spec.x0 + 2 * n * spec.w
        boxes.append(DepositionBox((x0, x0 + spec.w),
                                   (-spec.L / 2, spec.L / 2),
                                   (0.0, spec.h)))
    return DepositionGeometry(tuple(boxes), contrast)


# ----------------------------------------------------------------------
# analytic plane-wave box integrals
# ----------------------------------------------------------------------

def phase_factor_1d(beta, lo, hi):
    """int_lo^hi exp(i beta t) dt, vectorized and finite for any beta.

    Switches to a 4th-order series around beta = 0 at |beta|*(hi-lo) below
    the sinc threshold so the removable singularity stays smooth to ~1e-12.
    """
    beta = np.asarray(beta, dtype=complex)
    length = hi - lo
    small = np.abs(beta) * abs(length) < SINC_SWITCH
    safe = np.where(small, 1.0, beta)
    out = (np.exp(1j * safe * hi) - np.exp(1j * safe * lo)) / (1j * safe)
    if np.any(small):
        mid = 0.5 * (lo + hi)
        u = beta * length
        series = length * np.exp(1j * beta * mid) * (1.0 - u**2 / 24.0
                                                     + u**4 / 1920.0)
        out = np.where(small, series, out)
    if out.ndim == 0:
        return complex(out)
    return out


def structure_factor(box: DepositionBox, ctx: WaveContext,
                     ctx_prime: WaveContext) -> complex:
    """Plane-wave volume integral over one box:

    int_box exp(i [ (k - k')_par . s_par + (k_z + k_z') s_z ]) d^3 s,
    a product of three 1-D factors.  At zero phase this is the box volume.
    """
    bx = ctx.k_x - ctx_prime.k_x
    by = ctx.k_y - ctx_prime.k_y
    bz = ctx.k_z + ctx_prime.k_z
    return (phase_factor_1d(bx, *box.x_range)
            * phase_factor_1d(by, *box.y_range)
            * phase_factor_1d(bz, *box.z_range))


def split_geometry_at(geometry: DepositionGeometry, z_levels):
    """Split every box at the given heights (for the r_z >< s_z ordering).

    Returns a list of boxes whose z-ranges do not straddle any level, so a
    single ordering sign applies per box.
    """
    boxes = list(geometry.boxes)
    for z in z_levels:
        out = []
        for b in boxes:
            out.extend(b.split_z(z))
        boxes = out
    return boxes
