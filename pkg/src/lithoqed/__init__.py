"""lithoqed: radiative corrections near a half-space with surface depositions.

Spontaneous decay rates and Casimir-Polder potentials/forces of atoms near a
substrate carrying small arbitrarily-shaped depositions (cubes, finite
gratings), computed from the single-scattering correction to the half-space
dyadic Green's function.
"""
__version__ = "0.1.0"

from .kinematics import (Frequency, MaterialModel, WaveContext, fresnel,
                         imaginary_frequency, kz, permittivity,
                         real_frequency)
from .geometry import (DepositionBox, DepositionGeometry, GratingSpec,
                       build_cube, build_grating, empty_geometry,
                       structure_factor)
from .halfspace import (GreenTensor, HalfSpaceEnvironment,
                        halfspace_decay_closed_forms, halfspace_gf,
                        vacuum_gf)
from .quadrature import (IntegralResult, QuadratureConfig, integrate_k4,
                         integrate_xi)
from .born import delta_w_tensor
from .kernels import born_integrand, kernel_entry
from .observables import (AtomModel, CPResult, DecayRateResult, cp_force,
                          cp_potential, decay_rate, decay_rate_deposition,
                          polarisability)

__all__ = [
    "Frequency", "MaterialModel", "WaveContext", "fresnel", "kz",
    "permittivity", "real_frequency", "imaginary_frequency",
    "DepositionBox", "DepositionGeometry", "GratingSpec", "build_cube",
    "build_grating", "empty_geometry", "structure_factor",
    "GreenTensor", "HalfSpaceEnvironment", "halfspace_decay_closed_forms",
    "halfspace_gf", "vacuum_gf",
    "IntegralResult", "QuadratureConfig", "integrate_k4", "integrate_xi",
    "delta_w_tensor", "born_integrand", "kernel_entry",
    "AtomModel", "CPResult", "DecayRateResult", "cp_force", "cp_potential",
    "decay_rate", "decay_rate_deposition", "polarisability",
]
