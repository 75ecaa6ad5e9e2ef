import numpy as np
import pytest

from lithoqed.born import compose_delta_w, delta_w_tensor, spectral_delta_w
from lithoqed.geometry import GratingSpec, build_cube, build_grating, \
    empty_geometry
from lithoqed.kinematics import (MaterialModel, imaginary_frequency,
                                 real_frequency)
from lithoqed.quadrature import QuadratureConfig

CFG = QuadratureConfig()
FAST = QuadratureConfig(refine=False)


@pytest.fixture
def cube():
    return build_cube(0.6, MaterialModel.constant(1.8))


def test_routes_agree_on_cube(env_mirror, env_dielectric, cube):
    r = np.array([0.3, 0.15, 1.0])
    for env, freq in ((env_mirror, real_frequency(1.0)),
                      (env_dielectric, imaginary_frequency(1.0))):
        spec = spectral_delta_w(env, cube, r, r, freq, FAST)
        comp = compose_delta_w(env, cube, r, r, freq, CFG)
        scale = np.max(np.abs(comp.entries))
        assert np.max(np.abs(spec.entries - comp.entries)) < 5e-4 * scale


def test_routes_agree_noncoincident(env_mirror, cube):
    r = np.array([0.1, 0.0, 1.0])
    rp = np.array([-0.2, 0.1, 0.9])
    freq = real_frequency(1.0)
    spec = spectral_delta_w(env_mirror, cube, r, rp, freq, FAST)
    comp = compose_delta_w(env_mirror, cube, r, rp, freq, CFG)
    scale = np.max(np.abs(comp.entries))
    assert np.max(np.abs(spec.entries - comp.entries)) < 5e-4 * scale


def test_scattering_variant_drops_reflection_free(env_vacuum, cube):
    # vacuum substrate: the scattering part of the correction vanishes
    freq = imaginary_frequency(0.9)
    r = np.array([0.0, 0.0, 1.1])
    for path in ("composition", "spectral"):
        res = delta_w_tensor(env_vacuum, cube, r, r, freq, FAST,
                             scattering=True, path=path)
        assert np.max(np.abs(res.entries)) < 1e-12


def test_imaginary_axis_reality(env_mirror, env_dielectric, cube):
    freq = imaginary_frequency(1.2)
    r = np.array([0.25, -0.1, 0.95])
    for env in (env_mirror, env_dielectric):
        for path in ("composition", "spectral"):
            res = delta_w_tensor(env, cube, r, r, freq, FAST, path=path)
            assert np.max(np.abs(res.entries.imag)) \
                < 1e-10 * np.max(np.abs(res.entries.real))


def test_linearity_in_contrast(env_mirror):
    freq = real_frequency(1.0)
    r = np.array([0.2, 0.0, 1.1])
    g1 = build_cube(0.6, MaterialModel.constant(1.8))   # de = 0.8
    g2 = build_cube(0.6, MaterialModel.constant(1.4))   # de = 0.4
    a = delta_w_tensor(env_mirror, g1, r, r, freq, FAST)
    b = delta_w_tensor(env_mirror, g2, r, r, freq, FAST)
    assert np.allclose(a.entries, 2.0 * b.entries, rtol=1e-13, atol=0)


def test_empty_geometry_is_zero(env_mirror):
    res = delta_w_tensor(env_mirror, empty_geometry(),
                         np.array([0, 0, 1.0]), np.array([0, 0, 1.0]),
                         real_frequency(1.0), CFG)
    assert np.max(np.abs(res.entries)) == 0.0
    assert res.converged


def test_point_inside_geometry_rejected(env_mirror, cube):
    with pytest.raises(ValueError):
        delta_w_tensor(env_mirror, cube, np.array([0.0, 0.0, 0.3]),
                       np.array([0.0, 0.0, 0.3]), real_frequency(1.0), CFG)


def test_unknown_path_rejected(env_mirror, cube):
    with pytest.raises(ValueError):
        delta_w_tensor(env_mirror, cube, np.array([0, 0, 1.0]),
                       np.array([0, 0, 1.0]), real_frequency(1.0), CFG,
                       path="magic")


def test_routes_agree_on_grating(env_mirror):
    geom = build_grating(GratingSpec(3, 0.8, 0.6, 2.0),
                         MaterialModel.constant(1.8))
    freq = imaginary_frequency(1.0)
    r = np.array([0.4, 0.2, 1.25])
    spec = spectral_delta_w(env_mirror, geom, r, r, freq, FAST,
                            scattering=True)
    comp = compose_delta_w(env_mirror, geom, r, r, freq, CFG,
                           scattering=True)
    scale = np.max(np.abs(comp.entries))
    assert np.max(np.abs(spec.entries - comp.entries)) < 1e-3 * scale


def test_lateral_clearance_against_oracle(env_mirror, cube):
    """A field point level with the box interior (lateral clearance only):
    the production route must agree with the brute-force volume oracle."""
    from lithoqed.oracle import OracleConfig, born_correction_riemann
    freq = imaginary_frequency(1.0)
    r = np.array([1.1, 0.0, 0.3])   # beside the cube, below its top
    comp = compose_delta_w(env_mirror, cube, r, r, freq, CFG,
                           scattering=True)
    ora = born_correction_riemann(env_mirror, cube, r, r, freq,
                                  OracleConfig(cells_per_axis=16),
                                  scattering=True)
    scale = np.max(np.abs(ora))
    assert np.max(np.abs(comp.entries - ora)) < 5e-3 * scale
