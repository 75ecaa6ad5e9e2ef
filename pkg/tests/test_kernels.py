import numpy as np
import pytest

from lithoqed.geometry import build_cube, empty_geometry
from lithoqed.halfspace import HalfSpaceEnvironment
from lithoqed.kernels import (born_integrand, born_prefactor, kernel_entry,
                              kernel_matrix, plane_wave_factor)
from lithoqed.kinematics import (MaterialModel, WaveContext,
                                 imaginary_frequency, real_frequency)

ZERO_TAUS = ("TE", "TETE", "TETM")
Z_INDEXED = ((0, 2), (2, 0), (2, 2), (1, 2), (2, 1))


def random_ctx_pair(rng, freq):
    k1, k2 = rng.uniform(0.2, 3.0, 2)
    return (WaveContext.create(freq, k1, rng.uniform(0, 2 * np.pi)),
            WaveContext.create(freq, k2, rng.uniform(0, 2 * np.pi)))


def test_zero_catalogue(rng):
    freq = real_frequency(1.2)
    for _ in range(30):
        c1, c2 = random_ctx_pair(rng, freq)
        kw_g = dict(s_z=rng.uniform(0.05, 0.8))
        kw_l = dict(r_z=rng.uniform(0.05, 0.5), r_z_prime=rng.uniform(0.05, 0.5))
        for tau in ZERO_TAUS:
            for i, j in Z_INDEXED:
                assert kernel_entry(tau, i, j, "greater", c1, c2, **kw_g) == 0
                assert kernel_entry(tau, i, j, "lesser", c1, c2, **kw_l) == 0


def test_symmetry_catalogue(rng):
    freq = real_frequency(0.9)
    for _ in range(20):
        c1, c2 = random_ctx_pair(rng, freq)
        # kx <-> ky on both wave vectors is phi -> pi/2 - phi
        c1s = WaveContext.create(freq, c1.k_par, np.pi / 2 - c1.phi)
        c2s = WaveContext.create(freq, c2.k_par, np.pi / 2 - c2.phi)
        for ordering, kw in (("greater", dict(s_z=rng.uniform(0.1, 0.6))),
                             ("lesser", dict(r_z=rng.uniform(0.1, 0.4),
                                             r_z_prime=rng.uniform(0.1, 0.4)))):
            for tau in ("TE", "TM", "TETE", "TMTM", "TETM"):
                m = kernel_matrix(tau, ordering, c1, c2, **kw)
                ms = kernel_matrix(tau, ordering, c1s, c2s, **kw)
                scale = max(np.max(np.abs(m)), 1e-300)
                assert abs(m[1, 1] - ms[0, 0]) <= 1e-12 * scale
                assert abs(m[1, 2] - ms[0, 2]) <= 1e-12 * scale
                assert abs(m[2, 1] - ms[2, 0]) <= 1e-12 * scale
                assert abs(m[1, 0] - m[0, 1]) <= 1e-12 * scale


def test_printed_example_tete_xx():
    # k_y = 1, k_y' = 2, omega = 1: K^TETE_xx = k_y^2 k_y'^2 w^4 = 4
    freq = real_frequency(1.0)
    c1 = WaveContext.create(freq, 1.0, 0.0)  # phi = 0: k_y = k_par
    c2 = WaveContext.create(freq, 2.0, 0.0)
    val = kernel_entry("TETE", 0, 0, "greater", c1, c2, s_z=0.3)
    assert val == pytest.approx(4.0, rel=1e-14)


def test_printed_example_te_xz_zero():
    freq = real_frequency(1.0)
    c1 = WaveContext.create(freq, 0.7, 1.0)
    c2 = WaveContext.create(freq, 1.7, 2.0)
    assert kernel_entry("TE", 0, 2, "greater", c1, c2, s_z=0.5) == 0


def test_printed_example_tm_zz_lesser():
    # (exp(-2 i k_z r_z) + exp(-2 i k_z' r_z')) kpar^4 kpar'^4
    freq = real_frequency(1.0)
    c1 = WaveContext.create(freq, 0.8, 0.4)
    c2 = WaveContext.create(freq, 1.9, 2.2)
    r_z, rp_z = 0.21, 0.34
    got = kernel_entry("TM", 2, 2, "lesser", c1, c2, r_z=r_z, r_z_prime=rp_z)
    want = (np.exp(-2j * c1.k_z * r_z) + np.exp(-2j * c2.k_z * rp_z)) \
        * c1.k_par**4 * c2.k_par**4
    assert got == pytest.approx(want, rel=1e-13)


def test_degree_check_tmtm_zz(rng):
    # K^TMTM_zz = kpar^4 kpar'^4 independent of angles and heights
    freq = real_frequency(1.4)
    for _ in range(10):
        c1, c2 = random_ctx_pair(rng, freq)
        got = kernel_entry("TMTM", 2, 2, "greater", c1, c2,
                           s_z=rng.uniform(0, 1))
        assert got == pytest.approx(c1.k_par**4 * c2.k_par**4, rel=1e-14)


def test_kernel_entry_argument_validation():
    freq = real_frequency(1.0)
    c1 = WaveContext.create(freq, 0.5, 0.0)
    c2 = WaveContext.create(freq, 0.9, 0.0)
    with pytest.raises(ValueError):
        kernel_entry("TM", 0, 0, "greater", c1, c2)  # missing s_z
    with pytest.raises(ValueError):
        kernel_entry("TM", 0, 0, "lesser", c1, c2, s_z=0.1)  # missing r_z
    with pytest.raises(ValueError):
        kernel_entry("XX", 0, 0, "greater", c1, c2, s_z=0.1)
    c3 = WaveContext.create(real_frequency(2.0), 0.5, 0.0)
    with pytest.raises(ValueError):
        kernel_entry("TM", 0, 0, "greater", c1, c3, s_z=0.1)


def test_born_integrand_zero_cases(rng, env_vacuum, env_mirror):
    freq = real_frequency(1.0)
    c1, c2 = random_ctx_pair(rng, freq)
    s = np.array([0.1, -0.2, 0.4])
    r = np.array([0.3, 0.0, 1.2])
    rp = np.array([-0.1, 0.2, 1.0])
    geom = build_cube(1.0, MaterialModel.constant(1.8))
    # scattering variant with all reflections zero vanishes
    got = born_integrand(env_vacuum, geom, s, r, rp, c1, c2, scattering=True)
    assert np.max(np.abs(got)) < 1e-14
    # zero contrast vanishes
    geom0 = build_cube(1.0, MaterialModel.vacuum())
    got = born_integrand(env_mirror, geom0, s, r, rp, c1, c2)
    assert np.max(np.abs(got)) == 0.0


def test_born_integrand_is_factor_product(rng, env_mirror):
    # definitional consistency with the plane-wave factor tensors
    freq = real_frequency(1.0)
    c1, c2 = random_ctx_pair(rng, freq)
    s = np.array([0.1, -0.2, 0.4])
    r = np.array([0.3, 0.0, 1.2])
    rp = np.array([-0.1, 0.2, 0.9])
    geom = build_cube(1.0, MaterialModel.constant(1.8))
    de = geom.delta_eps(freq)
    want = freq.omega_sq * de * (plane_wave_factor(env_mirror, r, s, c1)
                                 @ plane_wave_factor(env_mirror, s, rp, c2))
    got = born_integrand(env_mirror, geom, s, r, rp, c1, c2)
    assert np.allclose(got, want, rtol=1e-14)


def test_born_integrand_matches_operator_oracle(rng, env_mirror):
    """The assembled integrand equals the product of factor tensors built
    independently by finite-difference application of the TE/TM operators."""
    from lithoqed.oracle import _operator_dyad, _plane_phase
    freq = real_frequency(1.0)
    for k in (0.6, 1.8):
        c1 = WaveContext.create(freq, k, rng.uniform(0, 2 * np.pi))
        c2 = WaveContext.create(freq, k + 0.5, rng.uniform(0, 2 * np.pi))
        s = np.array([0.15, -0.25, 0.5])
        r = np.array([0.3, 0.1, 1.3])
        rp = np.array([-0.2, 0.25, 1.1])
        geom = build_cube(1.0, MaterialModel.constant(1.8))
        de = geom.delta_eps(freq)
        w2 = freq.omega_sq

        def factor_fd(A, B, ctx, rte, rtm):
            kx, ky, kzv = ctx.k_x, ctx.k_y, ctx.k_z
            sgn = 1.0 if A[2] >= B[2] else -1.0
            F0, G0 = _plane_phase(kx, ky, sgn * kzv, -sgn * kzv)
            FR, GR = _plane_phase(kx, ky, kzv, kzv)
            out = np.zeros((3, 3), dtype=complex)
            for sig, w_r in (("TE", rte), ("TM", rtm)):
                out += _operator_dyad(sig, F0, G0, A, B, 1e-3, w2)
                out += w_r * _operator_dyad(sig, FR, GR, A, B, 1e-3, w2)
            meas = 1j / (8 * np.pi**2 * ctx.k_par**2 * kzv)
            return meas * out

        want = w2 * de * (factor_fd(r, s, c1, -1.0, 1.0)
                          @ factor_fd(s, rp, c2, -1.0, 1.0))
        got = born_integrand(env_mirror, geom, s, r, rp, c1, c2)
        assert np.max(np.abs(got - want)) < 1e-6 * np.max(np.abs(want))


def test_born_prefactor_formula():
    freq = real_frequency(1.0)
    c1 = WaveContext.create(freq, 0.7, 0.3)
    c2 = WaveContext.create(freq, 1.1, 1.4)
    geom = build_cube(1.0, MaterialModel.constant(1.5))
    s = np.array([0.0, 0.1, 0.2])
    r = np.array([0.4, -0.2, 1.0])
    rp = np.array([0.1, 0.3, 0.8])
    got = born_prefactor(geom, s, r, rp, c1, c2)
    de = 0.5
    phase = np.exp(1j * (c1.k_x * (r[0] - s[0]) + c1.k_y * (r[1] - s[1])
                         + c2.k_x * (s[0] - rp[0]) + c2.k_y * (s[1] - rp[1])
                         + c1.k_z * (r[2] + s[2]) + c2.k_z * (rp[2] + s[2])))
    want = -de * phase / (64 * np.pi**4 * c1.k_par**2 * c2.k_par**2
                          * c1.k_z * c2.k_z)
    assert got == pytest.approx(want, rel=1e-13)
