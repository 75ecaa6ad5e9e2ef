import numpy as np
import pytest

import lithoqed._backend as backend
import lithoqed._corepy as corepy


def _random_inputs(rng, M=180, Mp=150):
    A = rng.normal(size=(2, 3, 3, M)) + 1j * rng.normal(size=(2, 3, 3, M))
    B = rng.normal(size=(2, 3, 3, Mp)) + 1j * rng.normal(size=(2, 3, 3, Mp))
    kx1 = rng.uniform(-3, 3, M)
    ky1 = rng.uniform(-3, 3, M)
    kz1 = rng.uniform(0.1, 3, M) + 1j * rng.uniform(0, 2, M)
    kx2 = rng.uniform(-3, 3, Mp)
    ky2 = rng.uniform(-3, 3, Mp)
    kz2 = rng.uniform(0.1, 3, Mp) + 1j * rng.uniform(0, 2, Mp)
    cp = np.array([-1.0, 1.0])
    cq = np.array([1.0, 1.0])
    x_intervals = np.array([[-0.5, 0.2], [0.4, 0.9]])
    return (A, B, kx1, ky1, kz1, kx2, ky2, kz2, cp, cq, x_intervals,
            (-0.4, 0.6), (0.0, 0.8))


def test_numpy_backend_always_available():
    assert "numpy" in backend.available_backends()
    assert corepy.backend_name() == "numpy"


def test_backends_agree(rng):
    try:
        import lithoqed._core as core
    except ImportError:
        pytest.skip("compiled core not built")
    args = _random_inputs(rng)
    for skip00 in (False, True):
        a = corepy.reduce_composition(*args, skip00)
        b = core.reduce_composition(*args, skip00)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())


def test_backends_agree_small_phase(rng):
    """Exercise the series branch of the pairwise factors."""
    try:
        import lithoqed._core as core
    except ImportError:
        pytest.skip("compiled core not built")
    A, B, kx1, ky1, kz1, kx2, ky2, kz2, cp, cq, xiv, yiv, ziv = \
        _random_inputs(rng, 40, 40)
    # engineered near-coincident wave vectors: deltas below the switch
    kx2 = kx1 + rng.uniform(-1e-9, 1e-9, 40)
    ky2 = ky1 + rng.uniform(-1e-9, 1e-9, 40)
    args = (A, B, kx1, ky1, kz1, kx2, ky2, kz2, cp, cq, xiv, yiv, ziv, False)
    a = corepy.reduce_composition(*args)
    b = core.reduce_composition(*args)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())


def test_selected_backend_exposed():
    assert backend.backend_name() in ("numpy", "compiled")
