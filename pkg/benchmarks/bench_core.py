"""Benchmark the reduction core backends (numpy fallback vs compiled).

Times the fourfold wave-vector reduction on representative grids: a cube
evaluation at real frequency (decay-rate regime) and at imaginary frequency
(dispersion-potential regime), plus the raw kernel on synthetic tables.

Run:  python benchmarks/bench_core.py
"""
import time

import numpy as np

import lithoqed._backend as backend
import lithoqed._corepy as corepy
from lithoqed.born import _spectral_once
from lithoqed.geometry import build_cube
from lithoqed.halfspace import HalfSpaceEnvironment
from lithoqed.kinematics import (MaterialModel, imaginary_frequency,
                                 real_frequency)
from lithoqed.quadrature import QuadratureConfig

try:
    import lithoqed._core as core
except ImportError:
    core = None


def synthetic_args(rng, M, Mp):
    A = rng.normal(size=(2, 3, 3, M)) + 1j * rng.normal(size=(2, 3, 3, M))
    B = rng.normal(size=(2, 3, 3, Mp)) + 1j * rng.normal(size=(2, 3, 3, Mp))
    return (A, B,
            rng.uniform(-3, 3, M), rng.uniform(-3, 3, M),
            rng.uniform(0.1, 3, M) + 1j * rng.uniform(0, 2, M),
            rng.uniform(-3, 3, Mp), rng.uniform(-3, 3, Mp),
            rng.uniform(0.1, 3, Mp) + 1j * rng.uniform(0, 2, Mp),
            np.array([-1.0, 1.0]), np.array([1.0, 1.0]),
            np.array([[-0.5, 0.5]]), (-0.5, 0.5), (0.0, 1.0), False)


def time_fn(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    impls = [("numpy", corepy.reduce_composition)]
    if core is not None:
        impls.append(("compiled", core.reduce_composition))
    print(f"selected backend: {backend.backend_name()}")
    print(f"{'case':34s}" + "".join(f"{name:>12s}" for name, _ in impls)
          + f"{'agree':>12s}")

    rng = np.random.default_rng(0)
    for M in (512, 2048):
        args = synthetic_args(rng, M, M)
        times, outs = [], []
        for _, fn in impls:
            t, out = time_fn(fn, *args)
            times.append(t)
            outs.append(out)
        agree = (np.max(np.abs(outs[0] - outs[-1]))
                 / np.max(np.abs(outs[0])))
        print(f"synthetic tables M={M:<5d}           "
              + "".join(f"{t * 1e3:10.1f}ms" for t in times)
              + f"{agree:12.1e}")

    env = HalfSpaceEnvironment(MaterialModel.perfect_mirror())
    geom = build_cube(0.6, MaterialModel.constant(1.8))
    cfg = QuadratureConfig()
    r = np.array([0.3, 0.15, 1.0])
    for freq, label in ((real_frequency(1.0), "cube dW, real freq"),
                        (imaginary_frequency(1.0), "cube dW, imag freq")):
        times, outs = [], []
        for name, fn in impls:
            backend.reduce_composition = fn
            t, out = time_fn(lambda: _spectral_once(env, geom, r, r, freq,
                                                    cfg, False), repeats=2)
            times.append(t)
            outs.append(out)
        agree = (np.max(np.abs(outs[0] - outs[-1]))
                 / np.max(np.abs(outs[0])))
        print(f"{label:34s}" + "".join(f"{t:11.2f}s" for t in times)
              + f"{agree:12.1e}")
    # restore the import-time selection
    backend.reduce_composition = (core or corepy).reduce_composition


if __name__ == "__main__":
    main()
