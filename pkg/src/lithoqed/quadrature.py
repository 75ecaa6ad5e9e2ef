"""Adaptive quadrature engines and shared integration grids.

Two families of integrals appear in this package:

* wave-vector integrals over (k_par, k_par', phi, phi') at a fixed frequency,
  exponentially damped in the evanescent region and kinked (not singular) at
  the branch point k_par = omega on the real-frequency axis;
* the outer integral over imaginary frequency xi for dispersion potentials.

Radial k_par grids use exact trigonometric/hyperbolic substitutions that
absorb the 1/k_z branch-point behaviour: on [0, omega] the map
k = omega*sin(theta) gives dk/k_z = dtheta, and on [omega, Lambda] the map
k = omega*cosh(tau) gives dk/|k_z| = dtau.  All engines are deterministic:
identical inputs produce bit-identical results (fixed subdivision order and
reduction order).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace

import numpy as np

from .kinematics import Frequency


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances, truncation policy and grid resolution knobs."""

    rel_tol: float = 1e-4
    abs_tol: float = 1e-10
    max_subdivisions: int = 400
    k_truncation_policy: str = "auto-exponential"  # or "fixed"
    k_truncation_lambda: float = 40.0
    xi_nodes: int = 32
    split_at_branch_point: bool = True
    # resolution of the fixed spectral grids used by the Born engine
    radial_nodes_propagating: int = 24
    radial_nodes_evanescent: int = 32
    angular_nodes: int = 32
    refine: bool = True
    # oracle resolution
    oracle_cells: int = 20

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.k_truncation_policy not in ("auto-exponential", "fixed"):
            raise ValueError("unknown k truncation policy")

    def with_tols(self, rel_tol=None, abs_tol=None):
        kw = {}
        if rel_tol is not None:
            kw["rel_tol"] = rel_tol
        if abs_tol is not None:
            kw["abs_tol"] = abs_tol
        return replace(self, **kw)


@dataclass
class IntegralResult:
    """Value + a posteriori error estimate of one integral."""

    value: complex
    error_estimate: float
    evaluations: int
    converged: bool

    def tolerance(self, config: QuadratureConfig):
        return max(config.abs_tol, config.rel_tol * abs(self.value))


DEFAULT_CONFIG = QuadratureConfig()


# ----------------------------------------------------------------------
# radial / angular grid builders
# ----------------------------------------------------------------------

def truncation_radius(frequency: Frequency, decay_scale: float,
                      config: QuadratureConfig) -> float:
    """Largest k_par kept in a radial grid.

    Under the auto policy the evanescent tail carries exp(-kappa*decay_scale)
    with kappa = sqrt(Lambda^2 - omega^2); Lambda is chosen so the tail bound
    drops below 0.01 * rel_tol.
    """
    if config.k_truncation_policy == "fixed":
        return config.k_truncation_lambda
    if decay_scale <= 0:
        raise ValueError("auto truncation needs a positive decay scale")
    # +10 covers the polynomial (up to kappa^2) growth of the integrands
    # relative to the bare exponential bound
    kappa_max = max(5.0, 10.0 - np.log(0.01 * config.rel_tol)) / decay_scale
    w = frequency.value
    if frequency.is_imaginary:
        return float(np.sqrt(max(kappa_max**2 - w**2, (0.5 * w) ** 2)))
    return float(np.sqrt(w**2 + kappa_max**2))


def gauss_panel(a, b, n):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def radial_grid(frequency: Frequency, lam: float, n_prop: int, n_evan: int):
    """(k_par nodes, dk weights) for [0, Lambda], branch-point aware.

    Real axis: k = w sin(theta) on [0, w] and k = w cosh(tau) on [w, Lambda].
    Imaginary axis: k = xi sinh(tau), tau in [0, asinh(Lambda/xi)].
    The maps keep the integrands smooth; weights are plain dk weights.
    """
    w = frequency.value
    if frequency.is_imaginary:
        tmax = float(np.arcsinh(lam / w))
        t, wt = gauss_panel(0.0, tmax, n_prop + n_evan)
        return w * np.sinh(t), wt * w * np.cosh(t)
    th, wth = gauss_panel(0.0, np.pi / 2, n_prop)
    k1 = w * np.sin(th)
    w1 = wth * w * np.cos(th)
    tmax = float(np.arccosh(max(lam, 1.0000001 * w) / w))
    ta, wta = gauss_panel(0.0, tmax, n_evan)
    k2 = w * np.cosh(ta)
    w2 = wta * w * np.sinh(ta)
    return np.concatenate([k1, k2]), np.concatenate([w1, w2])


def angular_grid(n: int):
    """Uniform periodic nodes on [0, 2pi) with trapezoid weights."""
    phi = (np.arange(n) + 0.5) * (2 * np.pi / n)
    return phi, np.full(n, 2 * np.pi / n)


# ----------------------------------------------------------------------
# deterministic adaptive 1-D engine
# ----------------------------------------------------------------------

def adaptive_1d(f, a, b, config: QuadratureConfig = DEFAULT_CONFIG,
                n_low=8, n_high=16, breakpoints=()):
    """Adaptive panel integration of a vectorized callable on [a, b].

    Error per panel is |GL(n_high) - GL(n_low)|; the worst panel (ties broken
    by creation index) is bisected until the summed estimate meets the
    tolerance or the subdivision budget runs out.
    """
    edges = sorted({a, b, *[p for p in breakpoints if a < p < b]})
    panels = []
    counter = 0
    evals = 0

    def measure(lo, hi):
        nonlocal evals
        x1, w1 = gauss_panel(lo, hi, n_low)
        x2, w2 = gauss_panel(lo, hi, n_high)
        v1 = np.sum(f(x1) * w1)
        v2 = np.sum(f(x2) * w2)
        evals += n_low + n_high
        return v2, abs(v2 - v1)

    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = measure(lo, hi)
        heapq.heappush(panels, (-err, counter, lo, hi, val, err))
        counter += 1

    for _ in range(config.max_subdivisions):
        total = sum(p[4] for p in sorted(panels, key=lambda p: p[1]))
        total_err = sum(p[5] for p in panels)
        if total_err <= max(config.abs_tol, config.rel_tol * abs(total)):
            return IntegralResult(total, total_err, evals, True)
        _, _, lo, hi, _, _ = heapq.heappop(panels)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            val, err = measure(*seg)
            heapq.heappush(panels, (-err, counter, seg[0], seg[1], val, err))
            counter += 1

    total = sum(p[4] for p in sorted(panels, key=lambda p: p[1]))
    total_err = sum(p[5] for p in panels)
    converged = total_err <= max(config.abs_tol, config.rel_tol * abs(total))
    return IntegralResult(total, total_err, evals, converged)


# ----------------------------------------------------------------------
# the (k, k', phi, phi') engine
# ----------------------------------------------------------------------

def _angular_double(f, k, kp, n_start, tol, max_doublings=6):
    """Angular double integral at fixed radii with doubling refinement."""
    n = n_start
    prev = None
    evals = 0
    for _ in range(max_doublings + 1):
        phi, wph = angular_grid(n)
        P, Pp = np.meshgrid(phi, phi, indexing="ij")
        vals = f(k, kp, P, Pp)
        cur = np.sum(vals) * (2 * np.pi / n) ** 2
        evals += n * n
        if prev is not None and abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur, abs(cur - prev), evals
        prev = cur
        n *= 2
    return cur, abs(cur - prev), evals


def integrate_k4(integrand, frequency: Frequency, decay_scale: float,
                 config: QuadratureConfig = DEFAULT_CONFIG,
                 angular_nodes: int | None = None):
    """Nested adaptive quadrature of f(k, k', phi, phi') over the full domain.

    ``integrand`` must broadcast over numpy arrays of its four arguments and
    be finite everywhere (removable singularities regularized by the caller).
    Radial domains are [0, Lambda] with Lambda from the truncation policy;
    angular domains are [0, 2pi].  Returns an IntegralResult whose error
    combines the radial panel estimate with the angular refinement residual.

    The radial integration is a deterministic adaptive quadtree over
    (k, k') rectangles; the angular double integral is evaluated at every
    radial node by a doubling periodic trapezoid rule.
    """
    lam = truncation_radius(frequency, decay_scale, config)
    w = frequency.value
    n_ang = angular_nodes or max(8, config.angular_nodes // 2)
    ang_tol = 0.1 * config.rel_tol

    cache = {}

    def point(k, kp):
        key = (k, kp)
        if key not in cache:
            cache[key] = _angular_double(integrand, k, kp, n_ang, ang_tol)
        return cache[key]

    # radial breakpoints at the branch point
    if not frequency.is_imaginary and config.split_at_branch_point and lam > w:
        edges = [0.0, w, lam]
    else:
        edges = [0.0, lam]

    n_low, n_high = 4, 7
    evals = 0

    def measure(rect):
        nonlocal evals
        (a0, a1), (b0, b1) = rect
        out = []
        for n in (n_low, n_high):
            xk, wk = gauss_panel(a0, a1, n)
            xq, wq = gauss_panel(b0, b1, n)
            acc = 0.0
            for i in range(n):
                for j in range(n):
                    v, _, ne = point(xk[i], xq[j])
                    acc += wk[i] * wq[j] * v
                    evals += ne
            out.append(acc)
        return out[1], abs(out[1] - out[0])

    rects = []
    counter = 0
    for a0, a1 in zip(edges[:-1], edges[1:]):
        for b0, b1 in zip(edges[:-1], edges[1:]):
            rect = ((a0, a1), (b0, b1))
            val, err = measure(rect)
            heapq.heappush(rects, (-err, counter, rect, val, err))
            counter += 1

    budget = config.max_subdivisions
    while budget > 0:
        total = sum(r[3] for r in sorted(rects, key=lambda r: r[1]))
        total_err = sum(r[4] for r in rects)
        if total_err <= max(config.abs_tol, config.rel_tol * abs(total)):
            return IntegralResult(total, total_err, evals, True)
        _, _, rect, _, _ = heapq.heappop(rects)
        (a0, a1), (b0, b1) = rect
        if (a1 - a0) >= (b1 - b0):
            mid = 0.5 * (a0 + a1)
            subs = (((a0, mid), (b0, b1)), ((mid, a1), (b0, b1)))
        else:
            mid = 0.5 * (b0 + b1)
            subs = (((a0, a1), (b0, mid)), ((a0, a1), (mid, b1)))
        for sub in subs:
            val, err = measure(sub)
            heapq.heappush(rects, (-err, counter, sub, val, err))
            counter += 1
        budget -= 1

    total = sum(r[3] for r in sorted(rects, key=lambda r: r[1]))
    total_err = sum(r[4] for r in rects)
    converged = total_err <= max(config.abs_tol, config.rel_tol * abs(total))
    return IntegralResult(total, total_err, evals, converged)


# ----------------------------------------------------------------------
# imaginary-frequency axis
# ----------------------------------------------------------------------

def integrate_xi(integrand, omega_ij: float,
                 config: QuadratureConfig = DEFAULT_CONFIG,
                 refine: bool | None = None):
    """Semi-infinite integral over xi with the map xi = omega_ij * t/(1-t).

    ``integrand`` receives an array of xi values and must return an array.
    The node count is config.xi_nodes; when ``refine`` the count is increased
    by half to form the error estimate, otherwise a cheap two-subset estimate
    is reported.
    """
    if omega_ij <= 0:
        raise ValueError("omega_ij must be positive")

    def eval_at(n):
        t, wt = gauss_panel(0.0, 1.0, n)
        xi = omega_ij * t / (1.0 - t)
        jac = omega_ij / (1.0 - t) ** 2
        return float(np.sum(integrand(xi) * jac * wt))

    n = config.xi_nodes
    v1 = eval_at(n)
    do_refine = config.refine if refine is None else refine
    if do_refine:
        v2 = eval_at(n + n // 2)
        err = abs(v2 - v1)
        converged = err <= max(config.abs_tol, config.rel_tol * abs(v2))
        return IntegralResult(v2, err, n + n + n // 2, converged)
    return IntegralResult(v1, abs(v1) * config.rel_tol, n, True)
