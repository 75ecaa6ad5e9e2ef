"""Command-line frontend: declarative scans, validation and presets.

A scan is described by an INI file with sections [atom], [substrate],
[geometry], [quadrature] and [scan]; results are written as CSV
(columns x,y,z,value,normalized,err,converged) plus a JSON sidecar carrying
the full configuration echo, version and timing.  Exit codes: 0 on full
convergence, 2 when some points did not converge, 1 on invalid input.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .geometry import (DepositionGeometry, GratingSpec, build_cube,
                       build_grating, empty_geometry)
from .halfspace import HalfSpaceEnvironment, halfspace_decay_closed_forms
from .kinematics import MaterialModel, real_frequency
from .observables import (AtomModel, bare_halfspace_decay, cp_force,
                          cp_potential, decay_rate_deposition, f0_nonretarded,
                          gamma_0, u0_nonretarded)
from .quadrature import QuadratureConfig

CSV_HEADER = "x,y,z,value,normalized,err,converged"


class ConfigError(ValueError):
    """Invalid configuration; message carries section/key anchors."""


@dataclass
class ScanSpec:
    quantity: str
    normalization: str
    direction: str
    fixed: dict
    axes: list  # [(axis_name, start, stop, count), ...]
    threads: int
    born_path: str

    def points(self):
        """Grid points in output order (first axis fastest)."""
        base = {"x": self.fixed.get("x", 0.0), "y": self.fixed.get("y", 0.0),
                "z": self.fixed.get("z", 0.0)}
        if not self.axes:
            return [np.array([base["x"], base["y"], base["z"]])]
        grids = [(name, np.linspace(start, stop, count))
                 for name, start, stop, count in self.axes]
        pts = []
        if len(grids) == 1:
            name1, vals1 = grids[0]
            for v1 in vals1:
                p = dict(base)
                p[name1] = v1
                pts.append(np.array([p["x"], p["y"], p["z"]]))
        else:
            name1, vals1 = grids[0]
            name2, vals2 = grids[1]
            for v2 in vals2:
                for v1 in vals1:
                    p = dict(base)
                    p[name1] = v1
                    p[name2] = v2
                    pts.append(np.array([p["x"], p["y"], p["z"]]))
        return pts


def _get(cp, section, key, conv, default=None, required=False):
    if not cp.has_section(section):
        if required:
            raise ConfigError(f"[{section}]: missing section")
        return default
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"[{section}] {key}: missing required key")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})")


def _parse_material(cp, section):
    kind = _get(cp, section, "material", str, default="vacuum").strip()
    if kind == "perfect-mirror":
        return MaterialModel.perfect_mirror()
    if kind == "vacuum":
        return MaterialModel.vacuum()
    if kind == "constant":
        eps = _get(cp, section, "epsilon", float, required=True)
        return MaterialModel.constant(eps)
    if kind == "drude-lorentz":
        raw = _get(cp, section, "oscillators", str, required=True)
        osc = []
        for part in raw.split(";"):
            vals = [float(v) for v in part.split(",")]
            if len(vals) != 3:
                raise ConfigError(f"[{section}] oscillators: each entry needs "
                                  "wp,w0,gamma")
            osc.append(tuple(vals))
        return MaterialModel.drude_lorentz(osc)
    raise ConfigError(f"[{section}] material: unknown kind {kind!r}")


def _parse_geometry(cp):
    gtype = _get(cp, "geometry", "type", str, default="none").strip()
    if gtype in ("none", ""):
        return empty_geometry()
    eps = _get(cp, "geometry", "epsilon", float, default=1.8)
    contrast = MaterialModel.constant(eps)
    if gtype == "cube":
        a = _get(cp, "geometry", "a", float, required=True)
        return build_cube(a, contrast)
    if gtype == "grating":
        n = _get(cp, "geometry", "n", int, required=True)
        w = _get(cp, "geometry", "w", float, required=True)
        h = _get(cp, "geometry", "h", float, required=True)
        ln = _get(cp, "geometry", "l", float, required=True)
        x0 = _get(cp, "geometry", "x0", float, default=None)
        return build_grating(GratingSpec(n, w, h, ln, x0_override=x0),
                             contrast)
    raise ConfigError(f"[geometry] type: unknown type {gtype!r}")


def _parse_axis(raw):
    parts = raw.split(":")
    if len(parts) != 4:
        raise ValueError("axis spec must be axis:start:stop:count")
    name = parts[0].strip()
    if name not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {name!r}")
    start, stop = float(parts[1]), float(parts[2])
    count = int(parts[3])
    if count < 1:
        raise ValueError("count must be >= 1")
    return name, start, stop, count


def parse_config(path):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as f:
            cp.read_file(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}")

    atom = AtomModel(
        omega_A=_get(cp, "atom", "omega", float, required=True),
        polarization=_get(cp, "atom", "polarization", str,
                          default="isotropic").strip(),
        dipole_magnitude=_get(cp, "atom", "dipole", float, default=1.0))
    env = HalfSpaceEnvironment(_parse_material(cp, "substrate"))
    geometry = _parse_geometry(cp)

    quad = QuadratureConfig(
        rel_tol=_get(cp, "quadrature", "rel_tol", float, default=1e-4),
        abs_tol=_get(cp, "quadrature", "abs_tol", float, default=1e-10),
        max_subdivisions=_get(cp, "quadrature", "max_subdivisions", int,
                              default=400),
        k_truncation_policy=_get(cp, "quadrature", "k_truncation", str,
                                 default="auto-exponential").strip(),
        k_truncation_lambda=_get(cp, "quadrature", "lambda", float,
                                 default=40.0),
        xi_nodes=_get(cp, "quadrature", "xi_nodes", int, default=24))

    quantity = _get(cp, "scan", "quantity", str, required=True).strip()
    if quantity not in ("decay-rate", "cp-potential", "cp-force"):
        raise ConfigError(f"[scan] quantity: unknown quantity {quantity!r}")
    normalization = _get(cp, "scan", "normalization", str,
                         default="raw").strip()
    allowed_norm = {"decay-rate": ("raw", "bare-halfspace", "free-space"),
                    "cp-potential": ("raw", "bare-halfspace", "U0"),
                    "cp-force": ("raw", "F0")}
    if normalization not in allowed_norm[quantity]:
        raise ConfigError(f"[scan] normalization: {normalization!r} not "
                          f"valid for {quantity} (allowed: "
                          f"{', '.join(allowed_norm[quantity])})")
    axes = []
    for key in ("axis1", "axis2"):
        raw = _get(cp, "scan", key, str, default=None)
        if raw:
            try:
                axes.append(_parse_axis(raw))
            except ValueError as exc:
                raise ConfigError(f"[scan] {key}: {exc}")
    fixed = {}
    for key in ("x", "y", "z"):
        val = _get(cp, "scan", key, float, default=None)
        if val is not None:
            fixed[key] = val
    spec = ScanSpec(
        quantity=quantity, normalization=normalization,
        direction=_get(cp, "scan", "direction", str, default="z").strip(),
        fixed=fixed, axes=axes,
        threads=_get(cp, "scan", "threads", int, default=1),
        born_path=_get(cp, "quadrature", "born_path", str,
                       default="auto").strip())

    # upfront grid validation
    for p in spec.points():
        if p[2] <= 0:
            raise ConfigError(f"[scan]: grid point ({p[0]:g}, {p[1]:g}, "
                              f"{p[2]:g}) has z <= 0")
        if geometry.contains(p):
            raise ConfigError(f"[scan]: grid point ({p[0]:g}, {p[1]:g}, "
                              f"{p[2]:g}) lies inside the deposition")
    return atom, env, geometry, quad, spec, cp


def _evaluate_point(args):
    atom, env, geometry, quad, spec, point = args
    if spec.quantity == "decay-rate":
        res = decay_rate_deposition(atom, env, geometry, point, quad,
                                    path=spec.born_path)
        value = res.gamma_total
        err = res.error_estimate
        conv = res.converged
        if spec.normalization == "free-space":
            normalized = value / gamma_0(atom)
        elif spec.normalization == "bare-halfspace":
            bare = bare_halfspace_decay(atom, env, point, quad)
            normalized = value / bare.gamma_total
        else:
            normalized = value
    elif spec.quantity == "cp-potential":
        res = cp_potential(atom, env, geometry, point, quad,
                           path=spec.born_path)
        value = res.u_total
        err = res.error_estimate
        conv = res.converged
        if spec.normalization == "U0":
            normalized = value / res.u0_reference
        elif spec.normalization == "bare-halfspace":
            normalized = value / res.u_halfspace
        else:
            normalized = value
    else:  # cp-force
        value = cp_force(atom, env, geometry, point, spec.direction, quad,
                         path=spec.born_path)
        err = abs(value) * quad.rel_tol
        conv = True
        if spec.normalization == "F0":
            normalized = value / f0_nonretarded(point[2],
                                                atom.dipole_magnitude)
        else:
            normalized = value
    return point, value, normalized, err, conv


def run_scan(config_path, out_path=None, fmt="csv", threads=None):
    """Execute a scan config; returns (csv_path, json_path, exit_code)."""
    atom, env, geometry, quad, spec, cp = parse_config(config_path)
    if threads is not None:
        spec.threads = threads
    points = spec.points()
    tasks = [(atom, env, geometry, quad, spec, p) for p in points]
    t0 = time.time()
    if spec.threads > 1:
        import multiprocessing as mp
        with mp.Pool(spec.threads) as pool:
            rows = pool.map(_evaluate_point, tasks)
    else:
        rows = [_evaluate_point(t) for t in tasks]
    elapsed = time.time() - t0

    out_path = out_path or "scan_results.csv"
    lines = [CSV_HEADER]
    n_conv = 0
    for point, value, normalized, err, conv in rows:
        n_conv += bool(conv)
        lines.append(",".join([f"{point[0]:.17g}", f"{point[1]:.17g}",
                               f"{point[2]:.17g}", f"{value:.17g}",
                               f"{normalized:.17g}", f"{err:.17g}",
                               "1" if conv else "0"]))
    csv_text = "\n".join(lines) + "\n"

    with open(config_path) as f:
        config_echo = f.read()
    sidecar = {
        "version": __version__,
        "config_file": str(config_path),
        "config_echo": config_echo,
        "config": {s: dict(cp.items(s)) for s in cp.sections()},
        "schema": CSV_HEADER.split(","),
        "points": len(points),
        "converged": n_conv,
        "timing_seconds": elapsed,
    }
    json_path = str(out_path).rsplit(".", 1)[0] + ".json"
    if fmt == "csv":
        with open(out_path, "w") as f:
            f.write(csv_text)
    else:
        sidecar["rows"] = [
            {"x": p[0], "y": p[1], "z": p[2], "value": v, "normalized": nv,
             "err": e, "converged": bool(c)}
            for p, v, nv, e, c in rows]
        with open(out_path, "w") as f:
            json.dump(sidecar, f, indent=1)
    with open(json_path, "w") as f:
        json.dump(sidecar, f, indent=1)
    code = 0 if n_conv == len(points) else 2
    return out_path, json_path, code


# ----------------------------------------------------------------------
# validation suite
# ----------------------------------------------------------------------

def run_validation(level="quick", stream=sys.stdout):
    """Built-in cross checks; prints one pass/fail line per invariant."""
    from .kernels import kernel_matrix
    from .kinematics import WaveContext
    from .born import spectral_delta_w
    from .oracle import born_correction_riemann, kernel_operator_check, \
        riemann_convergence_study, OracleConfig
    from .halfspace import halfspace_scattering_batch

    failures = 0

    def report(name, ok, detail):
        nonlocal failures
        failures += not ok
        stream.write(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})\n")

    rng = np.random.default_rng(42)
    freq = real_frequency(1.0)

    # kernel zero + symmetry catalogue
    worst_zero = 0.0
    worst_sym = 0.0
    checks = 20 if level == "quick" else 100
    for _ in range(checks):
        k1 = rng.uniform(0.2, 3.0)
        k2 = rng.uniform(0.2, 3.0)
        c1 = WaveContext.create(freq, k1, rng.uniform(0, 2 * np.pi))
        c2 = WaveContext.create(freq, k2, rng.uniform(0, 2 * np.pi))
        sz = rng.uniform(0.1, 0.5)
        for tau in ("TE", "TETE", "TETM"):
            m = kernel_matrix(tau, "greater", c1, c2, s_z=sz)
            scale = max(np.max(np.abs(m)), 1e-300)
            worst_zero = max(worst_zero, np.max(np.abs(m[:, 2])) / scale,
                             np.max(np.abs(m[2, :])) / scale)
        c1s = WaveContext.create(freq, k1, np.pi / 2 - c1.phi)
        c2s = WaveContext.create(freq, k2, np.pi / 2 - c2.phi)
        for tau in ("TE", "TM", "TETE", "TMTM", "TETM"):
            m = kernel_matrix(tau, "greater", c1, c2, s_z=sz)
            ms = kernel_matrix(tau, "greater", c1s, c2s, s_z=sz)
            scale = max(np.max(np.abs(m)), 1e-300)
            worst_sym = max(
                worst_sym,
                abs(m[1, 1] - ms[0, 0]) / scale,
                abs(m[1, 2] - ms[0, 2]) / scale,
                abs(m[2, 1] - ms[2, 0]) / scale,
                abs(m[1, 0] - m[0, 1]) / scale)
    report("kernel zero catalogue", worst_zero == 0.0, f"max {worst_zero:.1e}")
    report("kernel xy symmetry", worst_sym < 1e-12, f"max {worst_sym:.1e}")

    # operator oracle
    worst_op = 0.0
    for seed in range(3 if level == "quick" else 10):
        k1, k2 = rng.uniform(0.3, 2.5, 2)
        for k in (k1, k2):
            if abs(k - freq.value) < 0.15:
                k += 0.3
        c1 = WaveContext.create(freq, k1, rng.uniform(0, 2 * np.pi))
        c2 = WaveContext.create(freq, k2, rng.uniform(0, 2 * np.pi))
        for tau in ("TE", "TM", "TETE", "TMTM", "TETM"):
            for order in ("greater", "lesser"):
                worst_op = max(worst_op, kernel_operator_check(
                    tau, order, c1, c2, OracleConfig(seed=seed)))
    report("kernel operator oracle", worst_op < 1e-6, f"max {worst_op:.1e}")

    # mirror closed forms vs quadrature
    env = HalfSpaceEnvironment(MaterialModel.perfect_mirror())
    worst_cf = 0.0
    for z in (0.3, 1.0, 3.0):
        g = halfspace_scattering_batch(
            env, np.array([[0.0, 0.0, z]]), np.array([[0.0, 0.0, z]]), freq)[0]
        d_par_ref, d_perp_ref = halfspace_decay_closed_forms(z, 1.0)
        d_par = 2 * np.imag(g[0, 0])
        d_perp = 2 * np.imag(g[2, 2])
        worst_cf = max(worst_cf, abs(d_par - d_par_ref) / abs(d_par_ref),
                       abs(d_perp - d_perp_ref) / abs(d_perp_ref))
    report("mirror closed forms", worst_cf < 1e-4, f"max rel {worst_cf:.1e}")

    # Born spectral vs Riemann oracle
    geom = build_cube(1.0, MaterialModel.constant(1.8))
    r = np.array([0.2, -0.1, 1.4])
    spec_res = spectral_delta_w(env, geom, r, r, freq)
    if level == "quick":
        ora = born_correction_riemann(env, geom, r, r, freq,
                                      OracleConfig(cells_per_axis=10))
        dev = float(np.max(np.abs(spec_res.entries - ora))
                    / np.max(np.abs(spec_res.entries)))
        report("Born Riemann cross-check (10^3 cells)", dev < 3e-2,
               f"rel {dev:.1e}")
    else:
        cells, devs, slope = riemann_convergence_study(
            env, geom, r, r, freq, spec_res.entries, cells=(5, 10, 20))
        report("Born Riemann convergence",
               devs[-1] < 5e-3 and 1.5 < slope < 2.6,
               f"rel {devs[-1]:.1e}, order {slope:.2f}")
    return failures


# ----------------------------------------------------------------------
# presets
# ----------------------------------------------------------------------

PRESETS = {
    "fig2-halfspace-decay": """\
; Decay rate of x- and z-polarised atoms against distance from a mirror.
; Emit two scans (polarization x and z) to reproduce both curves.
[atom]
omega = 1.0
polarization = z
dipole = 1.0

[substrate]
material = perfect-mirror

[geometry]
type = none

[scan]
quantity = decay-rate
normalization = free-space
axis1 = z:0.1:10:100
""",
    "fig4-cube-decay-line": """\
; Decay rates on the cube axis, scanning height above the cube top.
[atom]
omega = 1.0
polarization = z
dipole = 1.0

[substrate]
material = perfect-mirror

[geometry]
type = cube
a = 1.0
epsilon = 1.8

[scan]
quantity = decay-rate
normalization = free-space
axis1 = z:1.05:4.0:40
""",
    "fig5-cube-decay-map": """\
; Normalised decay map for an x-polarised atom 0.01a above the cube top.
[atom]
omega = 1.0
polarization = x
dipole = 1.0

[substrate]
material = perfect-mirror

[geometry]
type = cube
a = 1.0
epsilon = 1.8

[scan]
quantity = decay-rate
normalization = bare-halfspace
z = 1.01
axis1 = x:-1.0:1.0:21
axis2 = y:-1.0:1.0:21
""",
    "fig6-grating-cp-map": """\
; CP potential above the five-strip grating, in units of the mirror value.
[atom]
omega = 1.0
polarization = isotropic
dipole = 1.0

[substrate]
material = perfect-mirror

[geometry]
type = grating
n = 5
w = 1.0
h = 1.0
l = 5.0
epsilon = 1.8

[scan]
quantity = cp-potential
normalization = U0
z = 1.25
axis1 = x:-7.0:7.0:57
""",
    "fig7-grating-force-line": """\
; Lateral CP force along x above the grating, in units of F0.
[atom]
omega = 1.0
polarization = isotropic
dipole = 1.0

[substrate]
material = perfect-mirror

[geometry]
type = grating
n = 5
w = 1.0
h = 1.0
l = 5.0
epsilon = 1.8

[scan]
quantity = cp-force
normalization = F0
direction = x
z = 1.25
axis1 = x:-7.0:7.0:57
""",
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lithoqed",
        description="Decay rates and Casimir-Polder potentials near a "
                    "half-space with small depositions")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="run a scan described by a config")
    p_scan.add_argument("config")
    p_scan.add_argument("--out", default=None)
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--threads", type=int, default=None)

    p_val = sub.add_parser("validate", help="run the built-in cross checks")
    p_val.add_argument("--level", choices=("quick", "full"), default="quick")

    p_pre = sub.add_parser("presets", help="list or emit preset configs")
    pre_sub = p_pre.add_subparsers(dest="preset_command", required=True)
    pre_sub.add_parser("list")
    p_emit = pre_sub.add_parser("emit")
    p_emit.add_argument("name")
    p_emit.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command == "scan":
        try:
            out, sidecar, code = run_scan(args.config, args.out, args.format,
                                          args.threads)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {out} and {sidecar}")
        return code

    if args.command == "validate":
        failures = run_validation(args.level)
        return 1 if failures else 0

    if args.command == "presets":
        if args.preset_command == "list":
            for name in PRESETS:
                print(name)
            return 0
        if args.name not in PRESETS:
            print(f"error: unknown preset {args.name!r} (see presets list)",
                  file=sys.stderr)
            return 1
        text = PRESETS[args.name]
        if args.out:
            with open(args.out, "w") as f:
                f.write(text)
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
