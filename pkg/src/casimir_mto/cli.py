"""Command-line interface: batch runs of the full pipeline.

One binary with subcommands::

    casimir-mto force      --config run.json   # F(z) or dF/dz over a grid
    casimir-mto pressure   --config run.json   # P(z) over a grid
    casimir-mto calibrate  --config run.json   # fit k, V0, R, delta0
    casimir-mto sweep      --config run.json   # synthetic resonance sweep
    casimir-mto limits     --config run.json   # alpha(lambda) exclusion CSV
    casimir-mto materials validate [--config registry.json]

Configuration lives in a JSON document; the ``--out``, ``--seed``,
``--tol`` and ``--threads`` flags override the matching config keys.
Unknown config keys are rejected. Numeric output is full-precision
scientific notation, so identical configs give byte-identical files.

Exit codes: 0 success, 1 I/O or parse failure, 2 domain/validation/
identifiability error, 3 convergence failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, backend_name
from .electrostatics import CalibrationSample, calibrate, estimate_v0
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    FitError,
    IdentifiabilityError,
    ParseError,
    ToolkitError,
    ValidationError,
)
from .lifshitz import (
    SpherePlaneGeometry,
    force_gradient_sphere_plane,
    force_sphere_plane,
    pressure_plane_plane,
)
from .materials import PerfectConductor, Tabulated, load_registry
from .oscillator import (
    SweepConfig,
    SweepNoise,
    invert_sweep,
    measured_params,
    simulate_sweep,
)
from .roughness import (
    RoughnessDistribution,
    averaged_force,
    averaged_pressure,
    load_heightmap,
    weights_from_heightmaps,
)
from .yukawa import (
    Layer,
    LayeredBody,
    alpha_limit,
    reference_plate,
    reference_sphere,
)

_REQUIRED = object()


class _Cfg:
    """Config-dict reader that rejects unknown keys on close()."""

    def __init__(self, doc: dict, where: str):
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{where}: expected a JSON object")
        self._doc = dict(doc)
        self._where = where

    def take(self, key, default=_REQUIRED):
        if key in self._doc:
            return self._doc.pop(key)
        if default is _REQUIRED:
            raise ConfigurationError(f"{self._where}: missing required key {key!r}")
        return default

    def close(self):
        if self._doc:
            raise ConfigurationError(
                f"{self._where}: unknown keys {sorted(self._doc)}"
            )


def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigurationError("this command needs --config PATH")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    return doc


def _parse_grid(spec, where: str) -> np.ndarray:
    if isinstance(spec, list):
        grid = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict):
        g = _Cfg(spec, where)
        start = float(g.take("start"))
        stop = float(g.take("stop"))
        points = int(g.take("points"))
        spacing = g.take("spacing", "linear")
        g.close()
        if points < 1:
            raise ConfigurationError(f"{where}: points must be >= 1")
        if spacing == "linear":
            grid = np.linspace(start, stop, points)
        elif spacing == "log":
            grid = np.geomspace(start, stop, points)
        else:
            raise ConfigurationError(f"{where}: spacing must be 'linear' or 'log'")
    else:
        raise ConfigurationError(f"{where}: expected a list or start/stop/points object")
    if grid.size == 0:
        raise ConfigurationError(f"{where}: empty grid")
    if np.any(grid <= 0):
        raise ConfigurationError(f"{where}: grid values must be > 0")
    return grid


def _resolve_materials(spec, where: str):
    m = _Cfg(spec, where)
    registry_path = m.take("registry", None)
    pair = m.take("pair")
    m.close()
    if not (isinstance(pair, list) and len(pair) == 2):
        raise ConfigurationError(f"{where}: 'pair' must list two material names")
    registry = load_registry(registry_path)
    models = []
    for name in pair:
        if name not in registry:
            raise ConfigurationError(
                f"{where}: unknown material {name!r}; registry has "
                f"{sorted(registry)}"
            )
        models.append(registry[name])
    return models[0], models[1]


def _parse_roughness(spec, where: str) -> RoughnessDistribution | None:
    if spec is None:
        return None
    r = _Cfg(spec, where)
    entries = r.take("entries", None)
    if entries is not None:
        r.close()
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigurationError(f"{where}: entries must be [[offset_m, weight], ...]")
        return RoughnessDistribution(arr[:, 0], arr[:, 1])
    map1 = load_heightmap(r.take("heightmap1"))
    map2_path = r.take("heightmap2", None)
    bins = int(r.take("bins", 21))
    r.close()
    map2 = load_heightmap(map2_path) if map2_path else None
    return weights_from_heightmaps(map1, map2, bins=bins)


def _map_grid(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _write_csv(path: str, header: list[str], rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.17e}" for x in row) + "\n")


def _common_overrides(doc: dict, args) -> dict:
    for key in ("out", "seed", "tol", "threads"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    return doc


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ConfigurationError("seed must be an unsigned 64-bit integer")
    return seed


def cmd_force(args) -> int:
    doc = _common_overrides(_load_config(args.config), args)
    cfg = _Cfg(doc, "force config")
    m1, m2 = _resolve_materials(cfg.take("materials"), "materials")
    radius = float(cfg.take("radius_m"))
    quantity = cfg.take("quantity", "force")
    grid = _parse_grid(cfg.take("z_grid_m"), "z_grid_m")
    tol = float(cfg.take("tol", 1e-6))
    dist = _parse_roughness(cfg.take("roughness", None), "roughness")
    out = cfg.take("out")
    threads = int(cfg.take("threads", 1))
    cfg.close()

    if quantity == "force":
        plain = lambda z: force_sphere_plane(z, radius, m1, m2, tol=tol)
        rough = lambda z: averaged_force(z, radius, dist, m1, m2, tol=tol)
        col = "f_n"
    elif quantity == "gradient":
        plain = lambda z: force_gradient_sphere_plane(z, radius, m1, m2, tol=tol)
        rough = lambda z: _gradient_averaged(z, radius, dist, m1, m2, tol)
        col = "dfdz_n_per_m"
    else:
        raise ConfigurationError("quantity must be 'force' or 'gradient'")

    def at(z: float):
        r = plain(float(z))
        if dist is None:
            return (z, r.value, r.est_rel_error)
        ra = rough(float(z))
        return (z, r.value, r.est_rel_error, ra.value)

    rows = _map_grid(at, grid, threads)
    header = ["z_m", col, "est_rel_error"] + ([f"{col}_rough"] if dist is not None else [])
    _write_csv(out, header, rows)
    print(f"wrote {len(rows)} rows to {out} [{backend_name()} kernels]")
    return 0


def _gradient_averaged(z, radius, dist, m1, m2, tol):
    p = averaged_pressure(z, dist, m1, m2, tol=tol)
    from .lifshitz import LifshitzResult
    return LifshitzResult(2.0 * math.pi * radius * abs(p.value),
                          p.est_rel_error, p.evaluations)


def cmd_pressure(args) -> int:
    doc = _common_overrides(_load_config(args.config), args)
    cfg = _Cfg(doc, "pressure config")
    m1, m2 = _resolve_materials(cfg.take("materials"), "materials")
    grid = _parse_grid(cfg.take("z_grid_m"), "z_grid_m")
    tol = float(cfg.take("tol", 1e-6))
    dist = _parse_roughness(cfg.take("roughness", None), "roughness")
    out = cfg.take("out")
    threads = int(cfg.take("threads", 1))
    cfg.close()

    def at(z: float):
        r = pressure_plane_plane(float(z), m1, m2, tol=tol)
        if dist is None:
            return (z, r.value, r.est_rel_error)
        ra = averaged_pressure(float(z), dist, m1, m2, tol=tol)
        return (z, r.value, r.est_rel_error, ra.value)

    rows = _map_grid(at, grid, threads)
    header = ["z_m", "p_n_per_m2", "est_rel_error"] + (
        ["p_n_per_m2_rough"] if dist is not None else []
    )
    _write_csv(out, header, rows)
    print(f"wrote {len(rows)} rows to {out} [{backend_name()} kernels]")
    return 0


def _load_calibration_csv(path) -> list[CalibrationSample]:
    samples = []
    with open(path, encoding="utf-8") as fh:
        header_seen = False
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                cols = [c.strip().lower() for c in line.split(",")]
                if cols != ["z_metal_m", "v_applied_v", "delta_c_f"]:
                    raise ParseError(
                        "expected header 'z_metal_m,v_applied_v,delta_c_f'",
                        line=lineno,
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError(f"expected 3 fields, got {len(parts)}", line=lineno)
            try:
                samples.append(CalibrationSample(*(float(p) for p in parts)))
            except ValueError:
                raise ParseError(f"non-numeric field in {line!r}", line=lineno) from None
    if not samples:
        raise ValidationError(f"{path}: no calibration rows")
    return samples


def cmd_calibrate(args) -> int:
    doc = _common_overrides(_load_config(args.config), args)
    cfg = _Cfg(doc, "calibrate config")
    data_path = cfg.take("data")
    guess_spec = cfg.take("initial_guess", None)
    out = cfg.take("out", None)
    cfg.close()

    samples = _load_calibration_csv(data_path)
    if guess_spec is None:
        guess = (5e4, estimate_v0(samples), 3e-4, 3e-8)
    else:
        g = _Cfg(guess_spec, "initial_guess")
        guess = (
            float(g.take("k_n_per_f", 5e4)),
            float(g.take("v0_v", estimate_v0(samples))),
            float(g.take("radius_m", 3e-4)),
            float(g.take("delta0_m", 3e-8)),
        )
        g.close()

    fit = calibrate(samples, guess)
    sig = fit.uncertainties()
    report = {
        "k_n_per_f": fit.k,
        "k_sigma": float(sig[0]),
        "v0_v": fit.v0,
        "v0_sigma": float(sig[1]),
        "radius_m": fit.radius,
        "radius_sigma": float(sig[2]),
        "delta0_m": fit.delta0,
        "delta0_sigma": float(sig[3]),
        "residual_rms_n": fit.residual_rms,
        "n_samples": len(samples),
    }
    for key, val in report.items():
        print(f"{key}: {val:.10e}" if isinstance(val, float) else f"{key}: {val}")
    if out:
        payload = dict(report)
        payload["covariance"] = fit.covariance.tolist()
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        print(f"wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    doc = _common_overrides(_load_config(args.config), args)
    cfg = _Cfg(doc, "sweep config")
    m1, m2 = _resolve_materials(cfg.take("materials"), "materials")
    radius = float(cfg.take("radius_m"))
    grid = _parse_grid(cfg.take("z_grid_m"), "z_grid_m")
    osc_spec = cfg.take("oscillator", None)
    noise_spec = cfg.take("noise", None)
    integration = float(cfg.take("integration_time_s", 10.0))
    dist = _parse_roughness(cfg.take("roughness", None), "roughness")
    seed = _check_seed(cfg.take("seed", 0))
    tol = float(cfg.take("tol", 1e-6))
    out = cfg.take("out")
    cfg.close()

    if osc_spec is None:
        params = measured_params()
    else:
        o = _Cfg(osc_spec, "oscillator")
        params = measured_params(
            kappa=float(o.take("kappa_nm_per_rad", 8.6e-10)),
            inertia=float(o.take("inertia_kg_m2", 4.6e-17)),
            coupling=float(o.take("coupling_per_kg", 6.489e8)),
            f0_hz=float(o.take("f0_hz", 687.23)),
            quality_q=float(o.take("quality_q", 1e4)),
        )
        o.close()
    if noise_spec is None:
        noise = SweepNoise()
    else:
        n = _Cfg(noise_spec, "noise")
        noise = SweepNoise(
            freq_noise_rms_hz=float(n.take("freq_noise_rms_hz", 0.0)),
            separation_noise_rms_m=float(n.take("separation_noise_rms_m", 0.0)),
        )
        n.close()
    if dist is None:
        dist = RoughnessDistribution.single()

    sweep_cfg = SweepConfig(
        z_grid=grid, integration_time_s=integration, noise=noise, tol=tol
    )
    geometry = SpherePlaneGeometry(radius=radius, separation=float(grid[0]))
    points = simulate_sweep(sweep_cfg, params, geometry, m1, m2, dist, seed)

    _write_csv(
        out,
        ["z_m", "f_hz", "sigma_hz"],
        [(p.z, p.omega_r / (2 * math.pi), p.sigma_omega / (2 * math.pi)) for p in points],
    )
    grad_out = str(Path(out).with_suffix("")) + "_gradients.csv"
    _write_csv(grad_out, ["z_m", "dfdz_n_per_m"], invert_sweep(points, params))
    print(f"wrote {out} and {grad_out} [seed {seed}, {backend_name()} kernels]")
    return 0


def _parse_body(spec, where: str, default: LayeredBody) -> LayeredBody:
    if spec is None:
        return default
    b = _Cfg(spec, where)
    core = float(b.take("core_density_kg_m3"))
    layer_rows = b.take("layers", [])
    radius = b.take("radius_m", None)
    b.close()
    layers = tuple(Layer(float(t), float(rho)) for t, rho in layer_rows)
    if default.shape == "sphere":
        if radius is None:
            raise ConfigurationError(f"{where}: sphere needs radius_m")
        return LayeredBody.sphere(float(radius), core, layers)
    if radius is not None:
        raise ConfigurationError(f"{where}: half-space takes no radius_m")
    return LayeredBody.half_space(core, layers)


def cmd_limits(args) -> int:
    doc = _common_overrides(_load_config(args.config), args)
    cfg = _Cfg(doc, "limits config")
    lam_grid = _parse_grid(cfg.take("lambda_grid_m"), "lambda_grid_m")
    z_grid = _parse_grid(cfg.take("z_grid_m"), "z_grid_m")
    sphere = _parse_body(cfg.take("sphere", None), "sphere", reference_sphere())
    plate = _parse_body(cfg.take("plate", None), "plate", reference_plate())
    bound_spec = cfg.take("residual_bound")
    out = cfg.take("out")
    threads = int(cfg.take("threads", 1))
    cfg.close()

    b = _Cfg(bound_spec, "residual_bound")
    const = b.take("constant_n", None)
    bound_file = b.take("file", None)
    b.close()
    if (const is None) == (bound_file is None):
        raise ConfigurationError(
            "residual_bound needs exactly one of 'constant_n' or 'file'"
        )
    if const is not None:
        bounds = np.full(z_grid.size, float(const))
    else:
        table = np.loadtxt(bound_file, delimiter=",", skiprows=1, ndmin=2)
        bounds = np.interp(z_grid, table[:, 0], table[:, 1])

    def at(lam: float):
        return (lam, alpha_limit(bounds, float(lam), sphere, plate, z_grid))

    rows = _map_grid(at, lam_grid, threads)
    _write_csv(out, ["lambda_m", "alpha_limit"], rows)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_materials_validate(args) -> int:
    registry = load_registry(args.config)
    failures = 0
    for name, model in sorted(registry.items()):
        try:
            if isinstance(model, PerfectConductor):
                print(f"{name}: ok (perfect conductor)")
                continue
            probe = np.array([0.01, 0.1, 1.0, 10.0, 100.0])
            eps = np.array([model.eps(x) for x in probe])
            if np.any(eps < 1.0):
                raise ValidationError("eps(i xi) dipped below 1")
            if np.any(np.diff(eps) > 0):
                raise ValidationError("eps(i xi) is not non-increasing")
            detail = f"eps(0.1 eV) = {model.eps(0.1):.6g}"
            if isinstance(model, Tabulated):
                detail += f", splice mismatch {model.splice_mismatch():.2e}"
            print(f"{name}: ok ({detail})")
        except ToolkitError as exc:
            failures += 1
            print(f"{name}: FAIL ({exc})")
    if failures:
        raise ValidationError(f"{failures} material(s) failed validation")
    print(f"{len(registry)} material(s) valid")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-mto",
        description="Casimir sphere-plane pipeline: forces, calibration, "
        "sweep simulation and Yukawa limits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output path (overrides config)")
        p.add_argument("--seed", type=int, help="RNG seed, unsigned 64-bit")
        p.add_argument("--tol", type=float, help="quadrature tolerance")
        p.add_argument("--threads", type=int, help="worker threads for grids")

    for name, fn in (
        ("force", cmd_force),
        ("pressure", cmd_pressure),
        ("calibrate", cmd_calibrate),
        ("sweep", cmd_sweep),
        ("limits", cmd_limits),
    ):
        p = sub.add_parser(name)
        add_common(p)
        p.set_defaults(handler=fn)

    mats = sub.add_parser("materials")
    mats_sub = mats.add_subparsers(dest="materials_command", required=True)
    val = mats_sub.add_parser("validate")
    val.add_argument("--config", help="registry path (default: bundled registry)")
    val.set_defaults(handler=cmd_materials_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ValidationError, ConfigurationError, IdentifiabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
