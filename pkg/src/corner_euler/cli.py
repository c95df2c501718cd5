"""Batch front end: one JSON config in, CSV/JSON artifacts out.

Usage: corner-euler <config.json> [--command NAME] [--workers N]

The config is a single JSON document; the manifest written next to the
outputs captures the fully resolved configuration, so a run is reproducible
from its manifest alone. Exit status is 0 iff every executed check passed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import shutil
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conformal import map_for_domain
from .domain import DomainSpec, half_disk, sector, unit_disk  # noqa: F401
from .estimates import (
    boundary_attainment_experiment,
    check_k3_integrals,
    check_kernel_bounds,
    check_map_exponents,
    check_velocity_bounds,
    check_w1p_growth,
    gronwall_experiment,
)
from .flow import FlowConfig, advect
from .vorticity import (
    DiskVorticity,
    PatchSpec,
    from_physical_patch,
    single_vortex,
    total_circulation,
)

COMMANDS = (
    "simulate", "verify-kernel", "verify-map", "verify-velocity",
    "verify-k3", "gronwall", "boundary", "w1p", "all-checks",
)

VERIFY_COMMANDS = (
    "verify-kernel", "verify-map", "verify-velocity", "verify-k3",
    "gronwall", "boundary", "w1p",
)


class ConfigError(ValueError):
    """Config validation failure; the message names the offending field path."""


def _require(cond, path, message):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def _as_complex(value, path):
    _require(isinstance(value, (list, tuple)) and len(value) == 2, path,
             "expected a [x, y] pair")
    return complex(float(value[0]), float(value[1]))


def parse_domain(cfg: dict) -> DomainSpec:
    kind = cfg.get("kind")
    _require(kind in ("unit_disk", "half_disk", "sector"), "domain.kind",
             f"unrecognized kind {kind!r}")
    delta = cfg.get("delta")
    if kind == "unit_disk":
        return unit_disk()
    if kind == "half_disk":
        return half_disk(delta=delta)
    theta0 = cfg.get("theta0")
    _require(theta0 is not None, "domain.theta0", "required for sector domains")
    _require(0.0 < float(theta0) <= math.pi / 2 + 1e-12, "domain.theta0",
             f"must lie in (0, pi/2], got {theta0}")
    return sector(float(theta0), delta=delta)


def parse_vorticity(cfg: dict, cmap) -> DiskVorticity:
    vtype = cfg.get("type")
    _require(vtype in ("patch", "single_vortex"), "vorticity.type",
             f"unrecognized type {vtype!r}")
    if vtype == "single_vortex":
        pos = _as_complex(cfg.get("position", [0, 0]), "vorticity.position")
        return single_vortex(pos, float(cfg.get("circulation", 1.0)))
    kind = cfg.get("kind", "circle")
    _require(kind in ("circle", "rect"), "vorticity.kind",
             f"unrecognized patch kind {kind!r}")
    center = _as_complex(cfg.get("center", [0, 0]), "vorticity.center")
    value = float(cfg.get("value", 1.0))
    resolution = int(cfg.get("resolution", 48))
    _require(resolution >= 8, "vorticity.resolution", "must be >= 8")
    if kind == "circle":
        patch = PatchSpec(kind="circle", center=center, value=value,
                          radius=float(cfg.get("radius", 0.1)))
    else:
        hw = cfg.get("half_widths", [0.1, 0.1])
        patch = PatchSpec(kind="rect", center=center, value=value,
                          half_widths=(float(hw[0]), float(hw[1])))
    return from_physical_patch(cmap, patch, resolution)


def parse_flow(cfg: dict) -> FlowConfig:
    try:
        return FlowConfig(
            dt=float(cfg.get("dt", 1e-3)),
            t_end=float(cfg.get("t_end", 1.0)),
            stepper=cfg.get("stepper", "rk4"),
            tolerance=float(cfg.get("tolerance", 1e-8)),
            record_every=int(cfg.get("record_every", 100)),
        )
    except ValueError as exc:
        raise ConfigError(f"flow: {exc}") from exc


def _write_trajectory_csv(path: Path, traj) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "id", "kind", "y1", "y2", "x1", "x2"])
        for it, t in enumerate(traj.times):
            for ie, kind in enumerate(traj.kinds):
                y = traj.disk_positions[it, ie]
                x = traj.physical_positions[it, ie]
                writer.writerow([repr(float(t)), ie, kind,
                                 repr(float(y.real)), repr(float(y.imag)),
                                 repr(float(x.real)), repr(float(x.imag))])


def _write_vorticity_csv(path: Path, vort: DiskVorticity) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z1", "z2", "w"])
        for z, w in zip(vort.particles, vort.weights):
            writer.writerow([repr(float(z.real)), repr(float(z.imag)),
                         repr(float(w))])


def _write_snapshot(path: Path, t: float, positions: np.ndarray) -> None:
    payload = {"t": float(t),
               "positions": [[z.real, z.imag] for z in positions]}
    path.write_text(json.dumps(payload))


def _run_command(command: str, cmap, vort, flow_cfg, checks: dict,
                 seed: int, out: Path, tracers) -> list:
    """Execute one command; returns the FitReports it produced."""
    reports = []
    reports_dir = out / "reports"

    def emit(report):
        reports.append(report)
        reports_dir.mkdir(exist_ok=True)
        (reports_dir / f"{report.name}.json").write_text(report.to_json())

    if command == "simulate":
        traj, final = advect(cmap, vort, tracers, flow_cfg)
        tdir = out / "trajectories"
        tdir.mkdir(exist_ok=True)
        _write_trajectory_csv(tdir / "trajectory.csv", traj)
        _write_vorticity_csv(out / "vorticity_initial.csv", vort)
        _write_vorticity_csv(out / "vorticity_final.csv", final)
        sdir = out / "snapshots"
        sdir.mkdir(exist_ok=True)
        for it, t in enumerate(traj.times):
            _write_snapshot(sdir / f"snapshot_{it:04d}.json", t,
                            traj.disk_positions[it])
        summary = {
            "t_end": float(traj.times[-1]),
            "total_circulation": total_circulation(final),
            "n_particles": int(len(vort.particles)),
            "n_tracers": int(len(tracers)),
        }
        (out / "simulate_summary.json").write_text(json.dumps(summary, indent=2))
    elif command == "verify-kernel":
        for rep in check_kernel_bounds(int(checks.get("kernel_n", 1_000_000)),
                                       seed):
            emit(rep)
    elif command == "verify-map":
        if not cmap.domain.corners:
            raise ConfigError("domain.kind: verify-map needs a corner domain")
        for idx in range(len(cmap.domain.corners)):
            for rep in check_map_exponents(cmap, idx):
                emit(rep)
    elif command == "verify-velocity":
        for rep in check_velocity_bounds(cmap, vort,
                                         int(checks.get("velocity_n", 10_000)),
                                         seed):
            emit(rep)
    elif command == "verify-k3":
        for rep in check_k3_integrals(int(checks.get("k3_pairs", 12)),
                                      int(checks.get("k3_resolution", 256)),
                                      seed):
            emit(rep)
    elif command == "gronwall":
        d0 = checks.get("gronwall_d0", [1e-2, 1e-3, 1e-4])
        emit(gronwall_experiment(cmap, vort, d0, flow_cfg, seed=seed))
    elif command == "boundary":
        margins = checks.get("margins", [0.1, 0.01])
        emit(boundary_attainment_experiment(cmap, vort, margins, flow_cfg))
    elif command == "w1p":
        p_list = checks.get("w1p_p", [2, 4, 8, 16])
        grid = int(checks.get("w1p_grid", 512))
        emit(check_w1p_growth(cmap, vort, p_list, grid))
    else:
        raise ConfigError(f"command: unrecognized command {command!r}")
    return reports


def run(config: dict, workers: int = 1) -> int:
    """Validate the config, dispatch the command, write artifacts.

    Returns a process exit status; partial outputs are removed on failure.
    """
    command = config.get("command")
    _require(command in COMMANDS, "command",
             f"must be one of {', '.join(COMMANDS)}")
    seed = int(config.get("seed", 0))
    out = Path(config.get("output_dir", "corner_euler_out"))

    domain = None
    try:
        domain = parse_domain(config.get("domain", {"kind": "unit_disk"}))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"domain: {exc}") from exc
    cmap = map_for_domain(domain)

    vort_cfg = config.get("vorticity",
                          {"type": "single_vortex", "position": [0, 0],
                           "circulation": 1.0})
    try:
        vort = parse_vorticity(vort_cfg, cmap)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"vorticity: {exc}") from exc
    flow_cfg = parse_flow(config.get("flow", {}))
    tracers = np.asarray(
        [_as_complex(t, f"tracers[{i}]")
         for i, t in enumerate(config.get("tracers", []))],
        dtype=np.complex128)
    checks = config.get("checks", {})

    out.mkdir(parents=True, exist_ok=True)
    try:
        commands = list(VERIFY_COMMANDS) if command == "all-checks" else [command]
        all_reports = []
        for cmd in commands:
            all_reports.extend(_run_command(
                cmd, cmap, vort, flow_cfg, checks, seed, out, tracers))

        manifest = {
            "version": __version__,
            "workers": workers,
            "resolved_config": {
                "command": command,
                "seed": seed,
                "output_dir": str(out),
                "domain": config.get("domain", {"kind": "unit_disk"}),
                "vorticity": vort_cfg,
                "flow": {
                    "dt": flow_cfg.dt, "t_end": flow_cfg.t_end,
                    "stepper": flow_cfg.stepper,
                    "tolerance": flow_cfg.tolerance,
                    "record_every": flow_cfg.record_every,
                },
                "checks": checks,
                "tracers": config.get("tracers", []),
            },
            "reports": [r.to_dict() for r in all_reports],
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                      sort_keys=True))
    except Exception:
        for sub in ("reports", "trajectories", "snapshots"):
            shutil.rmtree(out / sub, ignore_errors=True)
        for name in ("manifest.json", "simulate_summary.json",
                     "vorticity_initial.csv", "vorticity_final.csv"):
            (out / name).unlink(missing_ok=True)
        raise

    failed = [r.name for r in all_reports if not r.passed]
    for r in all_reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: max_ratio={r.max_ratio:.6g} "
              f"fitted_constant={r.fitted_constant:.6g}")
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}",
              file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="corner-euler",
        description="Euler flow in corner domains via the disk Biot-Savart law")
    parser.add_argument("config", help="path to the JSON run configuration")
    parser.add_argument("--command", choices=COMMANDS,
                        help="override the command in the config")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker count recorded in the manifest")
    args = parser.parse_args(argv)

    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.command:
        config["command"] = args.command
    try:
        return run(config, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
