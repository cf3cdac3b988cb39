"""Command-line front end.

Subcommands: ``field`` (simulate a slice, export CSV/PGM/metrics),
``schedule`` (compile a stimulus into frame files), ``metrics`` (field
metrics only) and ``verify`` (run the oracle/invariant suite against a
config). One JSON config drives everything; a handful of flags override
config values. Exit codes: 0 success, 2 config/validation error, 3
runtime or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from . import config as cfgmod
from . import io as iomod
from .acoustics import field_on_grid, pressure_at, pressure_at_many, radiation_pressure
from .errors import ConfigError, MetricsError, SingularityError
from .geometry import ArrayLayout, mirror_image
from .metrics import Region, focus_metrics
from .modulation import compile_am, compile_lm, ellipse_perimeter, sample_trajectory
from .phasing import PhasePlan, quantize_phases, solve_focus, wrap_phase


def _parser():
    p = argparse.ArgumentParser(prog="airhaptics",
                                description="airborne ultrasound haptics simulator")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("field", "simulate the focal field and export it"),
                        ("schedule", "compile a modulation schedule"),
                        ("metrics", "compute focal metrics only"),
                        ("verify", "run the verification suite")):
        c = sub.add_parser(name, help=help_)
        c.add_argument("--config", required=True, help="path to the JSON run config")
        c.add_argument("--out", default="out", help="output directory (default: ./out)")
        c.add_argument("--threads", type=int, default=1, help="field evaluation workers")
        c.add_argument("--quantize-bits", type=int, default=None,
                       help="override schedule phase quantization (bits)")
        c.add_argument("--seed", type=int, default=None,
                       help="seed for randomized verification checks")
    return p


def _load(args):
    cfg = cfgmod.load_config(args.config)
    return cfg, cfgmod.config_hash(cfg)


def _build_field(cfg, threads):
    layout = cfgmod.build_layout(cfg)
    medium = cfgmod.build_medium(cfg)
    directivity = cfgmod.build_directivity(cfg)
    focus, factor, region_widths, phasing = cfgmod.field_options(cfg)
    grid = cfgmod.build_grid(cfg)
    plan = solve_focus(layout, focus, medium, reflection_phasing=phasing)
    field = field_on_grid(layout, plan, grid, medium, directivity, threads=threads)
    field = radiation_pressure(field, medium, reflection_factor=factor)
    return layout, medium, directivity, plan, field, focus, region_widths


def _field_metrics(field, focus, region_widths):
    region = Region.centered(field, focus, *region_widths)
    return focus_metrics(field, quantity="radiation", region=region)


def cmd_field(args) -> int:
    cfg, h = _load(args)
    layout, medium, directivity, plan, field, focus, region_widths = \
        _build_field(cfg, args.threads)
    os.makedirs(args.out, exist_ok=True)
    iomod.write_field_csv(field, os.path.join(args.out, "field.csv"), config_hash=h)
    norm = None
    if field.spec.ndim == 2:
        norm = iomod.write_field_pgm(field, os.path.join(args.out, "field.pgm"),
                                     config_hash=h)
    else:
        print("warning: PGM omitted (3-D grid)", file=sys.stderr)
    iomod.write_field_sidecar(field, os.path.join(args.out, "field.json"),
                              normalization=norm, config_hash=h)
    iomod.write_plan_csv(plan, layout, os.path.join(args.out, "plan.csv"), config_hash=h)
    try:
        metrics = _field_metrics(field, focus, region_widths)
    except MetricsError as e:
        print(f"warning: metrics omitted ({e})", file=sys.stderr)
        return 0
    iomod.write_metrics_json(metrics, os.path.join(args.out, "metrics.json"), config_hash=h)
    print(f"field: {field.extents} samples -> {args.out}/field.csv, field.pgm")
    for label, value in metrics.fwhm.items():
        print(f"fwhm_{label}: {value * 1e3:.3f} mm")
    print(f"peak |p|: {metrics.peak_pressure:.1f} Pa at "
          f"{np.array2string(metrics.peak_position, precision=4)}")
    if metrics.integrated_force is not None:
        print(f"force over region: {metrics.integrated_force * 1e3:.2f} mN")
    return 0


def cmd_metrics(args) -> int:
    cfg, h = _load(args)
    _, _, _, _, field, focus, region_widths = _build_field(cfg, args.threads)
    metrics = _field_metrics(field, focus, region_widths)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "metrics.json")
    iomod.write_metrics_json(metrics, path, config_hash=h)
    with open(path) as f:
        print(f.read(), end="")
    return 0


def cmd_schedule(args) -> int:
    cfg, h = _load(args)
    layout = cfgmod.build_layout(cfg)
    medium = cfgmod.build_medium(cfg)
    kind, control_rate, bits = cfgmod.schedule_options(cfg)
    if args.quantize_bits is not None:
        bits = args.quantize_bits
    if kind == "lm":
        traj = cfgmod.build_trajectory(cfg)
        seq = sample_trajectory(traj)
        schedule = compile_lm(layout, seq, medium, control_rate, quantize_bits=bits)
        print(f"perimeter: {ellipse_perimeter(traj.r_x, traj.r_y) * 1e3:.4f} mm")
        print(f"points: {len(seq)}")
        print(f"dwell: {seq.dwell * 1e3:.6f} ms")
        print(f"period: {seq.period:.6f} s")
    else:
        env = cfgmod.build_am_envelope(cfg)
        focus, _, _, phasing = cfgmod.field_options(cfg)
        schedule = compile_am(layout, focus, env, medium, control_rate,
                              quantize_bits=bits, reflection_phasing=phasing)
        print(f"am: {env.waveform} at {env.am_frequency} Hz, depth {env.depth}")
        print(f"period: {1.0 / env.am_frequency:.6f} s")
    print(f"frames: {len(schedule)} at {control_rate} Hz")
    os.makedirs(args.out, exist_ok=True)
    iomod.write_schedule_binary(schedule, os.path.join(args.out, "schedule.fsch"))
    iomod.write_schedule_csv(schedule, os.path.join(args.out, "schedule.csv"), config_hash=h)
    return 0


def _verify_checks(cfg, args):
    """Yield (name, tolerance, observed, passed) rows for the suite."""
    layout = cfgmod.build_layout(cfg)
    medium = cfgmod.build_medium(cfg)
    directivity = cfgmod.build_directivity(cfg)
    focus, factor, _, phasing = cfgmod.field_options(cfg)
    plan = solve_focus(layout, focus, medium, reflection_phasing=phasing)
    seed = args.seed if args.seed is not None else int(cfg.get("verify", {}).get("seed", 0))
    n_points = int(cfg.get("verify", {}).get("points", 1000))
    rng = np.random.default_rng(seed)

    span = 0.04
    pts = np.asarray(focus) + rng.uniform(-span, span, size=(n_points, 3))

    # optimized vs naive summation
    opt = pressure_at_many(layout, plan, pts, medium, directivity, threads=args.threads)
    naive = np.array([pressure_at(layout, plan, p, medium, directivity) for p in pts])
    err = float(np.max(np.abs(opt - naive) / np.abs(naive)))
    yield "oracle_vs_optimized", 1e-9, err, err <= 1e-9

    # global phase invariance
    shifted = np.mod(plan.phases + 1.234, 2 * np.pi)
    plan2 = PhasePlan(phases=shifted, amplitudes=plan.amplitudes)
    p2 = pressure_at_many(layout, plan2, pts[:100], medium, directivity)
    base = pressure_at_many(layout, plan, pts[:100], medium, directivity)
    err = float(np.max(np.abs(np.abs(p2) - np.abs(base)) / np.abs(base)))
    yield "global_phase_invariance", 1e-12, err, err <= 1e-12

    # focusing alignment at the commanded focus (argument spread of terms)
    r = np.linalg.norm(layout.positions - np.asarray(focus), axis=1)
    args_ = wrap_phase(medium.wavenumber * r + plan.phases)
    spread = float(np.max(np.minimum(args_, 2 * np.pi - args_)))
    if phasing == "per_source" or not layout.has_images:
        yield "focus_phase_alignment", 1e-9, spread, spread <= 1e-9

    # quantization coherence
    q = quantize_phases(plan, 8)
    pq = abs(pressure_at(layout, q, focus, medium, directivity))
    pu = abs(pressure_at(layout, plan, focus, medium, directivity))
    ratio = pq / pu
    yield "quantization_coherence_8bit", 0.999, ratio, ratio >= 0.999

    # mirror superposition identity, when a mirror is configured
    plane = cfgmod.build_mirror_plane(cfg)
    if plane is not None and layout.has_images:
        n = len(layout) // 2
        direct = ArrayLayout(
            positions=layout.positions[:n], normals=layout.normals[:n],
            gains=layout.gains[:n], source_pressures=layout.source_pressures[:n],
            device_index=layout.device_index[:n], is_image=layout.is_image[:n])
        image = mirror_image(direct, plane)
        above = pts[plane.signed_distance(pts) > 1e-3][:100]
        plan_d = PhasePlan(phases=plan.phases[:n], amplitudes=plan.amplitudes[:n])
        plan_i = PhasePlan(phases=plan.phases[n:], amplitudes=plan.amplitudes[n:])
        full = pressure_at_many(layout, plan, above, medium, directivity)
        parts = (pressure_at_many(direct, plan_d, above, medium, directivity)
                 + pressure_at_many(image, plan_i, above, medium, directivity))
        err = float(np.max(np.abs(full - parts) / np.abs(full)))
        yield "mirror_superposition", 1e-12, err, err <= 1e-12

    # trajectory closure, when a trajectory is configured
    try:
        traj = cfgmod.build_trajectory(cfg)
    except ConfigError:
        traj = None
    if traj is not None:
        seq = sample_trajectory(traj)
        worst = float(seq.spacings().max())
        yield "trajectory_step_bound", traj.step_width, worst, worst <= traj.step_width + 1e-12
        total = len(seq) * seq.dwell
        err = abs(total - seq.period)
        yield "trajectory_period", 1e-9, err, err <= 1e-9

    # recompute any previously exported field and compare
    field_csv = os.path.join(args.out, "field.csv")
    if os.path.exists(field_csv):
        grid = cfgmod.build_grid(cfg)
        field = field_on_grid(layout, plan, grid, medium, directivity, threads=args.threads)
        field = radiation_pressure(field, medium, reflection_factor=factor)
        with tempfile.NamedTemporaryFile("w+", suffix=".csv", delete=False) as tmp:
            pass
        try:
            iomod.write_field_csv(field, tmp.name, config_hash=cfgmod.config_hash(cfg))
            with open(tmp.name) as f1, open(field_csv) as f2:
                match = f1.read() == f2.read()
        finally:
            os.unlink(tmp.name)
        yield "field_file_recompute", "exact", 0.0 if match else 1.0, match


def cmd_verify(args) -> int:
    cfg, _ = _load(args)
    rows = list(_verify_checks(cfg, args))
    width = max(len(r[0]) for r in rows)
    all_ok = True
    print(f"{'check':<{width}}  {'tolerance':>12}  {'observed':>14}  status")
    for name, tol, observed, ok in rows:
        all_ok &= ok
        tol_s = tol if isinstance(tol, str) else f"{tol:g}"
        print(f"{name:<{width}}  {tol_s:>12}  {observed:>14.6g}  {'pass' if ok else 'FAIL'}")
    return 0 if all_ok else 3


_COMMANDS = {"field": cmd_field, "schedule": cmd_schedule,
             "metrics": cmd_metrics, "verify": cmd_verify}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SingularityError, MetricsError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
