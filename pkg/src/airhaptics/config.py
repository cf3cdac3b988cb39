"""JSON run configuration: parsing, validation, object construction, hashing.

One self-describing document drives every command. Layout geometry follows
the devices[]/mirror schema (rows, cols, pitch_m, position_m[3],
euler_deg[3]); the remaining sections configure the medium, directivity,
field grid, metrics region and stimulus schedule. Unknown keys are rejected
so typos fail loudly before any computation starts.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np
from scipy.spatial.transform import Rotation

from .acoustics import GridSpec, Medium, Omni, Piston, TableDirectivity
from .errors import ConfigError
from .geometry import (DEFAULT_SOURCE_PRESSURE, ArrayLayout, DeviceSpec,
                       MirrorPlane, apply_mirror, build_array)
from .modulation import AmEnvelope, EllipseTrajectory


def load_config(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from None


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON rendering; embedded in all outputs."""
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _require(section, key, where):
    if key not in section:
        raise ConfigError(f"missing key {key!r} in {where}")
    return section[key]


def _check_keys(section, allowed, where):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _vec3(x, where):
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ConfigError(f"{where} must be a 3-vector")
    return v


def euler_to_matrix(euler_deg):
    """Extrinsic x-y-z Euler angles in degrees to a rotation matrix."""
    return Rotation.from_euler("xyz", np.asarray(euler_deg, dtype=float),
                               degrees=True).as_matrix()


def build_layout(cfg: dict) -> ArrayLayout:
    section = _require(cfg, "layout", "config")
    _check_keys(section, {"devices", "mirror", "source_pressure_pa_m"}, "layout")
    source_pressure = float(section.get("source_pressure_pa_m", DEFAULT_SOURCE_PRESSURE))
    specs = []
    devices = _require(section, "devices", "layout")
    if not devices:
        raise ConfigError("layout.devices must not be empty")
    for i, dev in enumerate(devices):
        where = f"layout.devices[{i}]"
        _check_keys(dev, {"rows", "cols", "pitch_m", "position_m", "euler_deg"}, where)
        specs.append(DeviceSpec(
            rows=int(_require(dev, "rows", where)),
            cols=int(_require(dev, "cols", where)),
            pitch=float(_require(dev, "pitch_m", where)),
            rotation=euler_to_matrix(dev.get("euler_deg", [0.0, 0.0, 0.0])),
            translation=_vec3(dev.get("position_m", [0.0, 0.0, 0.0]), where + ".position_m"),
        ))
    layout = build_array(specs, source_pressure=source_pressure)
    mirror = section.get("mirror")
    if mirror is not None:
        _check_keys(mirror, {"point_m", "normal", "coefficient"}, "layout.mirror")
        plane = MirrorPlane(
            point=_vec3(_require(mirror, "point_m", "layout.mirror"), "mirror.point_m"),
            normal=_vec3(_require(mirror, "normal", "layout.mirror"), "mirror.normal"),
            coefficient=float(mirror.get("coefficient", 1.0)),
        )
        layout = apply_mirror(layout, plane)
    return layout


def build_mirror_plane(cfg: dict) -> MirrorPlane | None:
    mirror = cfg.get("layout", {}).get("mirror")
    if mirror is None:
        return None
    return MirrorPlane(point=_vec3(mirror["point_m"], "mirror.point_m"),
                       normal=_vec3(mirror["normal"], "mirror.normal"),
                       coefficient=float(mirror.get("coefficient", 1.0)))


def build_medium(cfg: dict) -> Medium:
    section = cfg.get("medium", {})
    _check_keys(section, {"speed_of_sound_m_s", "density_kg_m3", "carrier_frequency_hz"},
                "medium")
    return Medium(
        speed_of_sound=float(section.get("speed_of_sound_m_s", 340.0)),
        density=float(section.get("density_kg_m3", 1.2)),
        carrier_frequency=float(section.get("carrier_frequency_hz", 40e3)),
    )


def build_directivity(cfg: dict):
    section = cfg.get("directivity", {"kind": "piston"})
    kind = section.get("kind", "piston")
    if kind == "omni":
        _check_keys(section, {"kind"}, "directivity")
        return Omni()
    if kind == "piston":
        _check_keys(section, {"kind", "aperture_radius_m"}, "directivity")
        return Piston(aperture_radius=float(section.get("aperture_radius_m", 4.5e-3)))
    if kind == "table":
        _check_keys(section, {"kind", "angles_deg", "gains"}, "directivity")
        return TableDirectivity(_require(section, "angles_deg", "directivity"),
                                _require(section, "gains", "directivity"))
    raise ConfigError(f"unknown directivity kind {kind!r}")


def build_grid(cfg: dict) -> GridSpec:
    field = _require(cfg, "field", "config")
    section = _require(field, "grid", "field")
    _check_keys(section, {"center_m", "u_axis", "v_axis", "w_axis", "extents", "spacing_m"},
                "field.grid")
    axes = [_vec3(_require(section, "u_axis", "field.grid"), "grid.u_axis"),
            _vec3(_require(section, "v_axis", "field.grid"), "grid.v_axis")]
    if "w_axis" in section:
        axes.append(_vec3(section["w_axis"], "grid.w_axis"))
    return GridSpec.centered(
        center=_vec3(_require(section, "center_m", "field.grid"), "grid.center_m"),
        axes=np.asarray(axes),
        extents=_require(section, "extents", "field.grid"),
        spacing=section.get("spacing_m", 0.5e-3),
    )


def field_options(cfg: dict):
    field = _require(cfg, "field", "config")
    _check_keys(field, {"focus_m", "grid", "radiation_reflection_factor",
                        "metrics_region_m", "reflection_phasing"}, "field")
    focus = _vec3(_require(field, "focus_m", "field"), "field.focus_m")
    factor = float(field.get("radiation_reflection_factor", 2.0))
    region = field.get("metrics_region_m", [0.02, 0.02])
    if np.shape(region) != (2,):
        raise ConfigError("field.metrics_region_m must be [width_u, width_v]")
    phasing = field.get("reflection_phasing", "per_source")
    return focus, factor, (float(region[0]), float(region[1])), phasing


def build_trajectory(cfg: dict) -> EllipseTrajectory:
    sched = _require(cfg, "schedule", "config")
    section = _require(sched, "trajectory", "schedule")
    _check_keys(section, {"center_m", "u_axis", "v_axis", "r_x_m", "r_y_m",
                          "lm_frequency_hz", "step_width_m"}, "schedule.trajectory")
    return EllipseTrajectory(
        center=_vec3(_require(section, "center_m", "trajectory"), "trajectory.center_m"),
        u_axis=_vec3(section.get("u_axis", [1.0, 0.0, 0.0]), "trajectory.u_axis"),
        v_axis=_vec3(section.get("v_axis", [0.0, 1.0, 0.0]), "trajectory.v_axis"),
        r_x=float(_require(section, "r_x_m", "trajectory")),
        r_y=float(section.get("r_y_m", 3e-3)),
        lm_frequency=float(section.get("lm_frequency_hz", 5.0)),
        step_width=float(section.get("step_width_m", 0.2e-3)),
    )


def build_am_envelope(cfg: dict) -> AmEnvelope:
    sched = _require(cfg, "schedule", "config")
    section = _require(sched, "am", "schedule")
    _check_keys(section, {"frequency_hz", "waveform", "depth"}, "schedule.am")
    return AmEnvelope(
        am_frequency=float(_require(section, "frequency_hz", "schedule.am")),
        waveform=section.get("waveform", "sine"),
        depth=float(section.get("depth", 1.0)),
    )


def schedule_options(cfg: dict):
    sched = _require(cfg, "schedule", "config")
    _check_keys(sched, {"type", "control_rate_hz", "quantize_bits", "trajectory", "am"},
                "schedule")
    kind = sched.get("type", "lm")
    if kind not in ("lm", "am"):
        raise ConfigError(f"schedule.type must be 'lm' or 'am', got {kind!r}")
    rate = float(sched.get("control_rate_hz", 1000.0))
    bits = sched.get("quantize_bits", 8)
    bits = None if bits is None else int(bits)
    return kind, rate, bits
