"""File formats: field CSV/PGM, phase-plan CSV, schedule binary and CSV.

All writers are deterministic byte-for-byte for identical inputs: floats are
rendered with %.17g (lossless round-trip), JSON is emitted with sorted keys,
and the PGM is binary P5. Outputs carry the originating config hash when one
is supplied, so golden files are traceable to their configuration.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .acoustics import FieldGrid, GridSpec
from .errors import ConfigError
from .modulation import FrameSchedule

SCHEDULE_MAGIC = b"FSCH"
SCHEDULE_VERSION = 1
_HEADER = struct.Struct("<4sIdII")  # magic, version, control_rate, n_transducers, n_frames


def _fmt(x):
    return "%.17g" % float(x)


def write_field_csv(fieldgrid: FieldGrid, path, config_hash=None):
    """Field samples as x_m,y_m,z_m,re_pa,im_pa,abs_pa,radiation_pa rows."""
    pts = fieldgrid.spec.points()
    p = fieldgrid.pressure.ravel()
    rad = fieldgrid.radiation.ravel() if fieldgrid.radiation is not None \
        else np.full(p.size, np.nan)
    lines = []
    if config_hash:
        lines.append(f"# config_sha256={config_hash}")
    lines.append("x_m,y_m,z_m,re_pa,im_pa,abs_pa,radiation_pa")
    for i in range(p.size):
        row = (pts[i, 0], pts[i, 1], pts[i, 2], p[i].real, p[i].imag, abs(p[i]), rad[i])
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_field_pgm(fieldgrid: FieldGrid, path, config_hash=None):
    """8-bit PGM of normalized |p| for quick visual inspection (2-D grids).

    Column = axis-0 index, rows run top-down with increasing axis-1
    coordinate pointing up. Returns the normalization maximum.
    """
    if fieldgrid.spec.ndim != 2:
        raise ConfigError("PGM export is defined for 2-D grids")
    mag = np.abs(fieldgrid.pressure)
    peak = float(mag.max())
    norm = mag / peak if peak > 0 else mag
    img = np.rint(255.0 * norm.T[::-1, :]).astype(np.uint8)
    header = b"P5\n"
    if config_hash:
        header += b"# config_sha256=" + config_hash.encode() + b"\n"
    header += b"%d %d\n255\n" % (img.shape[1], img.shape[0])
    with open(path, "wb") as f:
        f.write(header + img.tobytes())
    return peak


def grid_spec_dict(spec: GridSpec):
    return {
        "origin_m": [float(c) for c in spec.origin],
        "axes": [[float(c) for c in a] for a in spec.axes],
        "extents": list(spec.extents),
        "spacing_m": list(spec.spacing),
    }


def write_field_sidecar(fieldgrid: FieldGrid, path, normalization=None, config_hash=None):
    """JSON sidecar recording grid spec and PGM normalization."""
    doc = {"grid": grid_spec_dict(fieldgrid.spec)}
    if normalization is not None:
        doc["normalization"] = {"max_abs_pressure_pa": float(normalization)}
    if config_hash:
        doc["config_sha256"] = config_hash
    _write_json(doc, path)


def _write_json(doc, path):
    with open(path, "w", newline="\n") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def write_metrics_json(metrics, path, config_hash=None):
    doc = metrics.as_dict()
    if config_hash:
        doc["config_sha256"] = config_hash
    _write_json(doc, path)


def write_plan_csv(plan, layout, path, config_hash=None):
    """Phase plan as index,device,phase_rad,amplitude rows."""
    lines = []
    if config_hash:
        lines.append(f"# config_sha256={config_hash}")
    lines.append("index,device,phase_rad,amplitude")
    for i in range(len(plan)):
        lines.append("%d,%d,%s,%s" % (i, layout.device_index[i],
                                      _fmt(plan.phases[i]), _fmt(plan.amplitudes[i])))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_schedule_binary(schedule: FrameSchedule, path):
    """Binary frame schedule.

    Little-endian header {magic "FSCH", version u32, control_rate_hz f64,
    transducer_count u32, frame_count u32} followed by frame_count records of
    {timestamp f64, phases f32[count] rad, amplitudes f32[count]}.
    """
    n_frames, n_tr = schedule.phases.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(SCHEDULE_MAGIC, SCHEDULE_VERSION,
                             schedule.control_rate, n_tr, n_frames))
        for i in range(n_frames):
            f.write(struct.pack("<d", schedule.timestamps[i]))
            f.write(schedule.phases[i].astype("<f4").tobytes())
            f.write(schedule.amplitudes[i].astype("<f4").tobytes())


def read_schedule_binary(path) -> FrameSchedule:
    with open(path, "rb") as f:
        raw = f.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ConfigError(f"{path}: truncated schedule header")
        magic, version, rate, n_tr, n_frames = _HEADER.unpack(raw)
        if magic != SCHEDULE_MAGIC:
            raise ConfigError(f"{path}: bad magic {magic!r}")
        if version != SCHEDULE_VERSION:
            raise ConfigError(f"{path}: unsupported schedule version {version}")
        timestamps = np.empty(n_frames)
        phases = np.empty((n_frames, n_tr))
        amps = np.empty((n_frames, n_tr))
        rec = 8 + 2 * 4 * n_tr
        for i in range(n_frames):
            chunk = f.read(rec)
            if len(chunk) < rec:
                raise ConfigError(f"{path}: truncated at frame {i}")
            (timestamps[i],) = struct.unpack_from("<d", chunk, 0)
            row = np.frombuffer(chunk, dtype="<f4", count=2 * n_tr, offset=8)
            phases[i] = row[:n_tr]
            amps[i] = row[n_tr:]
    return FrameSchedule(control_rate=rate, timestamps=timestamps,
                         phases=phases, amplitudes=amps)


def write_schedule_csv(schedule: FrameSchedule, path, config_hash=None):
    """Lossless long-format CSV: frame,timestamp_s,transducer,phase_rad,amplitude."""
    lines = []
    if config_hash:
        lines.append(f"# config_sha256={config_hash}")
    lines.append("frame,timestamp_s,transducer,phase_rad,amplitude")
    for i in range(len(schedule)):
        t = _fmt(schedule.timestamps[i])
        for j in range(schedule.n_transducers):
            lines.append("%d,%s,%d,%s,%s" % (i, t, j, _fmt(schedule.phases[i, j]),
                                             _fmt(schedule.amplitudes[i, j])))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
