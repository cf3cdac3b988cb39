"""Reconstructed demo rig: four tilted devices focusing above a display.

The published setup gives device count (four), per-array tilt (20 degrees)
and the operating scale, but not exact placement. This module documents one
concrete reconstruction used for verification defaults:

- Each device is an 18 x 14 lattice at 10.16 mm pitch (typical for the
  device family; configuration, not a published value).
- The four devices sit side by side in a row along x (a seamless 72 x 14
  lattice); the whole rig is tilted 20 degrees about the x-axis, so device
  centers and normals are both rotated.
- The focus sits 210 mm above the rig center along world +z, i.e. 20
  degrees off the rig normal, matching arrays tilted to aim at a fingerpad
  in front of/above them.
- The evaluation slice is the world x-y plane through the focus, 60 x 60
  samples at 0.5 mm.

With this rig the focal spot is about 4.4 mm FWHM (radiation pressure)
across the row axis and much wider along y, which is consistent with the
published figure quoting only the x-width. None of this is ground truth; it
is one documented geometry consistent with the published scale, and every
number here can be overridden in the JSON config.
"""

from __future__ import annotations

import numpy as np

from .config import euler_to_matrix
from .geometry import DEFAULT_SOURCE_PRESSURE, DeviceSpec, build_array

DEMO_ROWS = 14          # elements along device-local y
DEMO_COLS = 18          # elements along device-local x
DEMO_PITCH = 10.16e-3
DEMO_TILT_DEG = 20.0
DEMO_FOCUS = (0.0, 0.0, 0.21)


def demo_device_positions():
    """Device centers before the rig tilt: a seamless 1 x 4 row along x."""
    w = DEMO_COLS * DEMO_PITCH
    return [((i - 1.5) * w, 0.0, 0.0) for i in range(4)]


def demo_devices():
    rig = euler_to_matrix([DEMO_TILT_DEG, 0.0, 0.0])
    return [
        DeviceSpec(rows=DEMO_ROWS, cols=DEMO_COLS, pitch=DEMO_PITCH,
                   rotation=rig, translation=rig @ np.asarray(c))
        for c in demo_device_positions()
    ]


def demo_layout(source_pressure=DEFAULT_SOURCE_PRESSURE):
    return build_array(demo_devices(), source_pressure=source_pressure)


def demo_config() -> dict:
    """The full JSON-serializable run configuration for the demo rig."""
    rig = euler_to_matrix([DEMO_TILT_DEG, 0.0, 0.0])
    devices = []
    for c in demo_device_positions():
        devices.append({
            "rows": DEMO_ROWS,
            "cols": DEMO_COLS,
            "pitch_m": DEMO_PITCH,
            "position_m": [float(x) for x in rig @ np.asarray(c)],
            "euler_deg": [DEMO_TILT_DEG, 0.0, 0.0],
        })
    focus = list(DEMO_FOCUS)
    return {
        "layout": {
            "source_pressure_pa_m": DEFAULT_SOURCE_PRESSURE,
            "devices": devices,
            "mirror": None,
        },
        "medium": {
            "speed_of_sound_m_s": 340.0,
            "density_kg_m3": 1.2,
            "carrier_frequency_hz": 40e3,
        },
        "directivity": {"kind": "piston", "aperture_radius_m": 4.5e-3},
        "field": {
            "focus_m": focus,
            "grid": {
                "center_m": focus,
                "u_axis": [1.0, 0.0, 0.0],
                "v_axis": [0.0, 1.0, 0.0],
                "extents": [60, 60],
                "spacing_m": 0.5e-3,
            },
            "radiation_reflection_factor": 2.0,
            "metrics_region_m": [0.02, 0.02],
        },
        "schedule": {
            "type": "lm",
            "control_rate_hz": 1000.0,
            "quantize_bits": 8,
            "trajectory": {
                "center_m": focus,
                "u_axis": [1.0, 0.0, 0.0],
                "v_axis": [0.0, 1.0, 0.0],
                "r_x_m": 0.0,
                "r_y_m": 3e-3,
                "lm_frequency_hz": 5.0,
                "step_width_m": 0.2e-3,
            },
            "am": {"frequency_hz": 100.0, "waveform": "sine", "depth": 1.0},
        },
        "verify": {"points": 1000, "seed": 0},
    }
