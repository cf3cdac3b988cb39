"""Airborne ultrasound phased-array haptics: field simulation and scheduling.

The package splits into construction (:mod:`~airhaptics.geometry`), field
evaluation (:mod:`~airhaptics.acoustics`), focusing
(:mod:`~airhaptics.phasing`), stimulus compilation
(:mod:`~airhaptics.modulation`), field metrics (:mod:`~airhaptics.metrics`)
and file formats (:mod:`~airhaptics.io`); :mod:`~airhaptics.cli` ties them
to a JSON run configuration.
"""

from .acoustics import (FieldGrid, GridSpec, Medium, Omni, Piston,
                        TableDirectivity, directivity_gain, field_on_grid,
                        pressure_at, pressure_at_many, radiation_pressure)
from .errors import ConfigError, MetricsError, SingularityError
from .geometry import (DEFAULT_SOURCE_PRESSURE, ArrayLayout, DeviceSpec,
                       MirrorPlane, TransducerPose, apply_mirror, build_array,
                       mirror_image)
from .metrics import (FocusMetrics, Region, find_peak, focus_metrics,
                      fwhm_along, integrate_force)
from .modulation import (AmEnvelope, EllipseTrajectory, FocusSequence,
                         FrameSchedule, arc_length, compile_am, compile_lm,
                         ellipse_perimeter, sample_trajectory)
from .phasing import PhasePlan, quantize_phases, solve_focus, uniform_plan

__version__ = "0.1.0"

__all__ = [
    "AmEnvelope", "ArrayLayout", "ConfigError", "DEFAULT_SOURCE_PRESSURE",
    "DeviceSpec", "EllipseTrajectory", "FieldGrid", "FocusMetrics",
    "FocusSequence", "FrameSchedule", "GridSpec", "Medium", "MetricsError",
    "MirrorPlane", "Omni", "PhasePlan", "Piston", "Region",
    "SingularityError", "TableDirectivity", "TransducerPose", "apply_mirror",
    "arc_length", "build_array", "compile_am", "compile_lm",
    "directivity_gain", "ellipse_perimeter", "field_on_grid", "find_peak",
    "focus_metrics", "fwhm_along", "integrate_force", "mirror_image",
    "pressure_at", "pressure_at_many", "quantize_phases",
    "radiation_pressure", "sample_trajectory", "solve_focus", "uniform_plan",
]
