"""Focusing: per-transducer phases that align all contributions at a point.

Conjugate-distance phasing sets phi_i = (-k |x_i - f|) mod 2pi so that every
term of the pressure sum arrives at the focus with identical argument, which
maximizes |p(f)| for fixed unit amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .acoustics import MIN_SOURCE_DISTANCE, Medium
from .errors import ConfigError, SingularityError
from .geometry import ArrayLayout

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhasePlan:
    """Per-transducer drive state: phase in [0, 2pi) and amplitude in [0, 1]."""

    phases: np.ndarray
    amplitudes: np.ndarray
    focus_hint: np.ndarray | None = None

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        am = np.asarray(self.amplitudes, dtype=float)
        if ph.ndim != 1 or am.shape != ph.shape:
            raise ConfigError("phases and amplitudes must be 1-d arrays of equal length")
        if np.any(ph < 0) or np.any(ph >= TWO_PI):
            raise ConfigError("phases must be wrapped to [0, 2pi)")
        if np.any(am < 0) or np.any(am > 1):
            raise ConfigError("amplitudes must lie in [0, 1]")
        ph.setflags(write=False)
        am.setflags(write=False)
        object.__setattr__(self, "phases", ph)
        object.__setattr__(self, "amplitudes", am)
        if self.focus_hint is not None:
            object.__setattr__(self, "focus_hint",
                               np.asarray(self.focus_hint, dtype=float).reshape(3))

    def __len__(self):
        return self.phases.shape[0]


def wrap_phase(phi):
    """Wrap angle(s) to [0, 2pi)."""
    out = np.mod(phi, TWO_PI)
    # mod can return 2pi for tiny negative inputs via rounding
    return np.where(out >= TWO_PI, 0.0, out) if np.ndim(out) else (0.0 if out >= TWO_PI else float(out))


def uniform_plan(layout: ArrayLayout) -> PhasePlan:
    """Zero phases, unit amplitudes."""
    n = len(layout)
    return PhasePlan(phases=np.zeros(n), amplitudes=np.ones(n))


def solve_focus(layout: ArrayLayout, focus, medium: Medium,
                reflection_phasing="per_source") -> PhasePlan:
    """Conjugate-distance phase plan focusing the array at ``focus``.

    For layouts carrying image sources, ``reflection_phasing`` picks whose
    path length drives each real/image pair:

    - ``"per_source"``: every layout entry is phased from its own position
      (image sources automatically use their mirrored position, i.e. the
      via-mirror path length). Default.
    - ``"via_mirror"``: each real transducer takes its image's phase, so the
      pair is hardware-realizable and the reflected wave focuses.
    - ``"direct"``: each image takes its real parent's phase, modeling a
      drive that ignores the reflection.
    """
    f = np.asarray(focus, dtype=float).reshape(3)
    r = np.linalg.norm(layout.positions - f, axis=1)
    if np.any(r < MIN_SOURCE_DISTANCE):
        i = int(np.argmin(r))
        raise SingularityError(
            f"focus within {MIN_SOURCE_DISTANCE * 1e3:.0f} mm of source {i}")
    phases = np.mod(-medium.wavenumber * r, TWO_PI)
    phases[phases >= TWO_PI] = 0.0
    if layout.has_images and reflection_phasing != "per_source":
        n = len(layout) // 2
        if reflection_phasing == "via_mirror":
            phases[:n] = phases[n:]
        elif reflection_phasing == "direct":
            phases[n:] = phases[:n]
        else:
            raise ConfigError(f"unknown reflection_phasing {reflection_phasing!r}")
    elif reflection_phasing not in ("per_source", "via_mirror", "direct"):
        raise ConfigError(f"unknown reflection_phasing {reflection_phasing!r}")
    return PhasePlan(phases=phases, amplitudes=np.ones(len(layout)), focus_hint=f)


def quantize_phases(plan: PhasePlan, bits: int) -> PhasePlan:
    """Round each phase to the nearest step of the 2^bits-level lattice.

    Idempotent; phases stay wrapped (a value rounding up to 2pi wraps to 0).
    """
    if not isinstance(bits, (int, np.integer)) or not 1 <= bits <= 16:
        raise ConfigError(f"bits must be an integer in [1, 16], got {bits!r}")
    step = TWO_PI / (1 << bits)
    q = np.mod(np.round(plan.phases / step) * step, TWO_PI)
    q[q >= TWO_PI] = 0.0
    return PhasePlan(phases=q, amplitudes=plan.amplitudes, focus_hint=plan.focus_hint)
