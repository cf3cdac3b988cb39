"""Stimulus patterns: focal trajectories, AM envelopes, frame schedules.

A lateral-modulation stimulus sweeps the focus around a closed elliptical
trajectory once per modulation period, with the spatial step between
consecutive focus positions capped at a configured width (0.2 mm scale).
The degenerate case r_x = 0 is a line swept down and back, a closed loop of
path length 4 r_y. Trajectories are sampled uniformly in arc length and
compiled into per-transducer phase frames at a fixed control rate with
zero-order hold; amplitude modulation instead holds the focus and shapes the
amplitude envelope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import ellipe, ellipeinc

from .errors import ConfigError
from .phasing import quantize_phases, solve_focus

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class EllipseTrajectory:
    """Closed focal path: ellipse with radii r_x along u and r_y along v.

    ``u_axis`` and ``v_axis`` span the skin plane and must be orthonormal.
    r_x = 0 degenerates to a line along v (the sharp-edge stimulus); the
    sweep covers the whole loop once per 1/lm_frequency seconds with
    consecutive points at most ``step_width`` apart.
    """

    center: np.ndarray
    u_axis: np.ndarray
    v_axis: np.ndarray
    r_x: float
    r_y: float
    lm_frequency: float = 5.0
    step_width: float = 0.2e-3

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        u = np.asarray(self.u_axis, dtype=float).reshape(3)
        v = np.asarray(self.v_axis, dtype=float).reshape(3)
        for name, a in (("u_axis", u), ("v_axis", v)):
            if abs(np.linalg.norm(a) - 1.0) > 1e-9:
                raise ConfigError(f"{name} must be a unit vector")
        if abs(float(u @ v)) > 1e-9:
            raise ConfigError("u_axis and v_axis must be orthogonal")
        if self.r_x < 0 or self.r_y < 0:
            raise ConfigError("radii must be >= 0")
        if self.r_x == 0 and self.r_y == 0:
            raise ConfigError("radii must not both be zero: no path")
        if not self.lm_frequency > 0:
            raise ConfigError("lm_frequency must be > 0")
        if not self.step_width > 0:
            raise ConfigError("step_width must be > 0")
        for name, a in (("center", c), ("u_axis", u), ("v_axis", v)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def point(self, t):
        """Trajectory point(s) at parameter t (one loop over [0, 2pi))."""
        t = np.asarray(t, dtype=float)
        return (self.center
                + np.multiply.outer(self.r_x * np.cos(t), self.u_axis)
                + np.multiply.outer(self.r_y * np.sin(t), self.v_axis))


def _speed(r_x, r_y, t):
    return np.hypot(r_x * np.sin(t), r_y * np.cos(t))


def ellipse_perimeter(r_x, r_y):
    """Perimeter by adaptive quadrature of the speed over one quadrant.

    Handles the degenerate radii (line: 4 * max radius) through the same
    integral; absolute tolerance well under the 1e-9 m sampling requirement.
    """
    val, _ = quad(lambda t: _speed(r_x, r_y, t), 0.0, _HALF_PI,
                  epsabs=1e-13, epsrel=1e-13)
    return 4.0 * val


def _quadrant_arc(r_x, r_y, tau):
    """Arc length from a quadrant start over tau in [0, pi/2], exact form."""
    if r_y >= r_x:
        m = 1.0 - (r_x / r_y) ** 2
        return r_y * ellipeinc(tau, m)
    m = 1.0 - (r_y / r_x) ** 2
    return r_x * (ellipe(m) - ellipeinc(_HALF_PI - tau, m))


def arc_length(r_x, r_y, t):
    """Arc length along the ellipse from parameter 0 to t in [0, 2pi]."""
    q = min(int(t / _HALF_PI), 3)
    tau = t - q * _HALF_PI
    quarter = _quadrant_arc(r_x, r_y, _HALF_PI)
    # odd quadrants traverse the quadrant profile mirrored
    if q % 2 == 0:
        partial = _quadrant_arc(r_x, r_y, tau)
    else:
        partial = quarter - _quadrant_arc(r_x, r_y, _HALF_PI - tau)
    return q * quarter + partial


def _param_at_arc(r_x, r_y, s):
    """Invert arc_length: parameter t with arc_length(t) = s, via brentq."""
    quarter = _quadrant_arc(r_x, r_y, _HALF_PI)
    q = min(int(s / quarter), 3)
    s_rem = min(max(s - q * quarter, 0.0), quarter)
    if q % 2 == 0:
        f = lambda tau: _quadrant_arc(r_x, r_y, tau) - s_rem
    else:
        f = lambda tau: (quarter - _quadrant_arc(r_x, r_y, _HALF_PI - tau)) - s_rem
    if f(0.0) >= 0.0:
        tau = 0.0
    elif f(_HALF_PI) <= 0.0:
        tau = _HALF_PI
    else:
        tau = brentq(f, 0.0, _HALF_PI, xtol=1e-15, rtol=8.9e-16)
    return q * _HALF_PI + tau


@dataclass(frozen=True)
class FocusSequence:
    """Arc-length-quantized focus points with uniform per-point dwell."""

    points: np.ndarray
    dwell: float
    period: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise ConfigError("points must have shape (n, 3) with n >= 1")
        if not self.dwell > 0 or not self.period > 0:
            raise ConfigError("dwell and period must be > 0")
        if abs(pts.shape[0] * self.dwell - self.period) > 1e-9:
            raise ConfigError("dwell * point count must equal the period within 1e-9 s")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def lm_frequency(self):
        return 1.0 / self.period

    def spacings(self):
        """Consecutive point distances including the last-to-first wrap."""
        return np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)


def sample_trajectory(t: EllipseTrajectory) -> FocusSequence:
    """Discretize a trajectory into arc-length-uniform focus points.

    The point count is ceil(perimeter / step_width), so consecutive arc
    spacing (and hence chord spacing) never exceeds the requested step; an
    exact integer ratio is snapped before the ceiling so float noise cannot
    add a spurious extra point.
    """
    L = ellipse_perimeter(t.r_x, t.r_y)
    ratio = L / t.step_width
    if abs(ratio - round(ratio)) < 1e-9 * max(1.0, abs(ratio)):
        n = max(1, int(round(ratio)))
    else:
        n = max(1, int(math.ceil(ratio)))
    targets = np.arange(n) * (L / n)
    params = np.array([_param_at_arc(t.r_x, t.r_y, s) for s in targets])
    period = 1.0 / t.lm_frequency
    return FocusSequence(points=t.point(params), dwell=period / n, period=period)


@dataclass(frozen=True)
class AmEnvelope:
    """Amplitude envelope: sine or square at am_frequency, modulation depth
    in [0, 1] (0 = steady drive, 1 = full on/off)."""

    am_frequency: float
    waveform: str = "sine"
    depth: float = 1.0

    def __post_init__(self):
        if not self.am_frequency > 0:
            raise ConfigError("am_frequency must be > 0")
        if self.waveform not in ("sine", "square"):
            raise ConfigError(f"waveform must be 'sine' or 'square', got {self.waveform!r}")
        if not 0.0 <= self.depth <= 1.0:
            raise ConfigError("depth must lie in [0, 1]")

    def amplitude(self, times, period_frames=None, frame_index=None):
        """Envelope amplitude at the given times.

        Square edges are placed by frame index when ``period_frames`` and
        ``frame_index`` are given, keeping the half-period split exact.
        """
        times = np.asarray(times, dtype=float)
        if self.waveform == "sine":
            return 1.0 - self.depth / 2.0 + (self.depth / 2.0) * np.sin(
                2.0 * math.pi * self.am_frequency * times)
        if period_frames is not None and frame_index is not None:
            first_half = 2 * np.asarray(frame_index) < period_frames
        else:
            frac = np.mod(times * self.am_frequency, 1.0)
            first_half = frac < 0.5
        return np.where(first_half, 1.0, 1.0 - self.depth)


@dataclass(frozen=True)
class FrameSchedule:
    """Time-stamped per-transducer phase/amplitude frames at a fixed rate."""

    control_rate: float
    timestamps: np.ndarray
    phases: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        if not self.control_rate > 0:
            raise ConfigError("control_rate must be > 0")
        ts = np.asarray(self.timestamps, dtype=float)
        ph = np.asarray(self.phases, dtype=float)
        am = np.asarray(self.amplitudes, dtype=float)
        if ts.ndim != 1 or ph.ndim != 2 or ph.shape[0] != ts.size:
            raise ConfigError("phases must have shape (n_frames, n_transducers)")
        if am.shape != ph.shape:
            raise ConfigError("amplitudes must match phases in shape")
        if ts.size > 1:
            dt = np.diff(ts)
            if np.any(dt <= 0):
                raise ConfigError("timestamps must be strictly increasing")
            if np.any(np.abs(dt - 1.0 / self.control_rate) > 1e-12):
                raise ConfigError("timestamp spacing must equal 1/control_rate within 1e-12 s")
        for name, a in (("timestamps", ts), ("phases", ph), ("amplitudes", am)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.timestamps.size

    @property
    def n_transducers(self):
        return self.phases.shape[1]

    def frame(self, i):
        return self.timestamps[i], self.phases[i], self.amplitudes[i]


def compile_lm(layout, seq: FocusSequence, medium, control_rate,
               quantize_bits=None, reflection_phasing="per_source") -> FrameSchedule:
    """Compile a focus sequence into one period of phase frames.

    Frame k (time k / control_rate) carries the focusing phases of the
    sequence point whose dwell interval covers that time; the hold pattern is
    computed in integer arithmetic so it is exactly reproducible. Amplitudes
    are all 1.
    """
    n = len(seq)
    min_rate = n * seq.lm_frequency
    if control_rate < min_rate * (1.0 - 1e-12):
        raise ConfigError(
            f"control_rate {control_rate} Hz too low: need at least one frame per "
            f"focus point, i.e. {min_rate} Hz")
    n_frames = max(1, int(round(control_rate * seq.period)))
    plans = [solve_focus(layout, p, medium, reflection_phasing=reflection_phasing)
             for p in seq.points]
    if quantize_bits is not None:
        plans = [quantize_phases(p, quantize_bits) for p in plans]
    point_phases = np.stack([p.phases for p in plans])
    hold_index = (np.arange(n_frames) * n) // n_frames
    return FrameSchedule(
        control_rate=float(control_rate),
        timestamps=np.arange(n_frames) / float(control_rate),
        phases=point_phases[hold_index],
        amplitudes=np.ones((n_frames, len(layout))),
    )


def compile_am(layout, focus, env: AmEnvelope, medium, control_rate,
               quantize_bits=None, reflection_phasing="per_source") -> FrameSchedule:
    """Compile one AM period: fixed focusing phases, envelope amplitudes."""
    if control_rate < 10.0 * env.am_frequency * (1.0 - 1e-12):
        raise ConfigError(
            f"control_rate {control_rate} Hz too low: need >= 10x the AM "
            f"frequency, i.e. {10.0 * env.am_frequency} Hz")
    plan = solve_focus(layout, focus, medium, reflection_phasing=reflection_phasing)
    if quantize_bits is not None:
        plan = quantize_phases(plan, quantize_bits)
    n_frames = max(1, int(round(control_rate / env.am_frequency)))
    k = np.arange(n_frames)
    times = k / float(control_rate)
    amps = env.amplitude(times, period_frames=n_frames, frame_index=k)
    return FrameSchedule(
        control_rate=float(control_rate),
        timestamps=times,
        phases=np.tile(plan.phases, (n_frames, 1)),
        amplitudes=np.repeat(amps[:, None], len(layout), axis=1),
    )
