"""Focal quality metrics: peak location, FWHM, integrated force.

The peak is the sample of maximal |p| refined per axis by a three-point
parabola; FWHM is measured along a grid axis through a given point, with
half-maximum crossings linearly interpolated between bracketing samples.
Widths can be taken on pressure magnitude or on radiation pressure; the
latter is narrower (for a Gaussian spot by exactly sqrt(2)) because
radiation goes with |p|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .acoustics import FieldGrid
from .errors import MetricsError

_AXIS_NAMES = {0: "x", 1: "y", 2: "z"}


def axis_label(axis_vector):
    """Human label for a grid axis: x/y/z when world-aligned, else axisN."""
    v = np.asarray(axis_vector, dtype=float)
    for i, name in _AXIS_NAMES.items():
        e = np.zeros(3)
        e[i] = 1.0
        if np.allclose(v, e, atol=1e-9) or np.allclose(v, -e, atol=1e-9):
            return name
    return None


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle on a 2-D slice, in grid axis coordinates.

    Bounds are meters along ``axes[0]`` / ``axes[1]`` measured from the grid
    origin; a sample belongs to the region when its coordinate lies in
    [lo, hi) on both axes (midpoint rule with half-open cells).
    """

    u_bounds: tuple
    v_bounds: tuple

    def __post_init__(self):
        u = (float(self.u_bounds[0]), float(self.u_bounds[1]))
        v = (float(self.v_bounds[0]), float(self.v_bounds[1]))
        if not (u[0] < u[1] and v[0] < v[1]):
            raise MetricsError("region bounds must satisfy lo < hi")
        object.__setattr__(self, "u_bounds", u)
        object.__setattr__(self, "v_bounds", v)

    @classmethod
    def centered(cls, fieldgrid: FieldGrid, center, width_u, width_v):
        """Rectangle of the given widths centered on a world-space point."""
        rel = np.asarray(center, dtype=float) - fieldgrid.origin
        cu = float(rel @ fieldgrid.axes[0])
        cv = float(rel @ fieldgrid.axes[1])
        return cls((cu - width_u / 2.0, cu + width_u / 2.0),
                   (cv - width_v / 2.0, cv + width_v / 2.0))

    def as_dict(self):
        return {"u_bounds_m": list(self.u_bounds), "v_bounds_m": list(self.v_bounds)}


@dataclass(frozen=True)
class FocusMetrics:
    """Bundle of focal metrics as reported by the metrics JSON."""

    peak_position: np.ndarray
    peak_pressure: float
    fwhm: dict = field(default_factory=dict)
    integrated_force: float | None = None
    region: Region | None = None

    def as_dict(self):
        d = {
            "peak_position_m": [float(c) for c in self.peak_position],
            "peak_pressure_pa": float(self.peak_pressure),
            "fwhm_m": {k: float(v) for k, v in self.fwhm.items()},
        }
        if self.integrated_force is not None:
            d["force_n"] = float(self.integrated_force)
        if self.region is not None:
            d["region"] = self.region.as_dict()
        return d


def _parabola_refine(fm, f0, fp):
    """Vertex offset in [-0.5, 0.5] and value gain of the 3-point parabola."""
    a = 0.5 * (fm - 2.0 * f0 + fp)
    b = 0.5 * (fp - fm)
    if a >= 0.0 or abs(a) < 1e-300:  # flat or non-concave: keep the sample
        return 0.0, 0.0
    delta = -b / (2.0 * a)
    delta = min(0.5, max(-0.5, delta))
    return delta, -(b * b) / (4.0 * a)


def find_peak(fieldgrid: FieldGrid):
    """Location and value of the |p| maximum, sub-cell refined.

    Returns ``(position, value)``. Raises when the grid is too coarse
    (< 3 samples on some axis) or when all samples are equal within 1e-12
    relative, in which case there is no unique peak.
    """
    if any(e < 3 for e in fieldgrid.extents):
        raise MetricsError("peak search needs >= 3 samples per axis")
    mag = np.abs(fieldgrid.pressure)
    hi, lo = float(mag.max()), float(mag.min())
    if hi - lo <= 1e-12 * max(hi, 1e-300):
        raise MetricsError("no unique peak: field is constant")
    idx = np.unravel_index(int(np.argmax(mag)), mag.shape)
    value = float(mag[idx])
    offsets = []
    for a in range(fieldgrid.spec.ndim):
        i = idx[a]
        if 0 < i < fieldgrid.extents[a] - 1:
            sl = list(idx)
            sl[a] = slice(i - 1, i + 2)
            fm, f0, fp = mag[tuple(sl)]
            delta, gain = _parabola_refine(float(fm), float(f0), float(fp))
        else:
            delta, gain = 0.0, 0.0
        offsets.append(delta)
        value += gain
    position = fieldgrid.spec.position(np.asarray(idx, dtype=float) + np.asarray(offsets))
    return position, value


def _line_profile(fieldgrid: FieldGrid, axis, through, values):
    """Extract the sample line through ``through`` along grid axis ``axis``."""
    ndim = fieldgrid.spec.ndim
    if not 0 <= axis < ndim:
        raise MetricsError(f"axis must be in [0, {ndim - 1}]")
    rel = np.asarray(through, dtype=float) - fieldgrid.origin
    index = [0] * ndim
    for a in range(ndim):
        if a == axis:
            continue
        c = float(rel @ fieldgrid.axes[a]) / fieldgrid.spacing[a]
        j = int(round(c))
        if not 0 <= j <= fieldgrid.extents[a] - 1:
            raise MetricsError("line through the requested point misses the grid")
        index[a] = j
    index[axis] = slice(None)
    profile = values[tuple(index)]
    coords = fieldgrid.spec.axis_coords(axis)
    return coords, np.asarray(profile, dtype=float)


def _half_crossing(coords, profile, i_peak, half, direction):
    """Interpolated coordinate of the half-max crossing on one side."""
    i = i_peak
    while 0 <= i + direction < profile.size:
        j = i + direction
        if profile[j] < half:
            # crossing between i and j
            frac = (profile[i] - half) / (profile[i] - profile[j])
            return coords[i] + frac * (coords[j] - coords[i])
        i = j
    raise MetricsError("profile not resolved: half maximum not bracketed")


def fwhm_along(fieldgrid: FieldGrid, axis, through, quantity="radiation"):
    """Full width at half maximum along a grid axis through a point.

    ``quantity`` selects what the half maximum refers to: ``"pressure"``
    uses |p|, ``"radiation"`` uses the radiation-pressure map (or |p|^2 when
    radiation has not been populated; the width does not depend on the
    proportionality constant). The off-axis coordinates of ``through`` are
    snapped to the nearest sample line.
    """
    if quantity == "pressure":
        values = np.abs(fieldgrid.pressure)
    elif quantity == "radiation":
        values = fieldgrid.radiation if fieldgrid.radiation is not None \
            else np.abs(fieldgrid.pressure) ** 2
    else:
        raise MetricsError(f"unknown quantity {quantity!r}")
    coords, profile = _line_profile(fieldgrid, axis, through, values)
    if profile.size < 5:
        raise MetricsError("fwhm needs >= 5 samples along the axis")
    i_peak = int(np.argmax(profile))
    if i_peak in (0, profile.size - 1):
        raise MetricsError("profile not resolved: peak lies on the grid edge")
    half = profile[i_peak] / 2.0
    left = _half_crossing(coords, profile, i_peak, half, -1)
    right = _half_crossing(coords, profile, i_peak, half, +1)
    return float(right - left)


def integrate_force(fieldgrid: FieldGrid, region: Region):
    """Total force in newtons over a rectangle: sum radiation * cell area.

    Midpoint rule over samples whose coordinates fall in the half-open
    region bounds. The region must lie within the area the grid covers
    (each sample owns a half-spacing margin around itself).
    """
    if fieldgrid.radiation is None:
        raise MetricsError("radiation pressure not populated")
    if fieldgrid.spec.ndim != 2:
        raise MetricsError("force integration is defined on 2-D slices")
    su, sv = fieldgrid.spacing
    nu, nv = fieldgrid.extents
    (ulo, uhi), (vlo, vhi) = region.u_bounds, region.v_bounds
    if ulo < -su / 2 or vlo < -sv / 2 or uhi > (nu - 0.5) * su or vhi > (nv - 0.5) * sv:
        raise MetricsError("region extends outside the grid")
    u = fieldgrid.spec.axis_coords(0)
    v = fieldgrid.spec.axis_coords(1)
    mask_u = (u >= ulo) & (u < uhi)
    mask_v = (v >= vlo) & (v < vhi)
    cell = su * sv
    return float(fieldgrid.radiation[np.ix_(mask_u, mask_v)].sum() * cell)


def focus_metrics(fieldgrid: FieldGrid, quantity="radiation",
                  region: Region | None = None) -> FocusMetrics:
    """Peak, per-axis FWHM through the peak, and optional force in a region."""
    position, value = find_peak(fieldgrid)
    fwhm = {}
    for a in range(fieldgrid.spec.ndim):
        label = axis_label(fieldgrid.axes[a]) or f"axis{a}"
        try:
            fwhm[label] = fwhm_along(fieldgrid, a, position, quantity=quantity)
        except MetricsError:
            pass  # profile unresolved on this axis: omit rather than fail
    force = integrate_force(fieldgrid, region) if region is not None else None
    return FocusMetrics(peak_position=position, peak_pressure=value,
                        fwhm=fwhm, integrated_force=force, region=region)
