"""Sound pressure and radiation pressure by direct summation.

Transducers are treated as point sources with a directivity factor: the
complex RMS pressure at a point x is

    p(x) = sum_i gain_i * amp_i * source_pressure_i * D(theta_i)
           * exp(j (k r_i + phi_i)) / r_i

with r_i the source distance in meters (reference distance 1 m) and theta_i
the angle off the element's emission axis. Two evaluation routes are
provided: :func:`pressure_at` is a deliberately naive pure-Python sum that
serves as the oracle, and :func:`pressure_at_many` / :func:`field_on_grid`
are the blocked, vectorized paths that production runs use. Radiation
pressure is the square-law transform of |p|.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import j1

from .errors import ConfigError, SingularityError
from .geometry import ArrayLayout

# Point-source model diverges at r = 0; anything under 1 mm is far below a
# meaningful evaluation distance for this geometry.
MIN_SOURCE_DISTANCE = 1e-3

# Evaluation points per vectorized block. Fixed (not tuned per thread count)
# so partial sums accumulate identically regardless of parallelism.
_BLOCK = 256


@dataclass(frozen=True)
class Medium:
    """Propagation medium and carrier; the wavenumber is always derived."""

    speed_of_sound: float = 340.0
    density: float = 1.2
    carrier_frequency: float = 40e3

    def __post_init__(self):
        for name in ("speed_of_sound", "density", "carrier_frequency"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")

    @property
    def wavenumber(self):
        return 2.0 * math.pi * self.carrier_frequency / self.speed_of_sound

    @property
    def wavelength(self):
        return self.speed_of_sound / self.carrier_frequency


class Directivity:
    """Base class; subclasses map off-axis angle theta (rad) to a gain."""

    def gain(self, theta, medium: Medium):
        raise NotImplementedError


class Omni(Directivity):
    def gain(self, theta, medium):
        return np.ones_like(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class Piston(Directivity):
    """Baffled circular piston: |2 J1(k a sin t) / (k a sin t)|, 1 at t = 0."""

    aperture_radius: float = 4.5e-3

    def __post_init__(self):
        if not self.aperture_radius > 0:
            raise ConfigError("piston aperture_radius must be > 0")

    def gain(self, theta, medium):
        theta = np.asarray(theta, dtype=float)
        x = medium.wavenumber * self.aperture_radius * np.sin(theta)
        out = np.ones_like(x)
        nz = np.abs(x) > 1e-12
        out[nz] = np.abs(2.0 * j1(x[nz]) / x[nz])
        return out


class TableDirectivity(Directivity):
    """Piecewise-linear datasheet curve over [0, 90] degrees.

    Angles must be strictly increasing within [0, 90] starting at 0 with gain
    1; beyond the last tabulated angle the last gain is held.
    """

    def __init__(self, angles_deg, gains):
        a = np.asarray(angles_deg, dtype=float)
        g = np.asarray(gains, dtype=float)
        if a.ndim != 1 or a.shape != g.shape or a.size < 2:
            raise ConfigError("directivity table needs matching 1-d angle/gain arrays")
        if np.any(np.diff(a) <= 0):
            raise ConfigError("directivity table angles must be strictly increasing")
        if a[0] != 0.0 or a[-1] > 90.0 or np.any(a < 0):
            raise ConfigError("directivity table angles must start at 0 and stay within [0, 90] deg")
        if np.any(g < 0) or np.any(g > 1) or g[0] != 1.0:
            raise ConfigError("directivity table gains must lie in [0, 1] with gain 1 at 0 deg")
        self.angles_deg = a
        self.gains = g

    def gain(self, theta, medium):
        deg = np.degrees(np.asarray(theta, dtype=float))
        return np.interp(deg, self.angles_deg, self.gains)


def directivity_gain(d: Directivity, theta, medium: Medium):
    """Gain of directivity model ``d`` at angle(s) ``theta`` off axis."""
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(theta_arr < -1e-12) or np.any(theta_arr > math.pi + 1e-12):
        raise ConfigError("theta must lie in [0, pi]")
    out = d.gain(theta_arr, medium)
    return float(out) if np.isscalar(theta) or np.ndim(theta) == 0 else out


def pressure_at(layout: ArrayLayout, plan, point, medium: Medium, d: Directivity) -> complex:
    """Complex pressure at one point by plain per-transducer summation.

    This is the oracle path: scalar Python arithmetic, one term per
    transducer, summed in index order. Vectorized evaluation must agree with
    it to 1e-9 relative magnitude.
    """
    px, py, pz = (float(c) for c in np.asarray(point, dtype=float))
    k = medium.wavenumber
    phases = plan.phases
    amps = plan.amplitudes
    total = 0j
    for i in range(len(layout)):
        x, y, z = layout.positions[i]
        dx, dy, dz = px - x, py - y, pz - z
        r = math.sqrt(dx * dx + dy * dy + dz * dz)
        if r < MIN_SOURCE_DISTANCE:
            raise SingularityError(
                f"evaluation point within {MIN_SOURCE_DISTANCE * 1e3:.0f} mm of source {i}"
            )
        nx, ny, nz_ = layout.normals[i]
        ct = (dx * nx + dy * ny + dz * nz_) / r
        theta = math.acos(min(1.0, max(-1.0, ct)))
        gain = float(directivity_gain(d, theta, medium))
        amp = layout.gains[i] * amps[i] * layout.source_pressures[i] * gain / r
        total += amp * cmath.exp(1j * (k * r + phases[i]))
    return total


def _pressure_block(layout, plan, pts, medium, d):
    """Vectorized sum over transducers for a (m, 3) block of points."""
    delta = pts[:, None, :] - layout.positions[None, :, :]
    r = np.linalg.norm(delta, axis=2)
    bad = r < MIN_SOURCE_DISTANCE
    if np.any(bad):
        idx = int(np.argwhere(bad)[0, 0])
        raise SingularityError(
            f"evaluation point within {MIN_SOURCE_DISTANCE * 1e3:.0f} mm of a source",
            sample_index=idx,
        )
    ct = np.einsum("mni,ni->mn", delta, layout.normals) / r
    theta = np.arccos(np.clip(ct, -1.0, 1.0))
    gain = d.gain(theta, medium)
    amp = (layout.gains * plan.amplitudes * layout.source_pressures)[None, :] * gain / r
    phase = medium.wavenumber * r + plan.phases[None, :]
    return np.sum(amp * np.exp(1j * phase), axis=1)


def pressure_at_many(layout, plan, points, medium, d, threads=1) -> np.ndarray:
    """Complex pressure at many points; optimized blocked summation.

    Points are processed in fixed-size blocks so results are bit-identical
    for any ``threads``; workers write disjoint slices of the output.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ConfigError("points must have shape (m, 3)")
    out = np.empty(pts.shape[0], dtype=complex)
    blocks = range(0, pts.shape[0], _BLOCK)

    def run(start):
        stop = min(start + _BLOCK, pts.shape[0])
        try:
            out[start:stop] = _pressure_block(layout, plan, pts[start:stop], medium, d)
            return None
        except SingularityError as e:
            return SingularityError(str(e), sample_index=start + e.sample_index)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = [e for e in pool.map(run, blocks) if e is not None]
    else:
        errors = []
        for start in blocks:
            e = run(start)
            if e is not None:
                errors.append(e)
                break
    if errors:
        raise min(errors, key=lambda e: e.sample_index)
    return out


@dataclass(frozen=True)
class GridSpec:
    """Rectilinear sampling grid embedded in 3-D.

    Sample ``(i_0, .., i_{A-1})`` sits at ``origin + sum_a i_a * spacing_a *
    axes[a]``; two axes give a planar slice, three a volume.
    """

    origin: np.ndarray
    axes: np.ndarray
    extents: tuple
    spacing: tuple

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        axes = np.atleast_2d(np.asarray(self.axes, dtype=float))
        if origin.shape != (3,):
            raise ConfigError("grid origin must be a 3-vector")
        if axes.shape[0] not in (2, 3) or axes.shape[1] != 3:
            raise ConfigError("grid needs two or three 3-vector axes")
        if not np.allclose(axes @ axes.T, np.eye(axes.shape[0]), atol=1e-9):
            raise ConfigError("grid axes must be mutually orthonormal")
        extents = tuple(int(e) for e in np.atleast_1d(self.extents))
        spacing = np.atleast_1d(np.asarray(self.spacing, dtype=float))
        if spacing.size == 1:
            spacing = np.repeat(spacing, axes.shape[0])
        spacing = tuple(float(s) for s in spacing)
        if len(extents) != axes.shape[0] or len(spacing) != axes.shape[0]:
            raise ConfigError("extents and spacing must match the number of axes")
        if any(e < 1 for e in extents):
            raise ConfigError("grid extents must be >= 1")
        if any(s <= 0 for s in spacing):
            raise ConfigError("grid spacing must be > 0")
        origin.setflags(write=False)
        axes.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def centered(cls, center, axes, extents, spacing):
        """Grid whose sample lattice is centered on ``center``."""
        axes = np.atleast_2d(np.asarray(axes, dtype=float))
        extents = tuple(int(e) for e in np.atleast_1d(extents))
        spacing = np.atleast_1d(np.asarray(spacing, dtype=float))
        if spacing.size == 1:
            spacing = np.repeat(spacing, axes.shape[0])
        origin = np.asarray(center, dtype=float).copy()
        for a in range(axes.shape[0]):
            origin -= (extents[a] - 1) / 2.0 * spacing[a] * axes[a]
        return cls(origin=origin, axes=axes, extents=extents, spacing=tuple(spacing))

    @property
    def ndim(self):
        return len(self.extents)

    @property
    def n_samples(self):
        return int(np.prod(self.extents))

    def axis_coords(self, a):
        """Coordinates along axis ``a`` in meters, relative to the origin."""
        return np.arange(self.extents[a]) * self.spacing[a]

    def points(self):
        """All sample positions, shape (n_samples, 3), C index order."""
        idx = np.indices(self.extents).reshape(self.ndim, -1).T
        pts = self.origin + sum(
            idx[:, a:a + 1] * self.spacing[a] * self.axes[a] for a in range(self.ndim)
        )
        return pts

    def position(self, index):
        index = np.atleast_1d(np.asarray(index))
        return self.origin + sum(
            float(index[a]) * self.spacing[a] * self.axes[a] for a in range(self.ndim)
        )


@dataclass(frozen=True)
class FieldGrid:
    """Sampled complex pressure (and derived radiation pressure) on a grid."""

    spec: GridSpec
    pressure: np.ndarray
    radiation: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.pressure, dtype=complex)
        if p.shape != self.spec.extents:
            raise ConfigError(f"pressure shape {p.shape} != grid extents {self.spec.extents}")
        p.setflags(write=False)
        object.__setattr__(self, "pressure", p)
        if self.radiation is not None:
            r = np.asarray(self.radiation, dtype=float)
            if r.shape != self.spec.extents:
                raise ConfigError("radiation shape does not match grid extents")
            r.setflags(write=False)
            object.__setattr__(self, "radiation", r)

    # convenience pass-throughs
    @property
    def origin(self):
        return self.spec.origin

    @property
    def axes(self):
        return self.spec.axes

    @property
    def extents(self):
        return self.spec.extents

    @property
    def spacing(self):
        return self.spec.spacing


def field_on_grid(layout, plan, grid: GridSpec, medium, d,
                  threads=1, method="optimized") -> FieldGrid:
    """Evaluate the complex pressure on every grid sample.

    ``method="optimized"`` uses the blocked vectorized path (optionally
    threaded over disjoint output slices); ``method="naive"`` runs the
    per-point oracle sum for every sample. A :class:`SingularityError` from
    either path is re-raised carrying the offending grid multi-index.
    """
    pts = grid.points()
    try:
        if method == "optimized":
            values = pressure_at_many(layout, plan, pts, medium, d, threads=threads)
        elif method == "naive":
            values = np.empty(pts.shape[0], dtype=complex)
            for i in range(pts.shape[0]):
                try:
                    values[i] = pressure_at(layout, plan, pts[i], medium, d)
                except SingularityError as e:
                    raise SingularityError(str(e), sample_index=i) from None
        else:
            raise ConfigError(f"unknown field evaluation method {method!r}")
    except SingularityError as e:
        if e.sample_index is not None:
            multi = np.unravel_index(e.sample_index, grid.extents)
            raise SingularityError(
                f"{e} at grid sample {tuple(int(i) for i in multi)}",
                sample_index=tuple(int(i) for i in multi),
            ) from None
        raise
    return FieldGrid(spec=grid, pressure=values.reshape(grid.extents))


def radiation_pressure(field: FieldGrid, medium: Medium, reflection_factor=2.0) -> FieldGrid:
    """Populate radiation pressure: factor * |p|^2 / (rho c^2).

    With RMS pressure and the default factor 2 this is the Langevin radiation
    pressure on a rigid reflector. The factor is configuration: the physics
    here only fixes proportionality to |p|^2.
    """
    if reflection_factor < 0:
        raise ConfigError("reflection_factor must be >= 0")
    e = np.abs(field.pressure) ** 2 / (medium.density * medium.speed_of_sound ** 2)
    return FieldGrid(spec=field.spec, pressure=field.pressure,
                     radiation=reflection_factor * e)
