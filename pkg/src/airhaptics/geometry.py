"""Transducer array construction.

Builds multi-device array layouts from rectangular device lattices and rigid
poses, and models specular reflection off a flat surface (e.g. a display
panel) through image sources: every real transducer gains a virtual twin
mirrored across the plane, with its amplitude scaled by the plane's
reflection coefficient.

All outputs are immutable value objects; transducer ordering is stable, so
index ``k`` refers to the same element in every downstream operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# On-axis RMS pressure in Pa at the 1 m reference distance. The default puts
# a single transducer at about 13 Pa RMS (20 Pa peak, ~116 dB SPL) at 30 cm
# on axis, the effective drive level at which an ideal coherent four-device
# rig reproduces the tens-of-millinewton focal force scale of real systems;
# raw datasheet maxima (120+ dB) overshoot that scale under lossless
# summation. Override per layout when calibrating against measurements.
DEFAULT_SOURCE_PRESSURE = 4.0

_UNIT_TOL = 1e-9


def _as_vec3(x, name="vector"):
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ConfigError(f"{name} must be a 3-vector, got shape {v.shape}")
    return v


def _check_unit(v, name):
    n = np.linalg.norm(v)
    if abs(n - 1.0) > _UNIT_TOL:
        raise ConfigError(f"{name} must be a unit vector (|v| = {n!r})")


@dataclass(frozen=True)
class TransducerPose:
    """Position, emission axis and drive strength of a single transducer.

    ``source_pressure`` is the on-axis RMS pressure in Pa this element
    produces at the 1 m reference distance; ``gain`` is a dimensionless
    amplitude factor on top of that (image sources use it to carry the
    reflection coefficient).
    """

    position: np.ndarray
    normal: np.ndarray
    gain: float = 1.0
    source_pressure: float = DEFAULT_SOURCE_PRESSURE

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec3(self.position, "position"))
        object.__setattr__(self, "normal", _as_vec3(self.normal, "normal"))
        _check_unit(self.normal, "normal")
        if self.gain < 0:
            raise ConfigError(f"gain must be >= 0, got {self.gain}")
        if self.source_pressure <= 0:
            raise ConfigError(f"source_pressure must be > 0, got {self.source_pressure}")


@dataclass(frozen=True)
class DeviceSpec:
    """A rows x cols rectangular transducer lattice under a rigid pose.

    The local lattice lies in the device z = 0 plane, centered on the device
    origin, with columns along local +x and rows along local +y; elements
    emit along local +z. ``rotation`` (3x3) and ``translation`` map local to
    world coordinates.
    """

    rows: int
    cols: int
    pitch: float
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigError(f"rows and cols must be >= 1, got {self.rows}x{self.cols}")
        if not self.pitch > 0:
            raise ConfigError(f"pitch must be > 0, got {self.pitch}")
        R = np.asarray(self.rotation, dtype=float)
        if R.shape != (3, 3):
            raise ConfigError(f"rotation must be 3x3, got shape {R.shape}")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-9):
            raise ConfigError("rotation must be orthonormal")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", _as_vec3(self.translation, "translation"))

    def local_lattice(self):
        """Local element positions, shape (rows*cols, 3), row-major order."""
        cx = (np.arange(self.cols) - (self.cols - 1) / 2.0) * self.pitch
        cy = (np.arange(self.rows) - (self.rows - 1) / 2.0) * self.pitch
        xx, yy = np.meshgrid(cx, cy)  # row-major: row varies slowest
        pts = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(self.rows * self.cols)])
        return pts

    def world_positions(self):
        return self.local_lattice() @ np.asarray(self.rotation).T + self.translation

    def world_normal(self):
        return np.asarray(self.rotation) @ np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class MirrorPlane:
    """Acoustically reflective plane (point + unit normal).

    ``coefficient`` scales the amplitude of image sources; 1 models a lossless
    rigid reflector, 0 disables the reflection entirely.
    """

    point: np.ndarray
    normal: np.ndarray
    coefficient: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "point", _as_vec3(self.point, "plane point"))
        object.__setattr__(self, "normal", _as_vec3(self.normal, "plane normal"))
        _check_unit(self.normal, "plane normal")
        if not 0.0 <= self.coefficient <= 1.0:
            raise ConfigError(f"mirror coefficient must be in [0, 1], got {self.coefficient}")

    def reflect_points(self, points):
        """Mirror positions across the plane."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        d = (p - self.point) @ self.normal
        out = p - 2.0 * d[:, None] * self.normal
        return out.reshape(np.shape(points))

    def reflect_directions(self, dirs):
        """Mirror direction vectors (no translation)."""
        v = np.atleast_2d(np.asarray(dirs, dtype=float))
        out = v - 2.0 * (v @ self.normal)[:, None] * self.normal
        return out.reshape(np.shape(dirs))

    def signed_distance(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        d = (p - self.point) @ self.normal
        return d if np.ndim(points) > 1 else float(d[0])


@dataclass(frozen=True)
class ArrayLayout:
    """All transducers of an array rig, real ones first, image sources after.

    Arrays are parallel over the transducer index: ``positions[k]``,
    ``normals[k]``, ``gains[k]``, ``source_pressures[k]``, ``device_index[k]``
    and ``is_image[k]`` all describe element ``k``. When a mirror has been
    applied, image source ``n + k`` is the reflection of real source ``k``
    (``n`` = number of real sources) and ``mirror_coefficient`` records the
    amplitude factor baked into the image gains.
    """

    positions: np.ndarray
    normals: np.ndarray
    gains: np.ndarray
    source_pressures: np.ndarray
    device_index: np.ndarray
    is_image: np.ndarray
    mirror_coefficient: float | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        nrm = np.asarray(self.normals, dtype=float)
        n = pos.shape[0]
        if pos.shape != (n, 3) or nrm.shape != (n, 3):
            raise ConfigError("positions and normals must have shape (n, 3)")
        lens = np.linalg.norm(nrm, axis=1)
        if np.any(np.abs(lens - 1.0) > _UNIT_TOL):
            raise ConfigError("all normals must be unit vectors")
        g = np.asarray(self.gains, dtype=float)
        sp = np.asarray(self.source_pressures, dtype=float)
        di = np.asarray(self.device_index, dtype=int)
        im = np.asarray(self.is_image, dtype=bool)
        for name, a in (("gains", g), ("source_pressures", sp),
                        ("device_index", di), ("is_image", im)):
            if a.shape != (n,):
                raise ConfigError(f"{name} must have shape ({n},)")
        if np.any(g < 0):
            raise ConfigError("gains must be >= 0")
        if np.any(sp <= 0):
            raise ConfigError("source_pressures must be > 0")
        n_img = int(im.sum())
        if n_img and n_img * 2 != n:
            raise ConfigError("image sources must pair 1:1 with real sources")
        if n_img and self.mirror_coefficient is None:
            raise ConfigError("layouts with image sources must record mirror_coefficient")
        for name, a in (("positions", pos), ("normals", nrm), ("gains", g),
                        ("source_pressures", sp), ("device_index", di), ("is_image", im)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self):
        return self.positions.shape[0]

    @property
    def has_images(self):
        return bool(self.is_image.any())

    @property
    def n_devices(self):
        return int(self.device_index.max()) + 1 if len(self) else 0

    def transducers(self):
        """Iterate elements as :class:`TransducerPose` values."""
        for k in range(len(self)):
            yield TransducerPose(self.positions[k], self.normals[k],
                                 float(self.gains[k]), float(self.source_pressures[k]))

    def concat(self, other: "ArrayLayout") -> "ArrayLayout":
        """Union of two layouts; the other's device ids are shifted up."""
        if self.has_images or other.has_images:
            raise ConfigError("concat is only defined for layouts without image sources")
        return ArrayLayout(
            positions=np.vstack([self.positions, other.positions]),
            normals=np.vstack([self.normals, other.normals]),
            gains=np.concatenate([self.gains, other.gains]),
            source_pressures=np.concatenate([self.source_pressures, other.source_pressures]),
            device_index=np.concatenate([self.device_index,
                                         other.device_index + self.n_devices]),
            is_image=np.concatenate([self.is_image, other.is_image]),
        )


def build_array(devices, source_pressure=DEFAULT_SOURCE_PRESSURE) -> ArrayLayout:
    """Instantiate the transducer lattice of every device under its pose.

    Element ordering is device-major, then row-major within a device, and is
    the index space every :class:`~airhaptics.phasing.PhasePlan` refers to.
    """
    if not devices:
        raise ConfigError("at least one device is required")
    if not source_pressure > 0:
        raise ConfigError(f"source_pressure must be > 0, got {source_pressure}")
    positions, normals, device_index = [], [], []
    for d, spec in enumerate(devices):
        if not isinstance(spec, DeviceSpec):
            raise ConfigError(f"devices[{d}] is not a DeviceSpec")
        pts = spec.world_positions()
        positions.append(pts)
        normals.append(np.tile(spec.world_normal(), (pts.shape[0], 1)))
        device_index.append(np.full(pts.shape[0], d, dtype=int))
    positions = np.vstack(positions)
    n = positions.shape[0]
    return ArrayLayout(
        positions=positions,
        normals=np.vstack(normals),
        gains=np.ones(n),
        source_pressures=np.full(n, float(source_pressure)),
        device_index=np.concatenate(device_index),
        is_image=np.zeros(n, dtype=bool),
    )


def mirror_image(layout: ArrayLayout, plane: MirrorPlane) -> ArrayLayout:
    """The explicit reflected copy of ``layout`` as a standalone array.

    Positions and emission axes are mirrored across the plane and gains are
    scaled by the reflection coefficient. Used by the image-source
    superposition identity (mirrored field = direct field + this copy's
    field) and by :func:`apply_mirror`.
    """
    if layout.has_images:
        raise ConfigError("layout already contains image sources")
    return ArrayLayout(
        positions=plane.reflect_points(layout.positions),
        normals=plane.reflect_directions(layout.normals),
        gains=layout.gains * plane.coefficient,
        source_pressures=layout.source_pressures.copy(),
        device_index=layout.device_index.copy(),
        is_image=np.zeros(len(layout), dtype=bool),
    )


def apply_mirror(layout: ArrayLayout, plane: MirrorPlane) -> ArrayLayout:
    """Augment a layout with single-bounce image sources across ``plane``.

    Raises :class:`ConfigError` on a second application; multi-bounce
    reverberation is not modeled.
    """
    if layout.has_images:
        raise ConfigError("mirror already applied; multi-bounce is not modeled")
    img = mirror_image(layout, plane)
    n = len(layout)
    return ArrayLayout(
        positions=np.vstack([layout.positions, img.positions]),
        normals=np.vstack([layout.normals, img.normals]),
        gains=np.concatenate([layout.gains, img.gains]),
        source_pressures=np.concatenate([layout.source_pressures, img.source_pressures]),
        device_index=np.concatenate([layout.device_index, img.device_index]),
        is_image=np.concatenate([np.zeros(n, dtype=bool), np.ones(n, dtype=bool)]),
        mirror_coefficient=plane.coefficient,
    )
