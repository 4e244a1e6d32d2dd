"""Array geometry: spherical poses, element placement on the z=0 plane, path lengths."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SphericalPose:
    """Position as (range, zenith, azimuth) relative to the array center.

    Zenith is measured from the +z axis, so theta < pi/2 lands on the
    incidence side of the surface and theta > pi/2 on the transmission
    side.  Angles in radians.
    """

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"range must be positive, got {self.r!r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"zenith must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"azimuth must lie in [0, 2*pi), got {self.phi!r}")


@dataclass(frozen=True)
class ArrayLayout:
    """Uniform planar array on z=0: n_rows x n_cols unit cells on a regular grid.

    pitch_x is the horizontal (column-to-column) spacing, pitch_y the vertical
    (row-to-row) spacing, both in meters.
    """

    n_rows: int
    n_cols: int
    pitch_x: float = 0.06
    pitch_y: float = 0.06

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("layout needs at least one row and one column")
        if self.pitch_x <= 0 or self.pitch_y <= 0:
            raise ValueError("element pitch must be positive")

    @property
    def n_units(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def element_area(self) -> float:
        """Geometric area of one unit cell in m^2."""
        return self.pitch_x * self.pitch_y


def spherical_to_cartesian(pose: SphericalPose) -> np.ndarray:
    """(r, theta, phi) -> cartesian (x, y, z)."""
    sin_t = math.sin(pose.theta)
    return np.array(
        [
            pose.r * sin_t * math.cos(pose.phi),
            pose.r * sin_t * math.sin(pose.phi),
            pose.r * math.cos(pose.theta),
        ]
    )


def element_position(layout: ArrayLayout, row: int, col: int) -> np.ndarray:
    """Center of the unit cell at 1-based (row, col), shape (3,).

    The grid is centered on the origin.  The x offset runs with the column
    index and the y offset against the row index, so row 1 sits at the top
    (largest y) when the surface is viewed from +z.
    """
    if not (1 <= row <= layout.n_rows and 1 <= col <= layout.n_cols):
        raise ValueError(
            f"element ({row}, {col}) outside {layout.n_rows}x{layout.n_cols} layout"
        )
    off_x = col - (layout.n_cols + 1) / 2.0
    off_y = (layout.n_rows + 1) / 2.0 - row
    return np.array([off_x * layout.pitch_x, off_y * layout.pitch_y, 0.0])


def element_grid(layout: ArrayLayout) -> np.ndarray:
    """All unit-cell centers, shape (n_units, 3), row-major (row 1 cols 1..N, then row 2, ...)."""
    off_x = (np.arange(1, layout.n_cols + 1) - (layout.n_cols + 1) / 2.0) * layout.pitch_x
    off_y = ((layout.n_rows + 1) / 2.0 - np.arange(1, layout.n_rows + 1)) * layout.pitch_y
    xx, yy = np.meshgrid(off_x, off_y)  # (n_rows, n_cols)
    pts = np.zeros((layout.n_units, 3))
    pts[:, 0] = xx.ravel()
    pts[:, 1] = yy.ravel()
    return pts


def distance(a, b) -> float:
    """Euclidean distance between two cartesian points."""
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def departure_zenith(point, element) -> float:
    """Angle between the unit cell's normal and the direction toward `point`.

    The normal sign follows the point's half-space (+z above the plane, -z
    below), so the result is always folded into [0, pi/2]; a point exactly in
    the plane sees pi/2.  Raises ValueError on coincident points.
    """
    d = np.asarray(point, dtype=float) - np.asarray(element, dtype=float)
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise ValueError("point coincides with the element")
    return float(np.arccos(min(abs(d[2]) / r, 1.0)))


def ranges_and_zeniths(point, elements) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized distance/departure_zenith from every row of `elements` to `point`.

    Returns (ranges, zeniths), each shape (n,).
    """
    d = np.asarray(point, dtype=float) - np.asarray(elements, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0.0):
        raise ValueError("point coincides with an element")
    zen = np.arccos(np.minimum(np.abs(d[..., 2]) / r, 1.0))
    return r, zen
