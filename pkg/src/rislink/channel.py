"""Free-space per-element channel coefficients and the cos^q antenna/aperture model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ArrayLayout,
    SphericalPose,
    element_grid,
    element_position,
    ranges_and_zeniths,
    spherical_to_cartesian,
)

SPEED_OF_LIGHT = 299792458.0


def wavelength(frequency: float) -> float:
    """Free-space wavelength in meters for a carrier frequency in Hz."""
    if frequency <= 0:
        raise ValueError("frequency must be positive")
    return SPEED_OF_LIGHT / frequency


@dataclass(frozen=True)
class AntennaModel:
    """Rotationally symmetric cos^q pattern: gain(theta) = boresight_gain * cos(theta)^exponent.

    boresight_gain is linear (not dB).  exponent = 0 gives a hemispherical
    radiator.  The boresight points squarely at the array plane, so the
    pattern argument is the element-relative zenith angle; anything behind
    the aperture plane (theta > pi/2) sees zero gain.
    """

    boresight_gain: float = 1.0
    exponent: float = 0.0

    def __post_init__(self):
        if not self.boresight_gain > 0:
            raise ValueError("boresight gain must be positive (linear scale)")
        if self.exponent < 0:
            raise ValueError("pattern exponent must be >= 0")

    def gain(self, zenith):
        """Linear gain toward `zenith` (radians).  Scalar or ndarray."""
        z = np.asarray(zenith, dtype=float)
        if np.any(z < 0):
            raise ValueError("zenith must be >= 0")
        g = self.boresight_gain * np.cos(np.minimum(z, math.pi / 2)) ** self.exponent
        out = np.where(z <= math.pi / 2, g, 0.0)
        return out if out.ndim else float(out)


def effective_area(geometric_area: float, zenith) -> float:
    """Projected aperture of a unit cell: geometric area times cos(zenith).

    Valid for zenith in [0, pi/2]; the fold in the geometry helpers keeps
    callers inside that range.
    """
    if geometric_area <= 0:
        raise ValueError("geometric area must be positive")
    a = geometric_area * np.cos(zenith)
    return a if isinstance(a, np.ndarray) else float(a)


def channel_coefficient(point, antenna: AntennaModel, geometric_area: float,
                        element, wl: float) -> complex:
    """Complex channel between an antenna at `point` and one unit cell.

    Amplitude sqrt(G(theta) * A(theta) / 4pi) / r with the spherical
    propagation phase exp(-j 2 pi r / lambda); theta is the element-relative
    zenith folded into [0, pi/2].
    """
    d = np.asarray(point, dtype=float) - np.asarray(element, dtype=float)
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise ValueError("antenna coincides with the element")
    zen = math.acos(min(abs(d[2]) / r, 1.0))
    amp = math.sqrt(antenna.gain(zen) * effective_area(geometric_area, zen) / (4.0 * math.pi)) / r
    ph = -2.0 * math.pi * r / wl
    return complex(amp * math.cos(ph), amp * math.sin(ph))


def channel_coefficients(point, antenna: AntennaModel, layout: ArrayLayout,
                         wl: float) -> np.ndarray:
    """Channel coefficients from `point` to every unit cell, shape (n_units,), row-major."""
    r, zen = ranges_and_zeniths(point, element_grid(layout))
    amp = np.sqrt(antenna.gain(zen) * effective_area(layout.element_area, zen) / (4.0 * math.pi)) / r
    return amp * np.exp(-2j * math.pi * r / wl)


def pose_channel_coefficient(pose: SphericalPose, antenna: AntennaModel,
                             layout: ArrayLayout, row: int, col: int,
                             wl: float) -> complex:
    """channel_coefficient for a spherical pose and a 1-based (row, col) element."""
    return channel_coefficient(
        spherical_to_cartesian(pose), antenna, layout.element_area,
        element_position(layout, row, col), wl,
    )
