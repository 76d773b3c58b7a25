"""Small angle/vector helpers shared by the geometry modules.

Azimuth is measured in the x-y plane from +x toward +y, elevation from
the horizon toward +z; both in degrees. Azimuths live in (-180, 180],
elevations in [-90, 90].
"""

from __future__ import annotations

import numpy as np

SPEED_OF_LIGHT_M_S = 299792458.0


def wrap_azimuth_deg(angle):
    """Wrap angle(s) in degrees to the half-open interval (-180, 180]."""
    a = np.asarray(angle, dtype=float)
    wrapped = np.mod(a + 180.0, 360.0) - 180.0
    wrapped = np.where(wrapped == -180.0, 180.0, wrapped)
    if np.isscalar(angle) or np.ndim(angle) == 0:
        return float(wrapped)
    return wrapped


def clip_elevation_deg(angle):
    """Clip elevation angle(s) in degrees to [-90, 90]."""
    a = np.clip(np.asarray(angle, dtype=float), -90.0, 90.0)
    if np.isscalar(angle) or np.ndim(angle) == 0:
        return float(a)
    return a


def unit_from_angles(az_deg: float, el_deg: float) -> np.ndarray:
    """Unit 3-vector for an (azimuth, elevation) pair in degrees."""
    az = np.radians(az_deg)
    el = np.radians(el_deg)
    ce = np.cos(el)
    return np.array([ce * np.cos(az), ce * np.sin(az), np.sin(el)])


def angles_from_vector(vec: np.ndarray) -> tuple[float, float]:
    """(azimuth, elevation) in degrees of a direction vector.

    The zero vector maps to (0, 0); azimuth of a purely vertical vector
    is 0 by the atan2 convention.
    """
    x, y, z = (float(v) for v in vec)
    horiz = np.hypot(x, y)
    az = float(np.degrees(np.arctan2(y, x)))
    el = float(np.degrees(np.arctan2(z, horiz)))
    return wrap_azimuth_deg(az), el


def rotate_azimuth(vec: np.ndarray, delta_deg: float) -> np.ndarray:
    """Rotate a 3-vector about the z axis by delta_deg (right-handed)."""
    d = np.radians(delta_deg)
    c, s = np.cos(d), np.sin(d)
    x, y, z = vec
    return np.array([c * x - s * y, s * x + c * y, z])
