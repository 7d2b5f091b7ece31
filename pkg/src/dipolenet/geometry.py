"""Link geometry between devices placed in 3D space.

Angles follow the physics spherical convention: ``polar`` is measured from
the +z axis (0 straight up, pi/2 on the horizon) and ``azimuth`` from the +x
axis in the x-y plane, wrapped to [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Minimum Tx-Rx separation in meters; free-space pathloss diverges below it.
D_MIN = 0.1


class CoLocatedDevices(ValueError):
    """Raised when two devices are closer than :data:`D_MIN`."""


@dataclass(frozen=True)
class Position3D:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")
        if self.z < 0:
            raise ValueError(f"z must be >= 0 (got {self.z})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class LinkGeometry:
    distance: float
    azimuth: float
    polar: float

    def displacement(self) -> np.ndarray:
        """Reconstruct the rx - tx vector."""
        s = math.sin(self.polar)
        return self.distance * np.array(
            [s * math.cos(self.azimuth), s * math.sin(self.azimuth), math.cos(self.polar)]
        )


def link_angles(tx, rx):
    """Vectorised link geometry.

    Parameters
    ----------
    tx, rx : array_like, shape (..., 3)
        Transmitter and receiver coordinates; broadcast against each other.

    Returns
    -------
    distance, azimuth, polar : ndarray
        Arrays of the broadcast shape without the trailing axis.
    """
    delta = np.asarray(rx, dtype=float) - np.asarray(tx, dtype=float)
    dx, dy, dz = delta[..., 0], delta[..., 1], delta[..., 2]
    horizontal = np.hypot(dx, dy)
    distance = np.hypot(horizontal, dz)
    polar = np.arctan2(horizontal, dz)
    azimuth = np.where(horizontal > 0, np.arctan2(dy, dx), 0.0)
    azimuth = np.where(azimuth >= np.pi, azimuth - 2 * np.pi, azimuth)
    return distance, azimuth, polar


def check_separation(distance) -> None:
    d = np.asarray(distance)
    if np.any(d < D_MIN):
        raise CoLocatedDevices(
            f"devices closer than d_min={D_MIN} m (min distance {float(d.min()):.3g} m)"
        )


def link_geometry(tx: Position3D, rx: Position3D) -> LinkGeometry:
    """Distance and departure angles of the link ``tx -> rx``."""
    dx, dy, dz = rx.x - tx.x, rx.y - tx.y, rx.z - tx.z
    horizontal = math.hypot(dx, dy)
    distance = math.hypot(horizontal, dz)
    if distance < D_MIN:
        raise CoLocatedDevices(f"devices closer than d_min={D_MIN} m ({distance:.3g} m)")
    azimuth = math.atan2(dy, dx) if horizontal > 0 else 0.0
    if azimuth >= math.pi:
        azimuth -= 2 * math.pi
    return LinkGeometry(distance, azimuth, math.atan2(horizontal, dz))
