"""Far-field patterns of single and crossed dipole antennas.

All pattern functions return field amplitudes; the power gain of a
configuration is the squared magnitude of its amplitude. Dipole axes are
aligned with the world axes. A crossed configuration drives its two arms
with equal power and a 90 degree phase offset on the second arm, so its
power gain is the arithmetic mean of the two single-arm gains.

Every function broadcasts over numpy arrays of angles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# |sin(psi)| below this is treated as the on-axis null.
_POLE_EPS = 1e-9


class AntennaConfig(str, enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    XY = "XY"
    YZ = "YZ"
    XZ = "XZ"

    @property
    def axes(self) -> tuple[str, ...]:
        return tuple(self.value)

    @classmethod
    def parse(cls, tag: str) -> "AntennaConfig":
        try:
            return cls(tag.strip().upper())
        except ValueError:
            raise ValueError(
                f"unknown antenna config {tag!r}; expected one of {[c.value for c in cls]}"
            ) from None


#: Order used for tie-breaking and for the last axis of batched gain arrays.
ALL_CONFIGS: tuple[AntennaConfig, ...] = tuple(AntennaConfig)


@dataclass(frozen=True)
class DipoleParams:
    """Carrier frequency (Hz) and physical dipole length (m).

    ``dipole_length=None`` means a half-wave dipole at the carrier.
    """

    carrier_frequency: float = 800e6
    dipole_length: Optional[float] = field(default=None)

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if self.dipole_length is not None and not self.dipole_length > 0:
            raise ValueError("dipole_length must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def length(self) -> float:
        if self.dipole_length is None:
            return self.wavelength / 2
        return self.dipole_length

    @property
    def is_half_wave(self) -> bool:
        return self.dipole_length is None or math.isclose(
            self.dipole_length, self.wavelength / 2, rel_tol=1e-12
        )

    @property
    def half_electrical_length(self) -> float:
        """pi * d_len * f0 / c (pi/2 for a half-wave dipole)."""
        return math.pi * self.length * self.carrier_frequency / SPEED_OF_LIGHT


DEFAULT_DIPOLE = DipoleParams()


def _kernel(cos_psi, sin_psi, params: DipoleParams):
    """Dipole field at angle psi off the dipole axis.

    Evaluates (cos(k cos psi) - cos k) / sin psi in a cancellation-free form,
    using 1 - |cos psi| = sin^2 psi / (1 + |cos psi|).
    """
    c = np.abs(np.asarray(cos_psi, dtype=float))
    s = np.abs(np.asarray(sin_psi, dtype=float))
    one_minus_c = s * s / (1.0 + c)
    pole = s < _POLE_EPS
    s_safe = np.where(pole, 1.0, s)
    if params.is_half_wave:
        # cos(pi/2 c) = sin(pi/2 (1 - c)), and cos(pi/2) vanishes exactly
        num = np.sin(0.5 * np.pi * one_minus_c)
    else:
        k = params.half_electrical_length
        num = 2.0 * np.sin(0.5 * k * (1.0 + c)) * np.sin(0.5 * k * one_minus_c)
    return np.where(pole, 0.0, num / s_safe)


def field_z(polar, params: DipoleParams = DEFAULT_DIPOLE):
    """Field amplitude of a z-axis dipole at polar angle ``polar``."""
    polar = np.asarray(polar, dtype=float)
    out = _kernel(np.cos(polar), np.sin(polar), params)
    return out[()] if out.ndim == 0 else out


def axis_fields(azimuth, polar, params: DipoleParams = DEFAULT_DIPOLE):
    """Amplitudes ``(F_x, F_y, F_z)`` of the three axis-aligned dipoles."""
    azimuth = np.asarray(azimuth, dtype=float)
    polar = np.asarray(polar, dtype=float)
    st, ct = np.sin(polar), np.cos(polar)
    ux, uy = st * np.cos(azimuth), st * np.sin(azimuth)
    fx = _kernel(ux, np.hypot(uy, ct), params)
    fy = _kernel(uy, np.hypot(ux, ct), params)
    fz = _kernel(ct, st * np.ones_like(azimuth), params)
    return fx, fy, fz


def field_axis(axis: str, azimuth, polar, params: DipoleParams = DEFAULT_DIPOLE):
    """Amplitude of the single dipole along ``axis`` ("X", "Y" or "Z")."""
    idx = "XYZ".index(str(getattr(axis, "value", axis)).upper())
    out = axis_fields(azimuth, polar, params)[idx]
    return out[()] if np.ndim(out) == 0 else out


def _combine(config: AntennaConfig, fields):
    f = dict(zip("XYZ", fields))
    a = config.axes
    if len(a) == 1:
        return f[a[0]] + 0j
    return (f[a[0]] + 1j * f[a[1]]) / math.sqrt(2.0)


def field_config(config, azimuth, polar, params: DipoleParams = DEFAULT_DIPOLE):
    """Complex field amplitude of ``config`` toward (azimuth, polar)."""
    config = AntennaConfig(config)
    out = _combine(config, axis_fields(azimuth, polar, params))
    return out[()] if np.ndim(out) == 0 else out


def power_gain(config, azimuth, polar, params: DipoleParams = DEFAULT_DIPOLE):
    """Linear power gain ``|field_config|**2``."""
    g = field_config(config, azimuth, polar, params)
    out = np.real(g * np.conj(g))
    return out[()] if np.ndim(out) == 0 else out


def config_gains(azimuth, polar, params: DipoleParams = DEFAULT_DIPOLE) -> np.ndarray:
    """Power gains of all six configurations, stacked on a new last axis.

    The last axis follows :data:`ALL_CONFIGS`.
    """
    fields = axis_fields(azimuth, polar, params)
    return np.stack(
        [np.abs(_combine(c, fields)) ** 2 for c in ALL_CONFIGS], axis=-1
    )


def sphere_integral(config, params: DipoleParams = DEFAULT_DIPOLE, n_polar=64, n_azimuth=128) -> float:
    """Integral of the power gain over the unit sphere.

    Gauss-Legendre in cos(polar), uniform trapezoid in azimuth.
    """
    u, w = np.polynomial.legendre.leggauss(n_polar)
    polar = np.arccos(u)
    azimuth = np.arange(n_azimuth) * (2 * np.pi / n_azimuth) - np.pi
    g = power_gain(config, azimuth[None, :], polar[:, None], params)
    return float(np.sum(w[:, None] * g) * (2 * np.pi / n_azimuth))
