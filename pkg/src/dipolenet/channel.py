"""Free-space pathloss and point-to-point channel coefficients.

Powers are in watts internally; dBm appears only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from dipolenet.antenna import (
    DEFAULT_DIPOLE,
    SPEED_OF_LIGHT,
    AntennaConfig,
    DipoleParams,
    config_gains,
    field_config,
)
from dipolenet.geometry import D_MIN, CoLocatedDevices, Position3D, link_angles, link_geometry

THERMAL_NOISE_DBM_HZ = -174.0


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0


def noise_power(bandwidth: float) -> float:
    """Thermal noise power in watts over ``bandwidth`` Hz at -174 dBm/Hz."""
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    return float(dbm_to_watts(THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(bandwidth)))


def pathloss(distance, carrier_frequency: float):
    """Free-space pathloss ``(lambda / (4 pi d))**2`` as a linear gain."""
    d = np.asarray(distance, dtype=float)
    if np.any(d < D_MIN):
        raise CoLocatedDevices(f"distance below d_min={D_MIN} m")
    wavelength = SPEED_OF_LIGHT / carrier_frequency
    out = (wavelength / (4.0 * np.pi * d)) ** 2
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class RadioParams:
    """Link-budget parameters. Defaults are 23 dBm at 800 MHz over 200 kHz.

    ``noise_power`` defaults to the thermal floor of ``bandwidth``.
    """

    tx_power: float = float(dbm_to_watts(23.0))
    carrier_frequency: float = 800e6
    bandwidth: float = 200e3
    noise_power: Optional[float] = field(default=None)
    rx_gain: float = 1.0

    def __post_init__(self):
        if self.noise_power is None:
            object.__setattr__(self, "noise_power", noise_power(self.bandwidth))
        for name in ("tx_power", "carrier_frequency", "bandwidth", "noise_power", "rx_gain"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_dbm(cls, tx_power_dbm: float = 23.0, **kwargs) -> "RadioParams":
        return cls(tx_power=float(dbm_to_watts(tx_power_dbm)), **kwargs)


def draw_fading(rng: np.random.Generator, size=None):
    """Circularly-symmetric complex normal draws with unit variance."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    out = (re + 1j * im) / math.sqrt(2.0)
    return complex(out) if size is None else out


def channel_coefficient(
    tx: Position3D,
    rx: Position3D,
    config,
    radio: RadioParams,
    dipole: DipoleParams = DEFAULT_DIPOLE,
    fading: complex = 1.0,
) -> complex:
    """Complex channel ``sqrt(P_tx * beta * G_rx) * g(config) * alpha``."""
    geom = link_geometry(tx, rx)
    beta = pathloss(geom.distance, radio.carrier_frequency)
    g = field_config(AntennaConfig(config), geom.azimuth, geom.polar, dipole)
    return complex(math.sqrt(radio.tx_power * beta * radio.rx_gain) * g * fading)


def link_powers(tx_xyz, rx_xyz, fading, radio: RadioParams, dipole: DipoleParams = DEFAULT_DIPOLE):
    """Received power of every Tx->Rx link under every antenna configuration.

    Parameters
    ----------
    tx_xyz, rx_xyz : ndarray, shape (..., K, 3)
    fading : ndarray, shape (..., K, K)
        ``fading[..., i, j]`` is the fade of the link from transmitter i to
        receiver j.

    Returns
    -------
    ndarray, shape (..., K, K, 6)
        ``out[..., i, j, c]`` is ``|h_ij|**2`` in watts with transmitter i
        using configuration ``ALL_CONFIGS[c]``.
    """
    tx = np.asarray(tx_xyz, dtype=float)[..., :, None, :]
    rx = np.asarray(rx_xyz, dtype=float)[..., None, :, :]
    distance, azimuth, polar = link_angles(tx, rx)
    beta = pathloss(distance, radio.carrier_frequency)
    scale = radio.tx_power * radio.rx_gain * beta * np.abs(fading) ** 2
    return scale[..., None] * config_gains(azimuth, polar, dipole)
