import math

import numpy as np
import pytest

from dipolenet.channel import RadioParams, channel_coefficient, draw_fading
from dipolenet.geometry import Position3D
from dipolenet.scenario import NetworkRealization


def random_network(rng, k=4, height=150.0, half_width=100.0):
    """Ground/air pairs with random roles and CN(0,1) fades."""
    tx = np.column_stack([rng.uniform(-half_width, half_width, (k, 2)), np.where(rng.random(k) < 0.3, height, 0.0)])
    rx = np.column_stack([rng.uniform(-half_width, half_width, (k, 2)), np.where(rng.random(k) < 0.5, height, 0.0)])
    return NetworkRealization(tx, rx, tx[:, 2] > 0, rx[:, 2] > 0, draw_fading(rng, (k, k)))


def link_power(network, i, j, config, radio, dipole):
    """|h_ij|^2 through the scalar channel path."""
    h = channel_coefficient(
        Position3D(*network.tx_positions[i]),
        Position3D(*network.rx_positions[j]),
        config,
        radio,
        dipole,
        network.fading[i, j],
    )
    return abs(h) ** 2


def literal_link_power(network, i, j, config, radio):
    """|h_ij|^2 from the closed-form pattern formulas, in plain floats.

    Angles to each dipole axis use the acos substitution of the crossed
    pattern; a half-wave dipole at the radio's carrier is assumed.
    """
    c = 299_792_458.0
    f0 = radio.carrier_frequency
    d_len = c / (2 * f0)
    tx, rx = network.tx_positions[i], network.rx_positions[j]
    dx, dy, dz = (float(v) for v in rx - tx)
    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
    theta = math.acos(dz / dist)
    phi = math.atan2(dy, dx)

    def pattern(psi):
        s = math.sin(psi)
        if abs(s) < 1e-12:
            return 0.0
        return (math.cos(math.pi * d_len / c * f0 * math.cos(psi)) - math.cos(math.pi * f0 * d_len / c)) / s

    arms = {
        "X": pattern(math.acos(max(-1.0, min(1.0, math.sin(theta) * math.cos(phi))))),
        "Y": pattern(math.acos(max(-1.0, min(1.0, math.sin(theta) * math.sin(phi))))),
        "Z": pattern(theta),
    }
    axes = str(getattr(config, "value", config))
    if len(axes) == 1:
        g = complex(arms[axes])
    else:
        g = (arms[axes[0]] + 1j * arms[axes[1]]) / math.sqrt(2)
    beta = (c / f0 / (4 * math.pi * dist)) ** 2
    return radio.tx_power * beta * radio.rx_gain * abs(g) ** 2 * abs(network.fading[i, j]) ** 2


@pytest.fixture
def radio():
    return RadioParams()


# Acceptance criteria report -------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
