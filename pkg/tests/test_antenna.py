import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dipolenet.antenna import (
    ALL_CONFIGS,
    AntennaConfig,
    DipoleParams,
    config_gains,
    field_axis,
    field_config,
    field_z,
    power_gain,
    sphere_integral,
    SPEED_OF_LIGHT,
)

HALF_WAVE = DipoleParams(800e6)
SQRT2 = math.sqrt(2.0)
F_45 = math.cos(math.pi / (2 * SQRT2)) / math.sin(math.pi / 4)

azimuths = st.floats(-math.pi, math.pi, exclude_max=True)
polars = st.floats(0, math.pi)
configs = st.sampled_from(ALL_CONFIGS)

pytestmark = pytest.mark.property


def textbook_field(psi, params):
    """Direct dipole-kernel evaluation, no rearrangement."""
    f0, d = params.carrier_frequency, params.length
    c = SPEED_OF_LIGHT
    return (math.cos(math.pi * d / c * f0 * math.cos(psi)) - math.cos(math.pi * f0 * d / c)) / math.sin(psi)


def test_half_wave_default_length():
    assert HALF_WAVE.length == pytest.approx(0.18737, abs=1e-5)
    assert HALF_WAVE.half_electrical_length == pytest.approx(math.pi / 2, rel=1e-15)


@pytest.mark.parametrize(
    "polar, expected",
    [(math.pi / 2, 1.0), (0.0, 0.0), (math.pi, 0.0), (math.pi / 4, F_45), (3 * math.pi / 4, F_45)],
)
def test_field_z_values(polar, expected):
    assert field_z(polar, HALF_WAVE) == pytest.approx(expected, abs=1e-12)


def test_field_z_broadside_is_exactly_one():
    assert field_z(math.pi / 2) == 1.0


@pytest.mark.parametrize("length", [None, 0.1, 0.3, 0.45])
def test_kernel_matches_textbook_formula(length):
    params = DipoleParams(800e6, length)
    rng = np.random.default_rng(11)
    for psi in rng.uniform(0.01, math.pi - 0.01, 200):
        assert field_z(psi, params) == pytest.approx(textbook_field(psi, params), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("length", [None, 0.3])
@pytest.mark.parametrize("eps", [1e-3, 1e-6, 1e-9])
def test_pole_continuity(length, eps):
    params = DipoleParams(800e6, length)
    for config in ALL_CONFIGS:
        for az in (0.0, 0.7, -2.0):
            near = power_gain(config, az, eps, params)
            at = power_gain(config, az, 0.0, params)
            assert math.isfinite(near)
            assert near == pytest.approx(at, abs=10 * eps)


def test_y_axis_examples():
    assert field_axis("Y", math.pi / 2, math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    assert field_axis("Y", 0.0, math.pi / 2) == 1.0


def test_y_axis_matches_cross_substitution():
    # psi_y = acos(sin(polar) sin(azimuth))
    rng = np.random.default_rng(3)
    for az, pol in zip(rng.uniform(-math.pi, math.pi, 100), rng.uniform(0.05, math.pi - 0.05, 100)):
        psi = math.acos(math.sin(pol) * math.sin(az))
        if math.sin(psi) < 1e-3:
            continue
        assert field_axis("Y", az, pol) == pytest.approx(textbook_field(psi, HALF_WAVE), rel=1e-9)


def test_x_equals_rotated_y_grid():
    rng = np.random.default_rng(5)
    az = rng.uniform(-math.pi, math.pi, 100)
    pol = rng.uniform(0, math.pi, 100)
    np.testing.assert_allclose(field_axis("X", az, pol), field_axis("Y", az + math.pi / 2, pol), atol=1e-12)


def test_field_config_examples():
    g = field_config("XY", 0.0, math.pi / 2)
    assert g.real == pytest.approx(0.0, abs=1e-15)
    assert g.imag == pytest.approx(1 / SQRT2, rel=1e-15)
    assert abs(g) ** 2 == pytest.approx(0.5)
    assert field_config(AntennaConfig.Z, 1.234, math.pi / 2) == 1 + 0j
    g = field_config("YZ", 0.0, math.pi / 4)
    assert g == pytest.approx((1 + 1j * F_45) / SQRT2, abs=1e-12)
    assert abs(g) ** 2 == pytest.approx((1 + F_45**2) / 2, rel=1e-12)
    assert abs(g) ** 2 == pytest.approx(0.6975, abs=1e-3)


def test_power_gain_examples():
    assert power_gain("Z", 0.3, math.pi / 2) == 1.0
    assert power_gain("XY", math.pi / 4, math.pi / 2) == pytest.approx(F_45**2, rel=1e-12)
    for az in (-3.0, 0.0, 1.0, 2.5):
        assert power_gain("XZ", az, 0.0) == pytest.approx(0.5, rel=1e-12)


def test_z_is_azimuth_independent():
    rng = np.random.default_rng(1)
    for polar in (0.1, 0.8, math.pi / 2, 2.9):
        g = power_gain("Z", rng.uniform(-math.pi, math.pi, 1000), polar)
        assert np.ptp(g) == 0.0


@given(azimuths, polars)
def test_rotation_relation(az, pol):
    assert power_gain("X", az, pol) == pytest.approx(power_gain("Y", az + math.pi / 2, pol), abs=1e-12)


@given(azimuths, polars, st.sampled_from([AntennaConfig.XY, AntennaConfig.YZ, AntennaConfig.XZ]))
def test_cross_dipole_is_mean_of_arms(az, pol, config):
    a, b = config.axes
    ga, gb = power_gain(a, az, pol), power_gain(b, az, pol)
    g = power_gain(config, az, pol)
    assert g == pytest.approx((ga + gb) / 2, rel=1e-12, abs=1e-15)
    assert g <= max(ga, gb) + 1e-15


@given(azimuths, polars)
def test_config_gains_matches_power_gain(az, pol):
    stacked = config_gains(az, pol)
    for k, config in enumerate(ALL_CONFIGS):
        assert stacked[k] == pytest.approx(power_gain(config, az, pol), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("length", [None, 0.3])
def test_sphere_integral_equal_for_all_configs(length):
    params = DipoleParams(800e6, length)
    ref = sphere_integral(AntennaConfig.Z, params, 64, 128)
    for config in ALL_CONFIGS:
        assert sphere_integral(config, params, 64, 128) == pytest.approx(ref, rel=1e-6)


def test_sphere_integral_converged():
    coarse = sphere_integral("XY", HALF_WAVE, 64, 128)
    fine = sphere_integral("XY", HALF_WAVE, 128, 256)
    assert coarse == pytest.approx(fine, rel=1e-9)


def test_parse_and_errors():
    assert AntennaConfig.parse("xz") is AntennaConfig.XZ
    with pytest.raises(ValueError):
        AntennaConfig.parse("xx")
    with pytest.raises(ValueError):
        DipoleParams(-1.0)
    with pytest.raises(ValueError):
        DipoleParams(800e6, 0.0)
