"""Dipole antenna selection in 3D-topology uncoordinated IoT networks."""

from dipolenet.antenna import AntennaConfig, DipoleParams, field_axis, field_config, field_z, power_gain
from dipolenet.channel import (
    RadioParams,
    channel_coefficient,
    draw_fading,
    noise_power,
    pathloss,
)
from dipolenet.geometry import CoLocatedDevices, LinkGeometry, Position3D, link_geometry
from dipolenet.metrics import MetricsRecord, aggregate, compute_metrics
from dipolenet.scenario import NetworkRealization, ScenarioConfig, generate_topology, run_trial
from dipolenet.selection import (
    CandidateSet,
    InvalidCandidateSet,
    SelectionResult,
    select_all,
    select_fixed,
    select_max_power,
    select_max_slnr,
)

__version__ = "0.1.0"

__all__ = [
    "AntennaConfig",
    "CandidateSet",
    "CoLocatedDevices",
    "DipoleParams",
    "InvalidCandidateSet",
    "LinkGeometry",
    "MetricsRecord",
    "NetworkRealization",
    "Position3D",
    "RadioParams",
    "ScenarioConfig",
    "SelectionResult",
    "aggregate",
    "channel_coefficient",
    "compute_metrics",
    "draw_fading",
    "field_axis",
    "field_config",
    "field_z",
    "generate_topology",
    "link_geometry",
    "noise_power",
    "pathloss",
    "power_gain",
    "run_trial",
    "select_all",
    "select_fixed",
    "select_max_power",
    "select_max_slnr",
]
