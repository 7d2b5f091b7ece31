"""Random 3D topologies, Monte Carlo trials and experiment sweeps.

Every trial draws from three independent substreams of the master seed
(device x-y positions, aerial-role assignment, fading). Changing the antenna
scheme, the aerial height or the aerial percentage therefore leaves the other
draws untouched, and the schemes of one sweep point are evaluated on the very
same networks.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from dipolenet.antenna import ALL_CONFIGS, DipoleParams
from dipolenet.channel import RadioParams, draw_fading, link_powers, watts_to_dbm
from dipolenet.geometry import D_MIN, Position3D, link_angles
from dipolenet.metrics import (
    MetricsBatch,
    MetricsRecord,
    compute_metrics,
    mean_stderr,
    metrics_from_powers,
    per_trial,
)
from dipolenet.selection import CandidateSet, SelectionResult, Strategy, select_all, select_batch

log = logging.getLogger(__name__)

# Trials are processed in fixed-size chunks so results do not depend on the
# number of workers.
CHUNK_TRIALS = 1000

_TOPOLOGY, _AERIAL, _FADING = 0, 1, 2


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ScenarioConfig:
    K: int = 4
    area_half_width: float = 100.0
    air_height: float = 150.0
    air_rx_percentage: float = 50.0
    air_tx_percentage: float = 0.0
    dipoles: int = 1
    strategy: str = "fixed"
    trials: int = 10_000
    seed: int = 0
    radio: RadioParams = field(default_factory=RadioParams)
    dipole_params: DipoleParams = field(default_factory=DipoleParams)
    fading_enabled: bool = True
    fixed_topology: bool = False

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigError("K", f"must be an integer >= 1 (got {self.K})")
        if not self.area_half_width > 0:
            raise ConfigError("area_half_width", "must be positive")
        if not self.air_height >= 0:
            raise ConfigError("air_height", "must be >= 0")
        for name in ("air_rx_percentage", "air_tx_percentage"):
            v = getattr(self, name)
            if not 0 <= v <= 100:
                raise ConfigError(name, f"must lie in [0, 100] (got {v})")
        if self.dipoles not in (1, 2, 3):
            raise ConfigError("dipoles", f"must be 1, 2 or 3 (got {self.dipoles})")
        try:
            strategy = Strategy(self.strategy)
        except ValueError:
            raise ConfigError("strategy", f"must be one of {[s.value for s in Strategy]} (got {self.strategy!r})") from None
        if strategy is Strategy.FIXED and self.dipoles != 1:
            raise ConfigError("strategy", "the fixed strategy requires dipoles=1")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials", f"must be an integer >= 1 (got {self.trials})")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        object.__setattr__(self, "strategy", strategy.value)

    @property
    def n_air_rx(self) -> int:
        return _air_count(self.K, self.air_rx_percentage)

    @property
    def n_air_tx(self) -> int:
        return _air_count(self.K, self.air_tx_percentage)

    @property
    def candidates(self) -> CandidateSet:
        return CandidateSet.for_dipoles(self.dipoles)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        if isinstance(d.get("radio"), dict):
            d["radio"] = _build(RadioParams, "radio", d["radio"])
        if isinstance(d.get("dipole_params"), dict):
            d["dipole_params"] = _build(DipoleParams, "dipole_params", d["dipole_params"])
        for name, conv in _SCALARS.items():
            if name in d:
                d[name] = _convert(name, conv, d[name])
        return cls(**d)


def _as_int(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    if isinstance(v, str) and v.strip().lstrip("+-").isdigit():
        return int(v)
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _as_bool(v):
    if isinstance(v, str):
        if v.lower() in ("true", "yes", "1"):
            return True
        if v.lower() in ("false", "no", "0"):
            return False
        raise ValueError(f"{v!r} is not a boolean")
    return bool(v)


_SCALARS = {
    "K": _as_int, "dipoles": _as_int, "trials": _as_int, "seed": _as_int,
    "area_half_width": float, "air_height": float,
    "air_rx_percentage": float, "air_tx_percentage": float,
    "strategy": str, "fading_enabled": _as_bool, "fixed_topology": _as_bool,
}


def _convert(name, conv, value):
    if value is None:
        raise ConfigError(name, "must not be empty")
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(name, f"invalid value: {exc}") from None


def _build(cls, section: str, values: dict):
    unknown = set(values) - set(cls.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"{section}.{sorted(unknown)[0]}", "unknown configuration key")
    # every numeric field of the parameter sections is a float (or None)
    values = {k: None if v is None else _convert(f"{section}.{k}", float, v) for k, v in values.items()}
    try:
        return cls(**values)
    except ValueError as exc:
        raise ConfigError(section, str(exc)) from None


def _air_count(k: int, pct: float) -> int:
    # round half up; K * pct / 100 is exact for the usual 25 % steps
    return min(k, int(np.floor(k * pct / 100.0 + 0.5)))


@dataclass(frozen=True)
class Scheme:
    dipoles: int
    strategy: str

    @property
    def label(self) -> str:
        if self.dipoles == 3:
            return "3-dipole-slnr" if self.strategy == "max_slnr" else (
                "3-dipole-m1" if self.strategy == "max_power" else "3-dipole-fixed")
        suffix = "" if (self.dipoles, self.strategy) in ((1, "fixed"), (2, "max_power")) else f"-{self.strategy}"
        return f"{self.dipoles}-dipole{suffix}"

    @property
    def candidates(self) -> CandidateSet:
        return CandidateSet.for_dipoles(self.dipoles)


DEFAULT_SCHEMES = (
    Scheme(1, "fixed"),
    Scheme(2, "max_power"),
    Scheme(3, "max_power"),
    Scheme(3, "max_slnr"),
)


# -- random streams and topology ----------------------------------------------


class TrialStreams:
    """Independently labelled generators for one trial of a seeded run."""

    def __init__(self, seed: int, trial: int):
        self.seed = seed
        self.trial = trial

    def _gen(self, label: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.trial, label))))

    @property
    def topology(self):
        return self._gen(_TOPOLOGY)

    @property
    def aerial(self):
        return self._gen(_AERIAL)

    @property
    def fading(self):
        return self._gen(_FADING)


@dataclass
class NetworkRealization:
    """K transmitter/receiver pairs; ``fading[i, j]`` is the Tx i -> Rx j fade."""

    tx_positions: np.ndarray
    rx_positions: np.ndarray
    tx_is_aerial: np.ndarray
    rx_is_aerial: np.ndarray
    fading: np.ndarray

    def __post_init__(self):
        self.tx_positions = np.asarray(self.tx_positions, dtype=float).reshape(-1, 3)
        self.rx_positions = np.asarray(self.rx_positions, dtype=float).reshape(-1, 3)
        k = len(self.tx_positions)
        if self.rx_positions.shape != (k, 3):
            raise ValueError("tx and rx position counts differ")
        self.tx_is_aerial = np.asarray(self.tx_is_aerial, dtype=bool).reshape(k)
        self.rx_is_aerial = np.asarray(self.rx_is_aerial, dtype=bool).reshape(k)
        self.fading = np.asarray(self.fading, dtype=complex).reshape(k, k)

    @classmethod
    def from_positions(cls, tx: Sequence[Position3D], rx: Sequence[Position3D], fading=None):
        """Build a network from explicit positions; ``fading=None`` means unit fades."""
        tx_xyz = np.array([p.as_array() for p in tx])
        rx_xyz = np.array([p.as_array() for p in rx])
        k = len(tx_xyz)
        if fading is None:
            fading = np.ones((k, k), dtype=complex)
        return cls(tx_xyz, rx_xyz, tx_xyz[:, 2] > 0, rx_xyz[:, 2] > 0, fading)

    @property
    def K(self) -> int:
        return len(self.tx_positions)

    def link_powers(self, radio: RadioParams, dipole: DipoleParams) -> np.ndarray:
        """``(K, K, 6)`` received powers, see :func:`dipolenet.channel.link_powers`."""
        return link_powers(self.tx_positions, self.rx_positions, self.fading, radio, dipole)

    def swap_pairs(self, a: int, b: int) -> "NetworkRealization":
        perm = np.arange(self.K)
        perm[[a, b]] = perm[[b, a]]
        return NetworkRealization(
            self.tx_positions[perm], self.rx_positions[perm], self.tx_is_aerial[perm],
            self.rx_is_aerial[perm], self.fading[np.ix_(perm, perm)],
        )


def _aerial_flags(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    flags = np.zeros(k, dtype=bool)
    flags[rng.permutation(k)[:n]] = True
    return flags


def generate_topology(config: ScenarioConfig, streams: Optional[TrialStreams] = None) -> NetworkRealization:
    """Draw one network: uniform x-y, aerial devices at ``air_height``.

    The aerial transmitter and receiver sets are the first ``n`` entries of
    two random permutations. Receivers closer than ``D_MIN`` to any
    transmitter are redrawn.
    """
    if streams is None:
        streams = TrialStreams(config.seed, 0)
    k, w = config.K, config.area_half_width
    topo = TrialStreams(config.seed, 0).topology if config.fixed_topology else streams.topology
    tx_xy = topo.uniform(-w, w, size=(k, 2))
    rx_xy = topo.uniform(-w, w, size=(k, 2))

    aerial = streams.aerial if not config.fixed_topology else TrialStreams(config.seed, 0).aerial
    rx_air = _aerial_flags(aerial, k, config.n_air_rx)
    tx_air = _aerial_flags(aerial, k, config.n_air_tx)

    tx = np.column_stack([tx_xy, np.where(tx_air, config.air_height, 0.0)])
    rx_z = np.where(rx_air, config.air_height, 0.0)
    rx = np.column_stack([rx_xy, rx_z])
    for _ in range(1000):
        dist, _, _ = link_angles(tx[:, None, :], rx[None, :, :])
        bad = np.any(dist < D_MIN, axis=0)
        if not bad.any():
            break
        rx[bad, :2] = topo.uniform(-w, w, size=(int(bad.sum()), 2))
    else:  # pragma: no cover - needs a pathologically small area
        raise RuntimeError("could not place receivers away from transmitters")

    if config.fading_enabled:
        fading = draw_fading(streams.fading, size=(k, k))
    else:
        fading = np.ones((k, k), dtype=complex)
    return NetworkRealization(tx, rx, tx_air, rx_air, fading)


def generate_batch(config: ScenarioConfig, start: int, stop: int):
    """Stack trials ``start..stop-1`` into arrays for vectorised evaluation."""
    nets = [generate_topology(config, TrialStreams(config.seed, t)) for t in range(start, stop)]
    return (
        np.stack([n.tx_positions for n in nets]),
        np.stack([n.rx_positions for n in nets]),
        np.stack([n.fading for n in nets]),
        np.stack([n.rx_is_aerial for n in nets]),
    )


# -- trials --------------------------------------------------------------------


def run_trial(config: ScenarioConfig, trial: int = 0) -> MetricsRecord:
    """One Monte Carlo sample for ``config``'s scheme."""
    network = generate_topology(config, TrialStreams(config.seed, trial))
    selection = select_all(network, config.strategy, config.candidates, config.radio, config.dipole_params)
    return compute_metrics(network, selection, config.radio, config.dipole_params)


def single_realization(config: ScenarioConfig, trial: int = 0):
    """Network, selection and metrics of one trial (for reporting)."""
    network = generate_topology(config, TrialStreams(config.seed, trial))
    selection = select_all(network, config.strategy, config.candidates, config.radio, config.dipole_params)
    metrics = compute_metrics(network, selection, config.radio, config.dipole_params)
    return network, selection, metrics


def _evaluate_chunk(args):
    config, schemes, start, stop = args
    tx, rx, fading, rx_air = generate_batch(config, start, stop)
    powers = link_powers(tx, rx, fading, config.radio, config.dipole_params)
    noise = config.radio.noise_power
    out = {}
    for scheme in schemes:
        chosen, _ = select_batch(powers, scheme.strategy, scheme.candidates, noise)
        out[scheme] = metrics_from_powers(powers, chosen, noise, rx_air)
    return out


def default_workers() -> int:
    return os.cpu_count() or 1


def run_trials(config: ScenarioConfig, schemes: Sequence[Scheme] = None, workers: int = 1) -> dict:
    """Run ``config.trials`` trials and evaluate every scheme on the same networks.

    Returns ``{scheme: MetricsBatch}`` with trials in index order.
    """
    if schemes is None:
        schemes = (Scheme(config.dipoles, config.strategy),)
    schemes = tuple(schemes)
    jobs = [
        (config, schemes, s, min(s + CHUNK_TRIALS, config.trials))
        for s in range(0, config.trials, CHUNK_TRIALS)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_evaluate_chunk, jobs))
    else:
        parts = [_evaluate_chunk(j) for j in jobs]
    return {s: MetricsBatch.concatenate(p[s] for p in parts) for s in schemes}


# -- sweeps --------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    sweep_variable: float
    mean_sum_rate_bps_hz: float
    stderr: float
    mean_desired_dbm: float
    mean_interference_dbm: float
    mean_sir_db: float
    trials: int
    seed: int


def summarize_row(value, batch: MetricsBatch, seed: int, receivers: str = "aerial") -> SweepRow:
    """Table row: sum-rate statistics plus receiver powers in the dB domain.

    Powers and SIR are means of per-trial dB values over ``receivers``.
    """
    rate = mean_stderr(batch.sum_rate)
    desired = mean_stderr(per_trial(batch, "desired", receivers, db=True))
    interference = mean_stderr(per_trial(batch, "interference", receivers, db=True))
    sir = mean_stderr(per_trial(batch, "sir", receivers, db=True))
    return SweepRow(
        float(value), rate.mean, rate.stderr, desired.mean + 30.0,
        interference.mean + 30.0, sir.mean, len(batch), seed,
    )


@dataclass
class SweepResult:
    """Raw per-trial metrics of a sweep, keyed by sweep value and scheme."""

    variable: str
    values: list
    schemes: tuple
    batches: dict  # (value, scheme) -> MetricsBatch
    seed: int

    def batch(self, value, scheme) -> MetricsBatch:
        return self.batches[(value, scheme)]

    def table(self, scheme, receivers: str = "aerial") -> list:
        return [summarize_row(v, self.batches[(v, scheme)], self.seed, receivers) for v in self.values]


def _sweep(config, variable, values, schemes, workers, make_config) -> SweepResult:
    schemes = tuple(schemes or DEFAULT_SCHEMES)
    batches = {}
    for v in values:
        log.info("sweep %s=%s (%d trials)", variable, v, config.trials)
        res = run_trials(make_config(v), schemes, workers)
        for s in schemes:
            batches[(v, s)] = res[s]
    return SweepResult(variable, list(values), schemes, batches, config.seed)


AIR_PERCENTAGES = (0, 25, 50, 75, 100)
HEIGHTS = (50, 100, 150, 200, 250, 300)


def sweep_air_percentage(config: ScenarioConfig, percentages=AIR_PERCENTAGES, schemes=None, workers: int = 1) -> SweepResult:
    """Sum rate versus the share of aerial receivers."""
    return _sweep(config, "air_rx_percentage", percentages, schemes, workers,
                  lambda p: replace(config, air_rx_percentage=p))


def sweep_height(config: ScenarioConfig, heights=HEIGHTS, schemes=None, workers: int = 1) -> SweepResult:
    """Sum rate and aerial-receiver powers versus aerial height."""
    return _sweep(config, "air_height", heights, schemes, workers,
                  lambda h: replace(config, air_height=h))


def sweep_air_tx(config: ScenarioConfig, air_tx_percentage: float = 100.0,
                 percentages=AIR_PERCENTAGES, schemes=None, workers: int = 1) -> SweepResult:
    """Aerial-transmitter variant of :func:`sweep_air_percentage`."""
    return sweep_air_percentage(replace(config, air_tx_percentage=air_tx_percentage),
                                percentages, schemes, workers)


def describe_network(network: NetworkRealization, selection: SelectionResult, metrics: MetricsRecord) -> dict:
    return {
        "tx_positions": network.tx_positions.tolist(),
        "rx_positions": network.rx_positions.tolist(),
        "tx_is_aerial": network.tx_is_aerial.tolist(),
        "rx_is_aerial": network.rx_is_aerial.tolist(),
        "selected_configs": [c.value for c in selection.per_transmitter_config],
        "sinr_db": [float(x) for x in 10 * np.log10(metrics.per_receiver_sinr)],
        "desired_dbm": [float(x) for x in watts_to_dbm(metrics.per_receiver_desired_power)],
        "interference_dbm": [float(x) for x in watts_to_dbm(metrics.per_receiver_interference_power)],
        "sum_rate_bps_hz": metrics.sum_rate,
    }


__all__ = [
    "ALL_CONFIGS",
    "ConfigError",
    "DEFAULT_SCHEMES",
    "NetworkRealization",
    "ScenarioConfig",
    "Scheme",
    "SweepResult",
    "SweepRow",
    "TrialStreams",
    "generate_topology",
    "run_trial",
    "run_trials",
    "sweep_air_percentage",
    "sweep_air_tx",
    "sweep_height",
]
