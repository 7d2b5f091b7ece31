"""Per-receiver SINR/SIR, sum rate, and Monte Carlo aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dipolenet.antenna import DEFAULT_DIPOLE, DipoleParams
from dipolenet.channel import RadioParams


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class MetricsRecord:
    per_receiver_sinr: np.ndarray
    per_receiver_sir: np.ndarray
    per_receiver_desired_power: np.ndarray
    per_receiver_interference_power: np.ndarray
    sum_rate: float
    rx_is_aerial: np.ndarray


@dataclass
class MetricsBatch:
    """Metrics of T trials as arrays of shape (T, K); ``sum_rate`` is (T,)."""

    sinr: np.ndarray
    sir: np.ndarray
    desired: np.ndarray
    interference: np.ndarray
    sum_rate: np.ndarray
    rx_is_aerial: np.ndarray

    def __len__(self):
        return len(self.sum_rate)

    def record(self, t: int) -> MetricsRecord:
        return MetricsRecord(
            self.sinr[t], self.sir[t], self.desired[t], self.interference[t],
            float(self.sum_rate[t]), self.rx_is_aerial[t],
        )

    @classmethod
    def from_records(cls, records) -> "MetricsBatch":
        return cls(
            np.stack([r.per_receiver_sinr for r in records]),
            np.stack([r.per_receiver_sir for r in records]),
            np.stack([r.per_receiver_desired_power for r in records]),
            np.stack([r.per_receiver_interference_power for r in records]),
            np.array([r.sum_rate for r in records], dtype=float),
            np.stack([r.rx_is_aerial for r in records]),
        )

    @classmethod
    def concatenate(cls, batches) -> "MetricsBatch":
        batches = list(batches)
        return cls(*(np.concatenate([getattr(b, f) for b in batches]) for f in _BATCH_FIELDS))


_BATCH_FIELDS = ("sinr", "sir", "desired", "interference", "sum_rate", "rx_is_aerial")


def metrics_from_powers(powers: np.ndarray, chosen: np.ndarray, noise: float, rx_is_aerial) -> MetricsBatch:
    """Evaluate Eq.-style SINR metrics for a batch of selections.

    ``powers`` has shape (T, K, K, 6) (transmitter, receiver, config) and
    ``chosen`` (T, K) holds each transmitter's config index.
    """
    received = np.take_along_axis(powers, chosen[..., :, None, None], axis=-1)[..., 0]
    k = received.shape[-1]
    desired = np.diagonal(received, axis1=-2, axis2=-1).copy()
    # column sums: everything arriving at receiver i from transmitters j != i
    interference = np.where(np.eye(k, dtype=bool), 0.0, received).sum(axis=-2)
    sinr = desired / (interference + noise)
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(interference > 0, desired / np.where(interference > 0, interference, 1.0), np.inf)
    sum_rate = np.log2(1.0 + sinr).sum(axis=-1)
    return MetricsBatch(sinr, sir, desired, interference, sum_rate,
                        np.broadcast_to(np.asarray(rx_is_aerial, dtype=bool), desired.shape).copy())


def compute_metrics(network, selection, radio: RadioParams, dipole: DipoleParams = DEFAULT_DIPOLE) -> MetricsRecord:
    """SINR, SIR, powers and sum rate of one network under ``selection``."""
    k = len(network.tx_positions)
    chosen = np.asarray(selection.config_indices)
    if chosen.shape != (k,):
        raise ValueError(f"selection has {chosen.size} entries for K={k}")
    powers = network.link_powers(radio, dipole)
    batch = metrics_from_powers(powers[None], chosen[None], radio.noise_power, network.rx_is_aerial)
    return batch.record(0)


# -- aggregation ---------------------------------------------------------------


@dataclass(frozen=True)
class Stat:
    mean: float
    stderr: float
    n: int


def mean_stderr(values) -> Stat:
    """Mean and standard error of the finite entries of ``values``."""
    v = np.asarray(values, dtype=float).ravel()
    v = v[np.isfinite(v)]
    n = v.size
    if n == 0:
        return Stat(math.nan, math.nan, 0)
    mean = math.fsum(v) / n
    if n == 1:
        return Stat(mean, 0.0, 1)
    var = math.fsum((v - mean) ** 2) / (n - 1)
    return Stat(mean, math.sqrt(var / n), n)


def to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def receiver_mask(batch: MetricsBatch, receivers: str) -> np.ndarray:
    if receivers == "all":
        return np.ones_like(batch.rx_is_aerial, dtype=bool)
    if receivers == "aerial":
        return batch.rx_is_aerial
    if receivers == "ground":
        return ~batch.rx_is_aerial
    raise ValueError(f"receivers must be 'all', 'aerial' or 'ground' (got {receivers!r})")


def per_trial(batch: MetricsBatch, name: str, receivers: str = "all", db: bool = False) -> np.ndarray:
    """Per-trial average of a per-receiver field over the selected receivers.

    With ``db=True`` the receivers' values are converted to dB before
    averaging. Trials with no selected receiver yield NaN.
    """
    values = getattr(batch, name)
    if db:
        values = to_db(values)
    mask = receiver_mask(batch, receivers)
    count = mask.sum(axis=-1)
    with np.errstate(invalid="ignore"):
        total = np.where(mask, values, 0.0).sum(axis=-1)
        return np.where(count > 0, total / np.maximum(count, 1), np.nan)


def summarize(batch: MetricsBatch, receivers: str = "all") -> dict:
    """Mean and standard error of every metric.

    Keys ``<field>`` hold linear-domain statistics; ``<field>_db`` hold the
    mean of per-trial dB values, which is not the dB of the linear mean.
    Power fields in dB are relative to 1 W; add 30 for dBm.
    """
    out = {"sum_rate": mean_stderr(batch.sum_rate)}
    for name in ("desired", "interference", "sinr", "sir"):
        out[name] = mean_stderr(per_trial(batch, name, receivers))
        out[name + "_db"] = mean_stderr(per_trial(batch, name, receivers, db=True))
    return out


def aggregate(records, receivers: str = "all") -> dict:
    """Monte Carlo summary of a list of :class:`MetricsRecord`."""
    records = list(records)
    if not records:
        raise EmptyInput("aggregate() needs at least one record")
    return summarize(MetricsBatch.from_records(records), receivers)
