"""Transmitter-side antenna selection.

Three policies are available: a fixed z-dipole, the configuration that
maximises received desired power, and the configuration that maximises the
signal-to-leakage-plus-noise ratio (SLNR). Each transmitter decides on its
own; no policy looks at another transmitter's choice.

Channel knowledge is ideal. Ties go to the earliest configuration in the
candidate set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from dipolenet.antenna import ALL_CONFIGS, DEFAULT_DIPOLE, AntennaConfig, DipoleParams
from dipolenet.channel import RadioParams


class InvalidCandidateSet(ValueError):
    pass


class Strategy(str, enum.Enum):
    FIXED = "fixed"
    MAX_POWER = "max_power"
    MAX_SLNR = "max_slnr"


@dataclass(frozen=True)
class CandidateSet:
    configs: tuple[AntennaConfig, ...]

    def __post_init__(self):
        configs = tuple(AntennaConfig(c) for c in self.configs)
        if not configs:
            raise InvalidCandidateSet("candidate set is empty")
        if len(set(configs)) != len(configs):
            raise InvalidCandidateSet(f"duplicate configs in {configs}")
        object.__setattr__(self, "configs", configs)

    @classmethod
    def for_dipoles(cls, dipoles: int) -> "CandidateSet":
        try:
            return cls(DIPOLE_CANDIDATES[int(dipoles)])
        except KeyError:
            raise InvalidCandidateSet(f"dipoles must be 1, 2 or 3 (got {dipoles})") from None

    @property
    def indices(self) -> np.ndarray:
        """Positions of the candidates within :data:`ALL_CONFIGS`."""
        return np.array([ALL_CONFIGS.index(c) for c in self.configs])

    def __len__(self):
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)


DIPOLE_CANDIDATES = {
    1: (AntennaConfig.Z,),
    2: (AntennaConfig.Y, AntennaConfig.Z),
    3: ALL_CONFIGS,
}


@dataclass(frozen=True)
class SelectionResult:
    per_transmitter_config: tuple[AntennaConfig, ...]
    per_transmitter_score: tuple[float, ...]

    @property
    def config_indices(self) -> np.ndarray:
        return np.array([ALL_CONFIGS.index(c) for c in self.per_transmitter_config])


# -- criteria on batched power tensors ----------------------------------------
#
# ``powers[..., i, j, c]`` is the power received at receiver j from
# transmitter i when i uses ALL_CONFIGS[c]. Criteria return shape (..., K, 6).


def desired_power_criterion(powers: np.ndarray) -> np.ndarray:
    return np.diagonal(powers, axis1=-3, axis2=-2).swapaxes(-1, -2)


def leakage_power(powers: np.ndarray) -> np.ndarray:
    """Power each transmitter leaks into the other receivers (row sums)."""
    k = powers.shape[-2]
    off = ~np.eye(k, dtype=bool)[..., None]
    return np.where(off, powers, 0.0).sum(axis=-2)


def slnr_criterion(powers: np.ndarray, noise: float) -> np.ndarray:
    return desired_power_criterion(powers) / (leakage_power(powers) + noise)


def choose(scores: np.ndarray, candidates: CandidateSet):
    """First maximiser of ``scores`` over ``candidates``.

    Returns indices into :data:`ALL_CONFIGS` and the winning scores.
    """
    idx = candidates.indices
    sub = scores[..., idx]
    pick = np.argmax(sub, axis=-1)
    best = np.take_along_axis(sub, pick[..., None], axis=-1)[..., 0]
    return idx[pick], best


def select_batch(powers: np.ndarray, strategy, candidates: CandidateSet, noise: float):
    """Apply ``strategy`` to every transmitter of every network in a batch."""
    strategy = Strategy(strategy)
    if strategy is Strategy.FIXED:
        _check_fixed(candidates)
        return choose(desired_power_criterion(powers), candidates)
    if strategy is Strategy.MAX_POWER:
        return choose(desired_power_criterion(powers), candidates)
    return choose(slnr_criterion(powers, noise), candidates)


# -- per-transmitter API -------------------------------------------------------


def _check_fixed(candidates: CandidateSet) -> None:
    if tuple(candidates) != (AntennaConfig.Z,):
        raise InvalidCandidateSet(
            f"fixed policy requires the candidate set {{Z}}, got {[c.value for c in candidates]}"
        )


def select_fixed(candidates: CandidateSet) -> AntennaConfig:
    _check_fixed(candidates)
    return AntennaConfig.Z


def select_max_power(
    tx_index: int,
    network,
    candidates: CandidateSet,
    radio: RadioParams,
    dipole: DipoleParams = DEFAULT_DIPOLE,
) -> AntennaConfig:
    """Configuration maximising desired received power at ``tx_index``'s receiver."""
    powers = network.link_powers(radio, dipole)
    idx, _ = choose(desired_power_criterion(powers)[tx_index], candidates)
    return ALL_CONFIGS[int(idx)]


def select_max_slnr(
    tx_index: int,
    network,
    candidates: CandidateSet,
    radio: RadioParams,
    dipole: DipoleParams = DEFAULT_DIPOLE,
) -> AntennaConfig:
    """Configuration maximising SLNR of transmitter ``tx_index``."""
    powers = network.link_powers(radio, dipole)
    idx, _ = choose(slnr_criterion(powers, radio.noise_power)[tx_index], candidates)
    return ALL_CONFIGS[int(idx)]


def select_all(
    network,
    strategy,
    candidates: CandidateSet,
    radio: RadioParams,
    dipole: DipoleParams = DEFAULT_DIPOLE,
) -> SelectionResult:
    """Independent per-transmitter selection for a whole network.

    Scores are the strategy's criterion at the chosen configuration: desired
    power in watts for ``fixed`` and ``max_power``, the linear SLNR for
    ``max_slnr``.
    """
    powers = network.link_powers(radio, dipole)
    idx, best = select_batch(powers, strategy, candidates, radio.noise_power)
    return SelectionResult(
        tuple(ALL_CONFIGS[int(i)] for i in idx),
        tuple(float(s) for s in best),
    )
