"""Domain types and closed-form laws for on-off-keyed activity detection.

A population of `total_devices` devices, of which an unknown subset of size
`active_devices` is active, signals over a shared channel.  Each channel use
every active device either transmits an 'On' symbol (per its binary preamble)
or stays silent; the receiver compares the received energy against a threshold
and records a single bit.  Everything in this module is a pure function of its
arguments; simulation, capacity search and decoding build on top.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelParams",
    "NetworkConfig",
    "PreambleMatrix",
    "ActivitySet",
    "MeasurementVector",
    "WeightDistribution",
    "transition_prob_zero",
    "transition_profile",
    "binary_entropy",
    "binomial_weight_pmf",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ChannelParams:
    """Physical constants of the on-off / fast-fading / energy-detector link.

    Attributes
    ----------
    on_power : float
        Transmit power of an 'On' symbol.
    fading_var : float
        Variance of each complex channel coefficient (fresh per channel use).
    noise_var : float
        Variance of the complex receiver noise.
    threshold : float
        Energy-detector decision threshold, >= 0.
    """

    on_power: float
    fading_var: float
    noise_var: float
    threshold: float

    def __post_init__(self):
        if not self.on_power > 0:
            raise ValueError("on_power must be positive")
        if not self.fading_var > 0:
            raise ValueError("fading_var must be positive")
        if not self.noise_var > 0:
            raise ValueError("noise_var must be positive")
        if not self.threshold >= 0:
            raise ValueError("threshold must be non-negative")

    def snr(self) -> float:
        """Linear SNR, defined as on_power * fading_var / noise_var."""
        return self.on_power * self.fading_var / self.noise_var

    def with_threshold(self, threshold: float) -> "ChannelParams":
        return ChannelParams(self.on_power, self.fading_var, self.noise_var, threshold)

    @classmethod
    def from_snr_db(cls, snr_db: float, threshold: float) -> "ChannelParams":
        """Unit-variance normalization: fading_var = noise_var = 1, on_power = linear SNR."""
        return cls(on_power=10.0 ** (snr_db / 10.0), fading_var=1.0, noise_var=1.0,
                   threshold=threshold)


@dataclass(frozen=True)
class NetworkConfig:
    """Population size, activity level and preamble ensemble parameters."""

    total_devices: int
    active_devices: int
    preamble_len: int
    sampling_prob: float

    def __post_init__(self):
        if self.total_devices < 2:
            raise ValueError("total_devices must be at least 2")
        if not 1 <= self.active_devices < self.total_devices:
            raise ValueError("active_devices must satisfy 1 <= k < total_devices")
        if self.preamble_len < 1:
            raise ValueError("preamble_len must be at least 1")
        if not 0.0 < self.sampling_prob < 1.0:
            raise ValueError("sampling_prob must lie strictly inside (0, 1)")


@dataclass(frozen=True)
class ActivitySet:
    """A set of device indices, 1-based as in all user-facing I/O.

    Internal numpy code works 0-based; :meth:`indices0` / :meth:`from_zero_based`
    convert at the boundary.
    """

    members: tuple
    total_devices: int

    def __post_init__(self):
        members = tuple(sorted(int(m) for m in self.members))
        if len(set(members)) != len(members):
            raise ValueError("activity set members must be distinct")
        if members and not (1 <= members[0] and members[-1] <= self.total_devices):
            raise ValueError("members must lie in 1..total_devices")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_zero_based(cls, indices, total_devices: int) -> "ActivitySet":
        return cls(tuple(int(i) + 1 for i in indices), total_devices)

    @classmethod
    def from_status_vector(cls, status) -> "ActivitySet":
        status = np.asarray(status)
        return cls.from_zero_based(np.flatnonzero(status), status.shape[0])

    def indices0(self) -> np.ndarray:
        """Members as a 0-based int64 index array."""
        return np.asarray(self.members, dtype=np.int64) - 1

    def to_status_vector(self) -> np.ndarray:
        beta = np.zeros(self.total_devices, dtype=np.uint8)
        if self.members:
            beta[self.indices0()] = 1
        return beta

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class PreambleMatrix:
    """Binary preamble ensemble; rows are channel uses, columns are devices."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2:
            raise ValueError("preamble matrix must be 2-D")
        if entries.size and not np.isin(entries, (0, 1)).all():
            raise ValueError("preamble matrix entries must be 0/1")
        object.__setattr__(self, "entries", _freeze(entries.astype(np.uint8)))

    @property
    def n_uses(self) -> int:
        return self.entries.shape[0]

    @property
    def total_devices(self) -> int:
        return self.entries.shape[1]

    def column_weights(self) -> np.ndarray:
        """Per-device count of 'On' slots."""
        return self.entries.sum(axis=0, dtype=np.int64)

    def row_weights(self) -> np.ndarray:
        """Per-slot count of devices scheduled 'On'."""
        return self.entries.sum(axis=1, dtype=np.int64)


@dataclass(frozen=True)
class MeasurementVector:
    """Per-slot detector decisions: 1 = energy above threshold."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1:
            raise ValueError("measurement vector must be 1-D")
        if bits.size and not np.isin(bits, (0, 1)).all():
            raise ValueError("measurement bits must be 0/1")
        object.__setattr__(self, "bits", _freeze(bits.astype(np.uint8)))

    def __len__(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class WeightDistribution:
    """pmf over the per-slot 'On' count among the active devices."""

    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=np.float64)
        if pmf.ndim != 1 or pmf.size == 0:
            raise ValueError("pmf must be a non-empty 1-D array")
        if np.any(pmf < 0):
            raise ValueError("pmf entries must be non-negative")
        if abs(pmf.sum() - 1.0) > 1e-12:
            raise ValueError("pmf must sum to 1 within 1e-12")
        object.__setattr__(self, "pmf", _freeze(pmf))

    @property
    def max_weight(self) -> int:
        return self.pmf.shape[0] - 1

    def mean(self) -> float:
        return float(np.dot(self.pmf, np.arange(self.pmf.shape[0])))


def transition_prob_zero(params: ChannelParams, on_count: int) -> float:
    """P(detector reads 0 | `on_count` devices sent 'On' in the slot).

    The received energy given the count is exponential with mean
    on_count * fading_var * on_power + noise_var, so the sub-threshold
    probability is 1 - exp(-threshold / mean).  Strictly decreasing in the
    count whenever threshold > 0.
    """
    if on_count < 0:
        raise ValueError("on_count must be non-negative")
    mean_energy = on_count * params.fading_var * params.on_power + params.noise_var
    return -math.expm1(-params.threshold / mean_energy)


def transition_profile(params: ChannelParams, max_count: int) -> np.ndarray:
    """Vector of P(detector reads 0 | count = v) for v = 0..max_count."""
    if max_count < 0:
        raise ValueError("max_count must be non-negative")
    counts = np.arange(max_count + 1, dtype=np.float64)
    mean_energy = counts * params.fading_var * params.on_power + params.noise_var
    return -np.expm1(-params.threshold / mean_energy)


def binary_entropy(x):
    """Binary entropy in bits, with the 0*log(0) = 0 endpoint convention.

    Accepts a scalar or an ndarray; raises ValueError outside [0, 1].
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    out = np.zeros_like(arr)
    interior = (arr > 0.0) & (arr < 1.0)
    a = arr[interior]
    out[interior] = -a * np.log2(a) - (1.0 - a) * np.log2(1.0 - a)
    if np.ndim(x) == 0:
        return float(out)
    return out


def binomial_weight_pmf(k: int, sampling_prob: float) -> WeightDistribution:
    """Weight law of the per-slot 'On' count among k active devices.

    Linear-space multiplicative recurrence
    pmf[v+1] = pmf[v] * (k-v)/(v+1) * q/(1-q); overflow-free at desk scale
    (k up to ~1e3 with moderate q).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < sampling_prob < 1.0:
        raise ValueError("sampling_prob must lie strictly inside (0, 1)")
    pmf = np.empty(k + 1, dtype=np.float64)
    pmf[0] = (1.0 - sampling_prob) ** k
    ratio = sampling_prob / (1.0 - sampling_prob)
    for v in range(k):
        pmf[v + 1] = pmf[v] * (k - v) / (v + 1) * ratio
    return WeightDistribution(pmf)
