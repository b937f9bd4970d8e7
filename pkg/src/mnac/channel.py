"""Preamble generation and the two simulation paths for the detector front end.

`simulate_fading` runs the full physical pipeline (complex fading, additive
noise, energy detection) and exists mainly as a validation oracle;
`simulate_equivalent` samples the detector bits directly from the closed-form
count-to-bit law and is what the Monte Carlo sweeps use.
"""

from dataclasses import dataclass

import numpy as np

from .model import (
    ActivitySet,
    ChannelParams,
    MeasurementVector,
    NetworkConfig,
    PreambleMatrix,
    transition_profile,
)

__all__ = [
    "RngSeed",
    "generate_preambles",
    "simulate_fading",
    "simulate_equivalent",
    "empirical_transition",
]

_MAX_U64 = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    """Root of a reproducible random stream.

    Identical (seed, stream) pairs reproduce identical draws bit-exactly;
    distinct stream values give statistically independent streams, which is
    how per-trial parallelism stays schedule-independent.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= _MAX_U64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not 0 <= self.stream <= _MAX_U64:
            raise ValueError("stream must fit in an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.stream])

    def child(self, *words: int) -> np.random.Generator:
        """Independent generator for a derived stream (e.g. one per trial)."""
        return np.random.default_rng([self.seed, self.stream, *words])


def _draw_preambles(rng: np.random.Generator, cfg: NetworkConfig) -> PreambleMatrix:
    raw = rng.random((cfg.preamble_len, cfg.total_devices)) < cfg.sampling_prob
    return PreambleMatrix(raw.astype(np.uint8))


def generate_preambles(cfg: NetworkConfig, seed: RngSeed) -> PreambleMatrix:
    """i.i.d. Bernoulli(sampling_prob) preamble matrix, rows = channel uses."""
    return _draw_preambles(seed.generator(), cfg)


def _complex_normal(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    scale = np.sqrt(var / 2.0)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * scale


def _simulate_fading_rng(preambles: PreambleMatrix, active: ActivitySet,
                         params: ChannelParams, rng: np.random.Generator) -> MeasurementVector:
    x_active = preambles.entries[:, active.indices0()].astype(np.float64)
    coeffs = _complex_normal(rng, x_active.shape, params.fading_var)
    noise = _complex_normal(rng, preambles.n_uses, params.noise_var)
    received = np.sqrt(params.on_power) * (coeffs * x_active).sum(axis=1) + noise
    bits = (np.abs(received) ** 2 > params.threshold).astype(np.uint8)
    return MeasurementVector(bits)


def simulate_fading(preambles: PreambleMatrix, active: ActivitySet,
                    params: ChannelParams, seed: RngSeed) -> MeasurementVector:
    """Full physical simulation: fresh complex fading per (slot, active device),
    additive complex noise, energy detection against the threshold."""
    if active.total_devices != preambles.total_devices:
        raise ValueError("active set and preamble matrix disagree on population size")
    return _simulate_fading_rng(preambles, active, params, seed.generator())


def _simulate_equivalent_rng(preambles: PreambleMatrix, active: ActivitySet,
                             params: ChannelParams, rng: np.random.Generator) -> MeasurementVector:
    counts = preambles.entries[:, active.indices0()].sum(axis=1, dtype=np.int64)
    prob_zero = transition_profile(params, int(counts.max(initial=0)))
    bits = (rng.random(preambles.n_uses) >= prob_zero[counts]).astype(np.uint8)
    return MeasurementVector(bits)


def simulate_equivalent(preambles: PreambleMatrix, active: ActivitySet,
                        params: ChannelParams, seed: RngSeed) -> MeasurementVector:
    """Sample detector bits directly from the count-to-bit law.

    Distribution-equivalent to `simulate_fading` slot by slot, and much
    cheaper; all sweeps use this path.
    """
    if active.total_devices != preambles.total_devices:
        raise ValueError("active set and preamble matrix disagree on population size")
    return _simulate_equivalent_rng(preambles, active, params, seed.generator())


def empirical_transition(params: ChannelParams, on_count: int, trials: int,
                         seed: RngSeed) -> float:
    """Monte Carlo estimate of P(detector reads 0 | on_count senders).

    Runs the full fading pipeline `trials` times with fresh coefficients,
    in fixed-size chunks so memory stays bounded.
    """
    if on_count < 0:
        raise ValueError("on_count must be non-negative")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = seed.generator()
    chunk = 1 << 17
    zeros = 0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        coeffs = _complex_normal(rng, (m, on_count), params.fading_var)
        noise = _complex_normal(rng, m, params.noise_var)
        received = np.sqrt(params.on_power) * coeffs.sum(axis=1) + noise
        zeros += int((np.abs(received) ** 2 <= params.threshold).sum())
        done += m
    return zeros / trials
