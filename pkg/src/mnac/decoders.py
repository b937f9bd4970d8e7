"""Activity detectors for the binary energy-measurement model.

Four families, all consuming the same (measurements, preambles) pair:

* `ml_exhaustive`: scan every size-k candidate set for the likelihood maximum.
* `algorithm1_decode`: per-candidate partition threshold tests; a candidate
  must clear every test, and decoding succeeds only if exactly one does.
* `ncomp_decode`: rank devices by the fraction of their 'On' slots that read 1.
* `bp_st` / `bp_sht` / `bp_aht`: output rules on loopy-BP activity marginals
  (fixed-size top-k, fixed 0.5 threshold, adjustable threshold).
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .beliefprop import BpState, bp_marginals, factor_messages
from .model import (
    ActivitySet,
    ChannelParams,
    MeasurementVector,
    PreambleMatrix,
    binomial_weight_pmf,
    transition_profile,
)

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "EnumerationCapError",
    "LikelihoodModel",
    "DecoderOutput",
    "log_likelihood",
    "ml_exhaustive",
    "algorithm1_decode",
    "partition_test_count",
    "ncomp_decode",
    "BpState",
    "bp_marginals",
    "factor_messages",
    "bp_st",
    "bp_sht",
    "bp_aht",
]

DEFAULT_ENUMERATION_CAP = 2_000_000


class EnumerationCapError(ValueError):
    """Exhaustive subset enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class LikelihoodModel:
    """Per-count log-likelihood table of the detector bit.

    log_table[v, z] = log2 P(bit = z | scheduled-active count = v), for
    v = 0..k_max.  Built once per experiment and shared by the decoders.
    """

    params: ChannelParams
    log_table: np.ndarray

    @classmethod
    def build(cls, params: ChannelParams, k_max: int) -> "LikelihoodModel":
        if k_max < 0:
            raise ValueError("k_max must be non-negative")
        prob_zero = transition_profile(params, k_max)
        with np.errstate(divide="ignore"):
            table = np.stack([np.log2(prob_zero), np.log2(1.0 - prob_zero)], axis=1)
        table.flags.writeable = False
        return cls(params, table)

    @property
    def k_max(self) -> int:
        return self.log_table.shape[0] - 1


def log_likelihood(z: MeasurementVector, weights, model: LikelihoodModel) -> float:
    """log2 P(measurements | per-slot scheduled-active counts)."""
    w = np.asarray(weights, dtype=np.int64)
    if w.shape != (len(z),):
        raise ValueError("weights must hold one count per measurement slot")
    if w.size and (w.min() < 0 or w.max() > model.k_max):
        raise ValueError("counts must lie within the model table, 0..k_max")
    return float(model.log_table[w, z.bits].sum())


@dataclass(frozen=True)
class DecoderOutput:
    """Uniform decoder result.

    `estimate` is None exactly when `outcome` reports a countable decoding
    error (the partition-test decoder can fail with "no_set_passed" or
    "multiple_sets_passed"); `scores` always has one entry per device and the
    estimate is recoverable from it by the decoder's declared output rule.
    """

    estimate: ActivitySet | None
    scores: np.ndarray
    decoder: str
    converged: bool | None = None
    outcome: str = "decoded"


def _top_k_indices(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores; ties resolve to the smaller index."""
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return np.sort(order[:k])


def _check_decode_args(z: MeasurementVector, preambles: PreambleMatrix, k: int):
    if len(z) != preambles.n_uses:
        raise ValueError("measurement length must match the preamble rows")
    if not 1 <= k <= preambles.total_devices:
        raise ValueError("k must lie in 1..total_devices")


def ml_exhaustive(z: MeasurementVector, preambles: PreambleMatrix, k: int,
                  model: LikelihoodModel,
                  enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> DecoderOutput:
    """Exhaustive likelihood scan over all size-k device sets.

    Ties resolve to the lexicographically smallest index tuple.  Refuses to
    run when C(total_devices, k) exceeds `enumeration_cap`.
    """
    _check_decode_args(z, preambles, k)
    ell = preambles.total_devices
    total = math.comb(ell, k)
    if total > enumeration_cap:
        raise EnumerationCapError(
            f"C({ell},{k}) = {total} candidate sets exceed the enumeration cap"
            f" of {enumeration_cap}")
    if model.k_max < k:
        raise ValueError("likelihood table too shallow: need k_max >= k")
    n = preambles.n_uses
    x = preambles.entries
    per_slot = np.ascontiguousarray(model.log_table[:, z.bits])  # (k_max+1, n)
    slot_idx = np.arange(n)
    chunk = max(1, 8_000_000 // max(1, n * k))
    best_ll = -np.inf
    best = None
    combos = itertools.combinations(range(ell), k)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        idx = np.asarray(block, dtype=np.int64)            # (m, k)
        counts = x[:, idx].sum(axis=2, dtype=np.int64)     # (n, m)
        ll = per_slot[counts, slot_idx[:, None]].sum(axis=0)
        j = int(np.argmax(ll))
        if ll[j] > best_ll:                                # strict: keeps earliest tie
            best_ll = float(ll[j])
            best = block[j]
    estimate = ActivitySet.from_zero_based(best, ell)
    return DecoderOutput(estimate, estimate.to_status_vector().astype(np.float64),
                         "ml")


def partition_test_count(k: int) -> int:
    """Number of partition threshold tests a candidate set must clear."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2**k - 1


def algorithm1_decode(z: MeasurementVector, preambles: PreambleMatrix, k: int,
                      model: LikelihoodModel, rho: float, sampling_prob: float,
                      enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> DecoderOutput:
    """Partition threshold-test decoder over all size-k candidate sets.

    For each candidate the k devices are split every possible way into a
    tested part (size j) and a kept part; the log-likelihood ratio between
    "whole candidate active" and "kept part active, tested part unknown"
    must clear a level-j threshold
    log2(k * C(k,j) * C(ell-k, j) / rho) for every split.  The tested
    part's contribution under the null is marginalized with a
    Binomial(j, sampling_prob) mixture.  A candidate passes when all
    2^k - 1 tests clear; decoding succeeds only if exactly one candidate
    passes, otherwise the outcome is a countable error.
    """
    _check_decode_args(z, preambles, k)
    if rho <= 0:
        raise ValueError("rho must be positive")
    if not 0.0 < sampling_prob < 1.0:
        raise ValueError("sampling_prob must lie strictly inside (0, 1)")
    ell = preambles.total_devices
    if ell - k < k:
        raise ValueError("population too small: need ell >= 2k for the level"
                         " thresholds to be finite")
    total = math.comb(ell, k)
    if total > enumeration_cap:
        raise EnumerationCapError(
            f"C({ell},{k}) = {total} candidate sets exceed the enumeration cap"
            f" of {enumeration_cap}")
    if model.k_max < k:
        raise ValueError("likelihood table too shallow: need k_max >= k")

    n = preambles.n_uses
    x = preambles.entries.astype(np.int64)
    zbits = z.bits
    slot_idx = np.arange(n)
    per_slot_full = model.log_table[:, zbits]  # (k_max+1, n)

    prob_zero = transition_profile(model.params, k)
    thresholds = {}
    mixed_per_slot = {}
    for j in range(1, k + 1):
        # Level-j threshold: the log of the number of candidate sets that can
        # disagree with the truth in exactly j devices (times k/rho), so that a
        # change-of-measure union bound leaves at most rho of wrong-set mass.
        thresholds[j] = math.log2(k * math.comb(k, j) * math.comb(ell - k, j) / rho)
        mix_pmf = binomial_weight_pmf(j, sampling_prob).pmf
        # mixed0[u] = sum_a pmf[a] * P(bit 0 | u + a), u = 0..k-j
        mixed0 = np.correlate(prob_zero, mix_pmf, mode="valid")
        with np.errstate(divide="ignore"):
            log_mix = np.stack([np.log2(mixed0), np.log2(1.0 - mixed0)], axis=1)
        mixed_per_slot[j] = log_mix[:, zbits]  # (k-j+1, n)

    required = partition_test_count(k)
    passing = []
    denom_memo = {}
    for cand in itertools.combinations(range(ell), k):
        counts = x[:, cand].sum(axis=1)
        ll_full = float(per_slot_full[counts, slot_idx].sum())
        cleared = 0
        for j in range(1, k + 1):
            all_pass = True
            for kept in itertools.combinations(cand, k - j):
                ll_kept = denom_memo.get(kept)
                if ll_kept is None:
                    kept_counts = x[:, kept].sum(axis=1) if kept else np.zeros(n, dtype=np.int64)
                    ll_kept = float(mixed_per_slot[j][kept_counts, slot_idx].sum())
                    denom_memo[kept] = ll_kept
                if not ll_full - ll_kept > thresholds[j]:
                    all_pass = False
                    break
            if all_pass:
                cleared += math.comb(k, j)
        if cleared == required:
            passing.append(cand)

    scores = np.zeros(ell, dtype=np.float64)
    for cand in passing:
        scores[list(cand)] += 1.0
    if len(passing) == 1:
        estimate = ActivitySet.from_zero_based(passing[0], ell)
        return DecoderOutput(estimate, scores, "algorithm1")
    outcome = "no_set_passed" if not passing else "multiple_sets_passed"
    return DecoderOutput(None, scores, "algorithm1", outcome=outcome)


def ncomp_decode(z: MeasurementVector, preambles: PreambleMatrix, k: int) -> DecoderOutput:
    """Rank devices by the fraction of their 'On' slots whose bit reads 1.

    Devices never scheduled 'On' score -inf; the top k scores win, ties to
    the smaller device index.
    """
    _check_decode_args(z, preambles, k)
    x = preambles.entries
    scheduled = x.sum(axis=0, dtype=np.int64)
    hits = z.bits.astype(np.float64) @ x
    scores = np.full(x.shape[1], -np.inf)
    np.divide(hits, scheduled, out=scores, where=scheduled > 0)
    members = _top_k_indices(scores, k)
    estimate = ActivitySet.from_zero_based(members, preambles.total_devices)
    return DecoderOutput(estimate, scores, "ncomp")


def bp_st(state: BpState, k: int) -> DecoderOutput:
    """Fixed-size rule: the k devices with the largest marginals."""
    if not 1 <= k <= state.marginals.shape[0]:
        raise ValueError("k must lie in 1..total_devices")
    members = _top_k_indices(state.marginals, k)
    estimate = ActivitySet.from_zero_based(members, state.marginals.shape[0])
    return DecoderOutput(estimate, state.marginals.copy(), "bp_st", state.converged)


def bp_sht(state: BpState) -> DecoderOutput:
    """Size-agnostic rule with the symmetric threshold: marginal > 0.5."""
    members = np.flatnonzero(state.marginals > 0.5)
    estimate = ActivitySet.from_zero_based(members, state.marginals.shape[0])
    return DecoderOutput(estimate, state.marginals.copy(), "bp_sht", state.converged)


def bp_aht(state: BpState, eta: float) -> DecoderOutput:
    """Size-agnostic rule with an adjustable threshold: marginal > eta."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie strictly inside (0, 1)")
    members = np.flatnonzero(state.marginals > eta)
    estimate = ActivitySet.from_zero_based(members, state.marginals.shape[0])
    return DecoderOutput(estimate, state.marginals.copy(), "bp_aht", state.converged)
