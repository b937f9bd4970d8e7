"""Recovery criteria, trial judgment and the Monte Carlo sweep engine.

A cell is one (population, channel, decoder set, criterion set) combination
evaluated over many independent trials.  Every trial draws its randomness
from a stream derived from (seed, stream, salt..., trial index), so results
are bit-reproducible regardless of worker count or which other cells run,
and decoders sharing a trial see identical measurements, which pairs the
estimates across decoders and criteria.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import RngSeed, _draw_preambles, _simulate_equivalent_rng
from .decoders import (
    LikelihoodModel,
    algorithm1_decode,
    bp_aht,
    bp_marginals,
    bp_sht,
    bp_st,
    ml_exhaustive,
    ncomp_decode,
    DEFAULT_ENUMERATION_CAP,
)
from .model import ActivitySet, ChannelParams, NetworkConfig

__all__ = [
    "RecoveryCriterion",
    "TrialOutcome",
    "DecoderSpec",
    "SweepRecord",
    "judge",
    "run_cell",
    "monte_carlo",
    "resolve_workers",
]

_CODEBOOK_TAG = 0
_TRIAL_TAG = 1

DECODER_NAMES = ("ml", "algorithm1", "ncomp", "bp_st", "bp_sht", "bp_aht")


@dataclass(frozen=True)
class RecoveryCriterion:
    """What counts as a successful identification.

    kind = "exact"             : estimate equals the truth as a set.
    kind = "partial"           : misdetections <= k * (1 - zeta/100).
    kind = "partial_unknown_k" : partial, plus the estimated size must lie in
                                 [k*(1-size_deviation), k*(1+size_deviation)].
    """

    kind: str
    zeta: float = 100.0
    size_deviation: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exact", "partial", "partial_unknown_k"):
            raise ValueError(f"unknown criterion kind: {self.kind!r}")
        if not 0.0 < self.zeta <= 100.0:
            raise ValueError("zeta must lie in (0, 100]")
        if self.size_deviation < 0.0:
            raise ValueError("size_deviation must be non-negative")
        if self.kind == "exact" and self.zeta != 100.0:
            raise ValueError("exact recovery fixes zeta = 100")
        if self.kind != "partial_unknown_k" and self.size_deviation != 0.0:
            raise ValueError("size_deviation applies only to partial_unknown_k")

    @classmethod
    def exact(cls) -> "RecoveryCriterion":
        return cls("exact")

    @classmethod
    def partial(cls, zeta: float) -> "RecoveryCriterion":
        return cls("partial", zeta=zeta)

    @classmethod
    def partial_unknown_k(cls, zeta: float, size_deviation: float) -> "RecoveryCriterion":
        return cls("partial_unknown_k", zeta=zeta, size_deviation=size_deviation)

    def descriptor(self) -> str:
        """Stable label for CSV output (zeta is carried in its own column)."""
        if self.kind == "partial_unknown_k":
            return f"unknown_k@{self.size_deviation:g}"
        return self.kind


@dataclass(frozen=True)
class TrialOutcome:
    misdetections: int
    false_positives: int
    estimated_size: int
    success: bool


def judge(truth: ActivitySet, estimate: ActivitySet,
          criterion: RecoveryCriterion) -> TrialOutcome:
    """Score one estimate against the ground truth under a criterion."""
    if truth.total_devices != estimate.total_devices:
        raise ValueError("truth and estimate disagree on population size")
    truth_set = set(truth.members)
    est_set = set(estimate.members)
    missed = len(truth_set - est_set)
    extra = len(est_set - truth_set)
    k = len(truth_set)
    if criterion.kind == "exact":
        ok = missed == 0 and extra == 0
    else:
        # 1e-9 guards the boundary against float rounding in k*(1 - zeta/100).
        ok = missed <= k * (1.0 - criterion.zeta / 100.0) + 1e-9
        if ok and criterion.kind == "partial_unknown_k":
            lo = k * (1.0 - criterion.size_deviation) - 1e-9
            hi = k * (1.0 + criterion.size_deviation) + 1e-9
            ok = lo <= len(est_set) <= hi
    return TrialOutcome(missed, extra, len(est_set), bool(ok))


@dataclass(frozen=True)
class DecoderSpec:
    """A decoder selection plus its tuning knobs (unused knobs ignored)."""

    name: str
    rho: float = 1.0
    eta: float = 0.5
    damping: float = 0.5
    max_iters: int = 50
    tol: float = 1e-6
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    def __post_init__(self):
        if self.name not in DECODER_NAMES:
            raise ValueError(f"unknown decoder: {self.name!r}")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie strictly inside (0, 1)")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.enumeration_cap < 1:
            raise ValueError("enumeration_cap must be at least 1")


@dataclass(frozen=True)
class SweepRecord:
    """One Monte Carlo cell result for one (decoder, criterion) pair."""

    ell: int
    k: int
    n: int
    snr_db: float
    sampling_prob: float
    threshold: float
    decoder: str
    criterion: str
    zeta: float
    trials: int
    successes: int
    success_prob: float
    stderr: float
    wall_time: float


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else MNAC_THREADS (0 or unset = auto)."""
    if workers is None:
        env = os.environ.get("MNAC_THREADS", "").strip()
        if env:
            try:
                workers = int(env)
            except ValueError as exc:
                raise ValueError("MNAC_THREADS must be an integer") from exc
        else:
            workers = 0
    if workers < 0:
        raise ValueError("worker count must be non-negative")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def _decode_one(spec: DecoderSpec, z, preambles, cfg: NetworkConfig,
                model: LikelihoodModel, bp_cache: dict):
    k = cfg.active_devices
    if spec.name == "ncomp":
        return ncomp_decode(z, preambles, k)
    if spec.name == "ml":
        return ml_exhaustive(z, preambles, k, model, spec.enumeration_cap)
    if spec.name == "algorithm1":
        return algorithm1_decode(z, preambles, k, model, spec.rho,
                                 cfg.sampling_prob, spec.enumeration_cap)
    # BP rules share one marginal computation per tuning signature.
    key = (spec.damping, spec.max_iters, spec.tol)
    state = bp_cache.get(key)
    if state is None:
        state = bp_marginals(z, preambles, model, prior=k / cfg.total_devices,
                             max_iters=spec.max_iters, damping=spec.damping,
                             tol=spec.tol)
        bp_cache[key] = state
    if spec.name == "bp_st":
        return bp_st(state, k)
    if spec.name == "bp_sht":
        return bp_sht(state)
    return bp_aht(state, spec.eta)


def run_cell(cfg: NetworkConfig, params: ChannelParams, decoder_specs,
             criteria, trials: int, seed: RngSeed, *, salt=(),
             fixed_codebook: bool = False, workers: int | None = None,
             snr_db: float | None = None) -> list:
    """Monte Carlo estimate of success probability for one cell.

    Returns one SweepRecord per (decoder, criterion) pair, all evaluated on
    the same trials.  Per-trial randomness comes from streams derived from
    (seed, stream, salt..., trial), so the records are independent of worker
    count and of which other decoders or cells run alongside.
    """
    decoder_specs = list(decoder_specs)
    criteria = list(criteria)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not decoder_specs or not criteria:
        raise ValueError("need at least one decoder and one criterion")
    salt = tuple(int(s) for s in salt)
    k = cfg.active_devices
    ell = cfg.total_devices
    model = LikelihoodModel.build(params, k)
    codebook = _draw_preambles(seed.child(_CODEBOOK_TAG, *salt), cfg) \
        if fixed_codebook else None

    def one_trial(t: int) -> np.ndarray:
        rng = seed.child(_TRIAL_TAG, *salt, t)
        truth_idx = np.sort(rng.choice(ell, size=k, replace=False))
        truth = ActivitySet.from_zero_based(truth_idx, ell)
        preambles = codebook if codebook is not None else _draw_preambles(rng, cfg)
        z = _simulate_equivalent_rng(preambles, truth, params, rng)
        ok = np.zeros((len(decoder_specs), len(criteria)), dtype=bool)
        bp_cache = {}
        for di, spec in enumerate(decoder_specs):
            out = _decode_one(spec, z, preambles, cfg, model, bp_cache)
            for ci, crit in enumerate(criteria):
                if out.estimate is None:
                    ok[di, ci] = False
                else:
                    ok[di, ci] = judge(truth, out.estimate, crit).success
        return ok

    start = time.perf_counter()
    n_workers = min(resolve_workers(workers), trials)
    if n_workers <= 1:
        outcomes = [one_trial(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(one_trial, range(trials)))
    wall = time.perf_counter() - start

    # Ordered fold: identical totals whatever the completion schedule was.
    successes = np.zeros((len(decoder_specs), len(criteria)), dtype=np.int64)
    for ok in outcomes:
        successes += ok
    records = []
    for di, spec in enumerate(decoder_specs):
        for ci, crit in enumerate(criteria):
            wins = int(successes[di, ci])
            p_hat = wins / trials
            records.append(SweepRecord(
                ell=ell, k=k, n=cfg.preamble_len,
                snr_db=10.0 * math.log10(params.snr()) if snr_db is None else snr_db,
                sampling_prob=cfg.sampling_prob, threshold=params.threshold,
                decoder=spec.name, criterion=crit.descriptor(), zeta=crit.zeta,
                trials=trials, successes=wins, success_prob=p_hat,
                stderr=float(np.sqrt(p_hat * (1.0 - p_hat) / trials)),
                wall_time=wall,
            ))
    return records


def monte_carlo(cfg: NetworkConfig, params: ChannelParams, decoder_spec: DecoderSpec,
                criterion: RecoveryCriterion, trials: int, seed: RngSeed,
                **kwargs) -> SweepRecord:
    """Single-decoder, single-criterion convenience wrapper around run_cell."""
    return run_cell(cfg, params, [decoder_spec], [criterion], trials, seed,
                    **kwargs)[0]
