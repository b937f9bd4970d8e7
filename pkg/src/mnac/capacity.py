"""Achievable-rate and identification-cost computations.

Conditioned on the per-slot 'On' count V ~ Binomial(k, q), the detector bit is
a binary channel output, and the operating rate is the mutual information
I(V; Z) = H(Z) - H(Z | V) in bits.  The pair (threshold, q) is chosen to
maximize that rate; the number of channel uses needed to identify k active
devices out of ell then scales as k * log2(ell) / rate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import binary_entropy, binomial_weight_pmf, transition_profile, ChannelParams

__all__ = [
    "RatePoint",
    "CostReport",
    "rate_at",
    "optimize_rate",
    "optimize_threshold",
    "optimize_sampling",
    "min_identification_cost",
    "gaussian_baseline",
    "sublinear_lower_bound",
]

# Coarse search grid; refinement takes over below these resolutions.
_GAMMA_GRID = 512
_Q_GRID = 499
_REFINE_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RatePoint:
    """An operating point of the count-to-bit channel.

    threshold / sampling_prob : the operating pair.
    rate : mutual information in bits per channel use, in [0, 1].
    prob_zero : marginal probability of a sub-threshold reading.
    """

    threshold: float
    sampling_prob: float
    rate: float
    prob_zero: float

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must lie in [0, 1] bits")
        if not 0.0 <= self.prob_zero <= 1.0:
            raise ValueError("prob_zero must be a probability")


@dataclass(frozen=True)
class CostReport:
    """Channel-use budgets for identifying k active devices out of ell."""

    n_required: float
    c_star: float
    gamma_star: float
    q_star: float
    gaussian_baseline: float
    sublinear_lower_bound: float


def rate_at(params: ChannelParams, k: int, sampling_prob: float) -> RatePoint:
    """Mutual information of the count-to-bit channel at a fixed operating pair."""
    if k < 1:
        raise ValueError("k must be at least 1")
    pmf = binomial_weight_pmf(k, sampling_prob).pmf
    prob_zero = transition_profile(params, k)
    # mixture of probabilities: clip the dot product's last-ulp excursions
    marginal = float(min(max(np.dot(pmf, prob_zero), 0.0), 1.0))
    rate = binary_entropy(marginal) - float(np.dot(pmf, binary_entropy(prob_zero)))
    # Clamp roundoff: concavity of the entropy makes the true value >= 0.
    rate = min(max(rate, 0.0), 1.0)
    return RatePoint(params.threshold, sampling_prob, rate, marginal)


def _weight_pmf_grid(k: int, qs: np.ndarray) -> np.ndarray:
    """Binomial(k, q) pmf rows for each q in `qs`, shape (len(qs), k+1)."""
    pmf = np.empty((qs.shape[0], k + 1), dtype=np.float64)
    pmf[:, 0] = (1.0 - qs) ** k
    ratio = qs / (1.0 - qs)
    for v in range(k):
        pmf[:, v + 1] = pmf[:, v] * ((k - v) / (v + 1)) * ratio
    return pmf


def _rate_grid(on_power: float, fading_var: float, noise_var: float, k: int,
               gammas: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Rate surface over a gamma x q grid, shape (len(qs), len(gammas))."""
    counts = np.arange(k + 1, dtype=np.float64)
    mean_energy = counts * fading_var * on_power + noise_var
    prob_zero = -np.expm1(-gammas[:, None] / mean_energy[None, :])  # (G, k+1)
    pmf = _weight_pmf_grid(k, qs)                                   # (Q, k+1)
    marginal = np.clip(pmf @ prob_zero.T, 0.0, 1.0)                 # (Q, G)
    cond = pmf @ binary_entropy(prob_zero).T                        # (Q, G)
    return binary_entropy(marginal) - cond


def _golden_max(fun, lo: float, hi: float, tol: float):
    """Golden-section maximization of a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = fun(x1), fun(x2)
    while (b - a) > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = fun(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def default_gamma_bounds(on_power: float, fading_var: float, noise_var: float,
                         k: int) -> tuple:
    """Threshold search range: spans noise-floor-only up to far above the
    largest possible mean received energy."""
    return 1e-3 * noise_var, 1e3 * (k * fading_var * on_power + noise_var)


def optimize_rate(on_power: float, fading_var: float, noise_var: float, k: int,
                  gamma_points: int = _GAMMA_GRID, q_points: int = _Q_GRID,
                  refine_tol: float = _REFINE_TOL) -> RatePoint:
    """Maximize the rate over (threshold, sampling_prob) jointly.

    Coarse log-spaced threshold grid x linear sampling-prob grid, then
    coordinate-wise golden-section refinement (threshold searched in log
    space) down to `refine_tol` relative parameter tolerance.  Near-equal
    optima resolve to the smallest threshold because the grid scan keeps
    the first maximizer in threshold-ascending order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    gamma_lo, gamma_hi = default_gamma_bounds(on_power, fading_var, noise_var, k)
    gammas = np.geomspace(gamma_lo, gamma_hi, gamma_points)
    qs = np.linspace(0.001, 0.999, q_points)
    surface = _rate_grid(on_power, fading_var, noise_var, k, gammas, qs)
    flat = int(np.argmax(surface))  # row-major: ties resolve to smallest q, then gamma
    qi, gi = divmod(flat, gammas.shape[0])

    def rate_of(log_gamma: float, q: float) -> float:
        params = ChannelParams(on_power, fading_var, noise_var, math.exp(log_gamma))
        return rate_at(params, k, q).rate

    log_gamma = math.log(gammas[gi])
    q = float(qs[qi])
    # Refinement brackets: one coarse cell either side of the grid optimum.
    lg_lo = math.log(gammas[max(gi - 1, 0)])
    lg_hi = math.log(gammas[min(gi + 1, gammas.shape[0] - 1)])
    q_lo = float(qs[max(qi - 1, 0)])
    q_hi = float(qs[min(qi + 1, qs.shape[0] - 1)])
    for _ in range(64):
        new_lg, _ = _golden_max(lambda lg: rate_of(lg, q), lg_lo, lg_hi, refine_tol)
        new_q, _ = _golden_max(lambda qq: rate_of(new_lg, qq), q_lo, q_hi, refine_tol)
        moved = max(abs(new_lg - log_gamma), abs(new_q - q))
        log_gamma, q = new_lg, new_q
        # Re-center the brackets so the search can walk out of the initial cell.
        half_lg = (lg_hi - lg_lo) / 2.0
        lg_lo, lg_hi = log_gamma - half_lg, log_gamma + half_lg
        half_q = (q_hi - q_lo) / 2.0
        q_lo = max(1e-9, q - half_q)
        q_hi = min(1.0 - 1e-9, q + half_q)
        if moved < refine_tol:
            break
    params = ChannelParams(on_power, fading_var, noise_var, math.exp(log_gamma))
    return rate_at(params, k, q)


def optimize_threshold(on_power: float, fading_var: float, noise_var: float,
                       k: int, sampling_prob: float,
                       gamma_points: int = _GAMMA_GRID,
                       refine_tol: float = _REFINE_TOL) -> RatePoint:
    """Maximize the rate over the threshold alone, sampling_prob held fixed."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not 0.0 < sampling_prob < 1.0:
        raise ValueError("sampling_prob must lie strictly inside (0, 1)")
    gamma_lo, gamma_hi = default_gamma_bounds(on_power, fading_var, noise_var, k)
    gammas = np.geomspace(gamma_lo, gamma_hi, gamma_points)
    rates = _rate_grid(on_power, fading_var, noise_var, k, gammas,
                       np.array([sampling_prob]))[0]
    gi = int(np.argmax(rates))

    def rate_of(log_gamma: float) -> float:
        params = ChannelParams(on_power, fading_var, noise_var,
                               math.exp(log_gamma))
        return rate_at(params, k, sampling_prob).rate

    lg, _ = _golden_max(rate_of,
                        math.log(gammas[max(gi - 1, 0)]),
                        math.log(gammas[min(gi + 1, gamma_points - 1)]),
                        refine_tol)
    params = ChannelParams(on_power, fading_var, noise_var, math.exp(lg))
    return rate_at(params, k, sampling_prob)


def optimize_sampling(params: ChannelParams, k: int,
                      q_points: int = _Q_GRID,
                      refine_tol: float = _REFINE_TOL) -> RatePoint:
    """Maximize the rate over sampling_prob alone, threshold held fixed."""
    if k < 1:
        raise ValueError("k must be at least 1")
    qs = np.linspace(0.001, 0.999, q_points)
    rates = _rate_grid(params.on_power, params.fading_var, params.noise_var,
                       k, np.array([params.threshold]), qs)[:, 0]
    qi = int(np.argmax(rates))

    def rate_of(q: float) -> float:
        return rate_at(params, k, q).rate

    q, _ = _golden_max(rate_of, float(qs[max(qi - 1, 0)]),
                       float(qs[min(qi + 1, q_points - 1)]), refine_tol)
    return rate_at(params, k, float(q))


def gaussian_baseline(ell: int, k: int, avg_power: float) -> float:
    """Channel-use budget when the receiver is coherent and inputs Gaussian,
    at matched average transmit power: k * log2(ell) / (0.5 * log2(1 + k * avg_power))."""
    if avg_power <= 0:
        raise ValueError("avg_power must be positive")
    _check_population(ell, k)
    return k * math.log2(ell) / (0.5 * math.log2(1.0 + k * avg_power))


def sublinear_lower_bound(ell: int, k: int, alpha: float, c_star: float) -> float:
    """Converse-side budget k * (1 - alpha) * log2(ell) / c_star; tight at alpha = 0."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if c_star <= 0:
        raise ValueError("c_star must be positive")
    _check_population(ell, k)
    return k * (1.0 - alpha) * math.log2(ell) / c_star


def _check_population(ell: int, k: int) -> None:
    if ell < 2:
        raise ValueError("ell must be at least 2")
    if not 1 <= k < ell:
        raise ValueError("k must satisfy 1 <= k < ell")


def min_identification_cost(ell: int, k: int, on_power: float,
                            fading_var: float = 1.0, noise_var: float = 1.0,
                            alpha: float = 0.0) -> CostReport:
    """Channel uses needed for reliable identification at the optimal operating
    pair, with the coherent-Gaussian baseline and the converse bound alongside."""
    _check_population(ell, k)
    best = optimize_rate(on_power, fading_var, noise_var, k)
    n_required = k * math.log2(ell) / best.rate
    avg_power = best.sampling_prob * on_power
    return CostReport(
        n_required=n_required,
        c_star=best.rate,
        gamma_star=best.threshold,
        q_star=best.sampling_prob,
        gaussian_baseline=gaussian_baseline(ell, k, avg_power),
        sublinear_lower_bound=sublinear_lower_bound(ell, k, alpha, best.rate),
    )
