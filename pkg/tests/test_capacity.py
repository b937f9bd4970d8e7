"""Tests for the rate optimization and channel-use budget computations."""

import math

import numpy as np
import pytest

from mnac.capacity import (
    CostReport,
    RatePoint,
    gaussian_baseline,
    min_identification_cost,
    optimize_rate,
    optimize_sampling,
    optimize_threshold,
    rate_at,
    sublinear_lower_bound,
)
from mnac.model import ChannelParams, binary_entropy, binomial_weight_pmf

# frozen: optimize_rate outputs, 12 significant digits, unit variances.
# keys are (k, snr_db); values (rate, threshold, sampling_prob).
_FROZEN_OPTIMA = {
    (1, 0.0): (0.0536623482174, 2.14471998681, 0.469118436962),
    (1, 10.0): (0.44089619345, 3.4371072967, 0.451401925936),
    (5, 0.0): (0.0859561930003, 2.4467898197, 0.202095629263),
    (5, 10.0): (0.479212420785, 3.53085033129, 0.12688634495),
    (25, 0.0): (0.0975161438815, 2.60991097791, 0.0519800593397),
    (25, 10.0): (0.487530968113, 3.55511427227, 0.0274410750078),
}


def _direct_rate(params: ChannelParams, k: int, q: float) -> float:
    """Textbook mutual-information formula, written independently of rate_at."""
    counts = np.arange(k + 1, dtype=np.float64)
    p_zero = 1.0 - np.exp(-params.threshold /
                          (counts * params.fading_var * params.on_power +
                           params.noise_var))
    pmf = binomial_weight_pmf(k, q).pmf
    marginal = float(pmf @ p_zero)
    return float(binary_entropy(marginal) - pmf @ binary_entropy(p_zero))


class TestRateAt:
    def test_matches_direct_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            params = ChannelParams(rng.uniform(0.2, 15.0),
                                   rng.uniform(0.3, 2.0),
                                   rng.uniform(0.3, 2.0),
                                   rng.uniform(0.05, 20.0))
            k = int(rng.integers(1, 30))
            q = float(rng.uniform(0.01, 0.99))
            point = rate_at(params, k, q)
            assert point.rate == pytest.approx(_direct_rate(params, k, q),
                                               abs=1e-12)

    def test_rate_is_a_valid_binary_channel_rate(self):
        """One output bit per use bounds the rate to [0, 1]."""
        rng = np.random.default_rng(4)
        for _ in range(100):
            params = ChannelParams(rng.uniform(0.01, 50.0),
                                   rng.uniform(0.1, 5.0),
                                   rng.uniform(0.1, 5.0),
                                   rng.uniform(1e-3, 100.0))
            k = int(rng.integers(1, 50))
            q = float(rng.uniform(0.001, 0.999))
            point = rate_at(params, k, q)
            assert 0.0 <= point.rate <= 1.0
            assert 0.0 <= point.prob_zero <= 1.0

    def test_extreme_threshold_kills_the_rate(self):
        """When the detector always reads the same bit, no information flows."""
        k, q = 4, 0.3
        saturated = rate_at(ChannelParams(1.0, 1.0, 1.0, 1e9), k, q)
        starved = rate_at(ChannelParams(1.0, 1.0, 1.0, 1e-9), k, q)
        assert saturated.rate < 1e-6
        assert starved.rate < 1e-6


class TestOptimizeRate:
    @pytest.mark.parametrize("k,snr_db", sorted(_FROZEN_OPTIMA))
    def test_frozen_optimum(self, k, snr_db):
        """Regression pin on the jointly optimized operating point."""
        want_rate, want_gamma, want_q = _FROZEN_OPTIMA[(k, snr_db)]
        point = optimize_rate(10.0 ** (snr_db / 10.0), 1.0, 1.0, k)
        assert point.rate == pytest.approx(want_rate, abs=1e-9)
        assert point.threshold == pytest.approx(want_gamma, rel=1e-6)
        assert point.sampling_prob == pytest.approx(want_q, rel=1e-6)

    def test_no_uphill_neighbors(self):
        """The returned point is a local maximum along both axes."""
        point = optimize_rate(2.0, 1.0, 1.0, 3)
        params = ChannelParams(2.0, 1.0, 1.0, point.threshold)
        base = point.rate
        for bump in (0.999, 1.001):
            assert _direct_rate(params.with_threshold(point.threshold * bump),
                                3, point.sampling_prob) <= base + 1e-12
            q_moved = min(max(point.sampling_prob * bump, 1e-6), 1 - 1e-6)
            assert _direct_rate(params, 3, q_moved) <= base + 1e-12

    def test_rate_grows_with_snr(self):
        rates = [optimize_rate(10.0 ** (s / 10.0), 1.0, 1.0, 10).rate
                 for s in (0.0, 5.0, 10.0)]
        assert rates[0] < rates[1] < rates[2]


class TestSingleAxisOptimizers:
    def test_threshold_search_is_locally_optimal(self):
        point = optimize_threshold(3.0, 1.0, 1.0, 6, 0.2)
        assert point.sampling_prob == 0.2
        params = ChannelParams(3.0, 1.0, 1.0, point.threshold)
        for bump in (0.999, 1.001):
            moved = params.with_threshold(point.threshold * bump)
            assert _direct_rate(moved, 6, 0.2) <= point.rate + 1e-12

    def test_sampling_search_is_locally_optimal(self):
        params = ChannelParams(3.0, 1.0, 1.0, 2.5)
        point = optimize_sampling(params, 6)
        assert point.threshold == 2.5
        for bump in (0.999, 1.001):
            q_moved = min(max(point.sampling_prob * bump, 1e-6), 1 - 1e-6)
            assert _direct_rate(params, 6, q_moved) <= point.rate + 1e-12

    def test_joint_optimum_dominates_single_axis(self):
        joint = optimize_rate(2.0, 1.0, 1.0, 5)
        fixed_q = optimize_threshold(2.0, 1.0, 1.0, 5, 0.4)
        assert joint.rate >= fixed_q.rate - 1e-12


class TestCostReport:
    def test_cost_identity(self):
        """n = k log2(ell) / C at the optimal rate."""
        report = min_identification_cost(200, 8, 4.0)
        assert report.n_required == pytest.approx(
            8 * math.log2(200) / report.c_star, rel=1e-12)

    # frozen: (1000, 25) budget curve at unit variances, alpha = 0.5
    @pytest.mark.parametrize("snr_db,n_req,n_gauss,bound", [
        (0.0, 2554.90626679, 414.784359012, 1277.4531334),
        (4.0, 1163.22662672, 298.684408138, 581.613313358),
        (10.0, 511.033397695, 167.515898689, 255.516698848),
    ])
    def test_frozen_budgets(self, snr_db, n_req, n_gauss, bound):
        report = min_identification_cost(1000, 25, 10.0 ** (snr_db / 10.0),
                                         alpha=0.5)
        assert report.n_required == pytest.approx(n_req, rel=1e-8)
        assert report.gaussian_baseline == pytest.approx(n_gauss, rel=1e-8)
        assert report.sublinear_lower_bound == pytest.approx(bound, rel=1e-8)

    def test_lower_bound_scales_linearly_in_alpha(self):
        """The sublinear bound is (1 - alpha) times the alpha = 0 budget."""
        report = min_identification_cost(1000, 25, 10.0, alpha=0.0)
        for alpha in (0.0, 0.3, 0.9):
            bound = sublinear_lower_bound(1000, 25, alpha, report.c_star)
            assert bound == pytest.approx((1.0 - alpha) * report.n_required,
                                          rel=1e-12)

    def test_population_validation(self):
        with pytest.raises(ValueError):
            min_identification_cost(10, 10, 1.0)
        with pytest.raises(ValueError):
            min_identification_cost(1, 1, 1.0)
        with pytest.raises(ValueError):
            sublinear_lower_bound(100, 5, 1.0, 0.5)   # alpha below one


class TestGaussianBaseline:
    def test_closed_form(self):
        """Coherent-sum baseline: k log2(ell) over half log2(1 + k P_avg)."""
        for ell, k, power in ((100, 4, 0.5), (1000, 25, 0.274), (64, 2, 3.0)):
            want = k * math.log2(ell) / (0.5 * math.log2(1.0 + k * power))
            assert gaussian_baseline(ell, k, power) == pytest.approx(
                want, rel=1e-12)

    def test_baseline_beats_noncoherent_budget(self):
        """Energy detection pays a rate penalty at every tested SNR."""
        for snr_db in (0.0, 5.0, 10.0):
            report = min_identification_cost(500, 10, 10.0 ** (snr_db / 10.0))
            assert report.gaussian_baseline < report.n_required


class TestValueObjects:
    def test_rate_point_validation(self):
        with pytest.raises(ValueError):
            RatePoint(1.0, 0.5, 1.5, 0.5)
        with pytest.raises(ValueError):
            RatePoint(1.0, 0.5, 0.5, -0.1)

    def test_cost_report_is_plain_data(self):
        report = CostReport(10.0, 0.5, 1.0, 0.2, 8.0, 9.0)
        assert report.n_required == 10.0
        assert report.sublinear_lower_bound == 9.0
