"""Simulation, capacity and decoding toolkit for energy-detection based
device-activity identification over a shared fading channel."""

from .capacity import (
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
from .channel import (
    RngSeed,
    empirical_transition,
    generate_preambles,
    simulate_equivalent,
    simulate_fading,
)
from .decoders import (
    BpState,
    DecoderOutput,
    EnumerationCapError,
    LikelihoodModel,
    algorithm1_decode,
    bp_aht,
    bp_marginals,
    bp_sht,
    bp_st,
    factor_messages,
    log_likelihood,
    ml_exhaustive,
    ncomp_decode,
    partition_test_count,
)
from .metrics import (
    DecoderSpec,
    RecoveryCriterion,
    SweepRecord,
    TrialOutcome,
    judge,
    monte_carlo,
    run_cell,
)
from .svgplot import (
    LineSeries,
    crossing_point,
    nice_ticks,
    render_line_chart,
)
from .model import (
    ActivitySet,
    ChannelParams,
    MeasurementVector,
    NetworkConfig,
    PreambleMatrix,
    WeightDistribution,
    binary_entropy,
    binomial_weight_pmf,
    transition_prob_zero,
    transition_profile,
)

__version__ = "0.1.0"
