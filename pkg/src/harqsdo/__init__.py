"""Incremental-redundancy hybrid ARQ design toolkit for erasure channels."""

from .codes import (
    CodeParams,
    MomentPair,
    decode_success_prob,
    decode_success_curve,
    decodable_count_pmf,
    decodable_count_moments,
    erdos_borwein_constant,
    dst_constant,
    overhead_moment,
    asymptotic_round_moments,
)
from .channel import (
    Schedule,
    RoundLengthLaw,
    observed_pmf,
    erasures_pmf,
    ack_prob,
    ack_curve,
    round_length_law,
    round_length_moments,
    expected_round_symbols,
    throughput,
)
from .sdo import (
    CdfModel,
    OptimizerReport,
    StepUnderflowError,
    SearchSpaceError,
    std_normal_ccdf,
    std_normal_ccdf_prime,
    sdo_step,
    sdo_step_continuous,
    sdo_schedule,
    smoothed_expected_symbols,
    optimize,
    exhaustive_search,
)
from .simulate import (
    Gf2Matrix,
    RoundOutcome,
    EstimateReport,
    GENERATOR_NAME,
    trial_rng,
    gf2_rank,
    is_decodable,
    simulate_round,
    estimate,
    sample_decode_counts,
    sample_round_lengths,
)

__version__ = "0.1.0"
