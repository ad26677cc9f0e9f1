"""Capacity of random channels with large alphabets.

Library layout:

- `channel`      types and information measures over finite alphabets (bits)
- `capacity`     dual bounds and the certified bracket solver
- `distributions` gain-entry catalog: samplers, moments, asymptotic capacity
- `ratebounds`   finite-size deviation bounds for the capacity
- `design`       experiment selection for the constrained lognormal family
- `harness`      reproducible sweep / study runners and result emitters
- `cli`          `randchan` command-line entry point
"""

from .capacity import (
    CapacityBracket,
    DualCertificate,
    dual_F,
    dual_G,
    lower_bound_uniform,
    solve_capacity,
    upper_bound_from_output,
    upper_bound_lambda0,
)
from .channel import (
    ChannelMatrix,
    DegenerateRowError,
    GainMatrix,
    ProbabilityVector,
    conditional_entropy_vector,
    entropy,
    load_channel_csv,
    load_gain_csv,
    mutual_information,
    normalize_rows,
    relative_entropy,
    save_matrix_csv,
)
from .design import (
    DesignOptimum,
    LognormalFamilyConstraints,
    design_optimum,
    evaluate_experiment,
    family_gain_upper_bound,
    lognormal_family_grid,
    lognormal_mean_variance,
    optimal_gain_search,
)
from .distributions import (
    DistributionSpec,
    MomentPair,
    analytic_moments,
    asymptotic_capacity,
    empirical_moments,
    phi_entropy,
    sample_gain_matrix,
)
from .harness import (
    DesignStudyConfig,
    DesignStudyRecord,
    SweepConfig,
    SweepRecord,
    emit_results,
    run_capacity_sweep,
    run_design_study,
)
from .ratebounds import (
    BernsteinConstants,
    InvalidRegimeError,
    RateBoundParams,
    alpha_t,
    beta_t,
    lipschitz_L,
    prop4_ub_tail,
    prop5_lb_tail,
    realized_a,
    tail_f,
    theorem2_tail,
)

__version__ = "0.1.0"
