"""Channel-power prediction under fixed and random feedback delays."""

from ._core import (  # noqa: F401
    ArrivalSchedule,
    BlockOutcome,
    ChannelTrace,
    ConfigError,
    DopplerSpec,
    ExperimentConfig,
    McsTable,
    NumericalError,
    PowerTrace,
    bessel_j0,
    elliptic_k,
    exp_weighted_mean,
    make_schedule,
    generate_trace,
    power_trace,
    empirical_autocorr,
    iir_predict,
    impulse_response_predict,
    amplitude_predict_power,
    empirical_mse,
    bias_factor_closed_form,
    rho_fixed,
    mean_rho,
    mean_rho_sq,
    mse_fixed,
    mse_random,
    alpha_opt_fixed,
    alpha_opt_random,
    alpha_opt_numeric,
    power_correlation,
    select_mcs,
    evaluate_block,
    fixed_rate_index,
    run_mse_curves,
    run_alpha_opt_sweep,
    run_throughput,
)

__version__ = "0.1.0"
