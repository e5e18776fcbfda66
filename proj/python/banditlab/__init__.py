"""Best-arm identification simulation lab (Python bindings)."""

from ._core import (
    CSV_HEADER,
    OracleUnsupported,
    choose_m_non_interactive,
    estimate,
    expected_hitting_time_oracle,
    fano_gap,
    fit_loglog_slope,
    hitting_prob_oracle,
    kl_bernoulli,
    kl_to_uniform,
    oracle,
    posterior,
    run,
    sweep,
    sweep_csv,
    tv_binomial,
)

__all__ = [
    "CSV_HEADER",
    "OracleUnsupported",
    "choose_m_non_interactive",
    "estimate",
    "expected_hitting_time_oracle",
    "fano_gap",
    "fit_loglog_slope",
    "hitting_prob_oracle",
    "kl_bernoulli",
    "kl_to_uniform",
    "oracle",
    "posterior",
    "run",
    "sweep",
    "sweep_csv",
    "tv_binomial",
]
