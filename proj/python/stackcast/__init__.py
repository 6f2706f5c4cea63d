"""Adaptive stacking of binned probabilistic forecasts."""

from ._core import (
    DomainError,
    IoError,
    alpha_of_t,
    bin_index_of,
    canonical_grid_edges,
    combine,
    digamma,
    expected_log_pi,
    fit_em,
    fit_vi,
    grid_mle_oracle,
    log_likelihood,
    log_score,
    run_adaptive_files,
)

__all__ = [
    "DomainError",
    "IoError",
    "alpha_of_t",
    "bin_index_of",
    "canonical_grid_edges",
    "combine",
    "digamma",
    "expected_log_pi",
    "fit_em",
    "fit_vi",
    "grid_mle_oracle",
    "log_likelihood",
    "log_score",
    "run_adaptive_files",
]
