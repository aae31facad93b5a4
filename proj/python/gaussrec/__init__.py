"""Gaussian probabilistic forecast reconciliation."""

from ._gaussrec import (
    NumericalError,
    crps_empirical,
    crps_gaussian,
    energy_score,
    fit_arma,
    g_matrix,
    interval_score,
    logscore,
    reconcile,
    run_setup1,
    sample_cov,
    shrink_cov,
    summing_matrix,
    variogram_score,
)

__all__ = [
    "NumericalError",
    "crps_empirical",
    "crps_gaussian",
    "energy_score",
    "fit_arma",
    "g_matrix",
    "interval_score",
    "logscore",
    "reconcile",
    "run_setup1",
    "sample_cov",
    "shrink_cov",
    "summing_matrix",
    "variogram_score",
]
