"""Univariate survival machinery: special functions, distributions, estimators."""

from .criteria import information_criteria
from .distributions import (
    FAMILIES,
    PARAM_NAMES,
    DistFamily,
    dist_cdf,
    dist_logpdf,
    dist_logsf,
    dist_mean,
    dist_pdf,
    dist_quantile,
    dist_sample,
    dist_survival,
)
from .nonparametric import (
    KaplanMeier,
    KmCurve,
    aft_diagnostic_points,
    kaplan_meier,
    kde_density,
    silverman_bandwidth,
)
from .special import (
    chi_square_sf,
    digamma,
    log_gamma,
    std_normal_cdf,
    std_normal_quantile,
    trigamma,
)
from .univariate import FittedDistribution, ParametricSurvivalFitter, fit_all, fit_univariate

__all__ = [
    "FAMILIES",
    "PARAM_NAMES",
    "DistFamily",
    "FittedDistribution",
    "KaplanMeier",
    "KmCurve",
    "ParametricSurvivalFitter",
    "aft_diagnostic_points",
    "chi_square_sf",
    "digamma",
    "dist_cdf",
    "dist_logpdf",
    "dist_logsf",
    "dist_mean",
    "dist_pdf",
    "dist_quantile",
    "dist_sample",
    "dist_survival",
    "fit_all",
    "fit_univariate",
    "information_criteria",
    "kaplan_meier",
    "kde_density",
    "log_gamma",
    "silverman_bandwidth",
    "std_normal_cdf",
    "std_normal_quantile",
    "trigamma",
]
