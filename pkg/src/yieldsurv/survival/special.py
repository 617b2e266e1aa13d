"""Special functions used by the likelihoods and tests.

Thin wrappers around :mod:`scipy.special` that enforce the domains the rest
of the package relies on.
"""

import numpy as np
from scipy import special as sc


def _scalar_or_array(x):
    return x.item() if np.ndim(x) == 0 else x


def std_normal_cdf(x):
    """Standard normal cumulative distribution function."""
    return _scalar_or_array(sc.ndtr(np.asarray(x, dtype=float)))


def std_normal_logcdf(x):
    return _scalar_or_array(sc.log_ndtr(np.asarray(x, dtype=float)))


def std_normal_logpdf(x):
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(-0.5 * x * x - 0.5 * np.log(2.0 * np.pi))


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf`; ``p`` must lie in (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p > 0) | ~(p < 1)):
        raise ValueError("normal quantile requires 0 < p < 1")
    return _scalar_or_array(sc.ndtri(p))


def chi_square_sf(x, df):
    """Upper tail probability of a chi-square variable with ``df`` degrees of freedom.

    Computed as the regularized upper incomplete gamma ``Q(df/2, x/2)``,
    which stays accurate deep in the tail (e.g. ~1e-72).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("chi-square survival requires x >= 0")
    if int(df) != df or df < 1:
        raise ValueError("df must be a positive integer")
    return _scalar_or_array(sc.gammaincc(0.5 * df, 0.5 * x))


def log_gamma(x):
    return _scalar_or_array(sc.gammaln(np.asarray(x, dtype=float)))


def digamma(x):
    return _scalar_or_array(sc.digamma(np.asarray(x, dtype=float)))


def trigamma(x):
    return _scalar_or_array(sc.polygamma(1, np.asarray(x, dtype=float)))


def gamma_cdf_regularized(a, x):
    """Regularized lower incomplete gamma ``P(a, x)``."""
    return sc.gammainc(a, x)


def gamma_sf_regularized(a, x):
    return sc.gammaincc(a, x)
