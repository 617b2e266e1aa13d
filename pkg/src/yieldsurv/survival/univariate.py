"""Maximum-likelihood fitting of a single lifetime distribution."""

from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy import special as sc
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..exceptions import NonConvergenceError
from ..utils.validation import check_probability, check_survival_data
from .criteria import information_criteria
from .distributions import (
    FAMILIES,
    PARAM_NAMES,
    as_family,
    dist_cdf,
    dist_logpdf,
    dist_logsf,
    dist_quantile,
    dist_survival,
)


@dataclass(frozen=True)
class FittedDistribution:
    family: str
    params: tuple
    log_likelihood: float
    aic: float
    bic: float
    n: int
    covariance: np.ndarray = None

    @property
    def param_names(self):
        return PARAM_NAMES[self.family]

    @property
    def k(self):
        return len(self.params)

    @property
    def std_errors(self):
        if self.covariance is None:
            return None
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def logpdf(self, t):
        return dist_logpdf(self.family, self.params, t)

    def pdf(self, t):
        return np.exp(self.logpdf(t))

    def survival(self, t):
        return dist_survival(self.family, self.params, t)

    def cdf(self, t):
        return dist_cdf(self.family, self.params, t)

    def quantile(self, q):
        return dist_quantile(self.family, self.params, q)


def log_likelihood(family, params, time, event):
    """``sum_events log f(t) + sum_censored log S(t)``."""
    ll = np.sum(dist_logpdf(family, params, time[event]))
    if np.any(~event):
        ll += np.sum(dist_logsf(family, params, time[~event]))
    return float(ll)


def _fit_location_scale(family, time, event):
    # intercept-only AFT model, mapped back to the natural parameterization
    from ..aft.design import DesignMatrix, DesignSpec
    from ..aft.model import fit_aft

    n = time.shape[0]
    design = DesignMatrix(("Intercept",), np.ones((n, 1)), np.log(time), event, DesignSpec())
    fit = fit_aft(design, family)
    b0, s = float(fit.beta[0]), fit.log_scale
    cov = fit.covariance
    if family == "exponential":
        rate = np.exp(-b0)
        return (float(rate),), np.array([[rate**2 * cov[0, 0]]])
    if family == "weibull":
        params = (np.exp(-s), np.exp(b0))
        J = np.array([[0.0, -params[0]], [params[1], 0.0]])
    elif family == "lognormal":
        params = (b0, np.exp(s))
        J = np.array([[1.0, 0.0], [0.0, params[1]]])
    else:
        params = (np.exp(b0), np.exp(-s))
        J = np.array([[params[0], 0.0], [0.0, -params[1]]])
    return tuple(float(p) for p in params), J @ cov @ J.T


def _gamma_shape_newton(s, max_iter=100, tol=1e-12):
    """Solve ``ln a - digamma(a) = s`` for the shape ``a`` (s > 0)."""
    a = (3.0 - s + np.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(max_iter):
        f = np.log(a) - sc.digamma(a) - s
        if abs(f) <= 8 * np.finfo(float).eps * max(1.0, abs(np.log(a))):
            return a
        fp = 1.0 / a - sc.polygamma(1, a)
        step = f / fp
        a_new = a - step
        if a_new <= 0:
            a_new = a / 2.0
        if abs(a_new - a) <= tol * a:
            return a_new
        a = a_new
    raise NonConvergenceError(max_iter, abs(f))


def _numeric_hessian(f, x, rel_step=1e-4):
    x = np.asarray(x, dtype=float)
    k = len(x)
    h = rel_step * np.maximum(np.abs(x), 1e-3)
    H = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            ei = np.zeros(k)
            ej = np.zeros(k)
            ei[i], ej[j] = h[i], h[j]
            H[i, j] = H[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return H


def _fit_gamma(time, event):
    n = time.shape[0]
    tt = time[event] if np.any(~event) else time
    s = np.log(np.mean(tt)) - np.mean(np.log(tt))
    a = _gamma_shape_newton(max(s, 1e-12))
    b = a / np.mean(tt)
    if np.all(event):
        info = n * np.array([[sc.polygamma(1, a), -1.0 / b], [-1.0 / b, a / b**2]])
        return (float(a), float(b)), np.linalg.inv(info)

    def negll(logp):
        return -log_likelihood("gamma", np.exp(logp), time, event)

    res = optimize.minimize(negll, np.log([a, b]), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
    if not res.success:
        raise NonConvergenceError(res.nit, float("nan"))
    params = np.exp(res.x)
    H = _numeric_hessian(lambda p: log_likelihood("gamma", p, time, event), params)
    return (float(params[0]), float(params[1])), np.linalg.inv(-H)


def fit_univariate(time, event=None, family="loglogistic"):
    """Fit one distribution family to a right-censored sample by maximum likelihood.

    Parameters
    ----------
    time : array-like of positive floats
    event : array-like of bool, optional
        True where the event was observed; defaults to all True.
    family : str
        One of ``exponential, weibull, lognormal, gamma, loglogistic``.

    Returns
    -------
    FittedDistribution
    """
    family = as_family(family)
    time, event = check_survival_data(time, event, min_samples=2, min_events=1)
    if family == "gamma":
        params, cov = _fit_gamma(time, event)
    elif family == "exponential":
        d = int(np.sum(event))
        rate = d / float(np.sum(time))
        params, cov = (rate,), np.array([[rate**2 / d]])
    else:
        params, cov = _fit_location_scale(family, time, event)
    ll = log_likelihood(family, params, time, event)
    aic, bic = information_criteria(ll, len(params), time.shape[0])
    return FittedDistribution(family, params, ll, aic, bic, time.shape[0], cov)


def fit_all(time, event=None, families=FAMILIES):
    """Fit every family and return the fits sorted by ascending AIC."""
    fits = [fit_univariate(time, event, f) for f in families]
    return sorted(fits, key=lambda f: f.aic)


class ParametricSurvivalFitter(BaseEstimator):
    """Estimator-style front end to :func:`fit_univariate`.

    Parameters
    ----------
    family : str
    """

    def __init__(self, family="loglogistic"):
        self.family = family

    def fit(self, time, event=None):
        self.fit_ = fit_univariate(time, event, self.family)
        self.params_ = self.fit_.params
        self.aic_ = self.fit_.aic
        self.bic_ = self.fit_.bic
        self.log_likelihood_ = self.fit_.log_likelihood
        return self

    def survival_function(self, times):
        check_is_fitted(self, "fit_")
        return self.fit_.survival(times)

    def predict_quantile(self, q):
        check_is_fitted(self, "fit_")
        return self.fit_.quantile(check_probability(q))

    def score(self, time, event=None):
        """Mean log-likelihood per observation."""
        check_is_fitted(self, "fit_")
        t, e = check_survival_data(time, event)
        return log_likelihood(self.fit_.family, self.fit_.params, t, e) / t.shape[0]
