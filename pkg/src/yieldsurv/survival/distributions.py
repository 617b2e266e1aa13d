"""The five candidate lifetime distributions.

Parameterizations (natural scale, in this order):

============  =====================================
family        params
============  =====================================
exponential   rate
weibull       shape k, scale lambda
lognormal     mu, sigma (of log time)
gamma         shape alpha, rate beta
loglogistic   scale alpha (= median), shape p
============  =====================================
"""

from enum import Enum

import numpy as np
from scipy import optimize
from scipy import special as sc

from .special import std_normal_quantile


class DistFamily(str, Enum):
    EXPONENTIAL = "exponential"
    WEIBULL = "weibull"
    LOGNORMAL = "lognormal"
    GAMMA = "gamma"
    LOGLOGISTIC = "loglogistic"

    def __str__(self):
        return self.value


FAMILIES = tuple(f.value for f in DistFamily)

PARAM_NAMES = {
    "exponential": ("rate",),
    "weibull": ("shape", "scale"),
    "lognormal": ("mu", "sigma"),
    "gamma": ("shape", "rate"),
    "loglogistic": ("scale", "shape"),
}


def as_family(family):
    try:
        return DistFamily(str(family).lower()).value
    except ValueError:
        raise ValueError(
            f"unknown distribution family {family!r}; expected one of {FAMILIES}"
        ) from None


def check_params(family, params):
    """Validate and return ``params`` as a float tuple."""
    family = as_family(family)
    params = tuple(float(p) for p in np.atleast_1d(params))
    names = PARAM_NAMES[family]
    if len(params) != len(names):
        raise ValueError(f"{family} takes {len(names)} parameters, got {len(params)}")
    for name, value in zip(names, params):
        if name == "mu":
            if not np.isfinite(value):
                raise ValueError("mu must be finite")
        elif not (np.isfinite(value) and value > 0):
            raise ValueError(f"{family} parameter {name} must be positive, got {value}")
    return params


def _times(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("times must be strictly positive")
    return t


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


def dist_logpdf(family, params, t):
    """Log density at ``t`` (> 0)."""
    family = as_family(family)
    params = check_params(family, params)
    t = _times(t)
    if family == "exponential":
        (lam,) = params
        out = np.log(lam) - lam * t
    elif family == "weibull":
        k, lam = params
        u = t / lam
        out = np.log(k / lam) + (k - 1.0) * np.log(u) - u**k
    elif family == "lognormal":
        mu, sigma = params
        z = (np.log(t) - mu) / sigma
        out = -np.log(t * sigma) - 0.5 * np.log(2 * np.pi) - 0.5 * z * z
    elif family == "gamma":
        a, b = params
        out = a * np.log(b) - sc.gammaln(a) + (a - 1.0) * np.log(t) - b * t
    else:
        alpha, p = params
        lu = np.log(t / alpha)
        out = np.log(p / alpha) + (p - 1.0) * lu - 2.0 * np.logaddexp(0.0, p * lu)
    return _out(out)


def dist_pdf(family, params, t):
    return _out(np.exp(dist_logpdf(family, params, t)))


def dist_logsf(family, params, t):
    """Log survival ``ln S(t)``, computed without forming ``1 - F``."""
    family = as_family(family)
    params = check_params(family, params)
    t = _times(t)
    if family == "exponential":
        out = -params[0] * t
    elif family == "weibull":
        k, lam = params
        out = -((t / lam) ** k)
    elif family == "lognormal":
        mu, sigma = params
        out = sc.log_ndtr(-(np.log(t) - mu) / sigma)
    elif family == "gamma":
        a, b = params
        with np.errstate(divide="ignore"):
            out = np.log(sc.gammaincc(a, b * t))
    else:
        alpha, p = params
        out = -np.logaddexp(0.0, p * np.log(t / alpha))
    return _out(out)


def dist_survival(family, params, t):
    """Survival function ``S(t) = P(T > t)``."""
    family = as_family(family)
    if family == "gamma":
        a, b = check_params(family, params)
        return _out(sc.gammaincc(a, b * _times(t)))
    return _out(np.exp(dist_logsf(family, params, t)))


def dist_cdf(family, params, t):
    """Cumulative distribution ``F(t) = 1 - S(t)``, evaluated directly in each tail."""
    family = as_family(family)
    params = check_params(family, params)
    t = _times(t)
    if family == "exponential":
        out = -np.expm1(-params[0] * t)
    elif family == "weibull":
        k, lam = params
        out = -np.expm1(-((t / lam) ** k))
    elif family == "lognormal":
        mu, sigma = params
        out = sc.ndtr((np.log(t) - mu) / sigma)
    elif family == "gamma":
        a, b = params
        out = sc.gammainc(a, b * t)
    else:
        alpha, p = params
        out = sc.expit(p * np.log(t / alpha))
    return _out(out)


def _gamma_quantile(a, b, q):
    # Bracket, bisect, then polish with Newton on the cdf.
    mean, sd = a / b, np.sqrt(a) / b
    lo, hi = 0.0, mean + 10.0 * sd
    while sc.gammainc(a, b * hi) < q:
        lo, hi = hi, 2.0 * hi
    x = optimize.brentq(lambda s: sc.gammainc(a, b * s) - q, lo, hi, xtol=1e-14, rtol=1e-14)
    for _ in range(5):
        f = np.exp(a * np.log(b) - sc.gammaln(a) + (a - 1.0) * np.log(x) - b * x)
        if not f > 0:
            break
        step = (sc.gammainc(a, b * x) - q) / f
        if abs(step) <= 1e-12 * x:
            break
        x_new = x - step
        if x_new <= 0:
            break
        x = x_new
    return x


def _gamma_quantile_vec(a, b, q):
    # scipy's inverse as a start, Newton polish, bracketed solve where that misses
    q = np.asarray(q, dtype=float)
    flat = q.ravel()
    x = sc.gammaincinv(a, flat) / b
    logc = a * np.log(b) - sc.gammaln(a)
    for _ in range(3):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f = np.exp(logc + (a - 1.0) * np.log(x) - b * x)
            step = (sc.gammainc(a, b * x) - flat) / f
        ok = np.isfinite(step) & (x - step > 0)
        x = np.where(ok, x - step, x)
    bad = ~(np.isfinite(x) & (x > 0) & (np.abs(sc.gammainc(a, b * x) - flat) <= 1e-12))
    for i in np.flatnonzero(bad):
        x[i] = _gamma_quantile(a, b, flat[i])
    return x.reshape(q.shape)


def dist_quantile(family, params, q):
    """Inverse cdf at probability level ``q`` in (0, 1)."""
    family = as_family(family)
    params = check_params(family, params)
    q = np.asarray(q, dtype=float)
    if np.any(~(q > 0) | ~(q < 1)):
        raise ValueError("quantile levels must lie strictly inside (0, 1)")
    if family == "exponential":
        out = -np.log1p(-q) / params[0]
    elif family == "weibull":
        k, lam = params
        out = lam * (-np.log1p(-q)) ** (1.0 / k)
    elif family == "lognormal":
        mu, sigma = params
        out = np.exp(mu + sigma * np.asarray(std_normal_quantile(q)))
    elif family == "gamma":
        a, b = params
        out = _gamma_quantile_vec(a, b, q)
    else:
        alpha, p = params
        out = alpha * np.exp((np.log(q) - np.log1p(-q)) / p)
    return _out(out)


def dist_mean(family, params):
    """Expected value, ``inf`` where it does not exist."""
    family = as_family(family)
    params = check_params(family, params)
    if family == "exponential":
        return 1.0 / params[0]
    if family == "weibull":
        k, lam = params
        return lam * np.exp(sc.gammaln(1.0 + 1.0 / k))
    if family == "lognormal":
        mu, sigma = params
        return np.exp(mu + 0.5 * sigma**2)
    if family == "gamma":
        return params[0] / params[1]
    alpha, p = params
    if p <= 1:
        return np.inf
    return alpha * (np.pi / p) / np.sin(np.pi / p)


def dist_sample(family, params, size, random_state=None):
    """Inverse-transform draws."""
    rng = np.random.default_rng(random_state)
    u = rng.uniform(size=size)
    u = np.clip(u, 1e-300, 1 - 1e-16)
    return dist_quantile(family, params, u)
