"""Fitting, persistence and prediction for AFT regressions."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import expit, gammaln

from ..exceptions import SingularHessianError, UnknownCoefficientError
from ..survival.criteria import information_criteria
from ..survival.special import std_normal_cdf, std_normal_quantile
from .design import DesignMatrix, DesignSpec
from .likelihood import aft_loglik, check_aft_family, has_scale
from .newton import newton_raphson

CONVENTION = "aft-canonical"
EULER_GAMMA = 0.5772156649015329
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class AftFit:
    """A converged AFT regression fit.

    ``covariance`` is over ``(beta, ln sigma)``; for the exponential family
    the scale row and column are zero because sigma is fixed at 1.
    """

    family: str
    columns: tuple
    beta: np.ndarray
    log_scale: float
    covariance: np.ndarray
    log_likelihood: float
    aic: float
    bic: float
    n: int
    iterations: int
    spec: DesignSpec = field(default_factory=DesignSpec)
    trace: tuple = ()

    @property
    def scale(self):
        return float(np.exp(self.log_scale))

    @property
    def n_params(self):
        return len(self.beta) + (1 if has_scale(self.family) else 0)

    @property
    def std_errors(self):
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    def coef(self, name):
        try:
            return float(self.beta[list(self.columns).index(name)])
        except ValueError:
            raise UnknownCoefficientError(name) from None

    def linear_predictor(self, profile):
        return float(self.spec.encode_row(profile) @ self.beta)

    def to_dict(self):
        return {
            "family": self.family,
            "columns": list(self.columns),
            "beta": [float(b) for b in self.beta],
            "log_scale": float(self.log_scale),
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "logL": float(self.log_likelihood),
            "aic": float(self.aic),
            "bic": float(self.bic),
            "n": int(self.n),
            "iterations": int(self.iterations),
            "convention": CONVENTION,
            "design": self.spec.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("convention", CONVENTION) != CONVENTION:
            raise ValueError(f"unsupported model convention {d['convention']!r}")
        return cls(
            family=check_aft_family(d["family"]),
            columns=tuple(d["columns"]),
            beta=np.array(d["beta"], dtype=float),
            log_scale=float(d["log_scale"]),
            covariance=np.array(d["covariance"], dtype=float),
            log_likelihood=float(d["logL"]),
            aic=float(d["aic"]),
            bic=float(d["bic"]),
            n=int(d["n"]),
            iterations=int(d["iterations"]),
            spec=DesignSpec.from_dict(d.get("design", {})),
        )


def save_model(fit, path):
    with open(path, "w") as fh:
        json.dump(fit.to_dict(), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return AftFit.from_dict(json.load(fh))


def _initial_theta(X, y, family):
    beta, *_ = linalg.lstsq(X, y)
    resid = y - X @ beta
    sd = max(float(np.std(resid)), 1e-3)
    if family == "loglogistic":
        sigma = sd * np.sqrt(3.0) / np.pi
    elif family == "weibull":
        sigma = sd * np.sqrt(6.0) / np.pi
    else:
        sigma = sd
    if family in ("weibull", "exponential"):
        # E[eps] = -Euler gamma for the smallest-extreme-value error
        beta = beta.copy()
        beta[0] += EULER_GAMMA * (sigma if family == "weibull" else 1.0)
    if not has_scale(family):
        return beta
    return np.append(beta, np.log(sigma))


def fit_aft(design: DesignMatrix, family="loglogistic", max_iter=100, grad_tol=1e-8, init=None):
    """Maximum-likelihood AFT fit by Newton-Raphson on ``(beta, ln sigma)``.

    Starting values come from least squares of log time on the design.
    The covariance is the inverse observed information at the optimum.
    """
    family = check_aft_family(family)
    X, y, event = design.X, design.y, design.event

    def objective(theta, derivatives=True):
        return aft_loglik(theta, X, y, event, family, derivatives=derivatives)

    theta0 = _initial_theta(X, y, family) if init is None else np.asarray(init, dtype=float)
    res = newton_raphson(objective, theta0, max_iter=max_iter, grad_tol=grad_tol)

    info = -res.hess
    try:
        cov = linalg.inv(info)
    except linalg.LinAlgError as exc:
        raise SingularHessianError(str(exc)) from None
    cov = 0.5 * (cov + cov.T)
    if not np.all(np.diag(cov) > 0):
        raise SingularHessianError("observed information is not positive definite")

    p = X.shape[1]
    if has_scale(family):
        beta, log_scale = res.x[:p], float(res.x[p])
    else:
        beta, log_scale = res.x, 0.0
        full = np.zeros((p + 1, p + 1))
        full[:p, :p] = cov
        cov = full
    k = p + (1 if has_scale(family) else 0)
    aic, bic = information_criteria(res.fun, k, design.n)
    return AftFit(
        family=family,
        columns=tuple(design.column_names),
        beta=np.array(beta),
        log_scale=log_scale,
        covariance=cov,
        log_likelihood=float(res.fun),
        aic=float(aic),
        bic=float(bic),
        n=design.n,
        iterations=res.iterations,
        spec=design.spec,
        trace=tuple(res.trace),
    )


def wald_summary(fit: AftFit):
    """Coefficient table: name, coef, std_error, z, two-sided p.

    The last row is ``Log(scale)`` for families with a free scale.
    """
    names = list(fit.columns)
    coefs = list(fit.beta)
    se = fit.std_errors
    if has_scale(fit.family):
        names.append("Log(scale)")
        coefs.append(fit.log_scale)
    rows = []
    for j, (name, b) in enumerate(zip(names, coefs)):
        s = float(se[j])
        z = b / s if s > 0 else (0.0 if b == 0 else np.copysign(np.inf, b))
        rows.append(
            {
                "name": name,
                "coef": float(b),
                "std_error": s,
                "z": float(z),
                # floored so that extreme z stays inside (0, 1]
                "p": max(float(2.0 * std_normal_cdf(-abs(z))), _TINY),
            }
        )
    return rows


def acceleration_factor(fit, name):
    """``exp(beta_j)``: multiplicative effect of the coefficient on event time."""
    return float(np.exp(fit.coef(name)))


def _standard_quantile(family, q):
    # quantile of the standardized log-time error
    if family == "loglogistic":
        return float(np.log(q) - np.log1p(-q))
    if family == "lognormal":
        return float(std_normal_quantile(q))
    return float(np.log(-np.log1p(-q)))


def predict_quantile(fit, profile, q=0.5):
    """Event-time quantile ``exp(eta + sigma * Q0(q))`` at a covariate profile."""
    if not 0 < q < 1:
        raise ValueError("q must lie strictly inside (0, 1)")
    eta = fit.linear_predictor(profile)
    return float(np.exp(eta + fit.scale * _standard_quantile(fit.family, q)))


def predict_median(fit, profile):
    return predict_quantile(fit, profile, 0.5)


def predict_mean(fit, profile):
    """Analytic mean event time (``inf`` for log-logistic with sigma >= 1)."""
    eta = fit.linear_predictor(profile)
    s = fit.scale
    if fit.family == "loglogistic":
        if s >= 1:
            return np.inf
        return float(np.exp(eta) * np.pi * s / np.sin(np.pi * s))
    if fit.family == "lognormal":
        return float(np.exp(eta + 0.5 * s * s))
    return float(np.exp(eta + gammaln(1.0 + s)))


def predict_survival_curve(fit, profile, times):
    """``S(t | x)`` over a grid of positive times."""
    t = np.asarray(times, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("times must be strictly positive")
    z = (np.log(t) - fit.linear_predictor(profile)) / fit.scale
    if fit.family == "loglogistic":
        return expit(-z)
    if fit.family == "lognormal":
        return np.asarray(std_normal_cdf(-z))
    return np.exp(-np.exp(z))


def predict_interval(fit, profile, level=0.95):
    """Delta-method confidence interval for the median event time.

    Returns ``(lo, hi, metadata)`` where the interval is
    ``exp(eta +- z * sqrt(x' Cov_beta x))``.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie strictly inside (0, 1)")
    x = fit.spec.encode_row(profile)
    p = len(fit.beta)
    var = float(x @ fit.covariance[:p, :p] @ x)
    se = np.sqrt(max(var, 0.0))
    zq = float(std_normal_quantile(0.5 + level / 2.0))
    eta = float(x @ fit.beta)
    lo, hi = np.exp(eta - zq * se), np.exp(eta + zq * se)
    return float(lo), float(hi), {"method": "delta-linear-predictor", "level": level, "se_eta": float(se)}

