"""Kaplan-Meier estimation, AFT diagnostic transforms and kernel densities."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..exceptions import InsufficientDataError, TooFewPointsError
from ..utils.validation import check_survival_data
from .special import std_normal_quantile


@dataclass(frozen=True)
class KmCurve:
    """Product-limit estimate evaluated at the distinct event times.

    ``survival[j]`` is the value on ``[event_times[j], event_times[j+1])``;
    before the first event time the curve equals 1.
    """

    event_times: np.ndarray
    survival: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    greenwood_var: np.ndarray

    def __call__(self, t):
        """Right-continuous step-function evaluation."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.event_times, t, side="right") - 1
        padded = np.concatenate(([1.0], self.survival))
        out = padded[idx + 1]
        return out.item() if out.ndim == 0 else out

    def __len__(self):
        return len(self.event_times)

    def confidence_band(self, level=0.95):
        """Pointwise normal-approximation band clipped to [0, 1]."""
        z = std_normal_quantile(0.5 + level / 2.0)
        se = np.sqrt(self.greenwood_var)
        return np.clip(self.survival - z * se, 0, 1), np.clip(self.survival + z * se, 0, 1)


def _product_limit(at_risk, events):
    # Within a run of event times with no censoring in between the product
    # telescopes to (n_j - d_j) / n_start, so the uncensored case reduces
    # exactly to the empirical survival fraction.
    surv = np.empty(at_risk.shape[0])
    anchor_s, anchor_n = 1.0, at_risk[0]
    for j in range(at_risk.shape[0]):
        if j > 0 and at_risk[j] != at_risk[j - 1] - events[j - 1]:
            anchor_s, anchor_n = surv[j - 1], at_risk[j]
        surv[j] = anchor_s * (at_risk[j] - events[j]) / anchor_n
    return surv


def kaplan_meier(time, event=None):
    """Kaplan-Meier estimate with Greenwood variance.

    ``S(t) = prod_{t_i <= t} (1 - d_i / n_i)`` over distinct event times;
    censored observations only shrink the risk set. Greenwood:
    ``Var S(t) = S(t)^2 sum_{t_i <= t} d_i / (n_i (n_i - d_i))``.
    """
    t, e = check_survival_data(time, event)
    order = np.argsort(t, kind="mergesort")
    t, e = t[order], e[order]
    uniq = np.unique(t[e])
    if uniq.size == 0:
        empty = np.array([], dtype=float)
        return KmCurve(empty, empty, np.array([], dtype=int), np.array([], dtype=int), empty)
    at_risk = t.shape[0] - np.searchsorted(t, uniq, side="left")
    events = np.array([np.sum(e & (t == u)) for u in uniq])
    surv = _product_limit(at_risk, events)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(at_risk > events, events / (at_risk * (at_risk - events)), 0.0)
    var = surv**2 * np.cumsum(terms)
    return KmCurve(uniq, surv, at_risk.astype(int), events.astype(int), var)


class KaplanMeier(BaseEstimator):
    """Estimator wrapper around :func:`kaplan_meier`."""

    def fit(self, time, event=None):
        self.curve_ = kaplan_meier(time, event)
        return self

    def survival_function(self, times):
        check_is_fitted(self, "curve_")
        return self.curve_(times)


def aft_diagnostic_points(curve, family="loglogistic"):
    """Linearizing transform of a KM curve against log time.

    log-logistic: ``log(S / (1 - S))``; lognormal: ``Phi^{-1}(1 - S)``.
    Points with S in {0, 1} are dropped. Straight lines support the family.

    Returns
    -------
    x, y : ndarray
        ``ln t`` and the transformed survival.
    """
    s = np.asarray(curve.survival, dtype=float)
    keep = (s > 0) & (s < 1)
    if keep.sum() < 2:
        raise TooFewPointsError("need at least 2 event times with 0 < S < 1")
    s = s[keep]
    x = np.log(curve.event_times[keep])
    if family == "loglogistic":
        y = np.log(s) - np.log1p(-s)
    elif family == "lognormal":
        y = np.asarray(std_normal_quantile(1.0 - s))
    else:
        raise ValueError(f"no diagnostic transform for family {family!r}")
    return x, y


def silverman_bandwidth(x):
    """``0.9 * min(sd, IQR / 1.34) * n^(-1/5)``."""
    x = np.asarray(x, dtype=float)
    sd = np.std(x, ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if not spread > 0:
        spread = sd
    return 0.9 * spread * x.shape[0] ** (-0.2)


def kde_density(samples, bandwidth=None, n_grid=512):
    """Gaussian kernel density on an evenly spaced grid over ``[min - 3h, max + 3h]``.

    Returns
    -------
    grid, density : ndarray
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise InsufficientDataError("kernel density needs at least 2 samples")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise InsufficientDataError("bandwidth is zero; samples are all equal")
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, n_grid)
    u = (grid[:, None] - x[None, :]) / h
    dens = np.exp(-0.5 * u * u).sum(axis=1) / (x.shape[0] * h * np.sqrt(2 * np.pi))
    return grid, dens
