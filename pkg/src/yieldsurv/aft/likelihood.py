"""Log-likelihood, gradient and Hessian of location-scale AFT models.

On the log-time scale ``y = ln t = x'beta + sigma * eps``; with
``z = (y - x'beta) / sigma`` an observed event contributes
``-ln(sigma t) + ln f0(z)`` and a right-censored one ``ln S0(z)``.
The scale is optimized as ``ln sigma``.
"""

import numpy as np
from scipy import special as sc

from ..exceptions import NonFiniteError

AFT_FAMILIES = ("loglogistic", "lognormal", "weibull", "exponential")

_LOG_2PI = np.log(2.0 * np.pi)


def check_aft_family(family):
    family = str(family).lower()
    if family not in AFT_FAMILIES:
        raise ValueError(f"AFT family must be one of {AFT_FAMILIES}, got {family!r}")
    return family


def has_scale(family):
    return family != "exponential"


def _error_terms(z, event, family):
    """Per-observation ``h(z)`` and its first two derivatives in ``z``.

    ``h`` is ``ln f0`` for events and ``ln S0`` for censored rows.
    """
    if family == "loglogistic":
        p = sc.expit(z)
        softplus = np.logaddexp(0.0, z)
        h = np.where(event, z - 2.0 * softplus, -softplus)
        h1 = np.where(event, 1.0 - 2.0 * p, -p)
        h2 = np.where(event, -2.0, -1.0) * p * (1.0 - p)
    elif family == "lognormal":
        log_sf = sc.log_ndtr(-z)
        # inverse Mills ratio phi(z) / Phi(-z), kept in log space
        mills = np.exp(-0.5 * z * z - 0.5 * _LOG_2PI - log_sf)
        h = np.where(event, -0.5 * _LOG_2PI - 0.5 * z * z, log_sf)
        h1 = np.where(event, -z, -mills)
        h2 = np.where(event, -1.0, -mills * (mills - z))
    else:
        # smallest extreme value: Weibull (and exponential with sigma = 1)
        with np.errstate(over="ignore"):
            ez = np.exp(z)
        h = np.where(event, z - ez, -ez)
        h1 = np.where(event, 1.0 - ez, -ez)
        h2 = -ez
    return h, h1, h2


def aft_loglik(theta, X, y, event, family, derivatives=True):
    """Evaluate the AFT log-likelihood.

    Parameters
    ----------
    theta : array of shape (p,) or (p + 1,)
        ``beta`` followed by ``ln sigma``; the exponential family has no
        scale entry (sigma is fixed at 1).
    X : array of shape (n, p)
        Design matrix including the intercept column.
    y : array of shape (n,)
        Log times.
    event : bool array of shape (n,)
    family : str
    derivatives : bool
        When False only the log-likelihood is returned.

    Returns
    -------
    logL : float
    grad : ndarray, only if ``derivatives``
    hess : ndarray, only if ``derivatives``
    """
    family = check_aft_family(family)
    theta = np.asarray(theta, dtype=float)
    p = X.shape[1]
    beta = theta[:p]
    log_sigma = theta[p] if has_scale(family) else 0.0
    sigma = np.exp(log_sigma)
    event = np.asarray(event, dtype=bool)

    z = (y - X @ beta) / sigma
    h, h1, h2 = _error_terms(z, event, family)
    ll = float(np.sum(h) - np.sum(event * (log_sigma + y)))
    if not derivatives:
        return ll if np.isfinite(ll) else -np.inf
    if not np.isfinite(ll):
        raise NonFiniteError("log-likelihood is not finite at the current parameters")

    g_beta = -(X.T @ h1) / sigma
    H_bb = (X.T * h2) @ X / sigma**2
    if not has_scale(family):
        return ll, g_beta, H_bb

    g_s = -np.sum(event) - np.sum(h1 * z)
    H_bs = X.T @ (h2 * z + h1) / sigma
    H_ss = np.sum(h2 * z * z + h1 * z)
    grad = np.append(g_beta, g_s)
    hess = np.empty((p + 1, p + 1))
    hess[:p, :p] = H_bb
    hess[:p, p] = H_bs
    hess[p, :p] = H_bs
    hess[p, p] = H_ss
    return ll, grad, hess
