"""Damped Newton-Raphson for maximizing smooth log-likelihoods."""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ..exceptions import NonConvergenceError, NonFiniteError, SingularHessianError


@dataclass
class NewtonResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    hess: np.ndarray
    iterations: int
    trace: list = field(default_factory=list)


def _ascent_direction(grad, hess):
    # Solve (-H) d = g; fall back to a ridge-shifted system when -H is not
    # positive definite so that d is always an ascent direction.
    neg = -hess
    shift = 0.0
    scale = max(1.0, np.max(np.abs(np.diag(neg))))
    for _ in range(60):
        try:
            c = linalg.cho_factor(neg + shift * np.eye(len(grad)))
            return linalg.cho_solve(c, grad)
        except linalg.LinAlgError:
            shift = 1e-8 * scale if shift == 0.0 else shift * 10.0
    raise SingularHessianError("cannot form an ascent direction from the Hessian")


def newton_raphson(fun, x0, max_iter=100, grad_tol=1e-8, max_halvings=40):
    """Maximize ``fun`` by Newton-Raphson with step halving.

    ``fun(x, derivatives=True)`` must return ``(f, grad, hess)``, and
    ``fun(x, derivatives=False)`` just ``f``. Convergence is declared when
    the gradient max-norm falls below ``grad_tol``; the step is halved
    whenever the objective would decrease.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g, H = fun(x, derivatives=True)
    trace = [{"iteration": 0, "logL": f, "grad_norm": float(np.max(np.abs(g))), "step": 1.0}]
    iterations = 0
    while np.max(np.abs(g)) >= grad_tol:
        if iterations >= max_iter:
            raise NonConvergenceError(iterations, float(np.max(np.abs(g))), trace)
        d = _ascent_direction(g, H)
        slack = 1e-12 * max(1.0, abs(f))
        t = 1.0
        for _ in range(max_halvings):
            f_new = fun(x + t * d, derivatives=False)
            if np.isfinite(f_new) and f_new >= f - slack:
                break
            t *= 0.5
        else:
            raise NonConvergenceError(iterations, float(np.max(np.abs(g))), trace)
        x = x + t * d
        try:
            f, g, H = fun(x, derivatives=True)
        except NonFiniteError:
            raise NonConvergenceError(iterations, np.inf, trace) from None
        iterations += 1
        trace.append(
            {"iteration": iterations, "logL": f, "grad_norm": float(np.max(np.abs(g))), "step": t}
        )
    return NewtonResult(x=x, fun=f, grad=g, hess=H, iterations=iterations, trace=trace)
