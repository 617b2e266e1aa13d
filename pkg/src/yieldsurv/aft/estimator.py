"""scikit-learn compatible wrapper around :func:`fit_aft`."""

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .design import build_design_matrix, make_spec, parse_formula, records_frame
from .likelihood import aft_loglik, check_aft_family
from .model import fit_aft, predict_quantile, predict_survival_curve, wald_summary


def _as_frame(X, n_features=None):
    if isinstance(X, pd.DataFrame):
        return X, False
    if isinstance(X, np.ndarray) or (
        isinstance(X, (list, tuple)) and len(X) and np.ndim(X[0]) == 1
        and not hasattr(X[0], "to_dict") and not isinstance(X[0], dict)
    ):
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        return pd.DataFrame(arr, columns=[f"x{j}" for j in range(arr.shape[1])]), True
    return records_frame(X), False


class AFTRegressor(BaseEstimator, RegressorMixin):
    """Parametric accelerated-failure-time regression.

    Parameters
    ----------
    family : {"loglogistic", "lognormal", "weibull", "exponential"}
    formula : str, optional
        e.g. ``"srt ~ v_m + lv_i + mtype"``. When omitted every column of a
        numeric ``X`` is used.
    max_iter : int
    grad_tol : float
        Convergence threshold on the gradient max-norm.

    Attributes
    ----------
    fit_ : AftFit
    coef_ : ndarray
        Coefficients including the intercept.
    scale_ : float
    """

    def __init__(self, family="loglogistic", formula=None, max_iter=100, grad_tol=1e-8):
        self.family = family
        self.formula = formula
        self.max_iter = max_iter
        self.grad_tol = grad_tol

    def _design(self, X, y=None, event=None):
        df, from_array = _as_frame(X)
        if self.formula is not None:
            response, spec = parse_formula(self.formula)
        else:
            response = "srt"
            spec = make_spec([c for c in df.columns if from_array or c not in ("srt", "event")])
        if y is not None:
            df = df.copy()
            df[response] = np.asarray(y, dtype=float)
        return build_design_matrix(df, spec, response=response, event=event)

    def fit(self, X, y=None, event=None):
        """Fit on covariates ``X`` and event times ``y`` (or ``X['srt']``)."""
        family = check_aft_family(self.family)
        design = self._design(X, y, event)
        self.fit_ = fit_aft(design, family, max_iter=self.max_iter, grad_tol=self.grad_tol)
        self.coef_ = self.fit_.beta
        self.scale_ = self.fit_.scale
        self.feature_names_in_ = np.array(self.fit_.spec.terms, dtype=object)
        self.n_features_in_ = len(self.fit_.spec.terms)
        return self

    def _profiles(self, X):
        df, _ = _as_frame(X)
        return df.to_dict(orient="records")

    def predict(self, X):
        """Median event time for each row of ``X``."""
        return self.predict_quantile(X, 0.5)

    def predict_quantile(self, X, q=0.5):
        check_is_fitted(self, "fit_")
        return np.array([predict_quantile(self.fit_, prof, q) for prof in self._profiles(X)])

    def predict_survival_function(self, X, times):
        """Array of shape ``(n_rows, len(times))`` with ``S(t | x)``."""
        check_is_fitted(self, "fit_")
        return np.vstack(
            [predict_survival_curve(self.fit_, prof, times) for prof in self._profiles(X)]
        )

    def score(self, X, y=None, event=None):
        """Mean log-likelihood per observation."""
        check_is_fitted(self, "fit_")
        design = self._design(X, y, event)
        theta = self.fit_.beta
        if self.fit_.family != "exponential":
            theta = np.append(theta, self.fit_.log_scale)
        ll = aft_loglik(theta, design.X, design.y, design.event, self.fit_.family,
                        derivatives=False)
        return ll / design.n

    def summary(self):
        check_is_fitted(self, "fit_")
        return pd.DataFrame(wald_summary(self.fit_)).set_index("name")
