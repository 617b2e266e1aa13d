"""Accelerated-failure-time regression."""

from .design import (
    CATEGORICAL_LEVELS,
    INTERCEPT,
    Categorical,
    DesignMatrix,
    DesignSpec,
    build_design_matrix,
    make_spec,
    default_design_spec,
    parse_formula,
)
from .estimator import AFTRegressor
from .inference import (
    collinear_pairs,
    collinearity_screen,
    correlation_matrix,
    lr_test,
    lr_test_from_loglik,
    stepwise_select,
)
from .likelihood import AFT_FAMILIES, aft_loglik
from .model import (
    AftFit,
    acceleration_factor,
    fit_aft,
    load_model,
    predict_interval,
    predict_mean,
    predict_median,
    predict_quantile,
    predict_survival_curve,
    save_model,
    wald_summary,
)
from .newton import NewtonResult, newton_raphson

__all__ = [
    "AFT_FAMILIES",
    "AFTRegressor",
    "AftFit",
    "CATEGORICAL_LEVELS",
    "Categorical",
    "DesignMatrix",
    "DesignSpec",
    "INTERCEPT",
    "NewtonResult",
    "acceleration_factor",
    "aft_loglik",
    "build_design_matrix",
    "collinear_pairs",
    "collinearity_screen",
    "correlation_matrix",
    "fit_aft",
    "load_model",
    "lr_test",
    "lr_test_from_loglik",
    "make_spec",
    "newton_raphson",
    "default_design_spec",
    "parse_formula",
    "predict_interval",
    "predict_mean",
    "predict_median",
    "predict_quantile",
    "predict_survival_curve",
    "save_model",
    "stepwise_select",
    "wald_summary",
]
