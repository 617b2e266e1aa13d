import numpy as np
import pytest

from yieldsurv.aft import (
    acceleration_factor,
    build_design_matrix,
    fit_aft,
    make_spec,
    default_design_spec,
    predict_interval,
    predict_mean,
    predict_median,
    predict_quantile,
    predict_survival_curve,
)
from yieldsurv.aft.model import AftFit
from yieldsurv.exceptions import UnknownCoefficientError, UnknownLevelError
from yieldsurv.synthetic import REFERENCE_COEFFICIENTS, REFERENCE_LOG_SCALE, simulate_scenario_table


def _reference_fit(cov=None):
    spec = default_design_spec()
    beta = np.array([REFERENCE_COEFFICIENTS.get(c, 0.0) for c in spec.column_names])
    p = len(beta)
    cov = np.zeros((p + 1, p + 1)) if cov is None else cov
    return AftFit("loglogistic", spec.column_names, beta, REFERENCE_LOG_SCALE, cov, -356.0, 0, 0, 283,
                  6, spec)


@pytest.fixture(scope="module")
def fitted():
    recs = simulate_scenario_table(400, random_state=0)
    return fit_aft(build_design_matrix(recs, default_design_spec()), "loglogistic")


def test_published_acceleration_factors():
    fit = _reference_fit()
    assert acceleration_factor(fit, "itype_int_ped") == pytest.approx(0.8602, abs=1e-4)
    assert acceleration_factor(fit, "mtype_turning_left") == pytest.approx(1.2510, abs=1e-4)


def test_published_median_narrative():
    fit = _reference_fit()
    base = predict_median(fit, {})
    assert base == pytest.approx(4.485, abs=1e-3)
    assert base == pytest.approx(4.48, abs=0.01)
    ped = predict_median(fit, {"itype": "int_ped"})
    # both ratio directions of the pedestrian effect
    assert ped / base == pytest.approx(0.8602, abs=1e-4)
    assert base / acceleration_factor(fit, "itype_int_ped") == pytest.approx(5.21, abs=0.01)


def test_reference_level_factor_is_one(fitted):
    zero = AftFit(fitted.family, fitted.columns, np.zeros_like(fitted.beta), 0.0,
                  fitted.covariance, 0, 0, 0, 1, 1, fitted.spec)
    assert acceleration_factor(zero, "v_m") == 1.0
    # reference levels carry no column, so their profile effect is exactly 1
    assert predict_median(fitted, {"mtype": "straight"}) == predict_median(fitted, {})


def test_unknown_coefficient(fitted):
    with pytest.raises(UnknownCoefficientError):
        acceleration_factor(fitted, "mtype_straight")


@pytest.mark.parametrize("family", ["loglogistic", "lognormal", "weibull", "exponential"])
def test_median_and_survival_curve(family):
    recs = simulate_scenario_table(300, random_state=1, family="lognormal")
    fit = fit_aft(build_design_matrix(recs, make_spec(("v_m", "itype"))), family)
    prof = {"v_m": 2.0, "itype": "int_ped"}
    eta = fit.linear_predictor(prof)
    med = predict_quantile(fit, prof, 0.5)
    if family in ("loglogistic", "lognormal"):
        assert med == pytest.approx(np.exp(eta), rel=1e-14)
    t = np.linspace(0.1, 20, 400)
    s = predict_survival_curve(fit, prof, t)
    assert np.all(np.diff(s) <= 0)
    assert predict_survival_curve(fit, prof, [med])[0] == pytest.approx(0.5, abs=1e-10)
    for q in (0.1, 0.9):
        tq = predict_quantile(fit, prof, q)
        assert predict_survival_curve(fit, prof, [tq])[0] == pytest.approx(1 - q, abs=1e-10)


def test_loglogistic_quantile_formula():
    fit = _reference_fit()
    q = 0.8
    expected = np.exp(1.50079) * (q / (1 - q)) ** fit.scale
    assert predict_quantile(fit, {}, q) == pytest.approx(expected, rel=1e-13)


def test_mean_reporting():
    fit = _reference_fit()
    s = fit.scale
    assert predict_mean(fit, {}) == pytest.approx(np.exp(1.50079) * np.pi * s / np.sin(np.pi * s))
    wide = AftFit("loglogistic", fit.columns, fit.beta, 0.1, fit.covariance, 0, 0, 0, 1, 1, fit.spec)
    assert predict_mean(wide, {}) == np.inf


def test_prediction_domain_errors(fitted):
    with pytest.raises(ValueError):
        predict_quantile(fitted, {}, 1.0)
    with pytest.raises(ValueError):
        predict_survival_curve(fitted, {}, [0.0, 1.0])
    with pytest.raises(UnknownLevelError):
        predict_median(fitted, {"mtype": "u_turn"})


def test_zero_covariance_interval_is_degenerate():
    fit = _reference_fit()
    lo, hi, meta = predict_interval(fit, {"itype": "int_ped"})
    assert lo == hi == pytest.approx(predict_median(fit, {"itype": "int_ped"}), rel=1e-15)
    assert meta["method"] == "delta-linear-predictor"


def test_interval_contains_point(fitted):
    for prof in ({}, {"v_m": 5.0, "itype": "int_cyc"}, {"dav": 1.2, "mtype": "turning_right"}):
        lo, hi, _ = predict_interval(fitted, prof, 0.9)
        assert lo < predict_median(fitted, prof) < hi


def _coverage(reps=500, n=300):
    beta = {"Intercept": 1.5, "v_m": -0.13, "lv_i": 0.016}
    profile = {"v_m": 3.0, "lv_i": 40.0}
    truth = np.exp(1.5 - 0.13 * 3.0 + 0.016 * 40.0)
    spec = make_spec(("v_m", "lv_i"))
    hits = 0
    for rep in range(reps):
        recs = simulate_scenario_table(n, random_state=20_000 + rep, beta=beta,
                                       log_scale=np.log(0.2))
        lo, hi, _ = predict_interval(fit_aft(build_design_matrix(recs, spec)), profile)
        hits += lo <= truth <= hi
    return hits / reps


@pytest.mark.slow
def test_interval_coverage():
    assert 0.93 <= _coverage() <= 0.97
