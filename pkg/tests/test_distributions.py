import numpy as np
import pytest
from scipy import integrate

from yieldsurv.survival.distributions import (
    FAMILIES,
    as_family,
    dist_cdf,
    dist_logpdf,
    dist_mean,
    dist_quantile,
    dist_sample,
    dist_survival,
)

PARAMS = {
    "exponential": (0.4,),
    "weibull": (1.7, 3.2),
    "lognormal": (1.5, 0.35),
    "gamma": (3.5, 0.8),
    "loglogistic": (4.5, 11.0),
}

PARAM_GRID = [(f, PARAMS[f]) for f in FAMILIES] + [
    ("weibull", (0.6, 1.0)),
    ("gamma", (0.7, 2.0)),
    ("loglogistic", (float(np.exp(1.50079)), 1 / 0.0896)),
    ("lognormal", (-0.5, 1.2)),
]


def test_loglogistic_median_is_scale():
    assert dist_survival("loglogistic", (4.5, 11.0), 4.5) == 0.5
    alpha = np.exp(1.50079)
    assert alpha == pytest.approx(4.485, abs=1e-3)
    assert dist_survival("loglogistic", (alpha, 1 / 0.0896), alpha) == pytest.approx(0.5, abs=1e-15)
    assert dist_survival("loglogistic", (alpha, 1 / 0.0896), 4.485) == pytest.approx(0.5, abs=1e-3)


def test_exponential_survival_closed_form():
    assert dist_survival("exponential", (0.5,), 2.0) == pytest.approx(np.exp(-1.0), abs=1e-12)


@pytest.mark.parametrize("family, params", PARAM_GRID)
def test_density_normalizes(family, params):
    upper = dist_quantile(family, params, 1 - 1e-9)
    f = lambda t: np.exp(dist_logpdf(family, params, t))
    # split at the median so quad sees the bulk of the mass
    med = dist_quantile(family, params, 0.5)
    a, _ = integrate.quad(f, 0, med, limit=400, epsabs=1e-13, epsrel=1e-12)
    b, _ = integrate.quad(f, med, upper, limit=400, epsabs=1e-13, epsrel=1e-12)
    assert a + b == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("family, params", PARAM_GRID)
def test_quantile_round_trip(family, params):
    q = np.round(np.arange(1, 100) / 100, 2)
    assert np.max(np.abs(q - dist_cdf(family, params, dist_quantile(family, params, q)))) < 1e-10


@pytest.mark.parametrize("family, params", PARAM_GRID)
def test_survival_is_one_minus_cdf(family, params):
    t = dist_quantile(family, params, np.linspace(0.02, 0.98, 25))
    np.testing.assert_allclose(dist_survival(family, params, t) + dist_cdf(family, params, t), 1.0,
                               atol=1e-14)


def test_weibull_shape_one_is_exponential():
    t = np.logspace(-3, 2, 200)
    for rate in (0.1, 0.5, 3.0):
        np.testing.assert_allclose(dist_survival("weibull", (1.0, 1 / rate), t),
                                   dist_survival("exponential", (rate,), t), rtol=0, atol=1e-12)


@pytest.mark.parametrize("family, params", [("weibull", (0.0, 1.0)), ("loglogistic", (-1.0, 2.0)),
                                            ("gamma", (2.0, np.inf)), ("lognormal", (0.0, 0.0)),
                                            ("exponential", (1.0, 2.0))])
def test_invalid_params(family, params):
    with pytest.raises(ValueError):
        dist_survival(family, params, 1.0)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        dist_logpdf("weibull", (1.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        dist_quantile("gamma", (2.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        as_family("pareto")


@pytest.mark.parametrize("family", FAMILIES)
def test_mean_matches_samples(family):
    params = PARAMS[family]
    x = dist_sample(family, params, 200_000, random_state=3)
    se = x.std() / np.sqrt(x.size)
    assert abs(x.mean() - dist_mean(family, params)) < 5 * se


def test_loglogistic_mean_infinite_for_small_shape():
    assert dist_mean("loglogistic", (2.0, 0.9)) == np.inf
