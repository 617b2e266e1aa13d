import math


def information_criteria(log_likelihood, k, n=None):
    """Akaike and Bayesian information criteria.

    ``aic = 2k - 2 logL`` and ``bic = k ln(n) - 2 logL``; ``bic`` is None
    when ``n`` is not given.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    aic = 2.0 * k - 2.0 * log_likelihood
    if n is None:
        return aic, None
    if n < 1:
        raise ValueError("n must be at least 1")
    return aic, k * math.log(n) - 2.0 * log_likelihood
