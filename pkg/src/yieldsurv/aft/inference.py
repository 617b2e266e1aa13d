"""Likelihood-ratio tests, collinearity screening and stepwise selection."""

import logging

import numpy as np
import pandas as pd

from ..exceptions import InsufficientDataError, NotNestedError, YieldSurvError, ZeroVarianceError
from ..survival.special import chi_square_sf
from .design import DesignSpec, build_design_matrix, records_frame
from .model import fit_aft

logger = logging.getLogger(__name__)

# Lower index = more important.  Initial speed goes last: it is the member
# dropped when it collides with average deceleration.
DEFAULT_PRIORITY = ("v_m", "lv_i", "lv_m", "dav", "v_i")


def lr_test(full, null):
    """Likelihood-ratio test of a nested null model against ``full``.

    Returns
    -------
    dict with keys ``chisq``, ``df``, ``p``.
    """
    if full.family != null.family:
        raise NotNestedError(f"families differ: {full.family} vs {null.family}")
    if full.n != null.n:
        raise NotNestedError(f"sample sizes differ: {full.n} vs {null.n}")
    if not set(null.columns) <= set(full.columns):
        extra = sorted(set(null.columns) - set(full.columns))
        raise NotNestedError(f"null model has columns absent from full model: {extra}")
    df = len(full.columns) - len(null.columns)
    chisq = 2.0 * (full.log_likelihood - null.log_likelihood)
    p = 1.0 if df == 0 else float(chi_square_sf(max(chisq, 0.0), df))
    return {"chisq": float(chisq), "df": int(df), "p": p}


def lr_test_from_loglik(loglik_full, loglik_null, df):
    chisq = 2.0 * (loglik_full - loglik_null)
    p = 1.0 if df == 0 else float(chi_square_sf(max(chisq, 0.0), df))
    return {"chisq": float(chisq), "df": int(df), "p": p}


def correlation_matrix(records, columns):
    """Pearson correlation matrix of the numeric ``columns``."""
    df = records_frame(records)
    if len(df) < 3:
        raise InsufficientDataError("correlation needs at least 3 rows")
    data = df[list(columns)].to_numpy(dtype=float)
    sd = data.std(axis=0)
    for name, s in zip(columns, sd):
        if not s > 0:
            raise ZeroVarianceError(name)
    centered = (data - data.mean(axis=0)) / sd
    r = centered.T @ centered / data.shape[0]
    np.fill_diagonal(r, 1.0)
    r = np.clip(0.5 * (r + r.T), -1.0, 1.0)
    return pd.DataFrame(r, index=list(columns), columns=list(columns))


def collinear_pairs(matrix, threshold=0.7):
    """Pairs ``(a, b, r)`` with ``|r| >= threshold``."""
    names = list(matrix.columns)
    r = matrix.to_numpy()
    pairs = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            if abs(r[i, j]) >= threshold:
                pairs.append((names[i], names[j], float(r[i, j])))
    return pairs


def collinearity_screen(matrix, threshold=0.7, priority=DEFAULT_PRIORITY):
    """Columns to exclude so that no retained pair has ``|r| >= threshold``.

    Pairs are visited from the strongest correlation down; in each pair the
    member ranked lower in ``priority`` is excluded (unranked columns rank
    below every ranked one, ties broken by name).
    """
    rank = {name: i for i, name in enumerate(priority)}

    def key(name):
        return (rank.get(name, len(rank)), name)

    excluded = []
    for a, b, _ in sorted(collinear_pairs(matrix, threshold), key=lambda p: -abs(p[2])):
        if a in excluded or b in excluded:
            continue
        excluded.append(max(a, b, key=key))
    return excluded


def _fit_terms(records, spec, terms, family, fit_options):
    design = build_design_matrix(records, spec.subset(terms))
    return fit_aft(design, family, **fit_options)


def stepwise_select(records, spec: DesignSpec, family="loglogistic", direction="both",
                    **fit_options):
    """Greedy AIC-driven term selection.

    Categorical factors enter and leave as whole blocks. ``forward`` starts
    from the intercept-only model, ``backward`` and ``both`` from the full
    candidate set. At equal AIC the smaller model wins.

    Returns
    -------
    best : AftFit
    trace : list of dict
        One entry per evaluated candidate and per accepted move.
    """
    if direction not in ("forward", "backward", "both"):
        raise ValueError(f"direction must be forward, backward or both, got {direction!r}")
    candidates = list(spec.terms)
    if not candidates:
        raise ValueError("no candidate terms")
    current = [] if direction == "forward" else list(candidates)
    best = _fit_terms(records, spec, current, family, fit_options)
    trace = [{"step": 0, "action": "start", "term": "", "aic": best.aic,
              "terms": " + ".join(current), "accepted": True}]
    step = 0
    while True:
        step += 1
        moves = []
        if direction in ("backward", "both"):
            moves += [("drop", t) for t in current]
        if direction in ("forward", "both"):
            moves += [("add", t) for t in candidates if t not in current]
        scored = []
        for action, term in moves:
            terms = [t for t in current if t != term] if action == "drop" else current + [term]
            terms = [t for t in candidates if t in terms]
            try:
                fit = _fit_terms(records, spec, terms, family, fit_options)
            except YieldSurvError as exc:
                logger.warning("stepwise: skipping %s %s (%s)", action, term, exc)
                trace.append({"step": step, "action": action, "term": term, "aic": np.nan,
                              "terms": " + ".join(terms), "accepted": False})
                continue
            trace.append({"step": step, "action": action, "term": term, "aic": fit.aic,
                          "terms": " + ".join(terms), "accepted": False})
            scored.append((fit.aic, len(terms), action, term, terms, fit))
        if not scored:
            break
        aic, size, action, term, terms, fit = min(scored, key=lambda s: (s[0], s[1]))
        improves = aic < best.aic or (aic == best.aic and size < len(current))
        if not improves:
            break
        trace.append({"step": step, "action": action, "term": term, "aic": aic,
                      "terms": " + ".join(terms), "accepted": True})
        current, best = terms, fit
    return best, trace
