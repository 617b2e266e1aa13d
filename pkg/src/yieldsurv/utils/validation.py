"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numpy as np

from ..exceptions import InsufficientDataError


def check_positive_times(time, name="time"):
    """Return ``time`` as a 1-d float array, raising if any entry is not > 0."""
    t = np.asarray(time, dtype=float)
    if t.ndim == 0:
        t = t.reshape(1)
    if t.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(t <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return t


def check_event(event, n):
    """Event indicators as a boolean array; ``None`` means every event observed."""
    if event is None:
        return np.ones(n, dtype=bool)
    e = np.asarray(event)
    if e.shape != (n,):
        raise ValueError(f"event has shape {e.shape}, expected ({n},)")
    if e.dtype != bool:
        if not np.all(np.isin(e, (0, 1))):
            raise ValueError("event indicators must be boolean or 0/1")
        e = e.astype(bool)
    return e


def check_survival_data(time, event=None, min_samples=1, min_events=0):
    """Validate a right-censored sample.

    Returns
    -------
    time : ndarray of float
    event : ndarray of bool
    """
    t = check_positive_times(time)
    e = check_event(event, t.shape[0])
    if t.shape[0] < min_samples:
        raise InsufficientDataError(
            f"need at least {min_samples} samples, got {t.shape[0]}"
        )
    if e.sum() < min_events:
        raise InsufficientDataError(
            f"need at least {min_events} observed events, got {int(e.sum())}"
        )
    return t, e


def check_probability(q, name="q"):
    """Array of probabilities strictly inside (0, 1)."""
    p = np.asarray(q, dtype=float)
    if np.any(~(p > 0) | ~(p < 1)):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return p
