from .validation import (
    check_event,
    check_positive_times,
    check_probability,
    check_survival_data,
)

__all__ = [
    "check_event",
    "check_positive_times",
    "check_probability",
    "check_survival_data",
]
