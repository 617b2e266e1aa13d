"""Design-matrix construction with treatment coding."""

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from ..exceptions import InsufficientDataError, RankDeficientError, UnknownLevelError

INTERCEPT = "Intercept"

# (levels, reference level) for the categorical covariates of a scenario table
CATEGORICAL_LEVELS = {
    "mtype": (("straight", "turning_left", "turning_right"), "straight"),
    "itype": (("no_interaction", "int_ped", "int_cyc"), "no_interaction"),
}
NUMERIC_COVARIATES = ("v_i", "lv_i", "v_m", "lv_m", "dav")


@dataclass(frozen=True)
class Categorical:
    name: str
    levels: tuple
    reference: str

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.reference not in self.levels:
            raise ValueError(f"reference level {self.reference!r} not in levels of {self.name}")
        if len(set(self.levels)) != len(self.levels):
            raise ValueError(f"duplicate levels in {self.name}")

    @property
    def dummy_levels(self):
        return tuple(lv for lv in self.levels if lv != self.reference)

    @property
    def dummy_names(self):
        return tuple(f"{self.name}_{lv}" for lv in self.dummy_levels)


@dataclass(frozen=True)
class DesignSpec:
    """Which covariates enter the model and how categoricals are coded."""

    numeric: tuple = ()
    categorical: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "numeric", tuple(self.numeric))
        cats = tuple(
            c if isinstance(c, Categorical) else Categorical(*c) for c in self.categorical
        )
        object.__setattr__(self, "categorical", cats)
        names = list(self.numeric) + [c.name for c in cats]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate covariate names in {names}")

    @property
    def terms(self):
        """Selectable terms: numeric columns, then whole categorical factors."""
        return tuple(self.numeric) + tuple(c.name for c in self.categorical)

    @property
    def column_names(self):
        names = [INTERCEPT, *self.numeric]
        for c in self.categorical:
            names.extend(c.dummy_names)
        return tuple(names)

    def subset(self, terms):
        terms = set(terms)
        unknown = terms - set(self.terms)
        if unknown:
            raise ValueError(f"unknown terms {sorted(unknown)}")
        return DesignSpec(
            numeric=tuple(n for n in self.numeric if n in terms),
            categorical=tuple(c for c in self.categorical if c.name in terms),
        )

    def to_dict(self):
        return {
            "numeric": list(self.numeric),
            "categorical": [
                {"name": c.name, "levels": list(c.levels), "reference": c.reference}
                for c in self.categorical
            ],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            numeric=tuple(d.get("numeric", ())),
            categorical=tuple(
                Categorical(c["name"], tuple(c["levels"]), c["reference"])
                for c in d.get("categorical", ())
            ),
        )

    def encode_row(self, profile: Mapping):
        """Covariate row (with intercept) for a prediction profile.

        Missing numeric values default to 0 and missing factors to their
        reference level, so an empty profile is the reference profile.
        """
        row = [1.0]
        for name in self.numeric:
            row.append(float(profile.get(name, 0.0)))
        for c in self.categorical:
            level = profile.get(c.name, c.reference)
            if level not in c.levels:
                raise UnknownLevelError(f"{c.name}: unknown level {level!r}")
            row.extend(1.0 if level == lv else 0.0 for lv in c.dummy_levels)
        return np.array(row)


def make_spec(terms: Sequence[str]):
    """DesignSpec from term names, using the scenario-table level map."""
    numeric, categorical = [], []
    for term in terms:
        if term in CATEGORICAL_LEVELS:
            levels, ref = CATEGORICAL_LEVELS[term]
            categorical.append(Categorical(term, levels, ref))
        else:
            numeric.append(term)
    return DesignSpec(tuple(numeric), tuple(categorical))


def parse_formula(formula: str):
    """Parse ``"srt ~ v_m + lv_i + mtype"`` into ``(response, DesignSpec)``."""
    if "~" not in formula:
        raise ValueError(f"formula must contain '~': {formula!r}")
    lhs, rhs = formula.split("~", 1)
    response = lhs.strip()
    rhs = rhs.strip()
    terms = [] if rhs in ("", "1") else [t.strip() for t in rhs.split("+")]
    terms = [t for t in terms if t and t != "1"]
    return response, make_spec(terms)


def default_design_spec():
    """All linear terms except initial speed (excluded for collinearity with dav)."""
    return make_spec(("v_m", "lv_i", "lv_m", "dav", "mtype", "itype"))


@dataclass
class DesignMatrix:
    column_names: tuple
    X: np.ndarray
    y: np.ndarray
    event: np.ndarray
    spec: DesignSpec = field(default_factory=DesignSpec)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def time(self):
        return np.exp(self.y)


def records_frame(records):
    """Coerce scenario records, dicts or a DataFrame to a DataFrame."""
    if isinstance(records, pd.DataFrame):
        return records
    rows = [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in records]
    return pd.DataFrame(rows)


def _check_rank(X, names):
    if X.shape[1] == 0:
        return
    _, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(float).eps * d[0]
    rank = int(np.sum(d > tol))
    if rank < X.shape[1]:
        dropped = sorted(piv[rank:])
        raise RankDeficientError(names[dropped[0]])


def build_design_matrix(records, spec: DesignSpec, response="srt", event=None):
    """Treatment-coded design matrix with intercept in column 0.

    Parameters
    ----------
    records : sequence of ScenarioRecord, dicts, or DataFrame
    spec : DesignSpec
    response : str
        Column holding the (positive) event times.
    event : array-like of bool, optional
        Column name or array; defaults to all events observed.
    """
    df = records_frame(records)
    n = len(df)
    cols = [np.ones(n)]
    for name in spec.numeric:
        cols.append(df[name].to_numpy(dtype=float))
    for c in spec.categorical:
        values = df[c.name].astype(str).to_numpy()
        unknown = sorted(set(values) - set(c.levels))
        if unknown:
            raise UnknownLevelError(f"{c.name}: unknown level(s) {unknown}")
        for lv in c.dummy_levels:
            cols.append((values == lv).astype(float))
    X = np.column_stack(cols)
    names = spec.column_names
    if n < X.shape[1] + 1:
        raise InsufficientDataError(f"need at least {X.shape[1] + 1} rows, got {n}")
    _check_rank(X, names)

    t = df[response].to_numpy(dtype=float)
    if np.any(~(t > 0)):
        raise ValueError(f"{response} must be strictly positive")
    if event is None:
        ev = df["event"].to_numpy(dtype=bool) if "event" in df else np.ones(n, dtype=bool)
    elif isinstance(event, str):
        ev = df[event].to_numpy(dtype=bool)
    else:
        ev = np.asarray(event, dtype=bool)
    return DesignMatrix(names, X, np.log(t), ev, spec)
