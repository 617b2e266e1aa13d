"""Yielding-event extraction: braking detection, labelling and covariates."""

import csv
import io
import logging
from dataclasses import asdict, dataclass, fields

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import (
    DegenerateDistanceError,
    EmptyWindowError,
    ExclusionError,
    NoArmMatchError,
    NoConflictZoneTransitError,
    NoCrossingReachedError,
    NoDecelerationError,
    ParseError,
)
from .ingest import VEHICLE_CLASSES, RoadUserClass, distance_to_crossing, first_line_crossing, speed_series

logger = logging.getLogger(__name__)

MTYPES = ("straight", "turning_left", "turning_right")
ITYPES = ("no_interaction", "int_ped", "int_cyc")
SCENARIO_COLUMNS = ("track_id", "itype", "mtype", "v_i", "lv_i", "v_m", "lv_m", "dav", "srt")
NUMERIC_FIELDS = ("v_i", "lv_i", "v_m", "lv_m", "dav", "srt")


@dataclass(frozen=True)
class ScenarioRecord:
    """One yielding event: speed reduction time and its covariates."""

    track_id: int
    srt: float
    v_i: float
    lv_i: float
    v_m: float
    lv_m: float
    dav: float
    mtype: str
    itype: str

    def __post_init__(self):
        if not self.srt > 0:
            raise ValueError(f"track {self.track_id}: srt must be > 0")
        if not self.v_i >= self.v_m >= 0:
            raise ValueError(f"track {self.track_id}: need v_i >= v_m >= 0")
        if not self.lv_i > self.lv_m >= 0:
            raise ValueError(f"track {self.track_id}: need lv_i > lv_m >= 0")
        if not self.dav >= 0:
            raise ValueError(f"track {self.track_id}: dav must be >= 0")
        if self.mtype not in MTYPES:
            raise ValueError(f"unknown maneuver type {self.mtype!r}")
        if self.itype not in ITYPES:
            raise ValueError(f"unknown interaction type {self.itype!r}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ExtractionConfig:
    """Thresholds for rule-based scenario extraction.

    ``arm_filter`` restricts extraction to one approach arm, e.g. only
    vehicles approaching from the right-hand side.
    """

    approach_window_max: float = 60.0
    min_drop: float = 0.5
    vru_overlap_margin: float = 1.0
    turn_threshold: float = 45.0
    arm_filter: str = None
    cyclist_precedence: bool = True
    vehicle_classes: tuple = ("car", "truck_bus")

    def __post_init__(self):
        for name in ("approach_window_max", "min_drop", "vru_overlap_margin", "turn_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not self.turn_threshold < 90:
            raise ValueError("turn_threshold must be below 90 degrees")
        object.__setattr__(self, "vehicle_classes",
                           tuple(RoadUserClass(c) for c in self.vehicle_classes))


@dataclass(frozen=True)
class BrakingEvent:
    i_idx: int
    m_idx: int
    v_i: float
    lv_i: float
    v_m: float
    lv_m: float
    srt: float


@dataclass(frozen=True)
class Exclusion:
    track_id: int
    reason: str
    message: str


def detect_braking(speed, dist, frame_rate, cfg=ExtractionConfig()):
    """Locate the braking maneuver ahead of the crossing.

    The onset is the (first) speed maximum among frames with
    ``0 < dist <= approach_window_max``; the end is the (first) speed minimum
    over later frames up to the crossing entry (``dist >= 0``).
    """
    speed = np.asarray(speed, dtype=float)
    dist = np.asarray(dist, dtype=float)
    if speed.shape != dist.shape:
        raise ValueError("speed and distance series must be aligned")
    window = np.flatnonzero((dist > 0) & (dist <= cfg.approach_window_max))
    if window.size == 0:
        raise EmptyWindowError("no frame inside the approach window")
    i_idx = int(window[np.argmax(speed[window])])
    after = np.flatnonzero(dist >= 0)
    after = after[after > i_idx]
    if after.size == 0:
        raise NoDecelerationError("no frames between speed maximum and crossing")
    m_idx = int(after[np.argmin(speed[after])])
    v_i, v_m = float(speed[i_idx]), float(speed[m_idx])
    if v_i - v_m < cfg.min_drop:
        raise NoDecelerationError(f"speed drop {v_i - v_m:.3f} m/s below min_drop")
    return BrakingEvent(i_idx, m_idx, v_i, float(dist[i_idx]), v_m, float(dist[m_idx]),
                        (m_idx - i_idx) / float(frame_rate))


def compute_dav(v_i, v_m, lv_i, lv_m):
    """Average deceleration ``(v_i^2 - v_m^2) / (2 (lv_i - lv_m))``."""
    if lv_i == lv_m:
        raise DegenerateDistanceError("lv_i equals lv_m")
    return (v_i * v_i - v_m * v_m) / (2.0 * (lv_i - lv_m))


def wrap_angle(delta):
    """Wrap degrees to (-180, 180]."""
    d = np.mod(np.asarray(delta, dtype=float) + 180.0, 360.0) - 180.0
    d = np.where(d == -180.0, 180.0, d)
    return d.item() if d.ndim == 0 else d


def classify_maneuver(track, geometry, cfg=ExtractionConfig()):
    """Straight / left / right from the heading change across the conflict zone.

    Headings are counterclockwise-positive, so a left turn raises the heading.
    """
    inside = np.asarray(geometry.in_conflict_zone(track.x, track.y))
    idx = np.flatnonzero(inside)
    if idx.size == 0 or idx[0] == 0:
        raise NoConflictZoneTransitError(f"track {track.track_id} does not enter the conflict zone")
    entry = int(idx[0])
    outside_after = np.flatnonzero(~inside[entry:])
    if outside_after.size == 0:
        raise NoConflictZoneTransitError(f"track {track.track_id} does not exit the conflict zone")
    exit_ = entry + int(outside_after[0])
    delta = wrap_angle(track.heading[exit_] - track.heading[entry])
    if delta > cfg.turn_threshold:
        return "turning_left"
    if delta < -cfg.turn_threshold:
        return "turning_right"
    return "straight"


def classify_interaction(car, vrus, braking, geometry, cfg=ExtractionConfig(), frame_rate=25.0):
    """Label the event by which vulnerable road users occupy the crossing.

    A VRU occupies the crossing if any of its positions lies inside the
    crossing polygon between the braking onset and ``vru_overlap_margin``
    seconds after the speed minimum.
    """
    start = car.frames[braking.i_idx]
    stop = car.frames[braking.m_idx] + int(round(cfg.vru_overlap_margin * frame_rate))
    kinds = set()
    for meta, series in vrus:
        cls = meta.road_user_class
        if cls not in (RoadUserClass.PEDESTRIAN, RoadUserClass.BICYCLE):
            continue
        mask = (series.frames >= start) & (series.frames <= stop)
        if mask.any() and np.any(geometry.in_crossing(series.x[mask], series.y[mask])):
            kinds.add(cls)
    has_cyc = RoadUserClass.BICYCLE in kinds
    has_ped = RoadUserClass.PEDESTRIAN in kinds
    if has_cyc and (cfg.cyclist_precedence or not has_ped):
        return "int_cyc"
    if has_ped:
        return "int_ped"
    return "no_interaction"


def assign_arm(track, geometry, cfg=ExtractionConfig()):
    """First approach arm (in arm-id order) the track enters before crossing it."""
    arm_ids = sorted(geometry.arms) if cfg.arm_filter is None else [str(cfg.arm_filter)]
    crossed_any = False
    for arm_id in arm_ids:
        if arm_id not in geometry.arms:
            raise ValueError(f"unknown arm {arm_id!r}")
        hit = first_line_crossing(track.xy, geometry.entry_lines[arm_id])
        if hit is None:
            continue
        crossed_any = True
        pre = slice(0, hit[0] + 1)
        arm = geometry.arms[arm_id]
        in_corr = np.asarray(geometry.in_corridor(arm_id, track.x[pre], track.y[pre]))
        if np.any(in_corr & arm.heading_ok(track.heading[pre])):
            return arm_id
    if not crossed_any:
        raise NoCrossingReachedError(track.track_id)
    raise NoArmMatchError(f"track {track.track_id} matches no approach arm")


def extract_track(track, vrus, geometry, frame_rate, cfg=ExtractionConfig()):
    """ScenarioRecord for a single vehicle track; raises ExclusionError otherwise."""
    arm = assign_arm(track, geometry, cfg)
    dist = distance_to_crossing(track, geometry, arm)
    braking = detect_braking(speed_series(track), dist, frame_rate, cfg)
    dav = compute_dav(braking.v_i, braking.v_m, braking.lv_i, braking.lv_m)
    mtype = classify_maneuver(track, geometry, cfg)
    itype = classify_interaction(track, vrus, braking, geometry, cfg, frame_rate)
    try:
        return ScenarioRecord(track.track_id, braking.srt, braking.v_i, braking.lv_i,
                              braking.v_m, braking.lv_m, dav, mtype, itype)
    except ValueError as exc:
        err = ExclusionError(str(exc))
        err.reason = "invalid_record"
        raise err from None


def extract_scenarios(recording, geometry, cfg=ExtractionConfig(), return_exclusions=False):
    """One record per qualifying vehicle track, ordered by track id.

    Tracks that cannot produce a record are skipped; with
    ``return_exclusions=True`` the list of :class:`Exclusion` is returned too.
    """
    vrus = recording.of_class(RoadUserClass.PEDESTRIAN, RoadUserClass.BICYCLE)
    records, exclusions = [], []
    vehicles = sorted(recording.of_class(*cfg.vehicle_classes), key=lambda ms: ms[0].track_id)
    for meta, track in vehicles:
        try:
            records.append(extract_track(track, vrus, geometry, recording.frame_rate, cfg))
        except ExclusionError as exc:
            exclusions.append(Exclusion(meta.track_id, exc.reason, str(exc)))
            logger.debug("track %s excluded: %s", meta.track_id, exc)
    if return_exclusions:
        return records, exclusions
    return records


def describe(records):
    """Per-interaction-type means of the numeric variables (empty groups omitted)."""
    df = records_to_frame(records)
    if df.empty:
        return pd.DataFrame(columns=["n", *NUMERIC_FIELDS])
    groups = []
    for itype in ITYPES:
        g = df[df["itype"] == itype]
        if len(g):
            groups.append(pd.Series({"n": len(g), **g[list(NUMERIC_FIELDS)].mean().to_dict()},
                                    name=itype))
    out = pd.DataFrame(groups)
    out["n"] = out["n"].astype(int)
    out.index.name = "itype"
    return out


def records_to_frame(records):
    if isinstance(records, pd.DataFrame):
        return records
    return pd.DataFrame([r.to_dict() for r in records],
                        columns=[f.name for f in fields(ScenarioRecord)])


def format_scenarios(records):
    """Scenario table as CSV text, floats with six decimals."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCENARIO_COLUMNS)
    for r in records:
        writer.writerow([r.track_id, r.itype, r.mtype,
                         *(f"{getattr(r, c):.6f}" for c in SCENARIO_COLUMNS[3:])])
    return buf.getvalue()


def read_scenarios(path):
    """Read a scenario table back into records, validating the schema."""
    df = pd.read_csv(path)
    missing = [c for c in SCENARIO_COLUMNS if c not in df.columns]
    if missing:
        raise ParseError(f"{path}: scenario table missing columns {missing}")
    out = []
    for line, row in enumerate(df.to_dict("records"), start=2):
        try:
            out.append(ScenarioRecord(
                int(row["track_id"]), float(row["srt"]), float(row["v_i"]),
                float(row["lv_i"]), float(row["v_m"]), float(row["lv_m"]),
                float(row["dav"]), str(row["mtype"]), str(row["itype"]),
            ))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"{path}:{line}: {exc}") from None
    return out


class ScenarioExtractor(BaseEstimator, TransformerMixin):
    """Transformer turning a :class:`Recording` into a scenario table.

    Attributes
    ----------
    exclusions_ : list of Exclusion
        Tracks skipped during the last :meth:`transform`.
    """

    def __init__(self, geometry=None, approach_window_max=60.0, min_drop=0.5,
                 vru_overlap_margin=1.0, turn_threshold=45.0, arm_filter=None,
                 cyclist_precedence=True):
        self.geometry = geometry
        self.approach_window_max = approach_window_max
        self.min_drop = min_drop
        self.vru_overlap_margin = vru_overlap_margin
        self.turn_threshold = turn_threshold
        self.arm_filter = arm_filter
        self.cyclist_precedence = cyclist_precedence

    def config(self):
        return ExtractionConfig(self.approach_window_max, self.min_drop,
                                self.vru_overlap_margin, self.turn_threshold,
                                self.arm_filter, self.cyclist_precedence)

    def fit(self, X=None, y=None):
        if self.geometry is None:
            raise ValueError("ScenarioExtractor needs a SiteGeometry")
        self.config_ = self.config()
        return self

    def transform(self, X):
        """``X`` is a Recording or an iterable of Recordings."""
        if not hasattr(self, "config_"):
            self.fit()
        recordings = [X] if hasattr(X, "tracks") else list(X)
        records, self.exclusions_ = [], []
        for rec in recordings:
            r, e = extract_scenarios(rec, self.geometry, self.config_, return_exclusions=True)
            records.extend(r)
            self.exclusions_.extend(e)
        return records_to_frame(records)
