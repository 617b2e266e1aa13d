"""Reading inD-style trajectory recordings and site geometry."""

import json
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
import shapely
from shapely.geometry import LinearRing, Polygon

from .exceptions import (
    ClassUnknownError,
    FrameGapError,
    GeometryError,
    MissingColumnError,
    NoCrossingReachedError,
    ParseError,
)

TRACKS_COLUMNS = ("recordingId", "trackId", "frame", "xCenter", "yCenter", "heading",
                  "xVelocity", "yVelocity")
META_COLUMNS = ("trackId", "class", "initialFrame", "finalFrame")
RECORDING_META_COLUMNS = ("recordingId", "frameRate")


class RoadUserClass(str, Enum):
    CAR = "car"
    TRUCK_BUS = "truck_bus"
    PEDESTRIAN = "pedestrian"
    BICYCLE = "bicycle"

    def __str__(self):
        return self.value


VEHICLE_CLASSES = (RoadUserClass.CAR, RoadUserClass.TRUCK_BUS)
VRU_CLASSES = (RoadUserClass.PEDESTRIAN, RoadUserClass.BICYCLE)


@dataclass(frozen=True)
class TrackMeta:
    track_id: int
    road_user_class: RoadUserClass
    initial_frame: int
    final_frame: int

    def __post_init__(self):
        if self.final_frame < self.initial_frame:
            raise ParseError(f"track {self.track_id}: finalFrame < initialFrame")


@dataclass(frozen=True, eq=False)
class TrackSeries:
    """Per-frame kinematics of one road user.

    Heading is in degrees, normalized to [0, 360).
    """

    track_id: int
    frames: np.ndarray
    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    vx: np.ndarray
    vy: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.int64)
        object.__setattr__(self, "frames", frames)
        for name in ("x", "y", "vx", "vy"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "heading",
                           np.mod(np.asarray(self.heading, dtype=float), 360.0))
        n = frames.shape[0]
        for name in ("x", "y", "heading", "vx", "vy"):
            if getattr(self, name).shape != (n,):
                raise ParseError(f"track {self.track_id}: column {name} length mismatch")
        gaps = np.flatnonzero(np.diff(frames) != 1)
        if gaps.size:
            raise FrameGapError(self.track_id, int(frames[gaps[0] + 1]))
        for arr in (self.x, self.y, self.vx, self.vy):
            arr.flags.writeable = False
        self.heading.flags.writeable = False
        frames.flags.writeable = False

    def __len__(self):
        return self.frames.shape[0]

    @property
    def xy(self):
        return np.column_stack([self.x, self.y])


@dataclass(frozen=True)
class Recording:
    recording_id: int
    frame_rate: float
    tracks: tuple = ()

    def __post_init__(self):
        if not self.frame_rate > 0:
            raise ParseError("frameRate must be positive")
        object.__setattr__(self, "tracks", tuple(self.tracks))
        ids = [m.track_id for m, _ in self.tracks]
        if len(set(ids)) != len(ids):
            raise ParseError("duplicate trackId in recording")

    def of_class(self, *classes):
        return [(m, s) for m, s in self.tracks if m.road_user_class in classes]


# --- geometry ---------------------------------------------------------------

def _check_polygon(points, name):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise GeometryError(f"{name}: polygon needs at least 3 (x, y) vertices")
    if not LinearRing(pts).is_simple:
        raise GeometryError(f"{name}: polygon is self-intersecting")
    return Polygon(pts)


@dataclass(frozen=True)
class Arm:
    arm_id: str
    heading_min: float
    heading_max: float
    corridor: tuple

    def __post_init__(self):
        for h in (self.heading_min, self.heading_max):
            if not 0 <= h < 360:
                raise GeometryError(f"arm {self.arm_id}: heading bounds must lie in [0, 360)")
        object.__setattr__(self, "corridor", tuple(map(tuple, self.corridor)))
        _check_polygon(self.corridor, f"arm {self.arm_id} corridor")

    def heading_ok(self, heading):
        """Whether headings fall inside the (possibly wrapping) interval."""
        h = np.mod(np.asarray(heading, dtype=float), 360.0)
        if self.heading_min <= self.heading_max:
            return (h >= self.heading_min) & (h <= self.heading_max)
        return (h >= self.heading_min) | (h <= self.heading_max)


@dataclass(frozen=True)
class SiteGeometry:
    crossing_polygon: tuple
    entry_lines: dict
    arms: dict
    conflict_zone: tuple
    _shapes: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "crossing_polygon", tuple(map(tuple, self.crossing_polygon)))
        object.__setattr__(self, "conflict_zone", tuple(map(tuple, self.conflict_zone)))
        lines = {}
        for arm_id, seg in self.entry_lines.items():
            seg = np.asarray(seg, dtype=float)
            if seg.shape != (2, 2):
                raise GeometryError(f"entry line {arm_id} must be [[x1, y1], [x2, y2]]")
            lines[str(arm_id)] = tuple(map(tuple, seg))
        object.__setattr__(self, "entry_lines", lines)
        object.__setattr__(self, "arms", {str(k): v for k, v in self.arms.items()})
        shapes = {
            "crossing": _check_polygon(self.crossing_polygon, "crossing_polygon"),
            "conflict": _check_polygon(self.conflict_zone, "conflict_zone"),
        }
        for arm_id, arm in self.arms.items():
            shapes[f"arm:{arm_id}"] = Polygon(arm.corridor)
        object.__setattr__(self, "_shapes", shapes)

    def in_crossing(self, x, y):
        return shapely.intersects_xy(self._shapes["crossing"], x, y)

    def in_conflict_zone(self, x, y):
        return shapely.intersects_xy(self._shapes["conflict"], x, y)

    def in_corridor(self, arm_id, x, y):
        return shapely.intersects_xy(self._shapes[f"arm:{arm_id}"], x, y)

    def to_dict(self):
        return {
            "crossing_polygon": [list(p) for p in self.crossing_polygon],
            "entry_lines": {k: [list(p) for p in v] for k, v in self.entry_lines.items()},
            "arms": {
                k: {"heading_min": a.heading_min, "heading_max": a.heading_max,
                    "corridor": [list(p) for p in a.corridor]}
                for k, a in self.arms.items()
            },
            "conflict_zone": [list(p) for p in self.conflict_zone],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            arms = {
                str(k): Arm(str(k), float(v["heading_min"]), float(v["heading_max"]),
                            v["corridor"])
                for k, v in d["arms"].items()
            }
            return cls(d["crossing_polygon"], d["entry_lines"], arms, d["conflict_zone"])
        except KeyError as exc:
            raise GeometryError(f"site geometry is missing key {exc.args[0]!r}") from None


def load_geometry(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GeometryError(f"{path}: invalid JSON ({exc})") from None
    return SiteGeometry.from_dict(data)


def save_geometry(geometry, path):
    with open(path, "w") as fh:
        json.dump(geometry.to_dict(), fh, indent=2)


# --- CSV parsing ------------------------------------------------------------

def _read_csv(path, required):
    df = pd.read_csv(path)
    for col in required:
        if col not in df.columns:
            raise MissingColumnError(col, os.fspath(path))
    return df


def _parse_class(value, track_id):
    try:
        return RoadUserClass(str(value).strip().lower())
    except ValueError:
        raise ClassUnknownError(value, track_id) from None


def parse_recording(tracks_path, meta_path, recording_meta_path):
    """Parse one recording from its tracks, tracksMeta and recordingMeta CSVs.

    Raises
    ------
    MissingColumnError, FrameGapError, ClassUnknownError
        On the first offending column, frame or class label.
    """
    rec_meta = _read_csv(recording_meta_path, RECORDING_META_COLUMNS)
    if len(rec_meta) != 1:
        raise ParseError(f"{recording_meta_path}: expected exactly one recording row")
    recording_id = int(rec_meta["recordingId"].iloc[0])
    frame_rate = float(rec_meta["frameRate"].iloc[0])

    meta = _read_csv(meta_path, META_COLUMNS)
    tracks = _read_csv(tracks_path, TRACKS_COLUMNS)
    tracks = tracks.sort_values(["trackId", "frame"], kind="mergesort")
    groups = {int(tid): g for tid, g in tracks.groupby("trackId", sort=True)}

    out = []
    for row in meta.sort_values("trackId", kind="mergesort").to_dict("records"):
        tid = int(row["trackId"])
        m = TrackMeta(tid, _parse_class(row["class"], tid),
                      int(row["initialFrame"]), int(row["finalFrame"]))
        g = groups.get(tid)
        if g is None:
            raise ParseError(f"{tracks_path}: no rows for track {tid}")
        s = TrackSeries(tid, g["frame"].to_numpy(), g["xCenter"].to_numpy(),
                        g["yCenter"].to_numpy(), g["heading"].to_numpy(),
                        g["xVelocity"].to_numpy(), g["yVelocity"].to_numpy())
        if s.frames[0] != m.initial_frame or s.frames[-1] != m.final_frame:
            raise ParseError(
                f"{tracks_path}: track {tid} frames {s.frames[0]}..{s.frames[-1]} do not "
                f"match meta {m.initial_frame}..{m.final_frame}"
            )
        out.append((m, s))
    return Recording(recording_id, frame_rate, tuple(out))


def write_recording(recording, directory, prefix=None):
    """Write the three CSVs; returns their paths as (tracks, meta, recording_meta)."""
    prefix = f"{recording.recording_id:02d}" if prefix is None else prefix
    os.makedirs(directory, exist_ok=True)
    paths = tuple(os.path.join(directory, f"{prefix}_{kind}.csv")
                  for kind in ("tracks", "tracksMeta", "recordingMeta"))
    frames = []
    for _, s in recording.tracks:
        frames.append(pd.DataFrame({
            "recordingId": recording.recording_id, "trackId": s.track_id, "frame": s.frames,
            "xCenter": s.x, "yCenter": s.y, "heading": s.heading,
            "xVelocity": s.vx, "yVelocity": s.vy,
        }))
    tracks = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(
        columns=list(TRACKS_COLUMNS))
    tracks.to_csv(paths[0], index=False)
    pd.DataFrame(
        [{"trackId": m.track_id, "class": m.road_user_class.value,
          "initialFrame": m.initial_frame, "finalFrame": m.final_frame}
         for m, _ in recording.tracks],
        columns=list(META_COLUMNS),
    ).to_csv(paths[1], index=False)
    pd.DataFrame([{"recordingId": recording.recording_id,
                   "frameRate": recording.frame_rate}]).to_csv(paths[2], index=False)
    return paths


# --- derived signals --------------------------------------------------------

def speed_series(track):
    """Speed magnitude ``sqrt(vx^2 + vy^2)`` per frame."""
    return np.hypot(track.vx, track.vy)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def first_line_crossing(xy, line, eps=1e-12):
    """Earliest ``(k, u)`` with the polyline hitting ``line`` at ``P_k + u (P_{k+1} - P_k)``.

    Returns None when the polyline never touches the segment.
    """
    xy = np.asarray(xy, dtype=float)
    a, b = np.asarray(line, dtype=float)
    s = b - a
    if xy.shape[0] == 1:
        on = abs(_cross(xy[0] - a, s)) <= eps * max(1.0, np.hypot(*s)) and \
            -eps <= np.dot(xy[0] - a, s) <= np.dot(s, s) + eps
        return (0, 0.0) if on else None
    p = xy[:-1]
    r = xy[1:] - p
    denom = _cross(r, s)
    ap = a - p
    for k in range(p.shape[0]):
        if abs(denom[k]) > eps:
            u = _cross(ap[k], s) / denom[k]
            v = _cross(ap[k], r[k]) / denom[k]
            if -eps <= u <= 1 + eps and -eps <= v <= 1 + eps:
                return k, float(min(max(u, 0.0), 1.0))
        elif abs(_cross(ap[k], r[k])) <= eps:
            rr = np.dot(r[k], r[k])
            if rr == 0:
                continue
            ta = np.dot(ap[k], r[k]) / rr
            tb = np.dot(b - p[k], r[k]) / rr
            lo, hi = min(ta, tb), max(ta, tb)
            if hi >= -eps and lo <= 1 + eps:
                return k, float(max(lo, 0.0))
    return None


def distance_to_crossing(track, geometry, arm):
    """Signed arc length along the recorded path to the arm's entry line.

    Positive before the first crossing, zero at the crossing point and
    negative afterwards.

    Raises
    ------
    NoCrossingReachedError
        The path never intersects the entry line.
    """
    line = geometry.entry_lines[str(arm)]
    xy = track.xy
    hit = first_line_crossing(xy, line)
    if hit is None:
        raise NoCrossingReachedError(track.track_id)
    k, u = hit
    seg = np.hypot(*np.diff(xy, axis=0).T) if len(xy) > 1 else np.zeros(0)
    arc = np.concatenate(([0.0], np.cumsum(seg)))
    crossing_arc = arc[k] + (u * seg[k] if seg.size else 0.0)
    return crossing_arc - arc
