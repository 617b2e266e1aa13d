"""Synthetic sites, trajectories and scenario tables.

Real inD-style recordings are licensed, so tests and demos run on data built
here: a straight road through a zebra crossing next to a square conflict
zone, with vehicles approaching from the west ("right" arm, heading 0)
or the east ("left" arm, heading 180).
"""

import numpy as np

from .aft.design import CATEGORICAL_LEVELS
from .ingest import Arm, Recording, RoadUserClass, SiteGeometry, TrackMeta, TrackSeries
from .scenario import ScenarioRecord

CROSSING_X = (48.0, 52.0)
ROAD_HALF_WIDTH = 6.0
CONFLICT_X = (54.0, 70.0)
CONFLICT_HALF = 8.0

# Reference log-logistic AFT coefficients (all linear terms); simulation defaults.
REFERENCE_COEFFICIENTS = {
    "Intercept": 1.50079,
    "v_m": -0.12578,
    "lv_i": 0.01638,
    "lv_m": 0.01568,
    "dav": -0.18975,
    "mtype_turning_left": 0.22392,
    "mtype_turning_right": 0.03948,
    "itype_int_ped": -0.15059,
    "itype_int_cyc": -0.00178,
}
REFERENCE_LOG_SCALE = -2.41191


def demo_geometry():
    x0, x1 = CROSSING_X
    w = ROAD_HALF_WIDTH
    c0, c1 = CONFLICT_X
    h = CONFLICT_HALF
    return SiteGeometry(
        crossing_polygon=[(x0, -w), (x1, -w), (x1, w), (x0, w)],
        entry_lines={"right": [(x0, -w), (x0, w)], "left": [(x1, -w), (x1, w)]},
        arms={
            "right": Arm("right", 315.0, 45.0, [(-500.0, -w), (x0, -w), (x0, w), (-500.0, w)]),
            "left": Arm("left", 135.0, 225.0, [(x1, -w), (500.0, -w), (500.0, w), (x1, w)]),
        },
        conflict_zone=[(c0, -h), (c1, -h), (c1, h), (c0, h)],
    )


def integrate_speed(speed, frame_rate):
    """Arc length at each frame from a per-frame speed (trapezoid rule).

    Exact for speed profiles that are linear between frames.
    """
    speed = np.asarray(speed, dtype=float)
    steps = 0.5 * (speed[1:] + speed[:-1]) / frame_rate
    return np.concatenate(([0.0], np.cumsum(steps)))


def path_pose(s, start, heading0, turn_at=None, radius=8.0, turn_deg=0.0):
    """Position and heading along a straight-arc-straight path at arc lengths ``s``.

    ``turn_deg > 0`` turns left (counterclockwise).
    """
    s = np.asarray(s, dtype=float)
    h0 = np.deg2rad(heading0)
    d0 = np.array([np.cos(h0), np.sin(h0)])
    start = np.asarray(start, dtype=float)
    xy = start + s[:, None] * d0
    heading = np.full(s.shape, heading0, dtype=float)
    if turn_at is None or turn_deg == 0:
        return xy, heading
    theta = np.deg2rad(turn_deg)
    arc_len = radius * abs(theta)
    sign = np.sign(theta)
    normal = sign * np.array([-d0[1], d0[0]])
    centre = start + turn_at * d0 + radius * normal
    on_arc = (s > turn_at) & (s <= turn_at + arc_len)
    after = s > turn_at + arc_len
    phi = (s[on_arc] - turn_at) / radius * sign
    rel0 = -radius * normal
    c, sn = np.cos(phi), np.sin(phi)
    xy[on_arc] = centre + np.column_stack([c * rel0[0] - sn * rel0[1], sn * rel0[0] + c * rel0[1]])
    heading[on_arc] = heading0 + np.rad2deg(phi)
    end_rel = np.array([np.cos(theta) * rel0[0] - np.sin(theta) * rel0[1],
                        np.sin(theta) * rel0[0] + np.cos(theta) * rel0[1]])
    end = centre + end_rel
    h1 = h0 + theta
    d1 = np.array([np.cos(h1), np.sin(h1)])
    xy[after] = end + (s[after] - turn_at - arc_len)[:, None] * d1
    heading[after] = heading0 + turn_deg
    return xy, heading


def ramp_profile(v_start, v_end, ramp_frames, hold_frames, exit_frames=0, v_exit=None):
    """Linear deceleration over ``ramp_frames`` then a hold at ``v_end``."""
    k = np.arange(ramp_frames + 1)
    ramp = v_start + (v_end - v_start) * k / ramp_frames
    ramp[-1] = v_end
    hold = np.full(hold_frames, v_end, dtype=float)
    parts = [ramp, hold]
    if exit_frames:
        v_exit = v_start if v_exit is None else v_exit
        parts.append(v_end + (v_exit - v_end) * np.arange(1, exit_frames + 1) / exit_frames)
    return np.concatenate(parts)


def vehicle_track(track_id, speed, frame_rate=25.0, start_frame=0, arm="right",
                  start_dist=40.0, turn_deg=0.0, lane_offset=2.0):
    """Vehicle driving ``speed`` (per frame) towards the crossing along an arm.

    ``start_dist`` is the arc length from the first frame to the entry line.
    """
    s = integrate_speed(speed, frame_rate)
    entry_x = CROSSING_X[0] if arm == "right" else CROSSING_X[1]
    if arm == "right":
        start, heading0 = (entry_x - start_dist, -lane_offset), 0.0
        turn_at = start_dist + (CONFLICT_X[0] + 2.0 - entry_x)
    else:
        start, heading0 = (entry_x + start_dist, lane_offset), 180.0
        turn_at = None
    xy, heading = path_pose(s, start, heading0, turn_at=turn_at, turn_deg=turn_deg)
    hr = np.deg2rad(heading)
    frames = start_frame + np.arange(len(speed))
    series = TrackSeries(track_id, frames, xy[:, 0], xy[:, 1], heading,
                         speed * np.cos(hr), speed * np.sin(hr))
    meta = TrackMeta(track_id, RoadUserClass.CAR, int(frames[0]), int(frames[-1]))
    return meta, series


def vru_track(track_id, road_user_class, start_frame, n_frames, frame_rate=25.0,
              walk_speed=1.4, x=50.0, y_start=-9.0):
    """Pedestrian or cyclist crossing the road along the zebra (northbound)."""
    t = np.arange(n_frames) / frame_rate
    y = y_start + walk_speed * t
    xs = np.full(n_frames, x)
    frames = start_frame + np.arange(n_frames)
    series = TrackSeries(track_id, frames, xs, y, np.full(n_frames, 90.0),
                         np.zeros(n_frames), np.full(n_frames, walk_speed))
    meta = TrackMeta(track_id, RoadUserClass(road_user_class), int(frames[0]),
                     int(frames[-1]))
    return meta, series


def ramp_fixture(frame_rate=25.0):
    """Single car braking linearly 8 -> 1 m/s over 75 frames, starting 40 m out."""
    speed = ramp_profile(8.0, 1.0, 75, int(28 * frame_rate), exit_frames=25, v_exit=8.0)
    speed = np.concatenate([speed, np.full(int(4 * frame_rate), 8.0)])
    return vehicle_track(1, speed, frame_rate)


def synthetic_recording(n_cars=10, random_state=0, frame_rate=25.0, vru_share=(0.25, 0.05),
                        recording_id=1, arms=("right",)):
    """Recording with ``n_cars`` braking vehicles in separate time slots.

    Each vehicle is accompanied, with probability ``vru_share``, by a
    pedestrian or a cyclist on the crossing during its manoeuvre.
    """
    rng = np.random.default_rng(random_state)
    tracks = []
    next_frame = 0
    next_id = 1
    for _ in range(n_cars):
        v0 = rng.uniform(6.0, 10.0)
        v1 = rng.uniform(0.5, min(5.5, v0 - 1.0))
        ramp = int(rng.integers(40, 200))
        turn = float(rng.choice([0.0, 90.0, -90.0], p=[0.6, 0.2, 0.2]))
        arm = str(rng.choice(list(arms)))
        if arm != "right":
            turn = 0.0
        hold = 30 + int(rng.integers(0, 20))
        # reach the crossing from the hold speed, then leave through the zone
        speed = ramp_profile(v0, v1, ramp, hold)
        s = integrate_speed(speed, frame_rate)
        start_dist = s[-1] + rng.uniform(5.0, 12.0)
        v_exit = max(v1, 4.0)
        tail = int(np.ceil((start_dist - s[-1] + 45.0) / v_exit * frame_rate))
        accel = np.linspace(v1, v_exit, 26)[1:]
        speed = np.concatenate([speed, accel, np.full(tail, v_exit)])
        meta, series = vehicle_track(next_id, speed, frame_rate, next_frame, arm,
                                     start_dist=start_dist, turn_deg=turn)
        tracks.append((meta, series))
        next_id += 1
        u = rng.uniform()
        kind = None
        if u < vru_share[0]:
            kind = "pedestrian"
        elif u < vru_share[0] + vru_share[1]:
            kind = "bicycle"
        if kind is not None:
            tracks.append(vru_track(next_id, kind, next_frame + ramp // 2, 12 * int(frame_rate),
                                    frame_rate, walk_speed=1.4 if kind == "pedestrian" else 4.0))
            next_id += 1
        next_frame = int(series.frames[-1]) + 10 * int(frame_rate)
    return Recording(recording_id, frame_rate, tuple(tracks))


def simulate_scenario_table(n, random_state=0, beta=None, log_scale=REFERENCE_LOG_SCALE,
                            family="loglogistic", itype_probs=(0.75, 0.22, 0.03),
                            mtype_probs=(0.6, 0.2, 0.2)):
    """Scenario records whose speed reduction time follows an AFT model.

    Covariate ranges are typical of urban yielding manoeuvres; initial speed
    is derived from the others so that dav is consistent.
    """
    rng = np.random.default_rng(random_state)
    beta = dict(REFERENCE_COEFFICIENTS if beta is None else beta)
    v_m = rng.uniform(0.5, 7.0, n)
    lv_i = rng.uniform(25.0, 55.0, n)
    lv_m = rng.uniform(3.0, 15.0, n)
    dav = rng.uniform(0.3, 1.5, n)
    v_i = np.sqrt(v_m**2 + 2.0 * dav * (lv_i - lv_m))
    mtypes = rng.choice(CATEGORICAL_LEVELS["mtype"][0], size=n, p=list(mtype_probs))
    itypes = rng.choice(CATEGORICAL_LEVELS["itype"][0], size=n, p=list(itype_probs))
    eta = np.full(n, beta.get("Intercept", 0.0))
    for name, col in (("v_m", v_m), ("lv_i", lv_i), ("lv_m", lv_m), ("dav", dav), ("v_i", v_i)):
        eta += beta.get(name, 0.0) * col
    for j in range(n):
        eta[j] += beta.get(f"mtype_{mtypes[j]}", 0.0) + beta.get(f"itype_{itypes[j]}", 0.0)
    eps = standard_error_draws(family, n, rng)
    srt = np.exp(eta + np.exp(log_scale) * eps)
    return [
        ScenarioRecord(j + 1, float(srt[j]), float(v_i[j]), float(lv_i[j]), float(v_m[j]),
                       float(lv_m[j]), float(dav[j]), str(mtypes[j]), str(itypes[j]))
        for j in range(n)
    ]


def standard_error_draws(family, n, rng):
    """Draws of the standardized log-time error for an AFT family."""
    u = rng.uniform(size=n)
    if family == "loglogistic":
        return np.log(u) - np.log1p(-u)
    if family == "lognormal":
        return rng.standard_normal(n)
    if family in ("weibull", "exponential"):
        return np.log(-np.log1p(-u))
    raise ValueError(f"unknown AFT family {family!r}")
