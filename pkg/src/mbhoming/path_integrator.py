"""Noisy position-fix emulation and the egocentric homing vector.

Geographic fixes map onto a local east/north tangent plane; the nest is
encoded egocentrically as (theta_n, r) where positive theta_n puts the
nest on the LEFT of the current heading.  The sign of theta_n (plus an
at-nest radius test) yields the categorical teaching signal that routes
visual learning into the left, right, or nest memory bank.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

EARTH_RADIUS_M = 6_371_000.0
MAX_LOCAL_RANGE_M = 1_000.0  # working-area bound for the tangent plane
MIN_HEADING_MOVE_M = 0.05    # below this, differentiated heading is noise


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass(frozen=True)
class GeoFix:
    lat: float  # degrees
    lon: float  # degrees
    t: float    # seconds


@dataclass(frozen=True)
class LocalPose:
    x: float                  # meters east
    y: float                  # meters north
    heading: float | None     # radians CCW from +x (east); None = unavailable
    t: float


@dataclass(frozen=True)
class HomingVector:
    theta_n: float  # egocentric nest bearing; positive = nest on the left
    r: float        # meters


class TeachingSignal(Enum):
    LEFT = "left"
    RIGHT = "right"
    NEST = "nest"


@dataclass(frozen=True)
class PINoiseModel:
    pos_sigma: float = 0.014                  # meters, per axis
    heading_sigma: float = math.radians(5.0)  # radians
    update_rate: float = 2.0                  # Hz
    seed: int = 0

    def __post_init__(self):
        if self.pos_sigma < 0 or self.heading_sigma < 0 or self.update_rate <= 0:
            raise ValueError("noise sigmas must be >= 0 and update_rate > 0")


class HeadingUnavailableError(ValueError):
    """Raised when an operation needs a heading the stream cannot supply."""


def geo_to_local(fix: GeoFix, origin: GeoFix) -> tuple[float, float]:
    """Project a fix onto the tangent plane at `origin` (east, north).

    Equirectangular local projection: x = R*cos(lat0)*dlon, y = R*dlat.
    Over a <=100 m working area the divergence from a true conformal
    projection is below a millimeter, under the position noise floor.
    """
    dlat = math.radians(fix.lat - origin.lat)
    dlon = math.radians(fix.lon - origin.lon)
    x = EARTH_RADIUS_M * math.cos(math.radians(origin.lat)) * dlon
    y = EARTH_RADIUS_M * dlat
    if math.hypot(x, y) > MAX_LOCAL_RANGE_M:
        raise ValueError(
            f"fix {math.hypot(x, y):.0f} m from origin exceeds the "
            f"{MAX_LOCAL_RANGE_M:.0f} m working area")
    return x, y


def local_to_geo(x: float, y: float, origin: GeoFix) -> tuple[float, float]:
    """Inverse of geo_to_local, for emitting lat/lon columns in fix logs."""
    lat = origin.lat + math.degrees(y / EARTH_RADIUS_M)
    lon = origin.lon + math.degrees(
        x / (EARTH_RADIUS_M * math.cos(math.radians(origin.lat))))
    return lat, lon


def heading_from_fixes(prev_xy, next_xy, min_move: float = MIN_HEADING_MOVE_M):
    """Differentiated heading, or None when displacement < min_move."""
    dx = next_xy[0] - prev_xy[0]
    dy = next_xy[1] - prev_xy[1]
    if math.hypot(dx, dy) < min_move:
        return None
    return wrap_angle(math.atan2(dy, dx))


def homing_vector(pose: LocalPose, nest_xy) -> HomingVector:
    """Egocentric nest direction and distance for a posed fix."""
    if pose.heading is None:
        raise HeadingUnavailableError(
            "pose has no heading; wait for sufficient displacement")
    dx = nest_xy[0] - pose.x
    dy = nest_xy[1] - pose.y
    return HomingVector(theta_n=wrap_angle(math.atan2(dy, dx) - pose.heading),
                        r=math.hypot(dx, dy))


def teaching_signal(hv: HomingVector, r_nest: float = 0.3) -> TeachingSignal:
    """Nest within r_nest, else the side the nest lies on (0 -> LEFT)."""
    if hv.r <= r_nest:
        return TeachingSignal.NEST
    return TeachingSignal.LEFT if hv.theta_n >= 0 else TeachingSignal.RIGHT


def noisy_fix_stream(true_poses, noise: PINoiseModel) -> list[LocalPose]:
    """Decimate a dense true-pose stream to update_rate and add noise.

    Emits the first input pose at or after each tick (ticks start at the
    stream's first timestamp), so output timestamps are a subset of input
    timestamps.  Position noise is i.i.d. Gaussian per axis; heading noise
    is Gaussian on the true heading.
    """
    poses = list(true_poses)
    if not poses:
        return []
    rng = np.random.default_rng(noise.seed)
    period = 1.0 / noise.update_rate
    out = []
    next_tick = poses[0].t
    for pose in poses:
        if pose.t + 1e-9 < next_tick:
            continue
        ex, ey = rng.normal(0.0, noise.pos_sigma, size=2) if noise.pos_sigma > 0 else (0.0, 0.0)
        heading = pose.heading
        if heading is not None:
            eh = rng.normal(0.0, noise.heading_sigma) if noise.heading_sigma > 0 else 0.0
            heading = wrap_angle(heading + eh)
        out.append(LocalPose(x=pose.x + ex, y=pose.y + ey,
                             heading=heading, t=pose.t))
        next_tick += period
        while next_tick + 1e-9 < pose.t:
            next_tick += period
    return out


@dataclass(frozen=True)
class FixRecord:
    """One path-integrator update: noisy pose plus derived homing data."""

    t: float
    x: float
    y: float
    heading: float
    theta_n: float
    r: float
    signal: TeachingSignal


def integrate_fixes(true_poses, nest_xy, noise: PINoiseModel,
                    r_nest: float = 0.3) -> list[FixRecord]:
    """Full PI stage: decimate, corrupt, and categorize a pose stream."""
    records = []
    for pose in noisy_fix_stream(true_poses, noise):
        if pose.heading is None:
            continue
        hv = homing_vector(pose, nest_xy)
        records.append(FixRecord(t=pose.t, x=pose.x, y=pose.y,
                                 heading=pose.heading, theta_n=hv.theta_n,
                                 r=hv.r, signal=teaching_signal(hv, r_nest)))
    return records
