"""Procedural panoramic world, car-like vehicle, learning walks, trials.

The world is a flat arena of vertical cylinders plus a distant skyline;
panoramas are rendered by azimuthal ray casting, one visibility solve
per column.  Headings are quantized to the column grid (the camera's own
angular sampling), which makes rotation an exact column roll of the
image.  The vehicle follows kinematic bicycle dynamics.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import optic_lobe
from .mushroom_body import MBONBank, MBONId, encode
from .path_integrator import (
    LocalPose,
    PINoiseModel,
    TeachingSignal,
    homing_vector,
    integrate_fixes,
    wrap_angle,
)
from .sip_controller import ControlMode, SipController, lateral_error

# The SIP command convention is negative = left/CCW; the bicycle model's
# positive steer angle turns CCW.  Controllers driving this world must be
# constructed with steer_sign = STEER_SIGN so commands arrive kinematics-ready.
STEER_SIGN = -1.0


@dataclass(frozen=True)
class Landmark:
    x: float
    y: float
    radius: float
    height: float
    albedo: float


@dataclass(frozen=True)
class World:
    landmarks: tuple
    arena_half: float = 26.0        # arena spans +/- arena_half in x and y
    nest: tuple = (0.0, 0.0)
    cam_height: float = 0.25        # meters; 0 puts the horizon at infinity
    ground_albedo: float = 0.30
    sky_albedo: float = 0.85
    skyline_albedo: float = 0.55
    skyline_base: float = 0.07      # radians; keeps the horizon line uneven
    skyline_amp: tuple = ()         # radians, per harmonic (1, 2, 3, ...)
    skyline_phase: tuple = ()
    # Ground texture: seeded plane-wave value noise over world (x, y).
    # Anchored to the world, so it carries position information; a flat
    # ground renders identically everywhere and starves the sparse code.
    ground_waves: tuple = ()        # rows (kx, ky, phase, amp)
    stripe_amp: float = 0.35        # landmark surface stripe contrast
    stripe_count: int = 6
    seed: int = 0

    def skyline_elevation(self, azimuth):
        """Background (infinite-distance) horizon height vs world azimuth.

        A nonzero base keeps some skyline visible in every direction: a
        perfectly flat ground/sky edge is identical in all views and would
        dominate the sparse code without carrying any position signal.
        """
        e = np.full_like(np.asarray(azimuth, dtype=float), self.skyline_base)
        for i, (a, p) in enumerate(zip(self.skyline_amp, self.skyline_phase)):
            e = e + a * np.sin((i + 1) * azimuth + p)
        return np.maximum(e, 0.0)

    def inside_landmark(self, x: float, y: float, margin: float = 0.0) -> bool:
        return any(math.hypot(x - lm.x, y - lm.y) <= lm.radius + margin
                   for lm in self.landmarks)

    def ground_shade(self, px, py):
        """Multiplicative ground texture at world points (px, py)."""
        s = np.ones_like(np.asarray(px, dtype=float))
        for kx, ky, phase, amp in self.ground_waves:
            s = s + amp * np.sin(kx * px + ky * py + phase)
        return s


def generate_world(seed: int = 0, arena_half: float = 26.0,
                   n_landmarks: int = 40, clear_radius: float = 14.0) -> World:
    """Seeded arena: scattered cylinders, none within clear_radius of the nest."""
    rng = np.random.default_rng(seed)
    landmarks = []
    while len(landmarks) < n_landmarks:
        x, y = rng.uniform(-arena_half * 0.95, arena_half * 0.95, size=2)
        radius = rng.uniform(0.4, 1.5)
        if math.hypot(x, y) < clear_radius + radius:
            continue
        landmarks.append(Landmark(
            x=x, y=y, radius=radius,
            height=rng.uniform(2.0, 9.0),
            albedo=rng.uniform(0.05, 0.75),
        ))
    amp = rng.uniform(0.01, 0.05, size=6) * 0.9 ** np.arange(6)
    phase = rng.uniform(0.0, 2.0 * math.pi, size=6)
    waves = ground_wave_table(rng)
    return World(landmarks=tuple(landmarks), arena_half=arena_half,
                 skyline_amp=tuple(amp), skyline_phase=tuple(phase),
                 ground_waves=waves, seed=seed)


def ground_wave_table(rng, n_waves: int = 6, amp: float = 0.12,
                      wavelength=(0.8, 4.0)) -> tuple:
    """Seeded plane-wave set for the ground texture."""
    waves = []
    for _ in range(n_waves):
        lam = rng.uniform(*wavelength)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        kmag = 2.0 * math.pi / lam
        waves.append((kmag * math.cos(ang), kmag * math.sin(ang),
                      rng.uniform(0.0, 2.0 * math.pi),
                      amp * rng.uniform(0.5, 1.0)))
    return tuple(waves)


def save_world(world: World, path):
    """Key/value text file plus one line per landmark."""
    lines = [
        "mbhoming-world 1",
        f"seed = {world.seed}",
        f"arena_half = {world.arena_half!r}",
        f"nest = {world.nest[0]!r} {world.nest[1]!r}",
        f"cam_height = {world.cam_height!r}",
        f"ground_albedo = {world.ground_albedo!r}",
        f"sky_albedo = {world.sky_albedo!r}",
        f"skyline_albedo = {world.skyline_albedo!r}",
        f"skyline_base = {world.skyline_base!r}",
        "skyline_amp = " + " ".join(repr(a) for a in world.skyline_amp),
        "skyline_phase = " + " ".join(repr(p) for p in world.skyline_phase),
        f"stripe_amp = {world.stripe_amp!r}",
        f"stripe_count = {world.stripe_count}",
    ]
    for w in world.ground_waves:
        lines.append("ground_wave = " + " ".join(repr(v) for v in w))
    for lm in world.landmarks:
        lines.append(f"landmark = {lm.x!r} {lm.y!r} {lm.radius!r} "
                     f"{lm.height!r} {lm.albedo!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_world(path) -> World:
    kv = {}
    landmarks = []
    waves = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "mbhoming-world 1":
            raise ValueError(f"not a world file: header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "landmark":
                x, y, r, h, a = (float(v) for v in value.split())
                landmarks.append(Landmark(x, y, r, h, a))
            elif key == "ground_wave":
                waves.append(tuple(float(v) for v in value.split()))
            else:
                kv[key] = value
    nest = tuple(float(v) for v in kv["nest"].split())
    return World(
        landmarks=tuple(landmarks),
        arena_half=float(kv["arena_half"]),
        nest=nest,
        cam_height=float(kv["cam_height"]),
        ground_albedo=float(kv["ground_albedo"]),
        sky_albedo=float(kv["sky_albedo"]),
        skyline_albedo=float(kv["skyline_albedo"]),
        skyline_base=float(kv["skyline_base"]),
        skyline_amp=tuple(float(v) for v in kv["skyline_amp"].split()),
        skyline_phase=tuple(float(v) for v in kv["skyline_phase"].split()),
        ground_waves=tuple(waves),
        stripe_amp=float(kv["stripe_amp"]),
        stripe_count=int(kv["stripe_count"]),
        seed=int(kv["seed"]),
    )


def save_pgm(view: np.ndarray, path):
    """Binary PGM dump of a [0, 1] grayscale view, for debugging."""
    img = np.clip(np.asarray(view) * 255.0, 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5 {img.shape[1]} {img.shape[0]} 255\n".encode())
        fh.write(img.tobytes())


def render_panorama(world: World, x: float, y: float, heading: float,
                    width: int = 256, height: int = 64,
                    elev_span: float = math.pi / 2) -> np.ndarray:
    """Equirectangular grayscale render from (x, y, heading).

    Column azimuths are computed on a fixed grid offset by the heading
    rounded to whole columns, so two headings one column apart render to
    images that are exact column rolls of each other.  The image center
    column looks straight ahead; rightward columns sweep clockwise.
    Rows span elevations +elev_span/2 (top) to -elev_span/2; the camera
    sits at ground level, so landmarks rise from the horizon row.
    """
    if world.inside_landmark(x, y):
        raise ValueError(f"render pose ({x:.2f}, {y:.2f}) is inside a landmark")
    col_w = 2.0 * math.pi / width
    n = int(round(heading / col_w))
    # Exact half-integers: column c sees azimuth (W/2 - 0.5 + n - c) * col_w.
    k = (width / 2 - 0.5 + n) - np.arange(width, dtype=float)
    az = k * col_w
    dx, dy = np.cos(az), np.sin(az)
    h_cam = world.cam_height

    hit_t = np.full(width, np.inf)
    hit_height = np.zeros(width)
    hit_shade = np.zeros(width)
    for lm in world.landmarks:
        px, py = lm.x - x, lm.y - y
        b = dx * px + dy * py
        disc = b * b - (px * px + py * py - lm.radius * lm.radius)
        valid = disc >= 0.0
        t = np.where(valid, b - np.sqrt(np.where(valid, disc, 0.0)), np.inf)
        closer = (t > 0.0) & (t < hit_t)
        if not closer.any():
            continue
        # vertical surface stripes, keyed to where the ray meets the cylinder
        surf = np.arctan2(y + t * dy - lm.y, x + t * dx - lm.x)
        phase = 12.9898 * lm.x + 78.233 * lm.y
        shade = lm.albedo * (1.0 + world.stripe_amp
                             * np.sin(world.stripe_count * surf + phase))
        hit_t = np.where(closer, t, hit_t)
        hit_height = np.where(closer, lm.height, hit_height)
        hit_shade = np.where(closer, shade, hit_shade)

    hit = np.isfinite(hit_t)
    safe_t = np.where(hit, hit_t, 1.0)
    top_elev = np.where(hit, np.arctan2(hit_height - h_cam, safe_t), -np.inf)
    bot_elev = np.where(hit, np.arctan2(-h_cam, safe_t), np.inf)
    sky_elev = world.skyline_elevation(az)

    row_elev = (elev_span / 2.0
                - (np.arange(height, dtype=float) + 0.5) * (elev_span / height))
    rows = row_elev[:, None]
    img = np.full((height, width), world.sky_albedo)
    img = np.where(rows <= sky_elev[None, :], world.skyline_albedo, img)

    ground = np.full((height, width), world.ground_albedo)
    if h_cam > 0.0 and world.ground_waves:
        below = row_elev < 0.0
        d_g = h_cam / np.tan(-row_elev[below])
        gx = x + d_g[:, None] * dx[None, :]
        gy = y + d_g[:, None] * dy[None, :]
        # fade texture with distance so far ground does not alias
        fade = 1.0 / (1.0 + d_g / 6.0)
        tex = 1.0 + (world.ground_shade(gx, gy) - 1.0) * fade[:, None]
        ground[below, :] = world.ground_albedo * tex
    img = np.where(rows < 0.0, ground, img)

    lm_rows = (hit[None, :] & (rows <= top_elev[None, :])
               & (rows >= np.minimum(bot_elev, 0.0)[None, :]))
    img = np.where(lm_rows, hit_shade[None, :], img)
    return np.clip(img, 0.0, 1.0)


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 0.17
    delta_max: float = math.radians(30.0)
    v_max: float = 0.8


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    heading: float
    speed: float = 0.0


def step_vehicle(state: VehicleState, steer: float, speed: float,
                 params: VehicleParams, dt: float) -> VehicleState:
    """Kinematic bicycle step; steer/speed clamped before integrating.

    Positive steer turns CCW.  dt must lie in (0, 0.5].
    """
    if not 0.0 < dt <= 0.5:
        raise ValueError("dt must be in (0, 0.5]")
    steer = max(-params.delta_max, min(params.delta_max, steer))
    speed = max(0.0, min(params.v_max, speed))
    x = state.x + speed * math.cos(state.heading) * dt
    y = state.y + speed * math.sin(state.heading) * dt
    heading = wrap_angle(
        state.heading + (speed / params.wheelbase) * math.tan(steer) * dt)
    return VehicleState(x=x, y=y, heading=heading, speed=speed)


# ---------------------------------------------------------------------------
# Learning-walk scripts


@dataclass(frozen=True)
class OrbitWalk:
    """Circle the nest with the nest held on one side.

    direction 'ccw' keeps the nest on the left, 'cw' on the right.  The
    radius ramps linearly from radius_start to radius_end over the walk,
    which covers path_length meters at constant speed.  Decoupled mode:
    views are labeled by the orbit direction without consulting PI.
    """

    direction: str = "ccw"           # 'ccw' | 'cw'
    radius_start: float = 2.0
    radius_end: float = 6.2
    path_length: float = 75.0
    speed: float = 0.8
    use_pi: bool = False

    @property
    def hard_label(self):
        if self.use_pi:
            return None
        return TeachingSignal.LEFT if self.direction == "ccw" else TeachingSignal.RIGHT


@dataclass(frozen=True)
class RandomWalk:
    """Seeded wander within max_radius: alternating random arcs.

    The walk strings together constant-rate arcs a few seconds long whose
    turn direction flips often, the way a teleoperated coverage walk does;
    long single-direction loops would leave the nest on one side for most
    of the walk and starve the other memory bank.
    """

    duration: float = 92.5
    speed: float = 0.8
    max_radius: float = 8.0
    turn_min: float = 0.15       # rad/s, per-arc magnitude range
    turn_max: float = 0.75
    segment_min: float = 2.0     # seconds per arc
    segment_max: float = 5.0
    flip_prob: float = 0.65
    max_turn_rate: float = 1.0   # rad/s, incl. the boundary pull
    seed: int = 0


@dataclass(frozen=True)
class NestRotation:
    """Full in-place 360° scan at the nest."""

    duration: float = 45.0
    direction: str = "ccw"


def script_poses(script, dt: float, nest=(0.0, 0.0),
                 world: World | None = None) -> list[LocalPose]:
    """Sample a walk script into a timestamped pose stream.

    Random walks take `world` so the scripted driver can swerve around
    landmarks, the way a teleoperator would.
    """
    nx, ny = nest
    poses = []
    if isinstance(script, OrbitWalk):
        sign = 1.0 if script.direction == "ccw" else -1.0
        duration = script.path_length / script.speed
        n = int(round(duration / dt))
        phi = 0.0
        for i in range(n + 1):
            t = i * dt
            radius = script.radius_start + (script.radius_end - script.radius_start) * (
                t / duration)
            poses.append(LocalPose(
                x=nx + radius * math.cos(phi),
                y=ny + radius * math.sin(phi),
                heading=wrap_angle(phi + sign * math.pi / 2.0),
                t=t))
            phi += sign * script.speed * dt / radius
    elif isinstance(script, RandomWalk):
        rng = np.random.default_rng(script.seed)
        n = int(round(script.duration / dt))
        x, y = nx + script.max_radius * 0.4, ny
        heading = math.pi / 2.0
        turn = 0.0
        seg_end = 0.0
        sign = 1.0
        for i in range(n + 1):
            t = i * dt
            if t >= seg_end:
                if rng.random() < script.flip_prob:
                    sign = -sign
                turn = sign * rng.uniform(script.turn_min, script.turn_max)
                seg_end = t + rng.uniform(script.segment_min, script.segment_max)
            rate = turn
            r = math.hypot(x - nx, y - ny)
            if r > 0.8 * script.max_radius:
                # steer back toward the nest before the boundary
                to_nest = wrap_angle(math.atan2(ny - y, nx - x) - heading)
                rate = rate + 1.6 * to_nest * (r / script.max_radius)
            avoid = _avoid_landmarks(world, x, y, heading) if world is not None else 0.0
            rate = max(-script.max_turn_rate, min(script.max_turn_rate, rate))
            # collision avoidance may exceed the cruising turn-rate budget
            rate = max(-2.5, min(2.5, rate + avoid))
            poses.append(LocalPose(x=x, y=y, heading=heading, t=t))
            heading = wrap_angle(heading + rate * dt)
            nx_, ny_ = (x + script.speed * math.cos(heading) * dt,
                        y + script.speed * math.sin(heading) * dt)
            if world is not None and world.inside_landmark(nx_, ny_, margin=0.2):
                # brake and keep turning; never script a pose inside an obstacle
                continue
            x, y = nx_, ny_
    elif isinstance(script, NestRotation):
        sign = 1.0 if script.direction == "ccw" else -1.0
        n = int(round(script.duration / dt))
        for i in range(n + 1):
            t = i * dt
            poses.append(LocalPose(
                x=nx, y=ny,
                heading=wrap_angle(sign * 2.0 * math.pi * t / script.duration),
                t=t))
    else:
        raise TypeError(f"unknown walk script {type(script).__name__}")
    return poses


def _avoid_landmarks(world: World, x: float, y: float, heading: float,
                     lookahead: float = 1.6, margin: float = 0.5) -> float:
    """Turn-rate nudge steering the scripted driver around landmarks."""
    rate = 0.0
    hx, hy = math.cos(heading), math.sin(heading)
    for lm in world.landmarks:
        dx, dy = lm.x - x, lm.y - y
        along = dx * hx + dy * hy
        if not 0.0 < along < lookahead + lm.radius:
            continue
        lateral = dx * -hy + dy * hx  # positive = landmark on the left
        if abs(lateral) < lm.radius + margin:
            # turn away, harder the closer and more head-on it is
            rate -= math.copysign(2.5, lateral) * (1.0 - along / (lookahead + lm.radius))
    return rate


# ---------------------------------------------------------------------------
# Learning and homing execution


@dataclass(frozen=True)
class WalkLogRow:
    t: float
    x: float
    y: float
    heading: float
    label: TeachingSignal
    theta_true: float
    r_true: float


@dataclass
class WalkResult:
    bank: MBONBank
    rows: list
    fix_records: list
    path_length: float
    max_radius: float
    truncated: bool = False

    @property
    def views_learned(self) -> int:
        return len(self.rows)

    def label_counts(self) -> dict:
        counts = {s: 0 for s in TeachingSignal}
        for row in self.rows:
            counts[row.label] += 1
        return counts


# Hemisphere A banks learn hemisphere A's code, B banks B's; the nest
# bank rides on hemisphere A.  Left and right events train both hemispheres.
_SIGNAL_ROUTING = {
    TeachingSignal.LEFT: ((MBONId.LEFT_A, "a"), (MBONId.LEFT_B, "b")),
    TeachingSignal.RIGHT: ((MBONId.RIGHT_A, "a"), (MBONId.RIGHT_B, "b")),
    TeachingSignal.NEST: ((MBONId.NEST, "a"),),
}


def run_learning_walk(world: World, script, bank: MBONBank, proj_a, proj_b,
                      k: int, vision_cfg, noise: PINoiseModel | None = None,
                      vision_hz: float = 8.0, r_nest: float = 0.3,
                      render_w: int = 256, render_h: int = 64) -> WalkResult:
    """Drive a scripted walk, learning each view into the signaled bank.

    The teaching signal comes from the noisy PI stream with sample-and-hold
    across its slower rate, except for decoupled orbit walks which carry a
    hard-coded side label.  Aborts (truncated log) if the script leaves the
    arena.
    """
    dt = 1.0 / vision_hz
    poses = script_poses(script, dt, nest=world.nest, world=world)
    hard_label = getattr(script, "hard_label", None)
    if noise is None:
        noise = PINoiseModel()
    fix_records = []
    if hard_label is None:
        fix_records = integrate_fixes(poses, world.nest, noise, r_nest)

    rows = []
    path_length = 0.0
    max_radius = 0.0
    truncated = False
    fix_idx = 0
    signal = hard_label
    prev = None
    for pose in poses:
        if abs(pose.x) > world.arena_half or abs(pose.y) > world.arena_half:
            truncated = True
            break
        if hard_label is None:
            while (fix_idx < len(fix_records)
                   and fix_records[fix_idx].t <= pose.t + 1e-9):
                signal = fix_records[fix_idx].signal
                fix_idx += 1
            if signal is None:
                continue  # no PI fix yet
        view = render_panorama(world, pose.x, pose.y, pose.heading,
                               render_w, render_h)
        pn = optic_lobe.process(view, vision_cfg)
        kc_a = encode(pn, proj_a, k)
        kc_b = encode(pn, proj_b, k)
        for mbon, hemi in _SIGNAL_ROUTING[signal]:
            bank.learn(mbon, kc_a if hemi == "a" else kc_b)
        hv = homing_vector(pose, world.nest)
        rows.append(WalkLogRow(t=pose.t, x=pose.x, y=pose.y,
                               heading=pose.heading, label=signal,
                               theta_true=hv.theta_n, r_true=hv.r))
        if prev is not None:
            path_length += math.hypot(pose.x - prev.x, pose.y - prev.y)
        prev = pose
        max_radius = max(max_radius, math.hypot(pose.x - world.nest[0],
                                                pose.y - world.nest[1]))
    return WalkResult(bank=bank, rows=rows, fix_records=fix_records,
                      path_length=path_length, max_radius=max_radius,
                      truncated=truncated)


@dataclass(frozen=True)
class TrialRow:
    t: float
    x: float
    y: float
    heading: float
    e: float
    steer: float
    f_la: float
    f_ra: float
    f_lb: float
    f_rb: float
    f_nest: float
    speed: float


@dataclass
class TrialRecord:
    start: tuple
    rows: list
    nest: tuple
    arrival_radius: float
    min_dist: float = 0.0
    mean_search_dist: float = 0.0
    stopped: bool = False
    stop_dist: float = 0.0
    duration: float = 0.0
    failed: bool = False
    arrived: bool = False

    def recompute(self):
        """Derive the summary statistics from the trajectory rows."""
        if not self.rows:
            self.failed = True
            return self
        d = np.array([math.hypot(r.x - self.nest[0], r.y - self.nest[1])
                      for r in self.rows])
        self.min_dist = float(d.min())
        self.duration = self.rows[-1].t
        self.stop_dist = float(d[-1])
        inside = np.flatnonzero(d <= self.arrival_radius)
        self.arrived = len(inside) > 0
        # Search statistics cover the segment after first arrival; if the
        # vehicle never enters the arrival radius, fall back to the segment
        # after its closest approach.
        first = int(inside[0]) if self.arrived else int(d.argmin())
        self.mean_search_dist = float(d[first:].mean())
        return self


def run_homing_trial(world: World, bank: MBONBank, proj_a, proj_b, k: int,
                     vision_cfg, controller: SipController,
                     start, max_time: float = 120.0,
                     vehicle: VehicleParams | None = None,
                     vision_hz: float = 8.0, r_nest: float = 0.3,
                     render_w: int = 256, render_h: int = 64,
                     stop_speed: float = 0.02, stop_hold: float = 2.0) -> TrialRecord:
    """Closed-loop homing from `start` = (x, y, heading).

    Runs render -> process -> encode -> familiarity -> control -> step at
    the vision rate until the time limit, a sustained stop (five-MBON
    mode), or failure (arena exit or landmark collision).
    """
    if vehicle is None:
        vehicle = VehicleParams()
    dt = 1.0 / vision_hz
    controller.reset()
    state = VehicleState(x=start[0], y=start[1], heading=start[2])
    record = TrialRecord(start=tuple(start), rows=[], nest=world.nest,
                         arrival_radius=2.0 * r_nest)
    slow_since = None
    t = 0.0
    n_steps = int(round(max_time / dt))
    for _ in range(n_steps):
        if (abs(state.x) > world.arena_half or abs(state.y) > world.arena_half
                or world.inside_landmark(state.x, state.y)):
            record.failed = True
            break
        view = render_panorama(world, state.x, state.y, state.heading,
                               render_w, render_h)
        pn = optic_lobe.process(view, vision_cfg)
        kc_a = encode(pn, proj_a, k)
        kc_b = encode(pn, proj_b, k)
        f = bank.readout(kc_a, kc_b)
        cmd = controller.control_step(f)
        record.rows.append(TrialRow(
            t=t, x=state.x, y=state.y, heading=state.heading,
            e=lateral_error(f), steer=cmd.steer,
            f_la=f.left_a, f_ra=f.right_a, f_lb=f.left_b, f_rb=f.right_b,
            f_nest=f.nest, speed=cmd.speed))
        if controller.mode is ControlMode.FIVE_MBON:
            if cmd.speed < stop_speed:
                slow_since = t if slow_since is None else slow_since
                if t - slow_since >= stop_hold:
                    record.stopped = True
                    break
            else:
                slow_since = None
        state = step_vehicle(state, cmd.steer, cmd.speed, vehicle, dt)
        t += dt
    return record.recompute()
