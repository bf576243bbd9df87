"""Premotor stage: familiarity readouts -> steering and throttle commands.

The lateral error is the mean left-minus-right familiarity difference
across the two hemispheres; a PID-family law turns it into a steering
angle.  Negative steer means turn left (CCW) in the command convention;
a world whose kinematics use the opposite sign sets steer_sign=-1.
Throttle follows a smoothed copy of the nest-bank novelty, so a fully
familiar nest view drives the speed to zero.
"""

from dataclasses import dataclass
from enum import Enum
import math

from .mushroom_body import FamiliarityReadout


class ControlMode(Enum):
    FOUR_MBON = "4mbon"   # constant speed; steering only
    FIVE_MBON = "5mbon"   # nest-familiarity throttle


@dataclass(frozen=True)
class DriveCommand:
    steer: float  # radians, clamped to +/- delta_max
    speed: float  # m/s in [0, v_max]


@dataclass
class SteeringState:
    """PID internals; snapshot/restore for deterministic replay."""

    integral: float = 0.0
    prev_error: float = 0.0
    speed_ema: float = 1.0  # smoothed novelty; starts fully novel


def lateral_error(f: FamiliarityReadout) -> float:
    """Signed left/right familiarity gap in [-1, 1]; negative = nest left."""
    return 0.5 * ((f.left_a - f.right_a) + (f.left_b - f.right_b))


class SipController:
    """Sequential controller owning its steering state (single loop)."""

    def __init__(self, kp: float = 3.5, ki: float = 0.1, kd: float = 0.05,
                 integral_clamp: float = 2.0, dt: float = 0.125,
                 delta_max: float = math.radians(30.0), v_max: float = 0.8,
                 ema_alpha: float = 0.2, speed_floor: float = 0.01,
                 steer_sign: float = 1.0,
                 mode: ControlMode = ControlMode.FOUR_MBON):
        if dt <= 0:
            raise ValueError("dt must be > 0")
        self.kp, self.ki, self.kd = kp, ki, kd
        self.integral_clamp = integral_clamp
        self.dt = dt
        self.delta_max = delta_max
        self.v_max = v_max
        self.ema_alpha = ema_alpha
        # Commanded speeds below this snap to 0: the EMA alone only decays
        # asymptotically, but a stopped vehicle must command exactly 0.
        self.speed_floor = speed_floor
        self.steer_sign = steer_sign
        self.mode = mode
        self.state = SteeringState()

    def reset(self):
        self.state = SteeringState()

    def steering(self, e: float) -> float:
        """PID on the lateral error; output clamped to +/- delta_max."""
        s = self.state
        s.integral = _clamp(s.integral + e * self.dt,
                            -self.integral_clamp, self.integral_clamp)
        u = (self.kp * e + self.ki * s.integral
             + self.kd * (e - s.prev_error) / self.dt)
        s.prev_error = e
        return self.steer_sign * _clamp(u, -self.delta_max, self.delta_max)

    def throttle(self, f_nest: float) -> float:
        """Speed from smoothed nest novelty: novel -> v_max, familiar -> 0."""
        s = self.state
        s.speed_ema += self.ema_alpha * (f_nest - s.speed_ema)
        speed = self.v_max * s.speed_ema
        return speed if speed >= self.speed_floor else 0.0

    def control_step(self, f: FamiliarityReadout) -> DriveCommand:
        steer = self.steering(lateral_error(f))
        if self.mode is ControlMode.FIVE_MBON:
            speed = self.throttle(f.nest)
        else:
            speed = self.v_max
        return DriveCommand(steer=steer, speed=speed)


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x
