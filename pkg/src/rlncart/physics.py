"""Cart-pole dynamics, explicit Euler integration and trial termination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple


class InvalidStateError(ValueError):
    """Raised when a state or force is not finite."""


@dataclass(frozen=True)
class PhysicsParams:
    cart_mass: float = 0.711
    pole_mass: float = 0.209
    gravity: float = 9.8
    force: float = 10.0
    pole_length: float = 0.326
    tau: float = 0.02
    x_limit: float = 2.4
    theta_limit_deg: float = 12.0
    # Only explicit Euler is implemented; the field records it in manifests.
    integrator: str = "euler"

    def __post_init__(self) -> None:
        for name in ("cart_mass", "pole_mass", "gravity", "force", "pole_length",
                     "tau", "x_limit", "theta_limit_deg"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.integrator != "euler":
            raise ValueError(f"unsupported integrator {self.integrator!r} (only 'euler')")

    @property
    def theta_limit(self) -> float:
        """Failure angle in radians."""
        return math.radians(self.theta_limit_deg)


class CartPoleState(NamedTuple):
    x: float = 0.0
    x_dot: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self)


class TrialStatus(Enum):
    RUNNING = "running"
    FAILED_ANGLE = "failed_angle"
    FAILED_TRACK = "failed_track"
    REACHED_CAP = "reached_cap"

    @property
    def failed(self) -> bool:
        return self in (TrialStatus.FAILED_ANGLE, TrialStatus.FAILED_TRACK)


DEFAULT_PHYSICS = PhysicsParams()


def derivatives(
    state: CartPoleState, force: float, params: PhysicsParams = DEFAULT_PHYSICS
) -> tuple[float, float]:
    """Return ``(theta_ddot, x_ddot)`` for the given state and applied force.

    The angular acceleration is evaluated first and substituted into the cart
    acceleration.
    """
    if not (state.is_finite() and math.isfinite(force)):
        raise InvalidStateError(f"non-finite input: state={state}, force={force}")
    total = params.cart_mass + params.pole_mass
    ml = params.pole_mass * params.pole_length
    sin_t = math.sin(state.theta)
    cos_t = math.cos(state.theta)
    thd2 = state.theta_dot * state.theta_dot
    theta_ddot = (total * params.gravity * sin_t - cos_t * (force + ml * thd2 * sin_t)) / (
        (4.0 / 3.0) * total * params.pole_length - ml * cos_t * cos_t
    )
    x_ddot = (force + ml * (thd2 * sin_t - theta_ddot * cos_t)) / total
    return theta_ddot, x_ddot


def step(
    state: CartPoleState, force: float, params: PhysicsParams = DEFAULT_PHYSICS
) -> CartPoleState:
    """Advance one time step; positions use the pre-step velocities."""
    theta_ddot, x_ddot = derivatives(state, force, params)
    tau = params.tau
    new = CartPoleState(
        x=state.x + tau * state.x_dot,
        x_dot=state.x_dot + tau * x_ddot,
        theta=state.theta + tau * state.theta_dot,
        theta_dot=state.theta_dot + tau * theta_ddot,
    )
    if not new.is_finite():
        raise InvalidStateError(f"integration produced a non-finite state: {new}")
    return new


def check_termination(
    state: CartPoleState,
    steps_done: int,
    step_cap: int,
    params: PhysicsParams = DEFAULT_PHYSICS,
) -> TrialStatus:
    """Classify a state.  Angle failure beats track failure beats the step cap.

    Limits are strict: a pole exactly at the limit angle is still upright.
    """
    if abs(state.theta) > params.theta_limit:
        return TrialStatus.FAILED_ANGLE
    if abs(state.x) > params.x_limit:
        return TrialStatus.FAILED_TRACK
    if steps_done >= step_cap:
        return TrialStatus.REACHED_CAP
    return TrialStatus.RUNNING


def runaway_steps(params: PhysicsParams = DEFAULT_PHYSICS, max_steps: int = 10_000) -> int:
    """Count steps the cart stays on the track under a constant ``+force`` from rest.

    Only the track limit is checked here, since the pole itself leaves the
    angle range long before the cart reaches the end.
    """
    state = CartPoleState()
    for k in range(max_steps):
        state = step(state, params.force, params)
        if abs(state.x) > params.x_limit:
            return k
    return max_steps


def free_fall_steps(
    theta0_deg: float, params: PhysicsParams = DEFAULT_PHYSICS, max_steps: int = 100_000
) -> int:
    """Count steps an unforced pole released at rest stays within the angle limit."""
    state = CartPoleState(theta=math.radians(theta0_deg))
    for k in range(max_steps):
        state = step(state, 0.0, params)
        if abs(state.theta) > params.theta_limit:
            return k
    return max_steps


def linearized_fall_steps(theta0_deg: float, params: PhysicsParams = DEFAULT_PHYSICS) -> float:
    """Closed-form small-angle fall time, in steps.

    Uses ``theta(t) = theta0 * cosh(lam * t)`` with
    ``lam**2 = (M + m) g / ((4/3)(M + m) l - m l)``.
    """
    total = params.cart_mass + params.pole_mass
    denom = (4.0 / 3.0) * total * params.pole_length - params.pole_mass * params.pole_length
    lam = math.sqrt(total * params.gravity / denom)
    ratio = params.theta_limit_deg / abs(theta0_deg)
    return math.acosh(ratio) / lam / params.tau
