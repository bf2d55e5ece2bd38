"""Interval encoding of state variables into concatenated 1-hot input vectors."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum

from .physics import CartPoleState

InputVector = tuple[int, ...]


class EncodingError(ValueError):
    """Raised for values that fall outside a scheme's range."""


class StateMode(Enum):
    ONE_SV = "1SV"
    TWO_SV = "2SV"

    @classmethod
    def parse(cls, value: str | int | StateMode) -> StateMode:
        if isinstance(value, StateMode):
            return value
        text = str(value).strip().upper()
        if text in ("1", "1SV"):
            return cls.ONE_SV
        if text in ("2", "2SV"):
            return cls.TWO_SV
        raise ValueError(f"unknown state mode {value!r}; expected 1SV or 2SV")

    @property
    def n_variables(self) -> int:
        return 1 if self is StateMode.ONE_SV else 2


@dataclass(frozen=True)
class IntervalScheme:
    """Edges of contiguous intervals; ``edges[0]`` and ``edges[-1]`` may be infinite.

    A value belongs to interval ``i`` when ``edges[i] <= value < edges[i + 1]``.
    The two outer edges are inclusive, so a finite scheme covers its closed range.
    """

    name: str
    edges: tuple[float, ...]
    units: str = ""

    def __post_init__(self) -> None:
        if len(self.edges) < 2:
            raise ValueError(f"{self.name}: need at least two edges")
        if any(math.isnan(e) for e in self.edges):
            raise ValueError(f"{self.name}: NaN edge")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError(f"{self.name}: edges must be strictly increasing")

    @property
    def n_intervals(self) -> int:
        return len(self.edges) - 1

    def index(self, value: float) -> int:
        if not math.isfinite(value):
            raise EncodingError(f"{self.name}: non-finite value {value!r}")
        if value < self.edges[0] or value > self.edges[-1]:
            raise EncodingError(
                f"{self.name}: {value!r} outside [{self.edges[0]}, {self.edges[-1]}] {self.units}"
            )
        return bisect_right(self.edges, value, 1, len(self.edges) - 1) - 1

    def encode(self, value: float) -> InputVector:
        bits = [0] * self.n_intervals
        bits[self.index(value)] = 1
        return tuple(bits)


ANGLE_SCHEME = IntervalScheme("theta", (-12.0, -6.0, -1.0, 0.0, 1.0, 6.0, 12.0), "deg")
# Velocity thresholds are in m/s.
VELOCITY_SCHEME = IntervalScheme("x_dot", (-math.inf, -5.0, 5.0, math.inf), "m/s")


def encode_angle(theta_deg: float, scheme: IntervalScheme = ANGLE_SCHEME) -> InputVector:
    return scheme.encode(theta_deg)


def encode_velocity(x_dot: float, scheme: IntervalScheme = VELOCITY_SCHEME) -> InputVector:
    return scheme.encode(x_dot)


def input_length(
    mode: StateMode,
    angle_scheme: IntervalScheme = ANGLE_SCHEME,
    velocity_scheme: IntervalScheme = VELOCITY_SCHEME,
) -> int:
    n = angle_scheme.n_intervals
    if mode is StateMode.TWO_SV:
        n += velocity_scheme.n_intervals
    return n


def build_input(
    state: CartPoleState,
    mode: StateMode,
    angle_scheme: IntervalScheme = ANGLE_SCHEME,
    velocity_scheme: IntervalScheme = VELOCITY_SCHEME,
) -> InputVector:
    """Encode the angle (and, in 2SV mode, the cart velocity) as one vector."""
    theta_deg = math.degrees(state.theta)
    lo, hi = angle_scheme.edges[0], angle_scheme.edges[-1]
    # Termination compares radians; keep the degree round trip from leaving the range.
    if math.radians(lo) <= state.theta <= math.radians(hi):
        theta_deg = min(max(theta_deg, lo), hi)
    bits = encode_angle(theta_deg, angle_scheme)
    if mode is StateMode.TWO_SV:
        bits += encode_velocity(state.x_dot, velocity_scheme)
    return bits


def active_lines(d: InputVector) -> tuple[int, ...]:
    return tuple(i for i, bit in enumerate(d) if bit)
