"""Three-factor synaptic updates: eligibility tagging, counter decay and rewards.

Decay counters are stored lazily.  Tagging records the network clock in the
synapse, :func:`decay_counters` advances the clock by one, and a counter's
value is ``max(0, window - (clock - tag))``.  That is the same countdown a
per-synapse down-counter would hold, at O(1) cost per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .encoding import InputVector
    from .network import Network


class PlasticityError(ValueError):
    """Raised when an update is requested for a winner the network never chose."""


class RewardSignal(Enum):
    POSITIVE = (1, 0)
    NEGATIVE = (0, 1)
    NONE = (0, 0)

    @property
    def code(self) -> tuple[int, int]:
        return self.value

    @property
    def label(self) -> str:
        return {RewardSignal.POSITIVE: "+1", RewardSignal.NEGATIVE: "-1"}.get(self, "0")


class TagRule(Enum):
    """Which synapses of the winning segment have their success counter set."""

    SEGMENT = "segment"  # every synapse of the winning segment
    INPUT = "input"  # only synapses whose input line spiked


@dataclass(frozen=True)
class PlasticityParams:
    sigma: int = 256
    omega: int = 256
    rho_plus: Fraction = Fraction(1, 128)
    rho_minus: Fraction = Fraction(7, 1024)
    pi: Fraction = Fraction(8, 1024)
    tag_rule: TagRule = TagRule.SEGMENT

    def __post_init__(self) -> None:
        for name in ("sigma", "omega"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for name in ("rho_plus", "rho_minus", "pi"):
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "tag_rule", TagRule(self.tag_rule))

    def punishment(self, c_neg: int) -> Fraction:
        """Weight decrement for a negative reward seen with counter value ``c_neg``."""
        return self.pi * c_neg / self.omega

    def capture(self, c_pos: int) -> Fraction:
        return self.rho_plus * c_pos / self.sigma

    def backoff(self, c_pos: int) -> Fraction:
        return self.rho_minus * c_pos / self.sigma


class SuccessCounter:
    """Counts successful steps and fires a positive reward every ``sigma`` of them."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def reset(self) -> None:
        self.count = 0

    def __repr__(self) -> str:
        return f"SuccessCounter(count={self.count})"


def tick_success(counter: SuccessCounter, params: PlasticityParams) -> bool:
    counter.count += 1
    if counter.count >= params.sigma:
        counter.count = 0
        return True
    return False


def tag_eligibility(network: Network, d: InputVector, winner: tuple[int, int]) -> None:
    """Mark the winning segment's synapses as eligible for the coming rewards.

    Every synapse gets its e-flag from its input line, and synapses on active
    lines get their punishment counter reset to ``omega``.  Success counters
    are set to ``sigma`` according to ``tag_rule``.
    """
    neuron, seg_index = winner
    rln = network.neurons[neuron]
    if rln.last_winning_segment != seg_index:
        raise PlasticityError(
            f"winner {winner} does not match last inference "
            f"(neuron {neuron} last won with segment {rln.last_winning_segment})"
        )
    segment = rln.segments[seg_index]
    if len(d) != len(segment.weights):
        raise PlasticityError(f"input length {len(d)} != synapse count {len(segment.weights)}")
    clock = network.clock
    by_segment = network.plasticity.tag_rule is TagRule.SEGMENT
    for i, bit in enumerate(d):
        segment.e_flags[i] = bit
        if bit:
            segment.neg_tags[i] = clock
            segment.pos_tags[i] = clock
        elif by_segment:
            segment.pos_tags[i] = clock


def decay_counters(network: Network) -> None:
    network.clock += 1


def counter_value(tag: int | None, clock: int, window: int) -> int:
    if tag is None:
        return 0
    return max(0, window - (clock - tag))


def apply_negative_reward(network: Network, params: PlasticityParams | None = None) -> None:
    params = params or network.plasticity
    clock = network.clock
    for n, rln in enumerate(network.neurons):
        for s, segment in enumerate(rln.segments):
            for i, tag in enumerate(segment.neg_tags):
                c = counter_value(tag, clock, params.omega)
                if c:
                    network.adjust_weight(n, s, i, -params.punishment(c))


def apply_positive_reward(network: Network, params: PlasticityParams | None = None) -> None:
    params = params or network.plasticity
    clock = network.clock
    for n, rln in enumerate(network.neurons):
        for s, segment in enumerate(rln.segments):
            for i, tag in enumerate(segment.pos_tags):
                c = counter_value(tag, clock, params.sigma)
                if not c:
                    continue
                if segment.e_flags[i]:
                    network.adjust_weight(n, s, i, params.capture(c))
                else:
                    network.adjust_weight(n, s, i, -params.backoff(c))


def reset_trial_state(network: Network, counter: SuccessCounter) -> None:
    """Clear every counter and e-flag; weights carry over to the next trial."""
    for rln in network.neurons:
        for segment in rln.segments:
            n = len(segment.weights)
            segment.neg_tags[:] = [None] * n
            segment.pos_tags[:] = [None] * n
            segment.e_flags[:] = [0] * n
    network.clock = 0
    counter.reset()
