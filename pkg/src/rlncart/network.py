"""Two-neuron RLN network: segment responses and the two winner-take-all levels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from .encoding import InputVector, active_lines
from .plasticity import PlasticityParams, counter_value


class StructureError(ValueError):
    """Raised when input vectors and synapse arrays disagree in shape."""


class Action(Enum):
    MINUS = -1
    PLUS = 1

    @property
    def label(self) -> str:
        return "-F" if self is Action.MINUS else "+F"

    @property
    def neuron(self) -> int:
        return 0 if self is Action.MINUS else 1

    def force(self, magnitude: float) -> float:
        return self.value * magnitude


NEURON_ACTIONS = (Action.MINUS, Action.PLUS)


def effective_weight(w: Fraction | int | float) -> int:
    """Inference weight: the ceiling of the stored fractional weight."""
    return math.ceil(w)


@dataclass(frozen=True)
class Synapse:
    weight: Fraction
    c_neg: int
    c_pos: int
    e_flag: int


class Segment:
    """Synapse state for one dendritic segment, one entry per input line.

    ``neg_tags``/``pos_tags`` hold the clock value at the last tag (or None);
    the network turns them into counter values.
    """

    __slots__ = ("weights", "ceil_weights", "neg_tags", "pos_tags", "e_flags")

    def __init__(self, weights: Sequence[Fraction | int]) -> None:
        self.weights = [Fraction(w) for w in weights]
        self.ceil_weights = [effective_weight(w) for w in self.weights]
        n = len(self.weights)
        self.neg_tags: list[int | None] = [None] * n
        self.pos_tags: list[int | None] = [None] * n
        self.e_flags = [0] * n

    def __len__(self) -> int:
        return len(self.weights)


def segment_response(segment: Segment, d: InputVector) -> int:
    if len(d) != len(segment):
        raise StructureError(f"input length {len(d)} != synapse count {len(segment)}")
    ceil = segment.ceil_weights
    return sum(ceil[i] for i, bit in enumerate(d) if bit)


class Rln:
    """A reinforcement-learning neuron: one dendrite of parallel segments."""

    def __init__(self, action: Action, segments: list[Segment]) -> None:
        if not segments:
            raise StructureError("an RLN needs at least one segment")
        self.action = action
        self.segments = segments
        self.last_winning_segment: int | None = None


def _argmax(responses: Sequence[int]) -> int:
    best = 0
    for j in range(1, len(responses)):
        if responses[j] > responses[best]:
            best = j
    return best


def dendrite_infer(rln: Rln, d: InputVector) -> tuple[int, int]:
    """Return ``(winning_segment, response)``; ties go to the lowest index."""
    responses = [segment_response(seg, d) for seg in rln.segments]
    j = _argmax(responses)
    rln.last_winning_segment = j
    return j, responses[j]


def select_action(a_minus: int, a_plus: int) -> Action:
    """Network-level WTA; a tie selects ``-F``."""
    return Action.PLUS if a_plus > a_minus else Action.MINUS


@dataclass(frozen=True)
class Inference:
    action: Action
    segment: int
    responses: tuple[int, int]
    segments: tuple[int, int]

    @property
    def winner(self) -> tuple[int, int]:
        """Neuron and segment that receive the proximal (P) feedback."""
        return self.action.neuron, self.segment


class Network:
    """The ``-F`` and ``+F`` neurons plus the shared hyperparameters.

    All weight writes go through :meth:`set_weight`/:meth:`adjust_weight`,
    which saturate at ``[0, w_max]`` and invalidate the cached policy.
    """

    def __init__(
        self,
        n_inputs: int,
        n_segments: int,
        w_max: Fraction | int = 8,
        plasticity: PlasticityParams | None = None,
        initial_weight: Fraction | int = 0,
        learning: bool = True,
    ) -> None:
        if n_inputs < 1 or n_segments < 1:
            raise StructureError("need at least one input line and one segment")
        self.w_max = Fraction(w_max)
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")
        self.plasticity = plasticity or PlasticityParams()
        self.learning = learning
        self.n_inputs = n_inputs
        w0 = self._clamp(Fraction(initial_weight))
        self.neurons = tuple(
            Rln(action, [Segment([w0] * n_inputs) for _ in range(n_segments)])
            for action in NEURON_ACTIONS
        )
        self.clock = 0
        self._policy: dict[InputVector, tuple[tuple[int, int], tuple[int, int]]] = {}

    @classmethod
    def from_weights(
        cls,
        weights: Sequence[Sequence[Sequence[Fraction | int]]],
        w_max: Fraction | int = 8,
        plasticity: PlasticityParams | None = None,
        learning: bool = True,
    ) -> Network:
        """Build from a nested ``[neuron][segment][synapse]`` weight table."""
        if len(weights) != 2:
            raise StructureError("expected weights for exactly two neurons")
        q, d = len(weights[0]), len(weights[0][0])
        net = cls(d, q, w_max=w_max, plasticity=plasticity, learning=learning)
        for n, neuron in enumerate(weights):
            if len(neuron) != q or any(len(row) != d for row in neuron):
                raise StructureError("both neurons must have identical shape")
            for s, row in enumerate(neuron):
                for i, w in enumerate(row):
                    net.set_weight(n, s, i, w)
        return net

    @property
    def n_segments(self) -> int:
        return len(self.neurons[0].segments)

    def _clamp(self, w: Fraction) -> Fraction:
        if w < 0:
            return Fraction(0)
        if w > self.w_max:
            return self.w_max
        return w

    def set_weight(self, neuron: int, segment: int, synapse: int, w: Fraction | int) -> None:
        seg = self.neurons[neuron].segments[segment]
        w = self._clamp(Fraction(w))
        seg.weights[synapse] = w
        seg.ceil_weights[synapse] = effective_weight(w)
        self._policy.clear()

    def adjust_weight(self, neuron: int, segment: int, synapse: int, delta: Fraction) -> None:
        seg = self.neurons[neuron].segments[segment]
        self.set_weight(neuron, segment, synapse, seg.weights[synapse] + delta)

    def weight(self, neuron: int, segment: int, synapse: int) -> Fraction:
        return self.neurons[neuron].segments[segment].weights[synapse]

    def weight_table(self) -> list[list[list[Fraction]]]:
        return [[list(seg.weights) for seg in rln.segments] for rln in self.neurons]

    def iter_synapses(self) -> Iterator[tuple[int, int, int]]:
        """Canonical order: neuron-major, then segment, then synapse index."""
        for n, rln in enumerate(self.neurons):
            for s, seg in enumerate(rln.segments):
                for i in range(len(seg)):
                    yield n, s, i

    def c_neg(self, neuron: int, segment: int, synapse: int) -> int:
        tag = self.neurons[neuron].segments[segment].neg_tags[synapse]
        return counter_value(tag, self.clock, self.plasticity.omega)

    def c_pos(self, neuron: int, segment: int, synapse: int) -> int:
        tag = self.neurons[neuron].segments[segment].pos_tags[synapse]
        return counter_value(tag, self.clock, self.plasticity.sigma)

    def synapse(self, neuron: int, segment: int, synapse: int) -> Synapse:
        seg = self.neurons[neuron].segments[segment]
        return Synapse(
            weight=seg.weights[synapse],
            c_neg=self.c_neg(neuron, segment, synapse),
            c_pos=self.c_pos(neuron, segment, synapse),
            e_flag=seg.e_flags[synapse],
        )

    def infer(self, d: InputVector) -> Inference:
        """Run both dendrites and the network WTA for input ``d``.

        Results are cached per input pattern until the next weight change;
        each neuron's ``last_winning_segment`` is updated either way.
        """
        cached = self._policy.get(d)
        if cached is None:
            if len(d) != self.n_inputs:
                raise StructureError(f"input length {len(d)} != {self.n_inputs}")
            lines = active_lines(d)
            segs = []
            resp = []
            for rln in self.neurons:
                responses = [sum(seg.ceil_weights[i] for i in lines) for seg in rln.segments]
                j = _argmax(responses)
                segs.append(j)
                resp.append(responses[j])
            cached = (segs[0], segs[1]), (resp[0], resp[1])
            self._policy[d] = cached
        segs, resp = cached
        self.neurons[0].last_winning_segment = segs[0]
        self.neurons[1].last_winning_segment = segs[1]
        action = select_action(resp[0], resp[1])
        return Inference(action, segs[action.neuron], resp, segs)
