"""Seeded trial/episode driver, weight initialization and seed sweeps."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .encoding import (
    ANGLE_SCHEME,
    VELOCITY_SCHEME,
    InputVector,
    IntervalScheme,
    StateMode,
    build_input,
    input_length,
)
from .network import Inference, Network
from .physics import (
    DEFAULT_PHYSICS,
    CartPoleState,
    PhysicsParams,
    TrialStatus,
    check_termination,
    step,
)
from .plasticity import (
    PlasticityParams,
    RewardSignal,
    SuccessCounter,
    apply_negative_reward,
    apply_positive_reward,
    decay_counters,
    reset_trial_state,
    tag_eligibility,
    tick_success,
)
from .presets import optimal_table

MASK64 = (1 << 64) - 1


def prng_next(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """Portable 64-bit generator; uniforms are 53-bit fractions in ``[0, 1)``."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state, out = prng_next(self.state)
        return out

    def next_bits53(self) -> int:
        return self.next_u64() >> 11

    def uniform(self) -> float:
        return self.next_bits53() / (1 << 53)

    def uniform_exact(self) -> Fraction:
        return Fraction(self.next_bits53(), 1 << 53)

    def below(self, n: int) -> int:
        """Integer in ``[0, n)``, computed as ``floor(u * n)`` in exact arithmetic."""
        return (self.next_bits53() * n) >> 53


@dataclass(frozen=True)
class ExperimentConfig:
    mode: StateMode = StateMode.ONE_SV
    trials: int = 512
    step_cap: int = 10_000
    angle_range_deg: Fraction = Fraction(3, 2)
    n_angles: int = 32
    w_base: Fraction = Fraction(9, 2)
    w_range: Fraction = Fraction(1, 128)
    w_max: Fraction = Fraction(8)
    segments: int | None = None
    seed: int = 0
    seeds: int = 32
    learning: bool = True
    angle_scheme: IntervalScheme = ANGLE_SCHEME
    velocity_scheme: IntervalScheme = VELOCITY_SCHEME
    physics: PhysicsParams = DEFAULT_PHYSICS
    plasticity: PlasticityParams = field(default_factory=PlasticityParams)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", StateMode.parse(self.mode))
        for name in ("trials", "step_cap", "n_angles", "seeds"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.segments is not None and self.segments < 1:
            raise ValueError(f"segments must be positive, got {self.segments}")
        for name in ("angle_range_deg", "w_base", "w_range", "w_max"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.w_max <= 0:
            raise ValueError("w_max must be positive")
        if self.w_base < 0 or self.w_range < 0 or self.angle_range_deg < 0:
            raise ValueError("w_base, w_range and angle_range_deg must be non-negative")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def n_segments(self) -> int:
        if self.segments is not None:
            return self.segments
        return 3 if self.mode is StateMode.ONE_SV else 8

    @property
    def n_inputs(self) -> int:
        return input_length(self.mode, self.angle_scheme, self.velocity_scheme)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    initial_angle_deg: float
    steps: int
    outcome: TrialStatus
    pos_rewards: int = 0
    neg_rewards: int = 0


@dataclass(frozen=True)
class EpisodeResult:
    seed: int
    trials: tuple[TrialResult, ...]
    network: Network | None = field(default=None, compare=False, repr=False)

    @property
    def average_steps(self) -> float:
        return sum(t.steps for t in self.trials) / len(self.trials)


@dataclass(frozen=True)
class StepEvent:
    """What happened during one simulation step, for tracing and auditing."""

    trial: int
    step: int
    d: InputVector
    inference: Inference
    state: CartPoleState
    reward: RewardSignal
    status: TrialStatus


StepHook = Callable[[StepEvent, Network], None]


def build_network(config: ExperimentConfig) -> Network:
    return Network(
        config.n_inputs,
        config.n_segments,
        w_max=config.w_max,
        plasticity=config.plasticity,
        learning=config.learning,
    )


def init_weights(network: Network, prng: SplitMix64, config: ExperimentConfig) -> None:
    """Set every weight to ``w_base + u * w_range``, ``u`` uniform in ``[0, 1)``."""
    for n, s, i in network.iter_synapses():
        network.set_weight(n, s, i, config.w_base + prng.uniform_exact() * config.w_range)


def angle_grid(config: ExperimentConfig) -> list[float]:
    """``n_angles`` equally spaced angles spanning ``[-range, +range]`` inclusive."""
    r, n = config.angle_range_deg, config.n_angles
    if n == 1:
        return [0.0]
    return [float(-r + 2 * r * k / (n - 1)) for k in range(n)]


def initial_angle_sequence(prng: SplitMix64, config: ExperimentConfig, n_trials: int) -> list[float]:
    """Concatenated independent Fisher-Yates shuffles of the angle grid."""
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    base = angle_grid(config)
    out: list[float] = []
    while len(out) < n_trials:
        perm = list(base)
        for i in range(len(perm) - 1, 0, -1):
            j = prng.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        out.extend(perm)
    return out[:n_trials]


def run_trial(
    network: Network,
    initial_angle_deg: float,
    config: ExperimentConfig,
    trial: int = 0,
    on_step: StepHook | None = None,
) -> TrialResult:
    """Balance from ``x = 0`` at the given angle until failure or the step cap.

    Per step: encode, infer, tag the winner, apply the force, check for
    termination, deliver the negative or positive reward, decay counters.
    With ``network.learning`` off the rewards are counted but not applied.
    """
    physics, plasticity = config.physics, config.plasticity
    learning = network.learning
    counter = SuccessCounter()
    reset_trial_state(network, counter)
    state = CartPoleState(theta=math.radians(initial_angle_deg))
    k = steps = pos = neg = 0
    while True:
        k += 1
        d = build_input(state, config.mode, config.angle_scheme, config.velocity_scheme)
        inference = network.infer(d)
        if learning:
            tag_eligibility(network, d, inference.winner)
        state = step(state, inference.action.force(physics.force), physics)
        status = check_termination(state, steps + 1, config.step_cap, physics)
        reward = RewardSignal.NONE
        if status.failed:
            neg += 1
            reward = RewardSignal.NEGATIVE
            if learning:
                apply_negative_reward(network, plasticity)
        else:
            steps += 1
            if tick_success(counter, plasticity):
                pos += 1
                reward = RewardSignal.POSITIVE
                if learning:
                    apply_positive_reward(network, plasticity)
        if learning:
            decay_counters(network)
        if on_step is not None:
            on_step(StepEvent(trial, k, d, inference, state, reward, status), network)
        if status is not TrialStatus.RUNNING:
            return TrialResult(trial, initial_angle_deg, steps, status, pos, neg)


def run_episode(
    seed: int,
    config: ExperimentConfig,
    on_step: StepHook | None = None,
    on_trial: Callable[[TrialResult, Network], None] | None = None,
) -> EpisodeResult:
    """Fresh network, seeded weights and angle schedule, ``config.trials`` trials.

    The generator is consumed for the weights first, then for the schedule.
    """
    prng = SplitMix64(seed)
    network = build_network(config)
    init_weights(network, prng, config)
    angles = initial_angle_sequence(prng, config, config.trials)
    results = []
    for k, angle in enumerate(angles):
        result = run_trial(network, angle, config, trial=k, on_step=on_step)
        results.append(result)
        if on_trial is not None:
            on_trial(result, network)
    return EpisodeResult(seed, tuple(results), network)


def _episode_worker(args: tuple[int, ExperimentConfig]) -> EpisodeResult:
    seed, config = args
    result = run_episode(seed, config)
    return EpisodeResult(result.seed, result.trials)


def sweep_seeds(config: ExperimentConfig) -> list[int]:
    return [(config.seed + k) & MASK64 for k in range(config.seeds)]


def run_seed_sweep(config: ExperimentConfig, jobs: int = 1) -> list[EpisodeResult]:
    """Run one episode per seed and return them sorted by average, best first.

    Episodes are independent, so ``jobs > 1`` farms them out to worker
    processes; results are gathered in seed order before sorting, and the
    sort is stable, so the output does not depend on ``jobs``.
    """
    tasks = [(seed, config) for seed in sweep_seeds(config)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            episodes = list(pool.map(_episode_worker, tasks))
    else:
        episodes = [_episode_worker(t) for t in tasks]
    return sorted(episodes, key=lambda e: e.average_steps, reverse=True)


def load_optimal_weights(mode: StateMode | str, w_max: Fraction | int = 8,
                         plasticity: PlasticityParams | None = None) -> Network:
    """Network preloaded with the hand-set optimal weights, learning disabled."""
    mode = StateMode.parse(mode)
    return Network.from_weights(optimal_table(mode, w_max), w_max=w_max,
                                plasticity=plasticity, learning=False)


def run_baseline(config: ExperimentConfig, on_step: StepHook | None = None) -> EpisodeResult:
    """One trial per grid angle, in grid order, with the optimal weights."""
    network = load_optimal_weights(config.mode, config.w_max, config.plasticity)
    results = tuple(
        run_trial(network, angle, config, trial=k, on_step=on_step)
        for k, angle in enumerate(angle_grid(config))
    )
    return EpisodeResult(config.seed, results, network)


def median_average(episodes: list[EpisodeResult]) -> float:
    return statistics.median(e.average_steps for e in episodes)
