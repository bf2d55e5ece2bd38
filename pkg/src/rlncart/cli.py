"""Command-line entry point: ``rlncart {optimal,learn,physics-check,trace,plot}``."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import ConfigError, parse_config
from .experiment import (
    ExperimentConfig,
    angle_grid,
    median_average,
    run_baseline,
    run_episode,
    run_seed_sweep,
)
from .physics import (
    CartPoleState,
    PhysicsParams,
    free_fall_steps,
    linearized_fall_steps,
    runaway_steps,
    step,
)
from .results_io import (
    OutputError,
    TrajectoryRecorder,
    write_manifest,
    write_plot_script,
    write_summary_csv,
    write_trajectory_csv,
    write_trials_csv,
    write_weights_csv,
)

RUNAWAY_RANGE = (32, 34)
FREE_FALL_TOLERANCE = 0.10


def physics_checks(physics: PhysicsParams, grid: Sequence[float]) -> list[tuple[str, bool, str]]:
    """Oracle checks on the integrator: ``(name, passed, detail)`` per check."""
    checks = []

    state = CartPoleState()
    for _ in range(10_000):
        state = step(state, 0.0, physics)
    checks.append(("fixed point", state == CartPoleState(), f"state after 10000 steps {tuple(state)}"))

    n = runaway_steps(physics)
    lo, hi = RUNAWAY_RANGE
    checks.append(("constant-force runaway", lo <= n <= hi,
                   f"{n} steps on track (expected {lo}-{hi})"))

    theta0 = min((a for a in grid if a != 0), key=abs)
    theta0 = abs(theta0)
    state = CartPoleState(theta=math.radians(theta0))
    monotone = True
    prev = state.theta
    while abs(state.theta) <= physics.theta_limit:
        state = step(state, 0.0, physics)
        if state.theta < prev:
            monotone = False
        prev = state.theta
    simulated = free_fall_steps(theta0, physics)
    predicted = linearized_fall_steps(theta0, physics)
    rel = abs(simulated - predicted) / predicted
    checks.append(("free fall monotone", monotone, f"theta0 = {theta0:.6g} deg"))
    checks.append(("free fall vs linearization", rel <= FREE_FALL_TOLERANCE,
                   f"{simulated} steps simulated, {predicted:.1f} predicted ({rel:.1%})"))
    return checks


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    out = {}
    for flag, key in (("sv", "mode"), ("seed", "seed"), ("seeds", "seeds"),
                      ("trials", "trials"), ("step_cap", "step_cap"), ("segments", "segments")):
        value = getattr(args, flag, None)
        if value is not None:
            out[key] = str(value)
    for item in getattr(args, "set", None) or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}", "<command line>")
        out[key.strip()] = value.strip()
    return out


def _command_line(argv: Sequence[str]) -> str:
    return "rlncart " + " ".join(argv)


def cmd_optimal(args: argparse.Namespace, config: ExperimentConfig, argv: Sequence[str]) -> int:
    out = Path(args.out)
    result = run_baseline(config)
    paths = [
        write_trials_csv(out / "trials.csv", [result]),
        write_summary_csv(out / "summary.csv", [result]),
        write_weights_csv(out / "weights.csv", result.network),
    ]
    write_manifest(out / "manifest.txt", config, _command_line(argv), paths)
    capped = sum(t.outcome.name == "REACHED_CAP" for t in result.trials)
    print(f"optimal {config.mode.value}: average {result.average_steps:.2f} steps over "
          f"{len(result.trials)} angles, {capped} reached the {config.step_cap}-step cap")
    return 0


def cmd_learn(args: argparse.Namespace, config: ExperimentConfig, argv: Sequence[str]) -> int:
    out = Path(args.out)
    episodes = run_seed_sweep(config, jobs=args.jobs)
    by_seed = sorted(episodes, key=lambda e: e.seed)
    paths = [
        write_trials_csv(out / "trials.csv", by_seed),
        write_summary_csv(out / "summary.csv", episodes),
    ]
    write_manifest(out / "manifest.txt", config, _command_line(argv), paths)
    avgs = [e.average_steps for e in episodes]
    print(f"learn {config.mode.value}: {len(episodes)} episodes x {config.trials} trials; "
          f"average steps max {max(avgs):.2f}, median {median_average(episodes):.2f}, "
          f"min {min(avgs):.2f}")
    return 0


def cmd_physics_check(args: argparse.Namespace, config: ExperimentConfig, argv: Sequence[str]) -> int:
    ok = True
    for name, passed, detail in physics_checks(config.physics, angle_grid(config)):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return 0 if ok else 1


def cmd_trace(args: argparse.Namespace, config: ExperimentConfig, argv: Sequence[str]) -> int:
    out = Path(args.out)
    recorder = TrajectoryRecorder(args.trial)
    if args.optimal:
        if args.trial >= config.n_angles:
            raise ConfigError(f"--trial must be below n_angles ({config.n_angles})", "<command line>")
        result = run_baseline(config, on_step=recorder)
    else:
        if args.trial >= config.trials:
            raise ConfigError(f"--trial must be below trials ({config.trials})", "<command line>")
        # Trials after the traced one cannot affect it.
        trimmed = dataclasses.replace(config, trials=args.trial + 1)
        result = run_episode(config.seed, trimmed, on_step=recorder)
    trial = result.trials[args.trial]
    paths = [write_trajectory_csv(out / "trajectory.csv", recorder.rows)]
    write_manifest(out / "manifest.txt", config, _command_line(argv), paths)
    print(f"trial {trial.trial}: initial angle {trial.initial_angle_deg:.4f} deg, "
          f"{trial.steps} steps, {trial.outcome.value}")
    return 0


def cmd_plot(args: argparse.Namespace, config: ExperimentConfig | None, argv: Sequence[str]) -> int:
    path = write_plot_script(args.csv, args.output)
    print(f"wrote {path} (run: gnuplot {path.name})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file")
    common.add_argument("--out", default="results", help="output directory (default: results)")
    common.add_argument("--seed", type=int, help="base seed")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any config key (repeatable)")

    sv = argparse.ArgumentParser(add_help=False)
    sv.add_argument("--sv", choices=("1", "2"), default=None, help="state variables (default: 1)")
    sv.add_argument("--step-cap", type=int, dest="step_cap")
    sv.add_argument("--segments", type=int, help="segments per neuron")

    parser = argparse.ArgumentParser(prog="rlncart", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rlncart {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimal", parents=[common, sv], help="baseline run with the hand-set weights")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("learn", parents=[common, sv], help="seed sweep with learning enabled")
    p.add_argument("--seeds", type=int, help="number of episodes")
    p.add_argument("--trials", type=int, help="trials per episode")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("physics-check", parents=[common], help="integrator oracle checks")
    p.set_defaults(func=cmd_physics_check)

    p = sub.add_parser("trace", parents=[common, sv], help="log one trial's trajectory")
    p.add_argument("--trial", type=int, required=True, help="0-based trial index")
    p.add_argument("--trials", type=int, help="trials per episode")
    p.add_argument("--optimal", action="store_true", help="trace the hand-set weights instead")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot", help="write a gnuplot script for a result CSV")
    p.add_argument("csv", type=Path)
    p.add_argument("-o", "--output", type=Path, help="script path (default: <csv>.gp)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = None
        if args.command != "plot":
            config = parse_config(args.config, _overrides(args))
        return args.func(args, config, argv)
    except (ConfigError, OutputError, ValueError) as exc:
        print(f"rlncart: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
