"""CSV result files, weight snapshots, run manifests and plot scripts.

All numbers are written with ``repr``/exact decimals, never through the
locale, so files are byte-identical across runs and platforms.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .config import config_digest, exact_decimal, format_config
from .experiment import EpisodeResult, ExperimentConfig, StepEvent
from .network import NEURON_ACTIONS, Network
from .plasticity import PlasticityParams

TRIALS_HEADER = ("seed", "trial", "initial_angle_deg", "steps", "outcome", "pos_rewards", "neg_rewards")
TRAJECTORY_HEADER = ("step", "theta_deg", "x_m", "x_dot", "action", "reward")
WEIGHTS_HEADER = ("neuron", "segment", "synapse", "weight_exact", "weight_ceil")
SUMMARY_HEADER = ("seed", "avg_steps")


class OutputError(OSError):
    """An output file could not be written or read; the message carries the path."""


@dataclass(frozen=True)
class TrajectoryRow:
    step: int
    theta_deg: float
    x_m: float
    x_dot: float
    action: str
    reward: str


class TrajectoryRecorder:
    """Step hook that keeps the states of one selected trial."""

    def __init__(self, trial: int | None = None) -> None:
        self.trial = trial
        self.rows: list[TrajectoryRow] = []

    def __call__(self, event: StepEvent, network: Network) -> None:
        if self.trial is not None and event.trial != self.trial:
            return
        self.rows.append(TrajectoryRow(
            event.step, event.state.theta_deg, event.state.x, event.state.x_dot,
            event.inference.action.label, event.reward.label,
        ))


def _render(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def _read_rows(path: str | Path, header: Sequence[str]) -> list[list[str]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not rows or tuple(rows[0]) != tuple(header):
        raise OutputError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def trials_csv(episodes: Iterable[EpisodeResult]) -> str:
    return _render(TRIALS_HEADER, (
        (e.seed, t.trial, repr(t.initial_angle_deg), t.steps, t.outcome.value,
         t.pos_rewards, t.neg_rewards)
        for e in episodes for t in e.trials
    ))


def trajectory_csv(rows: Iterable[TrajectoryRow]) -> str:
    return _render(TRAJECTORY_HEADER, (
        (r.step, repr(r.theta_deg), repr(r.x_m), repr(r.x_dot), r.action, r.reward) for r in rows
    ))


def weights_csv(network: Network) -> str:
    return _render(WEIGHTS_HEADER, (
        (NEURON_ACTIONS[n].label, s, i, exact_decimal(network.weight(n, s, i)),
         network.neurons[n].segments[s].ceil_weights[i])
        for n, s, i in network.iter_synapses()
    ))


def summary_csv(episodes: Iterable[EpisodeResult]) -> str:
    return _render(SUMMARY_HEADER, ((e.seed, repr(e.average_steps)) for e in episodes))


def write_trials_csv(path: str | Path, episodes: Iterable[EpisodeResult]) -> Path:
    return _write(path, trials_csv(episodes))


def write_trajectory_csv(path: str | Path, rows: Iterable[TrajectoryRow]) -> Path:
    return _write(path, trajectory_csv(rows))


def write_weights_csv(path: str | Path, network: Network) -> Path:
    return _write(path, weights_csv(network))


def write_summary_csv(path: str | Path, episodes: Iterable[EpisodeResult]) -> Path:
    return _write(path, summary_csv(episodes))


def read_weights_csv(
    path: str | Path,
    w_max: Fraction | int = 8,
    plasticity: PlasticityParams | None = None,
    learning: bool = True,
) -> Network:
    """Load a weight snapshot written by :func:`write_weights_csv`."""
    labels = {a.label: a.neuron for a in NEURON_ACTIONS}
    table: dict[tuple[int, int, int], Fraction] = {}
    for row in _read_rows(path, WEIGHTS_HEADER):
        try:
            key = (labels[row[0]], int(row[1]), int(row[2]))
            table[key] = Fraction(row[3])
        except (KeyError, ValueError, IndexError):
            raise OutputError(f"{path}: bad weight row {row!r}") from None
    if not table:
        raise OutputError(f"{path}: no weights")
    q = 1 + max(s for _, s, _ in table)
    d = 1 + max(i for _, _, i in table)
    try:
        weights = [[[table[(n, s, i)] for i in range(d)] for s in range(q)] for n in range(2)]
    except KeyError as missing:
        raise OutputError(f"{path}: missing synapse {missing}") from None
    return Network.from_weights(weights, w_max=w_max, plasticity=plasticity, learning=learning)


def read_summary_csv(path: str | Path) -> list[tuple[int, float]]:
    return [(int(seed), float(avg)) for seed, avg in _read_rows(path, SUMMARY_HEADER)]


def manifest_text(config: ExperimentConfig, command: str, outputs: Sequence[Path],
                  timestamp: datetime | None = None) -> str:
    """A loadable config file whose comment lines record provenance.

    The digest covers the config lines only, so it is stable across reruns.
    """
    timestamp = timestamp or datetime.now(timezone.utc)
    lines = [
        f"# rlncart {__version__}",
        f"# command: {command}",
        f"# timestamp: {timestamp.isoformat(timespec='seconds')}",
        f"# config_sha256: {config_digest(config)}",
    ]
    lines += [f"# output: {p.name}" for p in outputs]
    return "\n".join(lines) + "\n" + format_config(config)


def write_manifest(path: str | Path, config: ExperimentConfig, command: str,
                   outputs: Sequence[Path]) -> Path:
    return _write(path, manifest_text(config, command, outputs))


_PLOTS = {
    TRIALS_HEADER: """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'initial angle (deg)'
set ylabel 'successful steps'
plot '{csv}' using 3:4 with points pointtype 7 title 'steps'
""",
    TRAJECTORY_HEADER: """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'step'
set ylabel 'pole angle (deg)'
set y2label 'cart position (m)'
set ytics nomirror
set y2tics
plot '{csv}' using 1:2 with lines axes x1y1 title 'theta', \\
     '{csv}' using 1:3 with lines axes x1y2 title 'x'
""",
    SUMMARY_HEADER: """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'episode (sorted)'
set ylabel 'average successful steps'
set style fill solid
plot '{csv}' using 0:2 with boxes title 'average steps'
""",
    WEIGHTS_HEADER: """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'synapse'
set ylabel 'segment'
set multiplot layout 1,2
set title '-F'
plot '{csv}' using 3:(strcol(1) eq '-F' ? $2 : 1/0):5 with image notitle
set title '+F'
plot '{csv}' using 3:(strcol(1) eq '+F' ? $2 : 1/0):5 with image notitle
unset multiplot
""",
}


def plot_script(csv_path: str | Path) -> str:
    """Return a gnuplot script for a result CSV, chosen by its header."""
    path = Path(csv_path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            header = tuple(next(csv.reader(fh), ()))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from None
    template = _PLOTS.get(header)
    if template is None:
        raise OutputError(f"{path}: not a recognised result file (header {','.join(header)})")
    png = path.with_suffix(".png").name
    return f"set terminal pngcairo size 900,500\nset output '{png}'\n" + template.format(csv=path.name)


def write_plot_script(csv_path: str | Path, script_path: str | Path | None = None) -> Path:
    csv_path = Path(csv_path)
    target = Path(script_path) if script_path else csv_path.with_suffix(".gp")
    return _write(target, plot_script(csv_path))
