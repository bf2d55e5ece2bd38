"""Flat ``key = value`` configuration files.

Every key is optional and defaults to the values in :class:`ExperimentConfig`.
Blank lines and ``#`` comments are ignored.  Fractions may be written either
as ``7/1024`` or as decimals.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .encoding import StateMode
from .experiment import ExperimentConfig
from .plasticity import TagRule


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None) -> None:
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")
        self.source = source
        self.line = line


def _int(text: str) -> int:
    return int(text, 10)


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _float(text: str) -> float:
    value = float(Fraction(text)) if "/" in text else float(text)
    if not math.isfinite(value):
        raise ValueError(f"not finite: {text}")
    return value


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _edges(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


# key -> (section, field, parser).  Section None means ExperimentConfig itself.
_KEYS: dict[str, tuple[str | None, str, Callable[[str], Any]]] = {
    "mode": (None, "mode", StateMode.parse),
    "trials": (None, "trials", _int),
    "step_cap": (None, "step_cap", _int),
    "angle_range": (None, "angle_range_deg", _fraction),
    "n_angles": (None, "n_angles", _int),
    "w_base": (None, "w_base", _fraction),
    "w_range": (None, "w_range", _fraction),
    "w_max": (None, "w_max", _fraction),
    "segments": (None, "segments", _int),
    "seed": (None, "seed", _int),
    "seeds": (None, "seeds", _int),
    "learning": (None, "learning", _bool),
    "angle_edges": ("angle_scheme", "edges", _edges),
    "velocity_edges": ("velocity_scheme", "edges", _edges),
    "sigma": ("plasticity", "sigma", _int),
    "omega": ("plasticity", "omega", _int),
    "rho_plus": ("plasticity", "rho_plus", _fraction),
    "rho_minus": ("plasticity", "rho_minus", _fraction),
    "pi": ("plasticity", "pi", _fraction),
    "tag_rule": ("plasticity", "tag_rule", TagRule),
    "cart_mass": ("physics", "cart_mass", _float),
    "pole_mass": ("physics", "pole_mass", _float),
    "gravity": ("physics", "gravity", _float),
    "force": ("physics", "force", _float),
    "pole_length": ("physics", "pole_length", _float),
    "tau": ("physics", "tau", _float),
    "x_limit": ("physics", "x_limit", _float),
    "theta_limit": ("physics", "theta_limit_deg", _float),
    "integrator": ("physics", "integrator", str),
}

CONFIG_KEYS = tuple(_KEYS)


def _split_lines(text: str, source: str) -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"malformed line (expected 'key = value'): {raw.strip()!r}", source, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"malformed line: {raw.strip()!r}", source, lineno)
        entries.append((lineno, key, value))
    return entries


def _set(config: ExperimentConfig, key: str, value: Any) -> ExperimentConfig:
    section, field_name, _ = _KEYS[key]
    if section is None:
        return dataclasses.replace(config, **{field_name: value})
    inner = dataclasses.replace(getattr(config, section), **{field_name: value})
    return dataclasses.replace(config, **{section: inner})


def _apply(
    config: ExperimentConfig,
    entries: Iterable[tuple[int | None, str, str]],
    source: str,
) -> ExperimentConfig:
    for lineno, key, text in entries:
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", source, lineno)
        try:
            value = _KEYS[key][2](text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r} ({exc})", source, lineno) from None
        try:
            config = _set(config, key, value)
        except ValueError as exc:
            raise ConfigError(f"out of range: {exc}", source, lineno) from None
    return config


def parse_config(
    path: str | Path | None = None,
    overrides: Mapping[str, str] | None = None,
    text: str | None = None,
) -> ExperimentConfig:
    """Read a config file (or literal ``text``) and apply command-line overrides.

    Raises:
        ConfigError: on malformed lines, unknown keys, unparsable or
            out-of-range values; the message names the file and line.
    """
    config = ExperimentConfig()
    if path is not None:
        source = str(path)
        try:
            body = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", source) from None
        config = _apply(config, _split_lines(body, source), source)
    if text is not None:
        config = _apply(config, _split_lines(text, "<text>"), "<text>")
    if overrides:
        entries = ((None, k, str(v)) for k, v in overrides.items())
        config = _apply(config, entries, "<command line>")
    return config


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return exact_decimal(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (StateMode, TagRule)):
        return value.value
    if isinstance(value, tuple):
        return ",".join(format_value(float(v)) for v in value)
    return str(value)


def exact_decimal(value: Fraction) -> str:
    """Render ``value`` as a terminating decimal when possible, else ``p/q``."""
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(value.numerator)
    scaled = abs(value.numerator) * 10**digits // value.denominator
    sign = "-" if value < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def config_items(config: ExperimentConfig) -> list[tuple[str, str]]:
    """Every key with its resolved value, in canonical order."""
    items = []
    for key, (section, field_name, _) in _KEYS.items():
        owner = config if section is None else getattr(config, section)
        value = getattr(owner, field_name)
        if key == "segments" and value is None:
            value = config.n_segments
        items.append((key, format_value(value)))
    return items


def format_config(config: ExperimentConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config_items(config))


def config_digest(config: ExperimentConfig) -> str:
    return hashlib.sha256(format_config(config).encode("utf-8")).hexdigest()
