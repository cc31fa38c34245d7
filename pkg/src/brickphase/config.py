"""key=value configuration files shared by the planner and the tracker simulator.

Keys match SequencerConfig / TrackerParams field names, case-insensitively, so
``T_max`` and ``t_max`` are the same key and set both structures.  Blank lines
and ``#`` comments are ignored.
"""
from __future__ import annotations

import dataclasses
from typing import Iterable, Mapping

from .sequencer import SequencerConfig
from .tracking import TrackerParams


class ConfigError(ValueError):
    pass


_TARGETS = (SequencerConfig, TrackerParams)


def _field_types() -> dict[str, type]:
    out = {}
    for cls in _TARGETS:
        for f in dataclasses.fields(cls):
            out[f.name] = type(f.default)
    return out


def _convert(key: str, raw: str, kind: type):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}") from None


def parse_assignments(lines: Iterable[str], source: str = "<config>") -> dict:
    types = _field_types()
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key not in types:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, value, types[key])
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def build_configs(values: Mapping[str, object]) -> tuple[SequencerConfig, TrackerParams]:
    out = []
    for cls in _TARGETS:
        names = {f.name for f in dataclasses.fields(cls)}
        try:
            out.append(cls(**{k: v for k, v in values.items() if k in names}))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return out[0], out[1]


def load_config(path=None, overrides: Iterable[str] = ()) -> tuple[SequencerConfig, TrackerParams]:
    """Read an optional file, then apply ``key=value`` override strings on top."""
    values = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            values.update(parse_assignments(fh, str(path)))
    values.update(parse_assignments(overrides, "--set"))
    return build_configs(values)
