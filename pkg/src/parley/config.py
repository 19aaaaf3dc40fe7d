"""Runtime configuration: a JSON file plus PARLEY_* environment overrides.

Every field has a sensible default, so both the file and the overrides are
optional.  Unknown file keys are errors; silent typos in config files cost
more debugging time than the strictness costs in flexibility.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    host: str = "127.0.0.1"
    port: int = 8765
    max_sessions: int = 32
    program_dir: str | None = None
    grammar_path: str | None = None
    templates_path: str | None = None
    fuel: int = 10_000


_INT_FIELDS = {"port", "max_sessions", "fuel"}
_ENV_PREFIX = "PARLEY_"


def load_config(path: str | Path | None = None, env=None) -> Config:
    env = os.environ if env is None else env
    values: dict = {}
    known = {f.name for f in fields(Config)}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(doc)
    for name in known:
        key = _ENV_PREFIX + name.upper()
        if key in env:
            values[name] = env[key]
    for name in _INT_FIELDS:
        if name in values:
            try:
                values[name] = int(values[name])
            except (TypeError, ValueError):
                raise ConfigError(f"config value {name!r} must be an integer") from None
            if values[name] <= 0:
                raise ConfigError(f"config value {name!r} must be positive")
    return Config(**values)
