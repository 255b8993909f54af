"""Service configuration: file (TOML or JSON), environment, then flags.

Precedence, lowest to highest: config file < MODESHIFT_* environment
variables < command-line flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from ..mobsim.world import PolicyLevers

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

_ENV_KEYS = {
    "MODESHIFT_PORT": ("port", int),
    "MODESHIFT_HOST": ("host", str),
    "MODESHIFT_CADENCE": ("snapshot_cadence", int),
    "MODESHIFT_TICK_MS": ("tick_ms", float),
    "MODESHIFT_WORLDS_DIR": ("worlds_dir", str),
}


@dataclass(frozen=True)
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    snapshot_cadence: int = 60
    tick_ms: float = 0.0
    worlds_dir: str | None = None
    lever_bounds: Mapping[str, Mapping[str, float]] = field(default_factory=PolicyLevers.bounds)


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    flags: Mapping[str, object] | None = None,
) -> GatewayConfig:
    cfg = GatewayConfig()
    if path is not None:
        raw = _read_config_file(Path(path))
        known = {k: v for k, v in raw.items() if k in cfg.__dataclass_fields__}
        cfg = replace(cfg, **known)
    env = os.environ if env is None else env
    env_updates = {}
    for var, (attr, cast) in _ENV_KEYS.items():
        if var in env:
            env_updates[attr] = cast(env[var])
    if env_updates:
        cfg = replace(cfg, **env_updates)
    if flags:
        flag_updates = {k: v for k, v in flags.items() if v is not None and k in cfg.__dataclass_fields__}
        if flag_updates:
            cfg = replace(cfg, **flag_updates)
    return cfg


def _read_config_file(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        return tomllib.loads(text)
    return json.loads(text)
