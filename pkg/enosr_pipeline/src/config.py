"""
Configuration loading and logging setup for the ENO-SR pipeline.
"""

import copy
import logging
import sys
from pathlib import Path
from typing import Any

import yaml

from exceptions import ConfigError

DEFAULT_CONFIG: dict[str, Any] = {
    "study": {
        "function": "fd",
        "d_values": [4.0],
        "m": 4,
        "levels": 7,
        "n0": 21,
        "domain": [-1.0, 1.0],
        "sigma": 1.4,
        "seed": 7,
        "mode": "enosr",
        "probes_per_interval": 64,
    },
    "detection": {"m": 4},
    "logging": {"level": "WARNING", "file": None},
    "performance": {"parallel_jobs": 1},
}


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: str | Path | None = None) -> dict[str, Any]:
    """Load a YAML file and merge it over DEFAULT_CONFIG."""
    if config_path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(config_path) as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Failed to load config: {e}") from e
    if not isinstance(loaded, dict):
        raise ConfigError(
            f"Config {config_path} must be a mapping, got {type(loaded).__name__}"
        )
    return _merge(DEFAULT_CONFIG, loaded)


def setup_logging(config: dict[str, Any], level: str | None = None) -> None:
    """Setup logging configuration; stdout stays free for CSV output."""
    level_name = (level or config["logging"]["level"]).upper()
    log_level = getattr(logging, level_name, None)
    if not isinstance(log_level, int):
        raise ConfigError(f"Unknown log level: {level_name}")

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    log_file = config["logging"].get("file")
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )
