import os
from pathlib import Path
from typing import Any

import yaml

from cli.core.exceptions import DomainError

DEFAULT_EPS_REL = 1e-15
DEFAULT_N_MIN = 0
DEFAULT_N_MAX_HARD = 1_000_000
DEFAULT_P_MAX = 12
DEFAULT_HBAR = 1.0
DEFAULT_FORMAT = "json"

THREADS_ENV = "CSPI_THREADS"


def max_workers() -> int:
    """Worker cap from ``CSPI_THREADS``, falling back to the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a flat ``key: value`` YAML file of run options.

    Keys may use dashes or underscores; they are normalised to underscores.
    Nested mappings and lists are rejected.
    """
    content = yaml.safe_load(path.read_text(encoding="utf-8"))
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise DomainError(f"config file {path} must contain a flat key-value mapping")
    flat: dict[str, Any] = {}
    for key, value in content.items():
        if isinstance(value, dict | list):
            raise DomainError(f"config key {key!r} must be a scalar")
        flat[str(key).replace("-", "_")] = value
    return flat
