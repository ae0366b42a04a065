"""Configuration helpers: flat key=value files and environment settings."""

import logging
import os
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

THREADS_ENV = "NVLAB_THREADS"


def thread_count() -> int:
    """Return the worker cap taken from ``NVLAB_THREADS``.

    Unset, empty or ``0`` means one worker per available CPU.

    Raises:
        ValueError: If the variable is not a non-negative integer.
    """
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        requested = 0
    else:
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got '{raw}'")
        if requested < 0:
            raise ValueError(f"{THREADS_ENV} must be >= 0, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


def normalize_key(key: str) -> str:
    """Map a flag spelling (``--t-min``, ``t_min``) to a parameter name."""
    return key.strip().lstrip("-").replace("-", "_").lower()


def load_config_file(path: Path | str) -> dict[str, str]:
    """Read a flat ``key=value`` configuration file.

    Blank lines and lines starting with ``#`` are ignored. Keys use the CLI
    flag names, with or without leading dashes.

    Args:
        path: File to read.

    Returns:
        Mapping of parameter names to raw string values, in file order.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If a line has no ``=`` or a key repeats.
    """
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value, got '{stripped}'")
            key, value = stripped.split("=", 1)
            name = normalize_key(key)
            if not name:
                raise ValueError(f"{path}:{lineno}: empty key")
            if name in values:
                raise ValueError(f"{path}:{lineno}: duplicate key '{name}'")
            values[name] = value.strip()
    logger.debug("loaded %d settings from %s", len(values), path)
    return values


def make_rng(seed: int) -> np.random.Generator:
    """Return a counter-based generator for one command."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Split one command seed into ``count`` independent Philox streams.

    The streams depend only on ``seed`` and their index, so a parallel sweep
    that hands stream ``i`` to chunk ``i`` is reproducible for any thread count.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(child)) for child in children]
