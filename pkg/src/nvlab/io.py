"""Output writers: CSV tables, binary field snapshots and experiment manifests."""

import csv
import io
import json
import logging
import struct
import sys
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import TextIO

import numpy as np

from nvlab.errors import OutputError
from nvlab.solver import FieldState

logger = logging.getLogger(__name__)

SNAPSHOT_MAGIC = b"NVF1"
SNAPSHOT_HEADER = struct.Struct("<4sIddd")
MANIFEST_SUFFIX = ".manifest.json"

OBSERVER_HEADER = ("time", "mass", "l2", "linf")
SCAN_HEADER = ("t", "u_re", "u_im", "abs_I", "re_I", "im_I", "apost_err")
LEMMA_HEADER = (
    "index",
    "u_re",
    "u_im",
    "case",
    "omega1",
    "omega2",
    "circle_ratio",
    "degenerate_ratio",
    "cluster_ratio",
    "passed",
)


def format_value(value) -> str:
    """Locale-independent text for one CSV cell (shortest round-trip repr for floats)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV text with ``\\n`` line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_text(path: Path | str | None, text: str, stream: TextIO | None = None) -> None:
    """Write ``text`` to ``path``, or to ``stream`` (stdout by default) when ``path`` is None.

    Raises:
        OutputError: If the file cannot be written.
    """
    if path is None:
        (stream or sys.stdout).write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    logger.debug("wrote %d bytes to %s", len(text), path)


def write_csv(
    path: Path | str | None, header: Sequence[str], rows: Iterable[Sequence], stream: TextIO | None = None
) -> None:
    """Write a CSV table; an empty ``rows`` gives a header-only file."""
    write_text(path, render_csv(header, rows), stream)


def write_snapshot(path: Path | str, state: FieldState) -> None:
    """Write ``state`` as a 32-byte little-endian header followed by ``N^2`` float64 values.

    Raises:
        OutputError: If the file cannot be written.
    """
    header = SNAPSHOT_HEADER.pack(SNAPSHOT_MAGIC, state.N, state.L, state.E, state.time)
    payload = np.ascontiguousarray(state.values, dtype="<f8").tobytes(order="C")
    try:
        with open(path, "wb") as f:
            f.write(header)
            f.write(payload)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc


def read_snapshot(path: Path | str, dealias: bool = True) -> FieldState:
    """Read a snapshot written by :func:`write_snapshot`.

    Raises:
        OutputError: If the file is unreadable, truncated or has a wrong magic.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    if len(data) < SNAPSHOT_HEADER.size:
        raise OutputError(path, "truncated snapshot header")
    magic, n, L, E, time = SNAPSHOT_HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise OutputError(path, f"bad magic {magic!r}")
    expected = SNAPSHOT_HEADER.size + 8 * n * n
    if len(data) != expected:
        raise OutputError(path, f"expected {expected} bytes for N={n}, got {len(data)}")
    values = np.frombuffer(data, dtype="<f8", offset=SNAPSHOT_HEADER.size).reshape(n, n)
    return FieldState(values.astype(float), L, E, time, dealias)


def snapshot_path(base: Path | str, index: int) -> Path:
    """``<base>.<index:06d>.nvf`` for the ``index``-th snapshot of a run."""
    return Path(f"{base}.{index:06d}.nvf")


@dataclass
class ExperimentManifest:
    """Record of one command invocation, sufficient to replay it.

    Attributes:
        command: Subcommand name.
        parameters: Flag names (without dashes) to string values, in order.
        seed: Command seed (0 for commands without randomness).
        tool_version: Package version that produced the output.
        started_at: ISO 8601 UTC start time.
    """

    command: str
    parameters: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    tool_version: str = ""
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError(f"seed must be unsigned, got {self.seed}")
        self.parameters = {str(k): str(v) for k, v in self.parameters.items()}

    def to_argv(self) -> list[str]:
        """Command-line arguments reproducing the invocation."""
        argv = [self.command]
        for key, value in self.parameters.items():
            argv.extend([f"--{key.replace('_', '-')}", value])
        return argv

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentManifest":
        """Build from a parsed manifest.

        Raises:
            KeyError: If ``command`` is missing.
        """
        if "command" not in data:
            raise KeyError("manifest must include 'command'")
        return cls(
            command=data["command"],
            parameters=dict(data.get("parameters", {})),
            seed=int(data.get("seed", 0)),
            tool_version=str(data.get("tool_version", "")),
            started_at=str(data.get("started_at", "")),
        )


def manifest_path(output: Path | str) -> Path:
    return Path(f"{output}{MANIFEST_SUFFIX}")


def write_manifest(path: Path | str, manifest: ExperimentManifest) -> None:
    write_text(path, manifest.to_json())


def read_manifest(path: Path | str) -> ExperimentManifest:
    """Load a manifest.

    Raises:
        OutputError: If the file is unreadable or not a manifest.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        return ExperimentManifest.from_dict(data)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise OutputError(path, f"invalid manifest: {exc}") from exc
