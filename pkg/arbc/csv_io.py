"""CSV schemas and run manifests.

All CSV files are UTF-8 with LF line endings and a fixed header; floats
use the shortest representation that round-trips (``repr``), NaN is
written as ``nan``.
"""
import csv
import io
import logging
import math
import os
from collections.abc import Iterable, Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import TextIO, Union

from dotenv import dotenv_values
from pydantic import ValidationError

from . import __version__
from .config_file import MANIFEST_PREFIX, parse_config_text, write_config
from .core import ConfigError, InputFormatError
from .models import IvPoint, LinkConfig, MeasuredSample, RunManifest, SweepRow

logger = logging.getLogger(__name__)

MEASURED_HEADER = ("ps_W", "pbt_W")
FIT_CURVE_HEADER = ("ps_W", "pbt_W", "fitted_W", "squared_error")
IV_HEADER = ("voltage_V", "current_A", "power_W")
SWEEP_HEADER = ("ps_W", "eta_bt", "temp_C", "pm_W", "pb_W", "eta_om", "ps_star_W", "eta_opt")

Cell = Union[float, int, str]


def utc_now() -> datetime:
    """Get current UTC time with timezone info."""
    return datetime.now(timezone.utc)


def format_float(value: float) -> str:
    """Shortest round-trip text for a float; ``nan``/``inf`` for non-finite values."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


# ==============================================================================
# Reading
# ==============================================================================

def _parse_float(text: str, column: str, line: int) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise InputFormatError(f"column {column}: {text!r} is not a number", line) from None


def parse_measured_samples(stream: TextIO) -> list[MeasuredSample]:
    """Measured (ps_W, pbt_W) samples from CSV text."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        raise InputFormatError("file is empty, expected header ps_W,pbt_W", 1)
    if tuple(cell.strip() for cell in header) != MEASURED_HEADER:
        raise InputFormatError(f"expected header {','.join(MEASURED_HEADER)}, got {','.join(header)}", 1)

    samples = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(MEASURED_HEADER):
            raise InputFormatError(f"expected {len(MEASURED_HEADER)} columns, got {len(row)}", line)
        ps = _parse_float(row[0], "ps_W", line)
        pbt = _parse_float(row[1], "pbt_W", line)
        try:
            samples.append(MeasuredSample(source_power=ps, beam_power=pbt))
        except ValidationError as e:
            raise InputFormatError(f"invalid sample: {e.errors()[0]['msg']}", line) from None

    if not samples:
        raise InputFormatError("no data rows after the header", 2)
    return samples


def read_measured_samples(path: Union[str, Path]) -> list[MeasuredSample]:
    """Read a measured-sample CSV file."""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            samples = parse_measured_samples(f)
    except OSError as e:
        raise InputFormatError(f"cannot read {path}: {e.strerror}") from e
    logger.info(f"[CSV] Read {len(samples)} samples from {path}")
    return samples


# ==============================================================================
# Writing
# ==============================================================================

def render_csv(header: Sequence[str], rows: Iterable[Sequence[Cell]]) -> str:
    """CSV text with floats formatted by format_float."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(cell) if isinstance(cell, float) else cell for cell in row])
    return buffer.getvalue()


def write_text(path: Union[str, Path], text: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def sweep_rows(rows: Iterable[SweepRow]) -> list[tuple[float, ...]]:
    return [
        (r.ps_w, r.eta_bt, r.temp_c, r.pm_w, r.pb_w, r.eta_om, r.ps_star_w, r.eta_opt)
        for r in rows
    ]


def iv_rows(points: Iterable[IvPoint]) -> list[tuple[float, ...]]:
    return [(p.voltage, p.current, p.power) for p in points]


# ==============================================================================
# Run manifest
# ==============================================================================

def manifest_timestamp() -> str:
    """ISO-8601 UTC timestamp; SOURCE_DATE_EPOCH pins it for reproducible runs."""
    epoch = os.getenv("SOURCE_DATE_EPOCH")
    if epoch:
        try:
            moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        except ValueError:
            raise ConfigError(f"SOURCE_DATE_EPOCH must be an integer, got {epoch!r}") from None
    else:
        moment = utc_now()
    return moment.replace(microsecond=0).isoformat()


def build_manifest(
    command: str,
    config: LinkConfig,
    inputs: Sequence[Union[str, Path]] = (),
    outputs: Sequence[Union[str, Path]] = (),
) -> RunManifest:
    return RunManifest(
        command=command,
        config=config,
        inputs=[str(p) for p in inputs],
        outputs=[str(p) for p in outputs],
        tool_version=__version__,
        timestamp=manifest_timestamp(),
    )


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def render_manifest(manifest: RunManifest) -> str:
    """Manifest header keys followed by the full config snapshot."""
    lines = [
        f"{MANIFEST_PREFIX}command = {_quote(manifest.command)}",
        f"{MANIFEST_PREFIX}tool_version = {_quote(manifest.tool_version)}",
        f"{MANIFEST_PREFIX}timestamp = {_quote(manifest.timestamp)}",
    ]
    lines.extend(f"{MANIFEST_PREFIX}input.{i} = {_quote(p)}" for i, p in enumerate(manifest.inputs))
    lines.extend(f"{MANIFEST_PREFIX}output.{i} = {_quote(p)}" for i, p in enumerate(manifest.outputs))
    return "\n".join(lines) + "\n" + write_config(manifest.config)


def _indexed(values: dict[str, str], prefix: str) -> list[str]:
    found = {}
    for key, value in values.items():
        if key.startswith(prefix):
            suffix = key[len(prefix):]
            if not suffix.isdigit():
                raise ConfigError(f"unknown manifest key '{key}'")
            found[int(suffix)] = value or ""
    return [found[i] for i in sorted(found)]


def parse_manifest(text: str) -> RunManifest:
    """Inverse of render_manifest."""
    values = dotenv_values(stream=io.StringIO(text), interpolate=False)
    try:
        command = values[f"{MANIFEST_PREFIX}command"]
        tool_version = values[f"{MANIFEST_PREFIX}tool_version"]
        timestamp = values[f"{MANIFEST_PREFIX}timestamp"]
    except KeyError as e:
        raise ConfigError(f"manifest is missing key {e.args[0]}") from None
    return RunManifest(
        command=command or "",
        config=parse_config_text(text),
        inputs=_indexed(values, f"{MANIFEST_PREFIX}input."),
        outputs=_indexed(values, f"{MANIFEST_PREFIX}output."),
        tool_version=tool_version or "",
        timestamp=timestamp or "",
    )


def manifest_path(output: Union[str, Path]) -> Path:
    """Sidecar location for an output file: ``<output>.manifest``."""
    output = Path(output)
    return output.with_name(output.name + ".manifest")


def write_manifest(output: Union[str, Path], manifest: RunManifest) -> Path:
    path = write_text(manifest_path(output), render_manifest(manifest))
    logger.info(f"[CSV] Wrote manifest {path}")
    return path
