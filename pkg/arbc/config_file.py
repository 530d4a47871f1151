"""Key-value configuration files.

Flat ``section.key = value`` text read with python-dotenv; every key is
optional and falls back to the built-in tables:

    transmitter.a1 = 3.331
    channel.visibility_km = 11.0
    receiver.mpp.25.0.a2 = 0.4979
    pv.area_factor = 1.234

A run manifest is itself a config file with extra ``manifest.*`` keys, so
it can be passed back in as ``--config`` to repeat the run.
"""
import io
import logging
import os
from pathlib import Path
from typing import Any, Optional, Union

from dotenv import dotenv_values

from .config import CONFIG_ENV_VAR, DEFAULT_WORKERS, WORKERS_ENV_VAR
from .core import ConfigError, build_config
from .models import LinkConfig

logger = logging.getLogger(__name__)

SECTION_FIELDS = {
    "transmitter": ("sqrt_coeffs", ("a1", "b1", "c1")),
    "channel": ("channel", ("wavelength_nm", "visibility_km", "range_km")),
    "pv": ("pv", (
        "isc_ref", "voc_ref", "ir0", "ideality", "n_series", "t_ref",
        "bandgap_ev", "xti", "area_factor", "beam_frequency_hz",
    )),
}
RECEIVER_SCALARS = ("eta_dc", "eta_ce")
MPP_PREFIX = "receiver.mpp."
MANIFEST_PREFIX = "manifest."


def resolve_config_path(cli_path: Optional[str]) -> Optional[str]:
    """--config wins over the ARBC_CONFIG environment variable."""
    return cli_path or os.getenv(CONFIG_ENV_VAR) or None


def resolve_workers(cli_workers: Optional[int]) -> int:
    """--workers wins over ARBC_WORKERS; either must be a positive integer."""
    if cli_workers is not None:
        raw: Union[int, str] = cli_workers
    else:
        raw = os.getenv(WORKERS_ENV_VAR) or DEFAULT_WORKERS
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"worker count must be at least 1, got {workers}")
    return workers


def _number(key: str, raw: Optional[str]) -> Union[int, float]:
    if raw is None or raw.strip() == "":
        raise ConfigError(f"config key '{key}' has no value")
    try:
        return int(raw) if key == "pv.n_series" else float(raw)
    except ValueError:
        raise ConfigError(f"config key '{key}' is not a number: {raw!r}") from None


def _mpp_entry(key: str, raw: Optional[str], table: dict[float, dict[str, float]]) -> None:
    temp_text, _, field = key[len(MPP_PREFIX):].rpartition(".")
    if field not in ("a2", "b2") or not temp_text:
        raise ConfigError(f"unknown config key '{key}'")
    try:
        temp = float(temp_text)
    except ValueError:
        raise ConfigError(f"config key '{key}' has a non-numeric temperature") from None
    table.setdefault(temp, {})[field] = _number(key, raw)


def parse_config_text(text: str) -> LinkConfig:
    """Build a LinkConfig from key-value text; unknown keys are errors."""
    values = dotenv_values(stream=io.StringIO(text), interpolate=False)

    data: dict[str, Any] = {}
    mpp_table: dict[float, dict[str, float]] = {}
    for key, raw in values.items():
        if key.startswith(MANIFEST_PREFIX):
            continue
        if key.startswith(MPP_PREFIX):
            _mpp_entry(key, raw, mpp_table)
            continue

        section, _, name = key.partition(".")
        if section == "receiver" and name in RECEIVER_SCALARS:
            data[name] = _number(key, raw)
        elif section in SECTION_FIELDS and name in SECTION_FIELDS[section][1]:
            data.setdefault(SECTION_FIELDS[section][0], {})[name] = _number(key, raw)
        else:
            raise ConfigError(f"unknown config key '{key}'")

    # A partial table replaces the built-in one as a whole
    if mpp_table:
        data["mpp_coeffs_by_temp"] = mpp_table
    return build_config(data)


def load_config(path: Optional[Union[str, Path]] = None) -> LinkConfig:
    """Read a config file, or return the built-in defaults when ``path`` is None."""
    if path is None:
        return LinkConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}") from e
    config = parse_config_text(text)
    logger.info(f"[Config] Loaded {path}")
    return config


def write_config(config: LinkConfig) -> str:
    """Serialise every key in a fixed order; parse_config_text inverts it exactly."""
    lines = []
    for section, (attr, names) in SECTION_FIELDS.items():
        if section == "pv":
            continue
        model = getattr(config, attr)
        lines.extend(f"{section}.{name} = {getattr(model, name)!r}" for name in names)

    lines.extend(f"receiver.{name} = {getattr(config, name)!r}" for name in RECEIVER_SCALARS)
    for temp, coeffs in config.mpp_coeffs_by_temp.items():
        lines.append(f"{MPP_PREFIX}{temp!r}.a2 = {coeffs.a2!r}")
        lines.append(f"{MPP_PREFIX}{temp!r}.b2 = {coeffs.b2!r}")

    for name in SECTION_FIELDS["pv"][1]:
        value = getattr(config.pv, name)
        if value is not None:
            lines.append(f"pv.{name} = {value!r}")
    return "\n".join(lines) + "\n"
