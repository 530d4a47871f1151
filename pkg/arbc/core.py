"""Shared errors, configuration validation and temperature lookup."""
import logging
from collections.abc import Mapping
from typing import Any, Optional, Union

import numpy as np
from pydantic import ValidationError

from .models import FeasibleInterval, LinkConfig, MppLinearCoeffs, Violation

logger = logging.getLogger(__name__)


# ==============================================================================
# Errors
# ==============================================================================

class ArbcError(Exception):
    """Base class for every failure raised by the link model."""
    exit_code = 2


class DomainError(ArbcError, ValueError):
    """Raised when an argument lies outside an operation's domain."""
    pass


class RangeError(DomainError):
    """Raised when a temperature or visibility falls outside the supported tables."""
    pass


class InfeasibleError(DomainError):
    """Raised when an operating point delivers no power to the battery."""
    def __init__(self, message: str, interval: FeasibleInterval):
        super().__init__(f"{message}; feasible source power interval is {interval}")
        self.interval = interval


class ConfigError(ArbcError):
    """Raised for malformed configuration files or sweep axes."""
    def __init__(self, message: str, violations: Optional[list[Violation]] = None):
        super().__init__(message)
        self.violations = violations or []


class InputFormatError(ArbcError):
    """Raised when an input CSV does not match its schema."""
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class FitError(ArbcError):
    """Raised when a least-squares fit cannot be produced."""
    exit_code = 3

    def __init__(self, message: str, best_residual: Optional[float] = None):
        if best_residual is not None:
            message = f"{message} (best mse {best_residual:.6g})"
        super().__init__(message)
        self.best_residual = best_residual


class CalibrationError(ArbcError):
    """Raised when the panel calibration bracket does not contain the target."""
    exit_code = 3

    def __init__(self, message: str, lower: float, upper: float):
        super().__init__(f"{message} (bracket [{lower:g}, {upper:g}])")
        self.lower = lower
        self.upper = upper


class ModelError(ArbcError):
    """Raised when the model has no solution of the requested kind."""
    exit_code = 3


# ==============================================================================
# Validation
# ==============================================================================

def _violations_from(error: ValidationError) -> list[Violation]:
    violations = []
    for detail in error.errors():
        field = ".".join(str(part) for part in detail["loc"]) or "config"
        cause = detail.get("ctx", {}).get("error")
        message = str(cause) if cause is not None else detail["msg"]
        violations.append(Violation(field=field, message=message))
    return violations


def validate(config: Union[LinkConfig, Mapping[str, Any]]) -> list[Violation]:
    """Check every LinkConfig invariant.

    Accepts a constructed config or a raw mapping. Returns an empty list when
    all invariants hold; otherwise one Violation per failing field.
    """
    data = config.model_dump() if isinstance(config, LinkConfig) else dict(config)
    try:
        LinkConfig.model_validate(data)
    except ValidationError as e:
        violations = _violations_from(e)
        logger.debug(f"[Config] {len(violations)} violation(s): {violations}")
        return violations
    return []


def build_config(data: Mapping[str, Any]) -> LinkConfig:
    """Construct a LinkConfig or raise ConfigError carrying every violation."""
    try:
        return LinkConfig.model_validate(dict(data))
    except ValidationError as e:
        violations = _violations_from(e)
        summary = "; ".join(f"{v.field}: {v.message}" for v in violations)
        raise ConfigError(f"invalid configuration: {summary}", violations) from e


# ==============================================================================
# Temperature lookup
# ==============================================================================

def supported_temperatures(config: LinkConfig) -> tuple[float, float]:
    """Closed interval of temperatures covered by the MPP table."""
    temps = list(config.mpp_coeffs_by_temp)
    return min(temps), max(temps)


def mpp_coeffs_at(config: LinkConfig, temp: float) -> MppLinearCoeffs:
    """MPP linear coefficients at a PV-cell temperature.

    Exact at tabulated temperatures, piecewise-linear between them, and a
    RangeError outside the table.
    """
    table = config.mpp_coeffs_by_temp
    if temp in table:
        return table[temp]

    lo, hi = supported_temperatures(config)
    if not lo <= temp <= hi:
        raise RangeError(f"temperature {temp} °C outside supported interval [{lo}, {hi}] °C")

    temps = np.fromiter(table.keys(), dtype=float)
    a2 = np.interp(temp, temps, [c.a2 for c in table.values()])
    b2 = np.interp(temp, temps, [c.b2 for c in table.values()])
    return MppLinearCoeffs(a2=float(a2), b2=float(b2))
