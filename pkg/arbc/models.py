"""Pydantic models for the ARBC link model.

Every value type is frozen: once constructed it has passed its invariants
and can be shared freely between sweep workers.
"""
import math
from enum import Enum
from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import (
    ATTENUATION_BETA,
    CHANNEL_DEFAULTS,
    DIODE_DEFAULTS,
    ETA_CE,
    ETA_DC,
    MPP_ANCHOR,
    MPP_LINEAR_TABLE,
    REFERENCE_WAVELENGTH_NM,
    SQRT_FIT_DEFAULTS,
)

ABSOLUTE_ZERO_C = -273.15

# ==============================================================================
# Scalar quantities
# ==============================================================================

PowerW = Annotated[float, Field(ge=0.0, allow_inf_nan=False, description="Power in watts")]
Efficiency = Annotated[float, Field(ge=0.0, le=1.0, allow_inf_nan=False, description="Dimensionless fraction")]
CelsiusTemp = Annotated[float, Field(ge=ABSOLUTE_ZERO_C, allow_inf_nan=False, description="Temperature in °C")]


class FrozenModel(BaseModel):
    """Immutable base for all domain values."""
    model_config = ConfigDict(frozen=True, extra="forbid")


def _require_finite(value: float, name: str) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")
    return value


# ==============================================================================
# Model core
# ==============================================================================

class SqrtFitCoeffs(FrozenModel):
    """Square-root electro-beam model P_bt = a1*sqrt(b1 + P_s) + c1."""
    a1: float = Field(default=SQRT_FIT_DEFAULTS["a1"], description="Gain, W^(1/2) scale")
    b1: float = Field(default=SQRT_FIT_DEFAULTS["b1"], description="Offset inside the root, W")
    c1: float = Field(default=SQRT_FIT_DEFAULTS["c1"], description="Output offset, W")

    @field_validator("a1", "b1")
    @classmethod
    def _positive(cls, value: float, info) -> float:
        _require_finite(value, info.field_name)
        if value <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value

    @field_validator("c1")
    @classmethod
    def _finite(cls, value: float) -> float:
        return _require_finite(value, "c1")


class MppLinearCoeffs(FrozenModel):
    """Linear MPP approximation P_m = a2*P_br + b2 at one temperature."""
    a2: float = Field(..., description="Slope")
    b2: float = Field(..., description="Intercept, W")

    @field_validator("a2")
    @classmethod
    def _slope_range(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("a2 out of (0,1)")
        return value

    @field_validator("b2")
    @classmethod
    def _negative_intercept(cls, value: float) -> float:
        _require_finite(value, "b2")
        if value >= 0:
            raise ValueError("b2 must be negative")
        return value


class ChannelScenario(str, Enum):
    """Atmospheric visibility scenarios."""
    HIGH = "high"
    AVERAGE = "average"
    LOW = "low"


class ChannelSpec(FrozenModel):
    """Free-space beam path through the atmosphere."""
    wavelength_nm: float = Field(default=CHANNEL_DEFAULTS["wavelength_nm"], description="Beam wavelength, nm")
    visibility_km: float = Field(default=CHANNEL_DEFAULTS["visibility_km"], description="Meteorological visibility, km")
    range_km: float = Field(default=CHANNEL_DEFAULTS["range_km"], description="Transmission range, km")
    beta: float = Field(default=ATTENUATION_BETA, description="Visibility constant")
    lambda_ref_nm: float = Field(default=REFERENCE_WAVELENGTH_NM, description="Reference wavelength, nm")

    @field_validator("wavelength_nm", "visibility_km")
    @classmethod
    def _positive(cls, value: float, info) -> float:
        _require_finite(value, info.field_name)
        if value <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value

    @field_validator("range_km")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        _require_finite(value, "range_km")
        if value < 0:
            raise ValueError("range_km must be non-negative")
        return value

    @field_validator("beta")
    @classmethod
    def _fixed_beta(cls, value: float) -> float:
        if value != ATTENUATION_BETA:
            raise ValueError(f"beta is fixed at {ATTENUATION_BETA}")
        return value

    @field_validator("lambda_ref_nm")
    @classmethod
    def _fixed_reference(cls, value: float) -> float:
        if value != REFERENCE_WAVELENGTH_NM:
            raise ValueError(f"lambda_ref_nm is fixed at {REFERENCE_WAVELENGTH_NM}")
        return value


class DiodeParams(FrozenModel):
    """Single-diode PV panel constants.

    ``area_factor`` maps received beam watts to cell irradiance (W/cm² per W);
    ``None`` until the panel has been calibrated against the MPP anchor.
    ``beam_frequency_hz`` is carried for reference only.
    """
    isc_ref: float = Field(default=DIODE_DEFAULTS["isc_ref"], description="Short-circuit current, A")
    voc_ref: float = Field(default=DIODE_DEFAULTS["voc_ref"], description="Cell open-circuit voltage, V")
    ir0: float = Field(default=DIODE_DEFAULTS["ir0"], description="Measurement irradiance, W/cm²")
    ideality: float = Field(default=DIODE_DEFAULTS["ideality"], description="Diode quality factor")
    n_series: int = Field(default=DIODE_DEFAULTS["n_series"], ge=1, description="Cells in series")
    t_ref: float = Field(default=DIODE_DEFAULTS["t_ref"], description="Measurement temperature, °C")
    bandgap_ev: float = Field(default=DIODE_DEFAULTS["bandgap_ev"], description="Bandgap, eV")
    xti: float = Field(default=DIODE_DEFAULTS["xti"], description="Saturation current temperature exponent")
    area_factor: Optional[float] = Field(default=DIODE_DEFAULTS["area_factor"], description="Irradiance per received watt, cm⁻²")
    beam_frequency_hz: float = Field(default=DIODE_DEFAULTS["beam_frequency_hz"], description="Beam frequency, Hz (unused)")

    @field_validator("isc_ref", "voc_ref", "ir0", "ideality", "bandgap_ev", "xti", "beam_frequency_hz")
    @classmethod
    def _positive(cls, value: float, info) -> float:
        _require_finite(value, info.field_name)
        if value <= 0:
            raise ValueError(f"{info.field_name} must be positive")
        return value

    @field_validator("t_ref")
    @classmethod
    def _above_absolute_zero(cls, value: float) -> float:
        if value <= ABSOLUTE_ZERO_C:
            raise ValueError("t_ref must be above absolute zero")
        return value

    @field_validator("area_factor")
    @classmethod
    def _positive_area(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not (math.isfinite(value) and value > 0):
            raise ValueError("area_factor must be positive")
        return value


def _default_mpp_table() -> dict[float, MppLinearCoeffs]:
    return {temp: MppLinearCoeffs(a2=a2, b2=b2) for temp, (a2, b2) in MPP_LINEAR_TABLE.items()}


class LinkConfig(FrozenModel):
    """Full end-to-end parameter bundle; defaults are the measured transmitter and panel tables."""
    sqrt_coeffs: SqrtFitCoeffs = Field(default_factory=SqrtFitCoeffs)
    mpp_coeffs_by_temp: dict[float, MppLinearCoeffs] = Field(default_factory=_default_mpp_table)
    eta_dc: float = Field(default=ETA_DC, description="DC-DC conversion efficiency")
    eta_ce: float = Field(default=ETA_CE, description="Battery charging efficiency")
    channel: ChannelSpec = Field(default_factory=ChannelSpec)
    pv: DiodeParams = Field(default_factory=DiodeParams)

    @field_validator("eta_dc", "eta_ce")
    @classmethod
    def _unit_interval(cls, value: float, info) -> float:
        if not (math.isfinite(value) and 0.0 < value <= 1.0):
            raise ValueError(f"{info.field_name} out of (0,1]")
        return value

    @field_validator("mpp_coeffs_by_temp")
    @classmethod
    def _non_empty_table(cls, value: dict[float, MppLinearCoeffs]) -> dict[float, MppLinearCoeffs]:
        if not value:
            raise ValueError("mpp_coeffs_by_temp must not be empty")
        for temp in value:
            if not math.isfinite(temp) or temp < ABSOLUTE_ZERO_C:
                raise ValueError(f"temperature key {temp} below absolute zero")
        return dict(sorted(value.items()))


class Violation(FrozenModel):
    """One failed invariant, reported as data."""
    field: str
    message: str


# ==============================================================================
# Electro-beam conversion
# ==============================================================================

class MeasuredSample(FrozenModel):
    """A measured (source power, transmitter beam power) pair."""
    source_power: PowerW
    beam_power: PowerW


class LinearFitCoeffs(FrozenModel):
    """Straight-line electro-beam model P_bt = slope*P_s + intercept."""
    slope: float
    intercept: float

    @field_validator("slope", "intercept")
    @classmethod
    def _finite(cls, value: float, info) -> float:
        return _require_finite(value, info.field_name)


class EfficiencyPeak(FrozenModel):
    """Location and height of the electro-beam efficiency maximum."""
    ps_star: PowerW
    eta_star: Efficiency


class FitComparison(FrozenModel):
    """Square-root and linear fits of the same measured data."""
    sqrt_coeffs: SqrtFitCoeffs
    sqrt_mse: float
    sqrt_errors: list[float]
    linear_coeffs: LinearFitCoeffs
    linear_mse: float
    linear_errors: list[float]


# ==============================================================================
# PV receiver
# ==============================================================================

class MppResult(FrozenModel):
    """Operating point of the panel at its maximum power."""
    voltage: float = Field(..., ge=0.0, description="Panel voltage, V")
    current: float = Field(..., ge=0.0, description="Panel current, A")
    power: float = Field(..., ge=0.0, description="Panel power, W")

    @model_validator(mode="after")
    def _power_matches(self) -> "MppResult":
        expected = self.voltage * self.current
        if not math.isclose(self.power, expected, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError(f"power {self.power} != voltage*current {expected}")
        return self


class CalibrationTarget(FrozenModel):
    """Measured MPP used to pin the irradiance mapping of the panel."""
    pbr: float = Field(default=MPP_ANCHOR["pbr"], gt=0.0)
    temp: CelsiusTemp = MPP_ANCHOR["temp"]
    power: float = Field(default=MPP_ANCHOR["power"], gt=0.0)
    voltage: float = Field(default=MPP_ANCHOR["voltage"], gt=0.0)
    current: float = Field(default=MPP_ANCHOR["current"], gt=0.0)


class IvPoint(FrozenModel):
    """One sample of the I-V / P-V curve."""
    voltage: float
    current: float
    power: float


# ==============================================================================
# End-to-end
# ==============================================================================

class OperatingPoint(FrozenModel):
    """Source power, channel efficiency and PV temperature of one link state."""
    source_power: PowerW
    eta_bt: float = Field(..., description="Beam transmission efficiency in (0, 1]")
    temp: CelsiusTemp

    @field_validator("eta_bt")
    @classmethod
    def _channel_efficiency(cls, value: float) -> float:
        if not (math.isfinite(value) and 0.0 < value <= 1.0):
            raise ValueError("eta_bt out of (0,1]")
        return value


class FeasibleInterval(FrozenModel):
    """Open interval of source power over which the link delivers power."""
    lower: float
    upper: float = math.inf

    def __str__(self) -> str:
        return f"({self.lower:.6g}, {self.upper:.6g}) W"


class OptimumResult(FrozenModel):
    """Efficiency-optimal source power for one (eta_bt, T) pair."""
    ps_star: PowerW
    eta_opt: Efficiency
    pm_star: PowerW
    pb_star: PowerW
    xi: float = Field(..., description="Root of g in t = sqrt(b1 + P_s)")


class StageEfficiencies(FrozenModel):
    """Per-stage factors whose product is the end-to-end efficiency."""
    eta_eb: Efficiency
    eta_bt: Efficiency
    eta_bem: Efficiency
    eta_dc: Efficiency
    eta_ce: Efficiency
    eta_om: Efficiency


class SweepSpec(FrozenModel):
    """Axes of an end-to-end sweep; exactly one channel axis is given."""
    source_powers: list[float] = Field(..., min_length=1)
    temps: list[float] = Field(..., min_length=1)
    eta_bts: Optional[list[float]] = Field(default=None, min_length=1)
    ranges_km: Optional[list[float]] = Field(default=None, min_length=1)

    @field_validator("source_powers")
    @classmethod
    def _positive_powers(cls, value: list[float]) -> list[float]:
        if any(not (math.isfinite(p) and p > 0) for p in value):
            raise ValueError("source powers must be positive")
        return value

    @field_validator("eta_bts")
    @classmethod
    def _efficiencies(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and any(not (0.0 < e <= 1.0) for e in value):
            raise ValueError("eta_bt values must lie in (0,1]")
        return value

    @field_validator("ranges_km")
    @classmethod
    def _ranges(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and any(not (math.isfinite(r) and r >= 0) for r in value):
            raise ValueError("ranges must be non-negative")
        return value

    @model_validator(mode="after")
    def _one_channel_axis(self) -> "SweepSpec":
        if (self.eta_bts is None) == (self.ranges_km is None):
            raise ValueError("give exactly one of eta_bts or ranges_km")
        return self


class SweepRow(FrozenModel):
    """One row of sweep output; eta_om is NaN where the link delivers no power."""
    ps_w: float
    eta_bt: float
    temp_c: float
    pm_w: float
    pb_w: float
    eta_om: float
    ps_star_w: float
    eta_opt: float


# ==============================================================================
# CLI artifacts
# ==============================================================================

class RunManifest(FrozenModel):
    """Sidecar record written next to every CLI output file."""
    command: str
    config: LinkConfig
    inputs: list[str] = Field(default_factory=list)
    outputs: list[str] = Field(default_factory=list)
    tool_version: str
    timestamp: str
