"""ARBC link model.

End-to-end power model of an adaptive resonant beam charging link, from
electrical source power at the transmitter to battery charging power at
the receiver.

Architecture:
- electro_beam: square-root transmitter model, its efficiency peak and fitting
- beam_channel: atmospheric attenuation over the free-space path
- pv_receiver: single-diode PV panel, MPP search and the linear MPP model
- end_to_end: composed efficiency, closed-form optimum and sweeps
- config_file / csv_io / main: key-value config, CSV artifacts and the CLI

Run with:
    arbc optimize --eta-bt 1.0 --temp 25
"""
__version__ = "0.1.0"

from .beam_channel import attenuation_per_km, chi, eta_bt, max_range, scenario_spec, transmittance_curve
from .config_file import load_config, parse_config_text, write_config
from .core import (
    ArbcError,
    CalibrationError,
    ConfigError,
    DomainError,
    FitError,
    InfeasibleError,
    InputFormatError,
    ModelError,
    RangeError,
    build_config,
    mpp_coeffs_at,
    validate,
)
from .electro_beam import (
    beam_curve,
    beam_power,
    efficiency_curve,
    eta_eb,
    fit_linear,
    fit_report,
    fit_sqrt,
    lasing_threshold,
    peak_eta_eb,
    squared_errors,
)
from .end_to_end import (
    battery_power,
    battery_power_at,
    eta_bt_for_range,
    eta_om,
    eta_om_curve,
    feasible_source_power,
    g_quadratic,
    optimal_source_power,
    output_power_pm,
    stage_efficiencies,
    sweep,
)
from .models import (
    CalibrationTarget,
    ChannelScenario,
    ChannelSpec,
    DiodeParams,
    LinkConfig,
    MeasuredSample,
    MppLinearCoeffs,
    MppResult,
    OperatingPoint,
    OptimumResult,
    RunManifest,
    SqrtFitCoeffs,
    SweepSpec,
)
from .pv_receiver import calibrate_area_factor, cell_current, eta_bem, iv_curve, mpp, mpp_table

__all__ = [
    "__version__",
    # Electro-beam conversion
    "lasing_threshold",
    "beam_power",
    "beam_curve",
    "eta_eb",
    "efficiency_curve",
    "peak_eta_eb",
    "fit_sqrt",
    "fit_linear",
    "fit_report",
    "squared_errors",
    # Beam channel
    "chi",
    "attenuation_per_km",
    "eta_bt",
    "max_range",
    "transmittance_curve",
    "scenario_spec",
    # PV receiver
    "cell_current",
    "mpp",
    "iv_curve",
    "calibrate_area_factor",
    "mpp_table",
    "eta_bem",
    # End-to-end
    "output_power_pm",
    "battery_power",
    "battery_power_at",
    "feasible_source_power",
    "eta_om",
    "eta_om_curve",
    "stage_efficiencies",
    "g_quadratic",
    "optimal_source_power",
    "eta_bt_for_range",
    "sweep",
    # Configuration
    "validate",
    "build_config",
    "mpp_coeffs_at",
    "load_config",
    "parse_config_text",
    "write_config",
    # Errors
    "ArbcError",
    "DomainError",
    "RangeError",
    "InfeasibleError",
    "ConfigError",
    "InputFormatError",
    "FitError",
    "CalibrationError",
    "ModelError",
    # Models
    "SqrtFitCoeffs",
    "MppLinearCoeffs",
    "ChannelScenario",
    "ChannelSpec",
    "DiodeParams",
    "LinkConfig",
    "MeasuredSample",
    "MppResult",
    "CalibrationTarget",
    "OperatingPoint",
    "OptimumResult",
    "SweepSpec",
    "RunManifest",
]
