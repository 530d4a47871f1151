"""Default parameter tables and runtime settings for the ARBC link model"""
import os

# Electricity-to-beam square-root fit (1550 nm transmitter)
SQRT_FIT_DEFAULTS = {
    "a1": 3.331,
    "b1": 10.2,
    "c1": -11.99,
}

# Beam transmission constants
ATTENUATION_BETA = 3.91
REFERENCE_WAVELENGTH_NM = 550.0
DEFAULT_WAVELENGTH_NM = 1550.0
MAX_VISIBILITY_KM = 50.0
HIGH_VISIBILITY_MIN_KM = 21.0
AVERAGE_VISIBILITY_MIN_KM = 6.0

SCENARIO_VISIBILITY_KM = {
    "high": 30.0,
    "average": 11.0,
    "low": 4.0,
}

CHANNEL_DEFAULTS = {
    "wavelength_nm": DEFAULT_WAVELENGTH_NM,
    "visibility_km": SCENARIO_VISIBILITY_KM["high"],
    "range_km": 0.0,
}

# Maximum-power-point linear fit per PV-cell temperature (°C -> (a2, b2))
MPP_LINEAR_TABLE = {
    0.0: (0.5434, -0.2761),
    25.0: (0.4979, -0.2989),
    50.0: (0.4525, -0.3209),
}

# DC-DC and battery charging efficiencies
ETA_DC = 0.90
ETA_CE = 0.99

# GaSb PV panel, single-diode constants.
# bandgap_ev is 1.11 eV, not the GaSb gap (0.726 eV); the 25 °C MPP voltage depends on it.
DIODE_DEFAULTS = {
    "isc_ref": 0.305,
    "voc_ref": 0.464,
    "ir0": 2.7187,
    "ideality": 1.1,
    "n_series": 72,
    "t_ref": 120.0,
    "bandgap_ev": 1.11,
    "xti": 3.0,
    "area_factor": None,
    "beam_frequency_hz": 1.9355e14,
}

# Measured MPP at P_br = 25 W, T = 25 °C
MPP_ANCHOR = {
    "pbr": 25.0,
    "temp": 25.0,
    "power": 12.19,
    "voltage": 40.11,
    "current": 0.3039,
}

# Numerical search settings
GOLDEN_MAX_ITER = 200
MPP_VOLTAGE_TOL = 1e-6
FIT_B1_BRACKET = (1e-3, 1e3)
FIT_B1_TOL = 1e-9
FIT_B1_GRID_POINTS = 121
CALIBRATION_BRACKET = (1e-4, 1e2)
CALIBRATION_POWER_TOL = 1e-3
OPTIMUM_CHECK_STEP = 1e-3

# Sweep defaults
SWEEP_PS_MAX_W = 200.0
DEFAULT_PS_AXIS = "5:100:0.5"

# Runtime overrides
# Config file path variable, resolved per invocation
CONFIG_ENV_VAR = "ARBC_CONFIG"
LOG_LEVEL = os.getenv("ARBC_LOG_LEVEL", "INFO").upper()
# Sweep worker count variable, validated per invocation
WORKERS_ENV_VAR = "ARBC_WORKERS"
DEFAULT_WORKERS = 1
