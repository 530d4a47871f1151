"""Photovoltaic receiver: ideal single-diode panel and its maximum power point.

The panel is a series string of identical cells with no series or shunt
resistance:

    I = I_ph - I_0(T) * (exp(V / (N * n * V_t(T))) - 1)

I_ph scales with received beam power through ``area_factor``; I_0 is
calibrated from the data-sheet (Isc, Voc) pair at the measurement
temperature and translated with the standard diode temperature law.
"""
import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np
from pydantic import ValidationError
from scipy import constants
from scipy.optimize import bisect

from .config import (
    CALIBRATION_BRACKET,
    CALIBRATION_POWER_TOL,
    GOLDEN_MAX_ITER,
    MPP_VOLTAGE_TOL,
)
from .core import CalibrationError, DomainError, FitError, ModelError
from .models import (
    CalibrationTarget,
    DiodeParams,
    IvPoint,
    MppLinearCoeffs,
    MppResult,
)
from .numerics import golden_section_max

logger = logging.getLogger(__name__)

KELVIN_OFFSET = constants.zero_Celsius
BOLTZMANN_EV = constants.physical_constants["Boltzmann constant in eV/K"][0]


# ==============================================================================
# Diode physics
# ==============================================================================

def thermal_voltage(temp_c: float) -> float:
    """k*T/q in volts."""
    return BOLTZMANN_EV * (temp_c + KELVIN_OFFSET)


def saturation_current(temp_c: float, params: DiodeParams) -> float:
    """Cell dark saturation current at ``temp_c``."""
    t_ref_k = params.t_ref + KELVIN_OFFSET
    t_k = temp_c + KELVIN_OFFSET
    if t_k <= 0:
        raise DomainError(f"temperature {temp_c} °C is not above absolute zero")

    i0_ref = params.isc_ref / math.expm1(params.voc_ref / (params.ideality * thermal_voltage(params.t_ref)))
    gap_term = params.bandgap_ev / (params.ideality * BOLTZMANN_EV) * (1.0 / t_ref_k - 1.0 / t_k)
    return i0_ref * (t_k / t_ref_k) ** params.xti * math.exp(gap_term)


def _require_calibrated(params: DiodeParams) -> float:
    if params.area_factor is None:
        raise ModelError("panel is not calibrated: area_factor is unset (run calibrate_area_factor)")
    return params.area_factor


def photocurrent(pbr: float, params: DiodeParams) -> float:
    """Light-generated current for received beam power ``pbr``."""
    if not (math.isfinite(pbr) and pbr >= 0):
        raise DomainError(f"received beam power must be non-negative, got {pbr}")
    return params.isc_ref * (pbr * _require_calibrated(params)) / params.ir0


def _diode_scale(temp_c: float, params: DiodeParams) -> float:
    return params.n_series * params.ideality * thermal_voltage(temp_c)


def _string_current(v_panel: np.ndarray, pbr: float, temp_c: float, params: DiodeParams) -> np.ndarray:
    iph = photocurrent(pbr, params)
    if iph == 0:
        return np.zeros_like(v_panel)
    i0 = saturation_current(temp_c, params)
    with np.errstate(over="ignore"):
        current = iph - i0 * np.expm1(v_panel / _diode_scale(temp_c, params))
    return np.maximum(current, 0.0)


def cell_current(v_panel: float, pbr: float, temp_c: float, params: DiodeParams) -> float:
    """String current at panel voltage ``v_panel``; clamped to 0 beyond V_oc."""
    if not v_panel >= 0:
        raise DomainError(f"panel voltage must be non-negative, got {v_panel}")
    return float(_string_current(np.asarray(v_panel, dtype=float), pbr, temp_c, params))


def open_circuit_voltage(pbr: float, temp_c: float, params: DiodeParams) -> float:
    """Panel voltage at zero current."""
    if not pbr > 0:
        raise DomainError(f"open-circuit voltage needs positive beam power, got {pbr}")
    iph = photocurrent(pbr, params)
    return _diode_scale(temp_c, params) * math.log1p(iph / saturation_current(temp_c, params))


# ==============================================================================
# Maximum power point
# ==============================================================================

def mpp(pbr: float, temp_c: float, params: DiodeParams) -> MppResult:
    """Maximum power point by golden-section search over [0, V_oc].

    P(V) = V*I(V) is strictly concave for the ideal diode, so the search
    bracket holds a single maximum.
    """
    if not pbr > 0:
        raise DomainError(f"maximum power point needs positive beam power, got {pbr}")

    voc = open_circuit_voltage(pbr, temp_c, params)
    search = golden_section_max(
        lambda v: v * cell_current(v, pbr, temp_c, params),
        0.0,
        voc,
        tol=MPP_VOLTAGE_TOL,
        max_iter=GOLDEN_MAX_ITER,
    )
    if not search.converged:
        raise ModelError(f"MPP search did not converge within {search.iterations} iterations")

    voltage = search.x
    current = cell_current(voltage, pbr, temp_c, params)
    return MppResult(voltage=voltage, current=current, power=voltage * current)


def iv_curve(pbr: float, temp_c: float, params: DiodeParams, points: int = 200) -> list[IvPoint]:
    """I-V / P-V samples from short circuit to open circuit."""
    if points < 2:
        raise DomainError("an I-V curve needs at least 2 points")
    voltages = np.linspace(0.0, open_circuit_voltage(pbr, temp_c, params), points)
    currents = _string_current(voltages, pbr, temp_c, params)
    return [
        IvPoint(voltage=float(v), current=float(i), power=float(v * i))
        for v, i in zip(voltages, currents)
    ]


def calibrate_area_factor(params: DiodeParams, target: CalibrationTarget = CalibrationTarget()) -> DiodeParams:
    """Return params whose MPP at the target's (P_br, T) has the target power.

    Bisection on area_factor; any area_factor already present is ignored,
    so repeated calibration gives the same result.
    """
    lower, upper = CALIBRATION_BRACKET

    def power_gap(area_factor: float) -> float:
        trial = params.model_copy(update={"area_factor": area_factor})
        return mpp(target.pbr, target.temp, trial).power - target.power

    gap_lo, gap_hi = power_gap(lower), power_gap(upper)
    if gap_lo > 0 or gap_hi < 0:
        raise CalibrationError(f"target MPP power {target.power} W is not reachable", lower, upper)

    area_factor = bisect(power_gap, lower, upper, xtol=1e-12, maxiter=GOLDEN_MAX_ITER)
    if abs(power_gap(area_factor)) > CALIBRATION_POWER_TOL:
        raise CalibrationError(f"calibration stalled {power_gap(area_factor):.3g} W from target", lower, upper)

    calibrated = DiodeParams(**{**params.model_dump(), "area_factor": area_factor})
    logger.info(f"[PV] Calibrated area_factor={area_factor:.8g} cm^-2 against {target.power} W "
                f"at {target.pbr} W / {target.temp} °C")
    return calibrated


def ensure_calibrated(params: DiodeParams, target: CalibrationTarget = CalibrationTarget()) -> DiodeParams:
    """Calibrate only when area_factor is unset."""
    if params.area_factor is not None:
        return params
    return calibrate_area_factor(params, target)


# ==============================================================================
# Linear MPP approximation
# ==============================================================================

def mpp_sweep(pbr_list: Iterable[float], temp_c: float, params: DiodeParams) -> list[tuple[float, MppResult]]:
    """MPP for each received beam power."""
    return [(pbr, mpp(pbr, temp_c, params)) for pbr in pbr_list]


def fit_mpp_linear(sweep: Sequence[tuple[float, MppResult]]) -> MppLinearCoeffs:
    """Least-squares P_m = a2*P_br + b2 through sweep output."""
    pbr = np.array([p for p, _ in sweep], dtype=float)
    pm = np.array([result.power for _, result in sweep], dtype=float)
    if len(np.unique(pbr)) < 2:
        raise FitError("MPP linear fit needs at least 2 distinct beam powers")

    design = np.column_stack([pbr, np.ones_like(pbr)])
    (a2, b2), *_ = np.linalg.lstsq(design, pm, rcond=None)
    try:
        return MppLinearCoeffs(a2=float(a2), b2=float(b2))
    except ValidationError as e:
        raise FitError(f"fitted MPP line is not physical: {e.errors()[0]['msg']}") from e


def mpp_table(pbr_list: Sequence[float], temps: Iterable[float], params: DiodeParams) -> dict[float, MppLinearCoeffs]:
    """Per-temperature linear MPP coefficients derived from the diode model."""
    table = {}
    for temp in temps:
        table[float(temp)] = fit_mpp_linear(mpp_sweep(pbr_list, temp, params))
        logger.debug(f"[PV] {temp} °C -> {table[float(temp)]}")
    return table


def eta_bem(pbr: float, coeffs: MppLinearCoeffs) -> float:
    """Maximum beam-to-electricity efficiency a2 + b2/P_br."""
    zero_crossing = max(0.0, -coeffs.b2 / coeffs.a2)
    if not pbr > 0 or pbr < zero_crossing:
        raise DomainError(
            f"received beam power {pbr} W is below the positive-power region (>= {zero_crossing:.6g} W)"
        )
    return coeffs.a2 + coeffs.b2 / pbr
