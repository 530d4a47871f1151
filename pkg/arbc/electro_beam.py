"""Electricity-to-beam conversion at the transmitter.

Square-root model of transmitter beam power against electrical source
power, its conversion efficiency and the least-squares machinery that
produces the model from measured samples.
"""
import logging
import math
from collections.abc import Sequence
from typing import Union

import numpy as np
from pydantic import ValidationError

from .config import FIT_B1_BRACKET, FIT_B1_GRID_POINTS, FIT_B1_TOL, GOLDEN_MAX_ITER
from .core import DomainError, FitError, ModelError
from .models import (
    EfficiencyPeak,
    FitComparison,
    LinearFitCoeffs,
    MeasuredSample,
    SqrtFitCoeffs,
)
from .numerics import golden_section_min

logger = logging.getLogger(__name__)

BeamModel = Union[SqrtFitCoeffs, LinearFitCoeffs]


def _check_source_power(ps: float) -> None:
    if not (math.isfinite(ps) and ps >= 0):
        raise DomainError(f"source power must be finite and non-negative, got {ps}")


# ==============================================================================
# Square-root model
# ==============================================================================

def lasing_threshold(coeffs: SqrtFitCoeffs) -> float:
    """Source power below which no beam is generated, clamped at 0 W."""
    if coeffs.c1 >= 0:
        return 0.0
    return max(0.0, (coeffs.c1 / coeffs.a1) ** 2 - coeffs.b1)


def beam_power(ps: float, coeffs: SqrtFitCoeffs) -> float:
    """Transmitter beam power at source power ``ps``; exactly 0 up to the threshold."""
    _check_source_power(ps)
    if coeffs.c1 < 0 and ps <= lasing_threshold(coeffs):
        return 0.0
    return max(0.0, coeffs.a1 * math.sqrt(coeffs.b1 + ps) + coeffs.c1)


def beam_curve(ps_values: Union[Sequence[float], np.ndarray], coeffs: SqrtFitCoeffs) -> np.ndarray:
    """Vectorised beam_power."""
    ps = np.asarray(ps_values, dtype=float)
    if np.any(~np.isfinite(ps)) or np.any(ps < 0):
        raise DomainError("source powers must be finite and non-negative")
    raw = coeffs.a1 * np.sqrt(coeffs.b1 + ps) + coeffs.c1
    lasing = ps > lasing_threshold(coeffs) if coeffs.c1 < 0 else np.ones_like(ps, dtype=bool)
    return np.where(lasing, np.maximum(raw, 0.0), 0.0)


def eta_eb(ps: float, coeffs: SqrtFitCoeffs) -> float:
    """Electricity-to-beam conversion efficiency P_bt / P_s.

    Coefficient sets that put the efficiency above 1 raise ModelError.
    """
    _check_source_power(ps)
    if ps == 0:
        raise DomainError("conversion efficiency is undefined at zero source power")
    efficiency = beam_power(ps, coeffs) / ps
    if efficiency > 1.0:
        raise ModelError(f"coefficients give conversion efficiency above 1 ({efficiency:.6g} at {ps:.6g} W)")
    return efficiency


def efficiency_curve(ps_values: Union[Sequence[float], np.ndarray], coeffs: SqrtFitCoeffs) -> np.ndarray:
    """Vectorised eta_eb over strictly positive source powers."""
    ps = np.asarray(ps_values, dtype=float)
    if np.any(ps <= 0):
        raise DomainError("conversion efficiency needs positive source powers")
    curve = beam_curve(ps, coeffs) / ps
    if np.any(curve > 1.0):
        raise ModelError("coefficients give conversion efficiency above 1")
    return curve


def peak_eta_eb(coeffs: SqrtFitCoeffs) -> EfficiencyPeak:
    """Closed-form maximum of the conversion efficiency.

    With t = sqrt(b1 + P_s) the stationarity condition is
    a1*t^2 + 2*c1*t + a1*b1 = 0; the larger root, when it exceeds sqrt(b1),
    is the maximum.
    """
    a1, b1, c1 = coeffs.a1, coeffs.b1, coeffs.c1
    disc = c1 * c1 - a1 * a1 * b1
    if c1 >= 0 or disc <= 0:
        raise ModelError("no interior peak: stationarity quadratic has no root above sqrt(b1)")

    t = (-c1 + math.sqrt(disc)) / a1
    if t <= math.sqrt(b1):
        raise ModelError("no interior peak: stationarity quadratic has no root above sqrt(b1)")

    ps_star = t * t - b1
    eta_star = eta_eb(ps_star, coeffs)
    for neighbour in (ps_star * (1 - 1e-4), ps_star * (1 + 1e-4)):
        if neighbour > 0 and eta_eb(neighbour, coeffs) > eta_star:
            raise ModelError(f"stationary point at {ps_star:.6g} W is not a maximum")

    logger.debug(f"[ElectroBeam] Efficiency peak {eta_star:.4%} at {ps_star:.4f} W")
    return EfficiencyPeak(ps_star=ps_star, eta_star=eta_star)


# ==============================================================================
# Fitting
# ==============================================================================

def _as_arrays(samples: Sequence[MeasuredSample]) -> tuple[np.ndarray, np.ndarray]:
    ps = np.array([s.source_power for s in samples], dtype=float)
    pbt = np.array([s.beam_power for s in samples], dtype=float)
    return ps, pbt


def predict(model: BeamModel, ps_values: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """Beam power predicted by either fitted model."""
    if isinstance(model, SqrtFitCoeffs):
        return beam_curve(ps_values, model)
    ps = np.asarray(ps_values, dtype=float)
    return model.slope * ps + model.intercept


def squared_errors(samples: Sequence[MeasuredSample], model: BeamModel) -> list[float]:
    """Per-sample (predicted - measured)^2; their mean is the fit's MSE."""
    if not samples:
        raise DomainError("squared errors need at least one sample")
    ps, pbt = _as_arrays(samples)
    residuals = predict(model, ps) - pbt
    return (residuals * residuals).tolist()


def _mse(samples: Sequence[MeasuredSample], model: BeamModel) -> float:
    return float(np.mean(squared_errors(samples, model)))


def _linear_subproblem(ps: np.ndarray, pbt: np.ndarray, b1: float) -> tuple[float, float, float]:
    """Least-squares (a1, c1) for fixed b1; returns (a1, c1, sse)."""
    design = np.column_stack([np.sqrt(b1 + ps), np.ones_like(ps)])
    (a1, c1), *_ = np.linalg.lstsq(design, pbt, rcond=None)
    residuals = design @ np.array([a1, c1]) - pbt
    return float(a1), float(c1), float(residuals @ residuals)


def fit_sqrt(samples: Sequence[MeasuredSample]) -> tuple[SqrtFitCoeffs, float]:
    """Least-squares square-root model of measured samples.

    For fixed b1 the model is linear in (a1, c1); b1 is located by a log-grid
    scan over the bracket followed by golden-section refinement.
    """
    if len(samples) < 4:
        raise FitError(f"square-root fit is underdetermined with {len(samples)} samples (need at least 4)")
    ps, pbt = _as_arrays(samples)
    if len(np.unique(ps)) < 3:
        raise FitError("square-root fit is underdetermined: need at least 3 distinct source powers")
    if np.any(pbt <= 0):
        raise FitError("square-root fit needs samples above the lasing threshold (beam power > 0)")

    def profile(b1: float) -> float:
        return _linear_subproblem(ps, pbt, b1)[2]

    lo, hi = FIT_B1_BRACKET
    grid = np.geomspace(lo, hi, FIT_B1_GRID_POINTS)
    best = int(np.argmin([profile(b) for b in grid]))
    bracket_lo = grid[max(best - 1, 0)]
    bracket_hi = grid[min(best + 1, len(grid) - 1)]

    search = golden_section_min(profile, bracket_lo, bracket_hi, tol=FIT_B1_TOL, max_iter=GOLDEN_MAX_ITER)
    if not search.converged:
        raise FitError(
            f"square-root fit did not converge in {search.iterations} iterations",
            best_residual=search.value / len(samples),
        )

    a1, c1, sse = _linear_subproblem(ps, pbt, search.x)
    try:
        coeffs = SqrtFitCoeffs(a1=a1, b1=search.x, c1=c1)
    except ValidationError as e:
        raise FitError(f"fitted coefficients are not physical: {e.errors()[0]['msg']}",
                       best_residual=sse / len(samples)) from e

    mse = _mse(samples, coeffs)
    logger.info(f"[Fit] sqrt a1={coeffs.a1:.6g} b1={coeffs.b1:.6g} c1={coeffs.c1:.6g} mse={mse:.6g}")
    return coeffs, mse


def fit_linear(samples: Sequence[MeasuredSample]) -> tuple[LinearFitCoeffs, float]:
    """Ordinary least-squares straight line through the samples."""
    ps, pbt = _as_arrays(samples)
    if len(np.unique(ps)) < 2:
        raise FitError("linear fit needs at least 2 distinct source powers")

    design = np.column_stack([ps, np.ones_like(ps)])
    (slope, intercept), *_ = np.linalg.lstsq(design, pbt, rcond=None)
    coeffs = LinearFitCoeffs(slope=float(slope), intercept=float(intercept))

    mse = _mse(samples, coeffs)
    logger.info(f"[Fit] linear slope={coeffs.slope:.6g} intercept={coeffs.intercept:.6g} mse={mse:.6g}")
    return coeffs, mse


def fit_report(samples: Sequence[MeasuredSample]) -> FitComparison:
    """Fit both models to the same samples for side-by-side comparison."""
    sqrt_coeffs, sqrt_mse = fit_sqrt(samples)
    linear_coeffs, linear_mse = fit_linear(samples)
    return FitComparison(
        sqrt_coeffs=sqrt_coeffs,
        sqrt_mse=sqrt_mse,
        sqrt_errors=squared_errors(samples, sqrt_coeffs),
        linear_coeffs=linear_coeffs,
        linear_mse=linear_mse,
        linear_errors=squared_errors(samples, linear_coeffs),
    )
