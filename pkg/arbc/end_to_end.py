"""End-to-end link: source power to battery charging power.

Composes the electro-beam, channel and PV stages:

    P_m  = a1*a2*eta_bt*sqrt(b1 + P_s) + a2*eta_bt*c1 + b2
    P_b  = P_m * eta_dc * eta_ce
    eta_om = P_b / P_s

With t = sqrt(b1 + P_s) the sign of d(eta_om)/dP_s is the sign of

    g(t) = -(a1/2)*t^2 - (c1 + b2/(a2*eta_bt))*t - a1*b1/2

whose single root above sqrt(b1) is the efficiency-optimal source power.
"""
import itertools
import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Union

import numpy as np

from .beam_channel import eta_bt as channel_eta_bt
from .config import OPTIMUM_CHECK_STEP
from .core import ArbcError, ConfigError, DomainError, InfeasibleError, ModelError, mpp_coeffs_at, supported_temperatures
from .electro_beam import beam_power, eta_eb, lasing_threshold
from .models import (
    FeasibleInterval,
    LinkConfig,
    OperatingPoint,
    OptimumResult,
    StageEfficiencies,
    SweepRow,
    SweepSpec,
)
from .pv_receiver import eta_bem

logger = logging.getLogger(__name__)


def _check_eta_bt(eta_bt: float) -> None:
    if not (0.0 < eta_bt <= 1.0):
        raise DomainError(f"beam transmission efficiency must lie in (0, 1], got {eta_bt}")


def eta_bt_for_range(range_km: float, config: LinkConfig) -> float:
    """Channel efficiency at ``range_km`` using the configured wavelength and visibility."""
    return channel_eta_bt(config.channel.model_copy(update={"range_km": range_km}))


# ==============================================================================
# Power relation
# ==============================================================================

def output_power_pm(point: OperatingPoint, config: LinkConfig) -> float:
    """PV output power at the MPP; 0 below the lasing threshold or where b2 dominates."""
    sqrt_coeffs = config.sqrt_coeffs
    if beam_power(point.source_power, sqrt_coeffs) == 0:
        return 0.0

    mpp_coeffs = mpp_coeffs_at(config, point.temp)
    a1, b1, c1 = sqrt_coeffs.a1, sqrt_coeffs.b1, sqrt_coeffs.c1
    a2, b2 = mpp_coeffs.a2, mpp_coeffs.b2
    pm = a1 * a2 * point.eta_bt * math.sqrt(b1 + point.source_power) + a2 * point.eta_bt * c1 + b2
    return max(0.0, pm)


def battery_power(pm: float, config: LinkConfig) -> float:
    """Battery charging power after DC-DC conversion and charging losses."""
    if not pm >= 0:
        raise DomainError(f"PV output power must be non-negative, got {pm}")
    return pm * config.eta_dc * config.eta_ce


def battery_power_at(point: OperatingPoint, config: LinkConfig) -> float:
    """P_b at an operating point."""
    return battery_power(output_power_pm(point, config), config)


def feasible_source_power(eta_bt: float, temp: float, config: LinkConfig) -> FeasibleInterval:
    """Source powers for which the link delivers positive power."""
    _check_eta_bt(eta_bt)
    sqrt_coeffs = config.sqrt_coeffs
    mpp_coeffs = mpp_coeffs_at(config, temp)

    lower = lasing_threshold(sqrt_coeffs)
    # P_m > 0  <=>  a1 * t > -b2/(a2*eta_bt) - c1
    knee = -mpp_coeffs.b2 / (mpp_coeffs.a2 * eta_bt) - sqrt_coeffs.c1
    if knee > 0:
        lower = max(lower, (knee / sqrt_coeffs.a1) ** 2 - sqrt_coeffs.b1)
    return FeasibleInterval(lower=max(lower, 0.0))


# ==============================================================================
# Efficiency
# ==============================================================================

def _require_feasible(point: OperatingPoint, config: LinkConfig) -> None:
    interval = feasible_source_power(point.eta_bt, point.temp, config)
    if point.source_power <= interval.lower:
        raise InfeasibleError(
            f"source power {point.source_power} W delivers no power at eta_bt={point.eta_bt}, T={point.temp} °C",
            interval,
        )


def eta_om(point: OperatingPoint, config: LinkConfig) -> float:
    """End-to-end maximum power transmission efficiency P_b / P_s."""
    _require_feasible(point, config)
    sqrt_coeffs = config.sqrt_coeffs
    mpp_coeffs = mpp_coeffs_at(config, point.temp)
    a1, b1, c1 = sqrt_coeffs.a1, sqrt_coeffs.b1, sqrt_coeffs.c1
    a2, b2 = mpp_coeffs.a2, mpp_coeffs.b2
    ps, eta = point.source_power, point.eta_bt

    numerator = a1 * a2 * eta * math.sqrt(b1 + ps) + (a2 * c1 * eta + b2)
    return numerator / ps * config.eta_dc * config.eta_ce


def eta_om_curve(
    ps_values: Union[Sequence[float], np.ndarray],
    eta_bt: float,
    temp: float,
    config: LinkConfig,
) -> np.ndarray:
    """Vectorised eta_om; NaN outside the feasible source-power interval."""
    ps = np.asarray(ps_values, dtype=float)
    interval = feasible_source_power(eta_bt, temp, config)
    sqrt_coeffs = config.sqrt_coeffs
    mpp_coeffs = mpp_coeffs_at(config, temp)
    a1, b1, c1 = sqrt_coeffs.a1, sqrt_coeffs.b1, sqrt_coeffs.c1
    a2, b2 = mpp_coeffs.a2, mpp_coeffs.b2

    feasible = ps > interval.lower
    safe_ps = np.where(feasible, ps, 1.0)
    numerator = a1 * a2 * eta_bt * np.sqrt(b1 + safe_ps) + (a2 * c1 * eta_bt + b2)
    return np.where(feasible, numerator / safe_ps * config.eta_dc * config.eta_ce, np.nan)


def stage_efficiencies(point: OperatingPoint, config: LinkConfig) -> StageEfficiencies:
    """eta_om factorised into its stage efficiencies."""
    _require_feasible(point, config)
    received = point.eta_bt * beam_power(point.source_power, config.sqrt_coeffs)
    eb = eta_eb(point.source_power, config.sqrt_coeffs)
    bem = eta_bem(received, mpp_coeffs_at(config, point.temp))
    return StageEfficiencies(
        eta_eb=eb,
        eta_bt=point.eta_bt,
        eta_bem=bem,
        eta_dc=config.eta_dc,
        eta_ce=config.eta_ce,
        eta_om=eb * point.eta_bt * bem * config.eta_dc * config.eta_ce,
    )


# ==============================================================================
# Optimum
# ==============================================================================

def g_quadratic(t: float, eta_bt: float, temp: float, config: LinkConfig) -> float:
    """Sign function of d(eta_om)/dP_s in t = sqrt(b1 + P_s)."""
    _check_eta_bt(eta_bt)
    sqrt_coeffs = config.sqrt_coeffs
    mpp_coeffs = mpp_coeffs_at(config, temp)
    a1, b1, c1 = sqrt_coeffs.a1, sqrt_coeffs.b1, sqrt_coeffs.c1
    linear = c1 + mpp_coeffs.b2 / (mpp_coeffs.a2 * eta_bt)
    return -(a1 / 2.0) * t * t - linear * t - (a1 * b1) / 2.0


def optimal_source_power(eta_bt: float, temp: float, config: LinkConfig) -> OptimumResult:
    """Closed-form source power maximising eta_om.

    The roots of g multiply to b1, so when real and distinct exactly one of
    them exceeds sqrt(b1).
    """
    _check_eta_bt(eta_bt)
    sqrt_coeffs = config.sqrt_coeffs
    mpp_coeffs = mpp_coeffs_at(config, temp)
    a1, b1, c1 = sqrt_coeffs.a1, sqrt_coeffs.b1, sqrt_coeffs.c1
    linear = c1 + mpp_coeffs.b2 / (mpp_coeffs.a2 * eta_bt)

    disc = linear * linear - a1 * a1 * b1
    if disc <= 0:
        raise ModelError(f"g has no real root above sqrt(b1) at eta_bt={eta_bt}, T={temp} °C")
    xi = (-linear + math.sqrt(disc)) / a1
    if xi <= math.sqrt(b1):
        raise ModelError(f"g has no root above sqrt(b1) at eta_bt={eta_bt}, T={temp} °C")

    ps_star = xi * xi - b1
    point = OperatingPoint(source_power=ps_star, eta_bt=eta_bt, temp=temp)
    eta_opt = eta_om(point, config)
    if eta_opt > 1.0:
        raise ModelError(f"coefficients give conversion efficiency above 1 ({eta_opt:.6g} at {ps_star:.6g} W)")
    for factor in (1.0 - OPTIMUM_CHECK_STEP, 1.0 + OPTIMUM_CHECK_STEP):
        neighbour = point.model_copy(update={"source_power": ps_star * factor})
        if eta_om(neighbour, config) >= eta_opt:
            raise ModelError(f"stationary point {ps_star:.6g} W is not a strict maximum")

    pm_star = output_power_pm(point, config)
    result = OptimumResult(
        ps_star=ps_star,
        eta_opt=eta_opt,
        pm_star=pm_star,
        pb_star=battery_power(pm_star, config),
        xi=xi,
    )
    logger.debug(f"[Optimum] eta_bt={eta_bt} T={temp} -> P_s*={ps_star:.4f} W eta_opt={eta_opt:.4%}")
    return result


# ==============================================================================
# Sweeps
# ==============================================================================

def _check_axes(spec: SweepSpec, config: LinkConfig) -> None:
    lo, hi = supported_temperatures(config)
    bad = [t for t in spec.temps if not lo <= t <= hi]
    if bad:
        raise ConfigError(f"temperature axis values {bad} outside supported interval [{lo}, {hi}] °C")


def _sweep_block(eta_bt: float, temp: float, source_powers: np.ndarray, config: LinkConfig) -> list[SweepRow]:
    try:
        optimum = optimal_source_power(eta_bt, temp, config)
        ps_star, eta_opt = optimum.ps_star, optimum.eta_opt
    except ArbcError as e:
        logger.warning(f"[Sweep] No optimum at eta_bt={eta_bt}, T={temp} °C: {e}")
        ps_star, eta_opt = math.nan, math.nan

    efficiencies = eta_om_curve(source_powers, eta_bt, temp, config)
    rows = []
    for ps, efficiency in zip(source_powers, efficiencies):
        point = OperatingPoint(source_power=float(ps), eta_bt=eta_bt, temp=temp)
        pm = output_power_pm(point, config)
        rows.append(SweepRow(
            ps_w=float(ps),
            eta_bt=eta_bt,
            temp_c=temp,
            pm_w=pm,
            pb_w=battery_power(pm, config),
            eta_om=float(efficiency),
            ps_star_w=ps_star,
            eta_opt=eta_opt,
        ))
    return rows


def sweep(spec: SweepSpec, config: LinkConfig, workers: int = 1) -> list[SweepRow]:
    """Evaluate the link over the product of the sweep axes.

    Rows are ordered channel axis, then temperature, then source power,
    independent of ``workers``.
    """
    _check_axes(spec, config)
    if spec.eta_bts is not None:
        channel_values = list(spec.eta_bts)
    else:
        try:
            channel_values = [eta_bt_for_range(r, config) for r in spec.ranges_km]
        except DomainError as e:
            raise ConfigError(f"range axis: {e}") from e

    source_powers = np.asarray(spec.source_powers, dtype=float)
    groups = list(itertools.product(channel_values, spec.temps))
    logger.info(f"[Sweep] {len(groups)} (eta_bt, T) groups x {len(source_powers)} source powers, workers={workers}")

    def run(group: tuple[float, float]) -> list[SweepRow]:
        return _sweep_block(group[0], group[1], source_powers, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, groups))
    else:
        blocks = [run(group) for group in groups]
    return [row for block in blocks for row in block]
