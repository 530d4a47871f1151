"""Atmospheric beam transmission.

Beer-Lambert style attenuation with a visibility-dependent scattering
exponent. Beam diameter is taken as constant, so there is no geometric
spreading term.
"""
import logging
import math
from collections.abc import Sequence
from typing import Union

import numpy as np

from .config import (
    AVERAGE_VISIBILITY_MIN_KM,
    DEFAULT_WAVELENGTH_NM,
    HIGH_VISIBILITY_MIN_KM,
    MAX_VISIBILITY_KM,
    SCENARIO_VISIBILITY_KM,
)
from .core import DomainError, RangeError
from .models import ChannelScenario, ChannelSpec

logger = logging.getLogger(__name__)


def chi(visibility_km: float) -> float:
    """Scattering size-distribution exponent for a visibility.

    1.6 on [21, 50] km, 1.3 on [6, 21) km, 0.585*v^(1/3) below 6 km.
    Discontinuous at 21 km.
    """
    if not (0.0 < visibility_km <= MAX_VISIBILITY_KM):
        raise RangeError(f"visibility {visibility_km} km outside supported interval (0, {MAX_VISIBILITY_KM}] km")
    if visibility_km >= HIGH_VISIBILITY_MIN_KM:
        return 1.6
    if visibility_km >= AVERAGE_VISIBILITY_MIN_KM:
        return 1.3
    return 0.585 * visibility_km ** (1.0 / 3.0)


def attenuation_per_km(spec: ChannelSpec) -> float:
    """Extinction coefficient (beta/v) * (lambda/lambda_ref)^(-chi), per km."""
    exponent = chi(spec.visibility_km)
    return (spec.beta / spec.visibility_km) * (spec.wavelength_nm / spec.lambda_ref_nm) ** (-exponent)


def eta_bt(spec: ChannelSpec) -> float:
    """Fraction of beam power surviving the path; always in (0, 1].

    Raises DomainError when the path is long enough for the result to
    underflow to zero.
    """
    efficiency = math.exp(-attenuation_per_km(spec) * spec.range_km)
    if efficiency == 0.0:
        raise DomainError(f"range {spec.range_km} km attenuates the beam completely")
    return efficiency


def transmittance_curve(spec: ChannelSpec, ranges_km: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """eta_bt over many ranges with the channel's wavelength and visibility."""
    ranges = np.asarray(ranges_km, dtype=float)
    if np.any(ranges < 0):
        raise DomainError("ranges must be non-negative")
    return np.exp(-attenuation_per_km(spec) * ranges)


def max_range(spec: ChannelSpec, target_eta: float) -> float:
    """Longest range at which eta_bt still reaches ``target_eta``.

    ``spec.range_km`` is ignored.
    """
    if not (0.0 < target_eta <= 1.0):
        raise DomainError(f"target efficiency must lie in (0, 1], got {target_eta}")
    reach = max(0.0, -math.log(target_eta) / attenuation_per_km(spec))
    logger.debug(f"[Channel] eta_bt >= {target_eta} up to {reach:.6g} km")
    return reach


def scenario_spec(
    scenario: Union[ChannelScenario, str],
    wavelength_nm: float = DEFAULT_WAVELENGTH_NM,
    range_km: float = 0.0,
) -> ChannelSpec:
    """ChannelSpec for one of the high/average/low visibility scenarios."""
    scenario = ChannelScenario(scenario)
    return ChannelSpec(
        wavelength_nm=wavelength_nm,
        visibility_km=SCENARIO_VISIBILITY_KM[scenario.value],
        range_km=range_km,
    )
