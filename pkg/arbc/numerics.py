"""Bracketed golden-section search for unimodal scalar functions."""
import math
from collections.abc import Callable
from typing import NamedTuple

from .config import GOLDEN_MAX_ITER

# 1/phi
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class SearchResult(NamedTuple):
    x: float
    value: float
    iterations: int
    converged: bool


def golden_section_min(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    max_iter: int = GOLDEN_MAX_ITER,
) -> SearchResult:
    """Minimise a unimodal function on [lo, hi].

    Stops when the bracket is narrower than ``tol``; one new evaluation per
    iteration. ``converged`` is False when ``max_iter`` was exhausted first.
    """
    if hi < lo:
        lo, hi = hi, lo

    m1 = hi - INV_PHI * (hi - lo)
    m2 = lo + INV_PHI * (hi - lo)
    f1 = func(m1)
    f2 = func(m2)

    iterations = 0
    while (hi - lo) > tol and iterations < max_iter:
        if f1 < f2:
            hi = m2
            m2, f2 = m1, f1
            m1 = hi - INV_PHI * (hi - lo)
            f1 = func(m1)
        else:
            lo = m1
            m1, f1 = m2, f2
            m2 = lo + INV_PHI * (hi - lo)
            f2 = func(m2)
        iterations += 1

    x = (lo + hi) / 2.0
    return SearchResult(x=x, value=func(x), iterations=iterations, converged=(hi - lo) <= tol)


def golden_section_max(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    max_iter: int = GOLDEN_MAX_ITER,
) -> SearchResult:
    """Maximise a unimodal function on [lo, hi]."""
    result = golden_section_min(lambda x: -func(x), lo, hi, tol, max_iter)
    return result._replace(value=-result.value)


# ==============================================================================
# Grid helpers
# ==============================================================================

def parse_axis(text: str) -> list[float]:
    """Axis values from ``start:stop:step`` (inclusive) or a comma list.

    Range points are computed as start + i*step and rounded to 12 decimals,
    so ``0.3:1.0:0.1`` yields exactly 8 values. No point exceeds ``stop``
    when the step does not divide the span.
    """
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"axis range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)) or step <= 0:
            raise ValueError(f"axis step must be positive and finite, got {text!r}")
        if stop < start:
            raise ValueError(f"axis stop {stop} is below start {start}")
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [round(start + i * step, 12) for i in range(count)]

    values = [float(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ValueError("axis is empty")
    return values
