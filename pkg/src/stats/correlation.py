"""
Pearson correlation with two-tailed significance.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from src.utils.errors import DegenerateInput, LengthMismatch, TooFewSamples

MIN_SAMPLES = 3
# A series whose spread is within a few ulps of its magnitude is rounding residue of a constant.
CONSTANT_SPREAD_ULPS = 4


@dataclass(frozen=True)
class PccResult:
    r: float
    p: float
    n: int


def p_value_two_tailed(r: float, n: int) -> float:
    """
    Two-tailed p-value of a sample correlation under the null of zero correlation.

    With df = n - 2 and t = r sqrt(df / (1 - r^2)), the tail mass
    2 (1 - T_df(|t|)) equals the regularized incomplete beta I_{df/(df+t^2)}(df/2, 1/2),
    and df / (df + t^2) = 1 - r^2.

    Raises:
        TooFewSamples: n < 3
    """
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {n}")
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {r}")
    if abs(r) == 1.0:
        return 0.0

    df = n - 2
    p = float(special.betainc(df / 2.0, 0.5, 1.0 - r * r))
    return min(1.0, max(0.0, p))


def t_statistic(r: float, n: int) -> float:
    if abs(r) == 1.0:
        return math.copysign(math.inf, r)
    return r * math.sqrt((n - 2) / (1.0 - r * r))


def _is_constant(values: np.ndarray) -> bool:
    tolerance = CONSTANT_SPREAD_ULPS * np.finfo(np.float64).eps * float(np.max(np.abs(values)))
    return float(np.ptp(values)) <= tolerance


def pearson(x: Sequence[float], y: Sequence[float]) -> PccResult:
    """
    Pearson's r between two equally long series, with its two-tailed p-value.

    Raises:
        LengthMismatch: series differ in length
        TooFewSamples: fewer than 3 pairs
        DegenerateInput: either series is constant
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"series lengths differ: {x.size} vs {y.size}")
    n = x.size
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} pairs, got {n}")

    if _is_constant(x) or _is_constant(y):
        raise DegenerateInput("correlation is undefined for a constant series")

    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))

    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    r = min(1.0, max(-1.0, r))
    return PccResult(r=r, p=p_value_two_tailed(r, n), n=n)
