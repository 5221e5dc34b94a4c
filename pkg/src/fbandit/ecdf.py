"""Empirical cdfs on a bounded support: exact evaluation, quantiles, and the
sup-metric computed without discretization error.

An empirical cdf is stored as the sorted multiset of its observations, so
F(x) = #{i : x_i <= x} / m is evaluated exactly and the distance between two
step cdfs is the maximum of |F - G| over the jump points of either one (and
their left limits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError


@dataclass(frozen=True)
class SupportInterval:
    """Closed interval [a, b] containing every outcome and all distribution mass."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise NumericError("support endpoints must be finite")
        if not self.a < self.b:
            raise NumericError(f"support requires a < b, got [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    def contains(self, values) -> bool:
        v = np.asarray(values, dtype=float)
        return bool(np.all((v >= self.a) & (v <= self.b)))


UNIT_INTERVAL = SupportInterval(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Step cdf of a sorted sample on a support interval.

    Evaluation is right-continuous: F(x) = #{i : samples[i] <= x} / m.
    """

    samples: np.ndarray = field(repr=False)
    support: SupportInterval

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        self.samples.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalCdf):
            return NotImplemented
        return self.support == other.support and np.array_equal(
            self.samples, other.samples
        )

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    def __len__(self) -> int:
        return self.m

    def evaluate(self, x):
        """F(x), vectorized and exact for the stored multiset."""
        idx = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right")
        return idx / self.m

    def left_limit(self, x):
        """F(x-), the left-sided limit at x."""
        idx = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="left")
        return idx / self.m

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    def quantile(self, alpha: float) -> float:
        return ecdf_quantile(self, alpha)


def ecdf_from_samples(samples, support: SupportInterval) -> EmpiricalCdf:
    """Build an empirical cdf, validating support membership.

    Raises DataError on an empty input or on any value outside [a, b].
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise DataError("no observations")
    if np.any(np.isnan(arr)):
        raise DataError("observations contain NaN")
    bad = (arr < support.a) | (arr > support.b)
    if np.any(bad):
        offender = float(arr[bad][0])
        raise DataError(
            f"observation {offender!r} outside support [{support.a}, {support.b}]"
        )
    return EmpiricalCdf(np.sort(arr), support)


def sup_distance(F: EmpiricalCdf, G: EmpiricalCdf) -> float:
    """Exact sup-norm distance ||F - G||_inf between two empirical cdfs.

    Both step functions are compared at every jump point of either cdf and at
    the left limits of those points; for step functions the supremum is
    attained there.
    """
    if F.support != G.support:
        raise DataError("sup_distance requires matching support intervals")
    pts = np.concatenate([F.samples, G.samples])
    d_right = np.abs(F.evaluate(pts) - G.evaluate(pts))
    d_left = np.abs(F.left_limit(pts) - G.left_limit(pts))
    return float(max(d_right.max(), d_left.max()))


def _order_index(alpha: float, m: int) -> int:
    """ceil(alpha * m) with a guard against float round-off, clamped to [1, m]."""
    t = alpha * m
    k = math.ceil(t - 1e-9)
    return min(max(k, 1), m)


def ecdf_quantile(F: EmpiricalCdf, alpha: float) -> float:
    """q_alpha(F) = inf{x : F(x) >= alpha}, i.e. the ceil(alpha*m)-th order statistic.

    alpha must lie in (0, 1]; alpha = 0 would give -infinity.
    """
    if not 0.0 < alpha <= 1.0:
        raise NumericError(f"quantile level must be in (0, 1], got {alpha}")
    return float(F.samples[_order_index(alpha, F.m) - 1])
