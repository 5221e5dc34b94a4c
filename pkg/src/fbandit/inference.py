"""Finite-sample inference and bound calculators.

Everything here follows from the restricted-Lipschitz property together with
the Dvoretzky-Kiefer-Wolfowitz-Massart inequality, which gives the
concentration bound P(|T(F_hat_m) - T(F)| > eps) <= 2 exp(-2 m eps^2 / C^2)
uniformly over the functional's domain.  All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .ecdf import EmpiricalCdf
from .errors import DataError, NumericError
from .functionals import FunctionalSpec, evaluate, lipschitz_constant
from .policies import ceil_guarded, log_bar


@dataclass(frozen=True)
class ConfidenceInterval:
    center: float
    half_width: float
    level: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class BoundReport:
    value: float
    constant: float
    inputs: dict


def dkwm_ci(spec: FunctionalSpec, F: EmpiricalCdf, alpha: float) -> ConfidenceInterval:
    """Uniform finite-sample interval T(F_hat) +/- C sqrt(log(2/alpha) / (2m))."""
    if not 0.0 < alpha < 1.0:
        raise NumericError("confidence level requires alpha in (0, 1)")
    C = lipschitz_constant(spec)
    hw = C * math.sqrt(math.log(2.0 / alpha) / (2.0 * F.m))
    return ConfidenceInterval(evaluate(spec, F), hw, 1.0 - alpha)


def welfare_test(
    F1: EmpiricalCdf,
    F2: EmpiricalCdf,
    spec: FunctionalSpec,
    alpha: float,
    n1: int,
) -> Tuple[bool, float, float]:
    """Two-sample test of equal functional values after a cyclic exploration
    phase of length n1: rejects iff |T(F1) - T(F2)| >= c_alpha with
    c_alpha = sqrt(2 log(4/alpha) C^2 / floor(n1/2)).

    Returns (reject, statistic, c_alpha).
    """
    if n1 < 2:
        raise NumericError("welfare test requires n1 >= 2")
    if not 0.0 < alpha < 1.0:
        raise NumericError("test size requires alpha in (0, 1)")
    half = n1 // 2
    if F1.m < half or F2.m < half:
        raise DataError(
            f"each sample must hold at least floor(n1/2) = {half} observations"
        )
    C = lipschitz_constant(spec)
    c_alpha = math.sqrt(2.0 * math.log(4.0 / alpha) * C**2 / half)
    stat = abs(evaluate(spec, F1) - evaluate(spec, F2))
    return stat >= c_alpha, stat, c_alpha


def n1_for_power(C: float, Delta: float, alpha: float, eta: float) -> int:
    """Exploration length guaranteeing power >= 1 - eta against a gap Delta:
    n1 = 2 ceil(8 log(4 / min(alpha, eta)) C^2 / Delta^2).  Even by construction."""
    if C <= 0:
        raise NumericError("C must be positive")
    if Delta <= 0:
        raise NumericError("no finite sample suffices for Delta = 0")
    if not (0 < alpha < 1 and 0 < eta < 1):
        raise NumericError("alpha and eta must lie in (0, 1)")
    return 2 * ceil_guarded(8.0 * math.log(4.0 / min(alpha, eta)) * C**2 / Delta**2)


def n1_for_es_regret(C: float, delta: float, K: int) -> int:
    """Exploration length making the per-subject post-commitment regret of the
    empirical-success rule at most delta:
    n1 = K ceil(16 (K-1)^2 C^2 / (e delta^2))."""
    if C <= 0:
        raise NumericError("C must be positive")
    if delta <= 0:
        raise NumericError("delta must be positive")
    if K < 2:
        raise NumericError("need at least K = 2 arms")
    return K * ceil_guarded(16.0 * (K - 1) ** 2 * C**2 / (math.e * delta**2))


def fucb_regret_bound(beta: float, C: float, K: int, n: int) -> BoundReport:
    """Uniform expected-regret bound c(beta, C) sqrt(K n logbar(n)) with
    c(beta, C) = C sqrt(2 beta + (beta + 2) / (beta - 2))."""
    if not beta > 2.0:
        raise NumericError("fucb bound requires beta > 2")
    c = C * math.sqrt(2.0 * beta + (beta + 2.0) / (beta - 2.0))
    value = c * math.sqrt(K * n * log_bar(n))
    return BoundReport(value, c, {"beta": beta, "C": C, "K": K, "n": n})


def lambert_w0(y: float) -> float:
    """Principal Lambert W on (0, inf): the w > 0 with w e^w = y.

    Halley iteration from the initial guess log(1 + y); converges to
    |w e^w - y| <= 1e-12 max(1, y).
    """
    if not y > 0:
        raise NumericError("lambert_w0 requires y > 0")
    w = math.log1p(y)
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - y
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0))
        step = f / denom
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            break
    if abs(w * math.exp(w) - y) > 1e-12 * max(1.0, y):
        raise NumericError(f"lambert_w0 failed to converge at y = {y}")
    return w


def famoss_constant(beta: float) -> float:
    """Multiplicative constant (4.83 + 6.66 d(beta) + sqrt(2 beta)) sqrt(pi),
    where d(beta) involves W0(e / (4 beta))."""
    if not beta > 0.25:
        raise NumericError("famoss bound requires beta > 1/4")
    w = lambert_w0(math.e / (4.0 * beta))
    d = math.sqrt(beta * w) / (1.0 - (4.0 * beta * w) ** (0.5 - 1.0 / (2.0 * w)))
    return (4.83 + 6.66 * d + math.sqrt(2.0 * beta)) * math.sqrt(math.pi)


def famoss_regret_bound(beta: float, C: float, K: int, n: int) -> BoundReport:
    """Uniform expected-regret bound C (4.83 + 6.66 d(beta) + sqrt(2 beta))
    sqrt(pi) sqrt(K n); scales exactly as sqrt(n)."""
    const = famoss_constant(beta)
    value = C * const * math.sqrt(K * n)
    return BoundReport(value, const, {"beta": beta, "C": C, "K": K, "n": n})


def hpb_bound(
    deltas: Sequence[float], C: float, beta: float, n: int, x: float
) -> Tuple[float, float]:
    """High-probability regret bound for the FUCB policy.

    Returns (threshold, prob_bound) with
      threshold  = sum_{i: d_i > 0} (2 C^2 beta log(n) / d_i + d_i) x,
      prob_bound = 2 K / n^(beta x - 1)
                   + 2 sum_{i: d_i > 0} ((2 C^2 beta log(n) / d_i^2) x)^(1-beta) / (beta - 1).

    With every gap zero both quantities are 0 (empty-sum convention).
    """
    if x < 1.0:
        raise NumericError("hpb bound requires x >= 1")
    if not beta > 2.0:
        raise NumericError("hpb bound requires beta > 2")
    K = len(deltas)
    pos = [d for d in deltas if d > 0]
    if any(d < 0 for d in deltas):
        raise NumericError("gaps must be nonnegative")
    if not pos:
        return 0.0, 0.0
    logn = math.log(n)
    threshold = sum((2.0 * C**2 * beta * logn / d + d) * x for d in pos)
    tail = sum(
        ((2.0 * C**2 * beta * logn / d**2) * x) ** (1.0 - beta) for d in pos
    )
    prob = 2.0 * K / n ** (beta * x - 1.0) + 2.0 * tail / (beta - 1.0)
    return threshold, prob
