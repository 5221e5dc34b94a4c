"""Sequential allocation policies.

Index policies add a DKWM-scaled exploration bonus to the plug-in functional
value and pick the smallest maximizing arm ("min argmax" everywhere):

* FUCB (beta > 2): bonus C * sqrt(beta * log(t) / (2 S_i(t-1)))
* FaMOSS (beta > 1/4): bonus C * sqrt(beta / S_i * logplus((t-1) / (K S_i)))

Explore-then-commit variants explore for n1 rounds (uniformly at random or
cyclically), then commit forever:

* ETCHorizon: n1 = min(K * ceil(n^(2/3)), n), empirical-success commitment.
* ETCES(delta): n1 = K * ceil(16 (K-1)^2 C^2 / (e delta^2)), empirical success.
* ETCT(Delta, alpha, eta): two arms only; n1 = 2 * ceil(8 log(4/min(alpha,
  eta)) C^2 / Delta^2); commits to the empirical argmax if the two-sample
  welfare test rejects and to a fair coin flip otherwise.

GenericUCB exposes the same skeleton with the bonus drawn from a registry, of
which the FUCB and FaMOSS bonuses are the registered instances.

All logarithms are natural; logbar(x) = max(log x, 1), logplus(x) =
max(log x, 0).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ecdf import EmpiricalCdf
from .errors import DataError, NumericError
from .functionals import FunctionalSpec, lipschitz_constant

BETA_FUCB_DEFAULT = 2.01
BETA_FUCB_MINIMAX = 2.0 + math.sqrt(2.0)  # minimizes c(beta, C)
BETA_FAMOSS_DEFAULT = 1.0 / 3.99

EXPLORATION_SCHEMES = ("uniform-random", "cyclic")


def ceil_guarded(v: float, eps: float = 1e-9) -> int:
    """ceil with protection against values sitting a rounding error above an integer."""
    nearest = round(v)
    if abs(v - nearest) < eps:
        return int(nearest)
    return int(math.ceil(v))


def log_plus(x: float) -> float:
    return max(math.log(x), 0.0) if x > 0 else 0.0


def log_bar(x: float) -> float:
    return max(math.log(x), 1.0)


def fucb_bonus(C: float, beta: float, pulls: int, t: int) -> float:
    return C * math.sqrt(beta * math.log(t) / (2.0 * pulls))


def famoss_bonus(C: float, beta: float, K: int, pulls: int, t: int) -> float:
    return C * math.sqrt(beta / pulls * log_plus((t - 1) / (K * pulls)))


# bonus registry for the generic UCB-type skeleton: name -> factory(C, beta, K)
# returning rho(pulls, t).  Monotonicity in pulls holds for both entries.
RHO_REGISTRY = {
    "fucb": lambda C, beta, K: (lambda pulls, t: fucb_bonus(C, beta, pulls, t)),
    "famoss": lambda C, beta, K: (lambda pulls, t: famoss_bonus(C, beta, K, pulls, t)),
}


@dataclass(frozen=True)
class FUCB:
    beta: float = BETA_FUCB_DEFAULT

    def __post_init__(self):
        if not self.beta > 2.0:
            raise NumericError("fucb requires beta > 2")


@dataclass(frozen=True)
class FaMOSS:
    beta: float = BETA_FAMOSS_DEFAULT

    def __post_init__(self):
        if not self.beta > 0.25:
            raise NumericError("famoss requires beta > 1/4")


@dataclass(frozen=True)
class ETCHorizon:
    exploration: str = "uniform-random"

    def __post_init__(self):
        if self.exploration not in EXPLORATION_SCHEMES:
            raise NumericError(f"unknown exploration scheme {self.exploration!r}")


@dataclass(frozen=True)
class ETCES:
    delta: float = 0.3
    exploration: str = "cyclic"

    def __post_init__(self):
        if not self.delta > 0:
            raise NumericError("etc-es requires delta > 0")
        if self.exploration not in EXPLORATION_SCHEMES:
            raise NumericError(f"unknown exploration scheme {self.exploration!r}")


@dataclass(frozen=True)
class ETCT:
    delta: float = 0.3
    alpha: float = 0.1
    eta: float = 0.1
    exploration: str = "cyclic"

    def __post_init__(self):
        if not self.delta > 0:
            raise NumericError("etc-t requires a detectable effect delta > 0")
        if not (0 < self.alpha < 1 and 0 < self.eta < 1):
            raise NumericError("etc-t requires alpha, eta in (0, 1)")
        if self.exploration not in EXPLORATION_SCHEMES:
            raise NumericError(f"unknown exploration scheme {self.exploration!r}")


@dataclass(frozen=True)
class GenericUCB:
    rho: str = "fucb"
    beta: float = BETA_FUCB_DEFAULT

    def __post_init__(self):
        if self.rho not in RHO_REGISTRY:
            raise NumericError(f"unknown index-bonus name {self.rho!r}")


POLICY_VARIANTS = (FUCB, FaMOSS, ETCHorizon, ETCES, ETCT, GenericUCB)


@dataclass(frozen=True)
class PolicySpec:
    variant: object
    functional: FunctionalSpec
    K: int

    def __post_init__(self):
        if self.K < 2:
            raise NumericError("need at least K = 2 arms")
        if isinstance(self.variant, ETCT) and self.K != 2:
            raise NumericError(
                "etc-t is defined for two arms only; a multiple-testing "
                "correction for K > 2 is deliberately not provided"
            )

    @property
    def C(self) -> float:
        return lipschitz_constant(self.functional)

    @property
    def is_anytime(self) -> bool:
        return isinstance(self.variant, (FUCB, FaMOSS, GenericUCB))


class PolicyState:
    """Mutable per-episode state: pull counts, per-arm empirical cdfs, cached
    functional values, and ETC commitment bookkeeping."""

    __slots__ = (
        "spec",
        "t",
        "counts",
        "samples",
        "values",
        "n1",
        "committed",
        "horizon",
        "pending_arm",
        "_rho",
    )

    def __init__(self, spec: PolicySpec, n1: Optional[int], horizon: Optional[int]):
        self.spec = spec
        self.t = 0
        self.counts = [0] * spec.K
        self.samples = [[] for _ in range(spec.K)]
        self.values = [math.nan] * spec.K
        self.n1 = n1
        self.committed: Optional[int] = None
        self.horizon = horizon
        self.pending_arm: Optional[int] = None
        v = spec.variant
        if isinstance(v, FUCB):
            self._rho = RHO_REGISTRY["fucb"](spec.C, v.beta, spec.K)
        elif isinstance(v, FaMOSS):
            self._rho = RHO_REGISTRY["famoss"](spec.C, v.beta, spec.K)
        elif isinstance(v, GenericUCB):
            self._rho = RHO_REGISTRY[v.rho](spec.C, v.beta, spec.K)
        else:
            self._rho = None

    def ecdf(self, arm: int) -> EmpiricalCdf:
        return EmpiricalCdf(np.asarray(self.samples[arm], dtype=float),
                            self.spec.functional.support)


def exploration_length(spec: PolicySpec, n: Optional[int]) -> Optional[int]:
    """n1 for the ETC variants; None for anytime index policies."""
    v = spec.variant
    C = spec.C
    if isinstance(v, ETCHorizon):
        if n is None:
            raise NumericError("etc-horizon needs the horizon n at initialization")
        return min(spec.K * ceil_guarded(n ** (2.0 / 3.0)), n)
    if isinstance(v, ETCES):
        return spec.K * ceil_guarded(
            16.0 * (spec.K - 1) ** 2 * C**2 / (math.e * v.delta**2)
        )
    if isinstance(v, ETCT):
        return 2 * ceil_guarded(
            8.0 * math.log(4.0 / min(v.alpha, v.eta)) * C**2 / v.delta**2
        )
    return None


def etct_threshold(C: float, alpha: float, n1: int) -> float:
    """Critical value c_alpha = sqrt(2 log(4/alpha) C^2 / floor(n1/2))."""
    return math.sqrt(2.0 * math.log(4.0 / alpha) * C**2 / (n1 // 2))


def policy_init(spec: PolicySpec, n: Optional[int] = None) -> PolicyState:
    """Fresh state at t = 0, with the ETC exploration length resolved."""
    n1 = exploration_length(spec, n)
    horizon = n if isinstance(spec.variant, ETCHorizon) else None
    return PolicyState(spec, n1, horizon)


def _min_argmax(values) -> int:
    best = None
    arg = 0
    for i, v in enumerate(values):
        if best is None or v > best:
            best = v
            arg = i
    return arg


def select_arm(state: PolicyState, rng: Optional[np.random.Generator] = None) -> int:
    """Arm for round t+1.  rng supplies the uniform exploration draws; index
    policies never consume randomness."""
    spec = state.spec
    K = spec.K
    t_round = state.t + 1
    if state.horizon is not None and t_round > state.horizon:
        raise NumericError(f"round {t_round} past the horizon {state.horizon}")
    if state._rho is not None:
        if state.t < K:
            arm = state.t
        else:
            arm = _min_argmax(
                state.values[i] + state._rho(state.counts[i], t_round)
                for i in range(K)
            )
        state.pending_arm = arm
        return arm
    # explore-then-commit
    if t_round <= state.n1:
        if spec.variant.exploration == "cyclic":
            arm = t_round % K
        else:
            if rng is None:
                raise NumericError("uniform-random exploration needs a generator")
            arm = min(int(rng.random() * K), K - 1)
    else:
        if state.committed is None:
            raise NumericError("commitment not computed at the end of exploration")
        arm = state.committed
    state.pending_arm = arm
    return arm


def update(state: PolicyState, arm: int, outcome: float) -> PolicyState:
    """Record the outcome of the arm chosen this round and refresh its value.

    For ETC variants with a deterministic commitment rule, the committed arm
    is frozen as soon as t reaches n1; the test-based rule needs randomness
    and is finalized by etc_commit.
    """
    spec = state.spec
    if state.pending_arm is not None and arm != state.pending_arm:
        raise NumericError(f"arm {arm} was not the last selected arm {state.pending_arm}")
    sup = spec.functional.support
    if not sup.a <= outcome <= sup.b:
        raise DataError(f"outcome {outcome!r} outside support [{sup.a}, {sup.b}]")
    bisect.insort(state.samples[arm], float(outcome))
    state.counts[arm] += 1
    state.t += 1
    state.pending_arm = None
    state.values[arm] = spec.functional.value(np.asarray(state.samples[arm]))
    if (
        state.n1 is not None
        and state.t == state.n1
        and state.committed is None
        and not isinstance(spec.variant, ETCT)
    ):
        etc_commit(state)
    return state


def etc_commit(state: PolicyState, rng: Optional[np.random.Generator] = None) -> int:
    """Commitment decision at t = n1; immutable once set.

    Empirical-success rules take the smallest empirical argmax among explored
    arms.  The test-based rule commits to the argmax only if
    |T(F1) - T(F2)| >= c_alpha and otherwise randomizes fairly.
    """
    if state.committed is not None:
        return state.committed
    spec = state.spec
    if state.t != state.n1:
        raise NumericError(f"commitment requires t = n1 = {state.n1}, at t = {state.t}")
    if isinstance(spec.variant, ETCT):
        v0, v1 = state.values[0], state.values[1]
        c_alpha = etct_threshold(spec.C, spec.variant.alpha, state.n1)
        if abs(v0 - v1) >= c_alpha:
            arm = 0 if v0 >= v1 else 1
        else:
            if rng is None:
                raise NumericError("etc-t commitment needs a generator for the coin flip")
            arm = 0 if rng.random() < 0.5 else 1
    else:
        explored = [
            (state.values[i], i) for i in range(spec.K) if state.counts[i] > 0
        ]
        best = max(v for v, _ in explored)
        arm = min(i for v, i in explored if v == best)
    state.committed = arm
    return arm
