"""Shared plumbing for the episode engines.

The compiled and pure kernels run the same algorithm on the same flattened
inputs: pre-generated per-arm outcome streams (arm k consumes lane k of the
episode's RandomSource, one value per pull), a pre-generated uniform array for
policy randomization, and integer codes for the policy and functional.

Functional codes cover the incrementally updatable catalog subset; everything
else runs through the generic reference loop in fbandit.simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import functionals as fn
from .. import policies as pol
from ..errors import NumericError

F_MEAN = 0
F_VARIANCE = 1
F_PMEAN = 2
F_ATK_WELFARE = 3
F_KOLM = 4
F_GINI_ABS = 5
F_GINI_MEAN_DIFF = 6
F_GINI_WELFARE = 7
F_SCHUTZ_ABS = 8
F_SCHUTZ_WELFARE = 9
F_QUANTILE = 10

FENWICK_KINDS = frozenset(
    [F_GINI_ABS, F_GINI_MEAN_DIFF, F_GINI_WELFARE, F_SCHUTZ_ABS, F_SCHUTZ_WELFARE, F_QUANTILE]
)

P_FUCB = 0
P_FAMOSS = 1
P_ETC = 2

EXPLORE_CYCLIC = 0
EXPLORE_UNIFORM = 1

COMMIT_ES = 0
COMMIT_TEST = 1


@dataclass(frozen=True)
class CompiledFunctional:
    kind: int
    p1: float = 0.0


@dataclass(frozen=True)
class CompiledPolicy:
    kind: int
    beta: float = 0.0
    n1: int = 0
    explore: int = EXPLORE_CYCLIC
    commit: int = COMMIT_ES
    c_alpha: float = 0.0


def compile_functional(spec) -> Optional[CompiledFunctional]:
    """Engine code for an incrementally updatable functional, else None."""
    if type(spec) is fn.Mean:
        return CompiledFunctional(F_MEAN)
    if type(spec) is fn.Variance:
        return CompiledFunctional(F_VARIANCE)
    if type(spec) is fn.PMean:
        return CompiledFunctional(F_PMEAN, spec.p)
    if type(spec) is fn.AtkinsonWelfare:
        return CompiledFunctional(F_ATK_WELFARE, spec.eps)
    if type(spec) is fn.Kolm:
        return CompiledFunctional(F_KOLM, spec.kappa)
    if type(spec) is fn.GiniAbs:
        return CompiledFunctional(F_GINI_ABS)
    if type(spec) is fn.GiniMeanDiff:
        return CompiledFunctional(F_GINI_MEAN_DIFF)
    if type(spec) is fn.GiniWelfare:
        return CompiledFunctional(F_GINI_WELFARE)
    if type(spec) is fn.SchutzAbs:
        return CompiledFunctional(F_SCHUTZ_ABS)
    if type(spec) is fn.SchutzWelfare:
        return CompiledFunctional(F_SCHUTZ_WELFARE)
    if type(spec) is fn.Quantile:
        return CompiledFunctional(F_QUANTILE, spec.alpha)
    return None


def compile_policy(spec: "pol.PolicySpec", n: int) -> CompiledPolicy:
    """Engine codes for a policy variant (every shipped variant compiles)."""
    v = spec.variant
    if isinstance(v, pol.FUCB):
        return CompiledPolicy(P_FUCB, beta=v.beta)
    if isinstance(v, pol.FaMOSS):
        return CompiledPolicy(P_FAMOSS, beta=v.beta)
    if isinstance(v, pol.GenericUCB):
        kind = P_FUCB if v.rho == "fucb" else P_FAMOSS
        return CompiledPolicy(kind, beta=v.beta)
    if not isinstance(v, (pol.ETCHorizon, pol.ETCES, pol.ETCT)):
        raise NumericError(f"unknown policy variant {type(v).__name__}")
    n1 = pol.exploration_length(spec, n)
    explore = EXPLORE_CYCLIC if v.exploration == "cyclic" else EXPLORE_UNIFORM
    if isinstance(v, pol.ETCT):
        return CompiledPolicy(
            P_ETC,
            n1=n1,
            explore=explore,
            commit=COMMIT_TEST,
            c_alpha=pol.etct_threshold(spec.C, v.alpha, n1),
        )
    return CompiledPolicy(P_ETC, n1=n1, explore=explore, commit=COMMIT_ES)


def policy_uniform_count(cp: CompiledPolicy, n: int) -> int:
    """How many policy-lane uniforms an episode may consume."""
    if cp.kind != P_ETC:
        return 0
    count = min(cp.n1, n) if cp.explore == EXPLORE_UNIFORM else 0
    if cp.commit == COMMIT_TEST:
        count += 1
    return count


def rank_arrays(streams: np.ndarray):
    """Per-arm sorted stream values, insertion ranks, and tie-inclusive upper
    ranks, for the Fenwick-backed functionals.

    ranks[i, j] is the 1-based position of streams[i, j] in the stable sort of
    row i; ub[i, j] is the count of stream values <= streams[i, j], so a
    Fenwick prefix at ub covers every inserted tie.
    """
    K, n = streams.shape
    sorted_vals = np.empty((K, n), dtype=np.float64)
    ranks = np.empty((K, n), dtype=np.int64)
    ub = np.empty((K, n), dtype=np.int64)
    seq = np.arange(1, n + 1)
    for i in range(K):
        order = np.argsort(streams[i], kind="stable")
        sorted_vals[i] = streams[i][order]
        ranks[i, order] = seq
        if n < 2 or np.all(sorted_vals[i, 1:] > sorted_vals[i, :-1]):
            ub[i] = ranks[i]  # no ties: the upper rank is the rank itself
        else:
            ub[i] = np.searchsorted(sorted_vals[i], streams[i], side="right")
    return sorted_vals, ranks, ub


def quantile_index(alpha: float, m: int) -> int:
    k = math.ceil(alpha * m - 1e-9)
    return min(max(k, 1), m)
