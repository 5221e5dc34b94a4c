"""Bandit environments, the episode runner, regret accounting, worst-case
sweeps, and the relative-regret table.

Regret is accounted per round as the gap of the chosen arm, so the cumulative
value at the horizon equals sum_i gap_i * S_i(n) exactly.  Oracle functional
values for continuous arms come from the mid-quantile grid cdf (error at most
C / grid_size); for resampler arms the pool cdf is the truth and the value is
exact.

Episodes are reproducible: replication r of an instance consumes the streams
of RandomSource(seed, instance_index=key, replication_index=r) with the key a
content hash of the instance, arm k on lane k and policy randomization on
lane K, so results never depend on scheduling, worker count, or the
instance's position in a grid.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _engine
from ._engine.common import (
    compile_functional,
    compile_policy,
    policy_uniform_count,
    rank_arrays,
)
from .distributions import Beta, EmpiricalResampler, PointMass, sample_arm, true_cdf_grid
from .ecdf import ecdf_from_samples
from .errors import DataError, NumericError
from .functionals import FunctionalSpec, evaluate
from .policies import ETCT, PolicySpec, etc_commit, policy_init, select_arm, update
from .rng import RandomSource

DEFAULT_ORACLE_GRID = 100_000

# Beta(1, p) second-parameter grids of the simulation protocols
PAPER21_GRID = (
    0.1, 0.425, 0.75, 0.8, 0.85, 0.9, 0.95, 0.9625, 0.975, 0.9875,
    1.0, 1.0125, 1.025, 1.0375, 1.05, 1.10, 1.15, 1.20, 1.25, 3.125, 5.0,
)
PAPER11_GRID = (0.1, 0.75, 0.85, 0.95, 0.975, 1.0, 1.025, 1.05, 1.15, 1.25, 5.0)

_oracle_cache: dict = {}


def oracle_value(dist, functional: FunctionalSpec, grid_size: int = DEFAULT_ORACLE_GRID) -> float:
    """T at the arm's true law, via the exact representation where one exists
    and the mid-quantile grid otherwise."""
    key = None
    if isinstance(dist, (Beta, PointMass)):
        key = (dist, functional, grid_size)
        if key in _oracle_cache:
            return _oracle_cache[key]
    if isinstance(dist, PointMass):
        F = ecdf_from_samples([dist.c], functional.support)
    elif isinstance(dist, EmpiricalResampler):
        F = ecdf_from_samples(dist.pool.samples, functional.support)
    else:
        F = true_cdf_grid(dist, grid_size, support=functional.support)
    val = evaluate(functional, F)
    if key is not None:
        _oracle_cache[key] = val
    return val


def _arm_bytes(arm) -> bytes:
    if isinstance(arm, EmpiricalResampler):
        return b"resampler|" + arm.pool.samples.tobytes() + repr(arm.pool.support).encode()
    comps = getattr(arm, "components", None)
    if comps is not None:
        inner = b"|".join(_arm_bytes(c) for c in comps)
        return b"mixture|" + repr(arm.weights).encode() + inner
    return repr(arm).encode()


@dataclass(frozen=True)
class Instance:
    """K arms plus the targeted functional, with cached oracle values and gaps.

    The stream key identifies the instance's random streams by content, so a
    sweep over a grid of instances does not depend on the grid's ordering.
    """

    arms: tuple
    functional: FunctionalSpec
    oracle_grid: int = DEFAULT_ORACLE_GRID
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if len(self.arms) < 2:
            raise NumericError("an instance needs at least two arms")
        sup = self.functional.support
        for arm in self.arms:
            asup = arm.support
            if asup.a < sup.a - 1e-12 or asup.b > sup.b + 1e-12:
                raise DataError(
                    f"arm support [{asup.a}, {asup.b}] not inside [{sup.a}, {sup.b}]"
                )

    @property
    def K(self) -> int:
        return len(self.arms)

    @property
    def stream_key(self) -> int:
        h = hashlib.blake2b(digest_size=8)
        h.update(repr(self.functional).encode())
        for arm in self.arms:
            h.update(_arm_bytes(arm))
            h.update(b";")
        return int.from_bytes(h.digest(), "little")

    @property
    def values(self) -> np.ndarray:
        vals = getattr(self, "_values", None)
        if vals is None:
            vals = np.array(
                [oracle_value(a, self.functional, self.oracle_grid) for a in self.arms]
            )
            object.__setattr__(self, "_values", vals)
        return vals

    @property
    def gaps(self) -> np.ndarray:
        return self.values.max() - self.values


@dataclass(frozen=True)
class RegretTrajectory:
    checkpoints: np.ndarray
    regret: np.ndarray
    terminal_counts: np.ndarray
    seed: int
    instance_index: int
    replication_index: int
    arms: Optional[np.ndarray] = None


def geometric_checkpoints(n: int) -> np.ndarray:
    """{1, 2, 4, ...} up to n, always including n itself."""
    pts = []
    t = 1
    while t < n:
        pts.append(t)
        t *= 2
    pts.append(n)
    return np.asarray(pts, dtype=np.int64)


def _resolve_checkpoints(n: int, checkpoints) -> np.ndarray:
    if checkpoints is None:
        return geometric_checkpoints(n)
    if isinstance(checkpoints, str):
        if checkpoints == "geometric":
            return geometric_checkpoints(n)
        if checkpoints == "all":
            return np.arange(1, n + 1, dtype=np.int64)
        raise NumericError(f"unknown checkpoint scheme {checkpoints!r}")
    pts = np.unique(np.asarray(checkpoints, dtype=np.int64))
    if pts.size and (pts[0] < 1 or pts[-1] > n):
        raise NumericError("checkpoints must lie in [1, n]")
    if not pts.size or pts[-1] != n:
        pts = np.append(pts, n)
    return pts


def _episode_streams(instance: Instance, n: int, rng: RandomSource):
    K = instance.K
    streams = np.empty((K, n), dtype=np.float64)
    for k in range(K):
        streams[k] = sample_arm(instance.arms[k], rng.lane_source(k), n)
    return streams


class _UniformFeed:
    """Generator stand-in that serves pre-drawn uniforms in order."""

    __slots__ = ("arr", "i")

    def __init__(self, arr):
        self.arr = arr
        self.i = 0

    def random(self):
        u = self.arr[self.i]
        self.i += 1
        return u


def _run_generic(instance, policy, n, streams, policy_u, checkpoints, record_arms):
    """Reference episode loop on the public policy operations; recomputes the
    plug-in value from scratch at every update."""
    state = policy_init(policy, n)
    feed = _UniformFeed(policy_u)
    gaps = instance.gaps
    ptr = [0] * instance.K
    cumreg = 0.0
    out = np.empty(checkpoints.shape[0], dtype=np.float64)
    arms_rec = np.empty(n, dtype=np.int64) if record_arms else None
    cp_idx = 0
    for t in range(1, n + 1):
        arm = select_arm(state, feed)
        x = streams[arm, ptr[arm]]
        ptr[arm] += 1
        update(state, arm, x)
        if (
            state.n1 is not None
            and state.t == state.n1
            and state.committed is None
            and isinstance(policy.variant, ETCT)
        ):
            etc_commit(state, feed)
        cumreg += gaps[arm]
        if record_arms:
            arms_rec[t - 1] = arm
        if cp_idx < checkpoints.shape[0] and t == checkpoints[cp_idx]:
            out[cp_idx] = cumreg
            cp_idx += 1
    counts = np.asarray(state.counts, dtype=np.int64)
    return out, counts, arms_rec


def run_episode(
    instance: Instance,
    policy: PolicySpec,
    n: int,
    rng: RandomSource,
    checkpoints=None,
    engine: str = "auto",
    record_arms: bool = False,
) -> RegretTrajectory:
    """One episode of length n; never reveals counterfactual outcomes to the
    policy (arm k's stream is consumed only on pulls of arm k).

    engine: "auto" picks the compiled kernel when available and applicable,
    "compiled"/"pure" force a kernel, and "generic" runs the from-scratch
    reference loop that supports every catalog functional.
    """
    if n < 1:
        raise NumericError("episode length must be >= 1")
    if policy.K != instance.K:
        raise NumericError("policy and instance disagree on the number of arms")
    if policy.functional != instance.functional:
        raise NumericError("policy and instance disagree on the functional")
    cps = _resolve_checkpoints(n, checkpoints)
    streams = _episode_streams(instance, n, rng)

    cf = compile_functional(policy.functional)
    cp = compile_policy(policy, n)
    use_kernel = engine != "generic" and cf is not None
    if engine in ("compiled", "pure") and not use_kernel:
        raise NumericError(
            f"engine {engine!r} does not support this functional/policy; use 'generic'"
        )

    n_uniforms = policy_uniform_count(cp, n)
    policy_u = (
        rng.lane_source(instance.K).generator().random(n_uniforms)
        if n_uniforms
        else np.empty(0, dtype=np.float64)
    )

    if use_kernel:
        kernel, _ = _engine.get_kernel(engine)
        from ._engine.common import FENWICK_KINDS

        if cf.kind in FENWICK_KINDS:
            sorted_vals, ranks, ub = rank_arrays(streams)
        else:
            sorted_vals = np.empty((instance.K, 0), dtype=np.float64)
            ranks = np.empty((instance.K, 0), dtype=np.int64)
            ub = np.empty((instance.K, 0), dtype=np.int64)
        out_regret = np.zeros(cps.shape[0], dtype=np.float64)
        out_counts = np.zeros(instance.K, dtype=np.int64)
        out_arms = np.empty(n if record_arms else 0, dtype=np.int64)
        kernel.run_episode_kernel(
            streams,
            sorted_vals,
            ranks,
            ub,
            policy_u,
            np.ascontiguousarray(instance.gaps, dtype=np.float64),
            cps,
            cp.kind,
            cp.beta,
            policy.C,
            cp.n1,
            cp.explore,
            cp.commit,
            cp.c_alpha,
            cf.kind,
            cf.p1,
            out_regret,
            out_counts,
            out_arms,
        )
        arms_rec = out_arms if record_arms else None
    else:
        out_regret, out_counts, arms_rec = _run_generic(
            instance, policy, n, streams, policy_u, cps, record_arms
        )
    return RegretTrajectory(
        cps,
        out_regret,
        out_counts,
        rng.master_seed,
        rng.instance_index,
        rng.replication_index,
        arms_rec,
    )


@dataclass(frozen=True)
class MeanTrajectory:
    checkpoints: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    per_rep: np.ndarray  # reps x checkpoints


def expected_regret(
    instance: Instance,
    policy: PolicySpec,
    n: int,
    reps: int,
    seed: int,
    checkpoints=None,
    engine: str = "auto",
    workers: int = 1,
) -> MeanTrajectory:
    """Arithmetic mean of regret across replications with distinct stream
    coordinates (the instance's content key and the replication index);
    aggregation order is fixed, so the result is independent of worker count
    and of the instance's position in any surrounding grid."""
    if reps < 1:
        raise NumericError("reps must be >= 1")
    cps = _resolve_checkpoints(n, checkpoints)
    key = instance.stream_key
    rows = np.empty((reps, cps.shape[0]), dtype=np.float64)
    if workers > 1 and reps > 1:
        args = [
            (instance, policy, n, seed, key, r, checkpoints, engine)
            for r in range(reps)
        ]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for r, regret in enumerate(ex.map(_episode_task, args)):
                rows[r] = regret
    else:
        for r in range(reps):
            rng = RandomSource(seed, instance_index=key, replication_index=r)
            rows[r] = run_episode(instance, policy, n, rng, cps, engine).regret
    mean = rows.mean(axis=0)
    if reps > 1:
        se = rows.std(axis=0, ddof=1) / math.sqrt(reps)
    else:
        se = np.zeros_like(mean)
    return MeanTrajectory(cps, mean, se, rows)


def _episode_task(args):
    instance, policy, n, seed, key, r, checkpoints, engine = args
    rng = RandomSource(seed, instance_index=key, replication_index=r)
    return run_episode(instance, policy, n, rng, checkpoints, engine).regret


@dataclass(frozen=True)
class SweepResult:
    checkpoints: np.ndarray
    policies: tuple
    per_instance: np.ndarray  # policies x instances x checkpoints (mean regret)
    max_regret: np.ndarray  # policies x checkpoints
    argmax_instance: np.ndarray  # policies x checkpoints (lowest index on ties)


def max_regret_sweep(
    instances: Sequence[Instance],
    policies: Sequence[PolicySpec],
    n: int,
    reps: int,
    seed: int,
    checkpoints=None,
    engine: str = "auto",
    workers: int = 1,
) -> SweepResult:
    """Worst-case (over the instance grid) mean regret at every checkpoint."""
    if not instances:
        raise NumericError("instance grid must be nonempty")
    if not policies:
        raise NumericError("policy list must be nonempty")
    cps = _resolve_checkpoints(n, checkpoints)
    per = np.empty((len(policies), len(instances), cps.shape[0]), dtype=np.float64)
    tasks = [
        (instances[j], policies[p], n, reps, seed, checkpoints, engine)
        for p in range(len(policies))
        for j in range(len(instances))
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    pos = 0
    for p in range(len(policies)):
        for j in range(len(instances)):
            per[p, j] = results[pos]
            pos += 1
    max_regret = per.max(axis=1)
    argmax = per.argmax(axis=1)  # first (lowest-index) maximizer
    return SweepResult(cps, tuple(policies), per, max_regret, argmax)


def _sweep_task(args):
    instance, policy, n, reps, seed, checkpoints, engine = args
    return expected_regret(instance, policy, n, reps, seed, checkpoints, engine).mean


def beta_pair_instances(
    grid_values: Sequence[float],
    functional: FunctionalSpec,
    oracle_grid: int = DEFAULT_ORACLE_GRID,
) -> list:
    """All Beta(1, p1) x Beta(1, p2) instances with p1 < p2 from the grid."""
    vals = list(grid_values)
    out = []
    for i, p1 in enumerate(vals):
        for p2 in vals[i + 1 :]:
            out.append(
                Instance(
                    (Beta(1.0, p1), Beta(1.0, p2)),
                    functional,
                    oracle_grid,
                    label=f"beta(1,{p1:g})|beta(1,{p2:g})",
                )
            )
    return out


@dataclass(frozen=True)
class RelativeRegretTable:
    ns: tuple
    rows: tuple  # (functional_label, {n: ratio})


def relative_regret_table(
    ns: Sequence[int],
    grid_values: Sequence[float],
    functionals: Sequence[Tuple[str, FunctionalSpec]],
    reps: int,
    seed: int,
    etc_policy_factory,
    ucb_policy_factory,
    engine: str = "auto",
    workers: int = 1,
    oracle_grid: int = DEFAULT_ORACLE_GRID,
) -> RelativeRegretTable:
    """Terminal max regret of the horizon-aware ETC policy relative to F-UCB.

    The ETC policy is horizon-bound, so it is re-run for every n; the F-UCB
    policy is anytime, so one sweep at max(ns) provides every column.
    A 0/0 column is reported as NaN.
    """
    ns = sorted(int(n) for n in ns)
    n_max = ns[-1]
    rows = []
    for label, functional in functionals:
        instances = beta_pair_instances(grid_values, functional, oracle_grid)
        ucb = ucb_policy_factory(functional)
        ucb_sweep = max_regret_sweep(
            instances, [ucb], n_max, reps, seed, checkpoints=ns, engine=engine,
            workers=workers,
        )
        ucb_at = {
            int(t): ucb_sweep.max_regret[0, i]
            for i, t in enumerate(ucb_sweep.checkpoints)
        }
        ratios = {}
        for n in ns:
            etc = etc_policy_factory(functional)
            etc_sweep = max_regret_sweep(
                instances, [etc], n, reps, seed, checkpoints=[n], engine=engine,
                workers=workers,
            )
            etc_val = etc_sweep.max_regret[0, -1]
            ucb_val = ucb_at[n]
            ratios[n] = etc_val / ucb_val if ucb_val > 0 else math.nan
        rows.append((label, ratios))
    return RelativeRegretTable(tuple(ns), tuple(rows))
