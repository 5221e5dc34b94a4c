"""Engine equivalence: compiled vs pure kernels must match exactly; both must
match the from-scratch reference loop; incremental functional values must
agree with scratch recomputation to 1e-12."""

import numpy as np
import pytest

from fbandit import _engine
from fbandit._engine.common import compile_functional, rank_arrays
from fbandit._engine.pure import _Fenwick
from fbandit.distributions import Beta, FiniteDiscrete, PointMass
from fbandit.ecdf import UNIT_INTERVAL, ecdf_from_samples
from fbandit.functionals import (
    AtkinsonWelfare,
    GiniAbs,
    GiniMeanDiff,
    GiniWelfare,
    Kolm,
    Mean,
    PMean,
    Quantile,
    SchutzAbs,
    SchutzWelfare,
    Variance,
    evaluate,
)
from fbandit.policies import ETCES, ETCT, ETCHorizon, FUCB, FaMOSS, PolicySpec
from fbandit.rng import RandomSource
from fbandit.simulation import Instance, run_episode

U = UNIT_INTERVAL

ENGINE_FUNCTIONALS = [
    Mean(U),
    Variance(U),
    PMean(U, p=2.0),
    AtkinsonWelfare(U, eps=0.5),
    Kolm(U, kappa=1.5),
    GiniAbs(U),
    GiniMeanDiff(U),
    GiniWelfare(U),
    SchutzAbs(U),
    SchutzWelfare(U),
    Quantile(U, alpha=0.3, r=1.0),
]

POLICIES = [
    FUCB(2.01),
    FaMOSS(),
    ETCHorizon("cyclic"),
    ETCHorizon("uniform-random"),
    ETCES(0.5),
    ETCT(0.5, 0.1, 0.1),
]


def test_compiled_extension_present():
    assert _engine.compiled_available(), "the Cython kernel should build in CI"


def test_fenwick_against_numpy(rng):
    n = 200
    vals = rng.random(n)
    order = np.argsort(vals, kind="stable")
    ranks = np.empty(n, dtype=int)
    ranks[order] = np.arange(1, n + 1)
    f = _Fenwick(n)
    inserted = []
    for j in range(n):
        f.add(int(ranks[j]), float(vals[j]))
        inserted.append(vals[j])
        arr = np.asarray(inserted)
        q = rng.random()
        boundary = int(np.searchsorted(np.sort(vals), q, side="right"))
        c, s = f.prefix(boundary)
        assert c == int(np.sum(arr <= q))
        assert s == pytest.approx(float(arr[arr <= q].sum()), abs=1e-12)
        k = rng.integers(1, len(arr) + 1)
        rank = f.select(int(k))
        assert np.sort(vals)[rank - 1] == pytest.approx(np.sort(arr)[k - 1])


@pytest.mark.parametrize("functional", ENGINE_FUNCTIONALS, ids=lambda f: f.name)
@pytest.mark.parametrize("variant", POLICIES, ids=lambda v: type(v).__name__)
def test_three_way_engine_equivalence(functional, variant):
    inst = Instance((Beta(1.0, 1.0), Beta(1.0, 3.0)), functional)
    policy = PolicySpec(variant, functional, 2)
    rng = RandomSource(421, 0, 0)
    n = 300
    compiled = run_episode(inst, policy, n, rng, engine="compiled", record_arms=True)
    pure = run_episode(inst, policy, n, rng, engine="pure", record_arms=True)
    generic = run_episode(inst, policy, n, rng, engine="generic", record_arms=True)
    assert np.array_equal(compiled.arms, pure.arms)
    assert np.array_equal(compiled.regret, pure.regret)
    assert np.array_equal(compiled.arms, generic.arms)
    assert np.allclose(compiled.regret, generic.regret, atol=1e-9)
    assert np.array_equal(compiled.terminal_counts, generic.terminal_counts)


def test_three_arm_equivalence():
    f = GiniWelfare(U)
    inst = Instance((Beta(1.0, 0.75), Beta(1.0, 1.0), Beta(1.0, 2.0)), f)
    for variant in (FUCB(2.01), FaMOSS(), ETCES(0.8, "uniform-random")):
        policy = PolicySpec(variant, f, 3)
        rng = RandomSource(5150, 0, 0)
        a = run_episode(inst, policy, 400, rng, engine="compiled", record_arms=True)
        b = run_episode(inst, policy, 400, rng, engine="generic", record_arms=True)
        assert np.array_equal(a.arms, b.arms)
        assert np.allclose(a.regret, b.regret, atol=1e-9)
        assert a.terminal_counts.sum() == 400


def test_equivalence_with_ties_in_streams():
    """Discrete arms produce massively tied streams; the Fenwick rank logic
    must handle them."""
    f = GiniWelfare(U)
    inst = Instance(
        (FiniteDiscrete((0.0, 0.5, 1.0), (0.3, 0.4, 0.3)), PointMass(0.5)), f
    )
    policy = PolicySpec(FUCB(2.01), f, 2)
    rng = RandomSource(7, 0, 0)
    a = run_episode(inst, policy, 500, rng, engine="compiled", record_arms=True)
    b = run_episode(inst, policy, 500, rng, engine="generic", record_arms=True)
    assert np.array_equal(a.arms, b.arms)
    assert np.allclose(a.regret, b.regret, atol=1e-9)


def _run_kernel_with_values(kernel_mod, functional, streams, n):
    """Cycle deterministically over the arms (ETC with n1 = n) recording the
    pulled arm's refreshed value after every update."""
    cf = compile_functional(functional)
    sv, rk, ubb = rank_arrays(streams)
    out_regret = np.zeros(1)
    out_counts = np.zeros(streams.shape[0], dtype=np.int64)
    out_arms = np.empty(n, dtype=np.int64)
    out_values = np.empty(n, dtype=np.float64)
    kernel_mod.run_episode_kernel(
        streams, sv, rk, ubb,
        np.empty(0), np.zeros(streams.shape[0]), np.array([n], dtype=np.int64),
        2, 0.0, 1.0, n, 0, 0, 0.0, cf.kind, cf.p1,
        out_regret, out_counts, out_arms, out_values,
    )
    return out_arms, out_values


@pytest.mark.parametrize("engine_name", ["pure", "compiled"])
@pytest.mark.parametrize("functional", ENGINE_FUNCTIONALS, ids=lambda f: f.name)
def test_incremental_matches_scratch_to_1e12(functional, engine_name):
    """Correctness mode: every incremental per-arm value equals the plug-in
    value recomputed from scratch on that arm's sample prefix, to 1e-12."""
    kernel_mod = _engine.get_kernel(engine_name)[0]
    gen = RandomSource(11).generator()
    n = 400
    streams = np.vstack(
        [Beta(2.0, 2.0).draw(gen, n), Beta(1.0, 3.0).draw(gen, n)]
    )
    arms, values = _run_kernel_with_values(kernel_mod, functional, streams, n)
    pulls = [0, 0]
    for t in range(n):
        arm = int(arms[t])
        pulls[arm] += 1
        prefix = streams[arm, : pulls[arm]]
        scratch = evaluate(functional, ecdf_from_samples(prefix, U))
        assert values[t] == pytest.approx(scratch, abs=1e-12)


def test_etc_commit_skips_unexplored_arms():
    """A huge ETC-ES delta gives n1 = 2; uniform exploration then sometimes
    pulls one arm twice, and the commitment must go to an explored arm."""
    f = Mean(U)
    inst = Instance((PointMass(0.9), PointMass(0.1)), f)
    policy = PolicySpec(ETCES(10.0, "uniform-random"), f, 2)
    saw_unexplored = 0
    for r in range(40):
        rng = RandomSource(606, 0, r)
        outs = {}
        for engine in ("compiled", "pure", "generic"):
            outs[engine] = run_episode(inst, policy, 30, rng, engine=engine,
                                       record_arms=True)
        for engine in ("pure", "generic"):
            assert np.array_equal(outs["compiled"].arms, outs[engine].arms)
        arms = outs["compiled"].arms
        explored = set(arms[:2].tolist())
        committed = int(arms[-1])
        assert committed in explored
        if len(explored) == 1:
            saw_unexplored += 1
            # the single explored arm is committed even when it is the worse one
            assert committed == next(iter(explored))
    assert saw_unexplored > 0  # the edge case actually occurred


def test_anytime_truncation_property():
    """For the anytime index policies, an episode of length n2 truncated at n1
    is the episode of length n1, checkpoint for checkpoint."""
    f = GiniWelfare(U)
    inst = Instance((Beta(1.0, 1.0), Beta(1.0, 1.25)), f)
    for variant in (FUCB(2.01), FaMOSS()):
        policy = PolicySpec(variant, f, 2)
        rng = RandomSource(3131, 0, 0)
        long = run_episode(inst, policy, 800, rng, checkpoints=[100, 400, 800],
                           record_arms=True)
        short = run_episode(inst, policy, 400, rng, checkpoints=[100, 400],
                            record_arms=True)
        assert np.array_equal(long.arms[:400], short.arms)
        assert np.array_equal(long.regret[:2], short.regret)


def test_forced_engine_env(monkeypatch):
    monkeypatch.setenv("FBANDIT_ENGINE", "pure")
    # the env override is read at import; get_kernel("auto") honors the module
    # state captured then, so just exercise the explicit paths here
    assert _engine.get_kernel("pure")[1] == "pure"
    assert _engine.get_kernel("compiled")[1] == "compiled"
    with pytest.raises(ValueError):
        _engine.get_kernel("nope")
