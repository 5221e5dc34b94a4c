"""Policy state machines: initialization lengths, arm selection, updates, and
commitment rules."""

import math

import numpy as np
import pytest

from fbandit.ecdf import UNIT_INTERVAL
from fbandit.errors import DataError, NumericError
from fbandit.functionals import GiniWelfare, Mean
from fbandit.policies import (
    ETCES,
    ETCT,
    ETCHorizon,
    FUCB,
    FaMOSS,
    GenericUCB,
    PolicySpec,
    etc_commit,
    etct_threshold,
    famoss_bonus,
    fucb_bonus,
    policy_init,
    select_arm,
    update,
)
from fbandit.rng import RandomSource

U = UNIT_INTERVAL
GW = GiniWelfare(U)  # C = 2
MEAN = Mean(U)


def spec(variant, functional=GW, K=2):
    return PolicySpec(variant, functional, K)


# ---------------------------------------------------------------------------
# initialization lengths

def test_etc_es_exploration_length():
    st = policy_init(spec(ETCES(0.3)))
    assert st.n1 == 524


def test_etc_t_exploration_length():
    st = policy_init(spec(ETCT(0.3, 0.1, 0.1)))
    assert st.n1 == 2624


def test_etc_horizon_exploration_length():
    st = policy_init(spec(ETCHorizon()), n=1000)
    assert st.n1 == 200
    assert policy_init(spec(ETCHorizon()), n=4).n1 == 4  # min(K ceil(...), n)
    with pytest.raises(NumericError):
        policy_init(spec(ETCHorizon()))


def test_etc_t_requires_two_arms():
    with pytest.raises(NumericError):
        spec(ETCT(0.3, 0.1, 0.1), K=3)


def test_beta_ranges_validated():
    with pytest.raises(NumericError):
        FUCB(2.0)
    with pytest.raises(NumericError):
        FaMOSS(0.25)
    with pytest.raises(NumericError):
        GenericUCB("nope", 2.01)


# ---------------------------------------------------------------------------
# selection

def test_fucb_initialization_rounds():
    st = policy_init(spec(FUCB()))
    assert select_arm(st) == 0
    update(st, 0, 0.3)
    assert select_arm(st) == 1
    update(st, 1, 0.7)
    assert st.counts == [1, 1]
    assert st.values[0] == pytest.approx(0.3)
    assert st.values[1] == pytest.approx(0.7)


def test_fucb_exact_tie_prefers_smallest_index():
    st = policy_init(spec(FUCB(2.01)))
    update(st, select_arm(st), 0.5)
    update(st, select_arm(st), 0.5)
    assert select_arm(st) == 0


def test_fucb_index_value():
    # value 0.5, C = 2, beta = 2.01, t = 3, pulls = 1
    got = 0.5 + fucb_bonus(2.0, 2.01, 1, 3)
    assert got == pytest.approx(0.5 + 2.0 * math.sqrt(2.01 * math.log(3.0) / 2.0), rel=1e-12)
    assert got == pytest.approx(2.6015, abs=5e-4)


def test_famoss_bonus_clamps_to_zero():
    # S_i = 2 each, t - 1 = 4, K = 2: log+((4)/(2*2)) = 0
    assert famoss_bonus(2.0, 1 / 3.99, 2, 2, 5) == 0.0
    # clamp holds whenever S_i >= (t-1)/K
    for t in range(3, 40):
        for s in range(1, t):
            if s >= (t - 1) / 2:
                assert famoss_bonus(1.0, 0.3, 2, s, t) == 0.0


def test_famoss_prefers_argmax_value_when_bonus_zero():
    # with counts [2, 2] at round 5, log+((t-1)/(K S_i)) = log+(1) = 0 for both
    st = policy_init(spec(FaMOSS()))
    st.t, st.counts, st.values = 4, [2, 2], [0.3, 0.8]
    assert select_arm(st) == 1
    st.pending_arm = None
    st.values = [0.8, 0.8]  # exact tie goes to the smaller index
    assert select_arm(st) == 0


def test_generic_ucb_matches_named_policies():
    a = policy_init(spec(FUCB(2.5)))
    b = policy_init(spec(GenericUCB("fucb", 2.5)))
    gen = RandomSource(5).generator()
    for t in range(40):
        arm_a = select_arm(a)
        arm_b = select_arm(b)
        assert arm_a == arm_b
        y = float(gen.random())
        update(a, arm_a, y)
        update(b, arm_b, y)


def test_index_policies_visit_every_arm_once_first():
    for variant in (FUCB(), FaMOSS()):
        st = policy_init(PolicySpec(variant, MEAN, 4))
        arms = []
        for _ in range(4):
            arm = select_arm(st)
            arms.append(arm)
            update(st, arm, 0.5)
        assert arms == [0, 1, 2, 3]
        assert st.counts == [1, 1, 1, 1]


def test_cyclic_exploration_order():
    st = policy_init(spec(ETCES(0.3, exploration="cyclic")))
    arms = []
    for _ in range(4):
        arm = select_arm(st)
        arms.append(arm)
        update(st, arm, 0.5)
    assert arms == [1, 0, 1, 0]  # (t mod K) with 1-based t


def test_uniform_exploration_needs_rng():
    st = policy_init(spec(ETCHorizon("uniform-random")), n=100)
    with pytest.raises(NumericError):
        select_arm(st)


def test_horizon_guard():
    st = policy_init(spec(ETCHorizon("cyclic")), n=3)
    for _ in range(3):
        update(st, select_arm(st), 0.5)
    with pytest.raises(NumericError):
        select_arm(st)


# ---------------------------------------------------------------------------
# update

def test_update_rejects_out_of_support():
    st = policy_init(spec(FUCB()))
    arm = select_arm(st)
    with pytest.raises(DataError):
        update(st, arm, 1.2)


def test_update_rejects_wrong_arm():
    st = policy_init(spec(FUCB()))
    select_arm(st)
    with pytest.raises(NumericError):
        update(st, 1, 0.5)


def test_counts_sum_to_t():
    st = policy_init(spec(FaMOSS()))
    gen = RandomSource(8).generator()
    for t in range(1, 101):
        arm = select_arm(st)
        update(st, arm, float(gen.random()))
        assert sum(st.counts) == t


# ---------------------------------------------------------------------------
# commitment

def test_es_commit_tie_prefers_smallest():
    st = policy_init(spec(ETCES(0.3), MEAN))
    st.n1 = 4  # shorten exploration for the test
    for _ in range(4):
        update(st, select_arm(st), 0.4)
    assert st.committed == 0
    assert select_arm(st) == 0


def test_commitment_immutable():
    st = policy_init(spec(ETCES(0.3), MEAN))
    st.n1 = 2
    update(st, select_arm(st), 0.1)
    update(st, select_arm(st), 0.9)
    first = st.committed
    assert etc_commit(st) == first
    for _ in range(50):
        arm = select_arm(st)
        assert arm == first
        update(st, arm, 0.5)
    assert st.committed == first


def test_etct_threshold_value():
    assert etct_threshold(2.0, 0.1, 2624) == pytest.approx(0.14997722294779883, abs=1e-12)


def test_etct_rejecting_commits_to_argmax():
    # n1 = 40, C = 1: c_alpha = sqrt(2 log(40) / 20) ~ 0.607 < the 0.9 gap,
    # so the test rejects and the commitment is deterministic (no coin drawn)
    st = policy_init(spec(ETCT(0.3, 0.1, 0.1), MEAN))
    st.n1 = 40
    outcomes = {1: 0.05, 0: 0.95}
    for _ in range(40):
        arm = select_arm(st)
        update(st, arm, outcomes[arm])
    etc_commit(st)
    assert st.committed == 0


def test_etct_coin_flip_balance():
    """At an exact tie the commitment is a fair coin: over 10^4 seeds each arm
    is chosen 50% +/- 1.5% (a 3 sigma band)."""
    picks = []
    for r in range(10_000):
        st = policy_init(spec(ETCT(0.3, 0.1, 0.1), MEAN))
        st.n1 = 4
        for _ in range(4):
            update(st, select_arm(st), 0.5)
        etc_commit(st, RandomSource(1234, replication_index=r).generator())
        picks.append(st.committed)
    frac = np.mean(picks)
    assert abs(frac - 0.5) <= 0.015


def test_etct_power_at_large_gap():
    """With the full n1 = 2624 and a gap well above c_alpha, the test rejects
    and commits to the better arm."""
    st = policy_init(spec(ETCT(0.3, 0.1, 0.1), MEAN))
    gen = RandomSource(77).generator()
    for _ in range(st.n1):
        arm = select_arm(st)
        update(st, arm, float(np.clip(gen.random() * 0.2 + (0.75 if arm == 1 else 0.1), 0, 1)))
    etc_commit(st, gen)
    assert st.committed == 1
