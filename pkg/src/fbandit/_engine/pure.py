"""Pure-Python episode kernel: the fallback twin of the compiled extension.

Implements exactly the same algorithm as fbandit._engine._kernel, step for
step and in the same floating-point operation order, so the two engines
produce identical trajectories.  Per-arm state is a pair of Fenwick trees over
the ranks of the pre-sorted outcome stream (counts and value sums), plus
Kahan-compensated running sums, which makes every incremental functional
update O(log n).
"""

from __future__ import annotations

import math

from .common import (
    COMMIT_TEST,
    EXPLORE_UNIFORM,
    F_ATK_WELFARE,
    F_GINI_ABS,
    F_GINI_MEAN_DIFF,
    F_GINI_WELFARE,
    F_KOLM,
    F_MEAN,
    F_PMEAN,
    F_QUANTILE,
    F_SCHUTZ_ABS,
    F_SCHUTZ_WELFARE,
    F_VARIANCE,
    FENWICK_KINDS,
    P_ETC,
    P_FUCB,
)

ENGINE_NAME = "pure"


class _Fenwick:
    __slots__ = ("n", "cnt", "sm", "topbit")

    def __init__(self, n: int):
        self.n = n
        self.cnt = [0] * (n + 1)
        self.sm = [0.0] * (n + 1)
        top = 1
        while top * 2 <= n:
            top *= 2
        self.topbit = top

    def add(self, rank: int, value: float):
        i = rank
        while i <= self.n:
            self.cnt[i] += 1
            self.sm[i] += value
            i += i & (-i)

    def prefix(self, rank: int):
        c = 0
        s = 0.0
        i = rank
        while i > 0:
            c += self.cnt[i]
            s += self.sm[i]
            i -= i & (-i)
        return c, s

    def select(self, k: int) -> int:
        """Smallest 1-based rank whose cumulative count reaches k."""
        pos = 0
        rem = k
        bit = self.topbit
        while bit > 0:
            nxt = pos + bit
            if nxt <= self.n and self.cnt[nxt] < rem:
                pos = nxt
                rem -= self.cnt[nxt]
            bit >>= 1
        return pos + 1


def _upper_rank(sorted_row, v: float) -> int:
    """Count of sorted_row values <= v (binary search, side='right')."""
    lo, hi = 0, len(sorted_row)
    while lo < hi:
        mid = (lo + hi) // 2
        if sorted_row[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def run_episode_kernel(
    streams,
    sorted_vals,
    ranks,
    ub,
    policy_u,
    deltas,
    checkpoints,
    policy_kind,
    beta,
    C,
    n1,
    explore,
    commit,
    c_alpha,
    func_kind,
    p1,
    out_regret,
    out_counts,
    out_arms,
    out_values=None,
):
    K, n = streams.shape
    use_fenwick = func_kind in FENWICK_KINDS
    record = out_arms.shape[0] > 0
    record_values = out_values is not None and out_values.shape[0] > 0

    counts = [0] * K
    values = [0.0] * K
    s1 = [0.0] * K
    c1 = [0.0] * K
    s2 = [0.0] * K
    c2 = [0.0] * K
    pair = [0.0] * K
    cpair = [0.0] * K
    fen = [_Fenwick(n) for _ in range(K)] if use_fenwick else None

    committed = -1
    u_idx = 0
    cp_idx = 0
    cumreg = 0.0
    n_cp = checkpoints.shape[0]

    inv_pow = 0.0
    if func_kind == F_ATK_WELFARE:
        inv_pow = 1.0 / (1.0 - p1)

    for t in range(1, n + 1):
        # --- select arm -----------------------------------------------------
        if policy_kind == P_ETC:
            if t <= n1:
                if explore == EXPLORE_UNIFORM:
                    arm = int(policy_u[u_idx] * K)
                    if arm >= K:
                        arm = K - 1
                    u_idx += 1
                else:
                    arm = t % K
            else:
                arm = committed
        else:
            if t <= K:
                arm = t - 1
            else:
                best = -math.inf
                arm = 0
                logt = math.log(t)
                for i in range(K):
                    si = counts[i]
                    if policy_kind == P_FUCB:
                        bonus = C * math.sqrt(beta * logt / (2.0 * si))
                    else:
                        ratio = (t - 1.0) / (K * si)
                        lg = math.log(ratio) if ratio > 1.0 else 0.0
                        bonus = C * math.sqrt(beta / si * lg)
                    idx = values[i] + bonus
                    if idx > best:
                        best = idx
                        arm = i
        # --- observe outcome and update ------------------------------------
        m_pre = counts[arm]
        x = streams[arm, m_pre]
        if use_fenwick:
            f = fen[arm]
            if func_kind in (F_GINI_ABS, F_GINI_MEAN_DIFF, F_GINI_WELFARE):
                cnt_le, sum_le = f.prefix(ub[arm, m_pre])
                inc = (
                    x * cnt_le
                    - sum_le
                    + (s1[arm] - sum_le)
                    - x * (m_pre - cnt_le)
                )
                y = inc - cpair[arm]
                tt = pair[arm] + y
                cpair[arm] = (tt - pair[arm]) - y
                pair[arm] = tt
            f.add(ranks[arm, m_pre], x)
        # kahan add to s1
        y = x - c1[arm]
        tt = s1[arm] + y
        c1[arm] = (tt - s1[arm]) - y
        s1[arm] = tt
        if func_kind in (F_VARIANCE, F_PMEAN, F_ATK_WELFARE, F_KOLM):
            if func_kind == F_VARIANCE:
                v2 = x * x
            elif func_kind == F_PMEAN:
                v2 = x**p1
            elif func_kind == F_ATK_WELFARE:
                v2 = x ** (1.0 - p1)
            else:
                v2 = math.exp(-p1 * x)
            y = v2 - c2[arm]
            tt = s2[arm] + y
            c2[arm] = (tt - s2[arm]) - y
            s2[arm] = tt
        m = m_pre + 1
        counts[arm] = m
        # --- refresh the pulled arm's functional value ----------------------
        if func_kind == F_MEAN:
            val = s1[arm] / m
        elif func_kind == F_VARIANCE:
            mu = s1[arm] / m
            val = s2[arm] / m - mu * mu
        elif func_kind == F_PMEAN:
            val = s2[arm] / m
        elif func_kind == F_ATK_WELFARE:
            val = (s2[arm] / m) ** inv_pow
        elif func_kind == F_KOLM:
            val = s1[arm] / m + math.log(s2[arm] / m) / p1
        elif func_kind in (F_GINI_ABS, F_GINI_MEAN_DIFF, F_GINI_WELFARE):
            g = pair[arm] / (float(m) * m)
            if func_kind == F_GINI_ABS:
                val = g
            elif func_kind == F_GINI_MEAN_DIFF:
                val = 2.0 * g
            else:
                val = s1[arm] / m - g
        elif func_kind in (F_SCHUTZ_ABS, F_SCHUTZ_WELFARE):
            mu = s1[arm] / m
            b = _upper_rank(sorted_vals[arm], mu)
            cnt_le, sum_le = fen[arm].prefix(b)
            sabs = ((2.0 * cnt_le - m) * mu + s1[arm] - 2.0 * sum_le) / (2.0 * m)
            val = sabs if func_kind == F_SCHUTZ_ABS else mu - sabs
        else:  # F_QUANTILE
            k = math.ceil(p1 * m - 1e-9)
            if k < 1:
                k = 1
            elif k > m:
                k = m
            rank = fen[arm].select(k)
            val = sorted_vals[arm][rank - 1]
        values[arm] = val
        if record_values:
            out_values[t - 1] = val
        # --- ETC commitment at the end of exploration -----------------------
        if policy_kind == P_ETC and t == n1 and committed < 0:
            if commit == COMMIT_TEST:
                d = values[0] - values[1]
                if d < 0.0:
                    d = -d
                if d >= c_alpha:
                    committed = 0 if values[0] >= values[1] else 1
                else:
                    committed = 0 if policy_u[u_idx] < 0.5 else 1
                    u_idx += 1
            else:
                best = -math.inf
                committed = 0
                for i in range(K):
                    if counts[i] > 0 and values[i] > best:
                        best = values[i]
                        committed = i
        # --- regret bookkeeping ---------------------------------------------
        cumreg += deltas[arm]
        if record:
            out_arms[t - 1] = arm
        if cp_idx < n_cp and t == checkpoints[cp_idx]:
            out_regret[cp_idx] = cumreg
            cp_idx += 1

    for i in range(K):
        out_counts[i] = counts[i]
    return 0
