# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled episode kernel: the hot twin of fbandit._engine.pure.

Keep the algorithm and floating-point operation order in lockstep with
pure.run_episode_kernel; equivalence tests assert identical trajectories.
"""

from libc.math cimport INFINITY, ceil, exp, log, pow, sqrt
from libc.stdlib cimport calloc, free, malloc

import numpy as np

ENGINE_NAME = "compiled"

DEF F_MEAN = 0
DEF F_VARIANCE = 1
DEF F_PMEAN = 2
DEF F_ATK_WELFARE = 3
DEF F_KOLM = 4
DEF F_GINI_ABS = 5
DEF F_GINI_MEAN_DIFF = 6
DEF F_GINI_WELFARE = 7
DEF F_SCHUTZ_ABS = 8
DEF F_SCHUTZ_WELFARE = 9
DEF F_QUANTILE = 10

DEF P_FUCB = 0
DEF P_FAMOSS = 1
DEF P_ETC = 2

DEF EXPLORE_UNIFORM = 1
DEF COMMIT_TEST = 1


cdef inline void fen_add(long* cnt, double* sm, long n, long rank, double value) nogil:
    cdef long i = rank
    while i <= n:
        cnt[i] += 1
        sm[i] += value
        i += i & (-i)


cdef inline void fen_prefix(long* cnt, double* sm, long rank,
                            long* out_c, double* out_s) nogil:
    cdef long c = 0
    cdef double s = 0.0
    cdef long i = rank
    while i > 0:
        c += cnt[i]
        s += sm[i]
        i -= i & (-i)
    out_c[0] = c
    out_s[0] = s


cdef inline long fen_select(long* cnt, long n, long topbit, long k) nogil:
    cdef long pos = 0
    cdef long rem = k
    cdef long bit = topbit
    cdef long nxt
    while bit > 0:
        nxt = pos + bit
        if nxt <= n and cnt[nxt] < rem:
            pos = nxt
            rem -= cnt[nxt]
        bit >>= 1
    return pos + 1


cdef inline long upper_rank(const double* row, long n, double v) nogil:
    cdef long lo = 0
    cdef long hi = n
    cdef long mid
    while lo < hi:
        mid = (lo + hi) // 2
        if row[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def run_episode_kernel(
    double[:, ::1] streams,
    double[:, ::1] sorted_vals,
    long[:, ::1] ranks,
    long[:, ::1] ub,
    double[::1] policy_u,
    double[::1] deltas,
    long[::1] checkpoints,
    int policy_kind,
    double beta,
    double C,
    long n1,
    int explore,
    int commit,
    double c_alpha,
    int func_kind,
    double p1,
    double[::1] out_regret,
    long[::1] out_counts,
    long[::1] out_arms,
    double[::1] out_values=None,
):
    cdef long K = streams.shape[0]
    cdef long n = streams.shape[1]
    cdef bint use_fenwick = (
        func_kind == F_GINI_ABS or func_kind == F_GINI_MEAN_DIFF
        or func_kind == F_GINI_WELFARE or func_kind == F_SCHUTZ_ABS
        or func_kind == F_SCHUTZ_WELFARE or func_kind == F_QUANTILE
    )
    cdef bint is_gini = (
        func_kind == F_GINI_ABS or func_kind == F_GINI_MEAN_DIFF
        or func_kind == F_GINI_WELFARE
    )
    cdef bint record = out_arms.shape[0] > 0
    cdef bint record_values = out_values is not None and out_values.shape[0] > 0
    cdef bint track_s2 = (
        func_kind == F_VARIANCE or func_kind == F_PMEAN
        or func_kind == F_ATK_WELFARE or func_kind == F_KOLM
    )

    cdef long* counts = <long*> calloc(K, sizeof(long))
    cdef double* values = <double*> calloc(K, sizeof(double))
    cdef double* s1 = <double*> calloc(K, sizeof(double))
    cdef double* c1 = <double*> calloc(K, sizeof(double))
    cdef double* s2 = <double*> calloc(K, sizeof(double))
    cdef double* c2 = <double*> calloc(K, sizeof(double))
    cdef double* pair = <double*> calloc(K, sizeof(double))
    cdef double* cpair = <double*> calloc(K, sizeof(double))
    cdef long** fcnt = NULL
    cdef double** fsm = NULL
    cdef long topbit = 1
    cdef long i

    if use_fenwick:
        while topbit * 2 <= n:
            topbit *= 2
        fcnt = <long**> malloc(K * sizeof(long*))
        fsm = <double**> malloc(K * sizeof(double*))
        for i in range(K):
            fcnt[i] = <long*> calloc(n + 1, sizeof(long))
            fsm[i] = <double*> calloc(n + 1, sizeof(double))

    cdef long committed = -1
    cdef long u_idx = 0
    cdef long cp_idx = 0
    cdef double cumreg = 0.0
    cdef long n_cp = checkpoints.shape[0]
    cdef double inv_pow = 0.0
    if func_kind == F_ATK_WELFARE:
        inv_pow = 1.0 / (1.0 - p1)

    cdef long t, arm, m_pre, m, si, cnt_le, b, k, rank
    cdef double x, best, idx, bonus, logt, ratio, lg, y, tt, inc, v2
    cdef double val, mu, g, sabs, sum_le, d
    cdef long cl

    try:
        for t in range(1, n + 1):
            # --- select arm -------------------------------------------------
            if policy_kind == P_ETC:
                if t <= n1:
                    if explore == EXPLORE_UNIFORM:
                        arm = <long> (policy_u[u_idx] * K)
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
                    best = -INFINITY
                    arm = 0
                    logt = log(<double> t)
                    for i in range(K):
                        si = counts[i]
                        if policy_kind == P_FUCB:
                            bonus = C * sqrt(beta * logt / (2.0 * si))
                        else:
                            ratio = (t - 1.0) / (K * si)
                            lg = log(ratio) if ratio > 1.0 else 0.0
                            bonus = C * sqrt(beta / si * lg)
                        idx = values[i] + bonus
                        if idx > best:
                            best = idx
                            arm = i
            # --- observe outcome and update ----------------------------------
            m_pre = counts[arm]
            x = streams[arm, m_pre]
            if use_fenwick:
                if is_gini:
                    fen_prefix(fcnt[arm], fsm[arm], ub[arm, m_pre], &cl, &sum_le)
                    cnt_le = cl
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
                fen_add(fcnt[arm], fsm[arm], n, ranks[arm, m_pre], x)
            y = x - c1[arm]
            tt = s1[arm] + y
            c1[arm] = (tt - s1[arm]) - y
            s1[arm] = tt
            if track_s2:
                if func_kind == F_VARIANCE:
                    v2 = x * x
                elif func_kind == F_PMEAN:
                    v2 = pow(x, p1)
                elif func_kind == F_ATK_WELFARE:
                    v2 = pow(x, 1.0 - p1)
                else:
                    v2 = exp(-p1 * x)
                y = v2 - c2[arm]
                tt = s2[arm] + y
                c2[arm] = (tt - s2[arm]) - y
                s2[arm] = tt
            m = m_pre + 1
            counts[arm] = m
            # --- refresh the pulled arm's functional value --------------------
            if func_kind == F_MEAN:
                val = s1[arm] / m
            elif func_kind == F_VARIANCE:
                mu = s1[arm] / m
                val = s2[arm] / m - mu * mu
            elif func_kind == F_PMEAN:
                val = s2[arm] / m
            elif func_kind == F_ATK_WELFARE:
                val = pow(s2[arm] / m, inv_pow)
            elif func_kind == F_KOLM:
                val = s1[arm] / m + log(s2[arm] / m) / p1
            elif is_gini:
                g = pair[arm] / ((<double> m) * m)
                if func_kind == F_GINI_ABS:
                    val = g
                elif func_kind == F_GINI_MEAN_DIFF:
                    val = 2.0 * g
                else:
                    val = s1[arm] / m - g
            elif func_kind == F_SCHUTZ_ABS or func_kind == F_SCHUTZ_WELFARE:
                mu = s1[arm] / m
                b = upper_rank(&sorted_vals[arm, 0], n, mu)
                fen_prefix(fcnt[arm], fsm[arm], b, &cl, &sum_le)
                cnt_le = cl
                sabs = ((2.0 * cnt_le - m) * mu + s1[arm] - 2.0 * sum_le) / (2.0 * m)
                val = sabs if func_kind == F_SCHUTZ_ABS else mu - sabs
            else:  # F_QUANTILE
                k = <long> ceil(p1 * m - 1e-9)
                if k < 1:
                    k = 1
                elif k > m:
                    k = m
                rank = fen_select(fcnt[arm], n, topbit, k)
                val = sorted_vals[arm, rank - 1]
            values[arm] = val
            if record_values:
                out_values[t - 1] = val
            # --- ETC commitment at the end of exploration ---------------------
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
                    best = -INFINITY
                    committed = 0
                    for i in range(K):
                        if counts[i] > 0 and values[i] > best:
                            best = values[i]
                            committed = i
            # --- regret bookkeeping -------------------------------------------
            cumreg += deltas[arm]
            if record:
                out_arms[t - 1] = arm
            if cp_idx < n_cp and t == checkpoints[cp_idx]:
                out_regret[cp_idx] = cumreg
                cp_idx += 1

        for i in range(K):
            out_counts[i] = counts[i]
    finally:
        free(counts)
        free(values)
        free(s1)
        free(c1)
        free(s2)
        free(c2)
        free(pair)
        free(cpair)
        if fcnt != NULL:
            for i in range(K):
                free(fcnt[i])
            free(fcnt)
        if fsm != NULL:
            for i in range(K):
                free(fsm[i])
            free(fsm)
    return 0
