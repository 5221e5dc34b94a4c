"""Catalog of distributional functionals with plug-in evaluation and certified
sup-norm Lipschitz constants.

Each functional T maps a cdf on [a, b] to a real number and satisfies the
restricted-Lipschitz property |T(F) - T(G)| <= C ||F - G||_inf for F in its
domain and arbitrary G; the constant C drives every exploration bonus,
confidence interval, and sample-size rule in the package.  Plug-in evaluation
means T applied directly to the empirical cdf, so degree-2 kernels are
V-statistics: full with-replacement double sums including self-pairs.

Degenerate-case conventions: the relative Gini and Schutz coefficients are 0
at the point mass at 0, the Atkinson index with eps in (0,1) is 1 there, the
generalized-entropy index with c in (0,1) is -1/(c(c-1)) there, and the
Sen-Kakwani weight uses 0/0 := 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import ClassVar, Optional, Tuple

import numpy as np

from .ecdf import EmpiricalCdf, SupportInterval, _order_index
from .errors import DataError, NumericError

__all__ = [
    "FunctionalSpec",
    "Mean",
    "PMean",
    "Variance",
    "GiniMeanDiff",
    "GiniAbs",
    "GiniRel",
    "SchutzAbs",
    "SchutzRel",
    "EntropyGE",
    "Atkinson",
    "AtkinsonWelfare",
    "Kolm",
    "GiniWelfare",
    "SchutzWelfare",
    "WelfareFromRel",
    "WelfareFromAbs",
    "Quantile",
    "LorenzQ",
    "LorenzOrdinate",
    "LinearInequality",
    "AbsLinearInequality",
    "TrimmedU",
    "PovertyLine",
    "Headcount",
    "SenKakwani",
    "FGT",
    "evaluate",
    "lipschitz_constant",
    "domain_check",
    "u_functional",
    "lorenz",
    "DomainReport",
    "DomainCondition",
]


# ---------------------------------------------------------------------------
# shared plug-in building blocks (x is the sorted sample array)

_PAIRWISE_CUTOVER = 64


def _gini_mean_diff(x: np.ndarray) -> float:
    """(1/m^2) sum_i sum_j |x_i - x_j|.

    Small samples use the literal pairwise double sum (condition number 1, so
    it tracks a reference double loop to a few ulp); larger ones the
    sorted-order identity, which is O(m) on the already-sorted sample.
    """
    m = x.shape[0]
    if m <= _PAIRWISE_CUTOVER:
        return float(np.abs(x[:, None] - x[None, :]).sum() / (m * m))
    coef = 2.0 * np.arange(m) + 1.0 - m
    return float(2.0 * np.dot(coef, x) / (m * m))


def _variance_v(x: np.ndarray) -> float:
    """(1/(2 m^2)) sum_i sum_j (x_i - x_j)^2, the V-statistic variance."""
    m = x.shape[0]
    if m <= _PAIRWISE_CUTOVER:
        d = x[:, None] - x[None, :]
        return float((d * d).sum() / (2.0 * m * m))
    xm = x.mean()
    return float(np.mean((x - xm) ** 2))


def _schutz_abs(x: np.ndarray) -> float:
    return float(0.5 * np.abs(x - x.mean()).mean())


def _lorenz_q(x: np.ndarray, u: float) -> float:
    """Exact integral of the step quantile function over [0, u]."""
    m = x.shape[0]
    t = u * m
    k = int(math.floor(t + 1e-9))
    k = min(k, m)
    frac = t - k
    if frac < 1e-9:
        frac = 0.0
    total = float(x[:k].sum())
    if frac > 0.0 and k < m:
        total += frac * float(x[k])
    return total / m


def _require_positive_samples(x: np.ndarray, what: str) -> None:
    if x[0] <= 0.0:
        raise DataError(f"{what} requires strictly positive outcomes; found {x[0]!r}")


# ---------------------------------------------------------------------------
# catalog

@dataclass(frozen=True)
class FunctionalSpec:
    """Base descriptor: one functional plus its support interval.

    Subclasses add parameters, the plug-in formula (``value`` on a sorted
    sample array), the certified constant (``lipschitz``), and the membership
    conditions their domain imposes (``conditions``).
    """

    support: SupportInterval

    name: ClassVar[str] = "?"

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def lipschitz(self) -> float:
        raise NotImplementedError

    def conditions(self) -> tuple:
        """Domain membership conditions as (kind, parameter) pairs."""
        return ()

    def params(self) -> dict:
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "support"
        }

    @property
    def a(self) -> float:
        return self.support.a

    @property
    def b(self) -> float:
        return self.support.b

    @property
    def width(self) -> float:
        return self.support.width


@dataclass(frozen=True)
class Mean(FunctionalSpec):
    name: ClassVar[str] = "mean"

    def value(self, x):
        return float(x.mean())

    def lipschitz(self):
        return self.width


@dataclass(frozen=True)
class PMean(FunctionalSpec):
    """p-th moment; defined on supports with a = 0."""

    p: float = 1.0
    name: ClassVar[str] = "pmean"

    def __post_init__(self):
        if self.p <= 0:
            raise NumericError("pmean requires p > 0")
        if self.a != 0.0:
            raise NumericError("pmean requires support [0, b]")

    def value(self, x):
        return float(np.mean(x**self.p))

    def lipschitz(self):
        return self.b**self.p


@dataclass(frozen=True)
class Variance(FunctionalSpec):
    name: ClassVar[str] = "variance"

    def value(self, x):
        return _variance_v(x)

    def lipschitz(self):
        return self.width**2


@dataclass(frozen=True)
class GiniMeanDiff(FunctionalSpec):
    name: ClassVar[str] = "gini-mean-diff"

    def value(self, x):
        return _gini_mean_diff(x)

    def lipschitz(self):
        return 2.0 * self.width


@dataclass(frozen=True)
class GiniAbs(FunctionalSpec):
    name: ClassVar[str] = "gini-abs"

    def value(self, x):
        return 0.5 * _gini_mean_diff(x)

    def lipschitz(self):
        return self.width


@dataclass(frozen=True)
class GiniRel(FunctionalSpec):
    """Relative Gini index on {F : mean(F) >= delta}; 0 at the point mass at 0."""

    delta: float = 0.0
    name: ClassVar[str] = "gini-rel"

    def __post_init__(self):
        if self.a < 0:
            raise NumericError("gini-rel requires a >= 0")
        if not self.a < self.delta < self.b:
            raise NumericError("gini-rel requires delta in (a, b)")

    def value(self, x):
        xm = float(x.mean())
        if xm == 0.0:
            return 0.0
        return 0.5 * _gini_mean_diff(x) / xm

    def lipschitz(self):
        return 2.0 * self.width / self.delta

    def conditions(self):
        return (("mean_floor", self.delta),)


@dataclass(frozen=True)
class SchutzAbs(FunctionalSpec):
    name: ClassVar[str] = "schutz-abs"

    def value(self, x):
        return _schutz_abs(x)

    def lipschitz(self):
        return self.width


@dataclass(frozen=True)
class SchutzRel(FunctionalSpec):
    """Relative Schutz coefficient on continuous cdfs with density <= s and
    mean >= delta; 0 at the point mass at 0."""

    s: float = 1.0
    delta: float = 0.0
    name: ClassVar[str] = "schutz-rel"

    def __post_init__(self):
        if self.a < 0:
            raise NumericError("schutz-rel requires a >= 0")
        if self.s <= 0:
            raise NumericError("schutz-rel requires s > 0")
        if not self.a < self.delta < self.b:
            raise NumericError("schutz-rel requires delta in (a, b)")

    def value(self, x):
        xm = float(x.mean())
        if xm == 0.0:
            return 0.0
        return _schutz_abs(x) / xm

    def lipschitz(self):
        return self.width * (2.0 * self.s + 1.0 / self.delta) + 5.0

    def conditions(self):
        return (("mean_floor", self.delta), ("density_ceiling", self.s))


@dataclass(frozen=True)
class EntropyGE(FunctionalSpec):
    """Generalized entropy index.

    c in (0, 1) needs only a mean floor delta (and is -1/(c(c-1)) at the point
    mass at 0); other c require strictly positive supports.
    """

    c: float = 0.5
    delta: Optional[float] = None
    name: ClassVar[str] = "entropy"

    def __post_init__(self):
        if 0.0 < self.c < 1.0:
            if self.delta is None or not self.a < self.delta < self.b:
                raise NumericError("entropy with c in (0,1) requires delta in (a, b)")
            if self.a < 0:
                raise NumericError("entropy with c in (0,1) requires a >= 0")
        else:
            if self.a <= 0:
                raise NumericError(f"entropy with c = {self.c} requires a > 0")

    def value(self, x):
        c = self.c
        if 0.0 < c < 1.0:
            xm = float(x.mean())
            if xm == 0.0:
                return -1.0 / (c * (c - 1.0))
            return float((np.mean((x / xm) ** c) - 1.0) / (c * (c - 1.0)))
        _require_positive_samples(x, f"entropy with c = {c}")
        xm = float(x.mean())
        if c == 0.0:
            return float(math.log(xm) - np.mean(np.log(x)))
        if c == 1.0:
            r = x / xm
            return float(np.mean(r * np.log(r)))
        return float((np.mean((x / xm) ** c) - 1.0) / (c * (c - 1.0)))

    def lipschitz(self):
        a, b, c = self.a, self.b, self.c
        if 0.0 < c < 1.0:
            d = self.delta
            return (d**-c * (b**c - a**c) + (b - a) / d) / abs(c * (c - 1.0))
        if c == 0.0:
            return (b - a) / a + math.log(b / a)
        if c == 1.0:
            return _abs_one_plus_log_integral(a / b, b / a) + (
                b * (b - a) / a**2
            ) * (math.log(b / a) + 1.0)
        first = max(a**-c, b**-c) * abs(b**c - a**c)
        second = abs(c) * max((a / b) ** (2 * c - 1), (b / a) ** (2 * c - 1)) * (b - a) / a
        return (first + second) / abs(c * (c - 1.0))

    def conditions(self):
        if 0.0 < self.c < 1.0:
            return (("mean_floor", self.delta),)
        return (("support_positive", None),)


def _abs_one_plus_log_integral(lo: float, hi: float) -> float:
    """Integral of |1 + log(u)| over [lo, hi]; antiderivative of 1+log is u*log(u)."""
    def anti(u):
        return u * math.log(u)

    cut = math.exp(-1.0)
    if hi <= cut:
        return -(anti(hi) - anti(lo))
    if lo >= cut:
        return anti(hi) - anti(lo)
    return (anti(lo) - anti(cut)) + (anti(hi) - anti(cut))


@dataclass(frozen=True)
class Atkinson(FunctionalSpec):
    """Atkinson inequality index; 1 at the point mass at 0 when eps in (0, 1)."""

    eps: float = 0.5
    delta: Optional[float] = None
    name: ClassVar[str] = "atkinson"

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0 or self.eps > 1.0):
            raise NumericError("atkinson requires eps in (0,1) or (1,inf)")
        if self.eps < 1.0:
            if self.delta is None or not self.a < self.delta < self.b:
                raise NumericError("atkinson with eps in (0,1) requires delta in (a, b)")
            if self.a < 0:
                raise NumericError("atkinson with eps in (0,1) requires a >= 0")
        else:
            if self.a <= 0:
                raise NumericError("atkinson with eps > 1 requires a > 0")

    def value(self, x):
        e = self.eps
        if e > 1.0:
            _require_positive_samples(x, "atkinson with eps > 1")
        xm = float(x.mean())
        if xm == 0.0:
            return 1.0
        return 1.0 - float(np.mean(x ** (1.0 - e))) ** (1.0 / (1.0 - e)) / xm

    def lipschitz(self):
        a, b, e = self.a, self.b, self.eps
        ce = 1.0 - e
        if e < 1.0:
            d = self.delta
            return (d**-ce * (b**ce - a**ce) + (b - a) / d) / ce
        inner = b**-ce * (a**ce - b**ce) + abs(ce) * (a / b) ** (2 * ce - 1) * (b - a) / a
        return (b / a) ** e * inner / (e - 1.0)

    def conditions(self):
        if self.eps < 1.0:
            return (("mean_floor", self.delta),)
        return (("support_positive", None),)


@dataclass(frozen=True)
class AtkinsonWelfare(FunctionalSpec):
    """Power-mean welfare ( (1/m) sum x^(1-eps) )^(1/(1-eps)), eps in (0, 1)."""

    eps: float = 0.5
    name: ClassVar[str] = "atkinson-welfare"

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise NumericError("atkinson-welfare requires eps in (0, 1)")
        if self.a != 0.0:
            raise NumericError("atkinson-welfare requires support [0, b]")

    def value(self, x):
        e = self.eps
        return float(np.mean(x ** (1.0 - e))) ** (1.0 / (1.0 - e))

    def lipschitz(self):
        # chain rule: power-mean TV b^(1-eps) times the outer slope b^eps/(1-eps)
        return self.b / (1.0 - self.eps)


@dataclass(frozen=True)
class Kolm(FunctionalSpec):
    """Kolm absolute inequality index with aversion parameter kappa."""

    kappa: float = 1.0
    name: ClassVar[str] = "kolm"

    def __post_init__(self):
        if self.kappa <= 0:
            raise NumericError("kolm requires kappa > 0")

    def value(self, x):
        k = self.kappa
        return float(math.log(np.mean(np.exp(k * (x.mean() - x)))) / k)

    def lipschitz(self):
        a, b, k = self.a, self.b, self.kappa
        return math.exp(k * (b - a)) * (b - a) + (
            math.exp(k * b) * (math.exp(-k * a) - math.exp(-k * b)) / k
        )


@dataclass(frozen=True)
class GiniWelfare(FunctionalSpec):
    name: ClassVar[str] = "gini-welfare"

    def value(self, x):
        return float(x.mean()) - 0.5 * _gini_mean_diff(x)

    def lipschitz(self):
        return 2.0 * self.width


@dataclass(frozen=True)
class SchutzWelfare(FunctionalSpec):
    name: ClassVar[str] = "schutz-welfare"

    def value(self, x):
        return float(x.mean()) - _schutz_abs(x)

    def lipschitz(self):
        return 2.0 * self.width


@dataclass(frozen=True)
class WelfareFromRel(FunctionalSpec):
    """mean(F) * (1 - I_rel(F)) for a relative inequality measure I_rel with
    |1 - I_rel| <= gamma."""

    inner: FunctionalSpec = None
    gamma: float = 1.0
    name: ClassVar[str] = "welfare-rel"

    def __post_init__(self):
        if self.inner is None:
            raise NumericError("welfare-rel requires an inner inequality measure")
        if self.inner.support != self.support:
            raise NumericError("inner functional must share the support interval")
        if self.gamma <= 0:
            raise NumericError("welfare-rel requires gamma > 0")

    def value(self, x):
        return float(x.mean()) * (1.0 - self.inner.value(x))

    def lipschitz(self):
        return self.gamma * self.width + max(abs(self.a), abs(self.b)) * self.inner.lipschitz()

    def conditions(self):
        return self.inner.conditions()


@dataclass(frozen=True)
class WelfareFromAbs(FunctionalSpec):
    """mean(F) - I_abs(F) for an absolute inequality measure I_abs."""

    inner: FunctionalSpec = None
    name: ClassVar[str] = "welfare-abs"

    def __post_init__(self):
        if self.inner is None:
            raise NumericError("welfare-abs requires an inner inequality measure")
        if self.inner.support != self.support:
            raise NumericError("inner functional must share the support interval")

    def value(self, x):
        return float(x.mean()) - self.inner.value(x)

    def lipschitz(self):
        return self.width + self.inner.lipschitz()

    def conditions(self):
        return self.inner.conditions()


@dataclass(frozen=True)
class Quantile(FunctionalSpec):
    """alpha-quantile on cdfs with density bounded below by r."""

    alpha: float = 0.5
    r: float = 1.0
    name: ClassVar[str] = "quantile"

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise NumericError("quantile requires alpha in (0, 1]")
        if self.r <= 0:
            raise NumericError("quantile requires r > 0")

    def value(self, x):
        return float(x[_order_index(self.alpha, x.shape[0]) - 1])

    def lipschitz(self):
        return 1.0 / self.r

    def conditions(self):
        return (("density_floor", self.r),)


@dataclass(frozen=True)
class LorenzQ(FunctionalSpec):
    """Unnormalized Lorenz ordinate Q(F, u) = integral of q_alpha over [0, u]."""

    u: float = 0.5
    r: float = 1.0
    name: ClassVar[str] = "lorenz-q"

    def __post_init__(self):
        if not 0.0 <= self.u <= 1.0:
            raise NumericError("lorenz-q requires u in [0, 1]")
        if self.r <= 0:
            raise NumericError("lorenz-q requires r > 0")

    def value(self, x):
        return _lorenz_q(x, self.u)

    def lipschitz(self):
        return self.u / self.r

    def conditions(self):
        return (("density_floor", self.r),)


@dataclass(frozen=True)
class LorenzOrdinate(FunctionalSpec):
    """Lorenz curve ordinate L(F, u) = Q(F, u) / mean(F); needs a > 0."""

    u: float = 0.5
    r: float = 1.0
    name: ClassVar[str] = "lorenz-l"

    def __post_init__(self):
        if self.a <= 0:
            raise NumericError("lorenz-l requires a > 0")
        if not 0.0 <= self.u <= 1.0:
            raise NumericError("lorenz-l requires u in [0, 1]")
        if self.r <= 0:
            raise NumericError("lorenz-l requires r > 0")

    def value(self, x):
        return _lorenz_q(x, self.u) / float(x.mean())

    def lipschitz(self):
        a, b = self.a, self.b
        return (1.0 / self.r + (b - a) * b / a) * self.u / a

    def conditions(self):
        return (("density_floor", self.r), ("support_positive", None))


def _atoms_tv(atoms) -> float:
    return float(sum(abs(w) for _, w in atoms))


def _atoms_first_moment(atoms) -> float:
    return abs(float(sum(u * w for u, w in atoms)))


@dataclass(frozen=True)
class LinearInequality(FunctionalSpec):
    """Linear (Lorenz-based) inequality measure sum_j w_j (u_j - L(F, u_j)).

    The weighting measure is a finite signed atom list ((u_1, w_1), ...);
    needs a > 0."""

    atoms: tuple = ()
    r: float = 1.0
    name: ClassVar[str] = "lin-ineq"

    def __post_init__(self):
        if self.a <= 0:
            raise NumericError("lin-ineq requires a > 0")
        if not self.atoms:
            raise NumericError("lin-ineq requires a nonempty atom list")
        if self.r <= 0:
            raise NumericError("lin-ineq requires r > 0")
        object.__setattr__(
            self, "atoms", tuple((float(u), float(w)) for u, w in self.atoms)
        )
        for u, _ in self.atoms:
            if not 0.0 <= u <= 1.0:
                raise NumericError("lin-ineq atom locations must lie in [0, 1]")

    def value(self, x):
        xm = float(x.mean())
        return float(sum(w * (u - _lorenz_q(x, u) / xm) for u, w in self.atoms))

    def lipschitz(self):
        a, b = self.a, self.b
        return _atoms_tv(self.atoms) * (1.0 / self.r + (b - a) * b / a) / a

    def conditions(self):
        return (("density_floor", self.r), ("support_positive", None))


@dataclass(frozen=True)
class AbsLinearInequality(FunctionalSpec):
    """Absolute linear inequality measure sum_j w_j (mean(F) u_j - Q(F, u_j))."""

    atoms: tuple = ()
    r: float = 1.0
    name: ClassVar[str] = "abs-lin-ineq"

    def __post_init__(self):
        if not self.atoms:
            raise NumericError("abs-lin-ineq requires a nonempty atom list")
        if self.r <= 0:
            raise NumericError("abs-lin-ineq requires r > 0")
        object.__setattr__(
            self, "atoms", tuple((float(u), float(w)) for u, w in self.atoms)
        )
        for u, _ in self.atoms:
            if not 0.0 <= u <= 1.0:
                raise NumericError("abs-lin-ineq atom locations must lie in [0, 1]")

    def value(self, x):
        xm = float(x.mean())
        return float(sum(w * (xm * u - _lorenz_q(x, u)) for u, w in self.atoms))

    def lipschitz(self):
        return _atoms_first_moment(self.atoms) * self.width + _atoms_tv(self.atoms) / self.r

    def conditions(self):
        return (("density_floor", self.r),)


_TRIM_KERNELS = ("identity", "power", "log")


@dataclass(frozen=True)
class TrimmedU(FunctionalSpec):
    """One-sidedly trimmed kernel integral over [a, q_alpha] or [q_alpha, b].

    The kernel comes from a closed registry so the constant stays certified;
    u_bound and c_kernel (sup |phi| and the total variation of phi) may be
    overridden, otherwise they are derived for the registered kernel.
    """

    kernel: str = "identity"
    p: float = 1.0
    alpha: float = 0.1
    side: str = "lower"
    r: float = 1.0
    kappa_dens: float = 1.0
    u_bound: Optional[float] = None
    c_kernel: Optional[float] = None
    name: ClassVar[str] = "trimmed"

    def __post_init__(self):
        if self.kernel not in _TRIM_KERNELS:
            raise NumericError(f"unknown trimmed kernel {self.kernel!r}")
        if self.side not in ("lower", "upper"):
            raise NumericError("trimmed side must be 'lower' or 'upper'")
        if not 0.0 < self.alpha < 1.0:
            raise NumericError("trimmed requires alpha in (0, 1)")
        if self.r <= 0 or self.kappa_dens <= 0:
            raise NumericError("trimmed requires positive density bounds")
        if self.kernel == "log" and self.a <= 0:
            raise NumericError("trimmed log kernel requires a > 0")
        if self.kernel == "power" and self.a < 0:
            raise NumericError("trimmed power kernel requires a >= 0")

    def _phi(self, x):
        if self.kernel == "identity":
            return x
        if self.kernel == "power":
            return x**self.p
        return np.log(x)

    def _derived_bounds(self):
        a, b = self.a, self.b
        if self.kernel == "identity":
            return max(abs(a), abs(b)), b - a
        if self.kernel == "power":
            return b**self.p, b**self.p - a**self.p
        return max(abs(math.log(a)), abs(math.log(b))), math.log(b / a)

    def value(self, x):
        if self.kernel == "log":
            _require_positive_samples(x, "trimmed log kernel")
        m = x.shape[0]
        q = float(x[_order_index(self.alpha, m) - 1])
        mask = x <= q if self.side == "lower" else x >= q
        return float(self._phi(x[mask]).sum() / m)

    def lipschitz(self):
        u0, c0 = self._derived_bounds()
        u = self.u_bound if self.u_bound is not None else u0
        ck = self.c_kernel if self.c_kernel is not None else c0
        return ck + u * (1.0 + self.kappa_dens / self.r)

    def conditions(self):
        return (("density_floor", self.r), ("density_ceiling", self.kappa_dens))


@dataclass(frozen=True)
class PovertyLine(FunctionalSpec):
    """Poverty line z0 + delta * (m(F) - z0) anchored at the mean or median."""

    m: str = "mean"
    z0: float = 0.5
    delta: float = 0.0
    r: Optional[float] = None
    name: ClassVar[str] = "povline"

    def __post_init__(self):
        if self.m not in ("mean", "median"):
            raise NumericError("poverty line anchor must be 'mean' or 'median'")
        if self.z0 <= 0:
            raise NumericError("poverty line requires z0 > 0")
        if not 0.0 <= self.delta <= 1.0:
            raise NumericError("poverty line requires delta in [0, 1]")
        if self.m == "median" and self.delta > 0 and (self.r is None or self.r <= 0):
            raise NumericError("median-anchored poverty line requires r > 0")

    def value(self, x):
        if self.delta == 0.0:
            return self.z0
        anchor = float(x.mean()) if self.m == "mean" else float(
            x[_order_index(0.5, x.shape[0]) - 1]
        )
        return self.z0 + self.delta * (anchor - self.z0)

    def lipschitz(self):
        if self.delta == 0.0:
            return 0.0
        if self.m == "mean":
            return self.delta * self.width
        return self.delta / self.r

    def conditions(self):
        if self.delta > 0.0 and self.m == "median":
            return (("density_floor", self.r),)
        return ()


def _line_floor(line: PovertyLine) -> float:
    """A guaranteed lower bound on the poverty line when outcomes are >= 0."""
    return (1.0 - line.delta) * line.z0


@dataclass(frozen=True)
class Headcount(FunctionalSpec):
    """Headcount ratio F(z(F)); needs density <= s on top of the line's domain."""

    line: PovertyLine = None
    s: float = 1.0
    name: ClassVar[str] = "headcount"

    def __post_init__(self):
        if self.line is None:
            raise NumericError("headcount requires a poverty line")
        if self.s <= 0:
            raise NumericError("headcount requires s > 0")

    def value(self, x):
        z = self.line.value(x)
        return float(np.searchsorted(x, z, side="right")) / x.shape[0]

    def lipschitz(self):
        return self.line.lipschitz() * self.s + 1.0

    def conditions(self):
        return self.line.conditions() + (("density_ceiling", self.s),)


@dataclass(frozen=True)
class SenKakwani(FunctionalSpec):
    """Sen poverty index in Kakwani's generalized form (0/0 := 0); needs a = 0."""

    line: PovertyLine = None
    kappa: float = 1.0
    s: float = 1.0
    z_star: Optional[float] = None
    name: ClassVar[str] = "sen"

    def __post_init__(self):
        if self.line is None:
            raise NumericError("sen requires a poverty line")
        if self.kappa < 1.0:
            raise NumericError("sen requires kappa >= 1")
        if self.s <= 0:
            raise NumericError("sen requires s > 0")
        if self.a != 0.0:
            raise NumericError("sen requires support [0, b]")
        if self.z_star is None:
            object.__setattr__(self, "z_star", _line_floor(self.line))
        if self.z_star <= 0:
            raise NumericError("sen requires a positive poverty-line floor z_star")

    def value(self, x):
        z = self.line.value(x)
        if z <= 0:
            raise DataError("poverty line evaluated nonpositive")
        m = x.shape[0]
        n_poor = int(np.searchsorted(x, z, side="right"))
        if n_poor == 0:
            return 0.0
        xp = x[:n_poor]
        fz = n_poor / m
        fx = np.searchsorted(x, xp, side="right") / m
        w = (1.0 - fx / fz).clip(min=0.0) ** self.kappa
        return float((self.kappa + 1.0) * np.sum((1.0 - xp / z) * w) / m)

    def lipschitz(self):
        cz = self.line.lipschitz()
        k, s, b = self.kappa, self.s, self.b
        return (k + 1.0) * (1.0 + (b / self.z_star**2 + 2.0 * k * s + s) * cz + 4.0 * k)

    def conditions(self):
        return self.line.conditions() + (("density_ceiling", self.s),)


@dataclass(frozen=True)
class FGT(FunctionalSpec):
    """Foster-Greer-Thorbecke-type poverty index with Lambda(x) = x^p, p >= 1;
    needs a = 0."""

    line: PovertyLine = None
    p: float = 1.0
    z_star: Optional[float] = None
    name: ClassVar[str] = "fgt"

    def __post_init__(self):
        if self.line is None:
            raise NumericError("fgt requires a poverty line")
        if self.p < 1.0:
            raise NumericError("fgt requires a power p >= 1 (p = 0 is headcount)")
        if self.a != 0.0:
            raise NumericError("fgt requires support [0, b]")
        if self.z_star is None:
            object.__setattr__(self, "z_star", _line_floor(self.line))
        if self.z_star <= 0:
            raise NumericError("fgt requires a positive poverty-line floor z_star")

    def value(self, x):
        z = self.line.value(x)
        if z <= 0:
            raise DataError("poverty line evaluated nonpositive")
        gaps = np.clip(1.0 - x / z, 0.0, None)
        return float(np.mean(gaps**self.p))

    def lipschitz(self):
        # Lambda(x) = x^p on [0,1]: Lipschitz constant p, Lambda(1) = 1
        return self.b / self.z_star**2 * self.p * self.line.lipschitz() + 1.0

    def conditions(self):
        return self.line.conditions()


# ---------------------------------------------------------------------------
# operations

def evaluate(spec: FunctionalSpec, F: EmpiricalCdf) -> float:
    """Plug-in value T(F) per the catalog formula."""
    if F.support != spec.support:
        raise DataError("functional and cdf support intervals differ")
    return spec.value(F.samples)


def lipschitz_constant(spec: FunctionalSpec) -> float:
    """The certified constant C for the variant, exactly as the catalog states it."""
    c = spec.lipschitz()
    if not math.isfinite(c):
        raise NumericError(f"Lipschitz constant for {spec.name} is not finite")
    return c


@dataclass(frozen=True)
class DomainCondition:
    name: str
    status: str  # "pass" | "fail" | "assumed"
    detail: str


@dataclass(frozen=True)
class DomainReport:
    ok: bool
    conditions: Tuple[DomainCondition, ...]


def _check_mean_floor(delta, target):
    mean = target.mean if not isinstance(target, EmpiricalCdf) else target.mean
    status = "pass" if mean >= delta else "fail"
    return DomainCondition("mean_floor", status, f"mean {mean:.6g} vs floor {delta:.6g}")


def domain_check(spec: FunctionalSpec, target) -> DomainReport:
    """Report which domain conditions hold for an empirical cdf or an arm law.

    Mean floors and support positivity are verified outright; density
    floor/ceiling conditions are compared against the declared bounds of
    parametric arms and reported as "assumed" where a finite sample cannot
    decide them.
    """
    conditions = []
    is_ecdf = isinstance(target, EmpiricalCdf)
    bounds = None if is_ecdf else target.density_bounds()
    for kind, param in spec.conditions():
        if kind == "mean_floor":
            conditions.append(_check_mean_floor(param, target))
        elif kind == "support_positive":
            status = "pass" if spec.a > 0 else "fail"
            conditions.append(
                DomainCondition("support_positive", status, f"a = {spec.a:.6g}")
            )
        elif kind == "density_floor":
            if is_ecdf:
                conditions.append(
                    DomainCondition(
                        "density_floor",
                        "assumed",
                        f"density >= {param:.6g} cannot be verified from a finite sample",
                    )
                )
            elif bounds is None:
                conditions.append(
                    DomainCondition(
                        "density_floor", "fail", "law is not continuous with a density"
                    )
                )
            else:
                status = "pass" if bounds[0] >= param else "fail"
                conditions.append(
                    DomainCondition(
                        "density_floor",
                        status,
                        f"declared min density {bounds[0]:.6g} vs floor {param:.6g}",
                    )
                )
        elif kind == "density_ceiling":
            if is_ecdf:
                conditions.append(
                    DomainCondition(
                        "density_ceiling",
                        "assumed",
                        f"density <= {param:.6g} cannot be verified from a finite sample",
                    )
                )
            elif bounds is None:
                conditions.append(
                    DomainCondition(
                        "density_ceiling", "fail", "law is not continuous with a density"
                    )
                )
            else:
                status = "pass" if bounds[1] <= param else "fail"
                conditions.append(
                    DomainCondition(
                        "density_ceiling",
                        status,
                        f"declared max density {bounds[1]:.6g} vs ceiling {param:.6g}",
                    )
                )
    ok = all(c.status != "fail" for c in conditions)
    return DomainReport(ok, tuple(conditions))


_U_KERNELS = {
    "abs-diff": 2,
    "half-squared-diff": 2,
    "identity": 1,
    "power": 1,
    "log": 1,
}


def u_functional(kernel_name: str, F: EmpiricalCdf, bounds=None, p: float = 1.0) -> float:
    """Plug-in kernel integral m_{phi;c,d}(F): the full with-replacement
    (V-statistic) average over sample tuples restricted to [c, d].

    Kernels: abs-diff, half-squared-diff (degree 2); identity, power (pass p),
    log (degree 1).  `power:2`-style names carry the exponent inline.
    """
    if ":" in kernel_name:
        kernel_name, _, arg = kernel_name.partition(":")
        p = float(arg)
    if kernel_name not in _U_KERNELS:
        raise NumericError(f"unknown kernel {kernel_name!r}")
    x = F.samples
    m = x.shape[0]
    if bounds is not None:
        c, d = bounds
        if not (F.support.a <= c <= d <= F.support.b):
            raise NumericError("kernel bounds must satisfy a <= c <= d <= b")
        x = x[(x >= c) & (x <= d)]
    if kernel_name == "identity":
        return float(x.sum() / m)
    if kernel_name == "power":
        return float((x**p).sum() / m)
    if kernel_name == "log":
        if x.size and x[0] <= 0.0:
            raise DataError("log kernel requires strictly positive sample values")
        return float(np.log(x).sum() / m)
    if kernel_name == "abs-diff":
        mc = x.shape[0]
        coef = 2.0 * np.arange(mc) + 1.0 - mc
        return float(2.0 * np.dot(coef, x) / (m * m))
    # half-squared-diff: sum_ij 0.5 (x_i - x_j)^2 = mc * sum x^2 - (sum x)^2
    mc = x.shape[0]
    return float((mc * np.dot(x, x) - x.sum() ** 2) / (m * m))


def lorenz(F: EmpiricalCdf, u: float) -> Tuple[float, Optional[float]]:
    """(Q(F, u), L(F, u)); L is None when the mean is not strictly positive."""
    if not 0.0 <= u <= 1.0:
        raise NumericError("lorenz requires u in [0, 1]")
    q = _lorenz_q(F.samples, u)
    xm = F.mean
    return q, (q / xm if xm > 0 else None)
