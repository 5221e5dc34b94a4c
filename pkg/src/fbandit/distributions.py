"""Outcome distributions for treatment arms.

Variants: Beta on [0, 1], point mass, finite discrete, resampling from an
empirical pool, and finite mixtures.  All sampling goes through inversion of
uniforms drawn from a RandomSource stream, which keeps draws byte-reproducible
for a fixed package version: Beta uses the analytic inverse cdf when one shape
parameter equals 1 and the regularized incomplete-beta inverse otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import special as sp

from .ecdf import EmpiricalCdf, SupportInterval, UNIT_INTERVAL, ecdf_from_samples
from .errors import NumericError
from .rng import RandomSource

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class Beta:
    """Beta(shape1, shape2) law on [0, 1]."""

    shape1: float
    shape2: float

    def __post_init__(self):
        if not (self.shape1 > 0 and self.shape2 > 0):
            raise NumericError("Beta shapes must be positive")

    @property
    def support(self) -> SupportInterval:
        return UNIT_INTERVAL

    @property
    def mean(self) -> float:
        return self.shape1 / (self.shape1 + self.shape2)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return sp.betainc(self.shape1, self.shape2, x)

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        if self.shape1 == 1.0:
            # F(x) = 1 - (1-x)^shape2  =>  x = 1 - (1-q)^(1/shape2)
            return -np.expm1(np.log1p(-q) / self.shape2)
        if self.shape2 == 1.0:
            # F(x) = x^shape1
            return np.exp(np.log(q) / self.shape1)
        return sp.betaincinv(self.shape1, self.shape2, q)

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return np.asarray(self.quantile(gen.random(count)), dtype=float)

    def density_bounds(self) -> Optional[Tuple[float, float]]:
        """(inf, sup) of the density on (0, 1); np.inf marks unboundedness."""
        a, b = self.shape1, self.shape2
        lb = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)

        def pdf(x):
            return math.exp((a - 1) * math.log(x) + (b - 1) * math.log(1 - x) - lb)

        # endpoint limits
        at0 = math.inf if a < 1 else (math.exp(-lb) if a == 1 else 0.0)
        at1 = math.inf if b < 1 else (math.exp(-lb) if b == 1 else 0.0)
        if a >= 1 and b >= 1:
            if a + b == 2:  # uniform
                return (1.0, 1.0)
            mode = (a - 1) / (a + b - 2)
            mode = min(max(mode, 1e-300), 1 - 1e-16)
            return (min(at0, at1), pdf(mode))
        if a < 1 and b < 1:
            antimode = (1 - a) / (2 - a - b)
            return (pdf(antimode), math.inf)
        # one shape below 1: density is monotone with an infinite end
        return (min(at0, at1), math.inf)


@dataclass(frozen=True)
class PointMass:
    """Degenerate law at a single point."""

    c: float

    @property
    def support(self) -> SupportInterval:
        # degenerate natural support; callers embed it in a wider interval
        return SupportInterval(min(self.c, 0.0), max(self.c, 1.0))

    @property
    def mean(self) -> float:
        return self.c

    def cdf(self, x):
        return (np.asarray(x, dtype=float) >= self.c).astype(float)

    def quantile(self, q):
        return np.full_like(np.asarray(q, dtype=float), self.c)

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        return np.full(count, float(self.c))

    def density_bounds(self):
        return None


@dataclass(frozen=True)
class FiniteDiscrete:
    """Finitely supported law given by atoms and probabilities."""

    values: tuple
    probabilities: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        p = np.asarray(self.probabilities, dtype=float)
        if v.size == 0 or v.size != p.size:
            raise NumericError("values and probabilities must be nonempty, same length")
        if np.any(p < 0):
            raise NumericError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > _PROB_TOL:
            raise NumericError(f"probabilities sum to {p.sum()!r}, not 1")
        order = np.argsort(v, kind="stable")
        object.__setattr__(self, "values", tuple(float(x) for x in v[order]))
        object.__setattr__(self, "probabilities", tuple(float(x) for x in p[order]))

    @property
    def support(self) -> SupportInterval:
        lo, hi = self.values[0], self.values[-1]
        return SupportInterval(min(lo, 0.0), max(hi, 1.0)) if lo == hi else SupportInterval(lo, hi)

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.probabilities))

    def _cum(self):
        c = np.cumsum(self.probabilities)
        c[-1] = 1.0
        return c

    def cdf(self, x):
        idx = np.searchsorted(self.values, np.asarray(x, dtype=float), side="right")
        cum = np.concatenate([[0.0], self._cum()])
        return cum[idx]

    def quantile(self, q):
        idx = np.searchsorted(self._cum(), np.asarray(q, dtype=float), side="left")
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values, dtype=float)[idx]

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        u = gen.random(count)
        idx = np.searchsorted(self._cum(), u, side="right")
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values, dtype=float)[idx]

    def density_bounds(self):
        return None


@dataclass(frozen=True)
class EmpiricalResampler:
    """Draws uniformly with replacement from an empirical pool."""

    pool: EmpiricalCdf

    @property
    def support(self) -> SupportInterval:
        return self.pool.support

    @property
    def mean(self) -> float:
        return self.pool.mean

    def cdf(self, x):
        return self.pool.evaluate(x)

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        m = self.pool.m
        k = np.ceil(q * m - 1e-9).astype(int)
        k = np.clip(k, 1, m)
        return self.pool.samples[k - 1]

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        idx = np.minimum((gen.random(count) * self.pool.m).astype(int), self.pool.m - 1)
        return self.pool.samples[idx]

    def density_bounds(self):
        return None


@dataclass(frozen=True)
class Mixture:
    """Finite mixture of component laws; two uniforms per draw (component, value)."""

    weights: tuple
    components: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.size == 0 or w.size != len(self.components):
            raise NumericError("weights and components must be nonempty, same length")
        if np.any(w < 0):
            raise NumericError("mixture weights must be nonnegative")
        if abs(w.sum() - 1.0) > _PROB_TOL:
            raise NumericError(f"mixture weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @property
    def support(self) -> SupportInterval:
        los = [c.support.a for c in self.components]
        his = [c.support.b for c in self.components]
        return SupportInterval(min(los), max(his))

    @property
    def mean(self) -> float:
        return float(sum(w * c.mean for w, c in zip(self.weights, self.components)))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x, dtype=float)
        for w, c in zip(self.weights, self.components):
            out = out + w * c.cdf(x)
        return out

    def quantile(self, q):
        """Generalized inverse of the mixture cdf by bisection (exact cdf, ~1e-14)."""
        q = np.atleast_1d(np.asarray(q, dtype=float))
        sup = self.support
        lo = np.full_like(q, sup.a)
        hi = np.full_like(q, sup.b)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            ge = self.cdf(mid) >= q
            hi = np.where(ge, mid, hi)
            lo = np.where(ge, lo, mid)
        return hi

    def draw(self, gen: np.random.Generator, count: int) -> np.ndarray:
        u_comp = gen.random(count)
        u_val = gen.random(count)
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, u_comp, side="right")
        idx = np.clip(idx, 0, len(self.components) - 1)
        out = np.empty(count, dtype=float)
        for j, comp in enumerate(self.components):
            mask = idx == j
            if np.any(mask):
                out[mask] = comp.quantile(u_val[mask])
        return out

    def density_bounds(self):
        bounds = [c.density_bounds() for c in self.components]
        if any(b is None for b in bounds):
            return None
        lo = sum(w * b[0] for w, b in zip(self.weights, bounds))
        hi = sum(w * b[1] for w, b in zip(self.weights, bounds))
        return (lo, hi)


ArmDistribution = (Beta, PointMass, FiniteDiscrete, EmpiricalResampler, Mixture)


def sample_arm(dist, rng: RandomSource, count: int) -> np.ndarray:
    """i.i.d. draws from the arm's law; a pure function of the rng coordinates.

    Calling twice with the same RandomSource returns the same values: the
    stream is re-derived from its coordinates, not advanced.
    """
    if count < 1:
        raise NumericError("count must be >= 1")
    return dist.draw(rng.generator(), int(count))


def true_cdf_grid(dist, grid_size: int, support: Optional[SupportInterval] = None) -> EmpiricalCdf:
    """Discrete oracle cdf with mass 1/g at the exact mid-quantiles of the law.

    Placing the atoms at q_{(j-0.5)/g} for j = 1..g guarantees
    ||F - F_grid||_inf <= 1/g symmetrically in both tails.
    """
    if grid_size < 2:
        raise NumericError("grid_size must be >= 2")
    probs = (np.arange(grid_size) + 0.5) / grid_size
    vals = np.sort(np.asarray(dist.quantile(probs), dtype=float))
    sup = support if support is not None else dist.support
    return ecdf_from_samples(vals, sup)
