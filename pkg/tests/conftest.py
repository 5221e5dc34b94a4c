"""Shared test helpers: brute-force oracles and random-cdf generators."""

import numpy as np
import pytest

from fbandit.ecdf import UNIT_INTERVAL, EmpiricalCdf, ecdf_from_samples


def brute_pair_sum(x, phi):
    """Full with-replacement double loop sum_{i,j} phi(x_i, x_j) / m^2."""
    m = len(x)
    total = 0.0
    for i in range(m):
        for j in range(m):
            total += phi(x[i], x[j])
    return total / (m * m)


def brute_gini_mean_diff(x):
    return brute_pair_sum(x, lambda a, b: abs(a - b))


def brute_variance(x):
    return brute_pair_sum(x, lambda a, b: 0.5 * (a - b) ** 2)


def brute_quantile(x, alpha):
    """inf{v : F(v) >= alpha} by direct scan over the sample points."""
    xs = sorted(x)
    m = len(xs)
    for v in xs:
        if sum(1 for y in xs if y <= v) / m >= alpha - 1e-12:
            return v
    return xs[-1]


def brute_sup_distance(F: EmpiricalCdf, G: EmpiricalCdf, extra=()):
    """Max |F - G| over a mesh of sample points, their midpoints, and extras."""
    pts = np.unique(np.concatenate([F.samples, G.samples, np.asarray(extra, float)]))
    mids = (pts[1:] + pts[:-1]) / 2
    mesh = np.concatenate([pts, mids, pts - 1e-12, pts + 1e-12])
    return float(np.max(np.abs(F.evaluate(mesh) - G.evaluate(mesh))))


def random_unit_ecdf(rng, max_m=50):
    m = rng.integers(1, max_m + 1)
    return ecdf_from_samples(rng.random(m), UNIT_INTERVAL)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
