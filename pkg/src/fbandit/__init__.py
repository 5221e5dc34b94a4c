"""fbandit: sequential treatment allocation targeting distributional
functionals (welfare, inequality, poverty, quantile measures), with
finite-sample inference and a Monte-Carlo regret harness."""

from . import functionals, inference, policies, simulation
from ._engine import active_engine_name, compiled_available
from .distributions import (
    Beta,
    EmpiricalResampler,
    FiniteDiscrete,
    Mixture,
    PointMass,
    sample_arm,
    true_cdf_grid,
)
from .ecdf import (
    EmpiricalCdf,
    SupportInterval,
    UNIT_INTERVAL,
    ecdf_from_samples,
    ecdf_quantile,
    sup_distance,
)
from .errors import ConfigError, DataError, FbanditError, NumericError
from .rng import RandomSource

__version__ = "0.1.0"
