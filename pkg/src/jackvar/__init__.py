"""Jackknife, infinitesimal jackknife and bootstrap variance estimation.

The estimators target ``sigma^2``, the asymptotic variance of
``sqrt(n) (T_n - T(p))``, for smooth functions of the sample mean and for
trimmed L-statistics.
"""

__version__ = "0.1.0"

from .empirical import EmpiricalSample, LeaveOneOutSample, from_samples, read_sample_file
from .estimators import (
    DecompositionReport,
    PseudovalueSet,
    VarianceEstimate,
    bootstrap_variance,
    decomposition,
    infinitesimal_jackknife_variance,
    jackknife_variance,
    pseudovalues,
)
from .functionals import (
    SmoothFunctionOfMean,
    TrimmedLStatistic,
    WeightFunction,
    box,
    holder_cusp,
    identity,
    mesa,
    paper_sgn,
    parse_functional,
    square,
)
from .sampling import PopulationModel, draw, parse_model, true_sigma_squared

__all__ = [
    "EmpiricalSample",
    "LeaveOneOutSample",
    "from_samples",
    "read_sample_file",
    "DecompositionReport",
    "PseudovalueSet",
    "VarianceEstimate",
    "bootstrap_variance",
    "decomposition",
    "infinitesimal_jackknife_variance",
    "jackknife_variance",
    "pseudovalues",
    "SmoothFunctionOfMean",
    "TrimmedLStatistic",
    "WeightFunction",
    "box",
    "holder_cusp",
    "identity",
    "mesa",
    "paper_sgn",
    "parse_functional",
    "square",
    "PopulationModel",
    "draw",
    "parse_model",
    "true_sigma_squared",
]
