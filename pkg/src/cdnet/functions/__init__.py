from .base import CumulativeFunction
from .copula import (
    BivariateCopulaFunction,
    GaussianMarginal,
    MarginalCdfFunction,
    SigmoidMarginal,
)
from .gaussian import GaussianCdfFunction
from .table import DiscreteTableFunction
from .wrappers import OrdinalAxisCdf, SampledCdfFunction, ShiftedTailFunction

__all__ = [
    "BivariateCopulaFunction",
    "CumulativeFunction",
    "DiscreteTableFunction",
    "GaussianCdfFunction",
    "GaussianMarginal",
    "MarginalCdfFunction",
    "OrdinalAxisCdf",
    "SampledCdfFunction",
    "ShiftedTailFunction",
    "SigmoidMarginal",
]
