"""cdnet: cumulative distribution networks.

A CDN models a joint CDF as a product of local cumulative functions on a
bipartite graph.  This package provides graph construction and validity
checking, exact derivative-sum-product inference on trees, brute-force
verification oracles, and a structured-ranking application with online
skill learning, all behind an HTTP service and a CLI.
"""

from .domains import ContinuousGrid, DiscreteOrdinal
from .dsp import InferenceResult, MessagePair, conditional_cdf, marginal_cdf, propagate
from .graph import CdnGraph, StructureReport, marginalize_unobserved, validate_structure

__version__ = "0.1.0"

__all__ = [
    "CdnGraph",
    "ContinuousGrid",
    "DiscreteOrdinal",
    "InferenceResult",
    "MessagePair",
    "StructureReport",
    "conditional_cdf",
    "marginal_cdf",
    "marginalize_unobserved",
    "propagate",
    "validate_structure",
]
