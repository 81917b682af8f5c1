"""Distribution of the trace (center of mass) of finite-n Jacobi unitary ensembles.

The pipeline: deformed-weight moments -> Hankel determinants -> orthogonal
polynomial recurrences -> auxiliary ladder quantities -> Painleve V / Toda
identity verification -> cumulant series -> Edgeworth and exact densities,
with Monte Carlo and exact piecewise-polynomial oracles.
"""

from .numkit import PrecisionContext, default_context, make_context
from .orthopoly import EnsembleParams

__all__ = [
    "PrecisionContext",
    "default_context",
    "make_context",
    "EnsembleParams",
]

__version__ = "0.1.0"
