"""Upper bounds on the Bonferroni FWER under correlated Gaussian nulls."""

from .equicorrelated import BoundResult, Equicorrelation, TestProblem, best_bound
from .general import CorrelationMatrix, best_bound_general, row_stats

__version__ = "0.1.0"

__all__ = [
    "BoundResult", "CorrelationMatrix", "Equicorrelation", "TestProblem",
    "best_bound", "best_bound_general", "row_stats",
]
