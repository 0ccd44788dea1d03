"""Archerfish hunting optimizer with engineering benchmarks and rank-based statistics."""

from .aho import AhoParams, DimensionTooSmall, RunRecord, aho_run, aho_step, init_state, levy_sigma
from .core import BudgetExhausted, DimensionMismatch, NonFiniteComponent, RandomStream, SearchSpace
from .estimator import ArcherfishOptimizer

__all__ = [
    "AhoParams",
    "ArcherfishOptimizer",
    "BudgetExhausted",
    "DimensionMismatch",
    "DimensionTooSmall",
    "NonFiniteComponent",
    "RandomStream",
    "RunRecord",
    "SearchSpace",
    "aho_run",
    "aho_step",
    "init_state",
    "levy_sigma",
]

__version__ = "0.1.0"
