"""scikit-learn style front end.

``fit`` takes the problem to minimize instead of a data matrix; everything
learned is stored in trailing-underscore attributes.
"""

from __future__ import annotations

import math
import numbers
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .aho import AhoParams, aho_run, default_population
from .core import SearchSpace, as_bounds, as_scorer


def check_bounds(bounds) -> SearchSpace:
    """Validate ``(low, high)`` pairs or a SearchSpace."""
    return as_bounds(bounds)


def check_problem(problem, bounds=None):
    """Return something with ``score`` and ``space``; a bare callable needs ``bounds``."""
    space = None if bounds is None else check_bounds(bounds)
    scorer = as_scorer(problem, space)
    if space is not None and scorer.space.dims != space.dims:
        raise ValueError(f"bounds describe {space.dims} dimensions, the problem has {scorer.space.dims}")
    return scorer


def check_random_state_seed(random_state) -> int:
    if random_state is None:
        return 0
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        if random_state < 0:
            raise ValueError("random_state must be non-negative")
        return int(random_state)
    raise TypeError("random_state must be None or a non-negative int")


class ArcherfishOptimizer(BaseEstimator):
    """Archerfish hunting search wrapped as an estimator.

    ``population=None`` picks ``floor(30 d^1.5)``. ``fit`` accepts a problem
    object from :mod:`archerfish.problems` or any callable with ``bounds``.
    """

    def __init__(
        self,
        population: Optional[int] = None,
        swap_angle: float = math.pi / 12,
        attractiveness: float = 0.01,
        levy_beta: float = 1.5,
        stagnation_limit: Optional[int] = None,
        budget: int = 10_000,
        refraction: float = 1e-6,
        normalize: bool = True,
        random_state: Optional[int] = None,
    ):
        self.population = population
        self.swap_angle = swap_angle
        self.attractiveness = attractiveness
        self.levy_beta = levy_beta
        self.stagnation_limit = stagnation_limit
        self.budget = budget
        self.refraction = refraction
        self.normalize = normalize
        self.random_state = random_state

    def _params(self, dims: int) -> AhoParams:
        return AhoParams(
            population=self.population if self.population is not None else default_population(dims),
            swap_angle=self.swap_angle,
            attractiveness=self.attractiveness,
            levy_beta=self.levy_beta,
            stagnation_limit=self.stagnation_limit,
            budget=self.budget,
            seed=check_random_state_seed(self.random_state),
            refraction=self.refraction,
            normalize=self.normalize,
        ).validate()

    def fit(self, problem, bounds=None):
        scorer = check_problem(problem, bounds)
        params = self._params(scorer.space.dims)
        record = aho_run(scorer, params)
        self.record_ = record
        self.best_position_ = np.asarray(record.best_position, dtype=float)
        self.best_value_ = record.best_value
        self.best_violation_ = record.best_violation
        self.n_evaluations_ = record.fes
        self.n_iterations_ = record.iterations
        self.convergence_ = np.array(record.trace.samples, dtype=float)
        self.n_features_in_ = scorer.space.dims
        return self

    def score(self, problem=None, bounds=None) -> float:
        """Negated best value, so that larger is better as sklearn expects."""
        check_is_fitted(self, "best_value_")
        return -float(self.best_value_)
