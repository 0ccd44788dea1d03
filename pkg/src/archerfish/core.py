"""Search-space geometry, agents, evaluation bookkeeping and seeded randomness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Array = np.ndarray


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested after the FE budget is spent."""


class NonFiniteComponent(ValueError):
    """A position contains NaN or infinite components."""


class DimensionMismatch(ValueError):
    """Vector or matrix sizes disagree with the search space."""


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box ``[lower, upper]`` in ``dims`` dimensions."""

    lower: Array
    upper: Array

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape or lower.size == 0:
            raise DimensionMismatch(
                f"lower and upper must be non-empty and of equal length, got {lower.size} and {upper.size}"
            )
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise NonFiniteComponent("bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def cube(cls, dims: int, low: float, high: float) -> "SearchSpace":
        return cls(np.full(dims, float(low)), np.full(dims, float(high)))

    @property
    def dims(self) -> int:
        return self.lower.size

    @property
    def width(self) -> Array:
        return self.upper - self.lower

    def contains(self, pos) -> bool:
        pos = np.asarray(pos, dtype=float)
        return bool(np.all(pos >= self.lower) and np.all(pos <= self.upper))


@dataclass
class Agent:
    """One archerfish: position, cached objective value and stagnation counter.

    ``violation`` is the mean constraint violation at ``position`` and stays 0
    for unconstrained problems.
    """

    position: Array
    value: float
    stagnation: int = 0
    violation: float = 0.0


class RandomStream:
    """Seeded random source shared by every stochastic operator.

    Backed by numpy's PCG64 bit generator, whose output for a given seed is
    stable across platforms and numpy releases. A stream must not be shared
    between concurrently running optimizations; derive one per run instead.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFF_FFFF_FFFF_FFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size=None):
        """Uniform draw(s) on [0, 1)."""
        return self._gen.random(size)

    def integer(self, low: int, high: int, size=None):
        """Uniform integer(s) on the closed range ``{low, ..., high}``."""
        return self._gen.integers(low, high, size=size, endpoint=True)

    def normal(self, scale: float = 1.0, size=None):
        return self._gen.normal(0.0, scale, size)

    def bernoulli(self, p: float = 0.5, size=None):
        if size is None:
            return int(self._gen.random() < p)
        return (self._gen.random(size) < p).astype(int)

    def distinct_pair(self, n: int) -> tuple[int, int]:
        """Two distinct indices uniform over ordered pairs of ``{0, ..., n-1}``."""
        j = int(self._gen.integers(n))
        k = int(self._gen.integers(n - 1))
        if k >= j:
            k += 1
        return j, k


@dataclass
class EvalCounter:
    """Function-evaluation budget; ``used`` never exceeds ``budget``."""

    budget: int
    used: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be a positive integer")

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.budget

    def charge(self, n: int = 1) -> None:
        if self.used + n > self.budget:
            raise BudgetExhausted(f"{self.used} of {self.budget} evaluations used, {n} requested")
        self.used += n


def derive_seed(base_seed: int, index: int) -> int:
    """Seed of the ``index``-th independent run: ``base_seed + index`` (mod 2**64)."""
    return (int(base_seed) + int(index)) & 0xFFFF_FFFF_FFFF_FFFF


def sample_initial_position(space: SearchSpace, rng: RandomStream) -> Array:
    alpha = rng.uniform(space.dims)
    return alpha * space.width + space.lower


def check_finite(pos: Array) -> Array:
    pos = np.asarray(pos, dtype=float)
    if not np.all(np.isfinite(pos)):
        raise NonFiniteComponent(f"position has non-finite components: {pos}")
    return pos


def clamp_to_space(pos, space: SearchSpace) -> Array:
    """Saturate every component of ``pos`` (or each row of a matrix) into the box."""
    pos = check_finite(pos)
    if pos.shape[-1] != space.dims:
        raise DimensionMismatch(f"expected {space.dims} components, got {pos.shape[-1]}")
    return np.minimum(space.upper, np.maximum(space.lower, pos))


def evaluate(f: Callable[[Array], float], pos, counter: EvalCounter) -> float:
    """Charge one evaluation to ``counter`` and return ``f(pos)``."""
    counter.charge(1)
    return float(f(np.asarray(pos, dtype=float)))


@dataclass
class Scorer:
    """Adapter turning a plain objective into the batch interface the optimizer uses.

    Anything exposing ``space`` and ``score(X) -> (values, violations)`` over a
    2-D array of rows can be optimized directly; this wraps a scalar callable.
    """

    func: Callable[[Array], float]
    space: SearchSpace
    name: str = field(default="objective")
    f_star: float | None = None

    def score(self, X: Array) -> tuple[Array, Array]:
        values = np.fromiter((self.func(x) for x in X), dtype=float, count=len(X))
        return values, np.zeros(len(X))


def as_scorer(problem, space: SearchSpace | None = None):
    if hasattr(problem, "score") and hasattr(problem, "space"):
        return problem
    if callable(problem):
        if space is None:
            raise ValueError("a bare objective callable needs an explicit search space")
        return Scorer(problem, space)
    raise TypeError(f"cannot optimize object of type {type(problem).__name__}")


def as_bounds(bounds: Sequence[Sequence[float]] | SearchSpace) -> SearchSpace:
    """Accept a SearchSpace or a sequence of ``(low, high)`` pairs."""
    if isinstance(bounds, SearchSpace):
        return bounds
    arr = np.asarray(bounds, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DimensionMismatch("bounds must be a sequence of (low, high) pairs")
    return SearchSpace(arr[:, 0], arr[:, 1])
