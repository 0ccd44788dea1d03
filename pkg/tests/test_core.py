import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from archerfish.core import (
    BudgetExhausted,
    DimensionMismatch,
    EvalCounter,
    NonFiniteComponent,
    RandomStream,
    SearchSpace,
    as_bounds,
    clamp_to_space,
    derive_seed,
    evaluate,
    sample_initial_position,
)
from archerfish.problems.unconstrained import sphere


class FixedStream(RandomStream):
    """Stream whose uniform draws are a fixed value."""

    def __init__(self, alpha):
        super().__init__(0)
        self.alpha = alpha

    def uniform(self, size=None):
        return np.full(size, self.alpha) if size is not None else self.alpha


def test_space_rejects_inverted_and_nonfinite_bounds():
    with pytest.raises(ValueError):
        SearchSpace([1.0], [0.0])
    with pytest.raises(NonFiniteComponent):
        SearchSpace([0.0], [np.inf])
    with pytest.raises(DimensionMismatch):
        SearchSpace([0.0, 0.0], [1.0])


def test_space_bounds_are_read_only():
    s = SearchSpace.cube(3, -1, 1)
    with pytest.raises(ValueError):
        s.lower[0] = 5


def test_initial_position_corner_and_midpoint():
    assert np.array_equal(sample_initial_position(SearchSpace.cube(3, 0, 1), FixedStream(0.0)), np.zeros(3))
    assert sample_initial_position(SearchSpace([2.0], [4.0]), FixedStream(0.5)).tolist() == [3.0]


def test_initial_positions_inside_reference_box():
    rng = RandomStream(3)
    space = SearchSpace.cube(20, -100, 100)
    pts = np.array([sample_initial_position(space, rng) for _ in range(200)])
    assert pts.min() >= -100 and pts.max() <= 100


def test_clamp_saturates_and_rejects_nan():
    space = SearchSpace.cube(2, -100, 100)
    assert clamp_to_space([150, -150], space).tolist() == [100, -100]
    assert clamp_to_space([3.0, -2.0], space).tolist() == [3.0, -2.0]
    with pytest.raises(NonFiniteComponent):
        clamp_to_space([np.nan, 0.0], space)
    with pytest.raises(DimensionMismatch):
        clamp_to_space([0.0, 0.0, 0.0], space)


@given(arrays(float, 4, elements=st.floats(-1e6, 1e6)))
def test_clamp_is_idempotent_and_in_bounds(x):
    space = SearchSpace.cube(4, -5, 5)
    y = clamp_to_space(x, space)
    assert space.contains(y)
    assert np.array_equal(clamp_to_space(y, space), y)


def test_evaluate_counts_and_stops():
    c = EvalCounter(3)
    assert evaluate(sphere, np.zeros(4), c) == 0.0 and c.used == 1
    evaluate(sphere, np.ones(4), c)
    evaluate(sphere, np.ones(4), c)
    assert c.used == 3 and c.exhausted
    with pytest.raises(BudgetExhausted):
        evaluate(sphere, np.zeros(4), c)
    assert c.used == 3


def test_streams_are_reproducible_and_distinct():
    a, b = RandomStream(11), RandomStream(11)
    assert np.array_equal(a.uniform(5), b.uniform(5))
    assert not np.array_equal(RandomStream(12).uniform(5), RandomStream(11).uniform(5))


@given(st.integers(2, 50), st.integers(0, 2**32))
@settings(max_examples=50)
def test_distinct_pair(n, seed):
    j, k = RandomStream(seed).distinct_pair(n)
    assert j != k and 0 <= j < n and 0 <= k < n


def test_integer_draws_include_both_ends():
    draws = RandomStream(0).integer(0, 2, 3000)
    assert set(np.unique(draws)) == {0, 1, 2}


def test_derive_seed_wraps():
    assert derive_seed(5, 3) == 8
    assert derive_seed(2**64 - 1, 1) == 0


def test_as_bounds_pairs():
    s = as_bounds([(0, 1), (-2, 2)])
    assert s.dims == 2 and s.upper.tolist() == [1, 2]
    with pytest.raises(DimensionMismatch):
        as_bounds([0, 1, 2])
