"""Hunting operators checked against hand-evaluated formulas."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from archerfish.aho import (
    DimensionTooSmall,
    attraction_move,
    draw_perceiving_angle,
    is_shooting_phase,
    jumping_prey_position,
    levy_escape,
    levy_sigma,
    levy_steps,
    shooting_prey_position,
)
from archerfish.core import RandomStream, SearchSpace

WIDE = SearchSpace.cube(3, -1e9, 1e9)


class Scripted(RandomStream):
    def __init__(self, bits, alphas):
        super().__init__(0)
        self.bits, self.alphas = bits, alphas

    def bernoulli(self, p=0.5, size=None):
        return self.bits

    def uniform(self, size=None):
        return self.alphas


def test_angle_plug_in():
    assert draw_perceiving_angle(Scripted(0, 0.5)) == pytest.approx(math.pi / 2)
    assert draw_perceiving_angle(Scripted(1, 0.5)) == pytest.approx(-math.pi / 2)


def test_shooting_phase_boundaries():
    assert not is_shooting_phase(math.pi / 2, math.pi / 12)
    assert is_shooting_phase(math.pi / 24, math.pi / 12)
    assert not is_shooting_phase(math.pi / 12, math.pi / 12)
    assert not is_shooting_phase(0.0, math.pi / 12)
    assert is_shooting_phase(-math.pi * 0.99, math.pi / 12)


def test_shooting_prey_hand_value():
    space = SearchSpace.cube(2, -10, 10)
    prey = shooting_prey_position([0.0, 0.0], math.pi / 4, 1.0, space, index=0, noise=np.array([0.1, 0.2]))
    assert prey.tolist() == pytest.approx([1.1, 0.2])


def test_shooting_prey_degenerate_cases():
    x = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(shooting_prey_position(x, 0.7, 0.0, WIDE, index=1, noise=np.zeros(3)), x)
    assert shooting_prey_position(x, math.pi / 2, 5.0, WIDE, index=1, noise=np.zeros(3)) == pytest.approx(x)


def test_jumping_prey_hand_value():
    prey = jumping_prey_position(np.zeros(3), math.pi / 2, 2.0, WIDE, indices=(1, 2), noise=np.zeros(3))
    assert prey.tolist() == pytest.approx([0.0, 0.0, 2.0], abs=1e-15)
    prey = jumping_prey_position(np.zeros(3), math.pi / 2, 2.0, WIDE, indices=(2, 1), noise=np.zeros(3))
    assert prey.tolist() == pytest.approx([0.0, 2.0, 0.0], abs=1e-15)


def test_jumping_prey_identity_and_errors():
    x = np.array([4.0, -1.0, 0.5])
    assert np.array_equal(jumping_prey_position(x, 1.0, 0.0, WIDE, indices=(0, 1), noise=np.zeros(3)), x)
    with pytest.raises(DimensionTooSmall):
        jumping_prey_position([0.0], 1.0, 1.0, SearchSpace.cube(1, -1, 1), RandomStream(0))
    with pytest.raises(ValueError):
        jumping_prey_position(x, 1.0, 1.0, WIDE, indices=(1, 1), noise=np.zeros(3))


def test_attraction_hand_values():
    line = SearchSpace.cube(1, -10, 10)
    assert attraction_move([0.0], [1.0], line)[0] == pytest.approx(math.exp(-1))
    x = np.array([0.3, -0.2])
    assert np.array_equal(attraction_move(x, x, SearchSpace.cube(2, -1, 1)), x)
    far = attraction_move([0.0], [100.0], SearchSpace.cube(1, -200, 200))
    assert far[0] == 0.0


@given(
    arrays(float, 4, elements=st.floats(-3, 3)),
    arrays(float, 4, elements=st.floats(-3, 3)),
)
def test_attraction_displacement_norm(x, prey):
    new = attraction_move(x, prey, SearchSpace.cube(4, -1e9, 1e9), clamp=False)
    r = float(np.linalg.norm(prey - x))
    expected = math.exp(-r * r) * (prey - x)
    assert np.max(np.abs((new - x) - expected)) <= 1e-12
    assert abs(np.linalg.norm(new - x) - math.exp(-r * r) * r) <= 1e-12


def test_levy_sigma_against_high_precision():
    mpmath.mp.dps = 40
    b = mpmath.mpf(3) / 2
    ref = (mpmath.gamma(1 + b) * mpmath.sin(mpmath.pi * b / 2)
           / (mpmath.gamma((1 + b) / 2) * b * 2 ** ((b - 1) / 2))) ** (1 / b)
    assert levy_sigma(1.5) == pytest.approx(float(ref), rel=1e-12)
    assert levy_sigma(1.5) == pytest.approx(0.696575, abs=5e-7)
    assert levy_sigma(2.0) == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(ValueError):
        levy_sigma(1.0)


def test_levy_steps_are_heavy_tailed():
    s = levy_steps(1.5, RandomStream(0), 200_000)
    # a Gaussian with this spread essentially never exceeds 50
    assert np.mean(np.abs(s) > 50) > 1e-4
    assert abs(np.median(s)) < 0.05


def test_levy_escape_zero_alpha_keeps_position():
    class ZeroAlpha(RandomStream):
        def uniform(self, size=None):
            return 0.0

    x = np.array([1.0, 2.0])
    assert np.array_equal(levy_escape(x, 1.5, SearchSpace.cube(2, -5, 5), ZeroAlpha(1)), x)


@settings(max_examples=30)
@given(st.sampled_from([math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3, 5 * math.pi / 12]),
       st.integers(0, 2**31))
def test_shooting_frequency(theta, seed):
    angles = draw_perceiving_angle(RandomStream(seed), 100_000)
    freq = np.mean(is_shooting_phase(angles, theta))
    assert abs(freq - 2 * theta / math.pi) < 0.01
