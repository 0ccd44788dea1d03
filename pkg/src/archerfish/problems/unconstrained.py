"""Classical bound-constrained test functions with optional shift and rotation.

All functions take either one point (shape ``(d,)``) or a batch of rows
(shape ``(m, d)``) and reduce over the last axis. Every function is
minimized, with a known optimum on ``[-100, 100]^d``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..core import Array, DimensionMismatch, RandomStream, SearchSpace

BOUND = 100.0


def sphere(x: Array) -> Array:
    return np.sum(x * x, axis=-1)


def rosenbrock(x: Array) -> Array:
    a, b = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (b - a * a) ** 2 + (a - 1.0) ** 2, axis=-1)


def rastrigin(x: Array) -> Array:
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def ackley(x: Array) -> Array:
    d = x.shape[-1]
    s1 = np.sum(x * x, axis=-1) / d
    s2 = np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d
    return -20.0 * np.exp(-0.2 * np.sqrt(s1)) - np.exp(s2) + 20.0 + np.e


def griewank(x: Array) -> Array:
    i = np.sqrt(np.arange(1, x.shape[-1] + 1))
    return np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / i), axis=-1) + 1.0


# Schwefel 2.26 has its minimizer at 420.9687, outside [-100, 100]; this is
# the shifted form whose minimizer sits at the origin.
_SCHWEFEL_SHIFT = 420.968746


def schwefel(x: Array) -> Array:
    z = x + _SCHWEFEL_SHIFT
    d = x.shape[-1]
    return 418.9828872724338 * d - np.sum(z * np.sin(np.sqrt(np.abs(z))), axis=-1)


def bent_cigar(x: Array) -> Array:
    return x[..., 0] ** 2 + 1e6 * np.sum(x[..., 1:] ** 2, axis=-1)


@dataclass(frozen=True)
class UnconstrainedProblem:
    name: str
    space: SearchSpace
    evaluator: Callable[[Array], Array]
    f_star: float = 0.0
    x_star: Optional[Array] = None

    @property
    def dims(self) -> int:
        return self.space.dims

    def __call__(self, x) -> float:
        return float(self.evaluator(np.asarray(x, dtype=float)))

    def score(self, X: Array) -> tuple[Array, Array]:
        X = np.asarray(X, dtype=float)
        return np.asarray(self.evaluator(X), dtype=float).reshape(len(X)), np.zeros(len(X))

    def error(self, value: float) -> float:
        return float(value) - self.f_star


@dataclass(frozen=True)
class ShiftRotate:
    """Affine change of variables ``z = M (x - o)`` with orthogonal ``M``."""

    shift: Array
    rotation: Array

    def __post_init__(self):
        o = np.asarray(self.shift, dtype=float).ravel()
        m = np.asarray(self.rotation, dtype=float)
        if m.ndim != 2 or m.shape != (o.size, o.size):
            raise DimensionMismatch(f"rotation must be {o.size}x{o.size}, got {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(o.size))) > 1e-9:
            raise ValueError("rotation matrix is not orthogonal")
        object.__setattr__(self, "shift", o)
        object.__setattr__(self, "rotation", m)

    @property
    def dims(self) -> int:
        return self.shift.size

    @classmethod
    def identity(cls, d: int) -> "ShiftRotate":
        return cls(np.zeros(d), np.eye(d))

    @classmethod
    def from_files(cls, shift_path, rotation_path=None) -> "ShiftRotate":
        """Load whitespace-separated reals; a missing rotation file means identity."""
        o = np.loadtxt(Path(shift_path), dtype=float, ndmin=1).ravel()
        if rotation_path is None:
            return cls(o, np.eye(o.size))
        m = np.loadtxt(Path(rotation_path), dtype=float, ndmin=2)
        return cls(o, m)

    def save(self, shift_path, rotation_path) -> None:
        np.savetxt(Path(shift_path), self.shift[None, :], fmt="%.17g")
        np.savetxt(Path(rotation_path), self.rotation, fmt="%.17g")


def random_rotation(d: int, rng: RandomStream) -> Array:
    """Orthogonal matrix from the QR factorization of a Gaussian matrix."""
    if d < 1:
        raise ValueError("d must be positive")
    q, r = np.linalg.qr(rng.normal(1.0, (d, d)))
    # sign fix makes the factorization unique, hence the draw Haar-distributed
    return q * np.sign(np.diag(r))


def transform(problem: UnconstrainedProblem, t: ShiftRotate) -> UnconstrainedProblem:
    if t.dims != problem.dims:
        raise DimensionMismatch(f"transform is {t.dims}-dimensional, problem is {problem.dims}")
    base, o, m = problem.evaluator, t.shift, t.rotation

    def evaluator(x: Array) -> Array:
        return base((np.asarray(x, dtype=float) - o) @ m.T)

    x_star = None
    if problem.x_star is not None:
        # z = M (x - o) hits the old minimizer at x = M^T z* + o
        x_star = m.T @ problem.x_star + o
    return replace(problem, name=f"{problem.name}_sr", evaluator=evaluator, x_star=x_star)


_SUITE = {
    "sphere": (sphere, 0.0),
    "rosenbrock": (rosenbrock, 1.0),
    "rastrigin": (rastrigin, 0.0),
    "ackley": (ackley, 0.0),
    "griewank": (griewank, 0.0),
    "schwefel": (schwefel, 0.0),
    "bent_cigar": (bent_cigar, 0.0),
}

# Unimodal members probe exploitation; the multimodal ones probe exploration.
UNIMODAL = ("sphere", "bent_cigar", "rosenbrock")
MULTIMODAL = ("rastrigin", "ackley", "griewank", "schwefel")


def make_problem(name: str, d: int) -> UnconstrainedProblem:
    try:
        func, x_opt = _SUITE[name]
    except KeyError:
        raise KeyError(f"unknown unconstrained problem {name!r}") from None
    if name == "rosenbrock" and d < 2:
        raise ValueError("rosenbrock needs d >= 2")
    x_star = np.full(d, x_opt)
    space = SearchSpace.cube(d, -BOUND, BOUND)
    # the shifted Schwefel constant is only accurate to ~1e-5 per coordinate
    f_star = float(func(x_star)) if name == "schwefel" else 0.0
    return UnconstrainedProblem(name, space, func, f_star, x_star)


def builtin_suite(d: int) -> list[UnconstrainedProblem]:
    if d < 1:
        raise ValueError("d must be positive")
    names = [n for n in _SUITE if not (n == "rosenbrock" and d < 2)]
    return [make_problem(n, d) for n in names]


def names() -> list[str]:
    return list(_SUITE)
