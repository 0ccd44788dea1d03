"""Archerfish Hunting Optimizer.

Each archerfish draws a perceiving angle every iteration. Angles close to
the water line (``|theta0|`` within ``swap_angle`` of 0 or pi) trigger the
shooting behaviour: the shooter knocks a prey down at a ballistic offset and
every flock member that is worse than the prey swims towards it. Any other
angle triggers jumping, where the fish only chases its own nearby prey.
Fish that fail to improve for ``stagnation_limit`` decisions are relocated
with a Levy flight.

Comparisons go through feasibility rules: an evaluation is the pair
``(value, violation)`` and unconstrained problems simply report zero
violation, which reduces the rules to plain ``<`` on values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    Agent,
    Array,
    BudgetExhausted,
    EvalCounter,
    RandomStream,
    SearchSpace,
    as_scorer,
    clamp_to_space,
    sample_initial_position,
)


class DimensionTooSmall(ValueError):
    """Jumping needs two distinct coordinates, so ``d >= 2``."""


# ---------------------------------------------------------------------------
# parameters and records
# ---------------------------------------------------------------------------


def default_population(dims: int) -> int:
    """Flock size ``floor(30 * d**1.5)`` used in the reference experiments."""
    return int(math.floor(30 * dims**1.5))


# best Friedman configuration per dimension of the unconstrained study
TUNED_CONFIGS = {
    5: (math.pi / 12, 0.01),
    10: (5 * math.pi / 12, 0.01),
    15: (math.pi / 3, 0.01),
    20: (5 * math.pi / 12, 0.01),
}


@dataclass
class AhoParams:
    population: int = 30
    swap_angle: float = math.pi / 12
    attractiveness: float = 0.01
    levy_beta: float = 1.5
    stagnation_limit: Optional[int] = None
    budget: int = 10_000
    seed: int = 0
    trace_stride: Optional[int] = None
    stagnation_unit: str = "decision"
    refraction: float = 1e-6
    normalize: bool = True

    def validate(self) -> "AhoParams":
        if int(self.population) < 2:
            raise ValueError("population must be at least 2")
        if not 0.0 < self.swap_angle < math.pi / 2:
            raise ValueError("swap_angle must lie in (0, pi/2)")
        if not self.attractiveness > 0.0:
            raise ValueError("attractiveness must be positive")
        if not 1.0 < self.levy_beta <= 2.0:
            raise ValueError("levy_beta must lie in (1, 2]")
        if self.stagnation_limit is not None and int(self.stagnation_limit) < 1:
            raise ValueError("stagnation_limit must be a positive integer")
        if int(self.budget) < 1:
            raise ValueError("budget must be a positive integer")
        if self.stagnation_unit not in ("iteration", "decision"):
            raise ValueError("stagnation_unit must be 'iteration' or 'decision'")
        if not (math.isfinite(self.refraction) and self.refraction >= 0.0):
            raise ValueError("refraction must be a finite non-negative number")
        if self.trace_stride is not None and int(self.trace_stride) < 1:
            raise ValueError("trace_stride must be a positive integer")
        return self

    def limit_for(self, dims: int) -> int:
        if self.stagnation_limit is None:
            return dims * int(self.population)
        return int(self.stagnation_limit)

    def stride(self) -> int:
        if self.trace_stride is None:
            return max(1, int(self.budget) // 100)
        return int(self.trace_stride)

    @classmethod
    def for_dimension(cls, dims: int, budget: int, seed: int = 0, **overrides) -> "AhoParams":
        """Reference settings: flock size ``floor(30 d^1.5)`` and the tuned angle/rate."""
        theta, omega = TUNED_CONFIGS.get(dims, (math.pi / 12, 0.01))
        kwargs = dict(
            population=default_population(dims),
            swap_angle=theta,
            attractiveness=omega,
            budget=budget,
            seed=seed,
        )
        kwargs.update(overrides)
        return cls(**kwargs)


@dataclass
class ConvergenceTrace:
    """Best-so-far samples taken every ``stride`` evaluations."""

    fes: list = field(default_factory=list)
    values: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def samples(self) -> list[tuple[int, float]]:
        return list(zip(self.fes, self.values))

    def add(self, fe: int, value: float, violation: float) -> None:
        if self.fes and fe <= self.fes[-1]:
            return
        self.fes.append(int(fe))
        self.values.append(float(value))
        self.violations.append(float(violation))

    def is_monotone(self) -> bool:
        """Samples never get worse under the feasibility ordering."""
        for a in range(1, len(self.fes)):
            v0, v1 = self.violations[a - 1], self.violations[a]
            if v1 > v0:
                return False
            if v1 == v0 == 0.0 and self.values[a] > self.values[a - 1]:
                return False
        return all(b > a for a, b in zip(self.fes, self.fes[1:]))


@dataclass
class RunRecord:
    problem: str
    seed: int
    best_position: Array
    best_value: float
    best_violation: float
    fes: int
    trace: ConvergenceTrace
    iterations: int = 0
    feasible_found: bool = True

    @property
    def feasible(self) -> bool:
        return self.best_violation == 0.0


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def draw_perceiving_angle(rng: RandomStream, size=None):
    """``(-1)**b * alpha * pi`` with ``b ~ Bernoulli(1/2)`` and ``alpha ~ U[0, 1)``."""
    b = rng.bernoulli(0.5, size)
    alpha = rng.uniform(size)
    sign = 1 - 2 * np.asarray(b)
    theta0 = sign * alpha * math.pi
    return float(theta0) if size is None else theta0


def is_shooting_phase(theta0, theta: float):
    """True iff ``|theta0|`` lies in ``]0, theta[`` or ``]pi - theta, pi[``."""
    a = np.abs(theta0)
    inside = ((a > 0) & (a < theta)) | ((a > math.pi - theta) & (a < math.pi))
    return bool(inside) if np.ndim(inside) == 0 else inside


def shooting_prey_position(
    shooter,
    theta0: float,
    omega: float,
    space: SearchSpace,
    rng: Optional[RandomStream] = None,
    *,
    index: Optional[int] = None,
    noise: Optional[Array] = None,
    clamp: bool = True,
) -> Array:
    """Prey knocked down by a shooter: one coordinate offset by ``omega sin(2 theta0)`` plus noise.

    ``index`` (0-based) and ``noise`` override the random draws, which are
    otherwise taken from ``rng`` in that order.
    """
    pos = np.asarray(getattr(shooter, "position", shooter), dtype=float)
    d = pos.size
    if index is None:
        index = int(rng.integer(0, d - 1))
    if noise is None:
        noise = rng.uniform(d)
    prey = pos + noise
    prey[index] += omega * math.sin(2.0 * theta0)
    return clamp_to_space(prey, space) if clamp else prey


def jumping_prey_position(
    jumper,
    theta0: float,
    omega: float,
    space: SearchSpace,
    rng: Optional[RandomStream] = None,
    *,
    indices: Optional[tuple[int, int]] = None,
    noise: Optional[Array] = None,
    clamp: bool = True,
) -> Array:
    """Prey reached by jumping: two distinct coordinates offset by ``omega sin(2 theta0)`` and ``omega sin^2(theta0)``."""
    pos = np.asarray(getattr(jumper, "position", jumper), dtype=float)
    d = pos.size
    if d < 2:
        raise DimensionTooSmall("jumping needs at least two dimensions")
    if indices is None:
        indices = rng.distinct_pair(d)
    j, k = indices
    if j == k:
        raise ValueError("jumping offsets need two distinct coordinates")
    if noise is None:
        noise = rng.uniform(d)
    prey = pos + noise
    prey[j] += omega * math.sin(2.0 * theta0)
    prey[k] += omega * math.sin(theta0) ** 2
    return clamp_to_space(prey, space) if clamp else prey


def attraction_move(mover, prey, space: SearchSpace, *, clamp: bool = True) -> Array:
    """Step ``exp(-r**2) * (prey - x)`` towards the prey, ``r`` being the Euclidean gap."""
    pos = np.asarray(getattr(mover, "position", mover), dtype=float)
    delta = np.asarray(prey, dtype=float) - pos
    new = pos + math.exp(-float(delta @ delta)) * delta
    return clamp_to_space(new, space) if clamp else new


def levy_sigma(beta: float) -> float:
    """Mantegna scale ``sigma_u`` for Levy index ``beta``; uses ``math.gamma``."""
    if not 1.0 < beta <= 2.0:
        raise ValueError("beta must lie in (1, 2]")
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    # sin(pi) is ~1e-16 rather than 0 at beta == 2
    return max(num / den, 0.0) ** (1.0 / beta)


def levy_steps(beta: float, rng: RandomStream, size) -> Array:
    """Mantegna ratios ``u / |v|**(1/beta)``, ``u ~ N(0, sigma^2)``, ``v ~ N(0, 1)``."""
    u = rng.normal(levy_sigma(beta), size)
    v = rng.normal(1.0, size)
    return u / np.abs(v) ** (1.0 / beta)


def levy_escape(agent, beta: float, space: SearchSpace, rng: RandomStream, *, clamp: bool = True) -> Array:
    """Relocate a stagnating fish: ``x + alpha * levy_steps``, ``alpha ~ U[0, 1)``.

    Resetting the agent's stagnation counter is left to the caller.
    """
    pos = np.asarray(getattr(agent, "position", agent), dtype=float)
    alpha = rng.uniform()
    new = pos + alpha * levy_steps(beta, rng, pos.size)
    return clamp_to_space(new, space) if clamp else new


# ---------------------------------------------------------------------------
# state and main loop
# ---------------------------------------------------------------------------


def better(f1, v1, f2, v2):
    """Feasibility-rule ``(f1, v1)`` strictly beats ``(f2, v2)``; vectorizes over arrays."""
    return (v1 < v2) | ((v1 == v2) & (v1 == 0.0) & (f1 < f2))


@dataclass
class AhoState:
    positions: Array
    values: Array
    violations: Array
    stagnation: Array
    best_position: Array
    best_value: float
    best_violation: float
    counter: EvalCounter
    rng: RandomStream
    trace: ConvergenceTrace
    stride: int
    iteration: int = 0
    feasible_found: bool = False
    _next_sample: int = 0

    @property
    def flock(self) -> list[Agent]:
        return [
            Agent(self.positions[i].copy(), float(self.values[i]), int(self.stagnation[i]), float(self.violations[i]))
            for i in range(len(self.values))
        ]

    @property
    def best(self) -> Agent:
        return Agent(self.best_position.copy(), self.best_value, 0, self.best_violation)

    def _observe(self, X: Array, f: Array, v: Array) -> None:
        """Fold freshly evaluated rows into the incumbent and sample the trace."""
        if f.size == 1:
            f0, v0 = float(f[0]), float(v[0])
            if v0 == 0.0:
                self.feasible_found = True
            if better(f0, v0, self.best_value, self.best_violation):
                self.best_value, self.best_violation = f0, v0
                self.best_position = X[0].copy()
        else:
            feasible = v == 0.0
            if feasible.any():
                self.feasible_found = True
                cand = np.flatnonzero(feasible)
                b = cand[np.argmin(f[cand])]
            else:
                b = int(np.argmin(v))
            if better(float(f[b]), float(v[b]), self.best_value, self.best_violation):
                self.best_value, self.best_violation = float(f[b]), float(v[b])
                self.best_position = X[b].copy()
        if self.counter.used >= self._next_sample:
            self.sample()

    def sample(self) -> None:
        self.trace.add(self.counter.used, self.best_value, self.best_violation)
        self._next_sample = (self.counter.used // self.stride + 1) * self.stride


def _score(scorer, counter: EvalCounter, X: Array) -> tuple[Array, Array]:
    counter.charge(len(X))
    f, v = scorer.score(X)
    return np.asarray(f, dtype=float), np.asarray(v, dtype=float)


def init_state(problem, params: AhoParams) -> AhoState:
    """Scatter the flock uniformly over the box and evaluate it (N evaluations)."""
    params.validate()
    scorer = as_scorer(problem)
    space = scorer.space
    n = int(params.population)
    if params.budget < n:
        raise ValueError(f"budget {params.budget} cannot cover the initial flock of {n}")
    rng = RandomStream(params.seed)
    X = np.vstack([sample_initial_position(space, rng) for _ in range(n)])
    counter = EvalCounter(int(params.budget))
    f, v = _score(scorer, counter, X)
    state = AhoState(
        positions=X,
        values=f,
        violations=v,
        stagnation=np.zeros(n, dtype=np.int64),
        best_position=X[0].copy(),
        best_value=float(f[0]),
        best_violation=float(v[0]),
        counter=counter,
        rng=rng,
        trace=ConvergenceTrace(),
        stride=params.stride(),
        feasible_found=False,
    )
    state._observe(X, f, v)
    state.sample()
    return state


def aho_step(state: AhoState, params: AhoParams, space: SearchSpace, problem) -> AhoState:
    """One outer iteration: every fish in turn either shoots or jumps.

    Raises BudgetExhausted, with the state left consistent, when the budget
    runs out part-way through the sweep.
    """
    scorer = as_scorer(problem, space)
    counter, rng = state.counter, state.rng
    if counter.exhausted:
        raise BudgetExhausted("no evaluations left")
    X, F, V, S = state.positions, state.values, state.violations, state.stagnation
    n, d = X.shape
    theta, omega, beta = params.swap_angle, params.attractiveness, params.levy_beta
    limit = params.limit_for(d)
    inc = 1 if params.stagnation_unit == "decision" else 0
    fresh = np.zeros(n, dtype=bool)

    # per-iteration draws, consumed in fish order
    angles = draw_perceiving_angle(rng, n)
    shooting = is_shooting_phase(angles, theta)
    noise = params.refraction * rng.uniform((n, d))
    first = rng.integer(0, d - 1, n)
    if d >= 2:
        second = rng.integer(0, d - 2, n)
        second = second + (second >= first)

    i = 0
    while i < n:
        if not shooting[i] and d >= 2:
            j = i + 1
            while j < n and not shooting[j]:
                j += 1
            # two evaluations per jumper at most, so the whole run is affordable
            if counter.remaining >= 2 * (j - i):
                _jump_block(state, scorer, space, np.arange(i, j), angles, noise, first, second,
                            omega, limit, inc, beta, fresh)
                i = j
                continue
        theta0 = float(angles[i])
        if shooting[i]:
            prey = shooting_prey_position(X[i], theta0, omega, space, index=int(first[i]), noise=noise[i])
            self_only = False
        elif d >= 2:
            prey = jumping_prey_position(
                X[i], theta0, omega, space, indices=(int(first[i]), int(second[i])), noise=noise[i]
            )
            self_only = True
        else:
            # one-dimensional jump degenerates to the single sin(2 theta0) offset
            prey = shooting_prey_position(X[i], theta0, omega, space, index=0, noise=noise[i])
            self_only = True

        if counter.exhausted:
            raise BudgetExhausted("budget spent mid-sweep")
        P = prey[None, :]
        pf, pv = _score(scorer, counter, P)
        state._observe(P, pf, pv)
        pf0, pv0 = float(pf[0]), float(pv[0])

        if self_only:
            _chase_one(state, scorer, space, i, prey, pf0, pv0, limit, inc, beta, fresh)
        else:
            _chase_all(state, scorer, space, prey, pf0, pv0, limit, inc, beta, fresh)
        i += 1
    if not inc:
        S[~fresh] += 1
    state.iteration += 1
    return state


def _jump_block(state, scorer, space, idx, angles, noise, first, second, omega, limit, inc, beta, fresh) -> None:
    """Consecutive jumpers only touch themselves, so their sweep is evaluated in batches."""
    X, F, V, S = state.positions, state.values, state.violations, state.stagnation
    counter = state.counter
    rows = np.arange(idx.size)
    t0 = angles[idx]
    P = X[idx] + noise[idx]
    P[rows, first[idx]] += omega * np.sin(2.0 * t0)
    P[rows, second[idx]] += omega * np.sin(t0) ** 2
    P = clamp_to_space(P, space)
    pf, pv = _score(scorer, counter, P)
    state._observe(P, pf, pv)

    accept = better(pf, pv, F[idx], V[idx])
    mv = idx[accept]
    if mv.size:
        delta = P[accept] - X[mv]
        step = np.exp(-np.einsum("ij,ij->i", delta, delta))[:, None] * delta
        new = np.minimum(space.upper, np.maximum(space.lower, X[mv] + step))
        nf, nv = _score(scorer, counter, new)
        improved = better(nf, nv, F[mv], V[mv])
        X[mv], F[mv], V[mv] = new, nf, nv
        S[mv] = np.where(improved, 0, S[mv] + inc)
        fresh[mv[improved]] = True
        state._observe(new, nf, nv)

    rest = idx[~accept]
    esc = rest[S[rest] + inc >= limit]
    S[rest[S[rest] + inc < limit]] += inc
    if esc.size:
        _levy_batch(state, scorer, space, esc, beta, fresh)


def _levy_batch(state, scorer, space, idx, beta, fresh) -> None:
    X, F, V, S = state.positions, state.values, state.violations, state.stagnation
    alpha = state.rng.uniform(idx.size)
    steps = levy_steps(beta, state.rng, (idx.size, X.shape[1]))
    new = clamp_to_space(X[idx] + alpha[:, None] * steps, space)
    nf, nv = _score(scorer, state.counter, new)
    X[idx], F[idx], V[idx] = new, nf, nv
    S[idx] = 0
    fresh[idx] = True
    state._observe(new, nf, nv)


def _chase_one(state, scorer, space, i, prey, pf, pv, limit, inc, beta, fresh) -> None:
    X, F, V, S = state.positions, state.values, state.violations, state.stagnation
    counter = state.counter
    if better(pf, pv, F[i], V[i]):
        if counter.exhausted:
            raise BudgetExhausted("budget spent mid-sweep")
        new = attraction_move(X[i], prey, space)
        P = new[None, :]
        nf, nv = _score(scorer, counter, P)
        improved = better(float(nf[0]), float(nv[0]), F[i], V[i])
        X[i], F[i], V[i] = new, nf[0], nv[0]
        if improved:
            S[i] = 0
            fresh[i] = True
        else:
            S[i] += inc
        state._observe(P, nf, nv)
        return
    if S[i] + inc >= limit:
        if counter.exhausted:
            raise BudgetExhausted("budget spent mid-sweep")
        new = levy_escape(X[i], beta, space, state.rng)
        P = new[None, :]
        nf, nv = _score(scorer, counter, P)
        X[i], F[i], V[i] = new, nf[0], nv[0]
        S[i] = 0
        fresh[i] = True
        state._observe(P, nf, nv)
    else:
        S[i] += inc


def _chase_all(state, scorer, space, prey, pf, pv, limit, inc, beta, fresh) -> None:
    """Every fish worse than the prey swims towards it; the rest stagnate."""
    X, F, V, S = state.positions, state.values, state.violations, state.stagnation
    counter = state.counter
    movers = better(pf, pv, F, V)
    escapers = ~movers & (S + inc >= limit)
    needs_eval = movers | escapers
    n_eval = int(np.count_nonzero(needs_eval))
    stop = None
    if n_eval > counter.remaining:
        # sweep order is fish order: cut before the first unaffordable evaluation
        stop = int(np.flatnonzero(needs_eval)[counter.remaining])
        cut = np.arange(len(F)) >= stop
        movers &= ~cut
        escapers &= ~cut
        stagnating = ~(movers | escapers) & ~cut
    else:
        stagnating = ~needs_eval

    S[stagnating] += inc

    idx = np.flatnonzero(movers)
    if idx.size:
        delta = prey - X[idx]
        step = np.exp(-np.einsum("ij,ij->i", delta, delta))[:, None] * delta
        new = np.minimum(space.upper, np.maximum(space.lower, X[idx] + step))
        nf, nv = _score(scorer, counter, new)
        improved = better(nf, nv, F[idx], V[idx])
        X[idx], F[idx], V[idx] = new, nf, nv
        S[idx] = np.where(improved, 0, S[idx] + inc)
        fresh[idx[improved]] = True
        state._observe(new, nf, nv)

    idx = np.flatnonzero(escapers)
    if idx.size:
        _levy_batch(state, scorer, space, idx, beta, fresh)

    if stop is not None:
        raise BudgetExhausted("budget spent mid-sweep")


class UnitBox:
    """View of a problem through the affine map of ``[0, 1]^d`` onto its box."""

    def __init__(self, scorer):
        self.inner = scorer
        self.outer = scorer.space
        self.space = SearchSpace.cube(self.outer.dims, 0.0, 1.0)
        self.name = getattr(scorer, "name", "objective")

    def to_outer(self, U: Array) -> Array:
        # exact at both faces, so clamped points stay inside the outer box
        lo, hi = self.outer.lower, self.outer.upper
        return np.clip(lo + U * (hi - lo), lo, hi)

    def score(self, U: Array):
        return self.inner.score(self.to_outer(U))


def aho_run(problem, params: AhoParams, space: Optional[SearchSpace] = None, name: Optional[str] = None) -> RunRecord:
    """Run the optimizer until the evaluation budget is spent."""
    scorer = as_scorer(problem, space)
    outer = scorer
    if params.normalize:
        scorer = UnitBox(outer)
    space = scorer.space
    state = init_state(scorer, params)
    while not state.counter.exhausted:
        try:
            aho_step(state, params, space, scorer)
        except BudgetExhausted:
            break
    state.sample()
    if state.trace.fes[-1] != state.counter.used:
        state.trace.add(state.counter.used, state.best_value, state.best_violation)
    best_x = state.best_position
    if params.normalize:
        best_x = scorer.to_outer(best_x)
    finalize = getattr(outer, "finalize", None)
    if finalize is not None:
        best_x = finalize(best_x)
    return RunRecord(
        problem=name or getattr(outer, "name", "objective"),
        seed=int(params.seed),
        best_position=best_x,
        best_value=state.best_value,
        best_violation=state.best_violation,
        fes=state.counter.used,
        trace=state.trace,
        iterations=state.iteration,
        feasible_found=state.feasible_found,
    )
