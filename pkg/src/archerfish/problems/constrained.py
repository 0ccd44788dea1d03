"""Five constrained mechanical design problems and feasibility-rule helpers.

Each model function maps a sequence of coordinate columns to
``(objective, [g_1, ..., g_m])`` with every constraint written as
``g_i(x) <= 0``. Columns may be Python floats (one point) or numpy arrays
(a batch), so the same transcription serves both paths.

``variant="reference"`` (the default) gives the formulation whose optimum is
the tabulated best-known value. ``variant="verbatim"`` keeps three printed
quirks that the reference form corrects:

* RC19 uses ``G = 12.106`` psi and squares ``tau''`` inside the cross term
  of ``tau``; with either quirk no point of the box is feasible. Its
  reference buckling load is ``4.013 E sqrt(x3^2 x4^6 / 30) / L^2`` times the
  usual correction, while the verbatim one is ``4.013 E x3 x4^3 / (6 L^2)``.
* RC21 drops the material density ``rho = 7.8e-6``, which scales the
  objective by ``1 / rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..core import Array, SearchSpace

SUCCESS_TOL = 1e-8
VARIANTS = ("reference", "verbatim")


class UnknownProblem(KeyError):
    pass


def _sqrt(v):
    return np.sqrt(v)


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


def speed_reducer(x, variant="reference"):
    x1, x2, x3, x4, x5, x6, x7 = x
    f = (
        0.7854 * x2**2 * x1 * (14.9334 * x3 - 43.0934 + 3.3333 * x3**2)
        + 0.7854 * (x5 * x7**2 + x4 * x6**2)
        - 1.508 * x1 * (x7**2 + x6**2)
        + 7.477 * (x7**3 + x6**3)
    )
    g = [
        -x1 * x2**2 * x3 + 27.0,
        -x1 * x2**2 * x3**2 + 397.5,
        -x2 * x6**4 * x3 / x4**3 + 1.93,
        -x2 * x7**4 * x3 / x5**3 + 1.93,
        10.0 / x6**3 * _sqrt(16.91e6 + (745.0 * x4 / (x2 * x3)) ** 2) - 1100.0,
        10.0 / x7**3 * _sqrt(157.5e6 + (745.0 * x5 / (x2 * x3)) ** 2) - 850.0,
        x2 * x3 - 40.0,
        -x1 / x2 + 5.0,
        x1 / x2 - 12.0,
        1.5 * x6 - x4 + 1.9,
        1.1 * x7 - x5 + 1.9,
    ]
    return f, g


def pressure_vessel(x, variant="reference"):
    x1, x2, x3, x4 = x
    z1 = 0.0625 * x1
    z2 = 0.0625 * x2
    f = 1.7781 * z2 * x3**2 + 0.6224 * z1 * x3 * x4 + 3.1661 * z1**2 * x4 + 19.84 * z1**2 * x3
    g = [
        0.00954 * x3 - z2,
        0.0193 * x3 - z1,
        x4 - 240.0,
        -math.pi * x3**2 * x4 - 4.0 / 3.0 * math.pi * x3**3 + 1296000.0,
    ]
    return f, g


WELDED_BEAM = dict(L=14.0, P=6000.0, E=30e6, sigma_max=30000.0, tau_max=13600.0, delta_max=0.25)
WELDED_BEAM_G = {"reference": 12e6, "verbatim": 12.106}


def welded_beam(x, variant="reference"):
    x1, x2, x3, x4 = x
    c = WELDED_BEAM
    L, P, E = c["L"], c["P"], c["E"]
    G = WELDED_BEAM_G[variant]
    f = 0.04811 * x3 * x4 * (x2 + 14.0) + 1.10471 * x1**2 * x2
    tau1 = P / (math.sqrt(2.0) * x2 * x1)
    M = P * (x2 / 2.0 + L)
    gap = x2**2 / 4.0 + ((x1 + x3) / 2.0) ** 2
    R = _sqrt(gap)
    J = 2.0 * (gap * math.sqrt(2.0) * x1 * x2)
    tau2 = R * M / J
    cross = tau2**2 if variant == "verbatim" else tau2
    tau = _sqrt(tau1**2 + tau2**2 + 2.0 * tau1 * cross * x2 / (2.0 * R))
    sigma = 6.0 * P * L / (x4 * x3**2)
    delta = 6.0 * P * L**3 / (E * x3**2 * x4)
    if variant == "verbatim":
        Pc = 4.013 * E * x3 * x4**3 / (6.0 * L**2)
    else:
        Pc = 4.013 * E * _sqrt(x3**2 * x4**6 / 30.0) / L**2
    Pc = Pc * (1.0 - x3 / (2.0 * L) * math.sqrt(E / (4.0 * G)))
    g = [
        x1 - x4,
        delta - c["delta_max"],
        P - Pc,
        tau - c["tau_max"],
        sigma - c["sigma_max"],
    ]
    return f, g


def spring(x, variant="reference"):
    x1, x2, x3 = x
    f = x1**2 * x2 * (2.0 + x3)
    g = [
        1.0 - x2**3 * x3 / (71785.0 * x1**4),
        (4.0 * x2**2 - x1 * x2) / (12566.0 * (x2 * x1**3 - x1**4)) + 1.0 / (5108.0 * x1**2) - 1.0,
        1.0 - 140.45 * x1 / (x2**2 * x3),
        (x1 + x2) / 1.5 - 1.0,
    ]
    return f, g


CLUTCH = dict(
    delta_R=20.0, L_max=30.0, mu=0.6, V_sr_max=10.0, delta=0.5, s=1.5,
    T_max=15.0, n=250.0, I_z=55.0, M_s=40.0, M_f=3.0, p_max=1.0, rho=7.8e-6,
)


def clutch_brake(x, variant="reference"):
    x1, x2, x3, x4, x5 = x
    c = CLUTCH
    area = math.pi * (x2**2 - x1**2)
    M_h = 2.0 / 3.0 * c["mu"] * x4 * x5 * (x2**3 - x1**3) / (x2**2 - x1**2)
    omega = math.pi * c["n"] / 30.0
    p_rz = x4 / area
    R_sr = 2.0 / 3.0 * (x2**3 - x1**3) / (x2**2 * x1**2)
    V_sr = math.pi * R_sr * c["n"] / 30.0
    T = c["I_z"] * omega / (M_h + c["M_f"])
    f = area * x3 * (x5 + 1.0)
    if variant != "verbatim":
        f = f * c["rho"]
    g = [
        -c["p_max"] + p_rz,
        p_rz * V_sr - c["V_sr_max"] * c["p_max"],
        c["delta_R"] + x1 - x2,
        -c["L_max"] + (x5 + 1.0) * (x3 + c["delta"]),
        c["s"] * c["M_s"] - M_h,
        -T,
        -c["V_sr_max"] * c["p_max"] + V_sr,
        T - c["T_max"],
    ]
    return f, g


# ---------------------------------------------------------------------------
# problem container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintReport:
    violations: Array
    mv: float

    @property
    def feasible(self) -> bool:
        return self.mv == 0.0


@dataclass(frozen=True)
class ConstrainedProblem:
    name: str
    title: str
    space: SearchSpace
    model: Callable
    n_inequalities: int
    f_star: float
    integrality: Array = field(default=None)
    variant: str = "reference"
    equalities: tuple = ()

    def __post_init__(self):
        mask = np.zeros(self.space.dims, dtype=bool) if self.integrality is None else np.asarray(self.integrality, bool)
        object.__setattr__(self, "integrality", mask)

    @property
    def dims(self) -> int:
        return self.space.dims

    @property
    def n_constraints(self) -> int:
        return self.n_inequalities + len(self.equalities)

    @property
    def has_integers(self) -> bool:
        return bool(self.integrality.any())

    def objective(self, x) -> float:
        return float(self._eval_point(x)[0])

    @property
    def inequalities(self) -> list[Callable]:
        """One callable per ``g_i``, each returning ``g_i(x)`` at a single point."""
        return [lambda x, i=i: float(self._eval_point(x)[1][i]) for i in range(self.n_inequalities)]

    def _eval_point(self, x):
        x = round_integrality(np.asarray(x, dtype=float), self)
        with np.errstate(all="ignore"):
            return self.model(x.tolist(), self.variant)

    def report(self, x) -> ConstraintReport:
        _, g = self._eval_point(x)
        viol = np.maximum(np.asarray(g, dtype=float), 0.0)
        mv = float(np.sum(viol) / self.n_constraints)
        if not np.isfinite(mv):
            mv = math.inf
        return ConstraintReport(viol, mv)

    def score(self, X: Array) -> tuple[Array, Array]:
        """Objective values and mean violations for each row of ``X``.

        A row whose formulas yield NaN (a negative radicand, a zero divisor)
        scores ``+inf`` on both, so it loses every comparison.
        """
        X = np.asarray(X, dtype=float)
        if self.has_integers:
            X = round_integrality(X, self)
        m = self.n_constraints
        with np.errstate(all="ignore"):
            if len(X) == 1:
                try:
                    f, g = self.model(X[0].tolist(), self.variant)
                    mv = sum(gi if gi > 0.0 else 0.0 for gi in g) / m
                    f, mv = float(f), float(mv)
                except (ZeroDivisionError, OverflowError, ValueError):
                    return np.array([math.inf]), np.array([math.inf])
                if not (math.isfinite(f) and math.isfinite(mv)) or any(gi != gi for gi in g):
                    f = mv = math.inf
                return np.array([f]), np.array([mv])
            f, g = self.model(X.T, self.variant)
            f = np.asarray(f, dtype=float) * np.ones(len(X))
            G = np.empty((len(g), len(X)))
            for r, gi in enumerate(g):
                G[r] = gi
            mv = np.sum(np.maximum(G, 0.0), axis=0) / m
            bad = ~np.isfinite(f) | ~np.isfinite(mv) | np.isnan(G).any(axis=0)
        f[bad] = math.inf
        mv[bad] = math.inf
        return f, mv

    def finalize(self, x: Array) -> Array:
        return round_integrality(np.asarray(x, dtype=float), self)

    def error(self, value: float) -> float:
        return float(value) - self.f_star


def round_integrality(x: Array, problem: ConstrainedProblem) -> Array:
    """Round the integer-constrained coordinates and clamp them to their integer range."""
    mask = problem.integrality
    if not mask.any():
        return x
    x = np.array(x, dtype=float)
    lo = np.ceil(problem.space.lower[mask])
    hi = np.floor(problem.space.upper[mask])
    x[..., mask] = np.clip(np.rint(x[..., mask]), lo, hi)
    return x


def mean_violation(problem: ConstrainedProblem, x) -> ConstraintReport:
    return problem.report(x)


def feasibility_compare(a: tuple[float, float], b: tuple[float, float]) -> int:
    """Order two ``(value, mean_violation)`` pairs: -1 if ``a`` wins, 1 if ``b`` wins, 0 on a tie.

    A ConstraintReport may stand in for the violation.
    """
    fa, va = a[0], getattr(a[1], "mv", a[1])
    fb, vb = b[0], getattr(b[1], "mv", b[1])
    if va == 0.0 and vb == 0.0:
        return -1 if fa < fb else (1 if fb < fa else 0)
    if va == 0.0:
        return -1
    if vb == 0.0:
        return 1
    return -1 if va < vb else (1 if vb < va else 0)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


_SPECS = {
    "RC15": (
        "Weight Minimization of a Speed Reducer",
        speed_reducer,
        [(2.6, 3.6), (0.7, 0.8), (17, 28), (7.3, 8.3), (7.3, 8.3), (2.9, 3.9), (5, 5.5)],
        11,
        2.9944244658e03,
        None,
    ),
    "RC18": (
        "Pressure vessel design",
        pressure_vessel,
        [(1, 99), (1, 99), (10, 200), (10, 200)],
        4,
        5.8853327736e03,
        [True, True, False, False],
    ),
    "RC19": (
        "Welded beam design",
        welded_beam,
        [(0.125, 2), (0.1, 10), (0.1, 10), (0.1, 2)],
        5,
        1.6702177263e00,
        None,
    ),
    "RC17": (
        "Tension/compression spring design (case 1)",
        spring,
        [(0.05, 2.0), (0.25, 1.3), (2.0, 15.0)],
        4,
        1.2665232788e-02,
        None,
    ),
    "RC21": (
        "Multiple disk clutch brake design problem",
        clutch_brake,
        [(60, 80), (90, 110), (1, 3), (0, 1000), (2, 9)],
        8,
        2.3524245790e-01,
        [True] * 5,
    ),
}

# Constraint counts as tabulated; RC17 and RC21 list one more constraint in
# their formula blocks than the table reports, and all listed ones are used.
TABULATED_G = {"RC15": 11, "RC18": 4, "RC19": 5, "RC17": 3, "RC21": 7}
TABULATED_D = {"RC15": 7, "RC18": 4, "RC19": 4, "RC17": 3, "RC21": 5}


def problem_names() -> list[str]:
    return list(_SPECS)


def load_problem(name: str, variant: str = "reference") -> ConstrainedProblem:
    key = name.upper()
    if key not in _SPECS:
        raise UnknownProblem(f"unknown constrained problem {name!r}; choose from {', '.join(_SPECS)}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    title, model, bounds, n_g, f_star, mask = _SPECS[key]
    b = np.asarray(bounds, dtype=float)
    return ConstrainedProblem(
        name=key,
        title=title,
        space=SearchSpace(b[:, 0], b[:, 1]),
        model=model,
        n_inequalities=n_g,
        f_star=f_star,
        integrality=mask,
        variant=variant,
    )


@dataclass(frozen=True)
class RunMetrics:
    fr: float
    mv: float
    sr: float


def run_metrics(records: Sequence, problem: ConstrainedProblem, max_fes: Optional[int] = None) -> RunMetrics:
    """Feasibility rate, mean violation of final bests and success rate over runs (percentages).

    ``max_fes``, when given, discards nothing but checks that no run overspent.
    """
    if not records:
        raise ValueError("need at least one run record")
    if max_fes is not None and any(r.fes > max_fes for r in records):
        raise ValueError("a run used more evaluations than allowed")
    n = len(records)
    fr = 100.0 * sum(bool(r.feasible_found) for r in records) / n
    mv = float(np.mean([r.best_violation for r in records]))
    ok = sum(r.best_violation == 0.0 and r.best_value - problem.f_star <= SUCCESS_TOL for r in records)
    return RunMetrics(fr=fr, mv=mv, sr=100.0 * ok / n)
