"""Friedman rank test and one-sided Wilcoxon signed-rank test over result matrices.

Both tests rank with average ranks for ties (``scipy.stats.rankdata``) and
take their critical values as inputs rather than deriving them from a
distribution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

FRIEDMAN_CRITICAL_DF24 = 36.4150

# one-sided, alpha = 0.05, indexed by the number of non-zero differences
_CRITICAL = {5: 1, 7: 4, 8: 6, 9: 8, 10: 11}


class DegenerateMatrix(ValueError):
    """Too few treatments or blocks to rank."""


class InsufficientData(ValueError):
    """Too few non-zero paired differences for a tabulated critical value."""


class MissingCritical(KeyError):
    """No critical value is tabulated for this sample size."""


class UnknownFixture(KeyError):
    pass


@dataclass(frozen=True)
class ResultMatrix:
    """``values[block, treatment]``; lower is better."""

    treatments: tuple
    blocks: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape != (len(self.blocks), len(self.treatments)):
            raise DegenerateMatrix(
                f"values must be {len(self.blocks)}x{len(self.treatments)}, got shape {v.shape}"
            )
        if np.isnan(v).any():
            raise DegenerateMatrix("result matrix has missing entries")
        v.flags.writeable = False
        object.__setattr__(self, "treatments", tuple(self.treatments))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def k(self) -> int:
        return len(self.treatments)


@dataclass(frozen=True)
class FriedmanOutcome:
    rank_sums: np.ndarray
    fr: float
    critical: float
    reject_h0: bool
    best_treatment: object


def friedman(m: ResultMatrix, critical: float = FRIEDMAN_CRITICAL_DF24) -> FriedmanOutcome:
    n, k = m.n, m.k
    if n < 2 or k < 2:
        raise DegenerateMatrix(f"need at least 2 blocks and 2 treatments, got {n}x{k}")
    ranks = rankdata(m.values, axis=1)
    T = ranks.sum(axis=0)
    fr = 12.0 / (n * k * (k + 1)) * float(np.sum(T**2)) - 3.0 * n * (k + 1)
    best = int(np.argmin(T))  # argmin keeps the first index on ties
    return FriedmanOutcome(T, fr, float(critical), bool(fr > critical), m.treatments[best])


@dataclass(frozen=True)
class WilcoxonOutcome:
    k_nonzero: int
    w_plus: float
    w_minus: float
    w_min: float
    critical: float
    significant: bool
    direction: str  # "a", "b" or "tie": the side whose values are better (lower)

    def verdict(self, name_a: str, name_b: str) -> str:
        """Sentence in the form ``"<winner> outperforms <loser>"``.

        The winner is the side with fewer losses (its values are lower more
        often). When the test is not significant the opposite side is
        credited instead, the convention the reference verdict tables follow.
        """
        if self.direction == "tie":
            return f"no difference between {name_a} and {name_b}"
        a_wins = self.direction == "a"
        if not self.significant:
            a_wins = not a_wins
        return f"{name_a} outperforms {name_b}" if a_wins else f"{name_b} outperforms {name_a}"


def published_critical_table() -> dict[int, float]:
    """Tabulated one-sided critical values keyed by the number of non-zero differences."""
    return dict(_CRITICAL)


def critical_value(table: Mapping[int, float], k: int) -> float:
    try:
        return table[k]
    except KeyError:
        raise MissingCritical(f"no critical value tabulated for k={k}") from None


def wilcoxon_one_sided(a: Sequence[float], b: Sequence[float], critical_table: Mapping[int, float] | None = None) -> WilcoxonOutcome:
    """Signed-rank test on paired results ``a`` and ``b`` (lower is better).

    ``W+`` collects the ranks of positive differences ``a - b`` (``a`` worse),
    ``W-`` those of negative ones. The result is significant when
    ``min(W+, W-)`` is strictly below the critical value for the number of
    non-zero differences.
    """
    table = published_critical_table() if critical_table is None else critical_table
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-D and of equal length")
    d = a - b
    d = d[d != 0.0]
    k = d.size
    if not table or k < min(table):
        raise InsufficientData(f"only {k} non-zero differences")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    crit = float(critical_value(table, k))
    w_min = min(w_plus, w_minus)
    direction = "a" if w_minus > w_plus else ("b" if w_plus > w_minus else "tie")
    return WilcoxonOutcome(k, w_plus, w_minus, w_min, crit, bool(w_min < crit), direction)


# ---------------------------------------------------------------------------
# shipped fixtures
# ---------------------------------------------------------------------------


def fixture_names() -> list[str]:
    files = resources.files("archerfish.data").iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".csv"))


def load_fixture(name: str) -> list[dict]:
    path = resources.files("archerfish.data") / f"{name}.csv"
    if not path.is_file():
        raise UnknownFixture(f"unknown fixture {name!r}; choose from {', '.join(fixture_names())}")
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def configuration_matrix(name: str) -> ResultMatrix:
    """Treatments are ``"theta,omega"`` configurations, blocks the test functions."""
    rows = load_fixture(name)
    funcs = [c for c in rows[0] if c not in ("theta", "omega")]
    labels = [f"{r['theta']},{r['omega']}" for r in rows]
    values = np.array([[float(r[f]) for r in rows] for f in funcs])
    return ResultMatrix(labels, funcs, values)


def means_table(name: str) -> tuple[list[str], dict[str, np.ndarray]]:
    rows = load_fixture(name)
    algos = [c for c in rows[0] if c != "function"]
    return [r["function"] for r in rows], {a: np.array([float(r[a]) for r in rows]) for a in algos}
