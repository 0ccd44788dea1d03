"""Batch experiments: configuration, seeded cells, persistence and summaries.

A cell is one ``(problem, dimension, configuration, repetition)`` run. Its
seed depends only on those indices, so results never depend on how cells are
scheduled across worker processes.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .aho import AhoParams, RunRecord, aho_run, default_population
from .problems import constrained as cons
from .problems import unconstrained as unc

THETAS = (math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3, 5 * math.pi / 12)
OMEGAS = (0.01, 0.05, 0.25, 1.25, 6.25)

FULL_BUDGETS = {5: 50_000, 10: 1_000_000, 15: 3_000_000, 20: 10_000_000}
CONSTRAINED_BUDGET = 200_000
# desk-scale defaults: a few thousand evaluations per dimension
DESK_UNCONSTRAINED_PER_DIM = 2_000
DESK_CONSTRAINED = 20_000

RESULT_FIELDS = ("problem", "dim", "theta", "omega", "seed", "fes", "best_error", "feasible", "mv")
SUMMARY_FIELDS = ("problem", "dim", "theta", "omega", "best", "median", "mean", "worst", "std", "FR", "MV", "SR")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _angle(text: str) -> float:
    """Parse ``0.26``, ``pi/12`` or ``5pi/12``."""
    t = text.strip().replace(" ", "").lower()
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("*", "").replace("pi", "")
    value = (float(coef) if coef else 1.0) * math.pi
    return value / float(den) if den else value


def _split(text: str) -> list[str]:
    return [p for p in (s.strip() for s in text.replace("\n", ",").split(",")) if p]


@dataclass
class ExperimentConfig:
    problems: list[str] = field(default_factory=lambda: ["sphere"])
    dims: list[int] = field(default_factory=lambda: [10])
    reps: Optional[int] = None
    budget: Optional[int] = None
    paper_budgets: bool = False
    thetas: list[float] = field(default_factory=lambda: [math.pi / 12])
    omegas: list[float] = field(default_factory=lambda: [0.01])
    base_seed: int = 0
    out: Optional[str] = None
    population: Optional[int] = None
    variant: str = "reference"
    workers: int = 1
    refraction: float = AhoParams.refraction
    stagnation_unit: str = AhoParams.stagnation_unit

    def validate(self) -> "ExperimentConfig":
        if not self.problems:
            raise ConfigError("no problems selected")
        known = set(unc.names()) | set(cons.problem_names())
        for p in self.problems:
            if p not in known and p.upper() not in known:
                raise ConfigError(f"unknown problem {p!r}")
        if any(int(d) < 1 for d in self.dims) or not self.dims:
            raise ConfigError("dimensions must be positive")
        if self.reps is not None and int(self.reps) < 1:
            raise ConfigError("reps must be at least 1")
        if self.budget is not None and int(self.budget) < 1:
            raise ConfigError("budget must be positive")
        if not self.thetas or not self.omegas:
            raise ConfigError("the parameter grid is empty")
        if self.variant not in cons.VARIANTS:
            raise ConfigError(f"variant must be one of {cons.VARIANTS}")
        if int(self.workers) < 1:
            raise ConfigError("workers must be at least 1")
        try:
            for t in self.thetas:
                for w in self.omegas:
                    AhoParams(swap_angle=t, attractiveness=w, refraction=self.refraction,
                              stagnation_unit=self.stagnation_unit).validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    @property
    def grid(self) -> list[tuple[float, float]]:
        return [(t, w) for t in self.thetas for w in self.omegas]

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Read an INI-style file; see the README for the accepted keys."""
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg = cls()
        try:
            if parser.has_section("experiment"):
                s = parser["experiment"]
                if "problems" in s:
                    cfg.problems = _split(s["problems"])
                if "dims" in s:
                    cfg.dims = [int(v) for v in _split(s["dims"])]
                if "reps" in s:
                    cfg.reps = s.getint("reps")
                if "budget" in s:
                    cfg.budget = s.getint("budget")
                cfg.paper_budgets = s.getboolean("paper_budgets", cfg.paper_budgets)
                cfg.base_seed = s.getint("seed", cfg.base_seed)
                cfg.out = s.get("out", cfg.out)
                cfg.workers = s.getint("workers", cfg.workers)
                cfg.variant = s.get("variant", cfg.variant)
            if parser.has_section("grid"):
                g = parser["grid"]
                if "theta" in g:
                    cfg.thetas = [_angle(v) for v in _split(g["theta"])]
                if "omega" in g:
                    cfg.omegas = [float(v) for v in _split(g["omega"])]
            if parser.has_section("optimizer"):
                o = parser["optimizer"]
                if "population" in o:
                    cfg.population = o.getint("population")
                cfg.refraction = o.getfloat("refraction", cfg.refraction)
                cfg.stagnation_unit = o.get("stagnation_unit", cfg.stagnation_unit)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return cfg


def resolve_problem(name: str, dim: int, variant: str = "reference"):
    if name.upper() in cons.problem_names():
        return cons.load_problem(name, variant)
    return unc.make_problem(name, dim)


def is_constrained(name: str) -> bool:
    return name.upper() in cons.problem_names()


def budget_for(cfg: ExperimentConfig, name: str, dim: int) -> int:
    if cfg.budget is not None:
        return int(cfg.budget)
    if is_constrained(name):
        return CONSTRAINED_BUDGET if cfg.paper_budgets else DESK_CONSTRAINED
    if cfg.paper_budgets:
        if dim not in FULL_BUDGETS:
            raise ConfigError(f"no reference budget for d={dim}; pass --budget")
        return FULL_BUDGETS[dim]
    return DESK_UNCONSTRAINED_PER_DIM * dim


def reps_for(cfg: ExperimentConfig, name: str) -> int:
    if cfg.reps is not None:
        return int(cfg.reps)
    return 25 if is_constrained(name) else 30


def cell_seed(base_seed: int, problem: str, config_index: int, rep: int) -> int:
    """``base_seed XOR h`` with ``h`` a stable 64-bit digest of the cell indices."""
    key = f"{problem}|{config_index}|{rep}".encode()
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return (int(base_seed) ^ h) & 0xFFFF_FFFF_FFFF_FFFF


@dataclass(frozen=True)
class Cell:
    problem: str
    dim: int
    config_index: int
    theta: float
    omega: float
    rep: int
    seed: int
    budget: int
    population: int
    variant: str
    refraction: float
    stagnation_unit: str


@dataclass
class ResultRow:
    problem: str
    dim: int
    theta: float
    omega: float
    seed: int
    fes: int
    best_error: float
    feasible: bool
    mv: float

    def as_strings(self) -> list[str]:
        return [
            self.problem, str(self.dim), repr(float(self.theta)), repr(float(self.omega)),
            str(self.seed), str(self.fes), repr(float(self.best_error)),
            "1" if self.feasible else "0", repr(float(self.mv)),
        ]

    @classmethod
    def from_strings(cls, rec: dict) -> "ResultRow":
        return cls(
            rec["problem"], int(rec["dim"]), float(rec["theta"]), float(rec["omega"]),
            int(rec["seed"]), int(rec["fes"]), float(rec["best_error"]),
            rec["feasible"] == "1", float(rec["mv"]),
        )


def cells(cfg: ExperimentConfig) -> list[Cell]:
    out = []
    for name in cfg.problems:
        dims = [None] if is_constrained(name) else cfg.dims
        for dim in dims:
            prob = resolve_problem(name, dim or 1, cfg.variant)
            d = prob.dims
            pop = cfg.population or default_population(d)
            budget = budget_for(cfg, name, d)
            for ci, (theta, omega) in enumerate(cfg.grid):
                for rep in range(reps_for(cfg, name)):
                    seed = cell_seed(cfg.base_seed, f"{prob.name}/{d}", ci, rep)
                    out.append(Cell(prob.name, d, ci, theta, omega, rep, seed, budget, pop,
                                    cfg.variant, cfg.refraction, cfg.stagnation_unit))
    return out


def run_cell(cell: Cell) -> tuple[Cell, Optional[RunRecord], Optional[str]]:
    """Execute one cell; errors are returned, not raised, so a batch never aborts."""
    try:
        prob = resolve_problem(cell.problem, cell.dim, cell.variant)
        params = AhoParams(
            population=min(cell.population, cell.budget),
            swap_angle=cell.theta,
            attractiveness=cell.omega,
            budget=cell.budget,
            seed=cell.seed,
            refraction=cell.refraction,
            stagnation_unit=cell.stagnation_unit,
        )
        return cell, aho_run(prob, params, name=prob.name), None
    except Exception as exc:  # noqa: BLE001 - reported per cell
        return cell, None, f"{type(exc).__name__}: {exc}"


def summarize(errors: Sequence[float]) -> dict[str, float]:
    """Order statistics and moments of final errors (population standard deviation)."""
    v = np.asarray(errors, dtype=float)
    if v.size == 0:
        raise ValueError("nothing to summarize")
    return {
        "best": float(v.min()),
        "median": float(np.median(v)),
        "mean": float(v.mean()),
        "worst": float(v.max()),
        "std": float(v.std()),
    }


@dataclass
class ResultsStore:
    rows: list[ResultRow] = field(default_factory=list)
    traces: dict = field(default_factory=dict)
    failures: list[tuple[Cell, str]] = field(default_factory=list)

    def append(self, row: ResultRow, trace=None, key=None) -> None:
        self.rows.append(row)
        if trace is not None:
            self.traces[key] = trace

    def groups(self) -> dict[tuple, list[ResultRow]]:
        out: dict[tuple, list[ResultRow]] = {}
        for r in self.rows:
            out.setdefault((r.problem, r.dim, r.theta, r.omega), []).append(r)
        return out

    def summaries(self) -> list[dict]:
        rows = []
        for (problem, dim, theta, omega), group in self.groups().items():
            s = summarize([r.best_error for r in group])
            n = len(group)
            s["FR"] = 100.0 * sum(r.feasible for r in group) / n
            s["MV"] = float(np.mean([r.mv for r in group]))
            s["SR"] = 100.0 * sum(r.feasible and r.best_error <= cons.SUCCESS_TOL for r in group) / n
            rows.append({"problem": problem, "dim": dim, "theta": theta, "omega": omega, **s})
        return rows

    # -- serialization -----------------------------------------------------

    def results_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RESULT_FIELDS)
        for r in self.rows:
            w.writerow(r.as_strings())
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for s in self.summaries():
            w.writerow([s["problem"], s["dim"]] + [repr(float(s[k])) for k in SUMMARY_FIELDS[2:]])
        return buf.getvalue()

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        (out / "convergence").mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(self.results_csv())
        (out / "summary.csv").write_text(self.summary_csv())
        for key, trace in self.traces.items():
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(("fe", "best_value"))
            for fe, value in trace.samples:
                w.writerow((fe, repr(float(value))))
            (out / "convergence" / f"{key}.csv").write_text(buf.getvalue())
        if self.failures:
            lines = [f"{c.problem},{c.dim},{c.config_index},{c.rep},{msg}" for c, msg in self.failures]
            (out / "failures.txt").write_text("\n".join(lines) + "\n")
        return out

    @classmethod
    def read(cls, path) -> "ResultsStore":
        """Load a results CSV (or a directory holding ``results.csv``)."""
        p = Path(path)
        if p.is_dir():
            p = p / "results.csv"
        with open(p, newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != RESULT_FIELDS:
                raise ValueError(f"{p} is not a results CSV")
            return cls([ResultRow.from_strings(rec) for rec in reader])


def _trace_key(c: Cell) -> str:
    return f"{c.problem}_d{c.dim}_c{c.config_index}_r{c.rep}"


def run_experiment(cfg: ExperimentConfig, progress=None) -> ResultsStore:
    """Run every cell and collect rows in cell order, whatever the worker count."""
    cfg.validate()
    todo = cells(cfg)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, os.cpu_count() or 1)) as pool:
            outcomes: Iterable = pool.map(run_cell, todo, chunksize=1)
            outcomes = list(outcomes)
    else:
        outcomes = map(run_cell, todo)
    store = ResultsStore()
    for cell, rec, err in outcomes:
        if progress is not None:
            progress(cell, err)
        if rec is None:
            store.failures.append((cell, err))
            continue
        prob = resolve_problem(cell.problem, cell.dim, cell.variant)
        row = ResultRow(
            problem=cell.problem, dim=cell.dim, theta=cell.theta, omega=cell.omega,
            seed=cell.seed, fes=rec.fes, best_error=rec.best_value - prob.f_star,
            feasible=rec.feasible, mv=rec.best_violation,
        )
        store.append(row, rec.trace, _trace_key(cell))
    if cfg.out:
        store.write(cfg.out)
    return store
