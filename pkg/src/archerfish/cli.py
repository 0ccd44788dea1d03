"""Command line entry point: ``archerfish run | stats | replay | list``.

Exit codes: 0 success, 1 configuration error, 2 a run or computation failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path

import numpy as np

from . import stats as st
from .experiment import ConfigError, ExperimentConfig, ResultsStore, _angle, run_experiment
from .problems import constrained as cons
from .problems import unconstrained as unc

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
VERDICT_FIELDS = ("comparison", "k", "w_plus", "w_minus", "w_min", "critical", "verdict")

# best-known configurations quoted alongside each configuration matrix
EXPECTED_FRIEDMAN = {
    "std_d5": ("pi/12,0.01", 66.7419, 57.5),
    "std_d10": ("5pi/12,0.01", 104.2532, 68.0),
    "std_d15": ("pi/3,0.01", 125.8588, 58.0),
    "std_d20": ("5pi/12,0.01", 144.8797, 52.0),
}


def _fmt(x: float) -> str:
    return f"{x:g}" if float(x) != int(x) else str(int(x))


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="archerfish", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    r = sub.add_parser("run", help="run an experiment grid")
    r.add_argument("--config", help="INI-style experiment file; flags override it")
    r.add_argument("--problem", action="append", help="problem name (repeatable or comma separated)")
    r.add_argument("--dim", action="append", help="dimension (repeatable or comma separated)")
    r.add_argument("--reps", type=int)
    r.add_argument("--budget", type=int, help="function evaluations per run")
    r.add_argument("--theta", action="append", help="swap angle, e.g. pi/12 (repeatable)")
    r.add_argument("--omega", action="append", help="attractiveness rate (repeatable)")
    r.add_argument("--seed", type=int, help="base seed")
    r.add_argument("--out", help="output directory")
    r.add_argument("--paper-budgets", action="store_true", help="use the full-size reference budgets")
    r.add_argument("--workers", type=int)
    r.add_argument("--variant", choices=cons.VARIANTS)

    s = sub.add_parser("stats", help="Friedman or Wilcoxon over results or a fixture")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--results", help="results CSV or run directory")
    src.add_argument("--fixture", help="shipped fixture name (see `list`)")
    s.add_argument("--against", help="competitor column for a Wilcoxon test on a means fixture")
    s.add_argument("--critical", type=float, default=st.FRIEDMAN_CRITICAL_DF24)
    s.add_argument("--out", help="write the verdict CSV here")

    rp = sub.add_parser("replay", help="recompute the decisions recorded in the shipped fixtures")
    rp.add_argument("fixtures", nargs="*", help="fixture names; default all std_* and wilcoxon_*")
    rp.add_argument("--out", help="directory for verdict CSVs")

    sub.add_parser("list", help="list problems and fixtures")
    return p


def _split_all(values) -> list[str]:
    out = []
    for v in values or []:
        out += [x.strip() for x in v.split(",") if x.strip()]
    return out


def _config_from_args(a) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(a.config) if a.config else ExperimentConfig()
    if a.problem:
        cfg.problems = _split_all(a.problem)
    try:
        if a.dim:
            cfg.dims = [int(v) for v in _split_all(a.dim)]
        if a.theta:
            cfg.thetas = [_angle(v) for v in _split_all(a.theta)]
        if a.omega:
            cfg.omegas = [float(v) for v in _split_all(a.omega)]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for name in ("reps", "budget", "out", "workers", "variant"):
        if getattr(a, name) is not None:
            setattr(cfg, name, getattr(a, name))
    if a.seed is not None:
        cfg.base_seed = a.seed
    if a.paper_budgets:
        cfg.paper_budgets = True
    return cfg.validate()


def cmd_run(a, out) -> int:
    cfg = _config_from_args(a)
    t0 = time.perf_counter()
    store = run_experiment(cfg)
    for s in store.summaries():
        print(
            f"{s['problem']:>10} d={s['dim']:<3} theta={s['theta']:.4f} omega={_fmt(s['omega'])}: "
            f"best={s['best']:.4e} median={s['median']:.4e} FR={s['FR']:.0f} SR={s['SR']:.0f}",
            file=out,
        )
    print(f"{len(store.rows)} runs in {time.perf_counter() - t0:.1f}s"
          + (f", written to {cfg.out}" if cfg.out else ""), file=out)
    for cell, msg in store.failures:
        print(f"FAILED {cell.problem} d={cell.dim} config={cell.config_index} rep={cell.rep}: {msg}", file=sys.stderr)
    return EXIT_RUNTIME if store.failures else EXIT_OK


def _verdict_rows(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(VERDICT_FIELDS)
    w.writerows(rows)
    return buf.getvalue()


def _wilcoxon_row(name_a, a, name_b, b):
    o = st.wilcoxon_one_sided(a, b)
    return (f"{name_a} vs. {name_b}", o.k_nonzero, _fmt(o.w_plus), _fmt(o.w_minus),
            _fmt(o.w_min), _fmt(o.critical), o.verdict(name_a, name_b))


def results_matrix(store: ResultsStore) -> st.ResultMatrix:
    """Mean error per (problem, dim) block and (theta, omega) treatment."""
    groups = store.groups()
    blocks = sorted({(p, d) for p, d, _, _ in groups})
    treatments = sorted({(t, w) for _, _, t, w in groups})
    values = np.full((len(blocks), len(treatments)), np.nan)
    for (p, d, t, w), rows in groups.items():
        values[blocks.index((p, d)), treatments.index((t, w))] = np.mean([r.best_error for r in rows])
    return st.ResultMatrix([f"{t:.6g},{w:g}" for t, w in treatments], [f"{p}/d{d}" for p, d in blocks], values)


def cmd_stats(a, out) -> int:
    if a.results:
        m = results_matrix(ResultsStore.read(a.results))
    elif a.fixture.startswith("means_"):
        if not a.against:
            raise ConfigError("a means fixture needs --against COMPETITOR")
        _, cols = st.means_table(a.fixture)
        if a.against not in cols:
            raise ConfigError(f"no column {a.against!r}; choose from {', '.join(cols)}")
        row = _wilcoxon_row("AHO", cols["AHO"], a.against, cols[a.against])
        text = _verdict_rows([row])
        print(text, end="", file=out)
        if a.out:
            Path(a.out).write_text(text)
        return EXIT_OK
    else:
        m = st.configuration_matrix(a.fixture)
    o = st.friedman(m, a.critical)
    print(f"F_r = {o.fr:.4f} (critical {o.critical:.4f}) -> "
          f"{'reject' if o.reject_h0 else 'retain'} H0; best {o.best_treatment} "
          f"with rank sum {_fmt(float(o.rank_sums.min()))}", file=out)
    if a.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("treatment", "rank_sum"))
        w.writerows((t, _fmt(float(r))) for t, r in zip(m.treatments, o.rank_sums))
        Path(a.out).write_text(buf.getvalue())
    return EXIT_OK


def replay_friedman(name: str) -> tuple[bool, str]:
    o = st.friedman(st.configuration_matrix(name))
    ok = o.reject_h0
    line = f"{name}: F_r={o.fr:.4f} reject={o.reject_h0} best={o.best_treatment}"
    if name in EXPECTED_FRIEDMAN:
        best, fr, rs = EXPECTED_FRIEDMAN[name]
        ok = ok and o.best_treatment == best and abs(o.fr - fr) <= 0.05 * fr
        line += f" (recorded F_r={fr} best={best} rank sum {_fmt(rs)})"
    return ok, line


def replay_wilcoxon(name: str):
    """Recompute every recorded comparison; returns (matches, rows, report lines)."""
    dim = name.split("_d")[-1]
    _, cols = st.means_table(f"means_d{dim}")
    matches, rows, lines = 0, [], []
    for rec in st.load_fixture(name):
        comp = rec["comparison"]
        a_name, b_name = [s.strip() for s in comp.split("vs.")]
        recorded = (rec["k"], rec["w_plus"], rec["w_minus"], rec["verdict"])
        try:
            row = _wilcoxon_row(a_name, cols[a_name], b_name, cols[b_name])
            got = (str(row[1]), row[2], row[3], row[6])
        except (st.InsufficientData, st.MissingCritical) as exc:
            row = (comp, "", "", "", "", "", f"undecided: {exc}")
            got = ("", "", "", row[6])
        rows.append(row)
        same = got == recorded
        matches += same
        lines.append(f"  {'ok  ' if same else 'DIFF'} {comp}: computed k={got[0]} W+={got[1]} W-={got[2]} "
                     f"'{got[3]}' | recorded k={recorded[0]} W+={recorded[1]} W-={recorded[2]} '{recorded[3]}'")
    return matches, rows, lines


def cmd_replay(a, out) -> int:
    names = a.fixtures or [n for n in st.fixture_names() if n.startswith(("std_", "wilcoxon_"))]
    all_ok = True
    for name in names:
        if name.startswith("std_"):
            ok, line = replay_friedman(name)
            print(("ok   " if ok else "DIFF ") + line, file=out)
        elif name.startswith("wilcoxon_"):
            matches, rows, lines = replay_wilcoxon(name)
            ok = matches == len(rows)
            print(f"{'ok   ' if ok else 'DIFF '}{name}: {matches}/{len(rows)} rows match", file=out)
            for line in lines:
                print(line, file=out)
            if a.out:
                Path(a.out).mkdir(parents=True, exist_ok=True)
                (Path(a.out) / f"verdicts_{name}.csv").write_text(_verdict_rows(rows))
        else:
            st.load_fixture(name)  # raises UnknownFixture for bad names
            raise ConfigError(f"fixture {name!r} holds no recorded decisions to replay")
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_RUNTIME


def cmd_list(a, out) -> int:
    print("unconstrained problems: " + ", ".join(unc.names()), file=out)
    for n in cons.problem_names():
        p = cons.load_problem(n)
        print(f"{n}: {p.title} (D={p.dims}, g={p.n_inequalities}, f*={p.f_star:.10E})", file=out)
    print("fixtures: " + ", ".join(st.fixture_names()), file=out)
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        a = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    handlers = {"run": cmd_run, "stats": cmd_stats, "replay": cmd_replay, "list": cmd_list}
    try:
        return handlers[a.verb](a, out)
    except (ConfigError, st.UnknownFixture, cons.UnknownProblem, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
