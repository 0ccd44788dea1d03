from .unconstrained import (
    ShiftRotate,
    UnconstrainedProblem,
    builtin_suite,
    make_problem,
    random_rotation,
    transform,
)

__all__ = [
    "ShiftRotate",
    "UnconstrainedProblem",
    "builtin_suite",
    "make_problem",
    "random_rotation",
    "transform",
]

from .constrained import (
    ConstrainedProblem,
    ConstraintReport,
    UnknownProblem,
    feasibility_compare,
    load_problem,
    mean_violation,
    problem_names,
    round_integrality,
    run_metrics,
)

__all__ += [
    "ConstrainedProblem",
    "ConstraintReport",
    "UnknownProblem",
    "feasibility_compare",
    "load_problem",
    "mean_violation",
    "problem_names",
    "round_integrality",
    "run_metrics",
]
