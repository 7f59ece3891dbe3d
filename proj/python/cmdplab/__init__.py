"""Tabular constrained-MDP laboratory.

Thin Python surface over the C++ core: environment generation, exact
evaluation, CMDP oracles, and the optimistic regularized primal-dual learner.
"""

from ._core import (
    CmdpSolution,
    DegenerateEntropyError,
    GeneratedEnv,
    InfeasibleError,
    OccupancyMeasure,
    Policy,
    SaddlePoint,
    TabularCmdp,
    ValueTables,
    brute_force_constrained_opt,
    compute_gaps,
    entropy_value_identity_check,
    eval_policy_exact,
    generate_random_cmdp,
    llnp,
    load_cmdp,
    occupancy,
    regularized_lagrangian,
    regularized_saddle,
    run_experiment_config,
    run_variant,
    save_cmdp,
    slater_gap,
    solve_cmdp_lp,
    unconstrained_max,
    value_from_occupancy,
)

__all__ = [
    "CmdpSolution",
    "DegenerateEntropyError",
    "GeneratedEnv",
    "InfeasibleError",
    "OccupancyMeasure",
    "Policy",
    "SaddlePoint",
    "TabularCmdp",
    "ValueTables",
    "brute_force_constrained_opt",
    "compute_gaps",
    "entropy_value_identity_check",
    "eval_policy_exact",
    "generate_random_cmdp",
    "llnp",
    "load_cmdp",
    "occupancy",
    "regularized_lagrangian",
    "regularized_saddle",
    "run_experiment_config",
    "run_variant",
    "save_cmdp",
    "slater_gap",
    "solve_cmdp_lp",
    "unconstrained_max",
    "value_from_occupancy",
]

__version__ = "0.1.0"
