"""Rational-synthesis toolkit for concurrent games.

Decides whether Agent 0 has a strategy whose every stable outcome (no
environment agent can profitably deviate alone) satisfies Agent 0's
objective, for reachability, safety, Buchi, co-Buchi, and Muller
conditions, and extracts a certified witness strategy.
"""

from .game import (
    Buchi,
    CoBuchi,
    Defect,
    GameError,
    GameStructure,
    History,
    LassoPlay,
    Muller,
    Objective,
    ObjectiveProfile,
    Parity,
    Reach,
    Safe,
    eval_objective,
    payoff,
    successor,
    validate_game,
)
from .arena import (
    ArenaLasso,
    ArenaState,
    arena_initial,
    arena_step,
    eval_arena_objective,
    legal_moves,
)
from .reductions import AugState, ParityArena, build_parity_arena
from .solvers import (
    InternalInvariantError,
    WinRegion,
    attractor,
    solve_finite_duration,
    zielonka_solve,
)
from .synthesis import (
    CheckReport,
    Counterexample,
    EveStrategy,
    Sigma0,
    SolverDisagreement,
    check_solution,
    derive_sigma0,
    deviator,
    lift_history,
    ncrsp_solve,
    project_history,
    root,
    simplify_witness,
)
from .oracle import OracleTooLarge, brute_force_ncrsp, parity_winners_by_enumeration

__all__ = [
    "ArenaLasso",
    "ArenaState",
    "AugState",
    "Buchi",
    "CheckReport",
    "CoBuchi",
    "Counterexample",
    "Defect",
    "EveStrategy",
    "GameError",
    "GameStructure",
    "History",
    "InternalInvariantError",
    "LassoPlay",
    "Muller",
    "Objective",
    "ObjectiveProfile",
    "OracleTooLarge",
    "Parity",
    "ParityArena",
    "Reach",
    "Safe",
    "Sigma0",
    "SolverDisagreement",
    "WinRegion",
    "arena_initial",
    "arena_step",
    "attractor",
    "brute_force_ncrsp",
    "build_parity_arena",
    "check_solution",
    "derive_sigma0",
    "deviator",
    "eval_arena_objective",
    "eval_objective",
    "legal_moves",
    "lift_history",
    "ncrsp_solve",
    "parity_winners_by_enumeration",
    "payoff",
    "project_history",
    "root",
    "simplify_witness",
    "solve_finite_duration",
    "successor",
    "validate_game",
    "zielonka_solve",
]
