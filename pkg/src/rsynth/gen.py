"""Deterministic random instance generation.

The same flags and seed always produce byte-identical instance text: the
file is a pure function of the pseudo-random stream.
"""
from __future__ import annotations

import random

from .formulas import Atom, Formula, Not, big_and, big_or
from .game import (
    BUCHI,
    COBUCHI,
    MULLER,
    REACH,
    SAFE,
    Buchi,
    CoBuchi,
    GameError,
    GameStructure,
    Muller,
    ObjectiveProfile,
    Reach,
    Safe,
)
from .fileformat import format_instance

GEN_CLASSES = (REACH, SAFE, BUCHI, COBUCHI, MULLER)

_ACTION_NAMES = "abcdefghij"


def _random_formula(rng: random.Random, states: tuple[str, ...]) -> Formula:
    literals = []
    for s in states:
        pick = rng.random()
        if pick < 0.35:
            literals.append(Atom(s))
        elif pick < 0.7:
            literals.append(Not(Atom(s)))
    if not literals:
        literals.append(Atom(rng.choice(states)))
    return big_or(literals) if rng.random() < 0.5 else big_and(literals)


def generate_instance(
    states: int,
    agents: int,
    actions: int,
    cls: str,
    seed: int,
    density: float = 0.4,
) -> tuple[GameStructure, ObjectiveProfile]:
    """Random complete game with the given shape.  ``agents`` counts all
    agents including Agent 0; ``density`` steers how many states land in
    target/safe sets."""
    if states < 1 or agents < 1 or actions < 1:
        raise GameError("infeasible shape: need at least one state, agent, action")
    if not 0.0 <= density <= 1.0:
        raise GameError("density must lie in [0, 1]")
    if cls not in GEN_CLASSES:
        raise GameError(f"class must be one of {'|'.join(GEN_CLASSES)}")
    rng = random.Random(seed)
    state_names = tuple(f"s{i}" for i in range(states))
    action_sets = tuple(tuple(_ACTION_NAMES[:actions]) for _ in range(agents))
    g_tmp = GameStructure(state_names, state_names[0], action_sets, {})
    table = {
        (s, p): rng.choice(state_names) for s in state_names for p in g_tmp.profiles()
    }
    g = GameStructure(state_names, state_names[0], action_sets, table)

    def subset() -> frozenset[str]:
        return frozenset(s for s in state_names if rng.random() < density)

    objectives = []
    for _ in range(agents):
        if cls == REACH:
            objectives.append(Reach(subset()))
        elif cls == SAFE:
            # bias safe sets large, otherwise almost everything is lost
            objectives.append(
                Safe(frozenset(s for s in state_names if rng.random() < 1 - density / 2))
            )
        elif cls == BUCHI:
            objectives.append(Buchi(subset()))
        elif cls == COBUCHI:
            objectives.append(CoBuchi(subset()))
        else:
            objectives.append(Muller(_random_formula(rng, state_names)))
    return g, ObjectiveProfile(tuple(objectives))


def generate_instance_text(
    states: int, agents: int, actions: int, cls: str, seed: int, density: float = 0.4
) -> str:
    g, objs = generate_instance(states, agents, actions, cls, seed, density)
    return format_instance(g, objs)
