import itertools

import pytest

from rsynth.game import (
    Buchi,
    CoBuchi,
    GameStructure,
    Muller,
    ObjectiveProfile,
    Reach,
    Safe,
)


def make_game(states, initial, action_sets, edges, default=None):
    """Build a total table from (src, pattern, dst) rules with '*' entries;
    later rules do not override earlier ones."""
    table = {}
    for src, pattern, dst in edges:
        pools = [
            action_sets[i] if pattern[i] == "*" else (pattern[i],)
            for i in range(len(action_sets))
        ]
        for profile in itertools.product(*pools):
            table.setdefault((src, profile), dst)
    if default is not None:
        for s in states:
            for profile in itertools.product(*action_sets):
                table.setdefault((s, profile), default)
    return GameStructure(tuple(states), initial, tuple(tuple(a) for a in action_sets), table)


@pytest.fixture(scope="session")
def fig1():
    """Three-agent reachability game: Agent 0 picks l/r, agents 1 and 2
    pick a/b; T01 and T2 are absorbing targets."""
    return make_game(
        ["s0", "s1", "s2", "T01", "T2"],
        "s0",
        [("l", "r"), ("a", "b"), ("a", "b")],
        [
            ("s0", ("l", "*", "*"), "s2"),
            ("s0", ("r", "*", "*"), "s1"),
            ("s1", ("l", "*", "*"), "s1"),
            ("s1", ("r", "a", "*"), "T01"),
            ("s1", ("r", "b", "*"), "s2"),
            ("s2", ("l", "*", "a"), "s0"),
            ("s2", ("l", "*", "b"), "T2"),
            ("s2", ("r", "*", "*"), "s2"),
            ("T01", ("*", "*", "*"), "T01"),
            ("T2", ("*", "*", "*"), "T2"),
        ],
    )


@pytest.fixture(scope="session")
def fig1_reach():
    return ObjectiveProfile(
        (
            Reach(frozenset({"T01"})),
            Reach(frozenset({"T01"})),
            Reach(frozenset({"T2"})),
        )
    )


def objective_profile(cls, g, sets_or_formulas):
    mk = {"reach": Reach, "safe": Safe, "buchi": Buchi, "cobuchi": CoBuchi}
    if cls == "muller":
        return ObjectiveProfile(tuple(Muller(f) for f in sets_or_formulas))
    return ObjectiveProfile(tuple(mk[cls](frozenset(x)) for x in sets_or_formulas))
