import random

import pytest
from hypothesis import given, settings, strategies as st

from rsynth.gen import generate_instance
from rsynth.oracle import parity_winners_by_enumeration
from rsynth.reductions import ADAM, EVE, ParityArena, build_parity_arena
from rsynth.solvers import (
    InternalInvariantError,
    attractor,
    solve_finite_duration,
    zielonka_solve,
)


def arena_of(owner, priority, succ, initial=0):
    return ParityArena.generic(list(owner), list(priority), [list(s) for s in succ], initial)


def random_arena(rng, max_nodes=8, max_priority=3):
    n = rng.randint(1, max_nodes)
    owner = [rng.randint(0, 1) for _ in range(n)]
    priority = [rng.randint(0, max_priority) for _ in range(n)]
    succ = [
        rng.sample(range(n), rng.randint(1, min(3, n))) for _ in range(n)
    ]
    return arena_of(owner, priority, succ)


def test_single_even_self_loop_is_eve_won():
    arena = arena_of([EVE], [0], [[0]])
    win = zielonka_solve(arena)
    assert win.eve_nodes == {0}


def test_single_odd_self_loop_is_adam_won():
    arena = arena_of([ADAM], [1], [[0]])
    win = zielonka_solve(arena)
    assert win.adam_nodes == {0}


@pytest.mark.parametrize("seed", range(60))
def test_zielonka_matches_strategy_enumeration(seed):
    rng = random.Random(seed)
    arena = random_arena(rng)
    win = zielonka_solve(arena)
    brute = parity_winners_by_enumeration(arena.owner, arena.priority, arena.succ)
    assert win.eve_nodes == brute


@pytest.mark.parametrize("seed", range(40))
def test_determinacy_partition(seed):
    rng = random.Random(1000 + seed)
    arena = random_arena(rng, max_nodes=12, max_priority=5)
    win = zielonka_solve(arena)
    n = len(arena)
    assert win.eve_nodes | win.adam_nodes == set(range(n))
    assert not (win.eve_nodes & win.adam_nodes)


def brute_attractor(arena, player, targets):
    """Independent fixpoint by repeated full sweeps."""
    attr = set(targets)
    changed = True
    while changed:
        changed = False
        for v in range(len(arena)):
            if v in attr:
                continue
            outs = arena.succ[v]
            can = any(w in attr for w in outs)
            must = all(w in attr for w in outs)
            if (arena.owner[v] == player and can) or (
                arena.owner[v] != player and must
            ):
                attr.add(v)
                changed = True
    return attr


def test_attractor_trivial_cases():
    arena = arena_of([EVE, ADAM, EVE], [0, 0, 0], [[1], [2], [2]])
    assert attractor(arena, EVE, set(range(3))) == {0, 1, 2}
    assert attractor(arena, EVE, set()) == set()


def test_attractor_chain():
    arena = arena_of([EVE, EVE, EVE], [0, 0, 0], [[1], [2], [2]])
    assert attractor(arena, EVE, {2}) == {0, 1, 2}


@pytest.mark.parametrize("seed", range(40))
def test_attractor_matches_independent_fixpoint(seed):
    rng = random.Random(2000 + seed)
    arena = random_arena(rng, max_nodes=10)
    targets = set(rng.sample(range(len(arena)), rng.randint(0, len(arena))))
    player = rng.randint(0, 1)
    assert attractor(arena, player, targets) == brute_attractor(arena, player, targets)


def _lassos_under(arena, choice, v, other):
    """All plays when `other` branches freely and `choice` fixes the rest;
    yields loop priority minima."""
    path = {v: 0}
    trail = [v]

    def rec(u):
        outs = [choice[u]] if u in choice else arena.succ[u]
        for w in outs:
            if w in path:
                seg = trail[path[w] :]
                yield min(arena.priority[x] for x in seg)
            else:
                path[w] = len(trail)
                trail.append(w)
                yield from rec(w)
                trail.pop()
                del path[w]

    yield from rec(v)


@pytest.mark.parametrize("seed", range(30))
def test_strategies_win_their_regions(seed):
    rng = random.Random(3000 + seed)
    arena = random_arena(rng, max_nodes=7)
    win = zielonka_solve(arena)
    for v in win.eve_nodes:
        for m in _lassos_under(arena, win.eve_strategy, v, ADAM):
            assert m % 2 == 0
    for v in win.adam_nodes:
        for m in _lassos_under(arena, win.adam_strategy, v, EVE):
            assert m % 2 == 1


def test_finite_duration_all_even():
    arena = arena_of([EVE, ADAM], [0, 2], [[1], [0]])
    assert solve_finite_duration(arena)


def test_finite_duration_trivial_odd():
    arena = arena_of([ADAM], [1], [[0]])
    assert not solve_finite_duration(arena)


@pytest.mark.parametrize("seed", range(80))
def test_finite_duration_agrees_with_zielonka_on_generic_arenas(seed):
    rng = random.Random(4000 + seed)
    arena = random_arena(rng, max_nodes=8, max_priority=4)
    win = zielonka_solve(arena)
    assert solve_finite_duration(arena) == (arena.initial in win.eve_nodes)


@pytest.mark.parametrize("seed", range(30))
def test_engines_agree(seed):
    rng = random.Random(5000 + seed)
    arena = random_arena(rng, max_nodes=9, max_priority=4)
    assert solve_finite_duration(arena, engine="python") == solve_finite_duration(
        arena
    )


@pytest.mark.parametrize("cls", ["reach", "safe", "buchi", "cobuchi"])
@pytest.mark.parametrize("seed", [0, 3, 7])
def test_finite_duration_agrees_on_compiled_arenas(cls, seed):
    g, objs = generate_instance(3, 2 + seed % 2, 2, cls, 7000 + seed)
    arena = build_parity_arena(g, objs)
    win = zielonka_solve(arena)
    assert solve_finite_duration(arena) == (arena.initial in win.eve_nodes)


def test_finite_duration_rejects_recurring_class(fig1):
    from conftest import objective_profile

    objs = objective_profile(
        "muller", fig1, [__import__("rsynth.formulas", fromlist=["Atom"]).Atom("s0")] * 3
    )
    arena = build_parity_arena(fig1, objs)
    from rsynth.game import GameError

    with pytest.raises(GameError):
        solve_finite_duration(arena)


def test_round_key_bound_is_enforced():
    # a 3-key cycle with a bound pretending one key suffices; mixed
    # parities so no uniform-region cut resolves it without walking
    arena = arena_of([EVE, EVE, EVE], [0, 1, 2], [[1], [2], [0]])
    arena.fd_round_bound = 1
    with pytest.raises(InternalInvariantError):
        solve_finite_duration(arena, engine="python")
    with pytest.raises(InternalInvariantError):
        solve_finite_duration(arena)


def test_finite_duration_stats(fig1, fig1_reach):
    arena = build_parity_arena(fig1, fig1_reach)
    stats = {}
    assert solve_finite_duration(arena, stats)
    assert 0 < stats["max_play_states"] <= 4 * stats["round_bound"] + 1
    assert stats["opened"] > 0
