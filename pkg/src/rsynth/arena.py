"""Turn-based two-player arena compiled from a concurrent game.

The arena stages each concurrent round as a four-move dialogue between
Eve (the synthesizer) and Adam (the environment verifier):

  layer A: Eve fixes Agent 0's action and, for every agent currently
           claimed deviating (set W), the action its winning strategy
           prescribes; all other entries carry the no-action mark.
  layer B: Adam announces a full environment profile.
  layer C: Eve may propose fresh deviations for agents not yet tracked
           (outside W and D); entries for tracked agents stay blank.
  layer D: Adam resolves the round with the profile actually played --
           the announcement itself or a single attributable departure
           from it -- which updates the bookkeeping sets W and D.

W collects agents whose proposed deviation Adam accepted (Eve must show
they win); D collects agents whose deviation Adam declined (Eve must show
they lose).  Moves are materialized into states, so the transition
function is a pure state-to-state map and solvers can treat the arena as
a plain graph.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .game import GameError, GameStructure, ObjectiveProfile

LAYER_A = "A"
LAYER_B = "B"
LAYER_C = "C"
LAYER_D = "D"

# Move aliases.  EveMoveA has one entry per agent (index 0 = Agent 0,
# never blank); AdamMove and EveMoveC have one entry per environment
# agent, index i-1 for agent i.  None is the no-action mark.
EveMoveA = tuple
AdamMove = tuple
EveMoveC = tuple

EMPTY: frozenset[int] = frozenset()


class ArenaState(NamedTuple):
    layer: str
    s: str
    w: frozenset[int]
    d: frozenset[int]
    a: EveMoveA | None = None
    b: AdamMove | None = None
    c: EveMoveC | None = None


def arena_initial(g: GameStructure) -> ArenaState:
    """Layer-A start: initial state, empty W and D."""
    return ArenaState(LAYER_A, g.initial, EMPTY, EMPTY)


def eve_moves_a(g: GameStructure, w: frozenset[int]) -> list[EveMoveA]:
    """All Eve openings: an Agent-0 action plus, exactly for agents in W,
    an action of theirs; everyone else gets the no-action mark."""
    per_agent = [g.action_sets[0]]
    for i in g.env_agents:
        per_agent.append(g.action_sets[i] if i in w else (None,))
    return [tuple(m) for m in itertools.product(*per_agent)]


def adam_moves(g: GameStructure) -> list[AdamMove]:
    """All full environment profiles (the layer-B announcement)."""
    return [tuple(m) for m in g.env_profiles()]


def adam_moves_d(g: GameStructure, q: ArenaState) -> list[AdamMove]:
    """Resolving moves at layer D.

    Adam must realize the announced round or depart from it by a single
    attributable agent: untracked agents without a proposal are pinned to
    the announcement, and at most one agent with a pending proposal may
    play something else (resolving that proposal).  W agents answer to
    their prescribed actions instead of the announcement and may play
    anything: departing demotes them.  Without this discipline Adam could
    evade every attribution guard by bending two coordinates at once, and
    the bookkeeping would never fill.
    """
    pools = []
    proposed = []
    for i in g.env_agents:
        if i in q.w:
            pools.append(tuple(g.action_sets[i]))
        elif q.c[i - 1] is None:
            pools.append((q.b[i - 1],))
        else:
            pools.append(tuple(g.action_sets[i]))
            proposed.append(i)
    out = []
    for m in itertools.product(*pools):
        if sum(1 for i in proposed if m[i - 1] != q.b[i - 1]) <= 1:
            out.append(tuple(m))
    return out


def eve_moves_c(g: GameStructure, w: frozenset[int], d: frozenset[int]) -> list[EveMoveC]:
    """All Eve proposals: for each untracked agent an action or the
    no-action mark; tracked agents (W or D) are forced blank."""
    per_agent = []
    for i in g.env_agents:
        if i in w or i in d:
            per_agent.append((None,))
        else:
            per_agent.append(tuple(g.action_sets[i]) + (None,))
    return [tuple(m) for m in itertools.product(*per_agent)]


def legal_moves(g: GameStructure, q: ArenaState) -> list[tuple]:
    if q.layer == LAYER_A:
        return eve_moves_a(g, q.w)
    if q.layer == LAYER_B:
        return adam_moves(g)
    if q.layer == LAYER_C:
        return eve_moves_c(g, q.w, q.d)
    return adam_moves_d(g, q)


def _check_legal(g: GameStructure, q: ArenaState, m: tuple) -> None:
    n_env = g.n_agents - 1
    if q.layer == LAYER_A:
        if len(m) != n_env + 1 or m[0] not in g.action_sets[0]:
            raise GameError(f"illegal opening move {m!r}")
        for i in g.env_agents:
            if (m[i] is None) != (i not in q.w):
                raise GameError(f"opening move {m!r} violates the W pattern")
            if m[i] is not None and m[i] not in g.action_sets[i]:
                raise GameError(f"opening move {m!r} uses a foreign action")
    elif q.layer == LAYER_B:
        if len(m) != n_env or any(m[i - 1] not in g.action_sets[i] for i in g.env_agents):
            raise GameError(f"illegal environment profile {m!r}")
    elif q.layer == LAYER_D:
        if len(m) != n_env or any(m[i - 1] not in g.action_sets[i] for i in g.env_agents):
            raise GameError(f"illegal environment profile {m!r}")
        departed = 0
        for i in g.env_agents:
            if i in q.w:
                continue
            if q.c[i - 1] is None:
                if m[i - 1] != q.b[i - 1]:
                    raise GameError(
                        f"resolving move {m!r} bends an unproposed agent {i}"
                    )
            elif m[i - 1] != q.b[i - 1]:
                departed += 1
        if departed > 1:
            raise GameError(f"resolving move {m!r} departs at two proposed agents")
    else:
        if len(m) != n_env:
            raise GameError(f"illegal proposal move {m!r}")
        for i in g.env_agents:
            if i in q.w or i in q.d:
                if m[i - 1] is not None:
                    raise GameError(f"proposal {m!r} addresses a tracked agent")
            elif m[i - 1] is not None and m[i - 1] not in g.action_sets[i]:
                raise GameError(f"proposal {m!r} uses a foreign action")


def arena_step(g: GameStructure, q: ArenaState, m: tuple) -> ArenaState:
    """Apply one move.  Layers A/B/C append the move to the state; layer D
    plays the round out and updates W and D:

    - a proposed agent whose played action matches Eve's proposal, no other
      proposed agent departing from the announcement, joins W;
    - a W agent that departs from Eve's prescribed action moves to D;
    - a proposed agent that played anything else, again with no other
      proposed agent departing, joins D.

    A blank proposal never matches a played action.
    """
    _check_legal(g, q, m)
    if q.layer == LAYER_A:
        return ArenaState(LAYER_B, q.s, q.w, q.d, a=m)
    if q.layer == LAYER_B:
        return ArenaState(LAYER_C, q.s, q.w, q.d, a=q.a, b=m)
    if q.layer == LAYER_C:
        return ArenaState(LAYER_D, q.s, q.w, q.d, a=q.a, b=q.b, c=m)

    env = g.env_agents
    a, b, c, d = q.a, q.b, q.c, m
    departed = [
        i
        for i in env
        if i not in q.w and c[i - 1] is not None and d[i - 1] != b[i - 1]
    ]
    joined_w = {
        i
        for i in env
        if i not in q.w
        and i not in q.d
        and c[i - 1] is not None
        and d[i - 1] == c[i - 1]
        and all(j == i for j in departed)
    }
    left_w = {i for i in q.w if d[i - 1] != a[i]}
    joined_d = {
        i
        for i in env
        if i not in q.w
        and i not in q.d
        and c[i - 1] is not None
        and d[i - 1] != c[i - 1]
        and all(j == i for j in departed)
    }
    s2 = g.table[(q.s, (a[0],) + d)]
    w2 = (q.w | joined_w) - left_w
    d2 = q.d | left_w | joined_d
    return ArenaState(LAYER_A, s2, frozenset(w2), frozenset(d2))


def round_profile(q_d: ArenaState, d: AdamMove) -> tuple[str, ...]:
    """Game-level action profile realized by a resolved round."""
    return (q_d.a[0],) + tuple(d)


# ---------------------------------------------------------------------------
# Arena lassos and the winning condition


@dataclass(frozen=True)
class ArenaLasso:
    """Ultimately periodic arena run; prefix and loop are state sequences
    connected by legal moves, with the loop aligned on a layer-A state."""

    prefix: tuple[ArenaState, ...]
    loop: tuple[ArenaState, ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise GameError("arena lasso loop must be nonempty")


def eval_arena_objective(r: ArenaLasso, objs: ObjectiveProfile) -> bool:
    """Eve's condition on an arena lasso.

    The loop fixes the limits of W and D (they are constant on any cycle;
    violating lassos indicate an arena bug and are rejected).  Projecting
    layer-A states to game states gives the underlying play; Eve wins iff
    (Agent 0 wins, or some D agent loses) and every W agent wins.
    """
    whole_loop = list(r.loop)
    lim_w, lim_d = whole_loop[0].w, whole_loop[0].d
    for q in whole_loop:
        if q.w != lim_w or q.d != lim_d:
            raise AssertionError("W/D not constant on an arena cycle")
    a_prefix = [q for q in r.prefix if q.layer == LAYER_A]
    a_loop = [q for q in whole_loop if q.layer == LAYER_A]
    if not a_loop:
        raise AssertionError("arena cycle without a layer-A state")
    inf = frozenset(q.s for q in a_loop)
    occ = frozenset(q.s for q in a_prefix) | inf
    s_0 = objs[0].satisfied(occ, inf)
    s_w = all(objs[i].satisfied(occ, inf) for i in sorted(lim_w))
    s_d = any(not objs[i].satisfied(occ, inf) for i in sorted(lim_d))
    return (s_0 or s_d) and s_w


def random_walk(
    g: GameStructure, rng: random.Random, rounds: int
) -> Iterator[tuple[ArenaState, tuple]]:
    """Uniformly random legal-move walk from the initial arena state,
    yielding (state, chosen move) for ``rounds`` full A-B-C-D rounds."""
    q = arena_initial(g)
    for _ in range(rounds * 4):
        m = rng.choice(legal_moves(g, q))
        yield q, m
        q = arena_step(g, q, m)
