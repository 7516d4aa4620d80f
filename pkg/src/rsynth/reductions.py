"""Compilation of the dialogue arena into an explicit parity game.

Each objective class augments arena states with just enough bookkeeping to
express Eve's condition as a parity condition (min recurring priority
even):

- reach / safety: a monotone set P of agents that already hit their
  target (resp. already strayed unsafe), two priorities;
- Buchi: two round-robin counters c_D / c_W polling the agents of D and W
  for target visits, plus one alternation bit, five priorities;
- co-Buchi: no extra state, priorities read off W/D target membership;
- Muller: a latest-appearance record (permutation + hit position).

Annotations change only on edges entering layer-A states; the three inner
layers of a round copy them unchanged.
"""
from __future__ import annotations

import logging
from typing import Hashable, NamedTuple

from .arena import (
    LAYER_A,
    LAYER_B,
    LAYER_C,
    LAYER_D,
    ArenaState,
    adam_moves,
    adam_moves_d,
    arena_initial,
    arena_step,
    eve_moves_a,
    eve_moves_c,
)
from .game import (
    BUCHI,
    COBUCHI,
    MULLER,
    REACH,
    SAFE,
    GameError,
    GameStructure,
    ObjectiveProfile,
)

log = logging.getLogger(__name__)

EVE = 0
ADAM = 1

NO_AGENT = -1  # counter value: nobody awaited


class AugState(NamedTuple):
    base: ArenaState
    ann: Hashable  # class-specific annotation, None for co-Buchi


# ---------------------------------------------------------------------------
# Reachability / safety bookkeeping


def reach_augment_initial(g: GameStructure, objs: ObjectiveProfile) -> frozenset[int]:
    return frozenset(i for i in range(g.n_agents) if g.initial in objs[i].targets)


def reach_update_P(q_next: ArenaState, p: frozenset[int], objs: ObjectiveProfile) -> frozenset[int]:
    if q_next.layer != LAYER_A:
        return p
    return p | {i for i in range(len(objs)) if q_next.s in objs[i].targets}


def safe_augment_initial(g: GameStructure, objs: ObjectiveProfile) -> frozenset[int]:
    return frozenset(i for i in range(g.n_agents) if g.initial not in objs[i].safe)


def safe_update_P(q_next: ArenaState, p: frozenset[int], objs: ObjectiveProfile) -> frozenset[int]:
    if q_next.layer != LAYER_A:
        return p
    return p | {i for i in range(len(objs)) if q_next.s not in objs[i].safe}


def reach_priority(q: ArenaState, p: frozenset[int]) -> int:
    """0 on accepting layer-A states: Agent 0 already reached, or some
    declined deviator never will, while every accepted deviator did."""
    if q.layer != LAYER_A:
        return 1
    good = (0 in p or bool(q.d - p)) and q.w <= p
    return 0 if good else 1


def safe_priority(q: ArenaState, p: frozenset[int]) -> int:
    """Dual bookkeeping: P holds agents that already strayed unsafe."""
    if q.layer != LAYER_A:
        return 1
    good = (0 not in p or bool(q.d & p)) and not (q.w & p)
    return 0 if good else 1


# ---------------------------------------------------------------------------
# Buchi counters, bit, and priorities


def _next_in_cycle(members: frozenset[int], current: int, n: int) -> int:
    """First member strictly after ``current`` in cyclic order over 1..n;
    ``current`` = -1 starts the scan before agent 1."""
    start = 1 if current < 0 else current + 1
    for j in list(range(start, n + 1)) + list(range(1, start)):
        if j in members:
            return j
    raise AssertionError("cyclic scan over an empty set")


def buchi_update_counters(
    q_next: ArenaState, c_d: int, c_w: int, objs: ObjectiveProfile, n_env: int
) -> tuple[int, int]:
    """Advance the round-robin counters on entry to a layer-A state.  The
    D counter moves on once the awaited agent's target shows up; the W
    counter additionally refreshes when the awaited agent left W."""
    if q_next.layer != LAYER_A:
        return c_d, c_w
    s2, w2, d2 = q_next.s, q_next.w, q_next.d
    if not d2:
        c_d2 = NO_AGENT
    elif c_d == NO_AGENT or s2 in objs[c_d].targets:
        c_d2 = _next_in_cycle(d2, c_d, n_env)
    else:
        c_d2 = c_d
    if not w2:
        c_w2 = NO_AGENT
    elif c_w == NO_AGENT or c_w not in w2 or s2 in objs[c_w].targets:
        c_w2 = _next_in_cycle(w2, c_w, n_env)
    else:
        c_w2 = c_w
    return c_d2, c_w2


def buchi_in_T0(s: str, objs: ObjectiveProfile) -> bool:
    return s in objs[0].targets


def buchi_in_Td(s: str, d: frozenset[int], c_d: int, objs: ObjectiveProfile) -> bool:
    """D-poll completed: D empty, or the counter sits at min D on a target."""
    return not d or (c_d == min(d) and s in objs[c_d].targets)


def buchi_in_Tw(s: str, w: frozenset[int], c_w: int, objs: ObjectiveProfile) -> bool:
    return not w or (c_w == min(w) and s in objs[c_w].targets)


def buchi_update_bit(
    round_a: tuple[str, frozenset[int], frozenset[int], int, int],
    b: int,
    objs: ObjectiveProfile,
) -> int:
    """Alternation bit, driven by the round's layer-A tuple: set on an
    Agent-0 target visit, cleared on a completed W poll."""
    s, w, d, c_d, c_w = round_a
    if b == 0 and buchi_in_T0(s, objs):
        return 1
    if b == 1 and buchi_in_Tw(s, w, c_w, objs):
        return 0
    return b


def buchi_priority(aug: AugState, objs: ObjectiveProfile) -> int:
    q = aug.base
    if q.layer != LAYER_A:
        return 4
    c_d, c_w, b = aug.ann
    if b == 0 and buchi_in_T0(q.s, objs):
        return 0
    if buchi_in_Td(q.s, q.d, c_d, objs):
        return 1
    if buchi_in_Tw(q.s, q.w, c_w, objs):
        return 2
    return 3


# ---------------------------------------------------------------------------
# co-Buchi priorities


def cobuchi_priority(q: ArenaState, objs: ObjectiveProfile) -> tuple[int, bool]:
    """Priority and a flag marking the case left open by the four-way
    split: a state feeding a declined deviator's target without touching
    Agent 0's.  Such states are accepting (priority 2) for the same reason
    the covered target/decline overlap is."""
    if q.layer != LAYER_A:
        return 6, False
    in_tw = any(q.s in objs[i].targets for i in q.w)
    in_td = any(q.s in objs[i].targets for i in q.d)
    in_t0 = q.s in objs[0].targets
    if in_tw:
        return 1, False
    if in_td:
        return 2, not in_t0
    if in_t0:
        return 3, False
    return 4, False


# ---------------------------------------------------------------------------
# Muller latest-appearance record


def lar_initial(g: GameStructure) -> tuple[tuple[str, ...], int]:
    """Declaration order with the initial state moved last; the hit
    position points at it, as if it had just been visited."""
    rest = tuple(s for s in g.states if s != g.initial)
    return rest + (g.initial,), len(g.states) - 1


def lar_step(m: tuple[str, ...], h: int, s_next: str) -> tuple[tuple[str, ...], int]:
    """Move the visited state to the back; the hit position is where it
    was taken from."""
    k = m.index(s_next)
    return m[:k] + m[k + 1 :] + (s_next,), k


def muller_priority(aug: AugState, objs: ObjectiveProfile) -> int:
    q = aug.base
    n_states = len(aug.ann[0])
    if q.layer != LAYER_A:
        return 2 * n_states + 2
    m, h = aug.ann
    tail = frozenset(m[h:])
    good = all(objs[i].formula.holds(tail) for i in q.w) and (
        objs[0].formula.holds(tail)
        or any(not objs[i].formula.holds(tail) for i in q.d)
    )
    return 2 * h if good else 2 * h + 1


# ---------------------------------------------------------------------------
# Explicit parity arena


class ParityArena:
    """Explicit two-player graph game: owner and priority per node, every
    node with at least one successor.  Compiled arenas are four-layer;
    generic arenas (for tests and subgames) carry arbitrary shape."""

    def __init__(
        self,
        nodes: list,
        owner: list[int],
        priority: list[int],
        succ: list[list[int]],
        initial: int,
        cls: str,
        loop_node: list[bool],
        fd_round_bound: int,
        game: GameStructure | None = None,
        objectives: ObjectiveProfile | None = None,
    ):
        self.nodes = nodes
        self.owner = owner
        self.priority = priority
        self.succ = succ
        self.initial = initial
        self.cls = cls
        self.loop_node = loop_node
        self.fd_round_bound = fd_round_bound
        self.game = game
        self.objectives = objectives
        self.index: dict | None = None
        self._ann_update = None
        self._pred: list[list[int]] | None = None

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)

    def pred(self) -> list[list[int]]:
        if self._pred is None:
            pred: list[list[int]] = [[] for _ in self.nodes]
            for v, ws in enumerate(self.succ):
                for w in ws:
                    pred[w].append(v)
            self._pred = pred
        return self._pred

    def step(self, nid: int, move: tuple) -> int:
        """Follow one legal move from a compiled node; annotations update
        exactly on edges entering layer-A states."""
        if self.index is None or self._ann_update is None:
            raise GameError("stepping is only defined on compiled arenas")
        aug = self.nodes[nid]
        q2 = arena_step(self.game, aug.base, move)
        ann2 = aug.ann if q2.layer != LAYER_A else self._ann_update(aug, q2)
        return self.index[AugState(q2, ann2)]

    @classmethod
    def generic(
        cls,
        owner: list[int],
        priority: list[int],
        succ: list[list[int]],
        initial: int = 0,
    ) -> "ParityArena":
        n = len(owner)
        return cls(
            nodes=list(range(n)),
            owner=owner,
            priority=priority,
            succ=succ,
            initial=initial,
            cls="generic",
            loop_node=[True] * n,
            fd_round_bound=n,
        )


def _fd_round_bound(g: GameStructure, cls: str) -> int:
    """Pigeonhole bound on distinct round keys along a single play: W takes
    at most 2|Agt|+1 values, D at most |Agt|+1, times the annotation range."""
    n_ag = g.n_agents
    n_env = n_ag - 1
    base = (2 * n_ag + 1) * (n_ag + 1) * len(g.states)
    if cls in (REACH, SAFE):
        factor = n_ag + 1  # monotone P
    elif cls == BUCHI:
        factor = 2 * (n_env + 1) * (n_env + 1)  # two counters and the bit
    elif cls == COBUCHI:
        factor = 1
    else:
        raise GameError(f"no finite-duration bound for class {cls!r}")
    return 1 + base * factor


def build_parity_arena(g: GameStructure, objs: ObjectiveProfile) -> ParityArena:
    """Reachable augmented arena with owners by layer and the class's
    priority function.  Successor order is deterministic (move enumeration
    order), which downstream solvers rely on for reproducibility."""
    cls = objs.class_tag
    if cls not in (REACH, SAFE, BUCHI, COBUCHI, MULLER):
        raise GameError(
            f"cannot compile class {cls!r}; encode it as a Muller instance"
        )
    objs.check_against(g)
    n_env = g.n_agents - 1

    if cls == REACH:
        ann0: Hashable = reach_augment_initial(g, objs)
    elif cls == SAFE:
        ann0 = safe_augment_initial(g, objs)
    elif cls == BUCHI:
        ann0 = (NO_AGENT, NO_AGENT, 0)
    elif cls == COBUCHI:
        ann0 = None
    else:
        ann0 = lar_initial(g)

    def update_ann(q_d: AugState, q_next: ArenaState) -> Hashable:
        ann = q_d.ann
        if cls == REACH:
            return reach_update_P(q_next, ann, objs)
        if cls == SAFE:
            return safe_update_P(q_next, ann, objs)
        if cls == BUCHI:
            c_d, c_w, b = ann
            base = q_d.base
            b2 = buchi_update_bit((base.s, base.w, base.d, c_d, c_w), b, objs)
            c_d2, c_w2 = buchi_update_counters(q_next, c_d, c_w, objs, n_env)
            return (c_d2, c_w2, b2)
        if cls == COBUCHI:
            return None
        m, h = ann
        m2, h2 = lar_step(m, h, q_next.s)
        return (m2, h2)

    flagged = False

    def node_priority(aug: AugState) -> int:
        nonlocal flagged
        if cls == REACH:
            return reach_priority(aug.base, aug.ann)
        if cls == SAFE:
            return safe_priority(aug.base, aug.ann)
        if cls == BUCHI:
            return buchi_priority(aug, objs)
        if cls == COBUCHI:
            pr, flag = cobuchi_priority(aug.base, objs)
            if flag and not flagged:
                flagged = True
                log.warning(
                    "co-Buchi compilation hit the open priority case "
                    "(declined deviator's target off Agent 0's); assigning 2"
                )
            return pr
        return muller_priority(aug, objs)

    init = AugState(arena_initial(g), ann0)
    nodes: list[AugState] = [init]
    index: dict[AugState, int] = {init: 0}
    owner: list[int] = []
    priority: list[int] = []
    succ: list[list[int]] = []
    loop_node: list[bool] = []

    i = 0
    while i < len(nodes):
        aug = nodes[i]
        q = aug.base
        owner.append(EVE if q.layer in (LAYER_A, LAYER_C) else ADAM)
        priority.append(node_priority(aug))
        loop_node.append(q.layer == LAYER_A)

        if q.layer == LAYER_A:
            moves = eve_moves_a(g, q.w)
        elif q.layer == LAYER_B:
            moves = adam_moves(g)
        elif q.layer == LAYER_C:
            moves = eve_moves_c(g, q.w, q.d)
        else:
            moves = adam_moves_d(g, q)

        out: list[int] = []
        seen: set[int] = set()
        for m in moves:
            q2 = arena_step(g, q, m)
            ann2 = aug.ann if q2.layer != LAYER_A else update_ann(aug, q2)
            aug2 = AugState(q2, ann2)
            j = index.get(aug2)
            if j is None:
                j = len(nodes)
                index[aug2] = j
                nodes.append(aug2)
            if j not in seen:  # distinct moves may coincide as graph edges
                seen.add(j)
                out.append(j)
        succ.append(out)
        i += 1

    bound = _fd_round_bound(g, cls) if cls != MULLER else len(nodes)
    arena = ParityArena(
        nodes=nodes,
        owner=owner,
        priority=priority,
        succ=succ,
        initial=0,
        cls=cls,
        loop_node=loop_node,
        fd_round_bound=bound,
        game=g,
        objectives=objs,
    )
    arena.index = index
    arena._ann_update = update_ann
    limit = max(2 * len(g.states) + 2, 6)
    assert all(p <= limit for p in priority), "priority out of range"
    return arena
