"""Independent brute-force deciders, used only for cross-validation.

Nothing here calls into the arena, reduction, or solver modules: the
dialogue construction, bookkeeping updates, priorities, and searches are
re-implemented from scratch on raw tuples so that agreement with the main
pipeline is meaningful evidence.
"""
from __future__ import annotations

import itertools

import numpy as np

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

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


class OracleTooLarge(RuntimeError):
    """Instance exceeds the oracle's exhaustive-search budget."""


# ---------------------------------------------------------------------------
# Explicit dialogue graph, rebuilt from scratch


def _build_round_graph(g: GameStructure, objs: ObjectiveProfile, max_nodes: int):
    """Four-phase dialogue graph with per-class bookkeeping attached.

    Returns (owner, priority, succ, round_start, key_bound); node 0 is the
    initial round start.  Owner 0 opens rounds and proposes deviations,
    owner 1 announces and resolves them.
    """
    cls = objs.class_tag
    n = g.n_agents
    env = list(range(1, n))
    n_env = len(env)
    n_states = len(g.states)
    env_moves = list(itertools.product(*[g.action_sets[i] for i in env]))
    acts0 = list(g.action_sets[0])

    t_sets = [
        set(objs[i].safe) if cls == SAFE else
        (set() if cls == MULLER else set(objs[i].targets))
        for i in range(n)
    ]

    def eve_open(w):
        pools = [acts0] + [list(g.action_sets[i]) if i in w else [None] for i in env]
        return itertools.product(*pools)

    def eve_propose(w, d):
        pools = [
            [None] if (i in w or i in d) else list(g.action_sets[i]) + [None]
            for i in env
        ]
        return itertools.product(*pools)

    def resolutions(w, b_vec, c_vec):
        """The announcement, or it bent at a single proposed agent; W
        agents answer to their prescriptions and stay free here."""
        pools = []
        for k, i in enumerate(env):
            if i in w:
                pools.append(g.action_sets[i])
            elif c_vec[k] is None:
                pools.append((b_vec[k],))
            else:
                pools.append(g.action_sets[i])
        for d_vec in itertools.product(*pools):
            bent = sum(
                1
                for k, i in enumerate(env)
                if i not in w and c_vec[k] is not None and d_vec[k] != b_vec[k]
            )
            if bent <= 1:
                yield d_vec

    def resolve_w_d(s, w, d, a_vec, b_vec, c_vec, d_vec):
        w2, d2 = set(w), set(d)
        strays = [
            i
            for k, i in enumerate(env)
            if i not in w and c_vec[k] is not None and d_vec[k] != b_vec[k]
        ]
        for k, i in enumerate(env):
            if i in w:
                if d_vec[k] != a_vec[i]:
                    w2.discard(i)
                    d2.add(i)
            elif i not in d and c_vec[k] is not None and strays in ([], [i]):
                if d_vec[k] == c_vec[k]:
                    w2.add(i)
                else:
                    d2.add(i)
        s2 = g.table[(s, (a_vec[0],) + tuple(d_vec))]
        return s2, frozenset(w2), frozenset(d2)

    def cyc_next(members, c):
        for step in range(1, n_env + 1):
            j = step if c < 0 else ((c - 1 + step) % n_env) + 1
            if j in members:
                return j
        raise AssertionError

    # class-specific annotation and round-start priorities
    if cls == REACH:
        ann0 = frozenset(i for i in range(n) if g.initial in t_sets[i])

        def ann_step(s2, w2, d2, s, w, d, ann):
            return ann | {i for i in range(n) if s2 in t_sets[i]}

        def a_priority(s, w, d, ann):
            return 0 if ((0 in ann or d - ann) and w <= ann) else 1

        mid_priority = 1
        key_bound = 1 + (2 * n + 1) * (n + 1) * (n + 1) * n_states
    elif cls == SAFE:
        ann0 = frozenset(i for i in range(n) if g.initial not in t_sets[i])

        def ann_step(s2, w2, d2, s, w, d, ann):
            return ann | {i for i in range(n) if s2 not in t_sets[i]}

        def a_priority(s, w, d, ann):
            return 0 if ((0 not in ann or d & ann) and not (w & ann)) else 1

        mid_priority = 1
        key_bound = 1 + (2 * n + 1) * (n + 1) * (n + 1) * n_states
    elif cls == BUCHI:
        ann0 = (-1, -1, 0)

        def ann_step(s2, w2, d2, s, w, d, ann):
            cd, cw, bit = ann
            hit0 = s in t_sets[0]
            polled_w = not w or (cw == min(w) and s in t_sets[cw])
            if bit == 0 and hit0:
                bit2 = 1
            elif bit == 1 and polled_w:
                bit2 = 0
            else:
                bit2 = bit
            if not d2:
                cd2 = -1
            elif cd == -1 or s2 in t_sets[cd]:
                cd2 = cyc_next(d2, cd)
            else:
                cd2 = cd
            if not w2:
                cw2 = -1
            elif cw == -1 or cw not in w2 or s2 in t_sets[cw]:
                cw2 = cyc_next(w2, cw)
            else:
                cw2 = cw
            return (cd2, cw2, bit2)

        def a_priority(s, w, d, ann):
            cd, cw, bit = ann
            if bit == 0 and s in t_sets[0]:
                return 0
            if not d or (cd == min(d) and s in t_sets[cd]):
                return 1
            if not w or (cw == min(w) and s in t_sets[cw]):
                return 2
            return 3

        mid_priority = 4
        key_bound = 1 + (2 * n + 1) * (n + 1) * n_states * 2 * (n_env + 1) ** 2
    elif cls == COBUCHI:
        ann0 = None

        def ann_step(s2, w2, d2, s, w, d, ann):
            return None

        def a_priority(s, w, d, ann):
            if any(s in t_sets[i] for i in w):
                return 1
            if any(s in t_sets[i] for i in d):
                return 2
            if s in t_sets[0]:
                return 3
            return 4

        mid_priority = 6
        key_bound = 1 + (2 * n + 1) * (n + 1) * n_states
    elif cls == MULLER:
        ann0 = (
            tuple(s for s in g.states if s != g.initial) + (g.initial,),
            n_states - 1,
        )

        def ann_step(s2, w2, d2, s, w, d, ann):
            perm, _ = ann
            k = perm.index(s2)
            return (perm[:k] + perm[k + 1 :] + (s2,), k)

        def a_priority(s, w, d, ann):
            perm, h = ann
            tail = frozenset(perm[h:])
            good = all(objs[i].formula.holds(tail) for i in w) and (
                objs[0].formula.holds(tail)
                or any(not objs[i].formula.holds(tail) for i in d)
            )
            return 2 * h if good else 2 * h + 1

        mid_priority = 2 * n_states + 2
        key_bound = None  # not used: the recurrence-record graph is solved whole
    else:
        raise GameError(f"oracle does not handle class {cls!r}")

    init_key = ("A", g.initial, frozenset(), frozenset(), ann0)
    index: dict = {init_key: 0}
    nodes = [init_key]
    owner: list[int] = []
    priority: list[int] = []
    succ: list[list[int]] = []
    round_start: list[bool] = []

    i = 0
    while i < len(nodes):
        key = nodes[i]
        layer = key[0]
        if layer == "A":
            _, s, w, d, ann = key
            owner.append(0)
            priority.append(a_priority(s, w, d, ann))
            round_start.append(True)
            nexts = [("B", s, w, d, a, ann) for a in eve_open(w)]
        elif layer == "B":
            _, s, w, d, a, ann = key
            owner.append(1)
            priority.append(mid_priority)
            round_start.append(False)
            nexts = [("C", s, w, d, a, b, ann) for b in env_moves]
        elif layer == "C":
            _, s, w, d, a, b, ann = key
            owner.append(0)
            priority.append(mid_priority)
            round_start.append(False)
            nexts = [("D", s, w, d, a, b, c, ann) for c in eve_propose(w, d)]
        else:
            _, s, w, d, a, b, c, ann = key
            owner.append(1)
            priority.append(mid_priority)
            round_start.append(False)
            nexts = []
            for d_vec in resolutions(w, b, c):
                s2, w2, d2 = resolve_w_d(s, w, d, a, b, c, d_vec)
                ann2 = ann_step(s2, w2, d2, s, w, d, ann)
                nexts.append(("A", s2, w2, d2, ann2))
        out: list[int] = []
        seen: set[int] = set()
        for nk in nexts:
            j = index.get(nk)
            if j is None:
                j = len(nodes)
                if j >= max_nodes:
                    raise OracleTooLarge(
                        f"dialogue graph exceeds {max_nodes} nodes "
                        f"({n_states} states, {n} agents, class {cls})"
                    )
                index[nk] = j
                nodes.append(nk)
            if j not in seen:
                seen.add(j)
                out.append(j)
        succ.append(out)
        i += 1
    return owner, priority, succ, round_start, key_bound


# ---------------------------------------------------------------------------
# First-repetition evaluation (visited/recurrence classes)


def _first_loop_value(
    owner: list[int],
    priority: list[int],
    succ: list[list[int]],
    round_start: list[bool],
    key_bound: int,
    engine: str = "auto",
) -> bool:
    if _HAVE_NUMBA and engine != "python":
        n = len(succ)
        ptr = np.zeros(n + 1, dtype=np.int64)
        for v in range(n):
            ptr[v + 1] = ptr[v] + len(succ[v])
        dat = np.empty(ptr[-1], dtype=np.int64)
        for v in range(n):
            dat[ptr[v] : ptr[v + 1]] = succ[v]
        code = _loop_eval_kernel(
            ptr,
            dat,
            np.asarray(owner, dtype=np.int8),
            np.asarray(priority, dtype=np.int64),
            np.asarray(round_start, dtype=np.bool_),
            np.asarray(_component_ids(succ), dtype=np.int64),
            np.int64(key_bound),
        )
        if code < 0:
            raise OracleTooLarge("round-key bound exceeded; graph inconsistent")
        return bool(code)
    return _first_loop_value_py(owner, priority, succ, round_start, key_bound)


def _component_ids(succ: list[list[int]]) -> list[int]:
    """Strongly connected component per node, by iterative Tarjan."""
    n = len(succ)
    num = [-1] * n
    low = [0] * n
    comp = [-1] * n
    live = [False] * n
    order: list[int] = []
    clock = 0
    next_comp = 0
    for seed in range(n):
        if num[seed] != -1:
            continue
        frames: list[list[int]] = [[seed, 0]]
        while frames:
            fr = frames[-1]
            v = fr[0]
            if fr[1] == 0:
                num[v] = low[v] = clock
                clock += 1
                order.append(v)
                live[v] = True
            moved = False
            while fr[1] < len(succ[v]):
                w = succ[v][fr[1]]
                fr[1] += 1
                if num[w] == -1:
                    frames.append([w, 0])
                    moved = True
                    break
                if live[w] and num[w] < low[v]:
                    low[v] = num[w]
            if moved:
                continue
            frames.pop()
            if low[v] == num[v]:
                while True:
                    u = order.pop()
                    live[u] = False
                    comp[u] = next_comp
                    if u == v:
                        break
                next_comp += 1
            if frames:
                pv = frames[-1][0]
                if low[v] < low[pv]:
                    low[pv] = low[v]
    return comp


def _first_loop_value_py(
    owner: list[int],
    priority: list[int],
    succ: list[list[int]],
    round_start: list[bool],
    key_bound: int,
) -> bool:
    """Tree evaluation stopping each branch at the first repeated round
    start; the closing loop favors the opener iff its smallest priority is
    even.  Keeps only path-local state plus per-node move-ordering hints.

    Any loop formed under a node stays inside that node's reachable part
    of the graph, so a node whose reachable round keys all share one
    priority parity is decided outright.
    """
    on_path: dict[int, int] = {}
    trail: list[int] = []
    last_good = [-1] * len(succ)

    def backward_parity(parity: int) -> list[bool]:
        pred: list[list[int]] = [[] for _ in succ]
        for v, ws in enumerate(succ):
            for w in ws:
                pred[w].append(v)
        flag = [False] * len(succ)
        work = [
            v
            for v in range(len(succ))
            if round_start[v] and priority[v] % 2 == parity
        ]
        for v in work:
            flag[v] = True
        while work:
            v = work.pop()
            for u in pred[v]:
                if not flag[u]:
                    flag[u] = True
                    work.append(u)
        return flag

    sees_even = backward_parity(0)
    sees_odd = backward_parity(1)

    def enter(v: int):
        if not sees_odd[v]:
            return True, None
        if not sees_even[v]:
            return False, None
        if round_start[v]:
            if len(on_path) >= key_bound:
                raise OracleTooLarge("round-key bound exceeded; graph inconsistent")
            on_path[v] = len(trail)
        trail.append(priority[v])
        mine = owner[v] == 0
        rest: list[int] = []
        for w in succ[v]:
            if not sees_odd[w]:
                if mine:
                    leave(v)
                    return True, None
                continue
            if not sees_even[w]:
                if not mine:
                    leave(v)
                    return False, None
                continue
            at = on_path.get(w)
            if at is not None:
                if (min(trail[at:]) % 2 == 0) == mine:
                    leave(v)
                    last_good[v] = w
                    return mine, None
            else:
                rest.append(w)
        if not rest:
            leave(v)
            return (not mine), None
        hint = last_good[v]
        if hint in rest and rest[0] != hint:
            rest.remove(hint)
            rest.insert(0, hint)
        return None, rest

    def leave(v: int) -> None:
        trail.pop()
        if round_start[v]:
            del on_path[v]

    frames: list[list] = []
    value, rest = enter(0)
    if rest is not None:
        frames.append([0, rest, 0])
    while frames:
        fr = frames[-1]
        v = fr[0]
        mine = owner[v] == 0
        if value is not None:
            if value == mine:
                last_good[v] = fr[1][fr[2] - 1]
                frames.pop()
                leave(v)
                continue
            value = None
        if fr[2] < len(fr[1]):
            w = fr[1][fr[2]]
            fr[2] += 1
            value, rest = enter(w)
            if rest is not None:
                frames.append([w, rest, 0])
            continue
        value = not mine
        frames.pop()
        leave(v)
    return bool(value)


@njit(cache=True)
def _loop_eval_kernel(ptr, dat, owner, pri, start, comp, key_bound):  # pragma: no cover
    # Cycles stay inside one strongly connected component; entering a new
    # component strands every open round key, so values at those entries
    # are independent of the trail and are remembered exactly.
    n = owner.shape[0]
    n_edges = dat.shape[0]

    # predecessor adjacency for the uniform-region marking
    deg = np.zeros(n, dtype=np.int64)
    for e in range(n_edges):
        deg[dat[e]] += 1
    pptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        pptr[v + 1] = pptr[v] + deg[v]
    fill = pptr[:-1].copy()
    pdat = np.empty(n_edges, dtype=np.int64)
    for v in range(n):
        for e in range(ptr[v], ptr[v + 1]):
            w = dat[e]
            pdat[fill[w]] = v
            fill[w] += 1
    sees = np.zeros((2, n), dtype=np.bool_)
    todo = np.empty(n, dtype=np.int64)
    for par in range(2):
        tp = 0
        for v in range(n):
            if start[v] and pri[v] % 2 == par:
                sees[par, v] = True
                todo[tp] = v
                tp += 1
        while tp > 0:
            tp -= 1
            v = todo[tp]
            for e in range(pptr[v], pptr[v + 1]):
                u = pdat[e]
                if not sees[par, u]:
                    sees[par, u] = True
                    todo[tp] = u
                    tp += 1

    cap = 4 * (key_bound + 2) + 8
    mark = np.full(n, -1, dtype=np.int64)  # trail position of open round keys
    hint = np.full(n, -1, dtype=np.int64)
    known = np.full(n, -1, dtype=np.int8)  # settled entry values per component
    trail = np.empty(cap, dtype=np.int64)
    nstack = np.empty(cap, dtype=np.int64)
    cstack = np.empty(cap, dtype=np.int64)
    hstack = np.empty(cap, dtype=np.int8)  # 1 while the hint is still untried
    kstack = np.empty(cap, dtype=np.int64)  # frame-local hint snapshot
    lstack = np.empty(cap, dtype=np.int64)
    sstack = np.empty(cap, dtype=np.int8)  # 1 when the value is path-free
    height = 0
    tp = 0
    keys_open = 0
    verdict = -1
    node = 0
    fresh_entry = 1

    while True:
        # enter `node`
        keep = fresh_entry
        fresh_entry = 0
        if not sees[1, node]:
            verdict = 1
        elif not sees[0, node]:
            verdict = 0
        else:
            if start[node]:
                keys_open += 1
                if keys_open > key_bound:
                    return -1
                mark[node] = tp
            trail[tp] = pri[node]
            tp += 1
            opener = owner[node] == 0
            settled = False
            has_open = False
            for e in range(ptr[node], ptr[node + 1]):
                w = dat[e]
                if not sees[1, w]:
                    if opener:
                        verdict = 1
                        hint[node] = w
                        settled = True
                        break
                elif not sees[0, w]:
                    if not opener:
                        verdict = 0
                        hint[node] = w
                        settled = True
                        break
                elif comp[w] != comp[node] and known[w] >= 0:
                    if (known[w] == 1) == opener:
                        verdict = known[w]
                        hint[node] = w
                        settled = True
                        break
                else:
                    spot = mark[w]
                    if spot >= 0:
                        low = trail[spot]
                        t = spot + 1
                        while t < tp and low > 0:
                            if trail[t] < low:
                                low = trail[t]
                            t += 1
                        if (low % 2 == 0) == opener:
                            verdict = 1 if opener else 0
                            hint[node] = w
                            settled = True
                            break
                    else:
                        has_open = True
            if not settled and not has_open:
                verdict = 0 if opener else 1
                settled = True
            if settled:
                tp -= 1
                if start[node]:
                    mark[node] = -1
                    keys_open -= 1
                if keep == 1:
                    known[node] = verdict
            else:
                nstack[height] = node
                cstack[height] = ptr[node]
                kstack[height] = hint[node]
                hstack[height] = 1 if hint[node] >= 0 else 0
                lstack[height] = -1
                sstack[height] = keep
                height += 1
                verdict = -1

        # unwind verdicts and choose the next node to enter
        moving = False
        while not moving:
            if verdict >= 0:
                if height == 0:
                    return verdict
                u = nstack[height - 1]
                if (verdict == 1) == (owner[u] == 0):
                    hint[u] = lstack[height - 1]
                    height -= 1
                    tp -= 1
                    if start[u]:
                        mark[u] = -1
                        keys_open -= 1
                    if sstack[height] == 1:
                        known[u] = verdict
                    continue
                verdict = -1
            u = nstack[height - 1]
            opener_u = owner[u] == 0
            chosen = -1
            decided = False
            if hstack[height - 1] == 1:
                hstack[height - 1] = 0
                w = kstack[height - 1]
                if w >= 0 and mark[w] < 0 and sees[0, w] and sees[1, w]:
                    if comp[w] != comp[u] and known[w] >= 0:
                        if (known[w] == 1) == opener_u:
                            verdict = known[w]
                            hint[u] = w
                            decided = True
                    else:
                        chosen = w
            if not decided and chosen < 0:
                c = cstack[height - 1]
                stop = ptr[u + 1]
                h = kstack[height - 1]
                while c < stop:
                    w = dat[c]
                    c += 1
                    if w == h or mark[w] >= 0:
                        continue
                    if not (sees[0, w] and sees[1, w]):
                        continue
                    if comp[w] != comp[u] and known[w] >= 0:
                        if (known[w] == 1) == opener_u:
                            verdict = known[w]
                            hint[u] = w
                            decided = True
                            break
                        continue
                    chosen = w
                    break
                cstack[height - 1] = c
            if not decided and chosen >= 0:
                lstack[height - 1] = chosen
                if comp[chosen] != comp[u]:
                    fresh_entry = 1
                node = chosen
                moving = True
                continue
            if not decided:
                verdict = 0 if opener_u else 1
            height -= 1
            tp -= 1
            if start[u]:
                mark[u] = -1
                keys_open -= 1
            if sstack[height] == 1:
                known[u] = verdict
            if height == 0:
                return verdict


# ---------------------------------------------------------------------------
# Exhaustive positional-strategy analysis of explicit parity graphs


def _adam_beats_fixed(
    succ: list[list[int]],
    owner: list[int],
    priority: list[int],
    choice: dict[int, int],
    init: int,
) -> bool:
    """Can Adam steer into a cycle with odd minimal priority?  Unassigned
    Eve nodes are dead ends, so a win here refutes every completion of a
    partial strategy."""

    return _adam_odd_cycle(succ, owner, priority, choice, init, False)


def _adam_odd_cycle(
    succ, owner, priority, choice, init, grant_unassigned: bool
) -> bool:
    """Odd-minimum cycle reachable by Adam.  Unassigned Eve nodes are dead
    ends, or fully Adam-controlled when ``grant_unassigned`` (an upper
    bound on what any completion could concede)."""

    def outs_of(v):
        if owner[v] != 0:
            return succ[v]
        w = choice.get(v)
        if w is None:
            return succ[v] if grant_unassigned else ()
        return (w,)

    reach = {init}
    stack = [init]
    while stack:
        v = stack.pop()
        for w in outs_of(v):
            if w not in reach:
                reach.add(w)
                stack.append(w)
    for v in reach:
        p = priority[v]
        if p % 2 == 0:
            continue
        # cycle through v using only priorities >= p
        seen = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in outs_of(u):
                if w == v:
                    return True
                if w not in seen and w in reach and priority[w] >= p:
                    seen.add(w)
                    stack.append(w)
    return False


def _eve_wins_from(
    succ: list[list[int]],
    owner: list[int],
    priority: list[int],
    init: int,
    budget: list[int],
) -> bool:
    """Exhaustive search over positional Eve strategies, restricted to
    choices at nodes actually reachable under the partial strategy, with
    partial refutations pruning whole completion families."""

    def search(choice: dict[int, int]) -> bool:
        budget[0] -= 1
        if budget[0] < 0:
            raise OracleTooLarge(
                f"positional enumeration budget exhausted "
                f"({len(succ)} nodes, {sum(map(len, succ))} edges)"
            )
        # every Eve node reachable under the partial strategy
        reach = {init}
        stack = [init]
        unassigned: list[int] = []
        while stack:
            v = stack.pop()
            if owner[v] == 0 and v not in choice:
                unassigned.append(v)
                continue
            outs = [choice[v]] if owner[v] == 0 else succ[v]
            for w in outs:
                if w not in reach:
                    reach.add(w)
                    stack.append(w)
        if _adam_odd_cycle(succ, owner, priority, choice, init, False):
            return False  # refuted already, whatever the completion
        if not unassigned:
            return True
        if not _adam_odd_cycle(succ, owner, priority, choice, init, True):
            return True  # safe even if the rest is conceded to Adam
        open_node = min(unassigned)
        for w in succ[open_node]:
            choice[open_node] = w
            if search(choice):
                del choice[open_node]
                return True
            del choice[open_node]
        return False

    return search({})


def parity_winners_by_enumeration(
    owner: list[int],
    priority: list[int],
    succ: list[list[int]],
    budget: int = 500000,
) -> frozenset[int]:
    """Eve's winning set of an explicit parity game, node by node, by
    exhaustive positional-strategy enumeration."""
    shared = [budget]
    return frozenset(
        v
        for v in range(len(owner))
        if _eve_wins_from(succ, owner, priority, v, shared)
    )


def brute_force_ncrsp(
    g: GameStructure,
    objs: ObjectiveProfile,
    max_nodes: int = 300000,
    budget: int = 200000,
    engine: str = "auto",
) -> bool:
    """Independent yes/no decision; refuses oversized instances."""
    cls = objs.class_tag
    objs.check_against(g)
    owner, priority, succ, round_start, key_bound = _build_round_graph(
        g, objs, max_nodes
    )
    if cls in (REACH, SAFE, BUCHI, COBUCHI):
        return _first_loop_value(owner, priority, succ, round_start, key_bound, engine)
    shared = [budget]
    return _eve_wins_from(succ, owner, priority, 0, shared)
