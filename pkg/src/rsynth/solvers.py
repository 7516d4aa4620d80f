"""Game solvers for the compiled parity arenas.

Two independent decision procedures:

- ``zielonka_solve``: recursive attractor decomposition computing exact
  winning regions and positional strategies for both players, under the
  min-priority-even convention.
- ``solve_finite_duration``: AND-OR evaluation of the finite game tree in
  which a play stops at the first repeated round key and the stopping loop
  wins for Eve iff its minimal priority is even.  Loop detection is
  history-relative, so no value is shared across paths.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import MULLER, GameError
from .reductions import ADAM, EVE, ParityArena

try:  # jitted search kernel; the pure-Python path stays as the reference
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


class InternalInvariantError(RuntimeError):
    """A structural guarantee of the construction was violated."""


@dataclass(frozen=True)
class WinRegion:
    """Partition of the arena nodes with positional winning strategies.
    Each strategy maps every node its player wins and owns to a chosen
    successor inside the winning region."""

    eve_nodes: frozenset[int]
    adam_nodes: frozenset[int]
    eve_strategy: dict[int, int]
    adam_strategy: dict[int, int]

    def winner(self, v: int) -> int:
        return EVE if v in self.eve_nodes else ADAM


def _attract(
    arena: ParityArena, player: int, targets: set[int], region: set[int]
) -> tuple[set[int], dict[int, int]]:
    """Least superset of ``targets`` closed under one-step forcing by
    ``player`` within ``region``; also the forcing edge choices."""
    succ, owner, pred = arena.succ, arena.owner, arena.pred()
    attr = set(targets)
    strategy: dict[int, int] = {}
    counts: dict[int, int] = {}
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u not in region or u in attr:
                continue
            if owner[u] == player:
                attr.add(u)
                strategy[u] = v
                stack.append(u)
            else:
                c = counts.get(u)
                if c is None:
                    c = sum(1 for w in succ[u] if w in region)
                c -= 1
                counts[u] = c
                if c == 0:
                    attr.add(u)
                    stack.append(u)
    return attr, strategy


def attractor(arena: ParityArena, player: int, targets: set[int]) -> set[int]:
    """Nodes from which ``player`` can force entry into ``targets``."""
    if not targets <= set(range(len(arena))):
        raise GameError("attractor targets outside the arena")
    attr, _ = _attract(arena, player, set(targets), set(range(len(arena))))
    return attr


def zielonka_solve(arena: ParityArena) -> WinRegion:
    """Exact winning regions; Eve wins a play iff the minimal priority
    seen infinitely often is even.

    The secondary decomposition runs as a loop (peeling opponent
    attractors), so recursion depth is bounded by the number of distinct
    priorities.
    """
    priority, owner, succ = arena.priority, arena.owner, arena.succ

    def solve(region: set[int]) -> tuple[set[int], set[int], dict, dict]:
        wins: tuple[set[int], set[int]] = (set(), set())
        strategies: tuple[dict, dict] = ({}, {})
        while region:
            p = min(priority[v] for v in region)
            pl = p % 2  # EVE favored by even priorities
            opp = 1 - pl
            u_set = {v for v in region if priority[v] == p}
            a_set, a_strat = _attract(arena, pl, u_set, region)
            sub = solve(region - a_set)
            if not sub[opp]:
                wins[pl].update(region)
                strategies[pl].update(sub[2 + pl])
                strategies[pl].update(a_strat)
                for v in u_set:
                    if owner[v] == pl and v not in strategies[pl]:
                        strategies[pl][v] = next(w for w in succ[v] if w in region)
                break
            b_set, b_strat = _attract(arena, opp, sub[opp], region)
            wins[opp].update(b_set)
            strategies[opp].update(sub[2 + opp])
            strategies[opp].update(b_strat)
            region = region - b_set
        return wins[0], wins[1], strategies[0], strategies[1]

    w_eve, w_adam, s_eve, s_adam = solve(set(range(len(arena))))
    if w_eve & w_adam or len(w_eve) + len(w_adam) != len(arena):
        raise InternalInvariantError("winning regions do not partition the arena")
    return WinRegion(frozenset(w_eve), frozenset(w_adam), s_eve, s_adam)


def solve_finite_duration(
    arena: ParityArena, stats: dict | None = None, engine: str = "auto"
) -> bool:
    """Does Eve win the finite-duration game from the initial node?

    The play tree branches over all legal moves; a branch ends when a
    loop-detection node (a round key) repeats, and that leaf is Eve-winning
    iff the minimal priority from the first occurrence onward is even.
    Eve's nodes evaluate as OR, Adam's as AND.  Keys already closed on the
    current path are evaluated first, which resolves most branches without
    descent.
    """
    if arena.cls == MULLER:
        raise GameError("finite-duration solving needs polynomial-length plays")
    succ, owner, priority = arena.succ, arena.owner, arena.priority
    is_key = arena.loop_node
    max_rounds = arena.fd_round_bound
    search = _and_or_first_loop_fast if (_HAVE_NUMBA and engine != "python") else _and_or_first_loop
    return search(
        succ,
        [o == EVE for o in owner],
        priority,
        is_key,
        arena.initial,
        max_rounds,
        stats,
    )


def _scc_ids(succ: list[list[int]]) -> list[int]:
    """Strongly connected component id per node (iterative Tarjan)."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    comp = [-1] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0
    cid = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            frame = work[-1]
            v = frame[0]
            if frame[1] == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            ws = succ[v]
            while frame[1] < len(ws):
                w = ws[frame[1]]
                frame[1] += 1
                if index[w] == -1:
                    work.append([w, 0])
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp[u] = cid
                    if u == v:
                        break
                cid += 1
            if work:
                pv = work[-1][0]
                if low[v] < low[pv]:
                    low[pv] = low[v]
    return comp


def _reaches_key_parity(
    succ: list[list[int]], priority: list[int], is_key: list[bool], parity: int
) -> list[bool]:
    """Per node: can it reach (or is it) a loop-detection key of the given
    priority parity?  Backward closure over the edge relation."""
    pred: list[list[int]] = [[] for _ in succ]
    for v, ws in enumerate(succ):
        for w in ws:
            pred[w].append(v)
    flag = [False] * len(succ)
    stack = [v for v in range(len(succ)) if is_key[v] and priority[v] % 2 == parity]
    for v in stack:
        flag[v] = True
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if not flag[u]:
                flag[u] = True
                stack.append(u)
    return flag


def _and_or_first_loop(
    succ: list[list[int]],
    is_or_node: list[bool],
    priority: list[int],
    is_key: list[bool],
    initial: int,
    max_rounds: int,
    stats: dict | None = None,
) -> bool:
    """Path-local AND-OR search shared by the finite-duration semantics.

    Children that close a loop on the current path are evaluated first
    (they are leaves); per node, the child that most recently decided the
    node is tried first on re-expansion.  Both are pure move orderings.

    One static cut: any loop formed below a node lies entirely within the
    node's reachable region (the path segment above it is part of the
    cycle), so when every reachable key has priorities of a single parity
    the subtree's value is that parity's, with no search.
    """
    pos: dict[int, int] = {}
    pri_path: list[int] = []
    killer = [-1] * len(succ)
    rounds_on_path = 0
    opened = 0
    max_path = 0
    stack: list[list] = []

    reach_even = _reaches_key_parity(succ, priority, is_key, 0)
    reach_odd = _reaches_key_parity(succ, priority, is_key, 1)

    # Static guess: an OR node hopes for even loop minima, an AND node for
    # odd ones, so lead with children of the fitting parity.
    def _order(v: int) -> list[int]:
        want_odd = not is_or_node[v]
        return sorted(
            succ[v], key=lambda w: ((priority[w] % 2 == 1) != want_odd, priority[w])
        )

    succ = [_order(v) for v in range(len(succ))]

    def push(v: int) -> bool | None:
        """Extend the path by ``v``; return its value if it resolves from
        uniform-region and already-closing children alone, else leave a
        frame behind."""
        nonlocal rounds_on_path, opened, max_path
        opened += 1
        if not reach_odd[v]:
            return True
        if not reach_even[v]:
            return False
        if is_key[v]:
            rounds_on_path += 1
            if rounds_on_path > max_rounds:
                raise InternalInvariantError(
                    f"finite-duration path exceeded {max_rounds} round keys"
                )
            pos[v] = len(pri_path)
        pri_path.append(priority[v])
        if len(pri_path) > max_path:
            max_path = len(pri_path)
        is_or = is_or_node[v]
        pending: list[int] = []
        value: bool | None = None
        for w in succ[v]:
            if reach_odd[w]:
                if not reach_even[w]:
                    if not is_or:
                        value = False
                        killer[v] = w
                        break
                    continue
            elif is_or:
                value = True
                killer[v] = w
                break
            else:
                continue
            j = pos.get(w)
            if j is not None:
                if (min(pri_path[j:]) % 2 == 0) == is_or:
                    value = is_or
                    killer[v] = w
                    break
            else:
                pending.append(w)
        if value is None and not pending:
            value = not is_or
        if value is not None:
            pop(v)
            return value
        k = killer[v]
        if k >= 0 and k in pending and pending[0] != k:
            pending.remove(k)
            pending.insert(0, k)
        stack.append([v, pending, 0, is_or])
        return None

    def pop(v: int) -> None:
        nonlocal rounds_on_path
        pri_path.pop()
        if is_key[v]:
            del pos[v]
            rounds_on_path -= 1

    result = push(initial)
    while stack:
        frame = stack[-1]
        v, pending, is_or = frame[0], frame[1], frame[3]
        if result is not None:
            if result == is_or:
                killer[v] = pending[frame[2] - 1]
                stack.pop()
                pop(v)
                continue
            result = None
        if frame[2] < len(pending):
            w = pending[frame[2]]
            frame[2] += 1
            result = push(w)
            continue
        result = not is_or
        stack.pop()
        pop(v)
    if stats is not None:
        stats["opened"] = opened
        stats["max_play_states"] = max_path + 1  # path plus the closing repeat
        stats["round_bound"] = max_rounds
    return bool(result)


def _and_or_first_loop_fast(
    succ: list[list[int]],
    is_or_node: list[bool],
    priority: list[int],
    is_key: list[bool],
    initial: int,
    max_rounds: int,
    stats: dict | None = None,
) -> bool:
    """Array translation of ``_and_or_first_loop`` for the jitted kernel;
    identical ordering and semantics."""
    n = len(succ)
    is_or = np.asarray(is_or_node, dtype=np.bool_)
    pri = np.asarray(priority, dtype=np.int64)
    key = np.asarray(is_key, dtype=np.bool_)
    order_even = np.asarray([p % 2 == 1 for p in priority], dtype=np.int64)

    indptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(succ[v])
    data = np.empty(indptr[-1], dtype=np.int64)
    for v in range(n):
        want_odd = 0 if is_or_node[v] else 1
        ordered = sorted(
            succ[v], key=lambda w: ((priority[w] % 2 == 1) != want_odd, priority[w])
        )
        data[indptr[v] : indptr[v + 1]] = ordered
    del order_even

    scc = np.asarray(_scc_ids(succ), dtype=np.int64)
    stats_out = np.zeros(3, dtype=np.int64)
    code = _fd_kernel(
        indptr,
        data,
        is_or,
        pri,
        key,
        scc,
        np.int64(initial),
        np.int64(max_rounds),
        stats_out,
    )
    if code < 0:
        raise InternalInvariantError(
            f"finite-duration path exceeded {max_rounds} round keys"
        )
    if stats is not None:
        stats["opened"] = int(stats_out[0])
        stats["max_play_states"] = int(stats_out[1]) + 1
        stats["round_bound"] = max_rounds
    return bool(code)


@njit(cache=True)
def _fd_kernel(indptr, data, is_or, pri, key, scc, initial, max_rounds, stats_out):  # pragma: no cover
    # Loops never leave a strongly connected component, and a path that
    # crosses into a new component leaves every open key behind for good,
    # so subtree values at cross-component entries are path-free and may
    # be cached exactly.  Everything else is per-path state.
    n = is_or.shape[0]

    # backward closures: can a node reach an even / odd loop key?
    n_edges = data.shape[0]
    pred_cnt = np.zeros(n, dtype=np.int64)
    for e in range(n_edges):
        pred_cnt[data[e]] += 1
    pred_ptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        pred_ptr[v + 1] = pred_ptr[v] + pred_cnt[v]
    pred_fill = pred_ptr[:-1].copy()
    pred_data = np.empty(n_edges, dtype=np.int64)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            w = data[e]
            pred_data[pred_fill[w]] = v
            pred_fill[w] += 1
    reach_even = np.zeros(n, dtype=np.bool_)
    reach_odd = np.zeros(n, dtype=np.bool_)
    work = np.empty(n, dtype=np.int64)
    for parity in range(2):
        flag = reach_even if parity == 0 else reach_odd
        wp = 0
        for v in range(n):
            if key[v] and pri[v] % 2 == parity:
                flag[v] = True
                work[wp] = v
                wp += 1
        while wp > 0:
            wp -= 1
            v = work[wp]
            for e in range(pred_ptr[v], pred_ptr[v + 1]):
                u = pred_data[e]
                if not flag[u]:
                    flag[u] = True
                    work[wp] = u
                    wp += 1

    depth_cap = 4 * (max_rounds + 2) + 8
    pos = np.full(n, -1, dtype=np.int64)
    killer = np.full(n, -1, dtype=np.int64)
    cache = np.full(n, -1, dtype=np.int8)  # path-free values at SCC entries
    trail = np.empty(depth_cap, dtype=np.int64)
    fv = np.empty(depth_cap, dtype=np.int64)
    fcur = np.empty(depth_cap, dtype=np.int64)
    fphase = np.empty(depth_cap, dtype=np.int8)
    fkiller = np.empty(depth_cap, dtype=np.int64)
    flast = np.empty(depth_cap, dtype=np.int64)
    fstore = np.empty(depth_cap, dtype=np.int8)
    sp = 0
    rounds = 0
    opened = 0
    maxsp = 0
    top = -1
    result = -1
    v = initial
    store_next = 1  # the root's value is itself path-free

    while True:
        # push v
        opened += 1
        storing = store_next
        store_next = 0
        if not reach_odd[v]:
            result = 1
        elif not reach_even[v]:
            result = 0
        else:
            if key[v]:
                rounds += 1
                if rounds > max_rounds:
                    return -1
                pos[v] = sp
            trail[sp] = pri[v]
            sp += 1
            if sp > maxsp:
                maxsp = sp
            mine = is_or[v]
            decided = False
            any_pending = False
            for e in range(indptr[v], indptr[v + 1]):
                w = data[e]
                if not reach_odd[w]:
                    if mine:
                        result = 1
                        killer[v] = w
                        decided = True
                        break
                elif not reach_even[w]:
                    if not mine:
                        result = 0
                        killer[v] = w
                        decided = True
                        break
                elif scc[w] != scc[v] and cache[w] >= 0:
                    if (cache[w] == 1) == mine:
                        result = cache[w]
                        killer[v] = w
                        decided = True
                        break
                else:
                    p = pos[w]
                    if p >= 0:
                        m = trail[p]
                        for t in range(p + 1, sp):
                            if trail[t] < m:
                                m = trail[t]
                        if ((m % 2) == 0) == mine:
                            result = 1 if mine else 0
                            killer[v] = w
                            decided = True
                            break
                    else:
                        any_pending = True
            if not decided and not any_pending:
                result = 0 if mine else 1
                decided = True
            if decided:
                sp -= 1
                if key[v]:
                    pos[v] = -1
                    rounds -= 1
                if storing == 1:
                    cache[v] = result
            else:
                top += 1
                fv[top] = v
                fcur[top] = indptr[v]
                k = killer[v]
                fphase[top] = 0 if k >= 0 else 1
                fkiller[top] = k
                flast[top] = -1
                fstore[top] = storing
                result = -1

        # deliver results / pick the next child to push
        descend = False
        while not descend:
            if result >= 0:
                if top < 0:
                    stats_out[0] = opened
                    stats_out[1] = maxsp
                    return result
                u = fv[top]
                mine_u = is_or[u]
                if (result == 1) == mine_u:
                    killer[u] = flast[top]
                    sp -= 1
                    if key[u]:
                        pos[u] = -1
                        rounds -= 1
                    if fstore[top] == 1:
                        cache[u] = result
                    top -= 1
                    continue  # propagate upward
                result = -1
            # advance the top frame to its next open child; a child whose
            # cached cross-component value decides ends the frame here
            u = fv[top]
            mine_u = is_or[u]
            nxt = np.int64(-1)
            settled = False
            if fphase[top] == 0:
                fphase[top] = 1
                w = fkiller[top]
                if w >= 0 and pos[w] < 0 and reach_odd[w] and reach_even[w]:
                    if scc[w] != scc[u] and cache[w] >= 0:
                        if (cache[w] == 1) == mine_u:
                            result = cache[w]
                            killer[u] = w
                            settled = True
                    else:
                        nxt = w
            if not settled and nxt < 0:
                while fcur[top] < indptr[u + 1]:
                    w = data[fcur[top]]
                    fcur[top] += 1
                    if w == fkiller[top] or pos[w] >= 0:
                        continue
                    if not (reach_odd[w] and reach_even[w]):
                        continue
                    if scc[w] != scc[u] and cache[w] >= 0:
                        if (cache[w] == 1) == mine_u:
                            result = cache[w]
                            killer[u] = w
                            settled = True
                            break
                        continue
                    nxt = w
                    break
            if not settled and nxt >= 0:
                flast[top] = nxt
                if scc[nxt] != scc[u]:
                    store_next = 1
                v = nxt
                descend = True
                continue
            if not settled:
                result = 0 if mine_u else 1
            sp -= 1
            if key[u]:
                pos[u] = -1
                rounds -= 1
            if fstore[top] == 1:
                cache[u] = result
            top -= 1
            if top < 0:
                stats_out[0] = opened
                stats_out[1] = maxsp
                return result
