"""End-to-end decision procedure and witness machinery.

A positional Eve strategy on the compiled arena induces a finite-memory
strategy for Agent 0: the memory is the current layer-A arena node, the
output is the Agent-0 component of Eve's opening move, and the memory
update replays one dialogue round with both of Adam's moves bound to the
environment profile actually observed.

``check_solution`` certifies a candidate Agent-0 strategy against the
equilibrium characterization: it is a solution iff every compatible play
either wins for Agent 0 or admits a good deviation point, i.e. a prefix
after which some losing environment agent can swap its last action and
then win against every counter-coalition (Agent 0 staying on strategy).
Deviation points are decided exactly by zero-sum solves on the product of
the game with the strategy's memory.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from .arena import LAYER_A
from .game import (
    BUCHI,
    COBUCHI,
    MULLER,
    PARITY,
    REACH,
    SAFE,
    GameError,
    GameStructure,
    History,
    LassoPlay,
    ObjectiveProfile,
    eval_objective,
    validate_game,
)
from .reductions import (
    ADAM,
    EVE,
    AugState,
    ParityArena,
    build_parity_arena,
    lar_initial,
    lar_step,
)
from .solvers import WinRegion, _attract, solve_finite_duration, zielonka_solve

log = logging.getLogger(__name__)

NO_ACTION = None  # deviator's "no deviating action exists"


class SolverDisagreement(RuntimeError):
    """The two independent decision procedures returned different answers."""


@dataclass(frozen=True)
class EveStrategy:
    """Positional strategy on the compiled arena, defined on every
    Eve-owned node of her winning region."""

    arena: ParityArena
    choice: Mapping[int, int]
    region: frozenset[int]

    @classmethod
    def from_win_region(cls, arena: ParityArena, win: WinRegion) -> "EveStrategy":
        return cls(arena, dict(win.eve_strategy), win.eve_nodes)


@dataclass(frozen=True)
class ArenaHistory:
    """Arena history as visited node ids plus the moves between them."""

    ids: tuple[int, ...]
    moves: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.moves) + 1:
            raise GameError("arena history must have one more node than moves")


def lift_history(sigma_e: EveStrategy, h: History) -> ArenaHistory:
    """Lift a game history compatible with the induced Agent-0 strategy to
    the arena: Eve's moves come from the strategy, both Adam moves replay
    the observed environment profile."""
    arena = sigma_e.arena
    g = arena.game
    h.validate(g)
    cur = arena.initial
    ids: list[int] = [cur]
    moves: list[tuple] = []
    for k, prof in enumerate(h.profiles):
        t_b = sigma_e.choice.get(cur)
        if t_b is None:
            raise GameError("history leaves the strategy's domain")
        a_move = arena.nodes[t_b].base.a
        if a_move[0] != prof[0]:
            raise GameError(
                f"history incompatible with the strategy at round {k}: "
                f"plays {prof[0]!r}, strategy says {a_move[0]!r}"
            )
        env = tuple(prof[1:])
        t_c = arena.step(t_b, env)
        t_d = sigma_e.choice.get(t_c)
        if t_d is None:
            raise GameError("history leaves the strategy's domain")
        c_move = arena.nodes[t_d].base.c
        t_a = arena.step(t_d, env)
        ids += [t_b, t_c, t_d, t_a]
        moves += [a_move, env, c_move, env]
        cur = t_a
    return ArenaHistory(tuple(ids), tuple(moves))


def project_history(arena: ParityArena, tilde: ArenaHistory) -> History:
    """Collapse each arena round to the game step it realizes: Agent 0's
    opening action joined with Adam's resolving profile."""
    nodes = arena.nodes
    if len(tilde.ids) % 4 != 1:
        raise GameError("arena history does not end on a layer-A state")
    states = [nodes[tilde.ids[0]].base.s]
    profiles = []
    for k in range(0, len(tilde.moves), 4):
        a_move = tilde.moves[k]
        d_move = tilde.moves[k + 3]
        profiles.append((a_move[0],) + tuple(d_move))
        states.append(nodes[tilde.ids[k + 4]].base.s)
    return History(tuple(states), tuple(profiles))


# ---------------------------------------------------------------------------
# Finite-memory Agent-0 strategies


@dataclass
class Sigma0:
    """Finite-memory Agent-0 strategy: per memory node an output action
    and, per observed environment profile, a successor memory node."""

    initial: Hashable
    output: dict[Hashable, str]
    delta: dict[tuple[Hashable, tuple], Hashable]
    state_of: dict[Hashable, str]
    env_profiles: tuple[tuple, ...]

    @classmethod
    def from_eve_strategy(cls, sigma_e: EveStrategy) -> "Sigma0":
        arena = sigma_e.arena
        g = arena.game
        env_list = tuple(g.env_profiles())
        init = arena.initial
        if init not in sigma_e.region:
            raise GameError("unrealizable: Eve does not win from the initial node")
        output: dict[Hashable, str] = {}
        delta: dict[tuple[Hashable, tuple], Hashable] = {}
        state_of: dict[Hashable, str] = {}
        frontier = [init]
        seen = {init}
        while frontier:
            m = frontier.pop()
            t_b = sigma_e.choice[m]
            output[m] = arena.nodes[t_b].base.a[0]
            state_of[m] = arena.nodes[m].base.s
            for env in env_list:
                t_c = arena.step(t_b, env)
                t_d = sigma_e.choice[t_c]
                m2 = arena.step(t_d, env)
                delta[(m, env)] = m2
                if m2 not in seen:
                    seen.add(m2)
                    frontier.append(m2)
        return cls(init, output, delta, state_of, env_list)

    @classmethod
    def memoryless(cls, g: GameStructure, mapping: Mapping[str, str]) -> "Sigma0":
        for s in g.states:
            if mapping.get(s) not in g.action_sets[0]:
                raise GameError(f"memoryless strategy undefined or illegal at {s!r}")
        env_list = tuple(g.env_profiles())
        output = {s: mapping[s] for s in g.states}
        state_of = {s: s for s in g.states}
        delta = {
            (s, env): g.table[(s, (mapping[s],) + env)]
            for s in g.states
            for env in env_list
        }
        return cls(g.initial, output, delta, state_of, env_list)

    def memory_nodes(self) -> list[Hashable]:
        """Reachable memory nodes in a deterministic BFS order."""
        order = [self.initial]
        seen = {self.initial}
        i = 0
        while i < len(order):
            m = order[i]
            i += 1
            for env in self.env_profiles:
                m2 = self.delta[(m, env)]
                if m2 not in seen:
                    seen.add(m2)
                    order.append(m2)
        return order

    def memory_after(self, h: History) -> Hashable:
        """Replay a history; raises if it is not compatible."""
        m = self.initial
        if self.state_of[m] != h.states[0]:
            raise GameError("history does not start at the initial state")
        for k, prof in enumerate(h.profiles):
            if prof[0] != self.output[m]:
                raise GameError(f"history incompatible with the strategy at round {k}")
            m = self.delta[(m, tuple(prof[1:]))]
            if self.state_of[m] != h.states[k + 1]:
                raise GameError(f"history state mismatch at round {k}")
        return m

    def action_after(self, h: History) -> str:
        return self.output[self.memory_after(h)]


def derive_sigma0(sigma_e: EveStrategy) -> Sigma0:
    """Agent-0 strategy induced by a winning Eve strategy: its output on a
    compatible history is Eve's Agent-0 component on the lifted history."""
    return Sigma0.from_eve_strategy(sigma_e)


# ---------------------------------------------------------------------------
# Deviation certificates


def _turn_based_surewin(
    positions: list[Hashable],
    moves_of: Callable[[Hashable], list],
    step: Callable[[Hashable, object, tuple], Hashable],
    coalition_moves: list[tuple],
    priority_of: Callable[[Hashable], int],
    mid_priority: int,
) -> set[Hashable]:
    """Positions from which the mover surely wins the parity condition
    (min recurring priority even) when it commits its action first and the
    coalition answers.  Solved by the recursive parity solver on the
    explicit two-layer expansion."""
    index: dict[tuple, int] = {}
    nodes: list[tuple] = []
    owner: list[int] = []
    priority: list[int] = []
    succ: list[list[int]] = []

    def intern(key: tuple, own: int, pr: int) -> int:
        j = index.get(key)
        if j is None:
            j = len(nodes)
            index[key] = j
            nodes.append(key)
            owner.append(own)
            priority.append(pr)
            succ.append([])
        return j

    for p in positions:
        intern(("pos", p), EVE, priority_of(p))
    i = 0
    while i < len(nodes):
        key = nodes[i]
        if key[0] == "pos":
            p = key[1]
            out = []
            for a in moves_of(p):
                out.append(intern(("mid", p, a), ADAM, mid_priority))
            succ[i] = out
        else:
            _, p, a = key
            out = []
            seen: set[int] = set()
            for cm in coalition_moves:
                j = index[("pos", step(p, a, cm))]
                if j not in seen:
                    seen.add(j)
                    out.append(j)
            succ[i] = out
        i += 1

    arena = ParityArena.generic(owner, priority, succ)
    win = zielonka_solve(arena)
    return {nodes[v][1] for v in win.eve_nodes if nodes[v][0] == "pos"}


class _DeviationOracle:
    """Per-agent sure-win analysis over the product of the game with a
    candidate strategy's memory."""

    def __init__(self, g: GameStructure, objs: ObjectiveProfile, sigma0: Sigma0):
        self.g = g
        self.objs = objs
        self.sigma0 = sigma0
        self.mems = sigma0.memory_nodes()
        self.cls = objs.class_tag
        self._surewin: dict[int, set[Hashable]] = {}

    def _coalition_moves(self, i: int) -> list[tuple]:
        g = self.g
        return list(
            itertools.product(*[g.action_sets[j] for j in g.env_agents if j != i])
        )

    def _compose(self, i: int, a: str, cm: tuple) -> tuple:
        """Full environment profile with agent i playing ``a`` and the
        coalition playing ``cm`` (in agent order)."""
        env = []
        k = 0
        for j in self.g.env_agents:
            if j == i:
                env.append(a)
            else:
                env.append(cm[k])
                k += 1
        return tuple(env)

    def surewin(self, i: int) -> set[Hashable]:
        """Memory nodes from which agent i surely achieves its objective
        against every coalition, Agent 0 locked to the strategy."""
        cached = self._surewin.get(i)
        if cached is not None:
            return cached
        g, objs, sigma0 = self.g, self.objs, self.sigma0
        cls = self.cls
        coalition = self._coalition_moves(i)
        acts = list(g.action_sets[i])

        if cls == MULLER:
            rec0 = lar_initial(g)
            n_states = len(g.states)
            formula = objs[i].formula

            def moves_of(p):
                return acts

            def step(p, a, cm):
                m, rec = p
                m2 = sigma0.delta[(m, self._compose(i, a, cm))]
                return (m2, lar_step(rec[0], rec[1], sigma0.state_of[m2]))

            def priority_of(p):
                _, (perm, hpos) = p
                tail = frozenset(perm[hpos:])
                return 2 * hpos if formula.holds(tail) else 2 * hpos + 1

            positions: list[Hashable] = []
            seen = set()
            frontier = [(m, rec0) for m in self.mems]
            seen.update(frontier)
            positions.extend(frontier)
            k = 0
            while k < len(positions):
                p = positions[k]
                k += 1
                for a in acts:
                    for cm in coalition:
                        p2 = step(p, a, cm)
                        if p2 not in seen:
                            seen.add(p2)
                            positions.append(p2)
            won = _turn_based_surewin(
                positions, moves_of, step, coalition, priority_of, 2 * n_states + 2
            )
            result = {m for m in self.mems if (m, rec0) in won}
        else:
            targets = objs[i].targets if cls in (REACH, BUCHI, COBUCHI) else None

            def step(m, a, cm):
                return sigma0.delta[(m, self._compose(i, a, cm))]

            if cls in (REACH, SAFE):
                result = self._reach_safe_surewin(i, step, coalition, acts)
            else:
                if cls == BUCHI:
                    def priority_of(m):
                        return 0 if sigma0.state_of[m] in targets else 1

                    mid = 1
                else:  # co-Buchi: recurring targets lose
                    def priority_of(m):
                        return 1 if sigma0.state_of[m] in targets else 2

                    mid = 2
                result = _turn_based_surewin(
                    self.mems, lambda m: acts, step, coalition, priority_of, mid
                )
        self._surewin[i] = result
        return result

    def _reach_safe_surewin(self, i, step, coalition, acts) -> set[Hashable]:
        """Attractor analysis on the two-layer expansion: reach solves the
        mover's attractor to its target states; safety is the complement
        of the coalition's attractor to the unsafe ones."""
        g, objs, sigma0 = self.g, self.objs, self.sigma0
        cls = self.cls
        index: dict[tuple, int] = {}
        nodes: list[tuple] = []
        owner: list[int] = []
        succ: list[list[int]] = []
        for m in self.mems:
            index[("pos", m)] = len(nodes)
            nodes.append(("pos", m))
            owner.append(EVE)
            succ.append([])
        k = 0
        while k < len(nodes):
            key = nodes[k]
            if key[0] == "pos":
                out = []
                for a in acts:
                    mid_key = ("mid", key[1], a)
                    j = index.get(mid_key)
                    if j is None:
                        j = len(nodes)
                        index[mid_key] = j
                        nodes.append(mid_key)
                        owner.append(ADAM)
                        succ.append([])
                    out.append(j)
                succ[k] = out
            else:
                _, m, a = key
                out = []
                seen: set[int] = set()
                for cm in coalition:
                    j = index[("pos", step(m, a, cm))]
                    if j not in seen:
                        seen.add(j)
                        out.append(j)
                succ[k] = out
            k += 1
        arena = ParityArena.generic(owner, [0] * len(nodes), succ)
        if cls == REACH:
            goal = {
                v
                for v, key in enumerate(nodes)
                if sigma0.state_of[key[1]] in objs[i].targets
            }
            attr, _ = _attract(arena, EVE, goal, set(range(len(nodes))))
            won = attr
        else:
            unsafe = {
                v
                for v, key in enumerate(nodes)
                if sigma0.state_of[key[1]] not in objs[i].safe
            }
            trapped, _ = _attract(arena, ADAM, unsafe, set(range(len(nodes))))
            won = set(range(len(nodes))) - trapped
        return {key[1] for v, key in enumerate(nodes) if v in won and key[0] == "pos"}

    def deviation_action(
        self, m_prev: Hashable, env: tuple, i: int, prefix_hit: bool
    ) -> str | None:
        """A swap of agent i's action in the step (m_prev, env) that makes
        the resulting position surely winning for i, if one exists.
        ``prefix_hit``: for reach, the target was already visited (any swap
        certifies); for safety, an unsafe state was already visited (no
        swap can help)."""
        g, sigma0 = self.g, self.sigma0
        cls = self.cls
        if cls == REACH and prefix_hit:
            return g.action_sets[i][0]
        if cls == SAFE and prefix_hit:
            return None
        win = self.surewin(i)
        pos = i - 1
        for a in g.action_sets[i]:
            env2 = env[:pos] + (a,) + env[pos + 1 :]
            if sigma0.delta[(m_prev, env2)] in win:
                return a
        return None


def deviator(
    g: GameStructure,
    objs: ObjectiveProfile,
    sigma0: Sigma0,
    h: History,
    i: int,
) -> str | None:
    """Action by which the last step of ``h`` is a good deviation point
    for environment agent i, or None when there is none."""
    if i <= 0 or i >= g.n_agents:
        raise GameError(f"agent {i} is not an environment agent")
    if h.rounds == 0:
        return None
    h.validate(g)
    m_prev = sigma0.memory_after(h.prefix(h.rounds - 1))
    env = tuple(h.profiles[-1][1:])
    oracle = _DeviationOracle(g, objs, sigma0)
    prefix_hit = False
    if objs.class_tag == REACH:
        prefix_hit = any(s in objs[i].targets for s in h.states[:-1])
    elif objs.class_tag == SAFE:
        prefix_hit = any(s not in objs[i].safe for s in h.states[:-1])
    return oracle.deviation_action(m_prev, env, i, prefix_hit)


def root(
    g: GameStructure,
    objs: ObjectiveProfile,
    sigma0: Sigma0,
    h: History,
    i: int,
) -> History | None:
    """Shortest prefix of ``h`` that is a good deviation point for agent i."""
    if i <= 0 or i >= g.n_agents:
        raise GameError(f"agent {i} is not an environment agent")
    h.validate(g)
    oracle = _DeviationOracle(g, objs, sigma0)
    cls = objs.class_tag
    prefix_hit = False
    for k in range(1, h.rounds + 1):
        hk = h.prefix(k)
        if cls == REACH:
            prefix_hit = prefix_hit or h.states[k - 1] in objs[i].targets
        elif cls == SAFE:
            prefix_hit = prefix_hit or h.states[k - 1] not in objs[i].safe
        m_prev = sigma0.memory_after(h.prefix(k - 1))
        env = tuple(h.profiles[k - 1][1:])
        if oracle.deviation_action(m_prev, env, i, prefix_hit) is not None:
            return hk
    return None


# ---------------------------------------------------------------------------
# Solution checking


@dataclass(frozen=True)
class Counterexample:
    """A compatible lasso losing for Agent 0 on which no losing
    environment agent has a good deviation point."""

    lasso: LassoPlay
    payoffs: tuple[int, ...]
    undeviating: tuple[int, ...]


@dataclass(frozen=True)
class CheckReport:
    verdict: str  # "valid" | "invalid"
    counterexample: Counterexample | None = None

    @property
    def is_valid(self) -> bool:
        return self.verdict == "valid"


def _tarjan_sccs(vertices: list, edges: Mapping) -> list[list]:
    """Iterative Tarjan; edges maps vertex -> iterable of successors."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    sccs: list[list] = []
    counter = 0
    for root_v in vertices:
        if root_v in index:
            continue
        work = [(root_v, iter(edges.get(root_v, ())))]
        index[root_v] = low[root_v] = counter
        counter += 1
        stack.append(root_v)
        on_stack.add(root_v)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def check_solution(
    g: GameStructure, objs: ObjectiveProfile, sigma0: Sigma0
) -> CheckReport:
    """Exact verdict over every play of the product of the game with the
    strategy's memory, environment moves unrestricted.

    For each candidate set B of losing-and-undeviating environment agents,
    all steps that would be good deviation points for some member of B are
    removed and the remaining graph is searched for a lasso realizing the
    payoff pattern (Agent 0 loses, B loses, everyone else wins).  Visited-
    set objectives carry monotone hit bits in the product node, so payoffs
    and deviation prefixes are edge-local and the search is exact.
    """
    objs.check_against(g)
    cls = objs.class_tag
    oracle = _DeviationOracle(g, objs, sigma0)
    mems = oracle.mems
    env_list = list(g.env_profiles())
    env_agents = list(g.env_agents)
    n = g.n_agents

    surewin = {i: oracle.surewin(i) for i in env_agents}

    def hit(i: int, s: str) -> bool:
        # monotone "objective already decided by a visit" bit
        if cls == REACH:
            return s in objs[i].targets
        return s not in objs[i].safe

    use_bits = cls in (REACH, SAFE)
    if use_bits:
        def bits_of(prev: int, s: str) -> int:
            out = prev
            for i in range(n):
                if not (out >> i) & 1 and hit(i, s):
                    out |= 1 << i
            return out

        root_node = (sigma0.initial, bits_of(0, sigma0.state_of[sigma0.initial]))
    else:
        root_node = sigma0.initial

    # Product edges with per-environment-agent deviation marks.
    succ_of: dict = {}
    dev_mark: dict = {}

    def expand(u) -> list:
        cached = succ_of.get(u)
        if cached is not None:
            return cached
        m = u[0] if use_bits else u
        out = []
        for env in env_list:
            m2 = sigma0.delta[(m, env)]
            if use_bits:
                u2 = (m2, bits_of(u[1], sigma0.state_of[m2]))
            else:
                u2 = m2
            devs = 0
            for i in env_agents:
                if cls == REACH:
                    prefix_hit = bool((u[1] >> i) & 1)
                elif cls == SAFE:
                    prefix_hit = bool((u[1] >> i) & 1)
                else:
                    prefix_hit = False
                a = oracle.deviation_action(m, env, i, prefix_hit)
                if a is not None:
                    devs |= 1 << i
            out.append((env, u2, devs))
        succ_of[u] = out
        return out

    # Materialize the reachable product once.
    all_nodes = [root_node]
    seen = {root_node}
    qi = 0
    while qi < len(all_nodes):
        u = all_nodes[qi]
        qi += 1
        for _, u2, _ in expand(u):
            if u2 not in seen:
                seen.add(u2)
                all_nodes.append(u2)

    def state_of_node(u) -> str:
        return sigma0.state_of[u[0] if use_bits else u]

    def find_pattern(b_mask: int, b_set: tuple[int, ...]) -> Counterexample | None:
        # graph restricted to steps that are not deviation points for B
        def edges_b(u):
            return [(env, u2) for env, u2, devs in expand(u) if not devs & b_mask]

        # reachable part under the restriction
        reach: list = []
        seen_b = {root_node}
        stack = [root_node]
        while stack:
            u = stack.pop()
            reach.append(u)
            for _, u2 in edges_b(u):
                if u2 not in seen_b:
                    seen_b.add(u2)
                    stack.append(u2)
        adj = {u: [u2 for _, u2 in edges_b(u)] for u in reach}

        if use_bits:
            want = 0
            if cls == SAFE:
                want |= 1  # Agent 0 strayed unsafe
                for i in b_set:
                    want |= 1 << i
            else:  # reach: losers keep their bit clear
                for i in env_agents:
                    if i not in b_set:
                        want |= 1 << i
            for comp in _tarjan_sccs(reach, adj):
                if len(comp) == 1 and comp[0] not in adj[comp[0]]:
                    continue
                for u in comp:
                    if u[1] == want:
                        return _build_counterexample(u, comp, edges_b, b_set)
            return None

        # recurring-set objectives: enumerate candidate recurring state sets
        def pattern_ok(inf_states: frozenset[str]) -> bool:
            occ = inf_states  # transient states irrelevant for these classes
            if objs[0].satisfied(occ, inf_states):
                return False
            for i in env_agents:
                sat = objs[i].satisfied(occ, inf_states)
                if (i in b_set) == sat:
                    return False
            return True

        for size in range(1, len(g.states) + 1):
            for combo in itertools.combinations(g.states, size):
                inf_states = frozenset(combo)
                if not pattern_ok(inf_states):
                    continue
                sub = [u for u in reach if state_of_node(u) in inf_states]
                sub_set = set(sub)
                sub_adj = {u: [w for w in adj[u] if w in sub_set] for u in sub}
                for comp in _tarjan_sccs(sub, sub_adj):
                    if len(comp) == 1 and comp[0] not in sub_adj[comp[0]]:
                        continue
                    if frozenset(state_of_node(u) for u in comp) == inf_states:
                        return _build_counterexample(comp[0], comp, edges_b, b_set)
        return None

    def _build_counterexample(entry, comp, edges_b, b_set):
        comp_set = set(comp)

        def bfs_steps(src, dst, allowed):
            """Edge steps (node, env) realizing a shortest src->dst path
            inside ``allowed``; empty when src == dst."""
            if src == dst:
                return []
            parent = {src: None}
            queue = [src]
            k2 = 0
            while k2 < len(queue) and dst not in parent:
                u = queue[k2]
                k2 += 1
                for env, u2 in edges_b(u):
                    if (allowed is None or u2 in allowed) and u2 not in parent:
                        parent[u2] = (u, env)
                        queue.append(u2)
            seg = []
            cur = dst
            while parent[cur] is not None:
                pu, env = parent[cur]
                seg.append((pu, env))
                cur = pu
            seg.reverse()
            return seg

        path = bfs_steps(root_node, entry, None)
        # loop: closed walk through the component covering all of it
        stops = [entry] + [u for u in comp if u != entry]
        loop_steps = []
        cur = entry
        for nxt in stops[1:] + [entry]:
            loop_steps.extend(bfs_steps(cur, nxt, comp_set))
            cur = nxt
        if not loop_steps:  # single node: take its self-loop edge
            for env, u2 in edges_b(entry):
                if u2 == entry:
                    loop_steps = [(entry, env)]
                    break

        def to_step(u, env):
            m = u[0] if use_bits else u
            return (sigma0.state_of[m], (sigma0.output[m],) + tuple(env))

        prefix = tuple(to_step(u, env) for u, env in path)
        loop = tuple(to_step(u, env) for u, env in loop_steps)
        lasso = LassoPlay(prefix, loop)
        lasso.validate(g)
        pay = tuple(
            int(objs[i].satisfied(lasso.occ_states, lasso.inf_states))
            for i in range(n)
        )
        return Counterexample(lasso, pay, b_set)

    for r_size in range(0, len(env_agents) + 1):
        for b_combo in itertools.combinations(env_agents, r_size):
            b_mask = 0
            for i in b_combo:
                b_mask |= 1 << i
            found = find_pattern(b_mask, b_combo)
            if found is not None:
                return CheckReport("invalid", found)
    return CheckReport("valid")


# ---------------------------------------------------------------------------
# Top-level decision procedure


def ncrsp_solve(
    g: GameStructure,
    objs: ObjectiveProfile,
    solver: str = "parity",
    want_witness: bool = True,
) -> tuple[bool, Sigma0 | None]:
    """Decide whether Agent 0 has a strategy making every stable outcome
    win for it; on YES, return the witness induced by the extracted Eve
    strategy."""
    defects = validate_game(g)
    if defects:
        raise GameError("; ".join(map(str, defects)))
    objs.check_against(g)
    profile = objs.as_muller(g.states) if objs.class_tag == PARITY else objs
    arena = build_parity_arena(g, profile)

    win: WinRegion | None = None
    if solver == "finite":
        answer = solve_finite_duration(arena)
    elif solver == "parity":
        win = zielonka_solve(arena)
        answer = arena.initial in win.eve_nodes
    elif solver == "both":
        win = zielonka_solve(arena)
        a_parity = arena.initial in win.eve_nodes
        a_finite = solve_finite_duration(arena)
        if a_parity != a_finite:
            raise SolverDisagreement(
                f"parity says {a_parity}, finite-duration says {a_finite}"
            )
        answer = a_parity
    else:
        raise GameError(f"unknown solver {solver!r}")

    witness: Sigma0 | None = None
    if answer and want_witness:
        if win is None:
            win = zielonka_solve(arena)
        witness = derive_sigma0(EveStrategy.from_win_region(arena, win))
    return answer, witness


def memoryless_candidates(g: GameStructure) -> Iterable[Sigma0]:
    """All state-based Agent-0 strategies, in deterministic order."""
    for actions in itertools.product(g.action_sets[0], repeat=len(g.states)):
        yield Sigma0.memoryless(g, dict(zip(g.states, actions)))


def simplify_witness(
    g: GameStructure,
    objs: ObjectiveProfile,
    fallback: Sigma0,
    limit: int = 512,
) -> Sigma0:
    """Prefer a state-based witness when one exists: try every memoryless
    candidate (bounded), certify with the checker, else keep the given
    machine."""
    count = len(g.action_sets[0]) ** len(g.states)
    if count <= limit:
        for cand in memoryless_candidates(g):
            if check_solution(g, objs, cand).is_valid:
                return cand
    return fallback
