"""Concurrent game structures, plays, and omega-regular objectives.

A game structure is a complete, deterministic multi-agent arena: at every
state all agents pick actions simultaneously and the joint profile selects
the unique successor.  Agent 0 is the protagonist whose strategy is
synthesized; agents 1..n form the environment.

Plays are represented as lassos (finite prefix plus nonempty loop), which
is exact for every finite-memory interaction in a finite arena and lets
all six objective classes be evaluated from the visited-state sets alone.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .formulas import Atom, Formula, Not, big_and, big_or, any_of, none_of

Profile = tuple[str, ...]

REACH = "reach"
SAFE = "safe"
BUCHI = "buchi"
COBUCHI = "cobuchi"
PARITY = "parity"
MULLER = "muller"

OBJECTIVE_CLASSES = (REACH, SAFE, BUCHI, COBUCHI, PARITY, MULLER)


class GameError(ValueError):
    """Malformed input: unknown state, bad profile, mixed classes, ..."""


@dataclass(frozen=True)
class Defect:
    """One validation finding; data, not a failure."""

    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True, eq=False)
class GameStructure:
    """Finite concurrent game: states, initial state, per-agent actions,
    and a total deterministic transition table keyed by (state, profile)."""

    states: tuple[str, ...]
    initial: str
    action_sets: tuple[tuple[str, ...], ...]
    table: Mapping[tuple[str, Profile], str]

    @property
    def n_agents(self) -> int:
        return len(self.action_sets)

    @property
    def env_agents(self) -> range:
        """Environment agent indices 1..n."""
        return range(1, self.n_agents)

    def profiles(self) -> Iterator[Profile]:
        return itertools.product(*self.action_sets)

    def env_profiles(self) -> Iterator[tuple[str, ...]]:
        """Joint actions of agents 1..n, in declaration order."""
        return itertools.product(*self.action_sets[1:])


def successor(g: GameStructure, s: str, p: Profile) -> str:
    """Look up the transition table; unknown state or malformed profile is
    an input error."""
    if s not in g.states:
        raise GameError(f"unknown state {s!r}")
    if len(p) != g.n_agents or any(
        p[i] not in g.action_sets[i] for i in range(g.n_agents)
    ):
        raise GameError(f"malformed action profile {p!r}")
    return g.table[(s, p)]


def validate_game(g: GameStructure) -> list[Defect]:
    """Check totality, determinism (structural), and closure.  Returns the
    list of defects; an empty list means the game is well formed."""
    defects: list[Defect] = []
    state_set = set(g.states)
    if len(state_set) != len(g.states):
        defects.append(Defect("duplicate-state", "state declared twice"))
    if g.initial not in state_set:
        defects.append(Defect("bad-initial", f"initial state {g.initial!r} not declared"))
    for i, acts in enumerate(g.action_sets):
        if not acts:
            defects.append(Defect("empty-actions", f"agent {i} has no actions"))
        if len(set(acts)) != len(acts):
            defects.append(Defect("duplicate-action", f"agent {i} action declared twice"))
    if any(d.kind == "empty-actions" for d in defects):
        return defects

    all_profiles = list(g.profiles())
    for s in g.states:
        for p in all_profiles:
            key = (s, p)
            if key not in g.table:
                defects.append(Defect("missing-transition", f"no entry for ({s}, {p})"))
            elif g.table[key] not in state_set:
                defects.append(
                    Defect("dangling-successor", f"({s}, {p}) -> {g.table[key]!r} undeclared")
                )
    known = {(s, p) for s in g.states for p in all_profiles}
    for key in g.table:
        if key not in known:
            defects.append(Defect("unknown-entry", f"table entry {key} outside the game"))
    return defects


# ---------------------------------------------------------------------------
# Objectives


@dataclass(frozen=True)
class Objective:
    """Winning condition for one agent, decided by the pair
    (occ, inf) = (states visited, states visited infinitely often)."""

    @property
    def class_tag(self) -> str:
        raise NotImplementedError

    def satisfied(self, occ: frozenset[str], inf: frozenset[str]) -> bool:
        raise NotImplementedError

    def referenced_states(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Reach(Objective):
    targets: frozenset[str]

    @property
    def class_tag(self) -> str:
        return REACH

    def satisfied(self, occ, inf) -> bool:
        return bool(occ & self.targets)

    def referenced_states(self) -> frozenset[str]:
        return self.targets


@dataclass(frozen=True)
class Safe(Objective):
    safe: frozenset[str]

    @property
    def class_tag(self) -> str:
        return SAFE

    def satisfied(self, occ, inf) -> bool:
        return occ <= self.safe

    def referenced_states(self) -> frozenset[str]:
        return self.safe


@dataclass(frozen=True)
class Buchi(Objective):
    targets: frozenset[str]

    @property
    def class_tag(self) -> str:
        return BUCHI

    def satisfied(self, occ, inf) -> bool:
        return bool(inf & self.targets)

    def referenced_states(self) -> frozenset[str]:
        return self.targets


@dataclass(frozen=True)
class CoBuchi(Objective):
    targets: frozenset[str]

    @property
    def class_tag(self) -> str:
        return COBUCHI

    def satisfied(self, occ, inf) -> bool:
        return not (inf & self.targets)

    def referenced_states(self) -> frozenset[str]:
        return self.targets


@dataclass(frozen=True, eq=False)
class Parity(Objective):
    priorities: Mapping[str, int]

    @property
    def class_tag(self) -> str:
        return PARITY

    def satisfied(self, occ, inf) -> bool:
        return min(self.priorities[s] for s in inf) % 2 == 0

    def referenced_states(self) -> frozenset[str]:
        return frozenset(self.priorities)


@dataclass(frozen=True)
class Muller(Objective):
    formula: Formula

    @property
    def class_tag(self) -> str:
        return MULLER

    def satisfied(self, occ, inf) -> bool:
        return self.formula.holds(inf)

    def referenced_states(self) -> frozenset[str]:
        return self.formula.atoms()


def to_muller(obj: Objective, states: tuple[str, ...]) -> Muller:
    """Encode a limit-determined objective as a Muller formula over the
    recurring-state set.  Reach/Safe depend on transient visits and have no
    such encoding."""
    if isinstance(obj, Muller):
        return obj
    if isinstance(obj, Buchi):
        return Muller(any_of(obj.targets))
    if isinstance(obj, CoBuchi):
        return Muller(none_of(obj.targets))
    if isinstance(obj, Parity):
        # The minimal recurring priority is p(s) for some recurring s with
        # no recurring state of smaller priority.
        cases = []
        for s in states:
            if obj.priorities[s] % 2 != 0:
                continue
            smaller = [t for t in states if obj.priorities[t] < obj.priorities[s]]
            cases.append(big_and([Atom(s)] + [Not(Atom(t)) for t in sorted(smaller)]))
        return Muller(big_or(cases))
    raise GameError(f"{obj.class_tag} objectives have no recurring-set encoding")


@dataclass(frozen=True)
class ObjectiveProfile:
    """One objective per agent, all of the same class."""

    objectives: tuple[Objective, ...]

    def __post_init__(self) -> None:
        if not self.objectives:
            raise GameError("empty objective profile")
        tags = {o.class_tag for o in self.objectives}
        if len(tags) != 1:
            raise GameError(
                "mixed objective classes %s; encode mixed instances as Muller formulas"
                % sorted(tags)
            )

    @property
    def class_tag(self) -> str:
        return self.objectives[0].class_tag

    def __len__(self) -> int:
        return len(self.objectives)

    def __getitem__(self, i: int) -> Objective:
        return self.objectives[i]

    def __iter__(self) -> Iterator[Objective]:
        return iter(self.objectives)

    def as_muller(self, states: tuple[str, ...]) -> "ObjectiveProfile":
        return ObjectiveProfile(tuple(to_muller(o, states) for o in self.objectives))

    def check_against(self, g: GameStructure) -> None:
        if len(self.objectives) != g.n_agents:
            raise GameError(
                f"{len(self.objectives)} objectives for {g.n_agents} agents"
            )
        state_set = set(g.states)
        for i, obj in enumerate(self.objectives):
            stray = obj.referenced_states() - state_set
            if stray:
                raise GameError(f"objective of agent {i} references unknown states {sorted(stray)}")


# ---------------------------------------------------------------------------
# Plays and histories


@dataclass(frozen=True)
class LassoPlay:
    """Ultimately periodic play: ``prefix`` then ``loop`` forever.  Each
    element pairs the state with the profile played there."""

    prefix: tuple[tuple[str, Profile], ...]
    loop: tuple[tuple[str, Profile], ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise GameError("lasso loop must be nonempty")

    @property
    def occ_states(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.prefix) | self.inf_states

    @property
    def inf_states(self) -> frozenset[str]:
        return frozenset(s for s, _ in self.loop)

    def validate(self, g: GameStructure) -> None:
        steps = list(self.prefix) + list(self.loop)
        if self.prefix and self.prefix[0][0] != g.initial:
            raise GameError("lasso does not start at the initial state")
        for (s, p), (s2, _) in zip(steps, steps[1:]):
            if successor(g, s, p) != s2:
                raise GameError(f"invalid step ({s}, {p}) -> {s2}")
        last_s, last_p = self.loop[-1]
        if successor(g, last_s, last_p) != self.loop[0][0]:
            raise GameError("loop does not close")


@dataclass(frozen=True)
class History:
    """Finite alternating sequence state (profile state)*."""

    states: tuple[str, ...]
    profiles: tuple[Profile, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.profiles) + 1:
            raise GameError("history must have one more state than profiles")

    @property
    def rounds(self) -> int:
        return len(self.profiles)

    @property
    def last_state(self) -> str:
        return self.states[-1]

    def extend(self, p: Profile, s: str) -> "History":
        return History(self.states + (s,), self.profiles + (p,))

    def prefix(self, rounds: int) -> "History":
        return History(self.states[: rounds + 1], self.profiles[:rounds])

    def validate(self, g: GameStructure) -> None:
        if self.states[0] != g.initial:
            raise GameError("history does not start at the initial state")
        for k, p in enumerate(self.profiles):
            if successor(g, self.states[k], p) != self.states[k + 1]:
                raise GameError(f"invalid history step {k}")


def eval_objective(obj: Objective, play: LassoPlay) -> bool:
    """Exact evaluation on the lasso's visited / recurring state sets."""
    return obj.satisfied(play.occ_states, play.inf_states)


def payoff(objs: ObjectiveProfile, play: LassoPlay) -> tuple[int, ...]:
    return tuple(int(eval_objective(o, play)) for o in objs)
