"""Instance file format, witness serialization, and DOT export.

Instance files are line oriented::

    agents 3
    actions 0 l r
    actions 1 a b
    actions 2 a b
    states s0 s1 s2 T01 T2
    initial s0
    objective reach
    target 0 T01
    target 1 T01
    target 2 T2
    trans s0 (l,*,*) s2
    ...

``*`` in a transition pattern matches every action of that agent and is
expanded at parse time.  Blank lines and ``#`` comments are ignored.
Objective sections per class: ``target i s...`` (reach/buchi/cobuchi),
``safe i s...`` (safety), ``muller i <formula>``.
"""
from __future__ import annotations

import itertools
import json
from typing import Hashable, Mapping

from .formulas import FormulaError, parse_formula
from .game import (
    BUCHI,
    COBUCHI,
    MULLER,
    REACH,
    SAFE,
    Buchi,
    CoBuchi,
    GameStructure,
    Muller,
    Objective,
    ObjectiveProfile,
    Reach,
    Safe,
)
from .reductions import EVE, ParityArena
from .synthesis import Sigma0

FILE_CLASSES = (REACH, SAFE, BUCHI, COBUCHI, MULLER)


class ParseError(ValueError):
    """Instance file rejection with a machine-readable code."""

    def __init__(self, code: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{code}: {message}{where}")
        self.code = code
        self.line = line


def _tokens(line: str) -> list[str]:
    return line.split()


def parse_instance_text(text: str) -> tuple[GameStructure, ObjectiveProfile]:
    g, profile, _ = _parse_full(text)
    return g, profile


def _parse_full(
    text: str,
) -> tuple[GameStructure, ObjectiveProfile, set[tuple[int, str]]]:
    n_agents: int | None = None
    actions: dict[int, tuple[str, ...]] = {}
    states: list[str] | None = None
    initial: str | None = None
    objective_class: str | None = None
    obj_lines: dict[int, tuple[str, list[str], int]] = {}
    trans_lines: list[tuple[str, str, str, int]] = []
    explicit_actions: set[tuple[int, str]] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = _tokens(line)
        kw = parts[0]
        if kw == "agents":
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ParseError("syntax", "agents expects a positive count", lineno)
            n_agents = int(parts[1])
        elif kw == "actions":
            if len(parts) < 3 or not parts[1].isdigit():
                raise ParseError("syntax", "actions expects: actions <agent> <a>...", lineno)
            actions[int(parts[1])] = tuple(parts[2:])
        elif kw == "states":
            if len(parts) < 2:
                raise ParseError("syntax", "states expects at least one name", lineno)
            states = parts[1:]
        elif kw == "initial":
            if len(parts) != 2:
                raise ParseError("syntax", "initial expects one state", lineno)
            initial = parts[1]
        elif kw == "objective":
            if len(parts) != 2 or parts[1] not in FILE_CLASSES:
                raise ParseError(
                    "objective", f"objective class must be one of {'|'.join(FILE_CLASSES)}", lineno
                )
            objective_class = parts[1]
        elif kw in ("target", "safe", "muller"):
            if len(parts) < 2 or not parts[1].isdigit():
                raise ParseError("syntax", f"{kw} expects: {kw} <agent> ...", lineno)
            obj_lines[int(parts[1])] = (kw, parts[2:], lineno)
        elif kw == "trans":
            if len(parts) != 4:
                raise ParseError("syntax", "trans expects: trans <state> (<pattern>) <state>", lineno)
            trans_lines.append((parts[1], parts[2], parts[3], lineno))
        else:
            raise ParseError("syntax", f"unknown keyword {kw!r}", lineno)

    if n_agents is None:
        raise ParseError("syntax", "missing 'agents' declaration")
    if states is None:
        raise ParseError("syntax", "missing 'states' declaration")
    if initial is None:
        raise ParseError("syntax", "missing 'initial' declaration")
    if objective_class is None:
        raise ParseError("objective", "missing 'objective' declaration")
    for i in range(n_agents):
        if i not in actions:
            raise ParseError("syntax", f"missing action declaration for agent {i}")
    state_set = set(states)
    if len(state_set) != len(states):
        raise ParseError("syntax", "duplicate state declaration")
    if initial not in state_set:
        raise ParseError("unknown-state", f"initial state {initial!r} not declared")
    action_sets = tuple(actions[i] for i in range(n_agents))

    # transitions, with wildcard expansion
    table: dict[tuple[str, tuple[str, ...]], str] = {}
    origin: dict[tuple[str, tuple[str, ...]], int] = {}
    for src, pattern, dst, lineno in trans_lines:
        if src not in state_set:
            raise ParseError("unknown-state", f"transition from undeclared state {src!r}", lineno)
        if dst not in state_set:
            raise ParseError("unknown-state", f"transition to undeclared state {dst!r}", lineno)
        if not (pattern.startswith("(") and pattern.endswith(")")):
            raise ParseError("syntax", f"pattern {pattern!r} must be parenthesized", lineno)
        entries = pattern[1:-1].split(",")
        if len(entries) != n_agents:
            raise ParseError(
                "syntax", f"pattern {pattern!r} has {len(entries)} entries for {n_agents} agents", lineno
            )
        pools: list[tuple[str, ...]] = []
        for i, entry in enumerate(entries):
            entry = entry.strip()
            if entry == "*":
                pools.append(action_sets[i])
            elif entry in action_sets[i]:
                pools.append((entry,))
                explicit_actions.add((i, entry))
            else:
                raise ParseError(
                    "unknown-action", f"action {entry!r} not declared for agent {i}", lineno
                )
        for profile in itertools.product(*pools):
            key = (src, profile)
            if key in table and table[key] != dst:
                raise ParseError(
                    "determinism",
                    f"({src}, {profile}) maps to both {table[key]!r} and {dst!r}",
                    lineno,
                )
            table[key] = dst
            origin.setdefault(key, lineno)
    for s in states:
        for profile in itertools.product(*action_sets):
            if (s, profile) not in table:
                raise ParseError("totality", f"no transition for ({s}, {profile})")

    g = GameStructure(tuple(states), initial, action_sets, table)

    # objectives
    objectives: list[Objective] = []
    for i in range(n_agents):
        if i not in obj_lines:
            raise ParseError("objective", f"missing objective for agent {i}")
        kw, args, lineno = obj_lines[i]
        if objective_class == MULLER:
            if kw != "muller":
                raise ParseError("objective", f"agent {i}: expected a 'muller' line", lineno)
            try:
                formula = parse_formula(" ".join(args))
            except FormulaError as exc:
                raise ParseError("syntax", f"agent {i}: {exc}", lineno) from exc
            stray = formula.atoms() - state_set
            if stray:
                raise ParseError(
                    "unknown-state", f"agent {i}: formula names {sorted(stray)}", lineno
                )
            objectives.append(Muller(formula))
            continue
        expected = "safe" if objective_class == SAFE else "target"
        if kw != expected:
            raise ParseError(
                "objective", f"agent {i}: expected a {expected!r} line for class {objective_class}", lineno
            )
        stray = set(args) - state_set
        if stray:
            raise ParseError("unknown-state", f"agent {i}: {sorted(stray)}", lineno)
        mk = {REACH: Reach, SAFE: Safe, BUCHI: Buchi, COBUCHI: CoBuchi}[objective_class]
        objectives.append(mk(frozenset(args)))

    profile = ObjectiveProfile(tuple(objectives))
    return g, profile, explicit_actions


def parse_instance(path: str) -> tuple[GameStructure, ObjectiveProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance_text(fh.read())


def strict_findings(g: GameStructure, explicit: set[tuple[int, str]]) -> list[str]:
    """Extra hygiene checks behind ``--strict``: action declarations never
    named explicitly in any transition, and unreachable states."""
    findings = []
    for i, acts in enumerate(g.action_sets):
        for a in acts:
            if (i, a) not in explicit:
                findings.append(f"unused-action: agent {i} action {a!r} never named explicitly")
    seen = {g.initial}
    frontier = [g.initial]
    while frontier:
        s = frontier.pop()
        for p in g.profiles():
            s2 = g.table[(s, p)]
            if s2 not in seen:
                seen.add(s2)
                frontier.append(s2)
    for s in g.states:
        if s not in seen:
            findings.append(f"unreachable-state: {s!r}")
    return findings


def format_instance(g: GameStructure, objs: ObjectiveProfile) -> str:
    """Canonical text for an instance; inverse of the parser up to
    wildcard compression (transitions are written fully expanded)."""
    lines = [f"agents {g.n_agents}"]
    for i, acts in enumerate(g.action_sets):
        lines.append(f"actions {i} " + " ".join(acts))
    lines.append("states " + " ".join(g.states))
    lines.append(f"initial {g.initial}")
    lines.append(f"objective {objs.class_tag}")
    for i, obj in enumerate(objs):
        if isinstance(obj, Safe):
            lines.append(f"safe {i} " + " ".join(sorted(obj.safe)))
        elif isinstance(obj, Muller):
            lines.append(f"muller {i} {obj.formula}")
        else:
            lines.append((f"target {i} " + " ".join(sorted(obj.targets))).rstrip())
    for s in g.states:
        for p in g.profiles():
            lines.append(f"trans {s} ({','.join(p)}) {g.table[(s, p)]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Witness serialization


def witness_to_json(sigma0: Sigma0) -> dict:
    order = sigma0.memory_nodes()
    ids = {m: k for k, m in enumerate(order)}
    return {
        "type": "memory-machine",
        "initial": 0,
        "nodes": [
            {"id": k, "state": sigma0.state_of[m], "action": sigma0.output[m]}
            for k, m in enumerate(order)
        ],
        "edges": [
            {"from": ids[m], "env": list(env), "to": ids[sigma0.delta[(m, env)]]}
            for m in order
            for env in sigma0.env_profiles
        ],
    }


def witness_from_json(doc: Mapping, g: GameStructure) -> Sigma0:
    if doc.get("type") != "memory-machine":
        raise ParseError("witness", "not a memory-machine document")
    output: dict[Hashable, str] = {}
    state_of: dict[Hashable, str] = {}
    for node in doc["nodes"]:
        output[node["id"]] = node["action"]
        state_of[node["id"]] = node["state"]
    delta: dict[tuple[Hashable, tuple], Hashable] = {}
    for edge in doc["edges"]:
        delta[(edge["from"], tuple(edge["env"]))] = edge["to"]
    env_profiles = tuple(g.env_profiles())
    for m in output:
        for env in env_profiles:
            if (m, env) not in delta:
                raise ParseError("witness", f"missing transition from node {m} on {env}")
    return Sigma0(doc["initial"], output, delta, state_of, env_profiles)


def witness_dumps(sigma0: Sigma0) -> str:
    return json.dumps(witness_to_json(sigma0), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def game_to_dot(g: GameStructure) -> str:
    lines = ["digraph game {"]
    lines.append(f"  {_dot_quote('__init')} [shape=point];")
    lines.append(f"  {_dot_quote('__init')} -> {_dot_quote(g.initial)};")
    for s in g.states:
        lines.append(f"  {_dot_quote(s)} [shape=circle];")
    grouped: dict[tuple[str, str], list[str]] = {}
    for s in g.states:
        for p in g.profiles():
            grouped.setdefault((s, g.table[(s, p)]), []).append(",".join(p))
    for (src, dst), labels in grouped.items():
        label = "\\n".join(labels)
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(dst)} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _aug_label(arena: ParityArena, v: int) -> str:
    node = arena.nodes[v]
    if arena.cls == "generic":
        return f"{v} p{arena.priority[v]}"
    base, ann = node.base, node.ann

    def mv(t):
        if t is None:
            return ""
        return "(" + ",".join("-" if x is None else x for x in t) + ")"

    ws = "{" + ",".join(map(str, sorted(base.w))) + "}"
    ds = "{" + ",".join(map(str, sorted(base.d))) + "}"
    parts = [f"{base.layer}:{base.s} W={ws} D={ds}"]
    for tag, t in (("a", base.a), ("b", base.b), ("c", base.c)):
        if t is not None:
            parts.append(f"{tag}={mv(t)}")
    if ann is not None:
        parts.append(f"ann={ann}")
    parts.append(f"p{arena.priority[v]}")
    return " ".join(parts)


def arena_to_dot(arena: ParityArena) -> str:
    lines = ["digraph arena {"]
    for v in range(len(arena)):
        shape = "ellipse" if arena.owner[v] == EVE else "box"
        lines.append(
            f"  n{v} [shape={shape},label={_dot_quote(_aug_label(arena, v))}];"
        )
    lines.append("  init [shape=point];")
    lines.append(f"  init -> n{arena.initial};")
    for v, outs in enumerate(arena.succ):
        for w in outs:
            lines.append(f"  n{v} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
