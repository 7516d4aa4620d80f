"""Boolean formulas over game states.

These serve as Muller winning conditions: a formula is evaluated against
the set of states a play visits infinitely often, an atom holding iff the
named state belongs to that set.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class FormulaError(ValueError):
    """Raised on malformed formula text."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class Formula:
    """Boolean combination of state atoms."""

    def holds(self, states: frozenset[str]) -> bool:
        raise NotImplementedError

    def atoms(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class TrueF(Formula):
    def holds(self, states: frozenset[str]) -> bool:
        return True

    def atoms(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseF(Formula):
    def holds(self, states: frozenset[str]) -> bool:
        return False

    def atoms(self) -> frozenset[str]:
        return frozenset()

    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def holds(self, states: frozenset[str]) -> bool:
        return self.name in states

    def atoms(self) -> frozenset[str]:
        return frozenset((self.name,))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def holds(self, states: frozenset[str]) -> bool:
        return not self.child.holds(states)

    def atoms(self) -> frozenset[str]:
        return self.child.atoms()

    def __str__(self) -> str:
        if isinstance(self.child, (Atom, TrueF, FalseF, Not)):
            return f"!{self.child}"
        return f"!({self.child})"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def holds(self, states: frozenset[str]) -> bool:
        return self.left.holds(states) and self.right.holds(states)

    def atoms(self) -> frozenset[str]:
        return self.left.atoms() | self.right.atoms()

    def __str__(self) -> str:
        parts = []
        for side in (self.left, self.right):
            if isinstance(side, Or):
                parts.append(f"({side})")
            else:
                parts.append(str(side))
        return " & ".join(parts)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def holds(self, states: frozenset[str]) -> bool:
        return self.left.holds(states) or self.right.holds(states)

    def atoms(self) -> frozenset[str]:
        return self.left.atoms() | self.right.atoms()

    def __str__(self) -> str:
        return f"{self.left} | {self.right}"


def big_or(children: Iterable[Formula]) -> Formula:
    """Fold a disjunction; empty iterable yields false."""
    result: Formula | None = None
    for child in children:
        result = child if result is None else Or(result, child)
    return result if result is not None else FalseF()


def big_and(children: Iterable[Formula]) -> Formula:
    """Fold a conjunction; empty iterable yields true."""
    result: Formula | None = None
    for child in children:
        result = child if result is None else And(result, child)
    return result if result is not None else TrueF()


def any_of(names: Iterable[str]) -> Formula:
    """Disjunction of atoms: some named state recurs."""
    return big_or(Atom(s) for s in sorted(names))


def none_of(names: Iterable[str]) -> Formula:
    """Conjunction of negated atoms: no named state recurs."""
    return big_and(Not(Atom(s)) for s in sorted(names))


_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()!&|":
            tokens.append((ch, ch, i))
            i += 1
        elif ch in _IDENT_CHARS:
            j = i
            while j < len(text) and text[j] in _IDENT_CHARS:
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        else:
            raise FormulaError(f"unexpected character {ch!r}", i)
    return tokens


def parse_formula(text: str) -> Formula:
    """Parse `!`, `&`, `|`, parentheses, `true`/`false`, and state atoms.

    Precedence: `!` binds tightest, then `&`, then `|`.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek() -> tuple[str, str, int] | None:
        return tokens[pos] if pos < len(tokens) else None

    def advance() -> tuple[str, str, int]:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise FormulaError("unexpected end of formula", len(text))
        pos += 1
        return tok

    def parse_or() -> Formula:
        node = parse_and()
        while (tok := peek()) is not None and tok[0] == "|":
            advance()
            node = Or(node, parse_and())
        return node

    def parse_and() -> Formula:
        node = parse_unary()
        while (tok := peek()) is not None and tok[0] == "&":
            advance()
            node = And(node, parse_unary())
        return node

    def parse_unary() -> Formula:
        tok = advance()
        kind, value, at = tok
        if kind == "!":
            return Not(parse_unary())
        if kind == "(":
            node = parse_or()
            closing = advance()
            if closing[0] != ")":
                raise FormulaError("expected ')'", closing[2])
            return node
        if kind == "ident":
            if value == "true":
                return TrueF()
            if value == "false":
                return FalseF()
            return Atom(value)
        raise FormulaError(f"unexpected token {value!r}", at)

    node = parse_or()
    if pos != len(tokens):
        raise FormulaError(f"trailing input {tokens[pos][1]!r}", tokens[pos][2])
    return node
