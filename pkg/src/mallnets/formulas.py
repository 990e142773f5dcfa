"""MALL formulas over polarized atoms.

Atoms are negative; their duals are positive.  The ASCII surface syntax is::

    formula := term (("|" | "&") term)*
    term    := factor (("*" | "+") factor)*
    factor  := ident "^"? | "(" formula ")"

with ``|`` for par, ``&`` for with, ``*`` for tensor, ``+`` for plus and a
postfix ``^`` marking the (positive) dual of an atom.  Both binary levels are
left-associative.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import FormulaSyntaxError

__all__ = [
    "Atom", "NegAtom", "PosAtom", "Par", "With", "Tensor", "Plus", "Formula",
    "Polarity", "parse_formula", "to_text", "polarity", "dual",
    "is_monopole", "is_bipole", "positive_leaves", "subformulas", "atoms_of",
]

_IDENT = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


class Polarity(enum.Enum):
    NEGATIVE = "-"
    POSITIVE = "+"

    def opposite(self) -> Polarity:
        return Polarity.POSITIVE if self is Polarity.NEGATIVE else Polarity.NEGATIVE


@dataclass(frozen=True)
class Atom:
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _IDENT.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")

    def __str__(self):
        return self.name


def _coerce_atom(obj, value):
    if isinstance(value, str):
        object.__setattr__(obj, "atom", Atom(value))
    elif not isinstance(value, Atom):
        raise TypeError(f"expected Atom, got {type(value).__name__}")


@dataclass(frozen=True)
class NegAtom:
    atom: Atom

    def __post_init__(self):
        _coerce_atom(self, self.atom)

    @property
    def name(self) -> str:
        return self.atom.name


@dataclass(frozen=True)
class PosAtom:
    """The dual ``a^`` of the negative atom ``a``."""

    atom: Atom

    def __post_init__(self):
        _coerce_atom(self, self.atom)

    @property
    def name(self) -> str:
        return self.atom.name


@dataclass(frozen=True)
class Par:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class With:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Tensor:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Plus:
    left: Formula
    right: Formula


Formula = Union[NegAtom, PosAtom, Par, With, Tensor, Plus]
_BINARY = (Par, With, Tensor, Plus)
_SYMBOL = {Par: "|", With: "&", Tensor: "*", Plus: "+"}
_NODE = {sym: cls for cls, sym in _SYMBOL.items()}
_DUAL = {Par: Tensor, Tensor: Par, With: Plus, Plus: With}


def polarity(f: Formula) -> Polarity:
    if isinstance(f, (NegAtom, Par, With)):
        return Polarity.NEGATIVE
    return Polarity.POSITIVE


def dual(f: Formula) -> Formula:
    if isinstance(f, NegAtom):
        return PosAtom(f.atom)
    if isinstance(f, PosAtom):
        return NegAtom(f.atom)
    return _DUAL[type(f)](dual(f.left), dual(f.right))


def is_monopole(f: Formula) -> bool:
    """Negative atoms combined with par and with only."""
    if isinstance(f, NegAtom):
        return True
    if isinstance(f, (Par, With)):
        return is_monopole(f.left) and is_monopole(f.right)
    return False


def positive_leaves(f: Formula) -> list[Formula]:
    """Leaves of the maximal top region of tensor/plus nodes, left to right."""
    if isinstance(f, (Tensor, Plus)):
        return positive_leaves(f.left) + positive_leaves(f.right)
    return [f]


def is_bipole(f: Formula) -> bool:
    if isinstance(f, PosAtom):
        return True
    if not isinstance(f, (Tensor, Plus)):
        return False
    return all(isinstance(leaf, PosAtom) or is_monopole(leaf)
               for leaf in positive_leaves(f))


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order, left to right."""
    yield f
    if isinstance(f, _BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, (NegAtom, PosAtom))}


# -- printing ---------------------------------------------------------------

def to_text(f: Formula) -> str:
    """Print ``f`` so that ``parse_formula`` reads it back unchanged.

    A child is parenthesized whenever its connective differs from its
    parent's, which keeps mixed ``*``/``+`` and ``|``/``&`` unambiguous to a
    human reader even where precedence alone would do.
    """
    if isinstance(f, NegAtom):
        return f.name
    if isinstance(f, PosAtom):
        return f.name + "^"
    left = to_text(f.left)
    right = to_text(f.right)
    if isinstance(f.left, _BINARY) and type(f.left) is not type(f):
        left = f"({left})"
    if isinstance(f.right, _BINARY):
        right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([a-z][a-zA-Z0-9_]*)|(\^)|([|&*+()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError("unknown token", text, start)
        kind = "ident" if m.group(1) else "op"
        tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message):
        tok = self.peek()
        pos = tok[2] if tok else len(self.text.rstrip())
        raise FormulaSyntaxError(message, self.text, pos)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def level(self, ops, sub):
        node = sub()
        while (tok := self.peek()) is not None and tok[1] in ops:
            self.take()
            node = _NODE[tok[1]](node, sub())
        return node

    def formula(self):
        return self.level("|&", self.term)

    def term(self):
        return self.level("*+", self.factor)

    def factor(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        if tok[0] == "ident":
            self.take()
            nxt = self.peek()
            if nxt is not None and nxt[1] == "^":
                self.take()
                return PosAtom(tok[1])
            return NegAtom(tok[1])
        if tok[1] == "(":
            self.take()
            node = self.formula()
            if self.peek() is None or self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return node
        self.error(f"unexpected {tok[1]!r}")


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    node = parser.formula()
    if parser.peek() is not None:
        parser.error("trailing input")
    return node
