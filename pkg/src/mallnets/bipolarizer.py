"""Bipolarisation: naming schemes, the nu mappings and universal programs.

A naming scheme gives every compound (or positive) subformula that the
negative layer meets a fresh negative atom.  ``nu(F)`` then builds the bipole
``eta_F^ * nu_down(F)``; the set of all such bipoles reachable from a root is
its universal program.

Each bipole unfolds into inference schemes, one per choice of plus-leaves in
its positive layer.  A scheme consumes its trigger (the duals of the positive
atoms of the chosen variant) and opens one premise per with-branch of each
monopole; premises of different monopoles split the remaining context, as
tensor does.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import FormulaSyntaxError, NegAtomInput
from .formulas import (
    Formula, NegAtom, Par, Plus, PosAtom, Tensor, With, atoms_of, dual,
    is_bipole, parse_formula, positive_leaves, to_text,
)

__all__ = [
    "NamingScheme", "Bipole", "InferenceScheme", "make_scheme", "nu_up",
    "nu_down", "nu", "universal_program", "inference_schemes",
    "monopole_branches", "monopole_atoms", "program_to_text", "parse_program",
    "alias", "check_bipole_of", "EXAMPLE_ALIASES",
]


@dataclass(frozen=True)
class NamingScheme:
    base_atoms: frozenset[str]
    names: Mapping[Formula, str]

    def name_of(self, f: Formula) -> str:
        if isinstance(f, NegAtom):
            return f.name
        try:
            return self.names[f]
        except KeyError:
            raise KeyError(f"formula {to_text(f)!r} has no name") from None

    @property
    def extended_atoms(self) -> frozenset[str]:
        return self.base_atoms | frozenset(self.names.values())

    def formula_of(self, name: str) -> Formula | None:
        for f, n in self.names.items():
            if n == name:
                return f
        return None


def _needs_name(f: Formula) -> bool:
    return not isinstance(f, (NegAtom, Par, With))


def make_scheme(roots: Sequence[Formula], prefix: str = "n") -> NamingScheme:
    """Name each root and every subformula the negative layer reaches.

    Names are ``n0, n1, ...`` in pre-order, left to right, skipping any that
    clash with atoms of the roots.
    """
    base = frozenset().union(*(atoms_of(r) for r in roots)) if roots else frozenset()
    names: dict[Formula, str] = {}
    counter = itertools.count()

    def fresh() -> str:
        while (candidate := f"{prefix}{next(counter)}") in base:
            pass
        return candidate

    def name(f):
        if f in names:
            return
        names[f] = fresh()
        down(f)

    def up(f):
        if isinstance(f, (Par, With)):
            up(f.left)
            up(f.right)
        elif _needs_name(f):
            name(f)

    def down(f):
        if isinstance(f, (Tensor, Plus)):
            down(f.left)
            down(f.right)
        elif not isinstance(f, PosAtom):
            up(f)

    for root in roots:
        if not isinstance(root, NegAtom):
            name(root)
    return NamingScheme(base, names)


def nu_up(f: Formula, s: NamingScheme) -> Formula:
    if isinstance(f, Par):
        return Par(nu_up(f.left, s), nu_up(f.right, s))
    if isinstance(f, With):
        return With(nu_up(f.left, s), nu_up(f.right, s))
    return NegAtom(s.name_of(f))


def nu_down(f: Formula, s: NamingScheme) -> Formula:
    if isinstance(f, Tensor):
        return Tensor(nu_down(f.left, s), nu_down(f.right, s))
    if isinstance(f, Plus):
        return Plus(nu_down(f.left, s), nu_down(f.right, s))
    if isinstance(f, PosAtom):
        return f
    return nu_up(f, s)


@dataclass(frozen=True)
class Bipole:
    """A program clause ``head^ * ...``.

    ``source`` is the formula it was derived from, or ``None`` for clauses
    read from a program file.
    """

    head: str
    clause: Formula
    source: Formula | None = field(default=None, compare=False)

    def __post_init__(self):
        if not is_bipole(self.clause):
            raise ValueError(f"not a bipole: {to_text(self.clause)}")

    @property
    def leaves(self) -> list[Formula]:
        return positive_leaves(self.clause)

    def variants(self) -> list[tuple[int, ...]]:
        """Leaf positions kept by each plus-resolution, in order."""
        return _variants(self.clause, itertools.count())

    def __str__(self):
        return f"{self.head} := {to_text(self.clause)}"


def _variants(f: Formula, counter) -> list[tuple[int, ...]]:
    if isinstance(f, Tensor):
        left = _variants(f.left, counter)
        right = _variants(f.right, counter)
        return [l + r for l in left for r in right]
    if isinstance(f, Plus):
        return _variants(f.left, counter) + _variants(f.right, counter)
    return [(next(counter),)]


def nu(f: Formula, s: NamingScheme) -> Bipole:
    if isinstance(f, NegAtom):
        raise NegAtomInput(f"nu is undefined on the negative atom {f.name!r}")
    head = s.name_of(f)
    return Bipole(head, Tensor(PosAtom(head), nu_down(f, s)), source=f)


def universal_program(f: Formula, s: NamingScheme | None = None) -> list[Bipole]:
    """Bipoles ``nu(G)`` for ``f`` and every subformula named on the way.

    The order follows the naming order, so ``nu(f)`` comes first.
    """
    if s is None:
        s = make_scheme([f])
    if isinstance(f, NegAtom):
        return []
    reached = set()

    def visit(g):
        if g in reached:
            return
        reached.add(g)
        walk_down(g)

    def walk_up(g):
        if isinstance(g, (Par, With)):
            walk_up(g.left)
            walk_up(g.right)
        elif _needs_name(g):
            visit(g)

    def walk_down(g):
        if isinstance(g, (Tensor, Plus)):
            walk_down(g.left)
            walk_down(g.right)
        elif not isinstance(g, PosAtom):
            walk_up(g)

    visit(f)
    rank = {g: i for i, g in enumerate(s.names)}
    return [nu(g, s) for g in sorted(reached, key=rank.__getitem__)]


def monopole_branches(m: Formula) -> list[tuple[int, ...]]:
    """Distribute with over par: each branch lists atom-leaf positions of ``m``."""
    return _branches(m, itertools.count())


def _branches(f, counter):
    if isinstance(f, Par):
        left = _branches(f.left, counter)
        right = _branches(f.right, counter)
        return [l + r for l in left for r in right]
    if isinstance(f, With):
        return _branches(f.left, counter) + _branches(f.right, counter)
    return [(next(counter),)]


def monopole_atoms(m: Formula) -> list[str]:
    """Atom names of ``m`` by leaf position."""
    if isinstance(m, NegAtom):
        return [m.name]
    return monopole_atoms(m.left) + monopole_atoms(m.right)


@dataclass(frozen=True)
class InferenceScheme:
    """One inference of a bipole.

    ``premises[i]`` are the atoms added to the context in premise ``i``;
    ``groups[i]`` says which monopole that premise belongs to.  Premises of
    one group share their context, different groups split it.
    """

    name: str
    variant: int
    trigger: tuple[str, ...]
    premises: tuple[tuple[str, ...], ...]
    groups: tuple[int, ...]
    bipole: Bipole | None = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        return f"{self.name}#{self.variant}"

    @property
    def group_count(self) -> int:
        return len(set(self.groups))

    def __str__(self):
        prem = " ; ".join(", ".join(p) for p in self.premises) or "-"
        return f"{self.label}: {', '.join(self.trigger)} <= {prem}"


def inference_schemes(b: Bipole) -> list[InferenceScheme]:
    leaves = b.leaves
    schemes = []
    for index, variant in enumerate(b.variants(), start=1):
        trigger = tuple(leaves[i].name for i in variant if isinstance(leaves[i], PosAtom))
        premises, groups = [], []
        monopoles = [leaves[i] for i in variant if not isinstance(leaves[i], PosAtom)]
        for g, m in enumerate(monopoles):
            atoms = monopole_atoms(m)
            for branch in monopole_branches(m):
                premises.append(tuple(atoms[k] for k in branch))
                groups.append(g)
        schemes.append(InferenceScheme(b.head, index, trigger, tuple(premises),
                                       tuple(groups), bipole=b))
    return schemes


# -- program files ----------------------------------------------------------

def program_to_text(program: Iterable[Bipole]) -> str:
    return "".join(f"{b}\n" for b in program)


def parse_program(text: str) -> list[Bipole]:
    """Read ``head := clause`` lines; blank lines and ``#`` comments skipped."""
    program = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, clause = line.partition(":=")
        head = head.strip()
        if not sep or not head:
            raise FormulaSyntaxError(f"line {lineno}: expected 'head := clause'")
        try:
            formula = parse_formula(clause)
            program.append(Bipole(head, formula))
        except FormulaSyntaxError as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc}") from exc
        except ValueError as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc}") from exc
    return program


#: Display names for the running example: n0, n1, n2 are F, G and H.
EXAMPLE_ALIASES = {"n0": "eta_F", "n1": "eta_G", "n2": "eta_H"}


def alias(text: str, aliases: Mapping[str, str]) -> str:
    """Replace whole-word names in ``text`` using ``aliases``."""
    return re.sub(r"[a-z][a-zA-Z0-9_]*",
                  lambda m: aliases.get(m.group(0), m.group(0)), text)


def check_bipole_of(b: Bipole, s: NamingScheme) -> bool:
    """``b.clause == dual(head) * nu_down(source)`` for derived bipoles."""
    if b.source is None:
        return True
    return b.clause == Tensor(dual(NegAtom(b.head)), nu_down(b.source, s))

