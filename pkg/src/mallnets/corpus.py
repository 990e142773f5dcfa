"""Generated families of bipolar proof structures for property checks.

Structures are grown by expansions without any correctness check, so the
families contain incorrect structures as well as proof nets.  Every member
satisfies the structure conditions (``validate_bps``).
"""
from __future__ import annotations

import random
from collections import deque
from typing import Iterator, Sequence

from .bipolarizer import Bipole, parse_program
from .engine.construction import (
    Binding, candidate_bindings, match_trigger, plan_expansion, trigger_leaves,
)
from .errors import BindingStale
from .proofnet import ProofStructure, validate_bps

__all__ = ["FIXED_PROGRAMS", "grow", "exhaustive_corpus", "random_program",
           "random_structure", "random_corpus"]

FIXED_PROGRAMS: dict[str, tuple[str, tuple[str, ...]]] = {
    "example": ("""
n0 := n0^ * ((a & b) | n1 | n2 | (d & e))
n1 := n1^ * ((a^ + b^) * c^)
n2 := n2^ * (c * (d^ + e^))
""", ("n0",)),
    "tangle": ("""
r := r^ * (s | t) * (g | h)
s := s^ * (a | x) * (b | y)
x := x^ * (u | v)
k := a^ * b^
""", ("r",)),
    "choice": ("""
p := p^ * ((a & b) | q) * (c | d)
q := q^ * ((a^ * c^) + (b^ * d^))
m := c^ * (a | b)
""", ("p",)),
}


def _fixed(name: str) -> tuple[list[Bipole], tuple[str, ...]]:
    text, goal = FIXED_PROGRAMS[name]
    return parse_program(text), goal


def grow(p: ProofStructure, bind: Binding) -> ProofStructure | None:
    """``p`` expanded by ``bind`` with no loop check; ``None`` when the
    binding does not fit or the result breaks a structure condition."""
    try:
        new = plan_expansion(p, bind).apply(p)
    except BindingStale:
        return None
    return new if validate_bps(new).ok else None


def _with_extra_jumps(p: ProofStructure, bind: Binding) -> Iterator[Binding]:
    """``bind`` with its derived jumps and, for single-variant bindings, one
    extra jump to each other negative link."""
    yield bind
    if len(bind.variants) != 1:
        return
    ex = plan_expansion(p, bind)
    (v,), (link,) = bind.variants, ex.positive_links
    base = ex.targets[link.id]
    for y in sorted(p.links):
        if not p.links[y].positive and y not in base:
            yield Binding(bind.bipole, bind.variants, bind.places, ((v, base + (y,)),))


def _bindings(p: ProofStructure, program: Sequence[Bipole], extra_jumps: bool):
    for b in program:
        singles = match_trigger(p, b)
        merged = [m for m in candidate_bindings(p, b) if len(m.variants) > 1]
        for bind in singles + merged:
            try:
                yield from (_with_extra_jumps(p, bind) if extra_jumps else [bind])
            except BindingStale:
                continue


def exhaustive_corpus(names: Sequence[str] = tuple(FIXED_PROGRAMS), max_bipoles: int = 4,
                      extra_jumps: bool = True) -> list[ProofStructure]:
    """Every structure reachable by at most ``max_bipoles`` expansions from
    the goal of each named fixed program, deduplicated, in discovery order."""
    out: dict[str, ProofStructure] = {}
    for name in names:
        program, goal = _fixed(name)
        start = ProofStructure.empty(goal)
        queue = deque([(start, 0)])
        seen = {start.version}
        while queue:
            p, depth = queue.popleft()
            if depth:
                out.setdefault(p.version, p)
            if depth == max_bipoles:
                continue
            for bind in _bindings(p, program, extra_jumps):
                new = grow(p, bind)
                if new is None or new.version in seen:
                    continue
                seen.add(new.version)
                queue.append((new, depth + 1))
    return list(out.values())


# -- random structures ------------------------------------------------------

def _monopole(rng: random.Random, atoms: Sequence[str], size: int) -> str:
    if size <= 1:
        return rng.choice(atoms)
    k = rng.randint(1, size - 1)
    op = rng.choice(("|", "&"))
    return f"({_monopole(rng, atoms, k)} {op} {_monopole(rng, atoms, size - k)})"


def random_program(rng: random.Random, heads: int = 3,
                   alphabet: Sequence[str] = ("a", "b", "c")) -> list[Bipole]:
    """A few random clauses ``h_i := h_i^ * ...``.  Clause ``i`` may produce
    later heads, so programs grow downwards and terminate."""
    names = [f"h{i}" for i in range(heads)]
    program = []
    for i, head in enumerate(names):
        atoms = list(alphabet) + names[i + 1:]
        parts = []
        for _ in range(rng.randint(1, 2)):
            parts.append(_monopole(rng, atoms, rng.randint(1, 3)))
        for _ in range(rng.randint(0, 2)):
            x, y = rng.sample(list(alphabet), 2)
            parts.append(f"({x}^ + {y}^)" if rng.random() < 0.4 else f"{x}^")
        rng.shuffle(parts)
        program.append(parse_program(f"{head} := {head}^ * " + " * ".join(parts))[0])
    if rng.random() < 0.5:
        x, y = rng.sample(list(alphabet), 2)
        program.append(parse_program(f"k := {x}^ * {y}^")[0])
    return program


def random_structure(rng: random.Random, max_bipoles: int = 8,
                     jump_rate: float = 0.2) -> ProofStructure:
    """Grow a random structure by up to ``max_bipoles`` random expansions of
    a random program, sometimes with an extra jump."""
    program = random_program(rng, heads=rng.randint(2, 4))
    first = program[0]
    v = rng.randrange(len(first.variants()))
    goal = [first.leaves[i].name for i in trigger_leaves(first, v + 1)]
    goal += rng.sample(["a", "b", "c"], rng.randint(0, 2))
    p = ProofStructure.empty(sorted(goal))
    for _ in range(max_bipoles):
        options = []
        for b in program:
            options.extend(match_trigger(p, b))
            options.extend(m for m in candidate_bindings(p, b) if len(m.variants) > 1)
        rng.shuffle(options)
        for bind in options:
            if rng.random() < jump_rate:
                extras = list(_with_extra_jumps(p, bind))
                bind = rng.choice(extras)
            new = grow(p, bind)
            if new is not None:
                p = new
                break
        else:
            break
    return p


def random_corpus(count: int = 1000, seed: int = 0, max_bipoles: int = 8) -> list[ProofStructure]:
    rng = random.Random(seed)
    return [random_structure(rng, max_bipoles) for _ in range(count)]
