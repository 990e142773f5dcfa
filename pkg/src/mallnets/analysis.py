"""Maximal switchings, domination forests and isolation regions.

Everything here works on one slice at a time.  Two jump edges into the same
negative link compete when one source stands above the other; only the
higher one is kept in the maximal switching, and loop search on maximal
switchings gives the same verdict as on full slices.

The domination order relates negative links of a slice: ``x <= y`` when every
singularity-free trip that starts at a root and reaches ``y`` from below also
crosses ``x`` upwards.  The joint dominator of two links bounds the region a
trip between them can visit, which is what an expansion has to lock.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .proofnet import (
    BOTTOM, TOP, ProofStructure, Slice, TripGraph, find_singularity_free_loop,
    slices,
)

__all__ = [
    "above", "maximal_jump_edges", "maximal_switching", "is_proof_net_fast",
    "roots", "DominationForest", "domination_forest",
    "domination_forest_bruteforce", "joint_dominator", "immediate_dominator",
    "isolation_region", "trips_between", "forest_violations",
]


def above(s: Slice, x: str) -> set[str]:
    """Links reachable from ``x`` by climbing through shared places."""
    p = s.structure
    seen, stack = set(), [x]
    while stack:
        link = stack.pop()
        for q in p.links[link].top:
            if q not in s.places or p.places[q].is_jump:
                continue
            for up in p.upper(q):
                if up in s.links and up not in seen:
                    seen.add(up)
                    stack.append(up)
    seen.discard(x)
    return seen


def maximal_jump_edges(s: Slice) -> frozenset[tuple[str, str]]:
    keep = set()
    for x, y in s.jump_edges:
        higher = above(s, x)
        if not any(z != x and z in higher for z, t in s.jump_edges if t == y):
            keep.add((x, y))
    return frozenset(keep)


def maximal_switching(s: Slice) -> Slice:
    return s.with_jumps(maximal_jump_edges(s))


def is_proof_net_fast(p: ProofStructure) -> bool:
    return all(find_singularity_free_loop(maximal_switching(s)) is None
               for s in slices(p))


def roots(s: Slice, graph: TripGraph | None = None) -> list[str]:
    """Positive links of the slice with nothing below them."""
    g = graph or TripGraph(s)
    return [l for l in s.positive_links()
            if not any(side == BOTTOM for _, side in g.ports[l])]


@dataclass
class DominationForest:
    """``dominators[y]`` is the set of ``x`` with ``x <= y``."""

    slice: Slice = field(repr=False)
    dominators: dict[str, frozenset[str]]
    roots: tuple[str, ...]
    unreached: frozenset[str] = frozenset()

    @property
    def elements(self) -> list[str]:
        return sorted(self.dominators)

    def leq(self, x: str, y: str) -> bool:
        return x in self.dominators.get(y, ())

    def lt(self, x: str, y: str) -> bool:
        return x != y and self.leq(x, y)

    def joint_dominator(self, links: Iterable[str]) -> str | None:
        return joint_dominator(self, links)

    def immediate_dominator(self, x: str) -> str | None:
        return immediate_dominator(self, x)

    def to_text(self) -> str:
        kids: dict[str | None, list[str]] = {}
        for x in self.elements:
            kids.setdefault(self.immediate_dominator(x), []).append(x)
        lines = []

        def walk(node, depth):
            for child in kids.get(node, []):
                lines.append("  " * depth + child)
                walk(child, depth + 1)

        walk(None, 0)
        return "\n".join(lines) + ("\n" if lines else "")


def _step(g: TripGraph, link, entry_conn, entry_side):
    for conn, side in g.ports[link]:
        if conn is entry_conn:
            continue
        if entry_side is not None and not g.allowed(link, entry_side, side):
            continue
        yield conn, side


def _upward_reach(g: TripGraph, starts, blocked: str | None) -> set[str]:
    """Negative links some walk from ``starts`` enters from below.

    Walks never turn back through the connector they came in by, never cross
    a negative link top-to-top, and never cross ``blocked`` upwards.
    """
    reached = set()
    seen = set()
    queue = deque((r, None, None) for r in starts)
    while queue:
        link, conn, side = queue.popleft()
        key = (link, conn.id if conn else None, side)
        if key in seen:
            continue
        seen.add(key)
        if side == BOTTOM and link in g.negative:
            reached.add(link)
        for out, out_side in _step(g, link, conn, side):
            if link == blocked and side == BOTTOM and out_side == TOP:
                continue
            nxt = out.other(link)
            queue.append((nxt, out, out.side_at(nxt)))
    return reached


def domination_forest(s: Slice) -> DominationForest:
    """Domination order by reachability: ``x <= y`` iff blocking upward
    passage through ``x`` cuts every root walk that reaches ``y`` upwards."""
    g = TripGraph(s)
    rs = roots(s, g)
    negatives = s.negative_links()
    reach = _upward_reach(g, rs, None)
    doms = {y: {y} for y in negatives}
    for x in negatives:
        cut = _upward_reach(g, rs, x)
        for y in reach:
            if y != x and y not in cut:
                doms[y].add(x)
    return DominationForest(s, {y: frozenset(d) for y, d in doms.items()}, tuple(rs),
                            frozenset(set(negatives) - reach))


def _simple_trips(g: TripGraph, start, first_exit_side=None) -> Iterator[tuple[list, list]]:
    """All simple singularity-free trips from ``start``.

    Yields ``(steps, arrivals)`` for every prefix, where ``steps`` holds
    ``(link, entry_side, exit_side)`` for the links passed so far and the last
    element of ``arrivals`` is ``(link, entry_side)`` of the current end.
    """
    on = {start}
    steps: list[tuple[str, str | None, str]] = []

    def rec(link, conn, side):
        for out, out_side in _step(g, link, conn, side):
            if conn is None and first_exit_side is not None and out_side != first_exit_side:
                continue
            nxt = out.other(link)
            if nxt in on:
                continue
            nxt_side = out.side_at(nxt)
            steps.append((link, side, out_side))
            on.add(nxt)
            yield list(steps), (nxt, nxt_side)
            yield from rec(nxt, out, nxt_side)
            on.discard(nxt)
            steps.pop()

    yield from rec(start, None, None)


def domination_forest_bruteforce(s: Slice) -> DominationForest:
    """Reference semantics: enumerate every simple singularity-free trip
    from every root and intersect the links each one crosses upwards."""
    g = TripGraph(s)
    rs = roots(s, g)
    negatives = s.negative_links()
    doms: dict[str, set[str] | None] = {y: None for y in negatives}
    for r in rs:
        for steps, (end, side) in _simple_trips(g, r):
            if end not in g.negative or side != BOTTOM:
                continue
            up = {l for l, e, x in steps if l in g.negative and e == BOTTOM and x == TOP}
            up.add(end)
            doms[end] = up if doms[end] is None else doms[end] & up
    unreached = frozenset(y for y, d in doms.items() if d is None)
    final = {y: frozenset(d) if d is not None else frozenset({y}) for y, d in doms.items()}
    return DominationForest(s, final, tuple(rs), unreached)


def joint_dominator(f: DominationForest, links: Iterable[str]) -> str | None:
    """Greatest lower bound of ``links``; ``None`` when there is none."""
    n = list(links)
    if not n:
        raise ValueError("joint dominator of an empty set")
    lower = [z for z in f.elements if all(f.leq(z, y) for y in n)]
    best = [g for g in lower if all(f.leq(l, g) for l in lower)]
    return best[0] if best else None


def immediate_dominator(f: DominationForest, x: str) -> str | None:
    preds = [z for z in f.elements if f.lt(z, x)]
    best = [g for g in preds if all(f.leq(q, g) for q in preds)]
    return best[0] if best else None


def isolation_region(s: Slice, x: str, y: str,
                     forest: DominationForest | None = None) -> set[str]:
    """Negative links strictly dominated by the joint dominator of ``x, y``.

    Falls back to every negative link of the slice when the joint dominator
    does not exist.
    """
    f = forest if forest is not None else domination_forest(s)
    j = f.joint_dominator([x, y])
    if j is None:
        return set(s.negative_links())
    return {z for z in f.elements if f.lt(j, z)}


def trips_between(s: Slice, x: str, y: str) -> Iterator[list[tuple[str, str | None, str]]]:
    """Simple singularity-free trips leaving ``x`` downwards and entering ``y``
    from below; each is the list of passes before arriving at ``y``."""
    g = TripGraph(s)
    for steps, (end, side) in _simple_trips(g, x, first_exit_side=BOTTOM):
        if end == y and side == BOTTOM:
            yield steps


def forest_violations(f: DominationForest) -> list[str]:
    """Failures of reflexivity, antisymmetry, transitivity and the forest law."""
    out = []
    els = f.elements
    for x in els:
        if not f.leq(x, x):
            out.append(f"not reflexive at {x}")
    for x in els:
        for y in els:
            if x != y and f.leq(x, y) and f.leq(y, x):
                out.append(f"not antisymmetric: {x}, {y}")
            for z in els:
                if f.leq(x, y) and f.leq(y, z) and not f.leq(x, z):
                    out.append(f"not transitive: {x} <= {y} <= {z}")
                if f.leq(x, z) and f.leq(y, z) and not (f.leq(x, y) or f.leq(y, x)):
                    out.append(f"not a forest: {x}, {y} below {z} but incomparable")
    return out
