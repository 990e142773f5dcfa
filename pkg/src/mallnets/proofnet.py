"""Bipolar focussing proof structures, their slices and the loop criterion.

A structure is a set of polarized links over places.  Links are grouped into
hyperlinks: a negative hyperlink is a generalized with (its links share the
bottom place), a positive hyperlink a generalized plus (one link per
plus-variant).  Jump edges run from the jump place at the bottom of a
positive link to the jump place at the top of a negative link and record
that the positive link depends on that negative one.

A slice keeps one link per negative hyperlink and erases everything that no
longer stands on something: a place dies when every link below it died, a
link dies when one of its places died or when, for some negative hyperlink it
jumps into, all of its jump targets died.

Trips move between links across shared places and jump edges.  A negative link
crossed top-to-top is a singularity; the structure is a proof net when no
slice contains a loop of three or more links free of singularities.
"""
from __future__ import annotations

import graphlib
import hashlib
import itertools
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .errors import FormulaSyntaxError
from .formulas import Polarity

__all__ = [
    "Place", "Link", "HyperLink", "ProofStructure", "Violation",
    "ValidationReport", "Slice", "Connector", "TripStep", "Trip",
    "validate_bps", "slices", "erase", "find_singularity_free_loop",
    "has_switching_cycle", "is_proof_net", "first_counterexample",
    "is_mll_net", "check_trip", "net_to_text", "parse_net", "to_dot",
    "POS", "NEG",
]

POS = Polarity.POSITIVE
NEG = Polarity.NEGATIVE
TOP, BOTTOM = "top", "bottom"


@dataclass(frozen=True)
class Place:
    """A resource place; ``label is None`` marks a jump place."""

    id: str
    label: str | None = None

    @property
    def is_jump(self) -> bool:
        return self.label is None


@dataclass(frozen=True)
class Link:
    id: str
    polarity: Polarity
    top: tuple[str, ...] = ()
    bottom: tuple[str, ...] = ()
    jump: str | None = None
    dummy: bool = False
    rule: str | None = None

    @property
    def positive(self) -> bool:
        return self.polarity is POS

    @property
    def transitional(self) -> bool:
        return bool(self.top)

    @property
    def places(self) -> tuple[str, ...]:
        return self.top + self.bottom


@dataclass(frozen=True)
class HyperLink:
    id: str
    polarity: Polarity
    links: tuple[str, ...]


class ProofStructure:
    """Immutable snapshot of a proof structure.

    All collections are kept sorted by id, so two structures built in a
    different order but with the same content behave identically and
    serialize to the same text.
    """

    def __init__(self, places: Iterable[Place] = (), links: Iterable[Link] = (),
                 hyperlinks: Iterable[HyperLink] = (),
                 jump_edges: Iterable[tuple[str, str]] = (),
                 conclusion: Iterable[str] = ()):
        self.places = {p.id: p for p in sorted(places, key=lambda p: p.id)}
        self.links = {l.id: l for l in sorted(links, key=lambda l: l.id)}
        self.hyperlinks = {h.id: h for h in sorted(hyperlinks, key=lambda h: h.id)}
        self.jump_edges = frozenset(jump_edges)
        self.conclusion = tuple(conclusion)
        lower, upper = defaultdict(list), defaultdict(list)
        for link in self.links.values():
            for p in link.top:
                lower[p].append(link.id)
            for p in link.bottom:
                upper[p].append(link.id)
        self._lower = dict(lower)
        self._upper = dict(upper)
        self._hyper_of = {l: h.id for h in self.hyperlinks.values() for l in h.links}
        jf, jt = defaultdict(list), defaultdict(list)
        for x, y in sorted(self.jump_edges):
            jf[x].append(y)
            jt[y].append(x)
        self._jumps_from = dict(jf)
        self._jumps_to = dict(jt)

    @classmethod
    def empty(cls, atoms: Iterable[str], prefix: str = "g") -> ProofStructure:
        """A structure made only of conclusion places labelled by ``atoms``."""
        places = [Place(f"{prefix}{i}", a) for i, a in enumerate(atoms)]
        return cls(places, conclusion=[p.id for p in places])

    # -- incidence ------------------------------------------------------
    def lower(self, place: str) -> list[str]:
        """Links having ``place`` among their top places."""
        return self._lower.get(place, [])

    def upper(self, place: str) -> list[str]:
        """Links having ``place`` among their bottom places."""
        return self._upper.get(place, [])

    def hyper_of(self, link: str) -> str | None:
        return self._hyper_of.get(link)

    def jumps_from(self, link: str) -> list[str]:
        return self._jumps_from.get(link, [])

    def jumps_to(self, link: str) -> list[str]:
        return self._jumps_to.get(link, [])

    def open_places(self) -> list[str]:
        """Typed places no link stands on yet."""
        return [p.id for p in self.places.values()
                if not p.is_jump and not self.upper(p.id)]

    def negative_hyperlinks(self) -> list[HyperLink]:
        return [h for h in self.hyperlinks.values() if h.polarity is NEG]

    def positive_hyperlinks(self) -> list[HyperLink]:
        return [h for h in self.hyperlinks.values() if h.polarity is POS]

    def label(self, place: str) -> str | None:
        return self.places[place].label

    def typed(self, places: Iterable[str]) -> list[str]:
        return [p for p in places if not self.places[p].is_jump]

    # -- value semantics -----------------------------------------------
    def to_text(self) -> str:
        return net_to_text(self)

    @property
    def version(self) -> str:
        return hashlib.sha1(self.to_text().encode()).hexdigest()[:10]

    def __eq__(self, other):
        if not isinstance(other, ProofStructure):
            return NotImplemented
        return self.to_text() == other.to_text()

    def __hash__(self):
        return hash(self.to_text())

    def __repr__(self):
        return (f"ProofStructure({len(self.places)} places, {len(self.links)} links, "
                f"{len(self.hyperlinks)} hyperlinks, {len(self.jump_edges)} jumps)")

    def extend(self, places=(), links=(), hyperlinks=(), jump_edges=(),
               replace_links=()) -> ProofStructure:
        """Copy with additions; ``replace_links`` swaps links by id."""
        swapped = {l.id: l for l in replace_links}
        old = [swapped.get(l.id, l) for l in self.links.values()]
        return ProofStructure(
            list(self.places.values()) + list(places),
            old + list(links),
            list(self.hyperlinks.values()) + list(hyperlinks),
            self.jump_edges | frozenset(jump_edges),
            self.conclusion)


# -- validation -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    condition: str
    ids: tuple[str, ...]
    message: str

    def __str__(self):
        return f"[{self.condition}] {self.message} ({', '.join(self.ids)})"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}


def _toggled(p: ProofStructure, x1: str, x2: str) -> bool:
    targets1 = defaultdict(set)
    for y in p.jumps_from(x1):
        targets1[p.hyper_of(y)].add(y)
    for y2 in p.jumps_from(x2):
        ys = targets1.get(p.hyper_of(y2), set())
        if ys - {y2}:
            return True
    return False


def validate_bps(p: ProofStructure) -> ValidationReport:
    """Check the link, hyperlink and structure conditions.

    Condition names: ``link``, ``hyperlink``, ``jump`` for well-formedness
    and ``disjoint`` .. ``jump-place`` for the four structure conditions.
    """
    out: list[Violation] = []

    def bad(cond, ids, msg):
        out.append(Violation(cond, tuple(ids), msg))

    for link in p.links.values():
        for q in link.places:
            if q not in p.places:
                bad("link", [link.id, q], "unknown place")
        if set(link.top) & set(link.bottom):
            bad("link", [link.id], "top and bottom places overlap")
        typed_bottom = [q for q in link.bottom if q in p.places and not p.places[q].is_jump]
        jumps_in = [q for q in link.places if q in p.places and p.places[q].is_jump]
        if link.positive:
            if not link.bottom:
                bad("link", [link.id], "positive link without bottom place")
            if len(jumps_in) > 1 or (jumps_in and jumps_in[0] not in link.bottom):
                bad("link", [link.id], "positive link jump place must be one bottom place")
        else:
            if len(link.bottom) != 1 or len(typed_bottom) != 1:
                bad("link", [link.id], "negative link needs exactly one bottom place")
            if len(jumps_in) > 1 or (jumps_in and jumps_in[0] not in link.top):
                bad("link", [link.id], "negative link jump place must be one top place")
        if link.jump is not None and link.jump not in jumps_in:
            bad("link", [link.id], "declared jump place is not a jump place of the link")
        if p.hyper_of(link.id) is None:
            bad("hyperlink", [link.id], "link belongs to no hyperlink")

    seen_member = defaultdict(list)
    for h in p.hyperlinks.values():
        members = [p.links[l] for l in h.links if l in p.links]
        if len(members) != len(h.links) or not members:
            bad("hyperlink", [h.id], "unknown or missing member links")
            continue
        for l in h.links:
            seen_member[l].append(h.id)
        if any(m.polarity is not h.polarity for m in members):
            bad("hyperlink", [h.id], "member polarity differs from hyperlink polarity")
        if h.polarity is NEG and len({m.bottom for m in members}) != 1:
            bad("hyperlink", [h.id], "negative hyperlink members must share their bottom place")
        for a, b in itertools.combinations(members, 2):
            if not set(p.typed(a.places)) & set(p.typed(b.places)):
                bad("hyperlink", [h.id, a.id, b.id], "member links share no place")
    for l, hs in seen_member.items():
        if len(hs) > 1:
            bad("hyperlink", [l, *hs], "link in several hyperlinks")

    for x, y in sorted(p.jump_edges):
        lx, ly = p.links.get(x), p.links.get(y)
        if lx is None or ly is None or not lx.positive or ly.positive:
            bad("jump", [x, y], "jump edges go from a positive to a negative link")
        elif lx.jump is None or ly.jump is None:
            bad("jump", [x, y], "jump edge endpoint without jump place")

    # disjoint: top (bottom) places of distinct hyperlinks are disjoint
    for side in (TOP, BOTTOM):
        owner = {}
        for h in p.hyperlinks.values():
            mine = {q for l in h.links if l in p.links for q in getattr(p.links[l], side)}
            for q in sorted(mine):
                if q in owner:
                    bad("disjoint", [owner[q], h.id, q], f"{side} place shared by two hyperlinks")
                else:
                    owner[q] = h.id

    # polarity: adjacent hyperlinks have opposite polarity
    for q, below in p._lower.items():
        if q in p.places and p.places[q].is_jump:
            continue
        for lo in below:
            for up in p.upper(q):
                hl, hu = p.hyper_of(lo), p.hyper_of(up)
                if hl and hu and hl != hu and \
                        p.hyperlinks[hl].polarity is p.hyperlinks[hu].polarity:
                    bad("polarity", [hl, hu, q], "adjacent hyperlinks with the same polarity")

    # toggled: every pair of links of a positive hyperlink is toggled
    for h in p.positive_hyperlinks():
        for x1, x2 in itertools.combinations(h.links, 2):
            if not _toggled(p, x1, x2):
                bad("toggled", [h.id, x1, x2], "pair of positive links not toggled")

    # jump-place: links do not share jump places
    users = defaultdict(list)
    for link in p.links.values():
        for q in link.places:
            if q in p.places and p.places[q].is_jump:
                users[q].append(link.id)
    for q, ls in users.items():
        if len(ls) > 1:
            bad("jump-place", [q, *ls], "jump place shared by several links")

    return ValidationReport(out)


# -- slices -----------------------------------------------------------------

@dataclass(frozen=True)
class Slice:
    structure: ProofStructure = field(repr=False, compare=False)
    resolution: tuple[tuple[str, str], ...]
    links: frozenset[str]
    places: frozenset[str]
    jump_edges: frozenset[tuple[str, str]]

    def with_jumps(self, jumps: Iterable[tuple[str, str]]) -> Slice:
        return replace(self, jump_edges=frozenset(jumps))

    def negative_links(self) -> list[str]:
        s = self.structure
        return sorted(l for l in self.links if not s.links[l].positive)

    def positive_links(self) -> list[str]:
        s = self.structure
        return sorted(l for l in self.links if s.links[l].positive)

    @property
    def chosen(self) -> dict[str, str]:
        return dict(self.resolution)


def erase(p: ProofStructure, chosen: dict[str, str]) -> tuple[frozenset, frozenset]:
    """Alive links and places after resolving the hyperlinks in ``chosen``."""
    dead_links = set()
    for h, keep in chosen.items():
        dead_links.update(l for l in p.hyperlinks[h].links if l != keep)
    dead_places: set[str] = set()
    changed = True
    while changed:
        changed = False
        for q in p.places:
            if q in dead_places:
                continue
            below = p.lower(q)
            if below and all(l in dead_links for l in below):
                dead_places.add(q)
                changed = True
        for link in p.links.values():
            if link.id in dead_links:
                continue
            if any(q in dead_places for q in link.places) or \
                    (link.positive and not _dependencies_alive(p, link.id, dead_links)):
                dead_links.add(link.id)
                changed = True
    return (frozenset(p.links) - dead_links, frozenset(p.places) - dead_places)


def _dependencies_alive(p, x, dead_links) -> bool:
    per_hyper = defaultdict(list)
    for y in p.jumps_from(x):
        per_hyper[p.hyper_of(y)].append(y)
    return all(any(y not in dead_links for y in ys) for ys in per_hyper.values())


def _hyperlink_order(p: ProofStructure) -> list[str]:
    """Negative hyperlinks ordered bottom-up (ties by id)."""
    ts = graphlib.TopologicalSorter({h: set() for h in p.hyperlinks})
    for q, below in p._lower.items():
        for lo in below:
            for up in p.upper(q):
                a, b = p.hyper_of(lo), p.hyper_of(up)
                if a and b and a != b:
                    ts.add(b, a)
    for x, y in p.jump_edges:
        a, b = p.hyper_of(y), p.hyper_of(x)
        if a and b and a != b:
            ts.add(b, a)
    try:
        order = []
        ts.prepare()
        while ts.is_active():
            ready = sorted(ts.get_ready())
            order.extend(ready)
            ts.done(*ready)
    except graphlib.CycleError:
        order = list(p.hyperlinks)
    return [h for h in order if p.hyperlinks[h].polarity is NEG]


def slices(p: ProofStructure) -> Iterator[Slice]:
    """Lazily enumerate the distinct slices of ``p``.

    Hyperlinks are resolved bottom-up and a hyperlink already wiped out by
    earlier choices is not branched on, so every yielded slice is distinct.
    """
    order = _hyperlink_order(p)
    seen = set()

    def rec(i, chosen):
        alive_links, alive_places = erase(p, chosen)
        while i < len(order) and not any(l in alive_links for l in p.hyperlinks[order[i]].links):
            i += 1
        if i == len(order):
            if alive_links not in seen:
                seen.add(alive_links)
                jumps = frozenset((x, y) for x, y in p.jump_edges
                                  if x in alive_links and y in alive_links)
                yield Slice(p, tuple(sorted(chosen.items())), alive_links, alive_places, jumps)
            return
        h = order[i]
        for l in p.hyperlinks[h].links:
            if l in alive_links:
                yield from rec(i + 1, {**chosen, h: l})

    yield from rec(0, {})


def slice_for(p: ProofStructure, chosen: dict[str, str]) -> Slice:
    """The slice of an explicit (possibly partial) resolution."""
    links, places = erase(p, chosen)
    jumps = frozenset((x, y) for x, y in p.jump_edges if x in links and y in links)
    return Slice(p, tuple(sorted(chosen.items())), links, places, jumps)


# -- trips ------------------------------------------------------------------

@dataclass(frozen=True)
class Connector:
    """An edge of the trip graph: ``lower`` sees it on top, ``upper`` at bottom."""

    id: str
    lower: str
    upper: str
    jump: bool = False

    def side_at(self, link: str) -> str:
        return TOP if link == self.lower else BOTTOM

    def other(self, link: str) -> str:
        return self.upper if link == self.lower else self.lower


class TripGraph:
    def __init__(self, s: Slice):
        p = s.structure
        self.slice = s
        self.connectors: list[Connector] = []
        for q in sorted(s.places):
            if p.places[q].is_jump:
                continue
            pairs = [(lo, up) for lo in p.lower(q) for up in p.upper(q)
                     if lo in s.links and up in s.links and lo != up]
            # a place seen by several pairs yields one connector per pair
            for lo, up in pairs:
                cid = q if len(pairs) == 1 else f"{q}/{lo}/{up}"
                self.connectors.append(Connector(cid, lo, up))
        for x, y in sorted(s.jump_edges):
            self.connectors.append(Connector(f"{x}>{y}", y, x, jump=True))
        self.ports: dict[str, list[tuple[Connector, str]]] = {l: [] for l in sorted(s.links)}
        for c in self.connectors:
            self.ports[c.lower].append((c, TOP))
            self.ports[c.upper].append((c, BOTTOM))
        self.negative = {l for l in s.links if not p.links[l].positive}

    def allowed(self, link: str, entry: str, exit: str) -> bool:
        return not (link in self.negative and entry == TOP and exit == TOP)

    def core(self) -> set[str]:
        """Links with at least two distinct neighbours after pruning leaves."""
        nbrs = {l: {c.other(l) for c, _ in ports} for l, ports in self.ports.items()}
        alive = set(nbrs)
        stack = [l for l in alive if len(nbrs[l]) < 2]
        while stack:
            l = stack.pop()
            if l not in alive:
                continue
            alive.discard(l)
            for n in nbrs[l]:
                nbrs[n].discard(l)
                if n in alive and len(nbrs[n]) < 2:
                    stack.append(n)
        return alive


@dataclass(frozen=True)
class TripStep:
    link: str
    entry: str
    exit: str


@dataclass(frozen=True)
class Trip:
    """A loop trip: ``connectors[i]`` joins ``steps[i]`` to the next step."""

    steps: tuple[TripStep, ...]
    connectors: tuple[str, ...]

    @property
    def links(self) -> list[str]:
        return [s.link for s in self.steps]

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        parts = []
        for step, conn in zip(self.steps, self.connectors):
            parts.append(f"{step.link}[{step.entry[0]}>{step.exit[0]}] -{conn}->")
        return " ".join(parts) + f" {self.steps[0].link}"


def find_singularity_free_loop(s: Slice) -> Trip | None:
    """A proper loop of ``s`` with no singularity, or ``None``.

    Depth-first search for a simple cycle of at least three links that never
    crosses a negative link from top to top.  Each cycle is looked for from
    its smallest link only, and links that cannot lie on any cycle are pruned
    first.
    """
    g = TripGraph(s)
    core = g.core()
    order = sorted(core)
    rank = {l: i for i, l in enumerate(order)}
    for start in order:
        trip = _cycle_from(g, start, core, rank)
        if trip is not None:
            return trip
    return None


def _cycle_from(g: TripGraph, start, core, rank):
    path: list[str] = [start]
    entries: list[str | None] = [None]
    exits: list[str] = []
    conns: list[Connector] = []
    on_path = {start}

    def dfs(cur, entry_conn, entry_side):
        for conn, side in g.ports[cur]:
            if conn is entry_conn:
                continue
            if entry_side is not None and not g.allowed(cur, entry_side, side):
                continue
            nxt = conn.other(cur)
            if nxt not in core:
                continue
            nxt_side = conn.side_at(nxt)
            if nxt == start:
                if len(path) >= 3 and g.allowed(start, nxt_side, exits[0]):
                    exits.append(side)
                    conns.append(conn)
                    return True
                continue
            if nxt in on_path or rank[nxt] < rank[start]:
                continue
            exits.append(side)
            conns.append(conn)
            path.append(nxt)
            entries.append(nxt_side)
            on_path.add(nxt)
            if dfs(nxt, conn, nxt_side):
                return True
            on_path.discard(nxt)
            path.pop()
            entries.pop()
            exits.pop()
            conns.pop()
        return False

    if not dfs(start, None, None):
        return None
    entries[0] = conns[-1].side_at(start)
    steps = tuple(TripStep(l, e, x) for l, e, x in zip(path, entries, exits))
    return Trip(steps, tuple(c.id for c in conns))


def check_trip(s: Slice, trip: Trip) -> list[str]:
    """Problems with ``trip`` as a proper, closed, singularity-free loop of ``s``."""
    problems = []
    g = TripGraph(s)
    by_id = defaultdict(list)
    for c in g.connectors:
        by_id[c.id].append(c)
    links = trip.links
    if len(set(links)) != len(links):
        problems.append("a link is visited twice")
    if len(set(links)) < 3:
        problems.append("not proper: fewer than three links")
    n = len(trip.steps)
    for i, step in enumerate(trip.steps):
        nxt = trip.steps[(i + 1) % n]
        cands = [c for c in by_id.get(trip.connectors[i], [])
                 if {c.lower, c.upper} == {step.link, nxt.link}]
        if not cands:
            problems.append(f"{step.link} and {nxt.link} are not joined by {trip.connectors[i]}")
            continue
        c = cands[0]
        if c.side_at(step.link) != step.exit or c.side_at(nxt.link) != nxt.entry:
            problems.append(f"sides of {c.id} do not match the trip")
        if step.link not in s.links:
            problems.append(f"{step.link} is not in the slice")
    for step in trip.steps:
        if step.link in g.negative and step.entry == TOP and step.exit == TOP:
            problems.append(f"singularity at {step.link}")
    return problems


def has_switching_cycle(s: Slice) -> bool:
    """Reference check: does some switching of ``s`` contain a cycle?

    A switching keeps, for each negative link, its bottom connectors and just
    one of its top connectors.  Parallel connectors count as a single edge,
    so two-link loops never register.
    """
    g = TripGraph(s)
    core = g.core()
    choices = []
    for l in sorted(core & g.negative):
        tops = [c.id for c, side in g.ports[l] if side == TOP]
        choices.append([(l, t) for t in tops] or [(l, None)])
    for pick in itertools.product(*choices):
        kept = dict(pick)
        parent = {l: l for l in core}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        edges = set()
        for c in g.connectors:
            if c.lower not in core or c.upper not in core:
                continue
            if c.lower in g.negative and kept.get(c.lower) != c.id:
                continue
            edges.add(frozenset((c.lower, c.upper)))
        for e in sorted(edges, key=sorted):
            a, b = (find(x) for x in e)
            if a == b:
                return True
            parent[a] = b
    return False


def first_counterexample(p: ProofStructure) -> tuple[Slice, Trip] | None:
    for s in slices(p):
        trip = find_singularity_free_loop(s)
        if trip is not None:
            return s, trip
    return None


def is_proof_net(p: ProofStructure) -> bool:
    return first_counterexample(p) is None


def is_mll_net(p: ProofStructure) -> bool:
    """Direct check for structures without additive choice.

    Runs the switching reference check on the whole structure, with no
    slice enumeration.  Raises ``ValueError`` when a negative hyperlink has
    more than one link.
    """
    if any(len(h.links) > 1 for h in p.negative_hyperlinks()):
        raise ValueError("structure has additive (with) hyperlinks")
    whole = Slice(p, (), frozenset(p.links), frozenset(p.places), p.jump_edges)
    return not has_switching_cycle(whole)


# -- text and DOT -----------------------------------------------------------

def _ids(ids) -> str:
    return ",".join(ids)


def net_to_text(p: ProofStructure) -> str:
    lines = []
    for q in p.places.values():
        lines.append(f"place {q.id}" + (f" {q.label}" if q.label is not None else ""))
    for l in p.links.values():
        sign = "+" if l.positive else "-"
        parts = [f"link {l.id} {sign} top={_ids(l.top)} bottom={_ids(l.bottom)}"]
        if l.jump is not None:
            parts.append(f"jump={l.jump}")
        if l.dummy:
            parts.append("dummy")
        if l.rule is not None:
            parts.append(f"rule={l.rule}")
        lines.append(" ".join(parts))
    for h in p.hyperlinks.values():
        sign = "+" if h.polarity is POS else "-"
        lines.append(f"hyper {h.id} {sign} links={_ids(h.links)}")
    for x, y in sorted(p.jump_edges):
        lines.append(f"jumpedge {x} {y}")
    lines.append(f"conclusion {' '.join(p.conclusion)}".rstrip())
    return "\n".join(lines) + "\n"


def _split_ids(value: str) -> tuple[str, ...]:
    return tuple(v for v in value.split(",") if v)


_COMMENT = re.compile(r"(^|\s)#.*")


def parse_net(text: str) -> ProofStructure:
    """Read the line format written by ``net_to_text``; ``#`` starts a
    comment at the beginning of a line or after whitespace."""
    places, links, hypers, jumps, conclusion = [], [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw).strip()
        if not line:
            continue
        kw, *rest = line.split()
        try:
            if kw == "place":
                if len(rest) not in (1, 2):
                    raise ValueError("expected 'place <id> [label]'")
                places.append(Place(rest[0], rest[1] if len(rest) == 2 else None))
            elif kw == "link":
                lid, sign, *opts = rest
                kv = dict(o.split("=", 1) for o in opts if "=" in o)
                flags = {o for o in opts if "=" not in o}
                if sign not in "+-" or flags - {"dummy"}:
                    raise ValueError("bad link line")
                links.append(Link(lid, POS if sign == "+" else NEG,
                                  _split_ids(kv.get("top", "")),
                                  _split_ids(kv.get("bottom", "")),
                                  kv.get("jump"), "dummy" in flags, kv.get("rule")))
            elif kw == "hyper":
                hid, sign, opt = rest
                if sign not in "+-" or not opt.startswith("links="):
                    raise ValueError("bad hyper line")
                hypers.append(HyperLink(hid, POS if sign == "+" else NEG,
                                        _split_ids(opt[len("links="):])))
            elif kw == "jumpedge":
                x, y = rest
                jumps.append((x, y))
            elif kw == "conclusion":
                conclusion.extend(rest)
            else:
                raise ValueError(f"unknown keyword {kw!r}")
        except ValueError as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc}") from None
    return ProofStructure(places, links, hypers, jumps, conclusion)


def _q(s: str) -> str:
    return '"' + s.replace('"', r'\"') + '"'


def to_dot(p: ProofStructure, highlight: Iterable[str] = (), name: str = "net") -> str:
    """Graphviz source: triangles for negative links, circles for positive
    ones, places as labelled edges and jump edges dashed."""
    hot = set(highlight)
    out = [f"digraph {_q(name)} {{", "  rankdir=BT;", "  node [fontsize=10];"]
    for h in p.hyperlinks.values():
        out.append(f"  subgraph {_q('cluster_' + h.id)} {{ style=dotted; label={_q(h.id)};")
        for l in h.links:
            link = p.links[l]
            shape = "circle" if link.positive else "triangle"
            style = ["filled"] if l in hot else []
            if link.dummy:
                style.append("dashed")
            attrs = f"shape={shape}, label={_q(link.rule or l.rsplit('.', 1)[-1])}"
            if style:
                attrs += f", style={_q(','.join(style))}"
            if l in hot:
                attrs += ", fillcolor=grey"
            out.append(f"    {_q(l)} [{attrs}];")
        out.append("  }")
    for q in p.places.values():
        if q.is_jump:
            continue
        below, above = p.lower(q.id), p.upper(q.id)
        ends_lo = below or [f"in:{q.id}"]
        ends_up = above or [f"out:{q.id}"]
        for end in (ends_lo if not below else []) + (ends_up if not above else []):
            out.append(f"  {_q(end)} [shape=plaintext, label={_q(q.label)}];")
        for lo in ends_lo:
            for up in ends_up:
                out.append(f"  {_q(lo)} -> {_q(up)} [label={_q(q.label)}, arrowhead=none];")
    for x, y in sorted(p.jump_edges):
        out.append(f"  {_q(x)} -> {_q(y)} [style=dashed, color=blue, constraint=false];")
    out.append("}")
    return "\n".join(out) + "\n"
