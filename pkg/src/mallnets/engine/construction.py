"""Bindings and expansion of a structure by one bipole.

An expansion puts the elementary structure of a bipole on top of open
places whose labels match its trigger.  Every id it creates is derived from
the bipole and the places it consumes, so building the same net along two
different orders gives the same serialization.

Id scheme for a bipole with head ``h`` (``H`` is the hyperlink id)::

    H = h@<digest>          positive hyperlink
    H+<v>                   positive link of variant v
    H.m<l>                  place between the positive link and monopole leaf l
    H.m<l>-                 negative hyperlink of that monopole
    H.m<l>-<j>              its j-th with-branch
    H.m<l>.<k>              top place of atom k of the monopole
    <link>*                 jump place of a link
"""
from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from ..bipolarizer import Bipole, monopole_atoms, monopole_branches
from ..errors import BindingStale, StructureViolation
from ..formulas import NegAtom, PosAtom, to_text
from ..proofnet import NEG, POS, HyperLink, Link, Place, ProofStructure, slices, validate_bps

__all__ = [
    "Binding", "Expansion", "match_trigger", "candidate_bindings",
    "merge_bindings", "plan_expansion", "expand", "hyperlink_id",
    "check_new_violations",
]


@dataclass(frozen=True)
class Binding:
    """Which variants of ``bipole`` to add and which places they consume.

    ``places`` maps leaf positions of the trigger atoms to place ids.
    ``jumps`` gives explicit jump targets per variant; ``None`` derives them.
    """

    bipole: Bipole
    variants: tuple[int, ...]
    places: tuple[tuple[int, str], ...]
    jumps: tuple[tuple[int, tuple[str, ...]], ...] | None = None

    @property
    def place_map(self) -> dict[int, str]:
        return dict(self.places)

    @property
    def key(self) -> tuple:
        return (self.bipole.head, self.variants, self.places, self.jumps)

    def __str__(self):
        where = ", ".join(f"{leaf}:{q}" for leaf, q in self.places)
        vs = ",".join(map(str, self.variants))
        return f"{self.bipole.head}#{vs} on [{where}]"


def variant_leaves(b: Bipole) -> list[tuple[int, ...]]:
    return b.variants()


def trigger_leaves(b: Bipole, variant: int) -> list[int]:
    leaves = b.leaves
    return [i for i in variant_leaves(b)[variant - 1] if isinstance(leaves[i], PosAtom)]


def monopole_leaves(b: Bipole, variant: int) -> list[int]:
    leaves = b.leaves
    return [i for i in variant_leaves(b)[variant - 1] if not isinstance(leaves[i], PosAtom)]


def common_leaves(b: Bipole) -> set[int]:
    vs = variant_leaves(b)
    return set(vs[0]).intersection(*vs[1:]) if vs else set()


def hyperlink_id(b: Bipole, place_map: dict[int, str]) -> str:
    """Canonical id of the positive hyperlink for ``b`` on these places.

    Only places bound to leaves common to every variant enter the digest,
    so later variants on the same head place join the same hyperlink.
    """
    common = sorted(i for i in common_leaves(b) if i in place_map)
    keys = [place_map[i] for i in common] or [place_map[i] for i in sorted(place_map)]
    digest = hashlib.sha1(f"{b}|{','.join(keys)}".encode()).hexdigest()[:6]
    return f"{b.head}@{digest}"


def _available(p: ProofStructure, place: str, b: Bipole, leaf: int) -> bool:
    if place not in p.places or p.places[place].is_jump:
        return False
    users = p.upper(place)
    if not users:
        return True
    if leaf not in common_leaves(b):
        return False
    hs = {p.hyper_of(u) for u in users}
    return len(hs) == 1 and next(iter(hs)).startswith(f"{b.head}@")


def _co_survive(p: ProofStructure, places: list[str], sl) -> bool:
    """Some slice keeps all ``places`` and no foreign link consumes them."""
    for s in sl:
        if all(q in s.places for q in places):
            if all(not any(u in s.links for u in p.upper(q)) or
                   all(p.links[u].positive for u in p.upper(q)) for q in places):
                return True
    return False


def match_trigger(p: ProofStructure, b: Bipole) -> list[Binding]:
    """Single-variant bindings of ``b``: every injective, label-respecting
    assignment of each variant's trigger to consumable places."""
    leaves = b.leaves
    sl = list(slices(p))
    out = []
    for v in range(1, len(variant_leaves(b)) + 1):
        trig = trigger_leaves(b, v)
        options = [[q for q in p.places if p.places[q].label == leaves[i].name
                     and _available(p, q, b, i)] for i in trig]
        for choice in itertools.product(*options):
            if len(set(choice)) != len(choice):
                continue
            pm = dict(zip(trig, choice))
            hid = hyperlink_id(b, pm)
            if f"{hid}+{v}" in p.links:
                continue
            if any(p.upper(q) and p.hyper_of(p.upper(q)[0]) != hid for q in choice):
                continue
            if not _co_survive(p, list(choice), sl):
                continue
            out.append(Binding(b, (v,), tuple(sorted(pm.items()))))
    return out


def merge_bindings(bindings: list[Binding]) -> Binding:
    """One binding covering several variants; raises ``ValueError`` when the
    inputs disagree on a leaf or would consume a place twice."""
    if not bindings:
        raise ValueError("nothing to merge")
    b = bindings[0].bipole
    pm: dict[int, str] = {}
    variants: set[int] = set()
    for bind in bindings:
        if bind.bipole != b:
            raise ValueError("bindings of different bipoles")
        if variants & set(bind.variants):
            raise ValueError("variant bound twice")
        variants |= set(bind.variants)
        for leaf, q in bind.places:
            if pm.setdefault(leaf, q) != q:
                raise ValueError(f"leaf {leaf} bound to two places")
    if len(set(pm.values())) != len(pm):
        raise ValueError("a place is consumed twice")
    return Binding(b, tuple(sorted(variants)), tuple(sorted(pm.items())))


def candidate_bindings(p: ProofStructure, b: Bipole) -> list[Binding]:
    """Maximal merges of the single-variant bindings of ``b``, largest first."""
    singles = match_trigger(p, b)
    groups: dict[str, list[Binding]] = {}
    for one in singles:
        groups.setdefault(hyperlink_id(b, one.place_map), []).append(one)
    found: dict[tuple, Binding] = {}

    def extend(group, rest):
        grown = False
        for i, other in enumerate(rest):
            try:
                merge_bindings(group + [other])
            except ValueError:
                continue
            grown = True
            extend(group + [other], rest[i + 1:])
        if not grown:
            m = merge_bindings(group)
            found.setdefault(m.key, m)

    for members in groups.values():
        for i, first in enumerate(members):
            extend([first], members[i + 1:])

    def covered(m):
        return any(o is not m and set(m.variants) < set(o.variants)
                   and set(m.places) <= set(o.places) for o in found.values())

    keep = [m for m in found.values() if not covered(m)]
    return sorted(keep, key=lambda m: (-len(m.variants), m.variants, m.places))


@dataclass
class Expansion:
    """Everything an expansion adds, computed without touching ``p``."""

    hid: str
    positive_links: list[Link]
    places: list[Place] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    hyperlinks: list[HyperLink] = field(default_factory=list)
    jump_edges: list[tuple[str, str]] = field(default_factory=list)
    replaced: list[Link] = field(default_factory=list)
    targets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def apply(self, p: ProofStructure) -> ProofStructure:
        return _merge_hyperlinks(p, self)


def _auto_targets(p: ProofStructure, bottom: list[str]) -> tuple[str, ...]:
    """Creators of consumed places that stand in a proper part of their
    with-hyperlink; jumping to them records which branch the link needs."""
    targets = []
    for q in bottom:
        per_hyper = defaultdict(list)
        for c in p.lower(q):
            if not p.links[c].positive and p.hyper_of(c) is not None:
                per_hyper[p.hyper_of(c)].append(c)
        for h, cs in sorted(per_hyper.items()):
            if len(cs) < len(p.hyperlinks[h].links):
                targets.extend(c for c in cs if c not in targets)
    return tuple(targets)


def plan_expansion(p: ProofStructure, bind: Binding) -> Expansion:
    """Check ``bind`` against ``p`` and lay out the new elements."""
    b = bind.bipole
    leaves = b.leaves
    pm = bind.place_map
    nvariants = len(variant_leaves(b))
    for v in bind.variants:
        if not 1 <= v <= nvariants:
            raise BindingStale(f"{b.head} has no variant {v}")
        for i in trigger_leaves(b, v):
            if i not in pm:
                raise BindingStale(f"trigger leaf {i} of {b.head}#{v} is unbound")
    for leaf, q in bind.places:
        if q not in p.places:
            raise BindingStale(f"place {q} does not exist")
        if p.places[q].label != leaves[leaf].name:
            raise BindingStale(f"place {q} is labelled {p.places[q].label}, "
                               f"expected {leaves[leaf].name}")
    hid = hyperlink_id(b, pm)
    existing = p.hyperlinks.get(hid)
    for leaf, q in bind.places:
        users = p.upper(q)
        if users and (existing is None or any(p.hyper_of(u) != hid for u in users)
                      or leaf not in common_leaves(b)):
            raise BindingStale(f"place {q} is already consumed")
    for v in bind.variants:
        if f"{hid}+{v}" in p.links:
            raise BindingStale(f"{hid}+{v} already exists")

    ex = Expansion(hid, [])
    made_places = set(p.places)
    explicit = dict(bind.jumps) if bind.jumps is not None else None

    for v in bind.variants:
        lid = f"{hid}+{v}"
        bottom = [pm[i] for i in trigger_leaves(b, v)]
        top = []
        for leaf in monopole_leaves(b, v):
            inner = f"{hid}.m{leaf}"
            top.append(inner)
            if inner in made_places:
                continue
            made_places.add(inner)
            mono = leaves[leaf]
            ex.places.append(Place(inner, to_text(mono).replace(" ", "")))
            atoms = monopole_atoms(mono)
            for k, atom in enumerate(atoms):
                ex.places.append(Place(f"{inner}.{k}", atom))
                made_places.add(f"{inner}.{k}")
            members = []
            for j, branch in enumerate(monopole_branches(mono), start=1):
                nid = f"{inner}-{j}"
                members.append(nid)
                ex.links.append(Link(nid, NEG, tuple(f"{inner}.{k}" for k in branch), (inner,),
                                     dummy=isinstance(mono, NegAtom)))
            ex.hyperlinks.append(HyperLink(f"{inner}-", NEG, tuple(members)))
        if explicit is None:
            targets = _auto_targets(p, bottom)
        else:
            targets = tuple(explicit.get(v, ()))
        for y in targets:
            if y not in p.links or p.links[y].positive:
                raise BindingStale(f"jump target {y} is not a negative link")
        jump = f"{lid}*" if targets else None
        if jump:
            ex.places.append(Place(jump))
            bottom.append(jump)
        link = Link(lid, POS, tuple(top), tuple(bottom), jump=jump, rule=f"{b.head}#{v}")
        ex.links.append(link)
        ex.positive_links.append(link)
        ex.targets[lid] = targets
        ex.jump_edges.extend((lid, y) for y in targets)

    for y in sorted({y for ts in ex.targets.values() for y in ts}):
        old = p.links[y]
        if old.jump is None:
            jp = f"{y}*"
            ex.places.append(Place(jp))
            ex.replaced.append(Link(old.id, old.polarity, old.top + (jp,), old.bottom, jp,
                                    old.dummy, old.rule))

    members = tuple(l.id for l in ex.positive_links)
    if existing is not None:
        ex.hyperlinks.append(HyperLink(hid, POS, tuple(sorted(existing.links + members))))
    else:
        ex.hyperlinks.append(HyperLink(hid, POS, members))
    return ex


def _merge_hyperlinks(p: ProofStructure, ex: Expansion) -> ProofStructure:
    hypers = {h.id: h for h in p.hyperlinks.values()}
    for h in ex.hyperlinks:
        hypers[h.id] = h
    swapped = {l.id: l for l in ex.replaced}
    links = [swapped.get(l.id, l) for l in p.links.values()] + ex.links
    return ProofStructure(list(p.places.values()) + ex.places, links, hypers.values(),
                          p.jump_edges | frozenset(ex.jump_edges), p.conclusion)


def expand(p: ProofStructure, bind: Binding) -> ProofStructure:
    """The structure ``p`` extended by ``bind``; ``p`` itself is untouched.

    Raises ``BindingStale`` when the binding no longer fits ``p`` and
    ``StructureViolation`` when the result breaks a structure condition that
    ``p`` satisfied.
    """
    new = plan_expansion(p, bind).apply(p)
    check_new_violations(p, new, bind)
    return new


def check_new_violations(old: ProofStructure, new: ProofStructure, bind: Binding) -> None:
    """Raise ``StructureViolation`` for conditions ``new`` breaks but ``old`` kept."""
    before = {str(v) for v in validate_bps(old).violations}
    fresh = [v for v in validate_bps(new).violations if str(v) not in before]
    if fresh:
        raise StructureViolation(f"expanding {bind} breaks the structure: {fresh[0]}", fresh)
