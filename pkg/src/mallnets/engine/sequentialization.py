"""Between sequent proofs and proof nets.

``desequentialize`` replays a proof as expansions: applications of the same
bipole on the same head place in different branches become variants of one
positive hyperlink.  ``sequentialize`` searches the net for a proof by
repeatedly firing a positive link whose bottom places are all present,
backtracking over the order and over how the context is split.
"""
from __future__ import annotations

import graphlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..bipolarizer import Bipole, InferenceScheme, monopole_branches
from ..errors import NotCorrect
from ..proofnet import ProofStructure, is_proof_net
from ..sequent import ProofTree, Sequent, check_proof, schemes_by_label
from .construction import Binding, hyperlink_id, monopole_leaves, trigger_leaves
from .transactions import try_transaction

__all__ = ["desequentialize", "sequentialize"]


@dataclass
class _Group:
    bipole: Bipole
    places: dict[int, str] = field(default_factory=dict)
    variants: set[int] = field(default_factory=set)


def _take(pool: list[tuple[str, str]], atom: str) -> str:
    for i, (label, q) in enumerate(pool):
        if label == atom:
            del pool[i]
            return q
    raise NotCorrect(f"no place for atom {atom!r}")


def desequentialize(proof: ProofTree, program: Iterable[Bipole] | None = None,
                    validate: str = "local") -> ProofStructure:
    """The proof net of ``proof``, built by one transaction per hyperlink."""
    if program is not None:
        report = check_proof(proof, program)
        if not report:
            raise NotCorrect("; ".join(report.errors))
    root = ProofStructure.empty(proof.conclusion.atoms)
    groups: dict[str, _Group] = {}

    def visit(node: ProofTree, places: list[tuple[str, str]]):
        rule = node.rule
        b = rule.bipole
        if b is None:
            raise NotCorrect(f"rule {rule.label} carries no bipole")
        pool = sorted(places, key=lambda lq: lq[1])
        leaves = b.leaves
        pm = {i: _take(pool, leaves[i].name) for i in trigger_leaves(b, rule.variant)}
        hid = hyperlink_id(b, pm)
        g = groups.setdefault(hid, _Group(b))
        for leaf, q in pm.items():
            if g.places.setdefault(leaf, q) != q:
                raise NotCorrect(f"{hid}: leaf {leaf} consumed at two places")
        g.variants.add(rule.variant)

        monos = monopole_leaves(b, rule.variant)
        branch_iters = {gi: iter(monopole_branches(leaves[leaf])) for gi, leaf in enumerate(monos)}
        contexts: dict[int, list[tuple[str, str]]] = {}
        for child, atoms, gi in zip(node.children, rule.premises, rule.groups):
            if gi not in contexts:
                need = child.conclusion.counter - Counter(atoms)
                contexts[gi] = [(a, _take(pool, a)) for a in sorted(need.elements())]
            branch = next(branch_iters[gi])
            inner = f"{hid}.m{monos[gi]}"
            fresh = [(atom, f"{inner}.{k}") for atom, k in zip(atoms, branch)]
            visit(child, contexts[gi] + fresh)

    visit(proof, [(root.places[q].label, q) for q in root.conclusion])

    ts = graphlib.TopologicalSorter({h: set() for h in groups})
    for h, g in groups.items():
        for q in g.places.values():
            for other in groups:
                if other != h and q.startswith(f"{other}.m"):
                    ts.add(h, other)
    order = []
    ts.prepare()
    while ts.is_active():
        ready = sorted(ts.get_ready())
        order.extend(ready)
        ts.done(*ready)

    p = root
    for i, hid in enumerate(order):
        g = groups[hid]
        bind = Binding(g.bipole, tuple(sorted(g.variants)), tuple(sorted(g.places.items())))
        tx, p = try_transaction(p, bind, txid=f"d{i}", validate=validate)
        if not tx.committed:
            raise NotCorrect(f"expansion {bind} rejected: {tx.error}")
    return p


def _scheme_of(p: ProofStructure, x: str) -> InferenceScheme:
    link = p.links[x]
    name, _, variant = (link.rule or f"{x}#1").rpartition("#")
    trigger = tuple(p.label(q) for q in p.typed(link.bottom))
    premises, groups = [], []
    for gi, inner in enumerate(link.top):
        hyper = p.hyperlinks[p.hyper_of(p.upper(inner)[0])]
        for y in hyper.links:
            premises.append(tuple(p.label(q) for q in p.typed(p.links[y].top)))
            groups.append(gi)
    return InferenceScheme(name, int(variant), trigger, tuple(premises), tuple(groups))


def sequentialize(p: ProofStructure, program: Iterable[Bipole] | None = None) -> ProofTree:
    """A sequent proof of the conclusion of ``p``.

    Positive links are tried in id order; the search is exhaustive, so a
    proof is found whenever one exists.  Raises ``NotCorrect`` when ``p`` is
    not a proof net or has no proof (for instance when places stay open).
    """
    if not is_proof_net(p):
        raise NotCorrect("structure is not a proof net")
    known = schemes_by_label(program) if program is not None else {}
    positives = sorted(l for l in p.links if p.links[l].positive)
    memo: dict[tuple, ProofTree | None] = {}

    def scheme(x):
        s = _scheme_of(p, x)
        prog = known.get(s.label)
        if program is None:
            return s
        if prog is None or Counter(prog.trigger) != Counter(s.trigger) or \
                [Counter(a) for a in prog.premises] != [Counter(a) for a in s.premises]:
            raise NotCorrect(f"link {x} does not implement a program rule")
        return prog

    def usable(x, places, chosen):
        link = p.links[x]
        if not set(p.typed(link.bottom)) <= places:
            return False
        for y in p.jumps_from(x):
            h = p.hyper_of(y)
            if h in chosen and chosen[h] not in p.jumps_from(x):
                return False
        return True

    def prove(places: frozenset, chosen: dict) -> ProofTree | None:
        key = (places, tuple(sorted(chosen.items())))
        if key in memo:
            return memo[key]
        memo[key] = None
        seq = Sequent(tuple(p.label(q) for q in places))
        for x in positives:
            if not usable(x, places, chosen):
                continue
            link = p.links[x]
            rest = sorted(places - set(p.typed(link.bottom)))
            k = len(link.top)
            if k == 0:
                if rest:
                    continue
                splits = [()]
            else:
                splits = itertools.product(range(k), repeat=len(rest))
            for split in splits:
                parts = [frozenset(q for q, g in zip(rest, split) if g == gi) for gi in range(k)]
                children = []
                for gi, inner in enumerate(link.top):
                    hyper = p.hyperlinks[p.hyper_of(p.upper(inner)[0])]
                    for y in hyper.links:
                        sub = prove(parts[gi] | frozenset(p.typed(p.links[y].top)),
                                    {**chosen, hyper.id: y})
                        if sub is None:
                            break
                        children.append(sub)
                    else:
                        continue
                    break
                else:
                    tree = ProofTree(seq, scheme(x), tuple(children))
                    memo[key] = tree
                    return tree
        return None

    tree = prove(frozenset(p.typed(p.conclusion)), {})
    if tree is None:
        raise NotCorrect("no sequentialization: the structure is incomplete")
    return tree
