"""Bipolar focussing sequent proofs: application and checking of inferences."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .bipolarizer import Bipole, InferenceScheme, inference_schemes
from .errors import FormulaSyntaxError, TriggerMismatch

__all__ = [
    "Sequent", "ProofTree", "ProofCheck", "apply_scheme", "check_proof",
    "proof_to_text", "parse_proof", "schemes_by_label",
]

TURNSTILE = "⊢"


@dataclass(frozen=True)
class Sequent:
    """A multiset of negative atom names, kept sorted."""

    atoms: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(sorted(self.atoms)))

    @classmethod
    def of(cls, *atoms: str) -> Sequent:
        return cls(atoms)

    @classmethod
    def from_counter(cls, counter: Counter) -> Sequent:
        return cls(tuple(counter.elements()))

    @property
    def counter(self) -> Counter:
        return Counter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __str__(self):
        return ", ".join(self.atoms)


def _contains(big: Counter, small: Counter) -> bool:
    return all(big[k] >= n for k, n in small.items())


def apply_scheme(conclusion: Sequent, scheme: InferenceScheme,
                 split: Sequence[Iterable[str]] | None = None) -> list[Sequent]:
    """Premises obtained by firing ``scheme`` on ``conclusion``.

    The context left after removing the trigger goes to the premises of
    each monopole group; ``split`` gives one context per group and defaults
    to handing everything to the first group.  A scheme without premises
    closes the branch and therefore needs an empty context.
    """
    have = conclusion.counter
    trigger = Counter(scheme.trigger)
    if not _contains(have, trigger):
        raise TriggerMismatch(f"trigger {{{', '.join(scheme.trigger)}}} "
                              f"not contained in {{{conclusion}}}")
    context = have - trigger
    ngroups = scheme.group_count
    if ngroups == 0:
        if context:
            raise TriggerMismatch(f"{scheme.label} closes the branch but "
                                  f"context {{{Sequent.from_counter(context)}}} remains")
        return []
    if split is None:
        contexts = [context] + [Counter() for _ in range(ngroups - 1)]
    else:
        contexts = [Counter(part) for part in split]
        if len(contexts) != ngroups:
            raise TriggerMismatch(f"{scheme.label} needs {ngroups} contexts, got {len(contexts)}")
        total = Counter()
        for part in contexts:
            total += part
        if total != context:
            raise TriggerMismatch("context split does not partition the remaining context")
    return [Sequent.from_counter(contexts[g] + Counter(atoms))
            for atoms, g in zip(scheme.premises, scheme.groups)]


@dataclass(frozen=True)
class ProofTree:
    conclusion: Sequent
    rule: InferenceScheme
    children: tuple[ProofTree, ...] = ()

    def nodes(self):
        yield self
        for child in self.children:
            yield from child.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rule_counts(self) -> Counter:
        return Counter(node.rule.label for node in self.nodes())


@dataclass
class ProofCheck:
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok


def schemes_by_label(program: Iterable[Bipole]) -> dict[str, InferenceScheme]:
    return {s.label: s for b in program for s in inference_schemes(b)}


def check_proof(p: ProofTree, program: Iterable[Bipole]) -> ProofCheck:
    """Check every inference of ``p`` against ``program``.

    Children must match the premises of their rule one to one, in order;
    children of one monopole group share a context and the group contexts
    must partition what the trigger leaves behind.
    """
    known = schemes_by_label(program)
    report = ProofCheck()
    _check_node(p, known, report, "root")
    return report


def _check_node(node: ProofTree, known, report: ProofCheck, where: str):
    rule = node.rule
    if known.get(rule.label) != rule:
        report.errors.append(f"{where}: rule {rule.label} is not in the program")
        return
    have = node.conclusion.counter
    trigger = Counter(rule.trigger)
    if not _contains(have, trigger):
        report.errors.append(f"{where}: trigger of {rule.label} not in {{{node.conclusion}}}")
        return
    if len(node.children) != len(rule.premises):
        report.errors.append(f"{where}: {rule.label} has {len(rule.premises)} premises, "
                             f"found {len(node.children)} children")
        return
    context = have - trigger
    contexts: dict[int, Counter] = {}
    for i, (child, atoms, g) in enumerate(zip(node.children, rule.premises, rule.groups)):
        child_atoms = child.conclusion.counter
        added = Counter(atoms)
        if not _contains(child_atoms, added):
            report.errors.append(f"{where}/{i}: premise atoms {{{', '.join(atoms)}}} missing")
            continue
        ctx = child_atoms - added
        if contexts.setdefault(g, ctx) != ctx:
            report.errors.append(f"{where}/{i}: context differs within monopole group {g}")
    total = Counter()
    for ctx in contexts.values():
        total += ctx
    if total != context and not report.errors:
        report.errors.append(f"{where}: premise contexts {{{Sequent.from_counter(total)}}} "
                             f"do not partition {{{Sequent.from_counter(context)}}}")
    for i, child in enumerate(node.children):
        _check_node(child, known, report, f"{where}/{i}")


# -- text format ------------------------------------------------------------

def proof_to_text(p: ProofTree, indent: str = "  ") -> str:
    lines = []

    def walk(node, depth):
        lines.append(f"{indent * depth}{node.rule.label} {TURNSTILE} {node.conclusion}")
        for child in node.children:
            walk(child, depth + 1)

    walk(p, 0)
    return "\n".join(lines) + "\n"


def parse_proof(text: str, program: Iterable[Bipole], indent: str = "  ") -> ProofTree:
    """Read the indented ``<rule>#<variant> ⊢ <atoms>`` format."""
    known = schemes_by_label(program)
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        stripped = raw.lstrip(" ")
        depth, rem = divmod(len(raw) - len(stripped), len(indent))
        if rem:
            raise FormulaSyntaxError(f"line {lineno}: bad indentation")
        label, sep, atoms = stripped.partition(TURNSTILE)
        if not sep:
            label, sep, atoms = stripped.partition("|-")
        label = label.strip()
        if not sep:
            raise FormulaSyntaxError(f"line {lineno}: missing {TURNSTILE}")
        if label not in known:
            raise FormulaSyntaxError(f"line {lineno}: unknown rule {label!r}")
        names = tuple(a.strip() for a in atoms.split(",") if a.strip())
        entries.append((depth, known[label], Sequent(names), lineno))
    if not entries:
        raise FormulaSyntaxError("empty proof")

    pos = 0

    def build(depth):
        nonlocal pos
        d, rule, seq, lineno = entries[pos]
        if d != depth:
            raise FormulaSyntaxError(f"line {lineno}: expected depth {depth}, got {d}")
        pos += 1
        children = []
        while pos < len(entries) and entries[pos][0] > depth:
            children.append(build(depth + 1))
        return ProofTree(seq, rule, tuple(children))

    tree = build(0)
    if pos != len(entries):
        raise FormulaSyntaxError(f"line {entries[pos][3]}: more than one root")
    return tree
