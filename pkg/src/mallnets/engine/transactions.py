"""Expansions as transactions: lock regions, local validation, commit/abort.

A transaction computes the negative links a new loop could run through
(the isolation regions of every pair of links the new bipole attaches to),
locks them together with the places it consumes, and validates the
expansion by searching loops through the new links inside that region only.
On success it publishes a new immutable version; on failure the input
structure is returned untouched.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from ..analysis import domination_forest, isolation_region, maximal_switching
from ..errors import EngineError, LockConflict, ValidationFailed
from ..proofnet import (
    ProofStructure, Slice, Trip, TripGraph, _cycle_from, find_singularity_free_loop,
    is_proof_net, slices,
)
from .construction import Binding, Expansion, check_new_violations, plan_expansion

__all__ = [
    "LockManager", "LockPlan", "Transaction", "lock_region", "validate_local",
    "try_transaction", "affected_slices",
]

VALIDATION_MODES = ("local", "full", "both")


class LockManager:
    """All-or-nothing exclusive locks on link and place ids."""

    def __init__(self):
        self.holders: dict[str, str] = {}

    def acquire(self, txid: str, resources) -> None:
        clash = {r: h for r in resources if (h := self.holders.get(r, txid)) != txid}
        if clash:
            raise LockConflict(f"{txid} blocked on {', '.join(sorted(clash))}",
                               sorted(set(clash.values())))
        for r in resources:
            self.holders[r] = txid

    def release(self, txid: str) -> None:
        self.holders = {r: h for r, h in self.holders.items() if h != txid}

    def held_by(self, txid: str) -> set[str]:
        return {r for r, h in self.holders.items() if h == txid}


@dataclass
class LockPlan:
    expansion: Expansion
    attachments: dict[str, frozenset[str]]
    links: frozenset[str]
    places: frozenset[str]

    @property
    def resources(self) -> frozenset[str]:
        return self.links | self.places


def _consumed(link) -> list[str]:
    return [q for q in link.bottom if q != link.jump]


def _alive_in(p: ProofStructure, s: Slice, ex: Expansion, link) -> bool:
    if not all(q in s.places for q in _consumed(link)):
        return False
    per_hyper = defaultdict(list)
    for y in ex.targets.get(link.id, ()):
        per_hyper[p.hyper_of(y)].append(y)
    return all(any(y in s.links for y in ys) for ys in per_hyper.values())


def lock_region(p: ProofStructure, bind: Binding) -> LockPlan:
    """Negative links to lock for ``bind``: in every slice where a new link
    would live, its attachments and the isolation region of each pair."""
    ex = plan_expansion(p, bind)
    attach = {}
    for x in ex.positive_links:
        creators = {c for q in _consumed(x) for c in p.lower(q)
                    if not p.links[c].positive}
        attach[x.id] = frozenset(creators | set(ex.targets[x.id]))
    locks: set[str] = set()
    for s in slices(p):
        live = [x for x in ex.positive_links if _alive_in(p, s, ex, x)]
        found = sorted({a for x in live for a in attach[x.id] if a in s.links})
        locks.update(found)
        if len(found) < 2:
            continue
        sm = maximal_switching(s)
        forest = domination_forest(sm)
        for a, b in itertools.combinations(found, 2):
            locks |= isolation_region(sm, a, b, forest)
    consumed = frozenset(q for x in ex.positive_links for q in _consumed(x))
    return LockPlan(ex, attach, frozenset(locks), consumed)


def affected_slices(new: ProofStructure, links) -> list[Slice]:
    """Slices of ``new`` that keep at least one of ``links``."""
    wanted = set(links)
    return [s for s in slices(new) if wanted & s.links]


class _Audited(set):
    """Allowed links; records every negative link the search steps onto."""

    def __init__(self, allowed, negative):
        super().__init__(allowed)
        self.negative = negative
        self.hits: set[str] = set()

    def __contains__(self, item):
        ok = super().__contains__(item)
        if ok and item in self.negative:
            self.hits.add(item)
        return ok


@dataclass
class LocalVerdict:
    trip: Trip | None
    slice: Slice | None
    accessed: set[str]


def validate_local(new: ProofStructure, ex: Expansion, locked) -> LocalVerdict:
    """Search loops through the new positive links of ``ex``, never stepping
    onto a negative link outside ``locked`` or the expansion's own links."""
    created = {x.id for x in ex.positive_links}
    own = {l.id for l in ex.links}
    accessed: set[str] = set()
    for s in affected_slices(new, created):
        sm = maximal_switching(s)
        g = TripGraph(sm)
        allowed = _Audited({l for l in sm.links if l not in g.negative or l in own
                            or l in locked}, g.negative)
        rank = dict.fromkeys(sm.links, 0)
        for x in sorted(created & sm.links):
            trip = _cycle_from(g, x, allowed, rank)
            accessed |= allowed.hits
            if trip is not None:
                return LocalVerdict(trip, sm, accessed)
    return LocalVerdict(None, None, accessed)


def _validate_full(new: ProofStructure, new_links) -> tuple[Trip | None, Slice | None]:
    for s in affected_slices(new, new_links):
        sm = maximal_switching(s)
        trip = find_singularity_free_loop(sm)
        if trip is not None:
            return trip, sm
    return None, None


@dataclass
class Transaction:
    """One attempted expansion and what happened to it."""

    id: str
    binding: Binding
    state: str = "pending"
    locks: frozenset[str] = frozenset()
    base_version: str | None = None
    version: str | None = None
    error: EngineError | None = None
    trip: Trip | None = None
    slice: Slice | None = field(default=None, repr=False)
    accessed: set[str] = field(default_factory=set)
    events: list[tuple[str, tuple[str, ...], str]] = field(default_factory=list)
    plan: LockPlan | None = field(default=None, repr=False)

    @property
    def committed(self) -> bool:
        return self.state == "committed"

    def raise_for_status(self) -> None:
        if self.error is not None:
            raise self.error

    def _log(self, action: str, version: str) -> None:
        self.events.append((action, tuple(sorted(self.locks)), version))

    # -- phases ---------------------------------------------------------
    def begin(self, p: ProofStructure) -> None:
        self.base_version = p.version
        try:
            self.plan = lock_region(p, self.binding)
            self.locks = self.plan.resources
        except EngineError as exc:
            self._log("begin", p.version)
            self.abort(p, exc)
            return
        self._log("begin", p.version)

    def acquire(self, manager: LockManager | None, p: ProofStructure) -> bool:
        if self.state != "pending":
            return False
        try:
            if manager is not None:
                manager.acquire(self.id, self.locks)
        except LockConflict as exc:
            self.abort(p, exc, manager)
            return False
        self.state = "validating"
        self._log("lock", p.version)
        return True

    def finish(self, p: ProofStructure, manager: LockManager | None = None,
               validate: str = "local") -> ProofStructure:
        """Validate against the current version ``p``; commit or abort."""
        if validate not in VALIDATION_MODES:
            raise ValueError(f"unknown validation mode {validate!r}")
        if self.state != "validating":
            return p
        try:
            if p.version != self.base_version:
                plan = lock_region(p, self.binding)
                extra = plan.resources - self.locks
                if extra and manager is not None:
                    manager.acquire(self.id, extra)
                self.locks = self.locks | plan.resources
                self.plan = plan
            ex = self.plan.expansion
            new = ex.apply(p)
            check_new_violations(p, new, self.binding)
            created = [x.id for x in ex.positive_links]
            if validate in ("local", "both"):
                verdict = validate_local(new, ex, self.plan.links)
                self.accessed = verdict.accessed
                trip, where = verdict.trip, verdict.slice
            if validate in ("full", "both"):
                full_trip, full_where = _validate_full(new, created)
                if validate == "both" and (full_trip is None) != (trip is None):
                    raise AssertionError(
                        f"local and full validation disagree on {self.binding}")
                if validate == "full":
                    trip, where = full_trip, full_where
            if trip is not None:
                self.trip, self.slice = trip, where
                raise ValidationFailed(f"{self.binding} closes a loop without "
                                       f"singularity: {trip}", trip)
        except EngineError as exc:
            return self.abort(p, exc, manager)
        self.state = "committed"
        self.version = new.version
        self._log("commit", new.version)
        if manager is not None:
            manager.release(self.id)
        return new

    def abort(self, p: ProofStructure, exc: EngineError,
              manager: LockManager | None = None) -> ProofStructure:
        self.state = "aborted"
        self.error = exc
        self.version = p.version
        self._log("abort", p.version)
        if manager is not None:
            manager.release(self.id)
        return p


def try_transaction(p: ProofStructure, bind: Binding, *, locks: LockManager | None = None,
                    txid: str = "t0", validate: str = "local"
                    ) -> tuple[Transaction, ProofStructure]:
    """Run one expansion start to finish.

    Returns the transaction and the resulting structure: the new version on
    commit, ``p`` itself on abort.  Errors are kept on the transaction;
    call ``raise_for_status`` to turn them into exceptions.
    """
    tx = Transaction(txid, bind)
    tx.begin(p)
    if tx.state == "pending" and tx.acquire(locks, p):
        return tx, tx.finish(p, locks, validate)
    return tx, p


def check_safety(p: ProofStructure) -> bool:
    """Full correctness check used by debug runs after each commit."""
    return is_proof_net(p)
