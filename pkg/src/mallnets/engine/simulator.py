"""Deterministic simulation of agents expanding one shared structure.

Each bipole of the program is an agent.  At every step the schedule picks an
agent, which advances its current transaction by one phase (begin, lock,
finish) or, when idle, begins a new one on the first binding it has not yet
seen rejected.  Everything runs on one thread; the interleaving alone decides
which transactions conflict, get re-planned against a newer version, or
abort.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..bipolarizer import Bipole
from ..errors import BindingStale, LockConflict, ValidationFailed, StructureViolation
from ..proofnet import ProofStructure, is_proof_net
from ..sequent import Sequent
from .construction import Binding, candidate_bindings
from .transactions import LockManager, Transaction, lock_region, try_transaction

__all__ = ["Schedule", "Event", "Trace", "simulate", "commutes"]

POLICIES = ("round-robin", "random")
MAX_BACKOFF_EXP = 4


@dataclass(frozen=True)
class Schedule:
    """Who moves next.  ``policy`` is ``"round-robin"``, ``"random"`` or an
    explicit sequence of agent names replayed cyclically."""

    seed: int = 0
    policy: str | tuple[str, ...] = "round-robin"

    def __post_init__(self):
        if isinstance(self.policy, str):
            if self.policy not in POLICIES:
                raise ValueError(f"unknown policy {self.policy!r}")
        elif not self.policy:
            raise ValueError("empty agent list")
        else:
            object.__setattr__(self, "policy", tuple(self.policy))

    def picker(self, agents: Sequence[str]):
        rng = random.Random(self.seed)
        step = 0

        def pick() -> str:
            nonlocal step
            if self.policy == "round-robin":
                name = agents[step % len(agents)]
            elif self.policy == "random":
                name = rng.choice(agents)
            else:
                name = self.policy[step % len(self.policy)]
            step += 1
            return name

        return pick


@dataclass(frozen=True)
class Event:
    step: int
    agent: str
    action: str
    locks: tuple[str, ...]
    version: str
    tx: str = ""
    reason: str = ""

    def __str__(self):
        return (f"step={self.step} agent={self.agent} action={self.action} "
                f"locks=[{','.join(self.locks)}] version={self.version}")

    def to_json(self) -> str:
        return json.dumps({"step": self.step, "agent": self.agent, "action": self.action,
                           "locks": list(self.locks), "version": self.version,
                           "tx": self.tx, "reason": self.reason}, sort_keys=True)


@dataclass
class Abort:
    """An aborted transaction with the structure it saw before and after."""

    tx: Transaction
    before: str
    after: str


@dataclass
class Trace:
    events: list[Event] = field(default_factory=list)
    final: ProofStructure | None = None
    versions: dict[str, ProofStructure] = field(default_factory=dict)
    transactions: list[Transaction] = field(default_factory=list)
    aborts: list[Abort] = field(default_factory=list)
    steps: int = 0
    outcome: str = "timeout"

    @property
    def complete(self) -> bool:
        return self.outcome == "complete"

    @property
    def commits(self) -> int:
        return sum(tx.committed for tx in self.transactions)

    def committed_versions(self) -> list[ProofStructure]:
        return [self.versions[tx.version] for tx in self.transactions if tx.committed]

    def to_text(self) -> str:
        return "".join(f"{e}\n" for e in self.events)

    def to_json_lines(self) -> str:
        return "".join(f"{e.to_json()}\n" for e in self.events)


@dataclass
class _Agent:
    bipole: Bipole
    tx: Transaction | None = None
    wake: int = 0
    conflicts: int = 0
    binding: Binding | None = None

    @property
    def name(self) -> str:
        return self.bipole.head


def simulate(program: Iterable[Bipole], goal: Sequent | Iterable[str],
             sched: Schedule = Schedule(), max_steps: int = 1000,
             validate: str = "local", debug: bool = False) -> Trace:
    """Run the agents of ``program`` on the goal until the structure has no
    open places, nobody can move, or ``max_steps`` steps have passed.

    With ``debug`` every committed version is rechecked on full slices and an
    ``AssertionError`` is raised on the first unsound commit.
    """
    atoms = goal.atoms if isinstance(goal, Sequent) else tuple(goal)
    p = ProofStructure.empty(sorted(atoms))
    agents = {b.head: _Agent(b) for b in sorted(program, key=lambda b: b.head)}
    trace = Trace(final=p, versions={p.version: p})
    if not agents:
        trace.outcome = "quiescent" if p.open_places() else "complete"
        return trace
    locks = LockManager()
    rejected: set[tuple] = set()
    pick = sched.picker(sorted(agents))
    counter = 0
    idle_streak = 0

    def log(step, agent, tx, action, version):
        reason = type(tx.error).__name__ if action == "abort" else ""
        trace.events.append(Event(step, agent.name, action, tuple(sorted(tx.locks)),
                                  version, tx.id, reason))

    for step in range(max_steps):
        trace.steps = step + 1
        if not p.open_places():
            trace.outcome = "complete"
            break
        agent = agents[pick()]
        moved = True
        if agent.wake > step:
            moved = False
        elif agent.tx is None:
            bind = agent.binding or next(
                (c for c in candidate_bindings(p, agent.bipole) if c.key not in rejected), None)
            agent.binding = None
            if bind is None:
                moved = False
            else:
                tx = Transaction(f"t{counter}", bind)
                counter += 1
                trace.transactions.append(tx)
                agent.tx = tx
                tx.begin(p)
                log(step, agent, tx, "begin", p.version)
                if tx.state == "aborted":
                    _settle(trace, agent, tx, p, p, rejected, step, log)
        elif agent.tx.state == "pending":
            tx = agent.tx
            if tx.acquire(locks, p):
                agent.conflicts = 0
                log(step, agent, tx, "lock", p.version)
            else:
                _settle(trace, agent, tx, p, p, rejected, step, log)
        else:
            tx = agent.tx
            before = p
            p = tx.finish(p, locks, validate)
            if tx.committed:
                trace.versions[p.version] = p
                if debug:
                    assert is_proof_net(p), f"unsound commit {tx.id}"
                log(step, agent, tx, "commit", p.version)
                agent.tx = None
            else:
                _settle(trace, agent, tx, before, p, rejected, step, log)
        idle_streak = 0 if moved else idle_streak + 1
        if idle_streak >= len(agents) and _quiescent(agents, p, rejected, step):
            trace.outcome = "quiescent"
            break
    else:
        if not p.open_places():
            trace.outcome = "complete"
    trace.final = p
    return trace


def _settle(trace, agent, tx, before, after, rejected, step, log):
    """Book-keeping for an abort: log it, back off or blacklist the binding."""
    log(step, agent, tx, "abort", after.version)
    trace.aborts.append(Abort(tx, before.to_text(), after.to_text()))
    agent.tx = None
    if isinstance(tx.error, LockConflict):
        agent.conflicts += 1
        agent.wake = step + 2 ** min(agent.conflicts, MAX_BACKOFF_EXP)
        agent.binding = tx.binding
    elif isinstance(tx.error, (ValidationFailed, StructureViolation)):
        rejected.add(tx.binding.key)


def _quiescent(agents, p, rejected, step) -> bool:
    for a in agents.values():
        if a.tx is not None or a.binding is not None or a.wake > step:
            return False
        if any(c.key not in rejected for c in candidate_bindings(p, a.bipole)):
            return False
    return True


def commutes(p: ProofStructure, first: Binding, second: Binding,
             validate: str = "local") -> bool | None:
    """Whether two bindings with disjoint lock sets reach the same structure
    in both orders.  ``None`` when the lock sets overlap or neither order
    commits both; ``False`` when only one order does."""
    try:
        a, b = lock_region(p, first), lock_region(p, second)
    except (BindingStale, StructureViolation):
        return None
    if a.resources & b.resources:
        return None
    results = []
    for x, y in ((first, second), (second, first)):
        t1, q = try_transaction(p, x, validate=validate)
        t2, q = try_transaction(q, y, validate=validate)
        results.append(q.to_text() if t1.committed and t2.committed else None)
    if results == [None, None]:
        return None
    return results[0] == results[1]
