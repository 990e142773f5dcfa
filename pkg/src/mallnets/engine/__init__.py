"""Incremental, transaction-style construction of proof nets."""
from .construction import (
    Binding, Expansion, candidate_bindings, expand, hyperlink_id, match_trigger,
    merge_bindings, plan_expansion,
)
from .transactions import (
    LockManager, LockPlan, Transaction, affected_slices, lock_region, try_transaction,
    validate_local,
)
from .sequentialization import desequentialize, sequentialize
from .simulator import Event, Schedule, Trace, commutes, simulate

__all__ = [
    "Binding", "Expansion", "candidate_bindings", "expand", "hyperlink_id", "match_trigger",
    "merge_bindings", "plan_expansion", "LockManager", "LockPlan", "Transaction",
    "affected_slices", "lock_region", "try_transaction", "validate_local",
    "desequentialize", "sequentialize", "Event", "Schedule", "Trace", "commutes", "simulate",
]
