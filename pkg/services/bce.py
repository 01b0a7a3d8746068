"""
BlockedClauseManager: dynamic detection of clauses blocked on a projected literal.

Each protected triple (ℓ, α, C) records that clause α could be blocked on ℓ
(Var(ℓ) ∈ X) and lists in C the clauses whose resolvent with α on ℓ is not a
tautology. A live triple is watched by one active member of C; α becomes
blocked exactly when the last active member of C goes away while ℓ is still
unassigned. Watch lists are never repaired on backtrack.
"""
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from core.exceptions import ContractViolation
from core.logger_config import logger
from models.formula import Literal, ProjectedFormula, Variable, resolvent_set


@dataclass(frozen=True)
class ProtectedTriple:
    literal: Literal
    clause_id: int
    # sorted ascending; the smallest active member is the preferred watcher
    candidates: Tuple[int, ...]

    def __str__(self):
        return "(%d, %d, {%s})" % (self.literal, self.clause_id, ",".join(map(str, self.candidates)))


@dataclass(frozen=True)
class Frame:
    assigned_vars: FrozenSet[Variable]
    deactivated_clauses: FrozenSet[int]


@dataclass(frozen=True)
class WatchViolation:
    triple: ProtectedTriple
    watchers: Tuple[int, ...]
    reason: str

    def __str__(self):
        return "triple %s watched by %s: %s" % (self.triple, list(self.watchers), self.reason)


def init_protected_triples(formula: ProjectedFormula) -> List[ProtectedTriple]:
    """One triple per (ℓ, α) with Var(ℓ) ∈ X, ℓ ∈ α and α not a tautology."""
    triples = []
    for x in sorted(formula.projection):
        for lit in (x, -x):
            for cid in formula.occurrences(lit):
                clause = formula.clause(cid)
                if clause.tautological:
                    continue
                candidates = tuple(sorted(resolvent_set(clause, lit, formula)))
                triples.append(ProtectedTriple(lit, cid, candidates))
    return triples


class BlockedClauseManager:

    def __init__(self, formula: ProjectedFormula, shuffle_seed: Optional[int] = None):
        self.formula = formula
        self.protected_triples: List[ProtectedTriple] = []
        self.watches: Dict[int, List[ProtectedTriple]] = {}
        self.is_assigned_var: Dict[Variable, bool] = {}
        self.is_active_clause: List[bool] = []
        self.frames: List[Frame] = []
        # a seeded manager pops its worklist in random order
        self._rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
        self._initialized = False

    @property
    def frame_depth(self) -> int:
        return len(self.frames)

    def snapshot(self) -> Tuple[FrozenSet[Variable], FrozenSet[int]]:
        """(assigned X variables, inactive clause ids)."""
        assigned = frozenset(x for x, flag in self.is_assigned_var.items() if flag)
        inactive = frozenset(cid for cid in range(1, len(self.is_active_clause))
                             if not self.is_active_clause[cid])
        return assigned, inactive

    def init_watch_list(self, triples: Iterable[ProtectedTriple]) -> Set[int]:
        """Watches every triple by the smallest id in C; returns the ids with C = ∅."""
        self.watches = {}
        blocked = set()
        for triple in triples:
            if not triple.candidates:
                blocked.add(triple.clause_id)
            else:
                self.watches.setdefault(triple.candidates[0], []).append(triple)
        return blocked

    def init(self) -> Set[int]:
        """Builds the structures and returns every clause blocked at the root."""
        if self._initialized:
            raise ContractViolation("manager already initialized")
        self._initialized = True
        self.is_assigned_var = {x: False for x in sorted(self.formula.projection)}
        self.is_active_clause = [False] + [True] * len(self.formula.clauses)
        self.protected_triples = init_protected_triples(self.formula)
        initially_blocked = self.init_watch_list(self.protected_triples)
        # tautologies are vacuous: inactive from the start, never reported
        vacuous = {c.id for c in self.formula.clauses if c.tautological}
        cascade = self.propagate(initially_blocked | vacuous, set())
        blocked = initially_blocked | cascade
        logger.debug(f"[BCE] init: {len(self.protected_triples)} triples, "
                     f"{len(blocked)} blocked, {len(vacuous)} tautological")
        return blocked

    def propagate(self, deactivated: Iterable[int], assigned: Iterable[Variable]) -> Set[int]:
        """
        Records newly inactive clauses and newly assigned X variables, moves
        the triples watched by dying clauses and returns the clauses found
        blocked along the way. Pushes one frame.
        """
        if not self._initialized:
            raise ContractViolation("propagate before init")
        deactivated = set(deactivated)
        assigned = set(assigned)
        for x in assigned:
            if x not in self.is_assigned_var:
                raise ContractViolation("variable %d is not projected" % x)
            if self.is_assigned_var[x]:
                raise ContractViolation("variable %d is already assigned" % x)
        for cid in deactivated:
            if not self.is_active_clause[cid]:
                raise ContractViolation("clause %d is already inactive" % cid)

        for x in assigned:
            self.is_assigned_var[x] = True
        for cid in deactivated:
            self.is_active_clause[cid] = False

        blocked: List[int] = []
        worklist = deque(sorted(deactivated))
        while worklist:
            if self._rng is None:
                dying = worklist.popleft()
            else:
                worklist.rotate(-int(self._rng.integers(len(worklist))))
                dying = worklist.popleft()
            kept = []
            for triple in self.watches.get(dying, ()):
                if self.is_assigned_var[abs(triple.literal)] or not self.is_active_clause[triple.clause_id]:
                    kept.append(triple)
                    continue
                watcher = self._find_watcher(triple)
                if watcher is not None:
                    self.watches.setdefault(watcher, []).append(triple)
                    continue
                # no active resolution partner left: blocked on triple.literal
                kept.append(triple)
                blocked.append(triple.clause_id)
                worklist.append(triple.clause_id)
                self.is_active_clause[triple.clause_id] = False
            if kept or dying in self.watches:
                self.watches[dying] = kept

        self.frames.append(Frame(frozenset(assigned), frozenset(deactivated) | frozenset(blocked)))
        return set(blocked)

    def _find_watcher(self, triple: ProtectedTriple) -> Optional[int]:
        for cid in triple.candidates:
            if self.is_active_clause[cid]:
                return cid
        return None

    def backtrack(self) -> None:
        if not self.frames:
            raise ContractViolation("backtrack with an empty frame stack")
        frame = self.frames.pop()
        for x in frame.assigned_vars:
            self.is_assigned_var[x] = False
        for cid in frame.deactivated_clauses:
            self.is_active_clause[cid] = True

    def verify_invariants(self) -> Optional[WatchViolation]:
        """Returns the first broken watch/parking condition, or None."""
        locations: Dict[ProtectedTriple, List[int]] = {}
        for watcher, triples in self.watches.items():
            for triple in triples:
                locations.setdefault(triple, []).append(watcher)

        for triple in self.protected_triples:
            watchers = tuple(locations.get(triple, ()))
            if not triple.candidates:
                # consumed by init_watch_list
                if watchers:
                    return WatchViolation(triple, watchers, "triple without candidates is watched")
                continue
            if len(watchers) != 1:
                return WatchViolation(triple, watchers, "expected exactly one watch list")
            watcher = watchers[0]
            if watcher not in triple.candidates:
                return WatchViolation(triple, watchers, "watcher is not a resolution candidate")
            live = (not self.is_assigned_var[abs(triple.literal)]
                    and self.is_active_clause[triple.clause_id])
            if live and not self.is_active_clause[watcher]:
                return WatchViolation(triple, watchers, "live triple watched by an inactive clause")
        return None
