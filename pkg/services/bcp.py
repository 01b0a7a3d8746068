from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from core.exceptions import ContractViolation
from models.formula import Literal, Marker, ProjectedFormula, Variable

TOP = Marker.TOP


@dataclass
class BcpResult:
    """Outcome of one conditioning or propagation step."""

    units: List[Literal] = field(default_factory=list)
    satisfied: Set[int] = field(default_factory=set)
    conflict: bool = False
    conflict_clause: Optional[int] = None
    # residual literals of the clauses shortened by this step that are still active
    shortened: Dict[int, Tuple[Literal, ...]] = field(default_factory=dict)

    def merge(self, other: "BcpResult") -> "BcpResult":
        shortened = {cid: lits for cid, lits in self.shortened.items() if cid not in other.satisfied}
        shortened.update(other.shortened)
        return BcpResult(
            units=self.units + [lit for lit in other.units if lit not in self.units],
            satisfied=self.satisfied | other.satisfied,
            conflict=self.conflict or other.conflict,
            conflict_clause=self.conflict_clause if self.conflict else other.conflict_clause,
            shortened=shortened,
        )


class FormulaState:
    """
    Mutable assignment over a parsed formula.

    Clauses are never rewritten: satisfied or removed clauses are masked as
    inactive and falsified literals are skipped when reading a clause, so
    every id keeps referring to a subset of its original clause. All changes
    are recorded on a trail and undone frame by frame.
    """

    def __init__(self, formula: ProjectedFormula):
        self.formula = formula
        self._values: List[Optional[bool]] = [None] * (formula.num_vars + 1)
        self._active: List[bool] = [False] + [not c.tautological for c in formula.clauses]
        self._assigned_trail: List[Variable] = []
        self._deactivated_trail: List[int] = []
        self._frames: List[Tuple[int, int]] = []

    # --- queries ---

    def value(self, v: Variable) -> Optional[bool]:
        return self._values[v]

    def literal_value(self, lit: Literal) -> Optional[bool]:
        value = self._values[abs(lit)]
        if value is None:
            return None
        return value == (lit > 0)

    def is_active(self, cid: int) -> bool:
        return self._active[cid]

    def active_ids(self) -> List[int]:
        return [cid for cid in range(1, len(self._active)) if self._active[cid]]

    def clause_view(self, cid: int) -> Union[Marker, Tuple[Literal, ...]]:
        """⊤ for an inactive clause, else its unfalsified literals (empty means ⊥)."""
        if not self._active[cid]:
            return TOP
        return tuple(lit for lit in self.formula.clause(cid) if self._values[abs(lit)] is None)

    def residual(self, ids: Optional[Iterable[int]] = None) -> Dict[int, Tuple[Literal, ...]]:
        if ids is None:
            ids = range(1, len(self._active))
        return {cid: self.clause_view(cid) for cid in ids if self._active[cid]}

    def assignment(self) -> Dict[Variable, bool]:
        return {v: self._values[v] for v in self._assigned_trail}

    @property
    def frame_depth(self) -> int:
        return len(self._frames)

    # --- trail ---

    def push_frame(self) -> None:
        self._frames.append((len(self._assigned_trail), len(self._deactivated_trail)))

    def pop_frame(self) -> None:
        if not self._frames:
            raise ContractViolation("pop_frame on an empty trail")
        assigned_mark, deactivated_mark = self._frames.pop()
        while len(self._assigned_trail) > assigned_mark:
            self._values[self._assigned_trail.pop()] = None
        while len(self._deactivated_trail) > deactivated_mark:
            self._active[self._deactivated_trail.pop()] = True

    def remove(self, ids: Iterable[int]) -> None:
        """Masks clauses deleted as blocked; undone with the enclosing frame."""
        for cid in sorted(ids):
            if not self._active[cid]:
                raise ContractViolation("clause %d is already inactive" % cid)
            self._deactivate(cid)

    def _deactivate(self, cid: int) -> None:
        self._active[cid] = False
        self._deactivated_trail.append(cid)

    def _assign(self, lit: Literal, result: BcpResult) -> List[int]:
        """Sets ``lit`` true; returns the ids of active clauses that lost a literal."""
        self._values[abs(lit)] = lit > 0
        self._assigned_trail.append(abs(lit))
        for cid in self.formula.occurrences(lit):
            if self._active[cid]:
                self._deactivate(cid)
                result.satisfied.add(cid)
                result.shortened.pop(cid, None)
        return [cid for cid in self.formula.occurrences(-lit) if self._active[cid]]

    # --- operations ---

    def condition(self, term: Iterable[Literal]) -> BcpResult:
        """Σ|γ: masks the clauses satisfied by γ and the literals it falsifies."""
        term = list(dict.fromkeys(term))
        seen = set(term)
        for lit in term:
            if -lit in seen:
                raise ContractViolation("term is inconsistent on variable %d" % abs(lit))
            if self._values[abs(lit)] is not None:
                raise ContractViolation("variable %d is already assigned" % abs(lit))
        result = BcpResult(units=list(term))
        for lit in term:
            for cid in self._assign(lit, result):
                view = self.clause_view(cid)
                result.shortened[cid] = view
                if not view and not result.conflict:
                    result.conflict = True
                    result.conflict_clause = cid
        return result

    def bcp(self) -> BcpResult:
        """Unit propagation to fixpoint, FIFO with units queued in clause-id order."""
        result = BcpResult()
        queue = deque()
        for cid in range(1, len(self._active)):
            if not self._active[cid]:
                continue
            view = self.clause_view(cid)
            if not view:
                result.conflict = True
                result.conflict_clause = cid
                return result
            if len(view) == 1:
                queue.append(view[0])

        while queue:
            lit = queue.popleft()
            value = self.literal_value(lit)
            if value is True:
                continue
            if value is False:
                # both phases were queued; the clause of the later one is empty now
                result.conflict = True
                break
            result.units.append(lit)
            for cid in self._assign(lit, result):
                view = self.clause_view(cid)
                result.shortened[cid] = view
                if not view:
                    result.conflict = True
                    result.conflict_clause = cid
                    return result
                if len(view) == 1:
                    queue.append(view[0])
        return result
