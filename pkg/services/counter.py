"""
DPLL-style projected model counter with component caching and optional
blocked-clause elimination (once at the root, or at every decision).
"""
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from networkx.utils import UnionFind

from core.exceptions import ContractViolation, CountTimeout, InvariantViolation
from core.logger_config import logger
from models.formula import Literal, ProjectedFormula, Variable, literal_key
from services.bce import BlockedClauseManager
from services.bcp import BcpResult, FormulaState


class BceMode(str, Enum):
    OFF = "off"
    PRE = "pre"
    DYN = "dyn"


@dataclass
class CountStats:
    decisions: int = 0
    blocked_removed: int = 0
    cache_hits: int = 0
    cache_stores: int = 0
    max_depth: int = 0
    sat_leaf_calls: int = 0


@dataclass
class CountResult:
    count: int
    mode: BceMode
    stats: CountStats = field(default_factory=CountStats)

    def as_dict(self) -> Dict:
        # counts can exceed any JSON number, keep them decimal strings
        return {"count": str(self.count), "mode": self.mode.value, "stats": asdict(self.stats)}


@dataclass(frozen=True)
class Component:
    clause_ids: Tuple[int, ...]
    clauses: Tuple[Tuple[Literal, ...], ...]
    variables: FrozenSet[Variable]


@dataclass
class NodeAudit:
    """What one count_main call multiplied together."""

    depth: int
    free: int
    cached: bool
    component_counts: List[int] = field(default_factory=list)
    branch_counts: List[Tuple[int, int]] = field(default_factory=list)
    count: int = 0


class ComponentCache:
    """Residual component key -> projected count, with optional whole-cache reset."""

    def __init__(self, cap: Optional[int] = None):
        self.cap = cap
        self.entries: Dict[bytes, int] = {}
        self.hits = 0
        self.stores = 0
        self.resets = 0

    def find(self, key: bytes) -> Optional[int]:
        found = self.entries.get(key)
        if found is not None:
            self.hits += 1
        return found

    def insert(self, key: bytes, value: int) -> None:
        if self.cap is not None and len(self.entries) >= self.cap:
            self.entries.clear()
            self.resets += 1
        self.entries[key] = value
        self.stores += 1

    def __len__(self):
        return len(self.entries)


def connected_components(residual: Dict[int, Sequence[Literal]]) -> List[Component]:
    """Splits residual clauses into variable-disjoint groups, ordered by smallest variable."""
    links = UnionFind()
    for lits in residual.values():
        if lits:
            links.union(*(abs(lit) for lit in lits))
    groups: Dict[Variable, List[int]] = {}
    for cid in sorted(residual):
        lits = residual[cid]
        if lits:
            groups.setdefault(links[abs(lits[0])], []).append(cid)
    components = []
    for ids in groups.values():
        clauses = tuple(tuple(residual[cid]) for cid in ids)
        variables = frozenset(abs(lit) for lits in clauses for lit in lits)
        components.append(Component(tuple(ids), clauses, variables))
    components.sort(key=lambda comp: min(comp.variables))
    return components


def cache_key(clauses: Iterable[Sequence[Literal]]) -> bytes:
    """Canonical encoding of a residual clause set, independent of clause and literal order."""
    normalized = {tuple(sorted(set(lits), key=literal_key)) for lits in clauses}
    ordered = sorted(normalized, key=lambda lits: [literal_key(lit) for lit in lits])
    return " ".join(" ".join(map(str, lits + (0,))) for lits in ordered).encode("ascii")


def select_branch_variable(component: Component, projection: FrozenSet[Variable]) -> Variable:
    """Most frequent counted variable of the component, smallest index on ties."""
    occurrences = Counter(abs(lit) for lits in component.clauses for lit in lits
                          if abs(lit) not in projection)
    if not occurrences:
        raise ContractViolation("component has no counted variable to branch on")
    return min(occurrences, key=lambda v: (-occurrences[v], v))


def _assign(clauses: List[FrozenSet[Literal]], lit: Literal) -> List[FrozenSet[Literal]]:
    return [clause - {-lit} for clause in clauses if lit not in clause]


def _dpll(clauses: List[FrozenSet[Literal]], check: Optional[Callable[[], None]]) -> bool:
    while True:
        if any(not clause for clause in clauses):
            return False
        unit = next((clause for clause in clauses if len(clause) == 1), None)
        if unit is None:
            break
        clauses = _assign(clauses, next(iter(unit)))
    if not clauses:
        return True
    if check is not None:
        check()
    v = min(abs(lit) for clause in clauses for lit in clause)
    return _dpll(_assign(clauses, v), check) or _dpll(_assign(clauses, -v), check)


def dpll_sat(clauses: Iterable[Iterable[Literal]], check: Optional[Callable[[], None]] = None) -> bool:
    """
    Plain DPLL satisfiability test, positive phase first. ``check`` runs
    before every branch and may raise to abandon the search.
    """
    return _dpll([frozenset(clause) for clause in clauses], check)


class CountingEngine:

    def __init__(self, formula: ProjectedFormula, mode: BceMode = BceMode.DYN,
                 cache_enabled: bool = True, cache_cap: Optional[int] = None,
                 timeout: Optional[float] = None, audit: Optional[List[NodeAudit]] = None):
        self.formula = formula
        self.mode = BceMode(mode)
        self.projection = formula.projection
        self.cache_enabled = cache_enabled
        self.cache_cap = cache_cap
        self.cache = ComponentCache(cache_cap) if cache_enabled else None
        self.timeout = timeout
        self.audit = audit
        self.stats = CountStats()
        self.state = FormulaState(formula)
        self.manager: Optional[BlockedClauseManager] = None
        self._deadline: Optional[float] = None

    def count(self) -> CountResult:
        # every run starts from the parsed formula
        self.state = FormulaState(self.formula)
        self.stats = CountStats()
        self.cache = ComponentCache(self.cache_cap) if self.cache_enabled else None
        self.manager = None
        if self.timeout is not None:
            self._deadline = time.monotonic() + self.timeout
        needed = 4 * self.formula.num_vars + 1000
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)

        if self.mode is not BceMode.OFF:
            manager = BlockedClauseManager(self.formula)
            blocked = manager.init()
            self.state.remove(blocked)
            self.stats.blocked_removed += len(blocked)
            logger.info(f"[BCE] {len(blocked)} clauses blocked at the root")
            if self.mode is BceMode.DYN:
                self.manager = manager

        scope = self.formula.counted_variables()
        total = self.count_main(tuple(self.state.active_ids()), scope, None, 0)
        if self.cache is not None:
            self.stats.cache_hits = self.cache.hits
            self.stats.cache_stores = self.cache.stores
        logger.info(f"[COUNT] mode={self.mode.value} decisions={self.stats.decisions} "
                    f"blocked={self.stats.blocked_removed} cache_hits={self.stats.cache_hits}")
        return CountResult(total, self.mode, self.stats)

    def _check_deadline(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise CountTimeout(self.timeout)

    def count_main(self, clause_ids: Tuple[int, ...], scope: FrozenSet[Variable],
                   decision: Optional[Literal], depth: int) -> int:
        """
        Counts the models over ``scope`` of the component made of
        ``clause_ids`` after setting ``decision``. Every call pushes exactly one
        trail frame and, in DYN mode, one manager frame, and pops both on exit.
        """
        if depth > self.formula.num_vars:
            raise InvariantViolation("recursion depth %d exceeds %d variables"
                                     % (depth, self.formula.num_vars))
        self._check_deadline()
        self.stats.max_depth = max(self.stats.max_depth, depth)

        self.state.push_frame()
        try:
            result = BcpResult()
            if decision is not None:
                result = self.state.condition([decision])
            if not result.conflict:
                result = result.merge(self.state.bcp())

            if self.manager is not None:
                if result.conflict:
                    self.manager.propagate(set(), set())
                else:
                    assigned_x = {abs(lit) for lit in result.units if abs(lit) in self.projection}
                    blocked = self.manager.propagate(result.satisfied, assigned_x)
                    if blocked:
                        self.state.remove(blocked)
                        self.stats.blocked_removed += len(blocked)
                if self.manager.frame_depth != depth + 2:
                    raise InvariantViolation("manager holds %d frames at depth %d"
                                             % (self.manager.frame_depth, depth))
            try:
                if result.conflict:
                    return 0
                return self._count_residual(clause_ids, scope, depth)
            finally:
                if self.manager is not None:
                    self.manager.backtrack()
        finally:
            self.state.pop_frame()

    def _count_residual(self, clause_ids: Tuple[int, ...], scope: FrozenSet[Variable],
                        depth: int) -> int:
        residual = self.state.residual(clause_ids)
        present = {abs(lit) for lits in residual.values() for lit in lits}
        free = sum(1 for v in scope if self.state.value(v) is None and v not in present)

        key = cache_key(residual.values()) if self.cache is not None else None
        cached = self.cache.find(key) if self.cache is not None else None
        if cached is not None:
            if self.audit is not None:
                self.audit.append(NodeAudit(depth, free, True, [cached], [], cached << free))
            return cached << free

        node = NodeAudit(depth, free, False) if self.audit is not None else None
        product = 1
        for component in connected_components(residual):
            counted = component.variables - self.projection
            if not counted:
                self.stats.sat_leaf_calls += 1
                value = 1 if dpll_sat(component.clauses, self._check_deadline) else 0
            else:
                v = select_branch_variable(component, self.projection)
                self.stats.decisions += 1
                positive = self.count_main(component.clause_ids, counted, v, depth + 1)
                negative = self.count_main(component.clause_ids, counted, -v, depth + 1)
                value = positive + negative
                if node is not None:
                    node.branch_counts.append((positive, negative))
            if node is not None:
                node.component_counts.append(value)
            product *= value
            if product == 0:
                break

        if self.cache is not None:
            self.cache.insert(key, product)
        if node is not None:
            node.count = product << free
            self.audit.append(node)
        return product << free


def count(formula: ProjectedFormula, mode: BceMode = BceMode.DYN, **options) -> CountResult:
    """‖∃X.Σ‖ over the declared variables outside X."""
    return CountingEngine(formula, mode, **options).count()
