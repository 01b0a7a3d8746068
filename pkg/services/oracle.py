"""
Brute-force references used to validate the engine, and a seeded generator
of small random instances.
"""
from typing import Dict, Iterable, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core.config import get_settings
from core.exceptions import OracleBoundExceeded
from core.logger_config import logger
from models.formula import TAUTOLOGY, Literal, ProjectedFormula, Variable, resolvent


class GeneratorConfig(BaseModel):
    seed: int = Field(ge=0, lt=2 ** 64)
    num_vars: int = Field(ge=1, le=16)
    num_clauses: int = Field(ge=0)
    clause_len_range: Tuple[int, int] = (1, 3)
    projection_density: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def check_lengths(self):
        low, high = self.clause_len_range
        if low < 1 or high < low:
            raise ValueError("clause_len_range must satisfy 1 <= min <= max")
        return self


def _assignments(n: int) -> np.ndarray:
    """All 2^n assignments as a (2^n, n) boolean matrix, row i = bits of i."""
    return ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(bool)


def brute_force_projected_count(formula: ProjectedFormula,
                                max_counted: Optional[int] = None,
                                max_total: Optional[int] = None) -> int:
    """
    ‖∃X.Σ‖ by double enumeration: rows are assignments of the counted
    variables, columns assignments of the projected variables occurring in Σ.
    A row counts when some column satisfies every clause.
    """
    settings = get_settings()
    max_counted = settings.oracle_max_counted_vars if max_counted is None else max_counted
    max_total = settings.oracle_max_total_vars if max_total is None else max_total

    counted = sorted(formula.counted_variables())
    hidden = sorted(formula.projection & formula.variables())
    if len(counted) > max_counted or len(counted) + len(hidden) > max_total:
        raise OracleBoundExceeded("%d counted and %d projected variables exceed the enumeration bound"
                                  % (len(counted), len(hidden)))

    rows, cols = _assignments(len(counted)), _assignments(len(hidden))
    row_index = {v: i for i, v in enumerate(counted)}
    col_index = {v: i for i, v in enumerate(hidden)}
    satisfiable = np.ones((rows.shape[0], cols.shape[0]), dtype=bool)
    for clause in formula.clauses:
        if clause.tautological:
            continue
        row_sat = np.zeros(rows.shape[0], dtype=bool)
        col_sat = np.zeros(cols.shape[0], dtype=bool)
        for lit in clause:
            if abs(lit) in row_index:
                bits = rows[:, row_index[abs(lit)]]
                row_sat |= bits if lit > 0 else ~bits
            else:
                bits = cols[:, col_index[abs(lit)]]
                col_sat |= bits if lit > 0 else ~bits
        satisfiable &= row_sat[:, None] | col_sat[None, :]
    return int(satisfiable.any(axis=1).sum())


def brute_force_model_count(formula: ProjectedFormula, **bounds) -> int:
    """‖Σ‖ over all declared variables, ignoring X."""
    return brute_force_projected_count(formula.with_projection(()), **bounds)


def is_blocked_on(clause: Sequence[Literal], lit: Literal,
                  residual: Mapping[int, Sequence[Literal]]) -> bool:
    """True when every resolvent of ``clause`` on ``lit`` with a residual clause is a tautology."""
    return all(resolvent(clause, other, lit) is TAUTOLOGY
               for other in residual.values() if -lit in other)


def residual_clauses(formula: ProjectedFormula, assignment: Optional[Mapping[Variable, bool]] = None,
                     removed: Iterable[int] = ()) -> Dict[int, Tuple[Literal, ...]]:
    """Clauses not removed, not tautological and not satisfied, minus their falsified literals."""
    assignment = assignment or {}
    removed = set(removed)
    residual = {}
    for clause in formula.clauses:
        if clause.id in removed or clause.tautological:
            continue
        if any(assignment.get(abs(lit)) == (lit > 0) for lit in clause):
            continue
        residual[clause.id] = tuple(lit for lit in clause if abs(lit) not in assignment)
    return residual


def brute_force_blocked_fixpoint(formula: ProjectedFormula,
                                 assignment: Optional[Mapping[Variable, bool]] = None,
                                 removed: Iterable[int] = (),
                                 projection: Optional[Iterable[Variable]] = None,
                                 shuffle_seed: Optional[int] = None) -> Set[int]:
    """
    Repeatedly removes a residual clause blocked on an unassigned literal over
    the projection until none is left; returns the removed ids. Pass every
    variable as ``projection`` for unrestricted elimination.
    """
    projection = formula.projection if projection is None else frozenset(projection)
    residual = residual_clauses(formula, assignment, removed)
    rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
    eliminated = set()
    progress = True
    while progress:
        progress = False
        order = sorted(residual)
        if rng is not None:
            order = [order[i] for i in rng.permutation(len(order))]
        for cid in order:
            lits = residual[cid]
            if any(abs(lit) in projection and is_blocked_on(lits, lit, residual) for lit in lits):
                del residual[cid]
                eliminated.add(cid)
                progress = True
                break
    return eliminated


def generate(config: GeneratorConfig) -> ProjectedFormula:
    rng = np.random.default_rng(config.seed)
    low, high = config.clause_len_range
    variables = np.arange(1, config.num_vars + 1)
    clauses = []
    for _ in range(config.num_clauses):
        length = min(int(rng.integers(low, high + 1)), config.num_vars)
        chosen = rng.choice(variables, size=length, replace=False)
        signs = rng.integers(0, 2, size=length)
        clauses.append([int(v) if s else -int(v) for v, s in zip(chosen, signs)])
    projection = [int(v) for v in variables if rng.random() < config.projection_density]
    formula = ProjectedFormula.from_clauses(config.num_vars, clauses, projection)
    logger.debug(f"[ORACLE] generated seed={config.seed} vars={config.num_vars} "
                 f"clauses={config.num_clauses} |X|={len(projection)}")
    return formula


def chained_definition_family(n: int) -> ProjectedFormula:
    """
    Counted variables a, x1..x(n+1); projected y1..yn. Each link
    (yi ∨ xi ∨ ¬x(i+1)) only resolves non-trivially with its guard (a ∨ ¬yi),
    so setting a true blocks every link and frees the whole x chain.
    """
    a = 1
    x = [None] + [1 + i for i in range(1, n + 2)]
    y = [None] + [n + 2 + i for i in range(1, n + 1)]
    clauses = []
    for i in range(1, n + 1):
        clauses.append([y[i], x[i], -x[i + 1]])
        clauses.append([a, -y[i]])
    return ProjectedFormula.from_clauses(2 * n + 2, clauses, y[1:])
