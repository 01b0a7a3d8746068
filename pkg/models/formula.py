"""
CNF formulas with stable clause identifiers and a projection set.

Literals and variables use DIMACS integers: variable ``v`` is ``v >= 1``,
its literals are ``v`` and ``-v``. Clause ids are 1-based, assigned in file
order and never change afterwards.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from core.exceptions import ContractViolation, DimacsParseError
from core.logger_config import logger

Variable = int
Literal = int


class Marker(Enum):
    TAUTOLOGY = "tautology"
    TOP = "⊤"


TAUTOLOGY = Marker.TAUTOLOGY


def var(lit: Literal) -> Variable:
    return abs(lit)


def complement(lit: Literal) -> Literal:
    return -lit


def literal_key(lit: Literal) -> Tuple[int, bool]:
    """Sort key: by variable index, positive before negative."""
    return (abs(lit), lit < 0)


def normalize(literals: Iterable[Literal]) -> Tuple[Literal, ...]:
    return tuple(sorted(set(literals), key=literal_key))


def has_complementary_pair(literals: Iterable[Literal]) -> bool:
    seen = set(literals)
    return any(-lit in seen for lit in seen)


@dataclass(frozen=True)
class Clause:
    id: int
    literals: Tuple[Literal, ...]
    tautological: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "literals", normalize(self.literals))
        object.__setattr__(self, "tautological", has_complementary_pair(self.literals))

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def __iter__(self):
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def variables(self) -> FrozenSet[Variable]:
        return frozenset(abs(lit) for lit in self.literals)


@dataclass
class ProjectedFormula:
    """The clause store Σ together with the forgotten variables X."""

    num_vars: int
    clauses: List[Clause]
    projection: FrozenSet[Variable] = frozenset()
    _occurrences: Dict[Literal, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.projection = frozenset(self.projection)
        for position, clause in enumerate(self.clauses, start=1):
            if clause.id != position:
                raise ContractViolation("clause ids must be 1..%d in order, found %d at position %d"
                                        % (len(self.clauses), clause.id, position))
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ContractViolation("literal %d out of range 1..%d" % (lit, self.num_vars))
        for v in self.projection:
            if not 1 <= v <= self.num_vars:
                raise ContractViolation("projected variable %d out of range" % v)
        occurrences: Dict[Literal, List[int]] = {}
        for clause in self.clauses:
            for lit in clause:
                occurrences.setdefault(lit, []).append(clause.id)
        self._occurrences = {lit: tuple(ids) for lit, ids in occurrences.items()}

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Iterable[Iterable[Literal]],
                     projection: Iterable[Variable] = ()) -> "ProjectedFormula":
        built = [Clause(i, tuple(lits)) for i, lits in enumerate(clauses, start=1)]
        return cls(num_vars, built, frozenset(projection))

    def with_projection(self, projection: Iterable[Variable]) -> "ProjectedFormula":
        return ProjectedFormula(self.num_vars, list(self.clauses), frozenset(projection))

    def clause(self, cid: int) -> Clause:
        if not 1 <= cid <= len(self.clauses):
            raise ContractViolation("no clause with id %d" % cid)
        return self.clauses[cid - 1]

    def occurrences(self, lit: Literal) -> Tuple[int, ...]:
        """S_ℓ: ids of the clauses containing ``lit``, ascending."""
        return self._occurrences.get(lit, ())

    def variables(self) -> FrozenSet[Variable]:
        """Var(Σ): variables occurring in at least one clause."""
        return frozenset(abs(lit) for lit in self._occurrences)

    def counted_variables(self) -> FrozenSet[Variable]:
        return frozenset(range(1, self.num_vars + 1)) - self.projection

    def free_variables(self) -> FrozenSet[Variable]:
        """Declared variables that occur in no clause."""
        return frozenset(range(1, self.num_vars + 1)) - self.variables()

    def show_variables(self) -> Optional[FrozenSet[Variable]]:
        if not self.projection:
            return None
        return self.counted_variables()


def resolvent(a: Union[Clause, Sequence[Literal]], b: Union[Clause, Sequence[Literal]],
              lit: Literal) -> Union[Tuple[Literal, ...], Marker]:
    """(a ∖ {ℓ}) ∪ (b ∖ {ℓ̄}), or TAUTOLOGY when that union has a complementary pair."""
    if lit not in a:
        raise ContractViolation("literal %d is not in the first clause" % lit)
    if -lit not in b:
        raise ContractViolation("literal %d is not in the second clause" % -lit)
    merged = set(x for x in a if x != lit)
    merged.update(x for x in b if x != -lit)
    if has_complementary_pair(merged):
        return TAUTOLOGY
    return normalize(merged)


def resolvent_set(clause: Clause, lit: Literal, formula: ProjectedFormula) -> FrozenSet[int]:
    """Ids of the clauses in S_ℓ̄ whose resolvent with ``clause`` on ``lit`` is not a tautology."""
    if lit not in clause:
        raise ContractViolation("literal %d is not in clause %d" % (lit, clause.id))
    return frozenset(
        cid for cid in formula.occurrences(-lit)
        if resolvent(clause, formula.clause(cid), lit) is not TAUTOLOGY
    )


def _ints(tokens: Sequence[str], line_no: int) -> List[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise DimacsParseError("expected integers, got %r" % " ".join(tokens), line_no)


def parse_dimacs(text: Union[bytes, str]) -> ProjectedFormula:
    """
    Parses DIMACS CNF with optional ``c p show ... 0`` declarations.

    The show lines list the variables counted over; the projection X is
    their complement. Without any show line X is empty.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise DimacsParseError("input is not valid UTF-8", 1)

    num_vars = None
    declared_clauses = 0
    header_line = 0
    clauses: List[List[int]] = []
    pending: List[int] = []
    pending_line = 0
    # show variable -> line it was declared on
    show: Optional[Dict[int, int]] = None
    line_no = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "%":
            continue
        if line.startswith("c"):
            tokens = line.split()
            if tokens[:3] == ["c", "p", "show"]:
                if show is None:
                    show = {}
                for v in _ints(tokens[3:], line_no):
                    if v == 0:
                        break
                    if v < 0:
                        raise DimacsParseError("show variable %d is negative" % v, line_no)
                    show.setdefault(v, line_no)
            continue
        if line.startswith("p"):
            tokens = line.split()
            if num_vars is not None:
                raise DimacsParseError("duplicate header", line_no)
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DimacsParseError("malformed header %r" % line, line_no)
            num_vars, declared_clauses = _ints(tokens[2:], line_no)
            if num_vars < 0 or declared_clauses < 0:
                raise DimacsParseError("negative counts in header", line_no)
            header_line = line_no
            continue
        if num_vars is None:
            raise DimacsParseError("clause before the 'p cnf' header", line_no)
        for lit in _ints(line.split(), line_no):
            if lit == 0:
                clauses.append(pending)
                pending = []
                continue
            if abs(lit) > num_vars:
                raise DimacsParseError("literal %d out of range 1..%d" % (lit, num_vars), line_no)
            if not pending:
                pending_line = line_no
            pending.append(lit)

    if num_vars is None:
        raise DimacsParseError("missing 'p cnf' header", max(line_no, 1))
    if pending:
        raise DimacsParseError("unterminated clause", pending_line)
    if len(clauses) != declared_clauses:
        raise DimacsParseError("header declares %d clauses but %d were read"
                               % (declared_clauses, len(clauses)), header_line)

    projection = frozenset()
    if show is not None:
        for v, show_line in show.items():
            if v > num_vars:
                raise DimacsParseError("show variable %d out of range 1..%d" % (v, num_vars), show_line)
        projection = frozenset(range(1, num_vars + 1)) - frozenset(show)

    formula = ProjectedFormula.from_clauses(num_vars, clauses, projection)
    tautologies = sum(1 for clause in formula.clauses if clause.tautological)
    logger.debug(f"[PARSE] {num_vars} vars, {len(clauses)} clauses, |X|={len(projection)}, "
                 f"{tautologies} tautological")
    return formula


def serialize_dimacs(formula: ProjectedFormula) -> str:
    lines = ["p cnf %d %d" % (formula.num_vars, len(formula.clauses))]
    show = formula.show_variables()
    if show is not None:
        lines.append("c p show %s" % " ".join(str(v) for v in sorted(show) + [0]))
    for clause in formula.clauses:
        lines.append(" ".join(str(lit) for lit in clause.literals + (0,)))
    return "\n".join(lines) + "\n"
