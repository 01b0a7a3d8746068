class ProjCountError(Exception):
    """Base class for every error raised by the counter."""


class DimacsParseError(ProjCountError):

    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self):
        return "DIMACS parse error at line %d: %s" % (self.line, self.message)


class ContractViolation(ProjCountError):
    """An operation was called outside its precondition."""


class InvariantViolation(ProjCountError):
    """Internal bookkeeping went out of sync."""


class CountTimeout(ProjCountError):

    def __init__(self, seconds: float):
        super().__init__("deadline of %.2fs exceeded" % seconds)
        self.seconds = seconds


class OracleBoundExceeded(ProjCountError):
    """Brute-force enumeration refused: instance too large."""


class OracleMismatch(ProjCountError):

    def __init__(self, engine_count: int, oracle_count: int):
        super().__init__("engine counted %d but oracle counted %d" % (engine_count, oracle_count))
        self.engine_count = engine_count
        self.oracle_count = oracle_count
