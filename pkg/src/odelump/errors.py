"""Exception and warning types shared across the package."""


class OdeLumpError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(OdeLumpError):
    """A denominator evaluated to zero.

    ``where`` is either the offending subexpression (exact evaluation) or the
    simulation time at which the denominator vanished.
    """

    def __init__(self, where):
        self.where = where
        super().__init__(f"division by zero at {where}")


class GroundSetMismatch(OdeLumpError):
    """Two partitions do not share a ground set."""


class PartitionMismatch(OdeLumpError):
    """A partition does not cover the variables of the system it was paired with."""


class ModelSyntaxError(OdeLumpError):
    """Input text does not conform to the model grammar."""

    def __init__(self, line, column, expected):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"line {line}, column {column}: expected {expected}")


class UndeclaredVariable(OdeLumpError):
    """An identifier was used without being declared in the init section."""

    def __init__(self, name, line, column=None):
        self.name = name
        self.line = line
        self.column = column
        at = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{at}: undeclared variable '{name}'")


class DuplicateVariable(OdeLumpError):
    """The same identifier was declared twice in the init section."""

    def __init__(self, name, line, column=None):
        self.name = name
        self.line = line
        self.column = column
        at = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{at}: duplicate variable '{name}'")


class PartitionCoverageError(OdeLumpError):
    """A declared partition does not partition the variable set."""

    def __init__(self, detail, line=None, column=None):
        self.line = line
        self.column = column
        at = f"line {line}: " if line is not None else ""
        super().__init__(f"{at}{detail}")


class NonPolynomialDrift(OdeLumpError):
    """An operation restricted to polynomial drifts met a general drift expression."""


class NotAnFde(OdeLumpError):
    """The partition fails the forward differential-equivalence check."""

    def __init__(self, counterexample):
        self.counterexample = counterexample
        super().__init__(f"partition is not an FDE: {counterexample}")


class NotABde(OdeLumpError):
    """The partition fails the backward differential-equivalence check."""

    def __init__(self, counterexample):
        self.counterexample = counterexample
        super().__init__(f"partition is not a BDE: {counterexample}")


class TooLarge(OdeLumpError):
    """Brute-force enumeration refused a system beyond its size guard."""

    def __init__(self, n, limit=10):
        self.n = n
        self.limit = limit
        super().__init__(f"brute force is guarded to n <= {limit}, got n = {n}")


class NoUniqueCoarsest(OdeLumpError):
    """The enumerated passing partitions have no unique coarsest element."""


class SolverNotFound(OdeLumpError):
    """The external SMT solver command could not be launched."""


class SolverTimeout(OdeLumpError):
    """The external SMT solver exceeded its time budget."""


class SolverUnknown(OdeLumpError):
    """The solver answered 'unknown'; carries the partition reached so far."""

    def __init__(self, reason, partition=None):
        self.reason = reason
        self.partition = partition
        super().__init__(f"solver returned unknown: {reason}")


class ProtocolError(OdeLumpError):
    """The solver produced output this client could not interpret."""

    def __init__(self, raw):
        self.raw = raw
        shown = raw if len(raw) <= 400 else raw[:400] + "..."
        super().__init__(f"unexpected solver output: {shown!r}")


class NonFiniteState(OdeLumpError):
    """Numerical integration produced NaN or infinity."""

    def __init__(self, t):
        self.t = t
        super().__init__(f"state became non-finite at t = {t}")


class GridMismatch(OdeLumpError):
    """Two trajectories do not share a time grid or expected shape."""


class InitMismatchWarning(UserWarning):
    """Backward reduction merged a block whose members have unequal initial values."""
