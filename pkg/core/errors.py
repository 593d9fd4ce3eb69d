from typing import Any, Optional


class SpsLabError(Exception):
    """
    Base class for every error raised by the library.
    The optional witness is the concrete object that makes the failure checkable.
    """

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


# ------------------------- Order / lattice -------------------------
class NotAPartialOrder(SpsLabError):
    pass


class NotALattice(SpsLabError):
    pass


class SizeCapExceeded(SpsLabError):
    def __init__(self, size: int, cap: int, what: str = "lattice"):
        super().__init__(f"{what} has {size} elements, above the cap of {cap} (set SPSLAB_SIZE_CAP to raise it)")
        self.size = size
        self.cap = cap


class InvalidOrtho(SpsLabError):
    pass


# ------------------------- Closure systems -------------------------
class GeneratorOutOfGround(SpsLabError):
    pass


class NotOpen(SpsLabError):
    pass


class NotAClosureSystem(SpsLabError):
    pass


# ------------------------- State property systems -------------------------
class UnknownProperty(SpsLabError):
    pass


class NotTopological(SpsLabError):
    pass


class PartitionFailure(SpsLabError):
    pass


class InvariantViolation(SpsLabError):
    """
    A theorem-level identity failed. This is a bug certificate, never a user error.
    """


# ------------------------- Sphere model -------------------------
class InvalidTestSpec(SpsLabError):
    pass


class EmptySample(SpsLabError):
    pass


class DegenerateSample(SpsLabError):
    pass


# ------------------------- Documents -------------------------
class ParseError(SpsLabError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column
