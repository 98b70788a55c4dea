"""Exception hierarchy shared by every module.

Each exception carries a short ``kind`` string that the command line
interface prints alongside the message.
"""


class GmuxError(Exception):
    kind = "error"


class InvalidDesignError(GmuxError, ValueError):
    kind = "invalid-design"


class SingularDesignError(GmuxError, ArithmeticError):
    """The information matrix is not positive definite (rank(B) < N)."""

    kind = "singular-design"


class EnumerationCapError(GmuxError, ValueError):
    kind = "enumeration-cap"


class UnsupportedOrderError(GmuxError, ValueError):
    kind = "unsupported-order"


class SimulationError(GmuxError, ValueError):
    kind = "simulation"
