"""Exception types raised across the package."""


class ExpcertError(Exception):
    """Base class for all package-specific errors."""


class IntervalRangeError(ExpcertError):
    """An interval operation produced a non-finite endpoint."""


class DivisionByZeroInterval(ExpcertError):
    """Interval division by an interval containing zero."""


class DomainError(ExpcertError):
    """Argument outside the mathematical domain of the operation."""


class InvalidDelta(ExpcertError):
    """Critical neighbourhood radius violates the family's constraints."""


class TooFewIntervals(ExpcertError):
    """Requested partition size below the component count of I minus Delta."""


class EmptyPartition(ExpcertError):
    """Graph construction requires at least one partition element."""


class NotStronglyConnected(ExpcertError):
    """Karp's algorithm requires a strongly connected input graph."""


class LoopPresent(ExpcertError):
    """Karp's algorithm requires a loop-free input graph."""


class NegativeReducedCycle(ExpcertError):
    """Reduced weights admit a negative cycle: lambda was not a valid lower bound."""


class ExplodedEnclosure(ExpcertError):
    """An iterate enclosure escaped the phase-space interval."""
