"""Exception types shared across the package."""


class TagCorruptError(Exception):
    """Base class for all package errors."""


class UnknownTag(TagCorruptError):
    """A string does not name a known error tag."""


class ReservedTag(TagCorruptError):
    """SELF was used where an error tag is required."""


class EmptyCorpus(TagCorruptError):
    """No edits (or no usable lines) were observed in the input."""


class MalformedLine(TagCorruptError):
    """An input line does not match the expected format."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class Infeasible(TagCorruptError):
    """No corruption of the requested kind exists for this sentence."""


class InfeasibleQuota(TagCorruptError):
    """The per-tag quotas cannot be met by any assignment."""

    def __init__(self, starved, message=""):
        names = ", ".join(t.value for t in starved)
        super().__init__(message or f"quota cannot be filled for: {names}")
        self.starved = tuple(starved)


class EmptySupport(TagCorruptError):
    """A drawable tag has no sentence with a finite score."""


class ScorerProtocolError(TagCorruptError):
    """The external scorer subprocess violated the line protocol."""
