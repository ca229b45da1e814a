"""Exception hierarchy for wardlab."""

from __future__ import annotations


class WardlabError(Exception):
    """Base class for every error raised by the package."""


class EvaluationError(WardlabError):
    """A sequence or function produced a non-finite value or could not be evaluated."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ContractError(WardlabError):
    """A structural precondition was broken (e.g. a non-increasing index map)."""


class ConfigError(WardlabError):
    """Invalid analysis configuration or lacunary scheme."""


class PreconditionError(WardlabError):
    """An operation was called on inputs that do not meet its stated precondition."""


class DomainError(WardlabError):
    """A value fell outside the domain of a function under test."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class UndecidableError(WardlabError):
    """A set property cannot be decided from the representation (missing bound metadata)."""


class NoWitnessError(WardlabError):
    """A monotone witness was requested from a set bounded in that direction."""


class ExtractionRefused(WardlabError):
    """Subsequence extraction declined because the prefix looks unbounded below."""


class CatalogueError(WardlabError):
    """Unknown catalogue name."""


class ParameterError(WardlabError):
    """Invalid parameters for a catalogue member or expression."""


class ParseError(WardlabError):
    """Malformed expression, set literal, or input file."""


class RangeError(ConfigError):
    """Lacunary boundaries left the representable integer range."""
