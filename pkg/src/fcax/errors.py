"""Exception types shared across the package."""

from __future__ import annotations


class FcaxError(Exception):
    """Base class for all errors raised by this package."""


class UniverseMismatchError(FcaxError):
    """Two values over different attribute universes were combined."""


class UnknownObjectError(FcaxError):
    """An object name does not exist in the context."""


class UnknownAttributeError(FcaxError):
    """An attribute name does not exist in the universe."""


class ConflictError(FcaxError):
    """Incomparable cells (one side x, the other o) met during a merge.

    ``conflicts`` lists every offending (object, attribute) pair, or
    (question, expert) pair when answer logs are merged.
    """

    def __init__(self, message: str, conflicts: list[tuple[str, str]]):
        super().__init__(f"{message}: {conflicts}")
        self.conflicts = conflicts


class CapExceededError(FcaxError):
    """An enumeration guard tripped; use the lazy iterator instead."""


class SatisfiabilityError(FcaxError):
    """An implication set is not satisfiable in a context.

    Carries the first offending object and attribute.
    """

    def __init__(self, obj: str, attribute: str):
        super().__init__(
            f"implications not satisfiable: object {obj!r} certainly lacks "
            f"{attribute!r} but the closure of its certain intent requires it"
        )
        self.object = obj
        self.attribute = attribute


class BackgroundError(FcaxError):
    """Background implications do not hold in the context they were given for."""

    def __init__(self, violated: list):
        lines = ", ".join(str(i) for i in violated)
        super().__init__(f"background implications do not hold in the context: {lines}")
        self.violated = violated


E_PREMISE_NOT_CERTAIN = "E_PREMISE_NOT_CERTAIN"
E_ATTRIBUTE_NOT_REFUTED = "E_ATTRIBUTE_NOT_REFUTED"
E_CONFLICTS_WITH_PRIOR = "E_CONFLICTS_WITH_PRIOR"


class CounterexampleError(FcaxError):
    """A submitted counterexample row violates the protocol rules."""

    def __init__(self, code: str, message: str, cells: list[tuple[str, str]] | None = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.cells = cells or []


class ProtocolError(FcaxError):
    """An exploration call arrived out of order (duplicate answer, no active
    question, result before completion, ...)."""


class ParseError(FcaxError):
    """A document deviated from its grammar; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
