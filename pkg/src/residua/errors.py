"""Exception hierarchy shared by every module."""


class ResiduaError(Exception):
    """Base class for all errors raised by the package."""


class SpecError(ResiduaError):
    """Malformed or ill-typed input (a ``.date``, ``.prog`` or ``.trace`` file, or an AST).

    ``line`` and ``col`` are 1-based when known.
    """

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            where = f"{line}:{col}" if col is not None else f"{line}"
            message = f"{where}: {message}"
        super().__init__(message)


class NondeterminismError(ResiduaError):
    def __init__(self, state, event, valuation, klass=None, index=None):
        self.state = state
        self.event = event
        self.valuation = dict(valuation)
        self.klass = klass
        self.index = index
        msg = f"several transitions enabled in state {state!r} on {event!r} under {self.valuation}"
        if klass is not None:
            msg += f" (class {klass!r}, index {index})"
        super().__init__(msg)


class IncompatibleUnion(ResiduaError):
    """The two DATEs are not component-wise subsets of a common parent."""


class ContradictoryAliases(ResiduaError):
    """A must-alias pair was also declared as not-may."""


class ResourceLimit(ResiduaError):
    """An enumeration or product construction exceeded its configured cap."""
