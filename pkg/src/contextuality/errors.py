"""Exception hierarchy shared by every module of the package."""


class ContextualityError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ContextualityError, ValueError):
    """An input violates a structural invariant (bad scenario, unnormalised table, ...)."""


class ParseError(ContextualityError, ValueError):
    """A file or formula could not be parsed."""


class StateSpaceError(ContextualityError):
    """The number of global assignments exceeds the configured bound."""


class IncompatibleModelError(ContextualityError):
    """The operation requires a compatible (no-signalling) model."""


class CyclicCoverError(ContextualityError):
    """The operation requires an acyclic cover."""


class SatisfiableFamilyError(ContextualityError):
    """The formula family is jointly satisfiable, so it yields no logical Bell inequality."""
