"""Exception types raised across the toolkit."""


class LatkitError(Exception):
    """Base class for all latkit errors."""


class SemiringMismatchError(LatkitError):
    """Two operands use different semirings."""


class SymbolTableMismatchError(LatkitError):
    """Two operands do not share a symbol table."""


class CyclicFstError(LatkitError):
    """An operation that requires an acyclic FST received a cyclic one."""


class EpsilonCycleError(CyclicFstError):
    """Epsilon-removal found a cycle of epsilon arcs."""


class AcceptorRequiredError(LatkitError):
    """An operation that requires an acceptor received a transducer."""


class NotDeterministicError(LatkitError):
    """Minimization requires a deterministic input machine."""


class EmptyLanguageError(LatkitError):
    """The input FST accepts no string at all."""


class EmptyCompositionError(LatkitError):
    """A composition produced a machine with an empty language."""


class PathCountExceededError(LatkitError):
    """Path enumeration hit its cap."""

    def __init__(self, count, cap, message=None):
        self.count = count
        self.cap = cap
        super().__init__(
            message
            or f"path count {count} exceeds cap {cap}; prune the lattice first"
        )


class VocabularyError(LatkitError):
    """A word id or word string does not resolve in the symbol table."""


class ConfigError(LatkitError):
    """Invalid configuration value (probabilities, costs, thresholds)."""


class ArpaFormatError(LatkitError):
    """Malformed ARPA language-model file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ArchiveError(LatkitError):
    """Malformed lattice archive or mismatched utterance ids."""
