"""Exception hierarchy shared by all modules."""


class MallError(Exception):
    """Base class for every error raised by this package."""


class FormulaSyntaxError(MallError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class NegAtomInput(MallError, ValueError):
    """The bipole mapping is undefined on a bare negative atom."""


class TriggerMismatch(MallError, ValueError):
    """An inference scheme cannot be applied to the given sequent."""


class NotCorrect(MallError):
    """A proof structure is not a proof net (or cannot be sequentialized)."""


class EngineError(MallError):
    """Base class for transaction failures; carried by aborted transactions."""


class BindingStale(EngineError):
    """Bound places are missing, mislabelled, or already consumed."""


class StructureViolation(EngineError):
    def __init__(self, message, violations=()):
        self.violations = tuple(violations)
        super().__init__(message)


class LockConflict(EngineError):
    def __init__(self, message, holders=()):
        self.holders = tuple(holders)
        super().__init__(message)


class ValidationFailed(EngineError):
    def __init__(self, message, trip=None):
        self.trip = trip
        super().__init__(message)
