"""Exception hierarchy shared by every module."""


class TransversalLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(TransversalLabError, ValueError):
    pass


class ZeroVector(TransversalLabError, ValueError):
    pass


class DegenerateBody(TransversalLabError, ValueError):
    pass


class NonConvergence(TransversalLabError, RuntimeError):
    pass


class ParallelFlat(TransversalLabError, ValueError):
    pass


class PrereqViolated(TransversalLabError, ValueError):
    pass


class Inconclusive(TransversalLabError):
    """A heuristic transversal search could neither confirm nor refute."""

    def __init__(self, message, unknown=()):
        super().__init__(message)
        self.unknown = list(unknown)


class TooLarge(TransversalLabError, ValueError):
    pass


class StreamExhausted(TransversalLabError):
    def __init__(self, family):
        super().__init__(f"stream {family} cannot satisfy the request")
        self.family = family


class StuckError(TransversalLabError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class VerificationFailed(TransversalLabError, AssertionError):
    pass


class DegenerateIndex(TransversalLabError, ValueError):
    pass


class NoFarSamples(TransversalLabError, ValueError):
    pass


class UnsupportedCase(TransversalLabError, ValueError):
    pass
