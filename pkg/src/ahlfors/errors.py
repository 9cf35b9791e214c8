"""Exception types raised across the package."""


class AhlforsError(Exception):
    """Base class for all package errors."""


class BadShape(AhlforsError, ValueError):
    pass


class NonSPDMetric(AhlforsError, ValueError):
    pass


class RankMismatch(AhlforsError, TypeError):
    pass


class NotTraceFree(AhlforsError, ValueError):
    pass


class NotTT(AhlforsError, ValueError):
    pass


class NotFlat(AhlforsError, ValueError):
    pass


class Inconsistent(AhlforsError, ValueError):
    """Right-hand side has a component along the kernel of S*S."""


class NoConvergence(AhlforsError, RuntimeError):
    """Iteration limit reached; the partial result is kept on ``.result``."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class Inapplicable(AhlforsError, ValueError):
    pass


class BadMagic(AhlforsError, ValueError):
    pass


class ShapeMismatch(AhlforsError, ValueError):
    pass


class TruncatedPayload(AhlforsError, ValueError):
    pass
