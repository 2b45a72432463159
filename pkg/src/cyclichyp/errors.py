"""Exception hierarchy.

Every error raised by the library derives from :class:`CyclicHypError`, so the
CLI can map domain failures to a single exit code.
"""


class CyclicHypError(Exception):
    """Base class for all domain errors."""


class OnCut(CyclicHypError):
    """Argument lies on (or within tolerance of) a branch cut."""


class ZeroArgument(CyclicHypError):
    pass


class PoleInDenominator(CyclicHypError):
    """A Pochhammer symbol in a denominator vanishes."""

    def __init__(self, message, index=None, order=None):
        super().__init__(message)
        self.index = index
        self.order = order


class DegenerateAlpha(CyclicHypError):
    pass


class OnBoundary(CyclicHypError):
    """Point sits on a region boundary of the phase classification."""


class NoConsistentPhase(CyclicHypError):
    pass


class ZeroParameter(CyclicHypError):
    pass


class NotCyclic(CyclicHypError):
    """Parameter triple violates gamma^N = (1 - beta^N) / (1 - alpha^N)."""


class BranchPoint(CyclicHypError):
    pass


class InconsistentRoots(CyclicHypError):
    pass


class DerivationMismatch(CyclicHypError):
    pass


class ZeroDenominator(CyclicHypError):
    pass


class DomainError(CyclicHypError, ValueError):
    pass


class OffCurve(CyclicHypError):
    pass


class SectorViolation(CyclicHypError):
    pass


class SectorBoundary(CyclicHypError):
    pass
