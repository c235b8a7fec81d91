"""Exception hierarchy shared by the numerical modules."""


class HeunSpectraError(Exception):
    """Base class for every error raised by this package."""


class RootFindingError(HeunSpectraError):
    """Aberth iteration did not converge.

    Carries the best iterate and its residual so callers can decide whether
    the partial answer is usable.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class SpectralError(HeunSpectraError):
    """Failure while solving the Heine-Stieltjes eigenproblem."""


class DegenerateLeadingCoefficient(SpectralError):
    pass


class DegreeDropError(SpectralError):
    pass


class BranchAmbiguityError(HeunSpectraError):
    """An integration path passes too close to a branch point."""


class RefineRuleError(HeunSpectraError):
    """Quadrature nodes too coarse to follow the square-root branch."""


class TraceError(HeunSpectraError):
    """A curve or trajectory trace stalled or diverged."""

    def __init__(self, message, last_point=None, diagnostics=None):
        super().__init__(message)
        self.last_point = last_point
        self.diagnostics = diagnostics or {}


class UnsupportedConfiguration(HeunSpectraError):
    pass


class NotStrebelError(HeunSpectraError):
    pass
