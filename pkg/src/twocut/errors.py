"""Exception hierarchy shared by all numeric modules."""


class TwoCutError(Exception):
    """Base class for every error raised by the package."""


class DomainError(TwoCutError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NonConvergence(TwoCutError):
    """A refinement loop (quadrature doubling, extrapolation) did not settle."""


class DivergedNewton(TwoCutError):
    """Newton iteration hit its iteration cap without meeting the residual target."""


class SingularJacobian(TwoCutError):
    """The finite-difference Jacobian could not be factored."""


class PrecisionExhausted(TwoCutError):
    """Working precision is too low for the requested computation."""


class CollidedEndpoints(TwoCutError):
    """Two endpoints of the support merged; the two-cut ansatz no longer applies."""


class BranchError(TwoCutError):
    """A square-root or fourth-root branch produced an inconsistent sign pattern."""


class CertificateFailure(TwoCutError):
    """A regularity certificate failed along a deformation path."""


class RootBracketError(TwoCutError):
    """A scalar root could not be bracketed inside the admissible interval."""


class NotTwoCut(TwoCutError):
    """The potential is not certified as two-cut regular."""
