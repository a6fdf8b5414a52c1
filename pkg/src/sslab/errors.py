"""Exception and warning types shared across the laboratory."""


class SslabError(Exception):
    """Base class for all laboratory errors."""


# --- configuration ---------------------------------------------------------

class ParseError(SslabError):
    """Config text could not be parsed, or an unknown key was found.

    Carries optional ``line``/``column`` (1-based) and a ``suggestion`` for
    near-miss key names.
    """

    def __init__(self, message, line=None, column=None, suggestion=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        if suggestion is not None:
            message = f"{message}; did you mean '{suggestion}'?"
        super().__init__(message)
        self.line = line
        self.column = column
        self.suggestion = suggestion


class ValidationError(SslabError):
    """Config parsed but violates a declared invariant."""


# --- spectral data and domains --------------------------------------------

class DegenerateDomain(SslabError):
    """Domain parameters do not describe a single smooth curve in Im z > 0."""


class EmptyDomainSample(SslabError):
    """Requested sample count could not be drawn from the domain."""


class DuplicatePoleError(SslabError):
    """Two expanded poles coincide within tolerance."""


class NodeOutsideDomain(SslabError):
    """A quadrature node fell outside its domain."""


class ProbeInsideDomain(SslabError):
    """An evaluation point must lie outside the closed domain."""


class BranchAmbiguityError(SslabError):
    """No Schwarz-root branch matches the target within tolerance."""


class BranchValidationError(SslabError):
    """Schwarz function failed the boundary identity S(z) = conj(z)."""


# --- special functions -----------------------------------------------------

class DomainError(SslabError):
    """Argument outside the mathematical domain of a special function."""


class OnCutError(SslabError):
    """Evaluation point lies on a branch cut and no side was requested."""


class PathThroughCutError(SslabError):
    """No valid integration path exists for the requested endpoint/side."""


class TooCloseToEndpoint(SslabError):
    """Evaluation point is inside the guard radius of a cut endpoint."""


class ThetaZeroError(SslabError):
    """A theta denominator vanished (model solution pole)."""


class LogBranchError(SslabError):
    """log r crossed the negative real axis along the spectral band."""


class SignCheckFailed(SslabError):
    """An asserted sign pattern did not hold at the sampled points."""


# --- linear algebra / evaluation ------------------------------------------

class SingularSystemError(SslabError):
    """Dressing system is numerically singular (pole-collision degeneracy)."""


class PoleEvaluationError(SslabError):
    """Matrix evaluation requested at (or too close to) a pole."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole


class GridTooSmall(SslabError):
    """Finite-difference residual needs at least 5 x-points and 3 t-points."""


class UnderflowFloor(SslabError):
    """All samples fell below the representable floor (|q| < 1e-300)."""


class IllConditionedWarning(UserWarning):
    """Condition estimate of a dressing system exceeded 1e12."""
