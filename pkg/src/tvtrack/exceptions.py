"""Exception hierarchy for identification, solver, and configuration failures."""


class PipelineError(Exception):
    """Base class for all tvtrack errors."""


class ConfigError(PipelineError):
    """Malformed or inconsistent scenario configuration."""


class IdentificationError(PipelineError):
    """Base class for failures in the identification stages."""


class NotIdentifiableError(IdentificationError):
    """The data carries no identifiable dynamics (e.g. zero or rank-deficient Hankel)."""


class UnderdeterminedTransformError(IdentificationError):
    """The coordinate-transform system is rank deficient in the square case.

    Carries ``deficit``, the number of missing ranks relative to the
    number of unknowns.
    """

    def __init__(self, message, deficit):
        super().__init__(message)
        self.deficit = int(deficit)


class SingularTransformError(IdentificationError):
    """The recovered inverse-transform matrix is numerically singular."""


class CertificateUnavailableError(IdentificationError):
    """The rank certificate cannot be evaluated (defective realization matrix)."""


class SolverError(PipelineError):
    """Base class for optimization-stage failures."""


class NoMinimizerError(SolverError):
    """The closed-form quadratic problem has no minimizer (non-PD curvature)."""


class DivergenceError(SolverError):
    """Gradient iterations blew past the divergence guard.

    Carries the outer time index ``t`` and inner iteration ``d``.
    """

    def __init__(self, message, t, d):
        super().__init__(message)
        self.t = int(t)
        self.d = int(d)


class ReferenceUnavailableError(SolverError):
    """No certified stationary point was found for the reference optimum."""
