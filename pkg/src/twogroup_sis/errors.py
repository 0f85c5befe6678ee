"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model parameters (nonpositive rates, b1 > b, p outside [0,1], ...)."""


class DomainError(ValueError):
    """State lies outside the domain of the requested operation."""


class ConfigError(ValueError):
    """Malformed run configuration (unknown/missing keys, bad value types)."""


class InternalError(RuntimeError):
    """A numerical certificate failed where theory says it cannot.

    Raised e.g. when the threshold exceeds one but the computed endemic
    state falls outside the feasible triangle, or when a grid scan finds
    a rest point the closed-form construction did not report.  Signals a
    bug (or parameters at an excluded degeneracy), not a model regime.
    """
