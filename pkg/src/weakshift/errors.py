"""Exception types raised by weakshift operations."""


class WeakshiftError(Exception):
    """Base class for all weakshift-specific errors."""


class EnergyBelowFloor(WeakshiftError):
    """Integrated spectral energy is below the configured floor.

    Raised when a centroid (or an output/input energy ratio) is requested
    for a spectrum whose energy is too small for the result to be
    numerically meaningful, e.g. at a fully destructive post-selection.
    """


class DenominatorBelowFloor(WeakshiftError):
    """The closed-form shift denominator 1 + gamma*cos(theta) is ~0.

    The central-frequency shift diverges at the singular post-selection
    angle; callers probing that neighbourhood must handle this error.
    """


class InfeasibleBudget(WeakshiftError):
    """A loss budget lies below the minimum achievable loss."""


class AllSamplesSingular(WeakshiftError):
    """Every Monte-Carlo sample landed on a singular configuration."""


class DegenerateBracket(WeakshiftError):
    """A delay search bracket is empty or inverted."""


class NonlinearRegime(WeakshiftError):
    """A small-shift linearized inversion was used outside its validity.

    Raised when the full model evaluated at the recovered delay deviates
    from the linearized model by more than the configured fraction.
    """
