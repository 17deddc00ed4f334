"""Error taxonomy shared across the package, mapped to CLI exit codes."""


class PipetrackError(Exception):
    """Base class; exit_code drives the CLI process status."""
    exit_code = 1


class ConfigError(PipetrackError):
    """Malformed or inconsistent scenario configuration."""
    exit_code = 2


class VariationBudgetError(PipetrackError):
    """Initial data or geometry variation exceeds the small-variation
    budget the solver is validated for."""
    exit_code = 3


class SolverError(PipetrackError):
    """Numerical solve failed (Newton divergence, sonic transition,
    domain exit, internal consistency breach)."""
    exit_code = 4


class JunctionSolvabilityError(SolverError):
    """The junction transfer map has no admissible root for these data."""


class SonicTransitionError(SolverError):
    """A stationary profile left the subsonic region."""


class LargeDataError(SolverError):
    """Riemann data too far apart for the wave-curve solver."""


class InternalConsistencyError(SolverError):
    """An internal invariant broke; aborting with a diagnostic."""


class InteractionCapError(PipetrackError):
    """The front-tracking event counter exceeded the configured cap."""
    exit_code = 5
