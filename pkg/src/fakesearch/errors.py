"""Exception hierarchy shared by the solver modules and the CLI exit codes."""


class FakeSearchError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(FakeSearchError, ValueError):
    """Malformed input: non-finite, non-positive or out-of-range fields."""

    exit_code = 2

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class RegimeError(FakeSearchError):
    """Parameters fall outside the regime an operation requires (A1/A2, sigma vs sigma_bar)."""

    exit_code = 3


class DomainError(FakeSearchError, ValueError):
    """A function was evaluated outside its domain."""

    exit_code = 3


class InconsistencyError(FakeSearchError):
    """Internal consistency check failed (e.g. hazard and root disagree)."""

    exit_code = 4


class ToleranceError(FakeSearchError):
    """A numerical routine did not reach the requested tolerance.

    ``estimate`` carries the best value the routine produced.
    """

    exit_code = 4

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message if estimate is None else f"{message} (estimate={estimate!r})")


class VerificationError(FakeSearchError):
    """An equilibrium failed certification."""

    exit_code = 5
