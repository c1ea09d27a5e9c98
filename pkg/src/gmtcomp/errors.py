"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the validity domain of an operation."""


class BoundaryError(DomainError):
    """A derivative was requested exactly at a regime-switching rate.

    Discontinuities at switching rates are handled by
    :func:`gmtcomp.comparative.regime_switch_jumps`, not by one-sided
    derivatives.
    """


class ConsistencyError(RuntimeError):
    """An internal invariant failed (e.g. threshold ordering).

    Signals a formula transcription bug, not bad user input.
    """


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, last_state=None, iterations=None):
        super().__init__(message)
        self.last_state = last_state
        self.iterations = iterations


class CalibrationError(RuntimeError):
    """No admissible parameter vector matches the requested moments."""
