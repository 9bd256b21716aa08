"""Shared exception types for numerical failures."""


class NumericalError(RuntimeError):
    """A numerical procedure failed in a detectable, reportable way."""


class WageConvergenceError(NumericalError):
    """The wage fixed-point iteration ran out of sweeps."""

    def __init__(self, iterations: int, residual: float, step: int | None = None):
        self.iterations = iterations
        self.residual = residual
        self.step = step
        at = f" at time step {step}" if step is not None else ""
        super().__init__(
            f"wage fixed point did not reach tolerance within {iterations} sweeps{at}; "
            f"last residual {residual:.3e}"
        )


class NegativeDensityError(NumericalError):
    """An explicit step would push the population density below zero."""

    def __init__(self, step: int | None = None):
        self.step = step
        at = f"time step {step}" if step is not None else "a single explicit step"
        super().__init__(
            f"density would turn negative at {at}; the step size dt is too large "
            "for this parameter set"
        )


class BracketError(NumericalError):
    """A root bracket could not be established or refined."""
