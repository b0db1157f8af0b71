"""Exception types raised by the pricing engine."""

from typing import Optional


class QuantoError(Exception):
    """Base class for all pricing engine errors."""


class ParameterError(QuantoError, ValueError):
    """Invalid model, instrument or numerical parameter."""


class DegenerateVarianceError(QuantoError):
    """Proxy variance Lambda(T) is zero where Greeks are required."""


class CorrelationError(QuantoError, ValueError):
    """Correlation too close to +/-1 for the requested quantity."""


class NoSolutionError(QuantoError):
    """Price outside the Black arbitrage band, no implied vol exists."""


class ConvergenceError(QuantoError, RuntimeError):
    """Root finder did not converge."""


class BudgetExhaustedError(QuantoError):
    """Monte Carlo budget used up before the confidence target was met.

    The best estimate obtained so far is attached as ``estimate``.
    """

    def __init__(self, message: str, estimate: Optional[object] = None):
        super().__init__(message)
        self.estimate = estimate
