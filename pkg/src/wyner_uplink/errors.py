"""Exception hierarchy shared by the rate engines and the CLI."""


class RateError(Exception):
    """Base class for all errors raised by this package."""


class NoBracket(RateError):
    """Bracket expansion failed to find a sign change of the fixed-point residual."""


class NoConvergence(RateError):
    """Iterative solver exhausted its budget before meeting the tolerance."""


class DegenerateTaps(RateError):
    """Closed-form expression hit a vanishing denominator."""


class SupportTooLarge(RateError):
    """Exact enumeration would exceed the term cap; use the Monte Carlo path."""


class NumericalFailure(RateError):
    """A factorization lost positive definiteness."""


class ConfigError(RateError):
    """Invalid user configuration (CLI flags or sweep config file)."""
