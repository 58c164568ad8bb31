"""Exception hierarchy for the dpsde package.

Everything raised on purpose derives from :class:`DPSDEError` so callers
(tests, the CLI) can distinguish domain failures from genuine bugs.
"""


class DPSDEError(Exception):
    """Base class for all dpsde domain errors."""


class AlphaOutOfRange(DPSDEError):
    """alpha violates alpha < 1 (or is not finite)."""


class BetaOutOfRange(DPSDEError):
    """beta violates beta < 1 (or is not finite)."""


class RhoTooLarge(DPSDEError):
    """|alpha*beta| >= (1-alpha)(1-beta), i.e. |rho| >= 1."""


class NonPositiveHorizon(DPSDEError):
    """Time horizon is not a finite positive real."""


class InvalidGrid(DPSDEError):
    """Grid construction with non-positive step count or horizon."""


class DelayNotAligned(DPSDEError):
    """Delay 1/n is not an integer multiple of the grid step."""


class DelayTooFine(DPSDEError):
    """Delay 1/n is shorter than one grid step (lag of zero steps)."""


class NegativeInput(DPSDEError):
    """Modulus function evaluated at a negative argument."""


class NegativeStart(DPSDEError):
    """Skorohod map applied to a path with y_0 < 0."""


class EmptyInput(DPSDEError):
    """Running extrema of an empty sequence."""


class DegenerateFit(DPSDEError):
    """Rate fit with fewer than 3 points or non-positive estimates."""
