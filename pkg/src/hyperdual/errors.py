"""Exception types shared across the package."""


class HyperdualError(Exception):
    """Base class for all package-specific errors."""


class BalanceViolation(HyperdualError):
    """m1 + m2 and l1 + l2 differ beyond the admitted tolerance."""


class NonGenericKappa(HyperdualError):
    """kappa hits (or comes too close to) a resonance of the constants."""


class NegativeDimension(HyperdualError):
    """m2 or l2 is negative."""


class GeometryError(HyperdualError):
    """Requested contour geometry is inconsistent (collisions, bad truncation)."""


class FactorVanishes(HyperdualError):
    """A linear factor of the integrand vanishes at an evaluation point."""


class DegenerateParameters(HyperdualError):
    """Coincident evaluation points where the construction is singular."""


class StepTooLarge(HyperdualError):
    """A branch-tracking step would move a factor argument by pi/2 or more."""


class NoConvergence(HyperdualError):
    """Quadrature error estimate stayed above target after all refinements."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GammaPole(HyperdualError):
    """Gamma function evaluated at (or too close to) a nonpositive integer."""


class SinZero(HyperdualError):
    """A sine factor in a closed-form constant vanishes."""


class IndexOutOfRange(HyperdualError):
    """Basis index outside the range admitted by the module."""


class SingularPath(HyperdualError):
    """Integration path passes through a singular point of the equation."""


class ConfigError(HyperdualError):
    """Command-line or file configuration is invalid."""
