"""Exception types shared across the toolkit."""


class BergmanError(Exception):
    """Base class for all toolkit errors."""


class PointOutsideDomain(BergmanError):
    """A point failed the (strict) membership test of a domain."""


class UnsupportedKind(BergmanError):
    """The requested operation is not available for this domain kind."""


class NonpositiveDiagonal(BergmanError):
    """K(z, z) evaluated to a nonpositive or nonfinite value."""


class UndeclaredAsymptotics(BergmanError):
    """A Reinhardt profile lacks the exponent data needed to classify a tail."""


class SeriesDivergenceSuspected(BergmanError):
    """Partial sums of a kernel series stopped decreasing."""


class InvalidResolution(BergmanError):
    """Quadrature resolution parameters are out of range."""


class NonFiniteValue(BergmanError):
    """An integrand produced NaN or infinity at a quadrature node."""


class NonFiniteSymbol(BergmanError):
    """An operator symbol produced NaN or infinity at a quadrature node."""


class BorderlineExponent(BergmanError):
    """A power-law exponent is too close to -1 to classify reliably."""


class TruncationInsufficient(BergmanError):
    """A truncated series has an estimated tail above tolerance."""


class NoConvergence(BergmanError):
    """An iterative scheme stalled before reaching its tolerance."""


class EmptyFamily(BergmanError):
    """A witness sweep was requested over an empty parameter family."""


class InadmissibleIndex(BergmanError):
    """A monomial exponent pair is not square-integrable on the domain."""


class EpsilonOutOfRange(BergmanError):
    """The family parameter must lie in (0, 1]."""
