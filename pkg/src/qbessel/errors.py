"""Exception and warning types."""


class QBesselError(Exception):
    """Base class for all errors raised by qbessel."""


class DomainError(QBesselError, ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class ConvergenceError(QBesselError, ArithmeticError):
    """A series or infinite product did not converge within its cap."""


class LatticeOverflowError(QBesselError, OverflowError):
    """A non-finite intermediate appeared in a lattice sum."""


class AdmissibilityError(QBesselError, ValueError):
    """The wavelet admissibility constant is zero or not finite."""


class PrecisionWarning(UserWarning):
    """A value was evaluated outside the double-precision cancellation envelope."""


class ClippingWarning(UserWarning):
    """Support was lost when shifting a function across the window edge."""


class CoverageWarning(UserWarning):
    """Scale or position ranges do not cover the signal's support."""
