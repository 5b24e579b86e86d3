"""Exception and warning types raised across the package."""


class Bergmann2DError(Exception):
    """Base class for every error raised by this package."""


class AlphaVanishes(Bergmann2DError):
    """``|1 + w_alpha|`` fell below the configured floor somewhere on the sampling net."""


class NonIntegrable(Bergmann2DError):
    """A continuous y-Fourier transform was requested for a non-decaying profile."""


class SeriesDiverges(Bergmann2DError):
    """The geometric expansion of ``v_alpha`` for a single-harmonic grating does not converge."""


class GrazingAngle(Bergmann2DError):
    """An incidence or scattering angle is too close to +-90 degrees."""


class QuadratureNotConverged(Bergmann2DError):
    """Doubling the quadrature nodes changed the result by more than the tolerance."""


class DiscreteOffGrid(Bergmann2DError):
    """A Dirac shift does not connect the nodes of the momentum basis."""


class RouteMismatch(Bergmann2DError):
    """Two independent constructions of the same kernel disagree."""

    def __init__(self, message, discrepancy=None):
        super().__init__(message)
        self.discrepancy = discrepancy


class ChannelClosed(Bergmann2DError):
    """The requested diffraction channel is not open at this wavenumber and incidence angle."""


class NotDerived(Bergmann2DError):
    """No closed form is available for the requested coefficient."""


class NonRealZ0(Bergmann2DError):
    """The Brewster analysis needs a real ``z0``."""


class UMinusZero(Bergmann2DError):
    """``u_-`` vanished while solving for the coating permittivities."""


class FloorViolation(Bergmann2DError):
    """A solved coating permittivity is too close to zero."""


class FeasibilityFail(Bergmann2DError):
    """The requested layer shapes cannot make the slab invisible."""


class ConfigInvalid(Bergmann2DError):
    """A run configuration or medium file failed validation."""


class TruncationWarning(UserWarning):
    """A truncated spectral integral may have lost more than the spectral tolerance."""
