"""Domain exceptions shared across the toolkit."""


class KreinextError(Exception):
    """Base class for every error raised by this package on purpose."""


class PoleAt(KreinextError):
    """An evaluation point collided with an atom of the representing measure."""

    def __init__(self, point, atom):
        self.point = point
        self.atom = atom
        super().__init__(f"point {point} hits the atom at t={atom}")


class EmptyMeasure(KreinextError):
    """A nonempty measure was required."""


class DimensionMismatch(KreinextError):
    """Coordinate vectors with incompatible lengths."""


class TooFewProbes(KreinextError):
    """Fewer probe points than the space dimension."""


class IdenticallyZero(KreinextError):
    """The zero function was passed where a nonzero one is required."""


class DegenerateExtension(KreinextError):
    """Extension data with q + c identically zero."""


class QZero(KreinextError):
    """Requested resolvent point is (numerically) a spectral point."""


class NotAnExtension(KreinextError):
    """The given relation or resolvent sample does not come from an extension."""


class NotRankOne(KreinextError):
    """A resolvent difference that should be rank one is not."""


class NotAnEigenvalue(KreinextError):
    """Eigenvector requested at a point that is not an eigenvalue."""


class Infeasible(KreinextError):
    """Spectrum interpolation request that cannot be met in this space."""


class MixedHalfPlanes(KreinextError):
    """Point list with members in both open half planes."""


class PhaseMinusOne(KreinextError):
    """Blaschke phase factor too close to -1."""


class NonHerglotzResidue(KreinextError):
    """Cayley transform produced non-positive atom weights (numerical failure)."""


class ZeroOfG(KreinextError):
    """A defining function was evaluated at (numerically) one of its zeros."""


class CertificationError(KreinextError):
    """Independent numerical cross-check disagreed beyond tolerance."""
