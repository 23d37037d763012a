"""Exception types shared across the package."""


class CycloStabError(Exception):
    """Base class for all cyclostab errors."""


class DegenerateMobius(CycloStabError):
    """The four map coefficients satisfy ad - bc = 0 (map collapses to a constant)."""


class PoleOnSpectrum(CycloStabError):
    """The transformed loop matrix has a pole at a spectrum point (index unbounded)."""


class NonConvergence(CycloStabError):
    """Fixed-point iteration exceeded its iteration cap."""


class ZeroPolynomial(CycloStabError):
    """Root finding requested on the zero polynomial."""


class ImproperSystem(CycloStabError):
    """State-space realization requested for a non-proper transfer function."""


class CoprimalityError(CycloStabError):
    """Numerator and denominator share a closed-right-half-plane root."""


class DelayUnsupported(CycloStabError):
    """Polynomial closed-loop analysis requested for a subsystem with a pure delay."""


class PoleOnAxis(CycloStabError):
    """Frequency response evaluated at an imaginary-axis pole."""


class TransformPole(CycloStabError):
    """The disk transform denominator vanishes at a frequency sample."""


class Unboundable(CycloStabError):
    """No single positive scaling places the whole curve inside the region."""


class PointOnCurve(CycloStabError):
    """Winding number requested about a point lying on the curve."""


class StabilityCheckFailed(CycloStabError):
    """The encirclement count rules out stability of the transformed subsystem."""

    def __init__(self, winding_count, required):
        self.winding_count = winding_count
        self.required = required
        super().__init__(
            f"winding number {winding_count} (required {required})")


class NotHurwitz(CycloStabError):
    """State-space matrix A has an eigenvalue in the closed right half-plane."""


class Infeasible(CycloStabError):
    """No storage matrix exists: the norm bound is violated."""


class MarginalCase(CycloStabError):
    """Norm within tolerance of the bound; certificate construction is ill-conditioned."""
