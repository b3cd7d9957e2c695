"""Exception hierarchy shared across the toolkit."""


class SiegelkitError(Exception):
    """Base class for all toolkit errors."""


class PrecisionExhausted(SiegelkitError):
    """A computation ran out of significant digits before reaching its target."""


class DigitsExhausted(PrecisionExhausted):
    """A digit stream with an explicit-only tail was read past its end."""


class DomainError(SiegelkitError):
    """An argument lies outside the mathematical domain of the operation."""


class BranchAmbiguous(SiegelkitError):
    """Two candidate branches of a multivalued inverse cannot be separated."""


class BranchCollision(SiegelkitError):
    """A pullback step approached a critical point; both preimages coincide."""


class ResidualTooLarge(SiegelkitError):
    """A self-consistency residual exceeded its declared bound."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class OrbitEscaped(SiegelkitError):
    """An orbit left the validity region before reaching its target."""


class OutOfExtendedDomain(SiegelkitError):
    """A point is beyond the reach of the extended inverse coordinate."""


class NewtonDiverged(SiegelkitError):
    """A Newton polish failed to reach the requested tolerance."""


class KMaxExceeded(SiegelkitError):
    """The sector return search hit its iteration cap."""


class MeshPointOutsideSector(SiegelkitError):
    """A renormalization mesh point fell outside the sector image."""


class SingletonSearchFailed(SiegelkitError):
    """A horizontal line missed the sector boundary polyline (mesh too coarse)."""


class JunctionGap(SiegelkitError):
    """Adjacent curve pieces differ by more than the mesh tolerance."""


class NestingViolation(SiegelkitError):
    """A sampled point of a deeper nest level fell outside the previous level."""


class SmallDivisorOverflow(SiegelkitError):
    """A linearization divisor |lambda^k - lambda| fell below the precision floor."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k
