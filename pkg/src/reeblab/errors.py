"""Exception hierarchy shared by all reeblab modules."""


class ReebLabError(Exception):
    """Base class for all errors raised by this package."""


class NotStarShaped(ReebLabError):
    """The Liouville form is nonpositive on the Hamiltonian field at a point."""


class DegenerateFrame(ReebLabError):
    """The contact frame cannot be built (|lambda0(X3)| below tolerance)."""


class FrameDegenerate(ReebLabError):
    """A moving frame lost rank along an orbit."""


class StepUnderflow(ReebLabError):
    """The adaptive integrator drove its step below the minimum."""


class NoConvergence(ReebLabError):
    """An iterative solver failed to converge."""


class StructureMismatch(ReebLabError):
    """The critical-point structure differs from the expected pattern."""


class HypothesisFailure(ReebLabError):
    """A named inequality or sign pattern required downstream is violated."""


class NotClosed(ReebLabError):
    """A loop does not close within tolerance."""


class NoReturn(ReebLabError):
    """A trajectory did not return to its section within the time horizon."""

    def __init__(self, message, elapsed=None):
        super().__init__(message)
        self.elapsed = elapsed


class NotHyperbolic(ReebLabError):
    """An operation requiring a hyperbolic orbit was given an elliptic one."""


class SamplingTooCoarse(ReebLabError):
    """Angle increments along a path exceed the safe tracking threshold."""


class DegenerateOrbit(ReebLabError):
    """A winding-interval endpoint touches an integer (nondegeneracy fails)."""


class RoundingUnsafe(ReebLabError):
    """A real value is too far from the nearest integer to round safely."""


class AsymmetryTooLarge(ReebLabError):
    """The recovered coefficient matrix is not symmetric within tolerance."""


class BandTooNarrow(ReebLabError):
    """The trusted spectral band does not cover the requested windings."""


class NoSafePole(ReebLabError):
    """No projection pole with adequate clearance from the curves was found."""


class OffsetTooLarge(ReebLabError):
    """A push-off curve comes too close to the original curve."""


class OutsideEnergyCap(ReebLabError):
    """A profile point violates the energy relation f(g)^2 >= 0."""


class BracketFailure(ReebLabError):
    """A root bracket could not be established."""


class SlowConvergence(ReebLabError):
    """A profile failed to reach its asymptote within the arc-length span."""


class VanishingSection(ReebLabError):
    """A section of the contact plane vanishes at some node."""


class UnreliableWinding(ReebLabError):
    """A winding cannot be tracked because the section is below the floor."""
