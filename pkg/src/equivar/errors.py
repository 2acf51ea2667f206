"""Exception types shared across the package."""


class EquivarError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(EquivarError):
    pass


class ScenarioMismatch(EquivarError):
    pass


class UnknownScenario(EquivarError):
    pass


class MissingCoefficient(EquivarError):
    pass


class ParseError(EquivarError):
    pass


class LambdaOutOfRange(EquivarError):
    pass


class SupplementNotInvariant(EquivarError):
    """Supplied complement is not Ad(K)-invariant at the required tolerance."""


class AmbiguousRank(EquivarError):
    """An integer-relation residual fell inside the unsafe tolerance band."""


class NotRelativeEquilibrium(EquivarError):
    pass


class NoConvergence(EquivarError):
    pass


class SingularFrame(EquivarError):
    """The frame of infinitesimal generators degenerated; point left the chart."""


class ResidualTooLarge(EquivarError):
    """Least-squares residual exceeded tolerance where an exact solve was expected."""


class ValuesOutsideSubalgebra(EquivarError):
    pass


class OrderOutOfRange(EquivarError):
    pass


class UnsupportedGroup(EquivarError):
    pass


class PeriodReconstructionFailed(EquivarError):
    pass


class NotTangent(EquivarError):
    """Restriction to the chosen subspace is not tangent to it."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NewtonDiverged(EquivarError):
    pass


class DegenerateCrossing(EquivarError):
    """Eigenvalue crossing condition failed: sigma(0) != 0 or sigma'(0) = 0."""


class TrivialBranchMissing(EquivarError):
    pass


class StepLimitExceeded(EquivarError):
    pass


class ChartExit(EquivarError):
    pass
