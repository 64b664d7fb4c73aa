"""Exception types shared across the package.

Domain errors (an argument outside an operation's precondition) are plain
``ValueError``.  Everything deriving from :class:`NumericalFailure` signals
that a computation could not be carried out on otherwise valid input.
"""


class NumericalFailure(RuntimeError):
    """A computation failed for numerical or geometric reasons."""


class DegenerateError(NumericalFailure):
    """Input is degenerate (zero-volume simplex, coplanar hull input, empty region)."""


class UnboundedCellError(NumericalFailure):
    """A Voronoi cell is not bounded by its neighbours' bisectors."""


class ProbeRadiusError(NumericalFailure):
    """Probing balls cannot be placed, or catch no points."""


class PatchOrientationError(NumericalFailure):
    """The anchor triangle is missing from the patch hull."""
