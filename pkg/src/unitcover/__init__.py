"""Unit-ball cover 1-density: the planar optimum, Voronoi cover checks, and
volume estimators for the dodecahedral cell's once-covered region."""

__version__ = "0.1.0"
