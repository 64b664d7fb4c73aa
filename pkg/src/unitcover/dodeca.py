"""Dodecahedral Voronoi cell of a unit ball and the once-covered region inside it.

The cell of the ball at ``p0 = (0, 0, 2H)`` has a pentagonal face in the plane
``z = H`` shared with the ball at the origin.  By symmetry one sixtieth of the
cell suffices: the tetrahedron ``T = (p0, p1, p2, p3)`` over one fifth of that
face.  The part of ``T`` outside the origin's unit ball is the region ``S``
that only the ball at ``p0`` covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .geom import EPS, Plane3, Tetrahedron, tetra_volume

Config = Literal["paper", "regular"]

PAPER_EDGE = 0.763934
REGULAR_EDGE = 4.0 / (math.sqrt(3.0) * (1.0 + math.sqrt(5.0)))


@dataclass(frozen=True)
class DodecaParams:
    a: float  # edge length
    R: float  # pentagon circumradius
    H: float  # centre-to-face distance
    rho: float  # cell circumradius
    alpha1: float  # cell volume / ball volume
    config: str = "paper"


def dodeca_params(config: Config = "paper") -> DodecaParams:
    """Cell constants for circumradius 1.

    ``paper`` starts from the published edge length 0.763934, ``regular``
    from the edge of the regular dodecahedron inscribed in the unit sphere.
    In both, R follows from the pentagon's circumcircle and H from
    ``H^2 + R^2 = 1``; alpha1 counts twelve pentagonal pyramids of height H.
    """
    if config == "paper":
        a = PAPER_EDGE
    elif config == "regular":
        a = REGULAR_EDGE
    else:
        raise ValueError(f"unknown configuration {config!r}")
    R = a / (2.0 * math.sin(math.radians(36.0)))
    H = math.sqrt(1.0 - R * R)
    pentagon = 0.5 * a * R * math.sin(math.radians(54.0)) * 5.0
    alpha1 = 12.0 * pentagon * H / 3.0 / (4.0 * math.pi / 3.0)
    return DodecaParams(a=a, R=R, H=H, rho=1.0, alpha1=alpha1, config=config)


@dataclass(frozen=True)
class CellFrame:
    params: DodecaParams
    o: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray
    T: Tetrahedron
    T_prime: Tetrahedron
    big_tetra: Tetrahedron
    vol_T: float
    vol_T_prime: float
    vol_big: float


def cell_frame(params: DodecaParams) -> CellFrame:
    H, R = params.H, params.R
    c72, s72 = math.cos(math.radians(72.0)), math.sin(math.radians(72.0))
    o = np.zeros(3)
    p0 = np.array([0.0, 0.0, 2.0 * H])
    p1 = np.array([0.0, R, H])
    p2 = np.array([0.0, 0.0, H])
    p3 = np.array([R * s72, R * c72, H])
    p4 = np.array([0.0, 0.0, 1.0])
    for p in (o, p0, p1, p2, p3, p4):
        p.setflags(write=False)
    T = Tetrahedron([p0, p1, p2, p3])
    # T cut by z >= 1: similar to T about the apex p0
    k = (2.0 * H - 1.0) / H
    T_prime = Tetrahedron([p0, p0 + k * (p1 - p0), p0 + k * (p2 - p0), p0 + k * (p3 - p0)])
    big = Tetrahedron([p0, p1, p3, p4])
    return CellFrame(
        params, o, p0, p1, p2, p3, p4, T, T_prime, big,
        tetra_volume(T), tetra_volume(T_prime), tetra_volume(big),
    )


class RegionS:
    """Closed set ``T`` minus the open unit ball at the origin.

    With ``carve_ball=False`` the region is all of ``T``; that variant serves
    as a sanity target with an exactly known volume.
    """

    def __init__(self, frame: CellFrame, carve_ball: bool = True):
        self.frame = frame
        self.carve_ball = carve_ball
        planes = frame.T.inward_planes()
        self._normals = np.array([pl.normal for pl in planes])
        self._offsets = np.array([pl.offset for pl in planes])

    @property
    def planes(self) -> tuple[Plane3, ...]:
        return tuple(Plane3(n, c) for n, c in zip(self._normals, self._offsets))

    def clearance(self, pts) -> np.ndarray:
        """Smallest signed distance to T's faces (positive inside)."""
        pts = np.asarray(pts, dtype=float)
        return np.min(pts @ self._normals.T - self._offsets, axis=-1)

    def contains(self, pts, eps: float = EPS):
        pts = np.asarray(pts, dtype=float)
        ok = self.clearance(pts) >= -eps
        if self.carve_ball:
            ok &= np.linalg.norm(pts, axis=-1) >= 1.0 - eps
        return ok if ok.ndim else bool(ok)

    def holds_ball(self, centers, radius: float):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        c = np.asarray(centers, dtype=float)
        ok = self.clearance(c) >= radius
        if self.carve_ball:
            ok &= np.linalg.norm(c, axis=-1) >= 1.0 + radius
        if radius == 0.0:
            ok = self.contains(c)
        return ok if np.ndim(ok) else bool(ok)


def region_S_contains(r: RegionS, q) -> bool | np.ndarray:
    """Closed membership in S; accepts one point or an ``(N, 3)`` array."""
    return r.contains(q)


def ball_inside_S(r: RegionS, center, radius: float) -> bool | np.ndarray:
    """Whether the closed ball lies in S, from face clearances and the centre's norm."""
    return r.holds_ball(center, radius)
