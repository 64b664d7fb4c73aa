"""Planar unit-disk covers: the once-covered sector area, Voronoi cover checks,
and Monte Carlo multiplicity statistics for periodic (lattice) covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .errors import UnboundedCellError
from .geom import EPS, ConvexPolygon2, HalfPlane, RandomStream, clip_convex_polygon

Family = Literal["hex", "square"]


def sector_once_area(x: float) -> float:
    """Area of the sector between a disk's farthest cell vertex and a neighbour
    at distance ``2x`` that no other disk covers."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return x * math.sqrt(1.0 - x * x) - 0.5 * math.acos(x)


def _sector_slope(x: float) -> float:
    # d/dx of sector_once_area, simplified: (3/2 - 2x^2) / sqrt(1 - x^2)
    return (1.5 - 2.0 * x * x) / math.sqrt(1.0 - x * x)


def maximize_sector_once_area(x0: float = 0.5) -> tuple[float, float, float]:
    """Maximize the once-covered sector area over the half-spacing ``x``.

    The function is concave on (0, 1), so the maximizer is the unique root of
    its derivative.  A bracket is grown outward from ``x0`` and then refined
    with Brent's method.

    Returns:
        ``(x_star, f_star, ratio_star)`` where ``ratio_star`` is ``f_star``
        divided by the full sector area ``arccos(x_star) / 2``.
    """
    if not 0.0 < x0 < 1.0:
        raise ValueError("x0 must lie in (0, 1)")
    lo = hi = x0
    if _sector_slope(x0) > 0:
        while _sector_slope(hi) > 0:
            lo, hi = hi, 1.0 - 0.5 * (1.0 - hi)
    else:
        while _sector_slope(lo) <= 0:
            lo, hi = 0.5 * lo, lo
    x_star = brentq(_sector_slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    f_star = sector_once_area(x_star)
    return x_star, f_star, f_star / (0.5 * math.acos(x_star))


def voronoi_cell(site, neighbors, box_scale: float = 1e4) -> ConvexPolygon2:
    """Voronoi polygon of ``site`` against a finite set of neighbours.

    The cell is cut out of a square box ``box_scale`` times larger than the
    farthest neighbour; a surviving box vertex means the bisectors alone do
    not bound the cell.
    """
    s = np.asarray(site, dtype=float)
    nb = np.asarray(neighbors, dtype=float).reshape(-1, 2)
    if len(nb) == 0:
        raise UnboundedCellError("unbounded Voronoi cell")
    if np.any(np.all(np.isclose(nb, s, rtol=0.0, atol=1e-15), axis=1)):
        raise ValueError("neighbours must be distinct from the site")
    half = box_scale * max(float(np.max(np.linalg.norm(nb - s, axis=1))), 1.0)
    box = s + half * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
    cell = ConvexPolygon2(box)
    for q in nb:
        cell = clip_convex_polygon(cell, HalfPlane.bisector(s, q))
    if np.any(np.abs(cell.vertices - s) >= 0.5 * half):
        raise UnboundedCellError("unbounded Voronoi cell")
    return cell


@dataclass(frozen=True)
class LatticeCover:
    """Unit disks centred on the lattice ``{i*u + j*w}``."""

    u: tuple[float, float]
    w: tuple[float, float]

    def __post_init__(self):
        u = tuple(float(c) for c in self.u)
        w = tuple(float(c) for c in self.w)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "w", w)
        if not all(map(math.isfinite, u + w)) or abs(self.det) <= 1e-14:
            raise ValueError("lattice basis must be finite and non-degenerate")

    @classmethod
    def hexagonal(cls, spacing: float) -> LatticeCover:
        return cls((spacing, 0.0), (0.5 * spacing, 0.5 * math.sqrt(3.0) * spacing))

    @classmethod
    def square(cls, spacing: float) -> LatticeCover:
        return cls((spacing, 0.0), (0.0, spacing))

    @classmethod
    def family(cls, name: Family, spacing: float) -> LatticeCover:
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        if name == "hex":
            return cls.hexagonal(spacing)
        if name == "square":
            return cls.square(spacing)
        raise ValueError(f"unknown lattice family {name!r}")

    @property
    def det(self) -> float:
        return self.u[0] * self.w[1] - self.u[1] * self.w[0]

    @property
    def cell_area(self) -> float:
        return abs(self.det)

    def reduced(self) -> LatticeCover:
        """Same lattice with a Lagrange-Gauss reduced basis."""
        u, w = np.array(self.u), np.array(self.w)
        if u @ u > w @ w:
            u, w = w, u
        while True:
            k = round(float(u @ w) / float(u @ u))
            w = w - k * u
            if w @ w >= u @ u:
                break
            u, w = w, u
        return LatticeCover(tuple(u), tuple(w))

    def points(self, window: int) -> np.ndarray:
        """Lattice points ``i*u + j*w`` with ``|i|, |j| <= window``, origin excluded."""
        r = np.arange(-window, window + 1)
        i, j = np.meshgrid(r, r, indexing="ij")
        mask = (i != 0) | (j != 0)
        i, j = i[mask], j[mask]
        return np.outer(i, self.u) + np.outer(j, self.w)


@dataclass(frozen=True)
class CoverVerdict:
    is_cover: bool
    r_max: float
    witness_cell: tuple[int, int]
    witness_vertex: tuple[float, float]


def check_cover_lemma2(cover: LatticeCover, window: int = 3) -> CoverVerdict:
    """Decide whether the lattice of unit disks covers the plane.

    The disks cover the plane exactly when every Voronoi cell's farthest
    vertex lies within its own disk.  All cells of a lattice are congruent,
    so only the cell at the origin is built, against the neighbours within
    ``window`` shells of a reduced basis.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    red = cover.reduced()
    cell = voronoi_cell((0.0, 0.0), red.points(window))
    r = np.linalg.norm(cell.vertices, axis=1)
    k = int(np.argmax(r))
    r_max = float(r[k])
    return CoverVerdict(
        is_cover=r_max <= 1.0 + EPS,
        r_max=r_max,
        witness_cell=(0, 0),
        witness_vertex=tuple(float(c) for c in cell.vertices[k]),
    )


@dataclass(frozen=True)
class MultiplicityHistogram:
    fraction: tuple[float, ...]
    n: int
    average: float
    average_std_error: float

    @property
    def once(self) -> float:
        """Empirical 1-density: fraction of the plane covered exactly once."""
        return self.fraction[1] if len(self.fraction) > 1 else 0.0


def _multiplicities(cover: LatticeCover, xy: np.ndarray) -> np.ndarray:
    # xy: sample points given in lattice coordinates (a, b) in [0,1)^2
    u, w = np.array(cover.u), np.array(cover.w)
    adet = cover.cell_area
    ki = float(np.linalg.norm(w)) / adet
    kj = float(np.linalg.norm(u)) / adet
    pts = np.outer(xy[:, 0], u) + np.outer(xy[:, 1], w)
    count = np.zeros(len(xy), dtype=np.int64)
    for i in range(math.floor(-ki), math.ceil(1.0 + ki) + 1):
        for j in range(math.floor(-kj), math.ceil(1.0 + kj) + 1):
            c = i * u + j * w
            d2 = np.sum((pts - c) ** 2, axis=1)
            count += d2 <= 1.0
    return count


def coverage_multiplicity_histogram(
    cover: LatticeCover, n: int, s: RandomStream, chunk: int = 250_000
) -> MultiplicityHistogram:
    """Histogram of how many unit disks cover uniform points of one lattice cell.

    Lattice centres within distance 1 are enumerated exactly: a centre ``c``
    with ``|c - x| <= 1`` has lattice coordinates within ``|w|/det`` and
    ``|u|/det`` of the sample's own.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    red = cover.reduced()
    tally: dict[int, int] = {}
    total = 0
    total_sq = 0
    done = 0
    while done < n:
        k = min(chunk, n - done)
        m = _multiplicities(red, s.rng.random((k, 2)))
        vals, cnt = np.unique(m, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            tally[v] = tally.get(v, 0) + c
        total += int(m.sum())
        total_sq += int((m * m).sum())
        done += k
    top = max(tally)
    fraction = tuple(tally.get(k, 0) / n for k in range(top + 1))
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return MultiplicityHistogram(fraction, n, mean, math.sqrt(var / n))


@dataclass(frozen=True)
class SweepRow:
    spacing: float
    is_cover: bool
    r_max: float
    once: float


def sweep_lattice(
    family: Family,
    spacing_min: float,
    spacing_max: float,
    steps: int,
    n: int,
    s: RandomStream,
) -> list[SweepRow]:
    """Cover verdict and measured 1-density along a family of lattice spacings."""
    if not 0 < spacing_min < spacing_max:
        raise ValueError("need 0 < spacing_min < spacing_max")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    rows = []
    for k, spacing in enumerate(np.linspace(spacing_min, spacing_max, steps)):
        cover = LatticeCover.family(family, float(spacing))
        verdict = check_cover_lemma2(cover)
        hist = coverage_multiplicity_histogram(cover, n, s.child(k))
        rows.append(SweepRow(float(spacing), verdict.is_cover, verdict.r_max, hist.once))
    return rows
