"""Geometric primitives: planes, tetrahedra, convex polygons, seeded sampling.

Coordinates are dimensionless; the unit ball radius sets the scale.  All
containment predicates treat regions as closed with absolute tolerance
``EPS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError

EPS = 1e-9
_NORM_TOL = 1e-12


def _as_vec(x, dim: int) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise ValueError(f"expected a {dim}-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("coordinates must be finite")
    return v


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane ``{x : normal . x <= offset}`` with unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _as_vec(self.normal, 2)
        if abs(np.linalg.norm(n) - 1.0) > _NORM_TOL:
            raise ValueError("half-plane normal must have unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_normal(cls, normal, offset: float) -> HalfPlane:
        n = np.asarray(normal, dtype=float)
        length = float(np.linalg.norm(n))
        if length == 0.0:
            raise ValueError("zero normal")
        return cls(n / length, offset / length)

    @classmethod
    def bisector(cls, site, other) -> HalfPlane:
        """Points at least as close to ``site`` as to ``other``."""
        s = _as_vec(site, 2)
        q = _as_vec(other, 2)
        d = q - s
        if not np.any(d):
            raise ValueError("bisector of coincident points")
        return cls.from_normal(d, 0.5 * (q @ q - s @ s))

    def excess(self, pts) -> np.ndarray | float:
        """Signed amount by which points violate the half-plane (<= 0 inside)."""
        return np.asarray(pts, dtype=float) @ self.normal - self.offset


@dataclass(frozen=True)
class Plane3:
    """Oriented plane; ``signed_distance`` is positive on the normal's side."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _as_vec(self.normal, 3)
        if abs(np.linalg.norm(n) - 1.0) > _NORM_TOL:
            raise ValueError("plane normal must have unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, a, b, c, towards=None) -> Plane3:
        """Plane through three points, oriented so ``towards`` lies on the positive side."""
        a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
        n = np.cross(b - a, c - a)
        length = float(np.linalg.norm(n))
        if length == 0.0:
            raise DegenerateError("collinear points do not span a plane")
        n /= length
        off = float(n @ a)
        if towards is not None and n @ np.asarray(towards, dtype=float) - off < 0:
            n, off = -n, -off
        return cls(n, off)

    def signed_distance(self, pts) -> np.ndarray | float:
        return np.asarray(pts, dtype=float) @ self.normal - self.offset


@dataclass(frozen=True)
class Tetrahedron:
    vertices: np.ndarray  # (4, 3)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.shape != (4, 3):
            raise ValueError("a tetrahedron needs four 3D vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("coordinates must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def degenerate(self) -> bool:
        v = self.vertices
        scale = max(float(np.ptp(v, axis=0).max()), 1.0)
        return tetra_volume(self) <= 1e-14 * scale**3

    def inward_planes(self) -> tuple[Plane3, Plane3, Plane3, Plane3]:
        """Face planes with normals pointing into the solid; face k omits vertex k."""
        if self.degenerate:
            raise DegenerateError("degenerate simplex")
        v = self.vertices
        out = []
        for k in range(4):
            a, b, c = (v[i] for i in range(4) if i != k)
            out.append(Plane3.through(a, b, c, towards=v[k]))
        return tuple(out)

    def contains(self, pts, eps: float = EPS) -> np.ndarray | bool:
        planes = self.inward_planes()
        pts = np.asarray(pts, dtype=float)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for pl in planes:
            ok &= pl.signed_distance(pts) >= -eps
        return ok if ok.ndim else bool(ok)


def tetra_volumes(a, b, c, d) -> np.ndarray:
    """Unsigned volumes of tetrahedra given as stacked vertex arrays."""
    a = np.asarray(a, dtype=float)
    u = np.asarray(b, dtype=float) - a
    v = np.asarray(c, dtype=float) - a
    w = np.asarray(d, dtype=float) - a
    det = np.einsum("...i,...i->...", u, np.cross(v, w))
    return np.abs(det) / 6.0


def tetra_volume(t: Tetrahedron) -> float:
    return float(tetra_volumes(*t.vertices))


@dataclass(frozen=True)
class ConvexPolygon2:
    """Convex polygon with counterclockwise vertices; may be empty."""

    vertices: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) >= 3 and _signed_area(v) < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @property
    def area(self) -> float:
        return _signed_area(self.vertices) if len(self.vertices) >= 3 else 0.0

    def is_convex(self, tol: float = 1e-12) -> bool:
        v = self.vertices
        if len(v) < 3:
            return True
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        return bool(np.all(cross >= -tol))


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_convex_polygon(p: ConvexPolygon2, h: HalfPlane, eps: float = EPS) -> ConvexPolygon2:
    """Intersect a convex polygon with a closed half-plane (one Sutherland-Hodgman pass)."""
    v = p.vertices
    if len(v) == 0:
        return p
    ex = h.excess(v)
    inside = ex <= eps
    if inside.all():
        return p
    if not inside.any():
        return ConvexPolygon2()
    out = []
    k = len(v)
    for i in range(k):
        j = (i + 1) % k
        if inside[i]:
            out.append(v[i])
        if inside[i] != inside[j]:
            t = ex[i] / (ex[i] - ex[j])
            x = v[i] + t * (v[j] - v[i])
            # land exactly on the line to keep repeated clips idempotent
            x = x - float(h.excess(x)) * h.normal
            out.append(x)
    out = _dedupe(np.array(out))
    if len(out) < 3:
        return ConvexPolygon2()
    return ConvexPolygon2(out)


def _dedupe(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    keep = []
    for x in v:
        if not keep or np.max(np.abs(x - keep[-1])) > tol:
            keep.append(x)
    if len(keep) > 1 and np.max(np.abs(keep[0] - keep[-1])) <= tol:
        keep.pop()
    return np.array(keep).reshape(-1, 2)


def lens_area_unit_circles(d: float) -> float:
    """Area of the intersection of two unit disks whose centers are ``d`` apart."""
    if not 0.0 <= d <= 2.0:
        raise ValueError(f"center distance must lie in [0, 2], got {d}")
    h = 0.5 * d
    return 2.0 * math.acos(h) - h * math.sqrt(4.0 - d * d)


class RandomStream:
    """Independent random stream keyed by ``(seed, index)``.

    Two streams with the same key produce the same draws; distinct indices
    are spawned children of one ``SeedSequence`` and hence independent.
    A stream is stateful and belongs to one worker at a time.
    """

    __slots__ = ("seed", "index", "rng")

    def __init__(self, seed: int = 0, index: int = 0):
        if seed < 0 or index < 0:
            raise ValueError("seed and stream index must be non-negative")
        self.seed = int(seed)
        self.index = int(index)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,))
        self.rng = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, index={self.index})"

    def child(self, k: int) -> RandomStream:
        """A stream keyed off this one; used to split a task into parts."""
        return RandomStream(self.seed, (self.index << 16) + k + 1)


def sample_uniform_tetra(t: Tetrahedron, s: RandomStream, size: int | None = None) -> np.ndarray:
    """Uniform points in a tetrahedron via normalized exponential barycentric weights."""
    if t.degenerate:
        raise DegenerateError("degenerate simplex")
    k = 1 if size is None else int(size)
    w = s.rng.standard_exponential((k, 4))
    w /= w.sum(axis=1, keepdims=True)
    pts = w @ t.vertices
    return pts[0] if size is None else pts


def sample_uniform_sphere_direction(s: RandomStream, size: int | None = None) -> np.ndarray:
    """Uniform unit vectors: normalized triples of standard normal deviates."""
    k = 1 if size is None else int(size)
    g = s.rng.standard_normal((k, 3))
    r = np.linalg.norm(g, axis=1)
    # a zero triple has probability zero but would poison the batch
    bad = r == 0.0
    while bad.any():
        g[bad] = s.rng.standard_normal((int(bad.sum()), 3))
        r = np.linalg.norm(g, axis=1)
        bad = r == 0.0
    g /= r[:, None]
    return g[0] if size is None else g
