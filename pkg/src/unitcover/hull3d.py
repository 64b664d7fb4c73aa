"""Incremental 3D convex hull with a conflict graph.

Points are inserted in input order.  Every pending point is attached to one
hull face it can see; inserting a point removes the connected patch of faces
visible from it and cones the horizon to the new apex.  Points left orphaned
by removed faces are re-attached to a new face or dropped as interior.

A point counts as seeing a face only if its signed distance exceeds
``tau = 1e-10 * bbox_diagonal``; coplanar points are treated as inside.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numba import njit

from .errors import DegenerateError, NumericalFailure

_TAU_REL = 1e-10

# kernel status codes
_OK = 0
_NON_MANIFOLD = 1


@njit(cache=True)
def _make_face(pts, fv, fn, fo, f, a, b, c):
    fv[f, 0] = a
    fv[f, 1] = b
    fv[f, 2] = c
    ux = pts[b, 0] - pts[a, 0]
    uy = pts[b, 1] - pts[a, 1]
    uz = pts[b, 2] - pts[a, 2]
    vx = pts[c, 0] - pts[a, 0]
    vy = pts[c, 1] - pts[a, 1]
    vz = pts[c, 2] - pts[a, 2]
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    ln = np.sqrt(nx * nx + ny * ny + nz * nz)
    if ln > 0.0:
        nx /= ln
        ny /= ln
        nz /= ln
    fn[f, 0] = nx
    fn[f, 1] = ny
    fn[f, 2] = nz
    fo[f] = nx * pts[a, 0] + ny * pts[a, 1] + nz * pts[a, 2]


@njit(cache=True)
def _dist(pts, fn, fo, f, p):
    return fn[f, 0] * pts[p, 0] + fn[f, 1] * pts[p, 1] + fn[f, 2] * pts[p, 2] - fo[f]


@njit(cache=True)
def _hull_kernel(pts, init, tau):
    n = pts.shape[0]
    cap = 3 * n + 16
    fv = np.full((cap, 3), -1, np.int64)
    fnb = np.full((cap, 3), -1, np.int64)
    fn = np.zeros((cap, 3))
    fo = np.zeros(cap)
    alive = np.zeros(cap, np.bool_)
    fhead = np.full(cap, -1, np.int64)
    fmark = np.zeros(cap, np.int64)
    free = np.empty(cap, np.int64)
    nfree = 0
    nextf = 0

    pnext = np.full(n, -1, np.int64)
    # >= 0: attached face; -1: interior/discarded; -2: hull vertex
    pface = np.full(n, -1, np.int64)

    # initial tetrahedron, faces oriented away from the opposite vertex
    tri = np.array([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    opp = np.array([3, 2, 1, 0])
    for k in range(4):
        a = init[tri[k, 0]]
        b = init[tri[k, 1]]
        c = init[tri[k, 2]]
        _make_face(pts, fv, fn, fo, k, a, b, c)
        if _dist(pts, fn, fo, k, init[opp[k]]) > 0.0:
            _make_face(pts, fv, fn, fo, k, a, c, b)
        alive[k] = True
    nextf = 4
    for f in range(4):
        for e in range(3):
            a = fv[f, e]
            b = fv[f, (e + 1) % 3]
            for g in range(4):
                if g == f:
                    continue
                for j in range(3):
                    if fv[g, j] == b and fv[g, (j + 1) % 3] == a:
                        fnb[f, e] = g
    for k in range(4):
        pface[init[k]] = -2

    for p in range(n):
        if pface[p] == -2:
            continue
        for f in range(4):
            if _dist(pts, fn, fo, f, p) > tau:
                pface[p] = f
                pnext[p] = fhead[f]
                fhead[f] = p
                break

    start_of = np.full(n, -1, np.int64)
    end_of = np.full(n, -1, np.int64)
    stack = np.empty(cap, np.int64)
    vis = np.empty(cap, np.int64)
    hz_a = np.empty(cap, np.int64)
    hz_b = np.empty(cap, np.int64)
    hz_g = np.empty(cap, np.int64)
    newf = np.empty(cap, np.int64)
    stamp = 0

    for p in range(n):
        f0 = pface[p]
        if f0 < 0:
            continue
        stamp += 1
        # flood the visible patch
        nst = 0
        nvis = 0
        nhz = 0
        stack[nst] = f0
        nst += 1
        fmark[f0] = stamp
        while nst > 0:
            nst -= 1
            f = stack[nst]
            vis[nvis] = f
            nvis += 1
            for e in range(3):
                g = fnb[f, e]
                if fmark[g] == stamp:
                    continue
                if _dist(pts, fn, fo, g, p) > tau:
                    fmark[g] = stamp
                    stack[nst] = g
                    nst += 1
                else:
                    hz_a[nhz] = fv[f, e]
                    hz_b[nhz] = fv[f, (e + 1) % 3]
                    hz_g[nhz] = g
                    nhz += 1
        # cone the horizon to p
        for h in range(nhz):
            a = hz_a[h]
            b = hz_b[h]
            g = hz_g[h]
            if nfree > 0:
                nfree -= 1
                nf = free[nfree]
            else:
                nf = nextf
                nextf += 1
            _make_face(pts, fv, fn, fo, nf, a, b, p)
            alive[nf] = True
            fhead[nf] = -1
            fnb[nf, 0] = g
            for j in range(3):
                if fv[g, j] == b and fv[g, (j + 1) % 3] == a:
                    fnb[g, j] = nf
            if start_of[a] != -1 or end_of[b] != -1:
                return fv, fnb, fn, fo, alive, nextf, _NON_MANIFOLD
            start_of[a] = nf
            end_of[b] = nf
            newf[h] = nf
        for h in range(nhz):
            nf = newf[h]
            a = hz_a[h]
            b = hz_b[h]
            if start_of[b] == -1 or end_of[a] == -1:
                return fv, fnb, fn, fo, alive, nextf, _NON_MANIFOLD
            fnb[nf, 1] = start_of[b]
            fnb[nf, 2] = end_of[a]
        # re-attach points orphaned by the removed faces
        for i in range(nvis):
            f = vis[i]
            q = fhead[f]
            while q != -1:
                qn = pnext[q]
                if q != p:
                    pface[q] = -1
                    for h in range(nhz):
                        nf = newf[h]
                        if _dist(pts, fn, fo, nf, q) > tau:
                            pface[q] = nf
                            pnext[q] = fhead[nf]
                            fhead[nf] = q
                            break
                q = qn
            alive[f] = False
            fhead[f] = -1
            free[nfree] = f
            nfree += 1
        pface[p] = -2
        for h in range(nhz):
            start_of[hz_a[h]] = -1
            end_of[hz_b[h]] = -1

    return fv, fnb, fn, fo, alive, nextf, _OK


@dataclass(frozen=True)
class HullMesh:
    """Triangulated convex hull.

    ``faces`` index into ``points`` (the full input, so indices are the
    original ones) and are ordered counterclockwise seen from outside.
    ``neighbors[f, k]`` is the face across edge ``(faces[f, k], faces[f, k+1])``.
    """

    points: np.ndarray
    faces: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    neighbors: np.ndarray
    tau: float

    @property
    def vertex_indices(self) -> np.ndarray:
        return np.unique(self.faces)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_indices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def edge_face_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for tri in self.faces.tolist():
            for k in range(3):
                a, b = tri[k], tri[(k + 1) % 3]
                key = (a, b) if a < b else (b, a)
                counts[key] = counts.get(key, 0) + 1
        return counts

    @property
    def n_edges(self) -> int:
        return len(self.edge_face_counts())

    def max_excess(self, pts=None) -> float:
        """Largest signed distance of any point (default: the input) beyond any face plane."""
        pts = self.points if pts is None else np.asarray(pts, dtype=float)
        chunk = max(1, 4_000_000 // max(len(self.faces), 1))
        worst = -np.inf
        for i in range(0, len(pts), chunk):
            d = pts[i : i + chunk] @ self.normals.T - self.offsets
            worst = max(worst, float(d.max()))
        return worst


def _initial_simplex(pts: np.ndarray, tau: float) -> np.ndarray:
    cand = sorted({int(i) for i in np.concatenate([pts.argmin(axis=0), pts.argmax(axis=0)])})
    best, best_vol = None, 0.0
    for quad in combinations(cand, 4):
        a, b, c, d = pts[list(quad)]
        vol = abs(np.dot(b - a, np.cross(c - a, d - a)))
        if vol > best_vol:
            best, best_vol = quad, vol
    diag = float(np.linalg.norm(np.ptp(pts, axis=0)))
    if best is not None and best_vol > tau * diag * diag:
        return np.array(best, dtype=np.int64)
    # exhaustive fallback: widest pair, farthest from its line, farthest from that plane
    axis = int(np.argmax(np.ptp(pts, axis=0)))
    i0, i1 = int(pts[:, axis].argmin()), int(pts[:, axis].argmax())
    d = pts[i1] - pts[i0]
    if not np.any(d):
        raise DegenerateError("degenerate hull input")
    rel = pts - pts[i0]
    line = np.linalg.norm(np.cross(rel, d), axis=1) / np.linalg.norm(d)
    i2 = int(line.argmax())
    if line[i2] <= tau:
        raise DegenerateError("degenerate hull input")
    nrm = np.cross(d, pts[i2] - pts[i0])
    nrm /= np.linalg.norm(nrm)
    plane = np.abs(rel @ nrm)
    i3 = int(plane.argmax())
    if plane[i3] <= tau:
        raise DegenerateError("degenerate hull input")
    return np.array([i0, i1, i2, i3], dtype=np.int64)


def convex_hull(points) -> HullMesh:
    """Convex hull of at least four non-coplanar 3D points."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 4:
        raise DegenerateError("degenerate hull input")
    if not np.all(np.isfinite(pts)):
        raise ValueError("coordinates must be finite")
    diag = float(np.linalg.norm(np.ptp(pts, axis=0)))
    tau = _TAU_REL * max(diag, np.finfo(float).tiny)
    init = _initial_simplex(pts, tau)
    fv, fnb, fn, fo, alive, used, status = _hull_kernel(pts, init, tau)
    if status != _OK:
        raise NumericalFailure("hull construction failed: non-manifold horizon")
    keep = np.flatnonzero(alive[:used])
    remap = np.full(used, -1, np.int64)
    remap[keep] = np.arange(len(keep))
    return HullMesh(
        points=pts,
        faces=fv[keep].copy(),
        normals=fn[keep].copy(),
        offsets=fo[keep].copy(),
        neighbors=remap[fnb[keep]],
        tau=tau,
    )


def mesh_volume(mesh: HullMesh) -> float:
    """Volume as a fan of tetrahedra from the centroid of the hull vertices."""
    c = mesh.points[mesh.vertex_indices].mean(axis=0)
    tri = mesh.points[mesh.faces] - c
    det = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2]))
    return float(det.sum() / 6.0)
