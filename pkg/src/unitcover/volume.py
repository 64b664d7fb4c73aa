"""Volume estimators for the once-covered region S and the trial harness.

Three independent routes:

* Generate-and-Probe: sample points in S, measure their density inside
  small probing balls that lie wholly in S, and divide the count by it.
* Hull patch: approximate the spherical patch bounding S by the hull of
  random points on it and sum the tetrahedra it spans with the apex ``p0``.
* Rejection: the fraction of uniform points of ``T`` outside the unit ball.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .dodeca import CellFrame, DodecaParams, RegionS, cell_frame
from .errors import DegenerateError, PatchOrientationError, ProbeRadiusError
from .geom import RandomStream, sample_uniform_sphere_direction, sample_uniform_tetra, tetra_volumes
from .hull3d import convex_hull

WORKERS_ENV = "UNITCOVER_WORKERS"

_CHUNK = 1_000_000


@dataclass(frozen=True)
class GnPConfig:
    n: int
    probes: int = 1024
    max_retries: int = 100
    radius_factor: float = 0.25

    def __post_init__(self):
        if self.n < 1000:
            raise ValueError("Generate-and-Probe needs n >= 1000")
        if self.probes < 1 or self.max_retries < 1:
            raise ValueError("probes and max_retries must be positive")
        if self.radius_factor <= 0:
            raise ValueError("radius_factor must be positive")

    @property
    def probe_radius(self) -> float:
        # Theta(log n) expected points per probe
        return self.radius_factor * (math.log(self.n) / self.n) ** (1.0 / 3.0)


@dataclass(frozen=True)
class HullPatchConfig:
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")


@dataclass(frozen=True)
class RejectionConfig:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")


def sample_points_in_S(
    frame: CellFrame, n: int, s: RandomStream, carve_ball: bool = True
) -> tuple[np.ndarray, float]:
    """Rejection-sample ``n`` uniform points of S from uniform points of T.

    Returns the points and ``n / candidates``, where ``candidates`` counts
    draws up to and including the n-th acceptance.  The ratio estimates
    ``vol(S) / vol(T)``.  ``n == 0`` gives an empty array and a NaN ratio.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.empty((0, 3)), float("nan")
    kept = []
    have = 0
    drawn = 0
    ratio_guess = 0.5
    while have < n:
        batch = int(min(max((n - have) / ratio_guess * 1.1, 10_000), _CHUNK))
        cand = sample_uniform_tetra(frame.T, s, batch)
        ok = np.einsum("ij,ij->i", cand, cand) >= 1.0 if carve_ball else np.ones(batch, bool)
        idx = np.flatnonzero(ok)
        need = n - have
        if len(idx) >= need:
            kept.append(cand[idx[:need]])
            drawn += int(idx[need - 1]) + 1
            have = n
        else:
            kept.append(cand[idx])
            drawn += batch
            have += len(idx)
        if drawn >= 10_000 and have / drawn < 0.01:
            raise DegenerateError("degenerate region")
        ratio_guess = max(have / drawn, 0.01)
    return np.concatenate(kept), n / drawn


def generate_and_probe(
    frame: CellFrame, cfg: GnPConfig, s: RandomStream, carve_ball: bool = True
) -> float:
    """Estimate vol(S) as ``n`` over the point density seen by probing balls.

    Probe centres are drawn from the generated points and kept only if the
    whole ball lies in S; each centre's own point is left out of its count.
    """
    region = RegionS(frame, carve_ball=carve_ball)
    pts, _ = sample_points_in_S(frame, cfg.n, s, carve_ball=carve_ball)
    r = cfg.probe_radius

    cand = s.rng.integers(0, cfg.n, size=(cfg.probes, cfg.max_retries))
    valid = region.holds_ball(pts[cand.ravel()], r).reshape(cand.shape)
    if not valid.any(axis=1).all():
        raise ProbeRadiusError("probe radius too large for region")
    first = valid.argmax(axis=1)
    centers = pts[cand[np.arange(cfg.probes), first]]

    tree = cKDTree(pts)
    counts = tree.query_ball_point(centers, r, return_length=True) - 1
    total = int(counts.sum())
    if total == 0:
        raise ProbeRadiusError("probe radius too small")
    density = total / (cfg.probes * 4.0 / 3.0 * math.pi * r**3)
    return cfg.n / density


def _sample_patch(frame: CellFrame, m: int, s: RandomStream) -> np.ndarray:
    # uniform points of the unit sphere inside big_tetra, strictly above the anchor plane
    # plane 0 is the face opposite p0, through the anchors p1, p3, p4
    planes = frame.big_tetra.inward_planes()
    normals = np.array([pl.normal for pl in planes])
    offsets = np.array([pl.offset for pl in planes])
    out = []
    have = 0
    while have < m:
        d = sample_uniform_sphere_direction(s, 200_000)
        clear = d @ normals.T - offsets
        ok = (clear[:, 1:] >= 0.0).all(axis=1) & (clear[:, 0] > 0.0)
        got = d[ok][: m - have]
        out.append(got)
        have += len(got)
    return np.concatenate(out)


def hull_patch_volume_from_points(frame: CellFrame, patch) -> float:
    """Tetra fan from ``p0`` over the non-anchor faces of hull(patch + anchors)."""
    patch = np.asarray(patch, dtype=float).reshape(-1, 3)
    base = frame.big_tetra.inward_planes()[0]
    if not np.all(base.signed_distance(patch) > 0.0):
        raise PatchOrientationError("patch orientation violated")
    pts = np.vstack([frame.p1, frame.p3, frame.p4, patch])
    mesh = convex_hull(pts)
    faces = np.sort(mesh.faces, axis=1)
    is_base = (faces == np.array([0, 1, 2])).all(axis=1)
    if is_base.sum() != 1:
        raise PatchOrientationError("patch orientation violated")
    upper = mesh.faces[~is_base]
    tri = pts[upper]
    return float(tetra_volumes(frame.p0, tri[:, 0], tri[:, 1], tri[:, 2]).sum())


def hull_patch_volume(frame: CellFrame, cfg: HullPatchConfig, s: RandomStream) -> float:
    return hull_patch_volume_from_points(frame, _sample_patch(frame, cfg.m, s))


def rejection_volume(
    frame: CellFrame, n: int, s: RandomStream, invert: bool = False
) -> tuple[float, float]:
    """``vol(T)`` times the fraction of uniform points of T with norm >= 1.

    ``invert`` counts the complement (norm < 1) instead.  Returns the
    estimate and its binomial standard error.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    hits = 0
    done = 0
    while done < n:
        k = min(_CHUNK, n - done)
        q = sample_uniform_tetra(frame.T, s, k)
        outside = np.einsum("ij,ij->i", q, q) >= 1.0
        hits += int(np.count_nonzero(~outside if invert else outside))
        done += k
    p = hits / n
    return frame.vol_T * p, frame.vol_T * math.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class TryStats:
    estimates: tuple[float, ...]
    mean: float
    sigma: float
    max: float
    tries: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tries", len(self.estimates))

    @classmethod
    def from_estimates(cls, estimates: Sequence[float]) -> TryStats:
        est = tuple(float(e) for e in estimates)
        if not est:
            raise ValueError("no estimates")
        arr = np.array(est)
        sigma = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
        return cls(est, float(arr.mean()), sigma, float(arr.max()))

    @property
    def std_error(self) -> float:
        return self.sigma / math.sqrt(self.tries)


Estimator = Callable[[CellFrame, object, RandomStream], float]


def _gnp(frame, cfg, s):
    return generate_and_probe(frame, cfg, s)


def _hull(frame, cfg, s):
    return hull_patch_volume(frame, cfg, s)


def _rejection(frame, cfg, s):
    n = cfg.n if isinstance(cfg, RejectionConfig) else int(cfg)
    return rejection_volume(frame, n, s)[0]


ESTIMATORS: dict[str, Estimator] = {"gnp": _gnp, "hull": _hull, "rejection": _rejection}


def _one_try(args):
    fn, frame, cfg, seed, i = args
    return fn(frame, cfg, RandomStream(seed, i))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_trials(
    estimator: str | Estimator,
    frame: CellFrame,
    cfg,
    tries: int,
    seed: int = 0,
    workers: int | None = None,
) -> TryStats:
    """Run ``tries`` independent estimates; try ``i`` uses ``RandomStream(seed, i)``.

    Results are collected in try order, so the statistics do not depend on
    the worker count (``UNITCOVER_WORKERS`` when ``workers`` is None).
    """
    if tries < 1:
        raise ValueError("tries must be at least 1")
    fn = ESTIMATORS[estimator] if isinstance(estimator, str) else estimator
    workers = worker_count() if workers is None else workers
    jobs = [(fn, frame, cfg, seed, i) for i in range(tries)]
    if workers > 1 and tries > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            est = list(pool.map(_one_try, jobs))
    else:
        est = [_one_try(j) for j in jobs]
    return TryStats.from_estimates(est)


def delta3_dc(params: DodecaParams, vol_S: float) -> tuple[float, float]:
    """Once-covered fraction of the cell, and the resulting 1-density ``alpha1 * alpha2``."""
    vol_T = cell_frame(params).vol_T
    if not 0.0 <= vol_S <= vol_T:
        raise ValueError(f"vol_S must lie in [0, {vol_T:.7g}]")
    alpha2 = vol_S / vol_T
    return alpha2, params.alpha1 * alpha2
