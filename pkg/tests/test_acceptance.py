"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are written
straight to the terminal so they show without ``-s``.
"""

import io
import math
import time

import numpy as np
import pytest

from unitcover.cli import run_cli
from unitcover.dodeca import cell_frame, dodeca_params
from unitcover.geom import RandomStream, Tetrahedron, tetra_volume
from unitcover.hull3d import convex_hull, mesh_volume
from unitcover.planar import (
    LatticeCover,
    check_cover_lemma2,
    coverage_multiplicity_histogram,
    maximize_sector_once_area,
)
from unitcover.volume import (
    GnPConfig,
    HullPatchConfig,
    RejectionConfig,
    delta3_dc,
    rejection_volume,
    run_trials,
)

pytestmark = pytest.mark.slow

SQRT3 = math.sqrt(3.0)
PAPER = dodeca_params("paper")
FRAME = cell_frame(PAPER)
SEED = 0
TRIES = 100
GNP_GRID = (80_000, 140_000, 200_000)
HULL_GRID = tuple(range(2_000, 20_001, 2_000))

_cache = {}


def verdict(request, number, title, checks, elapsed, limit):
    """Print one line for the criterion and fail the test if any check failed."""
    checks = dict(checks)
    checks[f"runtime {elapsed:.1f}s < {limit:g}s"] = elapsed < limit
    ok = all(checks.values())
    bad = [k for k, v in checks.items() if not v]
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f}s)"
    if bad:
        line += "  failed: " + "; ".join(bad)
    with request.config.pluginmanager.get_plugin("capturemanager").global_and_fixture_disabled():
        print("\n" + line, flush=True)
    assert ok, line


def timed(key, fn):
    if key not in _cache:
        t = time.perf_counter()
        value = fn()
        _cache[key] = (value, time.perf_counter() - t)
    return _cache[key]


def table1():
    return timed("table1", lambda: {
        n: run_trials("gnp", FRAME, GnPConfig(n), TRIES, SEED) for n in GNP_GRID
    })


def table2():
    return timed("table2", lambda: {
        m: run_trials("hull", FRAME, HullPatchConfig(m), TRIES, SEED) for m in HULL_GRID
    })


def test_criterion_01_sector_optimum(request):
    t = time.perf_counter()
    x, f, ratio = maximize_sector_once_area()
    el = time.perf_counter() - t
    verdict(request, 1, "sector optimum", {
        f"x_star {x!r}": abs(x - SQRT3 / 2) <= 1e-9,
        f"f_star {f!r}": abs(f - (3 * SQRT3 - math.pi) / 12) <= 1e-12,
        f"ratio_star {ratio!r}": abs(ratio - (3 * SQRT3 - math.pi) / math.pi) <= 1e-12,
    }, el, 1.0)


def test_criterion_02_dodeca_constants(request):
    t = time.perf_counter()
    p = dodeca_params("paper")
    fr = cell_frame(p)
    el = time.perf_counter() - t
    verdict(request, 2, "dodecahedral constants", {
        f"R {p.R:.7g}": abs(p.R - 0.649841) <= 5e-6,
        f"H {p.H:.7g}": abs(p.H - 0.760071) <= 5e-6,
        f"alpha1 {p.alpha1:.7g}": abs(p.alpha1 - 0.728762) <= 1e-4,
        f"vol_T {fr.vol_T:.7g}": abs(fr.vol_T - 0.050877) <= 1e-5,
        f"vol_T' {fr.vol_T_prime:.7g}": abs(fr.vol_T_prime - 0.0163051) <= 1e-5,
        f"vol_big {fr.vol_big:.7g}": abs(fr.vol_big - 0.0348169) <= 1e-5,
    }, el, 1.0)


def test_criterion_03_table1(request):
    stats, el = table1()
    checks = {f"n={n} mean {st.mean:.7g} in [0.0215, 0.0226]": 0.0215 <= st.mean <= 0.0226
              for n, st in stats.items()}
    verdict(request, 3, "Generate-and-Probe table", checks, el, 300.0)


def test_criterion_04_table2(request):
    stats, el = table2()
    means = [stats[m].mean for m in HULL_GRID]
    checks = {f"m={m} mean {stats[m].mean:.7g} in [0.02185, 0.02205]":
              0.02185 <= stats[m].mean <= 0.02205 for m in HULL_GRID}
    last = stats[HULL_GRID[-1]].mean
    checks[f"m=20000 mean {last:.7g} in [0.02195, 0.02203]"] = 0.02195 <= last <= 0.02203
    top = max(st.max for st in stats.values())
    checks[f"max over all tries {top:.7g} <= 0.02202"] = top <= 0.02202
    for (a, b), (ma, mb) in zip(zip(HULL_GRID, HULL_GRID[1:]), zip(means, means[1:])):
        se = stats[b].std_error
        checks[f"non-decreasing m={a}->{b} ({ma:.7g} -> {mb:.7g}, se {se:.2g})"] = mb >= ma - se
    verdict(request, 4, "hull-patch table", checks, el, 600.0)


def test_criterion_05_claim(request):
    t = time.perf_counter()
    vol_s, se = rejection_volume(FRAME, 10_000_000, RandomStream(SEED, 0))
    alpha2, delta = delta3_dc(PAPER, vol_s)
    el = time.perf_counter() - t
    verdict(request, 5, f"claim (vol_S {vol_s:.7g} +- {se:.2g})", {
        f"alpha2 {alpha2:.7g} = 0.4324 +- 0.002": abs(alpha2 - 0.4324) <= 0.002,
        f"delta {delta:.7g} = 0.3151 +- 0.002": abs(delta - 0.3151) <= 0.002,
    }, el, 30.0)


def test_criterion_06_cross_consistency(request):
    t = time.perf_counter()
    est = {
        "gnp": run_trials("gnp", FRAME, GnPConfig(200_000), TRIES, SEED),
        "hull": run_trials("hull", FRAME, HullPatchConfig(20_000), TRIES, SEED),
        "rejection": run_trials("rejection", FRAME, RejectionConfig(10_000_000), TRIES, SEED),
    }
    el = time.perf_counter() - t
    checks = {}
    names = list(est)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            sa, sb = est[a], est[b]
            comb = math.hypot(sa.std_error, sb.std_error)
            diff = abs(sa.mean - sb.mean)
            checks[f"{a} {sa.mean:.7g} vs {b} {sb.mean:.7g}: |diff| {diff:.2g} <= 3 se {3 * comb:.2g}"] = (
                diff <= 3 * comb
            )
    for name, st in est.items():
        inside = all(FRAME.vol_T_prime < e < FRAME.vol_big for e in st.estimates)
        checks[f"{name} estimates inside (vol_T', vol_big)"] = inside
    verdict(request, 6, "estimator cross-consistency", checks, el, 600.0)


def test_criterion_07_planar_cover(request):
    t = time.perf_counter()
    hexa = check_cover_lemma2(LatticeCover.hexagonal(SQRT3))
    sparse = check_cover_lemma2(LatticeCover.hexagonal(1.8))
    square = check_cover_lemma2(LatticeCover.square(math.sqrt(2)))
    el = time.perf_counter() - t
    verdict(request, 7, "planar cover checks", {
        f"hex sqrt3 cover, r_max {hexa.r_max!r}": hexa.is_cover and abs(hexa.r_max - 1) <= 1e-9,
        f"hex 1.8 non-cover, r_max {sparse.r_max:.7g}": (
            not sparse.is_cover and abs(sparse.r_max - 1.0392) <= 1e-4
        ),
        "square sqrt2 cover": square.is_cover,
    }, el, 1.0)


def random_covering_lattice(seed):
    rng = np.random.default_rng(seed)
    while True:
        u, w = rng.normal(size=(2, 2))
        if abs(u[0] * w[1] - u[1] * w[0]) > 0.3 * np.linalg.norm(u) * np.linalg.norm(w):
            break
    r = check_cover_lemma2(LatticeCover(tuple(u), tuple(w))).r_max
    c = 0.97 / r
    return LatticeCover(tuple(u * c), tuple(w * c))


def test_criterion_08_multiplicity(request):
    t = time.perf_counter()
    covers = {
        "hex sqrt3": LatticeCover.hexagonal(SQRT3),
        "square sqrt2": LatticeCover.square(math.sqrt(2)),
        "random": random_covering_lattice(SEED),
    }
    checks = {"random lattice covers": check_cover_lemma2(covers["random"]).is_cover}
    for k, (name, cover) in enumerate(covers.items()):
        h = coverage_multiplicity_histogram(cover, 1_000_000, RandomStream(SEED, k))
        want = math.pi / cover.cell_area
        checks[f"{name} average {h.average:.7g} vs pi/det {want:.7g} (3 se {3 * h.average_std_error:.2g})"] = (
            abs(h.average - want) <= 3 * h.average_std_error
        )
        checks[f"{name} never uncovered"] = h.fraction[0] == 0.0
        if name == "square sqrt2":
            checks[f"square once {h.once:.7g} = (4-pi)/2 +- 0.002"] = abs(h.once - (4 - math.pi) / 2) <= 0.002
    el = time.perf_counter() - t
    verdict(request, 8, "multiplicity conservation", checks, el, 60.0)


def random_cloud(rng, k):
    kind = rng.integers(4)
    if kind == 0:
        pts = rng.normal(size=(k, 3))
    elif kind == 1:
        pts = rng.uniform(-1, 1, size=(k, 3))
    elif kind == 2:
        g = rng.normal(size=(k, 3))
        pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    else:
        # small integer grid with repeats
        pts = rng.integers(-3, 4, size=(k, 3)).astype(float)
        pts[:4] = [[0, 0, 0], [5, 0, 0], [0, 5, 0], [0, 0, 5]]
    return pts * rng.uniform(0.01, 100) + rng.uniform(-50, 50, size=3)


def test_criterion_09_hull_properties(request):
    t = time.perf_counter()
    rng = np.random.default_rng(SEED)
    sizes = np.unique(np.r_[4, 5000, np.exp(rng.uniform(np.log(4), np.log(5000), 98)).astype(int)])
    while len(sizes) < 100:
        sizes = np.unique(np.r_[sizes, rng.integers(4, 5001)])
    failures = {"euler": 0, "two faces per edge": 0, "containment": 0, "permutation": 0}
    for k in sizes:
        pts = random_cloud(rng, int(k))
        mesh = convex_hull(pts)
        counts = mesh.edge_face_counts()
        failures["two faces per edge"] += set(counts.values()) != {2}
        failures["euler"] += mesh.n_vertices - len(counts) + mesh.n_faces != 2
        failures["containment"] += mesh.max_excess() > mesh.tau
        v = mesh_volume(mesh)
        vp = mesh_volume(convex_hull(pts[rng.permutation(len(pts))]))
        failures["permutation"] += abs(v - vp) > 1e-9 * max(1.0, abs(v))
    cube = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)
    simplex = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    vc = mesh_volume(convex_hull(cube))
    vs = mesh_volume(convex_hull(simplex))
    el = time.perf_counter() - t
    checks = {f"{name} ({n} of {len(sizes)} clouds failed)": n == 0 for name, n in failures.items()}
    checks[f"cube volume {vc!r}"] = abs(vc - 1.0) <= 1e-12
    checks[f"simplex volume {vs!r}"] = abs(vs - tetra_volume(Tetrahedron(simplex))) <= 1e-12
    checks["100 clouds"] = len(sizes) == 100
    verdict(request, 9, "hull property suite", checks, el, 60.0)


RANDOMIZED = [
    ["planar", "density", "--n", "20000"],
    ["planar", "sweep", "--steps", "4", "--n", "5000"],
    ["dodeca", "volume", "--method", "gnp", "--n", "5000", "--tries", "3"],
    ["dodeca", "volume", "--method", "hull", "--m", "500", "--tries", "3"],
    ["dodeca", "volume", "--method", "rejection", "--n", "100000", "--tries", "3"],
    ["dodeca", "delta", "--n", "100000"],
]


def _csv(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(argv + ["--seed", "11", "--format", "csv"], out, err)
    return code, out.getvalue()


def test_criterion_10_determinism(request):
    t = time.perf_counter()
    checks = {}
    for argv in RANDOMIZED:
        a, b = _csv(argv), _csv(argv)
        checks[" ".join(argv[:3])] = a[0] == 0 and a == b and a[1].count("\n") >= 2
    el = time.perf_counter() - t
    verdict(request, 10, "byte-identical csv reruns", checks, el, 60.0)
