"""Command-line entry point.

Exit codes: 0 success, 1 argument errors, 2 numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from . import __version__
from .dodeca import cell_frame, dodeca_params
from .errors import NumericalFailure
from .geom import RandomStream
from .planar import (
    LatticeCover,
    check_cover_lemma2,
    coverage_multiplicity_histogram,
    maximize_sector_once_area,
    sweep_lattice,
)
from .report import ReportDocument, render_report
from .volume import (
    GnPConfig,
    HullPatchConfig,
    RejectionConfig,
    delta3_dc,
    rejection_volume,
    run_trials,
)

DEFAULT_GRIDS = {
    "gnp": [80_000, 140_000, 200_000],
    "hull": list(range(2_000, 20_001, 2_000)),
    "rejection": [10_000_000],
}


class ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.format_usage()}{self.prog}: error: {message}")


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v

    return parse


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not math.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _unit_interval(text: str) -> float:
    v = _positive_float(text)
    if v >= 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    seeded = _Parser(add_help=False)
    seeded.add_argument("--seed", type=_int_at_least(0), default=None)

    p = _Parser(prog="unitcover", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    planar = top.add_parser("planar", help="2D unit-disk covers")
    ps = planar.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sm = ps.add_parser("sector-max", parents=[common], help="optimal once-covered sector")
    sm.add_argument("--x0", type=_unit_interval, default=0.5)
    de = ps.add_parser("density", parents=[common, seeded], help="multiplicity histogram")
    de.add_argument("--family", choices=("hex", "square"), default="hex")
    de.add_argument("--spacing", type=_positive_float, default=math.sqrt(3.0))
    de.add_argument("--n", type=_int_at_least(1), default=1_000_000)
    vc = ps.add_parser("verify-cover", parents=[common], help="Voronoi-vertex cover check")
    vc.add_argument("--family", choices=("hex", "square"), default="hex")
    vc.add_argument("--spacing", type=_positive_float, default=math.sqrt(3.0))
    vc.add_argument("--window", type=_int_at_least(2), default=3)
    sw = ps.add_parser("sweep", parents=[common, seeded], help="scan lattice spacings")
    sw.add_argument("--family", choices=("hex", "square"), default="hex")
    sw.add_argument("--spacing-min", type=_positive_float, default=1.0)
    sw.add_argument("--spacing-max", type=_positive_float, default=1.9)
    sw.add_argument("--steps", type=_int_at_least(2), default=10)
    sw.add_argument("--n", type=_int_at_least(1), default=100_000)

    dodeca = top.add_parser("dodeca", help="dodecahedral cell in 3D")
    ds = dodeca.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cfg = _Parser(add_help=False)
    cfg.add_argument("--config", choices=("paper", "regular"), default="paper")
    ds.add_parser("constants", parents=[common, cfg], help="a, R, H, alpha1")
    ds.add_parser("frame", parents=[common, cfg], help="cell frame points and volumes")
    vo = ds.add_parser("volume", parents=[common, cfg, seeded], help="estimate vol(S)")
    vo.add_argument("--method", choices=("gnp", "hull", "rejection"), default="gnp")
    vo.add_argument("--n", type=_int_at_least(1), nargs="+", default=None)
    vo.add_argument("--m", type=_int_at_least(1), nargs="+", default=None)
    vo.add_argument("--tries", type=_int_at_least(1), default=100)
    vo.add_argument("--probes", type=_int_at_least(1), default=1024)
    dl = ds.add_parser("delta", parents=[common, cfg, seeded], help="alpha2 and the 1-density")
    dl.add_argument("--vol-s", type=float, default=None)
    dl.add_argument("--n", type=_int_at_least(1), default=10_000_000)
    return p


def _meta(args, seed=None, **extra) -> dict:
    meta = {"seed": seed, "config": getattr(args, "config", None) or "none", "version": __version__}
    meta.update(extra)
    return meta


def _seed(args, err) -> int:
    if args.seed is None:
        print("note: no --seed given; using seed 0", file=err)
        return 0
    return args.seed


def _planar(args, err) -> ReportDocument:
    if args.cmd == "sector-max":
        x, f, ratio = maximize_sector_once_area(args.x0)
        return ReportDocument(
            _meta(args, command="planar sector-max"),
            result={"x_star": x, "f_star": f, "ratio_star": ratio},
        )
    if args.cmd == "verify-cover":
        v = check_cover_lemma2(LatticeCover.family(args.family, args.spacing), args.window)
        return ReportDocument(
            _meta(args, command="planar verify-cover", family=args.family),
            result={"spacing": args.spacing, "is_cover": v.is_cover, "r_max": v.r_max},
        )
    seed = _seed(args, err)
    if args.cmd == "density":
        cover = LatticeCover.family(args.family, args.spacing)
        h = coverage_multiplicity_histogram(cover, args.n, RandomStream(seed, 0))
        result = {"spacing": args.spacing, "n": args.n, "average": h.average,
                  "average_std_error": h.average_std_error}
        result.update({f"fraction_{k}": v for k, v in enumerate(h.fraction)})
        return ReportDocument(_meta(args, seed, command="planar density", family=args.family),
                              result=result)
    if args.spacing_min >= args.spacing_max:
        raise ValueError("--spacing-min must be below --spacing-max")
    rows = sweep_lattice(args.family, args.spacing_min, args.spacing_max, args.steps,
                         args.n, RandomStream(seed, 0))
    return ReportDocument(
        _meta(args, seed, command="planar sweep", family=args.family),
        rows=[{"spacing": r.spacing, "is_cover": r.is_cover, "r_max": r.r_max, "once": r.once}
              for r in rows],
        columns=("spacing", "is_cover", "r_max", "once"),
    )


def _dodeca(args, err) -> ReportDocument:
    params = dodeca_params(args.config)
    if args.cmd == "constants":
        return ReportDocument(
            _meta(args, command="dodeca constants"),
            result={"a": params.a, "R": params.R, "H": params.H, "rho": params.rho,
                    "alpha1": params.alpha1},
        )
    frame = cell_frame(params)
    if args.cmd == "frame":
        result = {}
        for name in ("p0", "p1", "p2", "p3", "p4"):
            for axis, c in zip("xyz", getattr(frame, name)):
                result[f"{name}_{axis}"] = float(c)
        result.update(vol_T=frame.vol_T, vol_T_prime=frame.vol_T_prime, vol_big=frame.vol_big)
        return ReportDocument(_meta(args, command="dodeca frame"), result=result)
    seed = _seed(args, err)
    if args.cmd == "volume":
        method = args.method
        grid = args.m if method == "hull" else args.n
        if method == "hull" and args.n is not None or method != "hull" and args.m is not None:
            raise ValueError("use --m with the hull method and --n otherwise")
        grid = grid or DEFAULT_GRIDS[method]
        rows = []
        for k in grid:
            if method == "gnp":
                cfg = GnPConfig(k, probes=args.probes)
            elif method == "hull":
                cfg = HullPatchConfig(k)
            else:
                cfg = RejectionConfig(k)
            st = run_trials(method, frame, cfg, args.tries, seed)
            rows.append({"param": k, "mean": st.mean, "sigma": st.sigma, "max": st.max})
        return ReportDocument(
            _meta(args, seed, command="dodeca volume", method=method,
                  param="m" if method == "hull" else "n", tries=args.tries),
            rows=rows,
        )
    # delta
    if args.vol_s is not None:
        vol_s, err = args.vol_s, 0.0
    else:
        vol_s, err = rejection_volume(frame, args.n, RandomStream(seed, 0))
    alpha2, delta = delta3_dc(params, vol_s)
    return ReportDocument(
        _meta(args, seed, command="dodeca delta"),
        result={"vol_S": vol_s, "vol_S_std_error": err, "vol_T": frame.vol_T,
                "alpha1": params.alpha1, "alpha2": alpha2, "delta": delta},
    )


def run_cli(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except ArgumentError as e:
        print(e, file=err)
        return 1
    except SystemExit as e:  # --help / --version
        return 0 if e.code in (0, None) else 1
    try:
        doc = _planar(args, err) if args.group == "planar" else _dodeca(args, err)
    except NumericalFailure as e:
        print(f"unitcover: numerical failure: {e}", file=err)
        return 2
    except (ValueError, KeyError) as e:
        print(f"unitcover: error: {e}", file=err)
        return 1
    except Exception as e:  # noqa: BLE001 - exit-code contract
        print(f"unitcover: unexpected failure: {type(e).__name__}: {e}", file=err)
        return 2
    out.write(render_report(doc, args.format))
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
