"""Command-line front end: ``tamevol <command> [options]``.

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 a guaranteed
bound was violated beyond tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog
from .cells import DefinableSet, set_dim
from .errors import InputError, NumericalError
from .grassmann import Plane, cover_grassmannian, tau_max
from .growth import (
    GrowthCurve,
    check_growth_bound,
    default_radii,
    fit_exponent,
    growth_curve,
    stoll_classify,
    verify_projection_bound,
)
from .hausdorff import QuadratureConfig, set_volume_in_ball
from .setfile import dump_set, load_set

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: str | None
    radii: tuple[float, float, int]
    quadrature: QuadratureConfig
    out_csv: str | None = None
    out_json: str | None = None

    def __post_init__(self):
        rmin, rmax, count = self.radii
        if not 0 < rmin < rmax:
            raise InputError("radii need 0 < rmin < rmax")
        if self.command in ("growth", "stoll") and count < 4:
            raise InputError("fitting commands need at least 4 radii")

    def radius_grid(self) -> np.ndarray:
        return default_radii(*self.radii)


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load(args) -> DefinableSet:
    if args.catalog:
        return catalog.load(args.catalog)
    if args.file:
        return load_set(args.file)
    raise InputError("give --catalog NAME or --file PATH")


def _run_config(args) -> RunConfig:
    return RunConfig(
        args.command,
        args.catalog or args.file,
        (args.rmin, args.rmax, args.count),
        QuadratureConfig(samples=args.samples, seed=args.seed, mode=args.mode, workers=args.threads),
        args.out_csv,
        args.out_json,
    )


def cmd_dim(args):
    print(set_dim(_load(args)))
    return EXIT_OK


def cmd_volume(args):
    S = _load(args)
    cfg = _run_config(args).quadrature
    est = set_volume_in_ball(S, args.d, args.r, cfg)
    d = set_dim(S) if args.d is None else args.d
    print(f"vol_{d} {S.name}(r={args.r}) = {est.value:.10g} +/- {est.error_bound:.3g}")
    if args.out_json:
        _emit(_json({"set": S.name, "d": d, "r": args.r, "value": est.value, "error_bound": est.error_bound}), args.out_json)
    return EXIT_OK


def cmd_growth(args):
    S = _load(args)
    rc = _run_config(args)
    g = growth_curve(S, rc.radius_grid(), rc.quadrature)
    v = check_growth_bound(g, args.window)
    _emit(g.to_csv(), rc.out_csv)
    _emit(_json({"set": S.name, "d": g.d, "definable": S.definable, **v.to_json()}), rc.out_json)
    if S.definable and not v.bounded:
        print(f"error: definable set {S.name!r} violates O(r^{g.d})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_fit(args):
    g = GrowthCurve.from_csv(Path(args.csv).read_text(encoding="utf-8"), args.d, Path(args.csv).stem)
    alpha, half = fit_exponent(g, args.window)
    v = check_growth_bound(g, args.window)
    _emit(_json({"alpha": alpha, "halfwidth": half, **v.to_json()}), args.out_json)
    return EXIT_OK


def cmd_stoll(args):
    S = _load(args)
    rc = _run_config(args)
    k = args.d_complex if args.d_complex is not None else int(S.metadata.get("complex_dim", 1))
    v = stoll_classify(S, k, rc.radius_grid(), rc.quadrature)
    _emit(_json({"set": S.name, **v.to_json()}), rc.out_json)
    return EXIT_OK


def cmd_lemma(args):
    S = _load(args)
    rc = _run_config(args)
    radii = default_radii(args.rmin, args.rmax, args.count) if args.radii_given else None
    L = Plane(np.array(json.loads(args.plane), dtype=float)) if args.plane else None
    status = EXIT_OK
    reports = []
    for i, c in enumerate(S.cells):
        if c.dim == 0:
            continue
        rep = verify_projection_bound(c, L, radii, rc.quadrature, args.tau)
        print(f"cell {i}: tau={rep.tau:.6g} max tangent slope={rep.max_slope:.6g}")
        print("  r            vol_C        vol_pi(C)    vol_D        ratio    ratio_D")
        for row in rep.rows:
            print(
                f"  {row.r:<12.6g} {row.vol_graph:<12.6g} {row.vol_projection:<12.6g} "
                f"{row.vol_base:<12.6g} {row.ratio:<8.5f} {row.ratio_base:<8.5f}{'' if row.ok else '  VIOLATED'}"
            )
        if not rep.ok:
            status = EXIT_VERIFY
        reports.append(
            {"cell": i, "tau": rep.tau, "max_slope": rep.max_slope, "rows": [row.__dict__ for row in rep.rows]}
        )
    if rc.out_json:
        _emit(_json({"set": S.name, "cells": reports}), rc.out_json)
    return status


def cmd_cover(args):
    d = args.d if args.d is not None else args.pos_d
    n = args.n if args.n is not None else args.pos_n
    tau = args.tau if args.tau is not None else args.pos_tau
    if d is None or n is None:
        raise InputError("cover needs --d and --n")
    tau = tau_max(d) if tau is None else tau
    centers = cover_grassmannian(d, n, tau, args.seed, args.sample_size)
    print(f"{len(centers)} centers cover Gr({d},{n}) at tau={tau:.6g}", file=sys.stderr)
    payload = {"d": d, "n": n, "tau": tau, "seed": args.seed, "count": len(centers), "centers": [L.frame.tolist() for L in centers]}
    _emit(_json(payload), args.out_json)
    return EXIT_OK


def cmd_examples(args):
    if args.export:
        _emit(dump_set(catalog.load(args.export)) + "\n", args.out_json)
        return EXIT_OK
    for name in catalog.names():
        if name == "plane(d,n)":
            print(f"{name:20s} coordinate d-plane in R^n (e.g. plane(2,3))")
            continue
        spec = catalog.catalog_dict(name)
        meta = spec.get("metadata", {})
        flag = "" if meta.get("definable", True) else "  [not definable]"
        print(f"{name:20s} {meta.get('description', '')}; {meta.get('expected', '')}{flag}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--catalog", help="built-in set name (see `tamevol examples`)")
    src.add_argument("--file", help="JSON set-description file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=QuadratureConfig.samples)
    common.add_argument("--mode", choices=["mc", "grid"], default="mc")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out-csv")
    common.add_argument("--out-json")

    radii = argparse.ArgumentParser(add_help=False)
    radii.add_argument("--rmin", type=float, default=None)
    radii.add_argument("--rmax", type=float, default=None)
    radii.add_argument("--count", type=int, default=None)
    radii.add_argument("--window", type=float, default=0.5, help="tail fraction used for fitting")

    p = argparse.ArgumentParser(prog="tamevol", description="Volumes of definable sets inside balls.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("dim", parents=[common], help="dimension of a set").set_defaults(func=cmd_dim)
    v = sub.add_parser("volume", parents=[common], help="vol_d of S inside B(r)")
    v.add_argument("--r", type=float, required=True)
    v.add_argument("--d", type=int, default=None)
    v.set_defaults(func=cmd_volume)
    sub.add_parser("growth", parents=[common, radii], help="growth curve and O(r^d) verdict").set_defaults(func=cmd_growth)
    f = sub.add_parser("fit", parents=[common, radii], help="verdict for a growth CSV")
    f.add_argument("--csv", required=True)
    f.add_argument("--d", type=int, required=True)
    f.set_defaults(func=cmd_fit)
    s = sub.add_parser("stoll", parents=[common, radii], help="algebraicity verdict for a complex graph")
    s.add_argument("--d-complex", type=int, default=None)
    s.set_defaults(func=cmd_stoll)
    lm = sub.add_parser("lemma-check", parents=[common, radii], help="graph vs projection volume ratios")
    lm.add_argument("--tau", type=float, default=None)
    lm.add_argument("--plane", help="JSON n x d frame of the reference plane")
    lm.set_defaults(func=cmd_lemma)
    cv = sub.add_parser("cover", parents=[common], help="finite cover of Gr(d,n)")
    cv.add_argument("pos_d", nargs="?", type=int)
    cv.add_argument("pos_n", nargs="?", type=int)
    cv.add_argument("pos_tau", nargs="?", type=float)
    cv.add_argument("--d", type=int)
    cv.add_argument("--n", type=int)
    cv.add_argument("--tau", type=float)
    cv.add_argument("--sample-size", type=int, default=10_000)
    cv.set_defaults(func=cmd_cover)
    ex = sub.add_parser("examples", parents=[common], help="list or export catalog sets")
    ex.add_argument("--export", metavar="NAME")
    ex.set_defaults(func=cmd_examples)
    return p


def _fill_radii(args):
    if not hasattr(args, "rmin"):
        args.rmin, args.rmax, args.count, args.radii_given = 1.0, 100.0, 16, False
        return
    args.radii_given = any(x is not None for x in (args.rmin, args.rmax, args.count))
    lemma = args.command == "lemma-check"
    args.rmin = args.rmin if args.rmin is not None else (0.5 if lemma else 1.0)
    args.rmax = args.rmax if args.rmax is not None else (5.0 if lemma else 100.0)
    args.count = args.count if args.count is not None else (8 if lemma else 16)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _fill_radii(args)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
