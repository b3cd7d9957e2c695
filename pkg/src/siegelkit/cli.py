"""Command-line front end.

Subcommands: classify | brjuno | boundary | fatou | renorm | curves | arc.
Every command writes a manifest JSON (inputs, versions, measured constants,
timings) next to its outputs.  Exit codes: 0 success, 2 precision/residual
failure (with a report), 64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__, constants
from .cfrac import RotationNumber, Tail, brjuno_sum, classify
from .curves import TowerBuilder, build_arc, convergence_report, s_alpha_orbit, tilde_h_status
from .errors import PrecisionExhausted, ResidualTooLarge, SiegelkitError
from .fatou import (FatouCoordinate, fatou_coordinate, measure_constants,
                    resolve_cache_dir, sector_sets)
from .linearize import critical_orbit, linearization_boundary
from .maps import QuadMap
from .renorm import find_kf, renormalize

EX_USAGE = 64
EX_SOFT = 2


def _parse_rotation(args) -> RotationNumber:
    if args.value is not None:
        rot = RotationNumber.from_value(args.value, depth=args.depth + 2,
                                        dps=args.precision)
        return rot
    digits = [int(x) for x in args.digits.split(",")] if args.digits else []
    tail = None
    if args.tail:
        kind, _, data = args.tail.partition(":")
        if kind == "constant":
            tail = Tail.constant(int(data))
        elif kind == "periodic":
            tail = Tail.periodic([int(x) for x in data.split(",")])
        elif kind == "explicit-only":
            tail = Tail.explicit_only()
        else:
            raise ValueError("unknown tail kind %r" % kind)
    if not digits and tail is None:
        raise ValueError("need --digits, --tail, or --value")
    return RotationNumber(digits, tail, dps=args.precision)


def _rotation_flags(p: argparse.ArgumentParser):
    p.add_argument("--digits", help="comma-separated digit prefix")
    p.add_argument("--tail", help="constant:A | periodic:A,B,... | explicit-only")
    p.add_argument("--alpha-digits", dest="tail_alias",
                   help="alias for --tail (e.g. constant:25)")
    p.add_argument("--value", type=float, help="decimal value in (0,1)")
    p.add_argument("--precision", type=int, default=constants.PRECISION_DPS)
    p.add_argument("--depth", type=int, default=10)


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _write_manifest(outdir: str, name: str, config: dict, results: dict,
                    timings: dict):
    import mpmath
    import scipy
    manifest = {
        "command": name,
        "inputs": config,
        "versions": {
            "siegelkit": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "mpmath": mpmath.__version__,
            "python": sys.version.split()[0],
        },
        "results": results,
        "timings_s": timings,
    }
    path = os.path.join(outdir, "%s_manifest.json" % name)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def _write_polyline_csv(path: str, t, z):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for ti, zi in zip(t, z):
            w.writerow(["%.12g" % ti, "%.15g" % zi.real, "%.15g" % zi.imag])


def _json_config(args) -> dict:
    return {k: v for k, v in vars(args).items()
            if k not in ("func",) and v is not None}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    t0 = time.time()
    rot = _parse_rotation(args)
    report = classify(rot, depth=args.depth, N=args.high_type_n)
    payload = report.to_json()
    out = json.dumps(payload, indent=2)
    if args.out:
        outdir = _outdir(args)
        with open(os.path.join(outdir, "classify.json"), "w") as fh:
            fh.write(out)
        _write_manifest(outdir, "classify", _json_config(args), payload,
                        {"total": time.time() - t0})
    print(out)
    return 0


def cmd_brjuno(args) -> int:
    t0 = time.time()
    rot = _parse_rotation(args)
    bp = brjuno_sum(rot, args.depth)
    payload = bp.to_json()
    payload["alpha"] = rot.value_float()
    out = json.dumps(payload, indent=2)
    if args.out:
        outdir = _outdir(args)
        with open(os.path.join(outdir, "brjuno.json"), "w") as fh:
            fh.write(out)
        _write_manifest(outdir, "brjuno", _json_config(args), payload,
                        {"total": time.time() - t0})
    print(out)
    return 0


def cmd_boundary(args) -> int:
    from .render import figure_boundary, save_point_sets_ppm
    t0 = time.time()
    rot = _parse_rotation(args)
    oracle = linearization_boundary(rot, terms=args.terms)
    t1 = time.time()
    orbit = critical_orbit(QuadMap(oracle.alpha), n=args.orbit_points)
    t2 = time.time()
    outdir = _outdir(args)
    _write_polyline_csv(os.path.join(outdir, "boundary.csv"),
                        np.linspace(0, 1, len(oracle.boundary)),
                        oracle.boundary)
    save_point_sets_ppm([oracle.boundary, orbit[::4]],
                        os.path.join(outdir, "boundary.ppm"))
    figure_boundary(oracle, orbit, os.path.join(outdir, "boundary.png"))
    results = {
        "alpha": oracle.alpha,
        "conformal_radius": oracle.conformal_radius,
        "rho_hadamard": oracle.rho_hadamard,
        "rho_slope": oracle.rho_slope,
        "diagnostics": oracle.diagnostics,
    }
    path = _write_manifest(outdir, "boundary", _json_config(args), results,
                           {"series": t1 - t0, "orbit": t2 - t1,
                            "total": time.time() - t0})
    print(json.dumps(results, indent=2))
    print("manifest: %s" % path)
    return 0


def cmd_fatou(args) -> int:
    from .render import figure_grid
    t0 = time.time()
    rot = _parse_rotation(args)
    coord = FatouCoordinate(rot.value_float())
    t1 = time.time()
    grid = fatou_coordinate(coord, resolution=(args.res, args.res))
    t2 = time.time()
    consts = measure_constants(coord)
    outdir = _outdir(args)
    cache_dir = resolve_cache_dir(args.cache_dir)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        grid.save(os.path.join(cache_dir,
                               "fatou_%.8f.grid" % coord.alpha))
    figure_grid(grid, os.path.join(outdir, "fatou.png"))
    results = {
        "alpha": coord.alpha,
        "welding_residual": coord.weld.residual,
        "abel_residual_max": grid.residual_max,
        "abel_residual_q99": grid.residual_quantile99,
        "abel_residual_nodes": grid.residual_nodes,
        "phi_cv": 1.0,
        "margin_right": coord.margin_right,
        "k_hat": coord.k_hat,
        "measured_constants": consts,
    }
    path = _write_manifest(outdir, "fatou", _json_config(args), results,
                           {"build": t1 - t0, "grid": t2 - t1,
                            "total": time.time() - t0})
    print(json.dumps(results, indent=2))
    print("manifest: %s" % path)
    return 0 if grid.residual_max < 1e-6 else EX_SOFT


def cmd_renorm(args) -> int:
    from .render import figure_sector
    t0 = time.time()
    rot = _parse_rotation(args)
    coord = FatouCoordinate(rot.value_float())
    sector = sector_sets(coord, rot, n=0, M=args.M)
    sr = find_kf(coord, sector)
    t1 = time.time()
    rmap = renormalize(coord, sr)
    t2 = time.time()
    outdir = _outdir(args)
    _write_polyline_csv(os.path.join(outdir, "sector_left.csv"),
                        np.linspace(0, 1, len(sr.left_z)), sr.left_z)
    _write_polyline_csv(os.path.join(outdir, "renorm_samples.csv"),
                        np.abs(rmap.mesh_z), rmap.values)
    figure_sector(sr, os.path.join(outdir, "sector.png"))
    results = {"sector": sr.to_json(), "renormalization": rmap.to_json()}
    path = _write_manifest(outdir, "renorm", _json_config(args), results,
                           {"sector": t1 - t0, "mesh": t2 - t1,
                            "total": time.time() - t0})
    print(json.dumps(results, indent=2))
    print("manifest: %s" % path)
    return 0 if rmap.multiplier_error < 1e-3 else EX_SOFT


def cmd_curves(args) -> int:
    from .render import figure_curves
    t0 = time.time()
    rot = _parse_rotation(args)
    tower = TowerBuilder(rot, M=args.M)
    oracle = linearization_boundary(rot, terms=args.terms)
    report = convergence_report(tower, depth=args.tower_depth, oracle=oracle)
    t1 = time.time()
    outdir = _outdir(args)
    coord0 = tower.level(0).coord
    images = []
    from .fatou import fatou_inverse
    for i in range(args.tower_depth + 1):
        c = tower.gamma(0, i)
        zc = fatou_inverse(coord0, c.eval(np.linspace(0, 1, 1500)))
        images.append(zc)
        _write_polyline_csv(os.path.join(outdir, "gamma_0_%d.csv" % i),
                            np.linspace(0, 1, len(zc)), zc)
    figure_curves(images, oracle, os.path.join(outdir, "curves.png"))
    results = report.to_json()
    with open(os.path.join(outdir, "convergence.json"), "w") as fh:
        json.dump(results, fh, indent=2)
    path = _write_manifest(outdir, "curves", _json_config(args), results,
                           {"tower": t1 - t0, "total": time.time() - t0})
    print(json.dumps(results, indent=2))
    print("manifest: %s" % path)
    gaps = results["sup_gaps"]
    ok = all(gaps[i + 1] <= gaps[i] for i in range(len(gaps) - 1))
    return 0 if ok else EX_SOFT


def cmd_arc(args) -> int:
    from .render import figure_arc
    t0 = time.time()
    rot = _parse_rotation(args)
    tower = TowerBuilder(rot, M=args.M)
    arc = build_arc(tower, levels=args.tower_depth)
    coord = tower.level(0).coord
    consts = measure_constants(coord)
    verdicts = []
    samples = arc.arc_zeta[10:-10:max(1, len(arc.arc_zeta) // 40)]
    for z0 in samples:
        res = s_alpha_orbit(tower, complex(z0), depth=args.depth,
                            numeric_levels=min(2, args.tower_depth + 1),
                            M=args.M, D3=consts["D3"], D5=consts["D5"])
        verdicts.append(res)
    status = tilde_h_status(verdicts, args.depth)
    t1 = time.time()
    outdir = _outdir(args)
    oracle = None
    try:
        oracle = linearization_boundary(rot, terms=args.terms)
    except SiegelkitError:
        status["siegel_oracle"] = "skipped: no Siegel disk certificate"
    _write_polyline_csv(os.path.join(outdir, "arc.csv"),
                        np.linspace(0, 1, len(arc.arc_z)), arc.arc_z)
    figure_arc(arc, oracle, os.path.join(outdir, "arc.png"))
    results = {"arc": arc.to_json(), "tilde_h": status,
               "measured_constants": consts}
    path = _write_manifest(outdir, "arc", _json_config(args), results,
                           {"arc": t1 - t0, "total": time.time() - t0})
    print(json.dumps(results, indent=2))
    print("manifest: %s" % path)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="siegelkit",
        description="Quadratic Siegel disk toolkit: rotation-number "
                    "arithmetic, Fatou coordinates, renormalization, "
                    "boundary curves")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="finite-depth membership certificates")
    _rotation_flags(p)
    p.add_argument("--high-type-n", type=int, default=constants.HIGH_TYPE_N)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("brjuno", help="Brjuno partial sums")
    _rotation_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_brjuno)

    p = sub.add_parser("boundary", help="Siegel boundary oracle")
    _rotation_flags(p)
    p.add_argument("--terms", type=int, default=4096)
    p.add_argument("--orbit-points", type=int, default=400000)
    p.add_argument("--out", default="out_boundary")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("fatou", help="perturbed Fatou coordinate grid")
    _rotation_flags(p)
    p.add_argument("--res", type=int, default=400)
    p.add_argument("--cache-dir")
    p.add_argument("--out", default="out_fatou")
    p.set_defaults(func=cmd_fatou)

    p = sub.add_parser("renorm", help="near-parabolic renormalization step")
    _rotation_flags(p)
    p.add_argument("--M", type=float, default=constants.M_DEFAULT)
    p.add_argument("--out", default="out_renorm")
    p.set_defaults(func=cmd_renorm)

    p = sub.add_parser("curves", help="boundary curve tower")
    _rotation_flags(p)
    p.add_argument("--M", type=float, default=constants.M_DEFAULT)
    p.add_argument("--tower-depth", type=int, default=2)
    p.add_argument("--terms", type=int, default=4096)
    p.add_argument("--out", default="out_curves")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("arc", help="canonical arc and membership dynamics")
    _rotation_flags(p)
    p.add_argument("--M", type=float, default=constants.M_DEFAULT)
    p.add_argument("--tower-depth", type=int, default=1)
    p.add_argument("--terms", type=int, default=4096)
    p.add_argument("--out", default="out_arc")
    p.set_defaults(func=cmd_arc)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EX_USAGE if exc.code not in (0, None) else 0
    if getattr(args, "tail_alias", None) and not args.tail:
        args.tail = args.tail_alias
    try:
        return args.func(args)
    except (ValueError,) as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EX_USAGE
    except PrecisionExhausted as exc:
        print("precision exhausted: %s" % exc, file=sys.stderr)
        return EX_SOFT
    except ResidualTooLarge as exc:
        print("residual too large: %s" % exc, file=sys.stderr)
        return EX_SOFT
    except SiegelkitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EX_SOFT


if __name__ == "__main__":
    sys.exit(main())
