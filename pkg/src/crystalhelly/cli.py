"""Command-line front end.

Exit codes: 0 ok, 2 bad configuration, 3 uncertain verdict under
``--strict``, 4 a search result refuted by the verifier, 5 a lower bound
above the theorem's upper bound.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from .emptyhull import Status, is_empty_hull, largest_empty_polygon_dp
from .geom import Box, convex_hull_2d
from .helly import (
    bound_report,
    fractional_experiment,
    product_certificate,
    random_clustered_rectangles,
    random_rectangles,
    two_dim_crystal_bound,
)
from .numeric import DEFAULT_PRECISION, parse_scalar, to_float
from .pointsets import (
    PRESETS,
    Crystal,
    UnknownPreset,
    load_source,
    patch_to_csv,
    patch_to_json,
    points_in_box,
    preset,
)

EXIT_CONFIG = 2
EXIT_UNCERTAIN = 3
EXIT_REFUTED = 4
EXIT_INCONSISTENT = 5
DEFAULT_SEED = 20240601

DEFAULT_REGIONS = {
    "z2": "-5,-5,5,5",
    "paper-6crystal": "-2,-2,3,3",
    "paper-5crystal": "-2,-2,3,3",
    "paper-4crystal": "-2,-2,3,3",
    "paper-3crystal": "-2,-2,3,3",
    "paper-2crystal-hex": "-2,-2,3,3",
    "ammann-beenker": "-4,-4,4,4",
    "fibonacci": "0,30",
    "penrose-debruijn": "-3,-3,3,3",
}

PALETTE = ["#1f5fbf", "#d2462d", "#2a9d4b", "#8e44ad", "#e08e0b", "#16a0a0",
           "#b5651d", "#c2185b", "#546e7a", "#7cb342"]


class ConfigError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _source(args):
    try:
        if getattr(args, "config", None):
            return load_source(args.config, args.precision)
        if not args.preset:
            raise ConfigError("one of --preset or --config is required")
        return preset(args.preset, args.precision)
    except UnknownPreset as exc:
        raise ConfigError(f"unknown preset {exc.args[0]!r}") from exc
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc


def _region(args, S) -> Box:
    text = args.region or DEFAULT_REGIONS.get(getattr(args, "preset", None) or "", None)
    if text is None:
        raise ConfigError("--region is required for config sources")
    try:
        box = Box.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if box.dim != S.dim:
        raise ConfigError(f"region has dimension {box.dim}, the set has {S.dim}")
    return box


def _margin(args) -> Fraction:
    try:
        m = Fraction(args.margin)
    except ValueError as exc:
        raise ConfigError(f"bad margin {args.margin!r}") from exc
    if m < 0:
        raise ConfigError("margin must be nonnegative")
    return m


def _fmt12(x) -> str:
    return f"{to_float(x):.12g}"


def render_svg(patch, polygons=(), size: int = 480) -> str:
    """Patch points (colored by coset) and polygon outlines as an SVG document."""
    lo, hi = patch.region.lo, patch.region.hi
    w = max(to_float(hi[0] - lo[0]), 1e-9)
    h = max(to_float(hi[1] - lo[1]), 1e-9)
    s = size / max(w, h)

    def xy(p):
        return _fmt12((to_float(p[0]) - to_float(lo[0])) * s), _fmt12((to_float(hi[1]) - to_float(p[1])) * s)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt12(w * s)}" height="{_fmt12(h * s)}" '
        f'viewBox="0 0 {_fmt12(w * s)} {_fmt12(h * s)}">',
        f'<rect x="0" y="0" width="{_fmt12(w * s)}" height="{_fmt12(h * s)}" fill="white"/>',
    ]
    for verts in polygons:
        pts = " ".join(",".join(xy(v)) for v in verts)
        lines.append(f'<polygon points="{pts}" fill="#f4d35e" fill-opacity="0.35" stroke="black" stroke-width="1.5"/>')
    for p, prov in patch.points:
        color = PALETTE[prov % len(PALETTE)] if isinstance(prov, int) else PALETTE[0]
        x, y = xy(p)
        lines.append(f'<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands

def cmd_presets(args) -> int:
    if args.json:
        _write(None, _dump(PRESETS))
    else:
        for name, desc in PRESETS.items():
            print(f"{name:20s} {desc}")
    return 0


def cmd_generate(args) -> int:
    S = _source(args)
    region = _region(args, S)
    patch = points_in_box(S, region)
    if args.out:
        Path(args.out + ".csv").write_text(patch_to_csv(patch))
        Path(args.out + ".json").write_text(_dump(patch_to_json(patch)))
        if patch.uncertain:
            Path(args.out + ".uncertain.csv").write_text(patch_to_csv(patch, "uncertain"))
        print(f"{len(patch)} points, {len(patch.uncertain)} uncertain")
    else:
        _write(None, _dump(patch_to_json(patch)))
    if patch.uncertain and args.strict:
        return EXIT_UNCERTAIN
    return 0


def cmd_search(args) -> int:
    S = _source(args)
    if S.dim != 2:
        raise ConfigError("search works in the plane")
    region = _region(args, S)
    patch = points_in_box(S, region)
    cert = largest_empty_polygon_dp(patch, S, _margin(args), workers=args.threads)
    doc = cert.to_json()
    doc["search"] = {"region": args.region or DEFAULT_REGIONS.get(args.preset or "", ""),
                     "margin": str(_margin(args)), "patch_points": len(patch),
                     "uncertain_points": len(patch.uncertain)}
    if args.out:
        Path(args.out + ".json").write_text(_dump(doc))
        Path(args.out + ".svg").write_text(render_svg(patch, [cert.vertices] if cert.vertices else []))
    elif not args.quiet:
        _write(None, _dump(doc))
    print(f"helly_lower_bound = {cert.size if cert.status is Status.VERIFIED else 'n/a'}"
          f"  (status {cert.status.value}, {cert.size} vertices)")
    if cert.status is Status.REFUTED:
        return EXIT_REFUTED
    if cert.status is Status.UNCERTAIN and args.strict:
        return EXIT_UNCERTAIN
    return 0


def _parse_vertices(text: str, prec: int) -> list:
    try:
        return [tuple(parse_scalar(c.strip(), prec) for c in part.split(","))
                for part in text.split(";") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad vertex list: {exc}") from exc


def cmd_verify(args) -> int:
    S = _source(args)
    if args.certificate:
        try:
            data = json.loads(Path(args.certificate).read_text())
            verts = [tuple(parse_scalar(c, args.precision) for c in v) for v in data["vertices"]]
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    elif args.vertices:
        verts = _parse_vertices(args.vertices, args.precision)
    else:
        raise ConfigError("one of --vertices or --certificate is required")
    try:
        cert = is_empty_hull(S, verts)
    except ValueError as exc:
        doc = {"source": getattr(S, "name", "set"), "status": "INVALID", "error": str(exc)}
        _write(args.out, _dump(doc))
        return EXIT_REFUTED
    doc = cert.to_json()
    if args.lift:
        lifted = product_certificate(cert, args.lift, S)
        doc["lift"] = lifted.to_json()
    _write(args.out, _dump(doc))
    if args.strict and cert.status is Status.UNCERTAIN:
        return EXIT_UNCERTAIN
    return 0


def cmd_bounds(args) -> int:
    names = args.preset or ["z2", "paper-2crystal-hex", "paper-3crystal", "paper-4crystal",
                            "paper-5crystal", "paper-6crystal"]
    reports = []
    bad = False
    for name in names:
        try:
            S = preset(name, args.precision)
        except UnknownPreset as exc:
            raise ConfigError(f"unknown preset {name!r}") from exc
        certs = []
        if not args.no_search and S.dim == 2:
            region = Box.parse(DEFAULT_REGIONS[name])
            cert = largest_empty_polygon_dp(points_in_box(S, region), S, Fraction(1), workers=args.threads)
            certs.append(cert)
        rep = bound_report(S, certs)
        reports.append(rep)
        if args.lift and isinstance(S, Crystal) and certs and certs[0].status is Status.VERIFIED:
            lifted_cert = product_certificate(certs[0], args.lift, S)
            lifted = S.product_with_integers(args.lift)
            reports.append(bound_report(lifted, [lifted_cert]))
    for rep in reports:
        bad = bad or not rep.consistent
    if not args.quiet:
        print(f"{'set':28s} {'lower':>6s} {'upper':>6s}  theorem")
        for rep in reports:
            lower = "-" if rep.lower is None else str(rep.lower)
            print(f"{rep.source:28s} {lower:>6s} {rep.upper:>6d}  {rep.tag}")
        print("k        " + " ".join(f"{k:>3d}" for k in range(1, 7)))
        print("max. n   " + " ".join(f"{two_dim_crystal_bound(k):>3d}" for k in range(1, 7)))
    if args.out:
        Path(args.out).write_text(_dump([r.to_json() for r in reports]))
    return EXIT_INCONSISTENT if bad else 0


def _load_family(path: str, prec: int) -> list:
    try:
        data = json.loads(Path(path).read_text())
        fam = [[tuple(parse_scalar(c, prec) for c in v) for v in member] for member in data["family"]]
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed family file: {exc}") from exc
    try:
        return [convex_hull_2d(m) for m in fam]
    except Exception as exc:  # degenerate input is a configuration problem here
        raise ConfigError(f"malformed family member: {exc}") from exc


def cmd_fractional(args) -> int:
    if not args.preset and not args.config:
        args.preset = "z2"
    S = _source(args)
    if args.family:
        family = _load_family(args.family, args.precision)
    else:
        rng = random.Random(args.seed)
        if args.cluster:
            family = random_clustered_rectangles(rng, args.random)
        else:
            family = random_rectangles(rng, args.random)
    try:
        rep = fractional_experiment(S, family)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = rep.to_json()
    doc["seed"] = None if args.family else args.seed
    _write(args.out, _dump(doc))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crystalhelly",
                                description="Empty polygons and Helly numbers of crystals and quasicrystals.")
    sub = p.add_subparsers(dest="command", required=True)

    def source_opts(sp, many=False):
        if many:
            sp.add_argument("--preset", action="append", help="preset name (repeatable)")
        else:
            sp.add_argument("--preset", help="preset name, see the presets command")
            sp.add_argument("--config", help="JSON file describing a crystal or scheme")
        sp.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="bits for certified floats")

    sp = sub.add_parser("presets", help="list the built-in point sets")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_presets)

    sp = sub.add_parser("generate", help="write a saturated patch")
    source_opts(sp)
    sp.add_argument("--region", help="box as x0,y0,x1,y1")
    sp.add_argument("--out", help="output prefix for .csv/.json")
    sp.add_argument("--strict", action="store_true", help="exit 3 on uncertain points")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("search", help="largest empty polygon in a patch")
    source_opts(sp)
    sp.add_argument("--region")
    sp.add_argument("--margin", default="1")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", help="output prefix for .json/.svg")
    sp.add_argument("--quiet", action="store_true")
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", help="check an empty polygon certificate")
    source_opts(sp)
    sp.add_argument("--vertices", help="'x,y;x,y;...'")
    sp.add_argument("--certificate", help="certificate JSON from search")
    sp.add_argument("--lift", type=int, default=0, help="also verify the product with [0,1]^N")
    sp.add_argument("--out")
    sp.add_argument("--strict", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bounds", help="lower and upper bounds for presets")
    source_opts(sp, many=True)
    sp.add_argument("--lift", type=int, default=0)
    sp.add_argument("--no-search", action="store_true")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--quiet", action="store_true")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("fractional", help="fractional Helly experiment")
    source_opts(sp)
    sp.add_argument("--family", help="JSON file {\"family\": [[[x, y], ...], ...]}")
    sp.add_argument("--random", type=int, default=20, help="number of random rectangles")
    sp.add_argument("--cluster", action="store_true", help="rectangles around the origin")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fractional)
    return p


def _join_negative_values(argv: list) -> list:
    """Let ``--region -5,-5,5,5`` through argparse as ``--region=-5,-5,5,5``."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in ("--region", "--margin", "--vertices") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
