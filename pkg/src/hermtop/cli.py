"""Command-line front end: ``hermtop <subcommand> ...``.

Exit codes: 0 success, 1 domain error (isotropic or definite form where the
other kind is needed, unsupported discriminant, step limit), 2 usage error.
JSON goes to stdout with sorted keys; rationals are written {"num", "den"}.
The environment variable HERMTOP_STEP_LIMIT overrides the descent step limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import classify as classify_mod
from . import eisenstein, gaussian, render, spine, spine_geom, topograph
from .forms import (
    DegenerateFormError,
    HermitianForm,
    IsotropicFormError,
    NotIndefiniteError,
    QuadraticForm,
)
from .ring import DiscriminantError


class UsageError(Exception):
    pass


DOMAIN_ERRORS = (
    DiscriminantError,
    IsotropicFormError,
    NotIndefiniteError,
    DegenerateFormError,
    eisenstein.NoWellError,
    spine.StepLimitError,
    spine_geom.GeometryError,
)


def _exact(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else {"num": x.numerator, "den": x.denominator}
    if isinstance(x, dict):
        return {k: _exact(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_exact(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_exact(obj), sort_keys=True)


def _vec_json(v) -> list:
    return [e.to_json() for e in v]


def _vertex_json(F: spine.Valued, vx: spine.Vertex) -> dict:
    out = {"vectors": [_vec_json(v) for v in vx.vecs], "labels": list(F.labels(vx)), "inv": F.inv(vx)}
    if F.d == -4:
        gv = gaussian.GVertex.from_vertex(vx)
        out["pairs"] = [
            {"vectors": [_vec_json(a), _vec_json(b)], "values": [F.value(a), F.value(b)]} for a, b in gv.pairs()
        ]
    return out


# -- parsing -----------------------------------------------------------------------------

def _parse_quadratic(text: str) -> QuadraticForm:
    try:
        a, b2, c = (int(t) for t in text.split(","))
    except ValueError as e:
        raise UsageError(f"--form expects a,b2,c integers, got {text!r}") from e
    return QuadraticForm(a, b2, c)


def _parse_hermitian(text: str, d: int) -> HermitianForm:
    try:
        obj = json.loads(text)
        return HermitianForm.from_json(obj, d)
    except DiscriminantError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"--form expects JSON {{\"a\":..,\"c\":..,\"nu\":{{\"x\":..,\"y\":..}}}}: {e}") from e


def _parse_window(text: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError as e:
        raise UsageError(f"--window expects x0,y0,x1,y1, got {text!r}") from e
    if len(vals) != 4:
        raise UsageError("--window expects four numbers")
    return vals


def _hermitian_args(p):
    p.add_argument("--d", type=int, required=True, help="discriminant of the ring: -3 or -4")
    p.add_argument("--form", required=True, help='form JSON, e.g. {"a":1,"c":-1,"nu":{"x":3,"y":1}}')


# -- subcommands -------------------------------------------------------------------------------

def cmd_river(args, out):
    f = _parse_quadratic(args.form)
    res = topograph.trace_river(f)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render.svg_topograph(f, args.depth))
    out.write(_dump({"form": f.to_json(), "disc": f.disc(), **res.to_json()}) + "\n")


def cmd_minimum(args, out):
    if args.d is None:
        f = _parse_quadratic(args.form)
        res = topograph.trace_river(f)
        out.write(_dump({"form": f.to_json(), "minimum": res.min_abs, "vector": [res.min_vec.m, res.min_vec.n]}) + "\n")
        return
    f = _parse_hermitian(args.form, args.d)
    spine.require_spine_disc(f.d)
    delta = f.disc()
    if delta < 0:
        if f.a < 0:
            raise NotIndefiniteError("negative definite form: negate it first")
        m = eisenstein.well_minimum(f) if f.d == -3 else classify_mod.definite_minimum(f)
        kind = "well"
    else:
        m = spine.analyze(f).minimum
        kind = "ocean"
    out.write(_dump({"form": f.to_json(), "disc": delta, "kind": kind, "minimum": m}) + "\n")


def cmd_well(args, out):
    f = _parse_hermitian(args.form, args.d)
    if f.d != -3:
        raise DiscriminantError("well is implemented for D=-3")
    w = eisenstein.find_well(f)
    out.write(_dump({
        "form": f.to_json(),
        "ultrabasis": w.ultrabasis.to_json(),
        "labels": list(w.labels),
        "greeks": list(eisenstein.greeks(w.labels)),
        "minimum": w.minimum,
        "wells": [{"ultrabasis": ub.to_json(), "labels": list(l)} for l, ub in w.wells],
    }) + "\n")


def cmd_ocean(args, out):
    f = _parse_hermitian(args.form, args.d)
    spine.require_spine_disc(f.d)
    g = eisenstein.ocean_graph_e(f, args.radius) if f.d == -3 else gaussian.ocean_graph_g(f, args.radius)
    F = spine.Valued(f)
    verts = [_vertex_json(F, g.vertices[k]) for k in sorted(g.vertices)]
    out.write(_dump({
        "form": f.to_json(),
        "radius": args.radius,
        "seed": _vertex_json(F, g.seed),
        "vertex_count": len(g.vertices),
        "edge_count": len(g.edges),
        "cell_count": len(g.cells),
        "minimum": min(abs(x) for v in verts for x in v["labels"]),
        "vertices": verts,
    }) + "\n")


def cmd_classify(args, out):
    spine.require_spine_disc(args.d)
    if args.jobs > 1:
        res = classify_mod.classify_many([(args.d, args.disc)], jobs=args.jobs)
        classes = res[(args.d, args.disc)]
    else:
        classes = [c.to_json() for c in classify_mod.classify(args.d, args.disc)]
    doc = {"d": args.d, "disc": args.disc, "count": len(classes), "classes": classes}
    if args.d == -3:
        doc["labels"] = [list(k) for k in eisenstein.classify_disc_e(args.disc)]
    out.write(_dump(doc) + "\n")


def cmd_uf_group(args, out):
    f = _parse_hermitian(args.form, args.d)
    spine.require_spine_disc(f.d)
    r = eisenstein.uf_generators_e(f, args.special) if f.d == -3 else gaussian.uf_generators_g(f, args.special)
    F = spine.Valued(f)
    out.write(_dump({
        "form": f.to_json(),
        "special": r.special,
        "orbits": {"vertices": r.vertex_orbits, "edges": r.edge_orbits, "cells": r.cell_orbits},
        "vertex_reps": [_vertex_json(F, v) for v in r.vertex_reps],
        "vertex_stabilizers": r.vertex_stabilizers,
        "edge_invs": r.edge_invs,
        "edge_stabilizers": r.edge_stabilizers,
        "cell_stabilizers": r.cell_stabilizers,
        "triangle": list(r.triangle) if r.triangle else None,
        "generators": [g.to_json() for g in r.generators],
        "minimum": r.minimum,
        "euler": r.euler,
    }) + "\n")


def cmd_spine_cell(args, out):
    cell = spine_geom.voronoi_cell(args.d) if args.voronoi else spine_geom.fundamental_cell(args.d)
    doc = cell.to_json()
    doc["kind"] = "voronoi" if args.voronoi else "fundamental"
    out.write(_dump(doc) + "\n")


def cmd_tile(args, out):
    win = _parse_window(args.window)
    t = spine_geom.horosphere_tiling(args.d, win)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render.svg_tiling(t))
    out.write(_dump({
        "d": args.d,
        "window": list(win),
        "cells": len(t.cells),
        "area": t.total_area(),
        "window_area": t.window_area(),
    }) + "\n")


def cmd_render(args, out):
    f = _parse_hermitian(args.form, args.d)
    spine.require_spine_disc(f.d)
    g = eisenstein.ocean_graph_e(f, args.radius) if f.d == -3 else gaussian.ocean_graph_g(f, args.radius)
    pr = render.project_ocean(f, g)
    with open(args.out, "w") as fh:
        fh.write(render.svg_ocean(pr))
    if args.coords:
        out.write(_dump(pr.to_json()) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermtop", description="Topographs, spines and oceans of binary forms.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("river", help="river of an indefinite quadratic form over Z")
    s.add_argument("--form", required=True, help="a,b2,c for a m^2 + b2 m n + c n^2")
    s.add_argument("--json", action="store_true", help="JSON output (the default)")
    s.add_argument("--svg", metavar="PATH", help="also draw the topograph to PATH")
    s.add_argument("--depth", type=int, default=5, help="topograph depth for --svg (default 5)")
    s.set_defaults(run=cmd_river)

    s = sub.add_parser("minimum", help="minimum of |f|: quadratic with --form a,b2,c, hermitian with --d")
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--form", required=True)
    s.set_defaults(run=cmd_minimum)

    s = sub.add_parser("well", help="well of a positive definite form (D=-3)")
    _hermitian_args(s)
    s.set_defaults(run=cmd_well)

    s = sub.add_parser("ocean", help="explore the ocean of an indefinite anisotropic form")
    _hermitian_args(s)
    s.add_argument("--radius", type=int, default=3, help="edge distance from the seed vertex (default 3)")
    s.set_defaults(run=cmd_ocean)

    s = sub.add_parser("classify", help="classes of forms with a given discriminant")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("uf-group", help="orbits and generators of U(f) on the ocean")
    _hermitian_args(s)
    s.add_argument("--special", action="store_true", help="restrict to determinants that are unit squares")
    s.set_defaults(run=cmd_uf_group)

    s = sub.add_parser("spine-cell", help="the cell of the spine at infinity, as an exact polygon")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--voronoi", action="store_true", help="the Voronoi cell of A instead")
    s.set_defaults(run=cmd_spine_cell)

    s = sub.add_parser("tile-horosphere", help="tiling of a horosphere at infinity by spine cells")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--window", required=True, help="x0,y0,x1,y1 (write --window=-2,-2,2,2 for negatives)")
    s.add_argument("--svg", metavar="PATH")
    s.set_defaults(run=cmd_tile)

    s = sub.add_parser("render-ocean", help="draw the ocean in the Poincare disk")
    _hermitian_args(s)
    s.add_argument("--radius", type=int, default=4)
    s.add_argument("--out", required=True, help="SVG output path")
    s.add_argument("--coords", action="store_true", help="print disk coordinates as JSON")
    s.set_defaults(run=cmd_render)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.run(args, out)
    except UsageError as e:
        print(f"hermtop: usage error: {e}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as e:
        print(f"hermtop: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
