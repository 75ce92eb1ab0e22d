"""Projection of oceans onto the plane of a form, and SVG output.

Points of H^3 are positive definite hermitian matrices up to scale; the
bilinear form B(X, Y) = (x11 y22 + x22 y11)/2 - Re(x12 conj(y12)) has
B(X, X) = det X.  A cusp (x, y) is the null matrix [[N(x), x conj(y)], [.., N(y)]]
and B(P, W) is half the cusp distance of the point W, so spine vertices are
found by exact linear algebra.  The form f gives the spacelike normal N_f
with B(P_v, N_f) = f(v); its orthogonal complement is the plane H_f over the
circle f = 0, and the nearest-point projection is linear:
X -> X - B(X, N)/B(N, N) N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from xml.sax.saxutils import escape

from .forms import HermitianForm, Mat2A, QuadraticForm, SingularSystemError, solve_rational, transform
from .ring import RingElem
from .spine import OceanGraph, Valued, Vertex
from .spine_geom import Tiling, clip, polygon_area
from .topograph import STANDARD, LaxVec, _other


@dataclass(frozen=True)
class DiskPoint:
    u: float
    v: float

    def __post_init__(self):
        if not self.u * self.u + self.v * self.v < 1:
            raise ValueError("disk point outside the open unit disk")


# -- hermitian matrices ---------------------------------------------------------------
# a matrix is (h11, h22, s, t) with h12 = s + t tau


def bform(d: int, X, Y):
    n0 = (d * d - d) // 4
    re = X[2] * Y[2] + Fraction(d, 2) * (X[2] * Y[3] + X[3] * Y[2]) + n0 * X[3] * Y[3]
    return Fraction(X[0] * Y[1] + X[1] * Y[0], 2) - re


def _lin(*terms):
    out = [Fraction(0)] * 4
    for c, X in terms:
        for i in range(4):
            out[i] += c * X[i]
    return tuple(out)


def cusp_matrix(v) -> tuple:
    x, y = v
    w = x * y.conj()
    return (x.norm(), y.norm(), w.x, w.y)


def form_normal(f: HermitianForm) -> tuple:
    """N_f = [[2c, -2 conj(nu)], [-2 nu, 2a]]."""
    nubar = f.nu.num.conj() / RingElem.sqrt_d(f.d).conj()
    return (Fraction(2 * f.c), Fraction(2 * f.a), -2 * Fraction(nubar.x), -2 * Fraction(nubar.y))


def point_matrix(d: int, z: RingElem, zeta2) -> tuple:
    """The point above z (field coordinates) at height^2 zeta2, scaled by zeta."""
    return (z.norm() + zeta2, Fraction(1), Fraction(z.x), Fraction(z.y))


def vertex_matrix(d: int, vx: Vertex) -> tuple:
    """The spine vertex: the point W with B(P_v, W) = 1 for all its cusps."""
    rows = []
    half = Fraction(d, 2)
    n0 = (d * d - d) // 4
    for v in vx.vecs:
        p = cusp_matrix(v)
        rows.append([Fraction(p[1], 2), Fraction(p[0], 2), -(p[2] + half * p[3]), -(half * p[2] + n0 * p[3])])
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            for k in range(j + 1, len(rows)):
                for m in range(k + 1, len(rows)):
                    try:
                        W = tuple(solve_rational([rows[i], rows[j], rows[k], rows[m]], [1, 1, 1, 1]))
                    except SingularSystemError:
                        continue
                    if all(sum(r[t] * W[t] for t in range(4)) == 1 for r in rows):
                        return W
                    raise AssertionError("vertex cusps are not equidistant from one point")
    raise AssertionError("vertex cusps are degenerate")


# -- circle of the form ------------------------------------------------------------------

@dataclass
class Circle:
    center: complex
    radius: float
    pre: Mat2A  # identity unless a = 0 forced a change of variables

    def to_json(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "radius": self.radius}


def circle_of_form(f: HermitianForm) -> Circle:
    """The circle f(z, 1) = 0: center -conj(nu)/a, radius sqrt(Delta/|D|)/|a|."""
    d = f.d
    delta = f.disc()
    if delta <= 0:
        from .forms import NotIndefiniteError
        raise NotIndefiniteError("only indefinite forms have a circle")
    one, zero = RingElem(1, 0, d), RingElem(0, 0, d)
    pre = Mat2A(one, zero, zero, one)
    g = f
    if g.a == 0:
        for t in (one, RingElem.tau(d), one + RingElem.tau(d)):
            pre = Mat2A(one, zero, t, one)
            g = transform(f, pre)
            if g.a:
                break
    nubar = g.nu.num.conj() / RingElem.sqrt_d(d).conj()
    center = -nubar.embed() / g.a
    return Circle(center, math.sqrt(delta / -d) / abs(g.a), pre)


# -- projection ----------------------------------------------------------------------------

@dataclass
class Projection:
    d: int
    form: HermitianForm
    points: dict = field(default_factory=dict)   # vertex key -> DiskPoint
    klein: dict = field(default_factory=dict)    # vertex key -> (x, y)
    plane: dict = field(default_factory=dict)    # vertex key -> projected matrix (exact)
    cells: list = field(default_factory=list)    # [(cell key, [vertex keys]), (sign of first region)]
    invs: dict = field(default_factory=dict)     # vertex key -> inv
    edges: list = field(default_factory=list)
    interior: list = field(default_factory=list)

    def gram(self, k1, k2) -> float:
        """cosh of the distance between two projected vertices."""
        X, Y = self.plane[k1], self.plane[k2]
        d = self.d
        r = bform(d, X, Y) ** 2 / (bform(d, X, X) * bform(d, Y, Y))
        return math.sqrt(float(r))

    def angle(self, at, k1, k2) -> float:
        """The angle at ``at`` between the geodesics to k1 and k2."""
        g01, g02, g12 = self.gram(at, k1), self.gram(at, k2), self.gram(k1, k2)
        c = (g01 * g02 - g12) / math.sqrt((g01 * g01 - 1) * (g02 * g02 - 1))
        return math.acos(max(-1.0, min(1.0, c)))

    def cell_angles(self, vks) -> list[float]:
        n = len(vks)
        return [self.angle(vks[i], vks[i - 1], vks[(i + 1) % n]) for i in range(n)]

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"key": _key_json(k), "u": p.u, "v": p.v, "inv": self.invs[k]}
                for k, p in sorted(self.points.items(), key=lambda kv: (kv[1].u, kv[1].v))
            ],
            "cells": [[[self.points[k].u, self.points[k].v] for k in vks] for _, vks, _ in self.cells],
        }


def _key_json(k):
    return [list(v) for v in k]


def _frame(d: int, f: HermitianForm, N):
    """T0 (timelike) and E1, E2 spanning H_f, pairwise orthogonal, unnormalised."""
    nn = bform(d, N, N)

    def proj(X):
        return _lin((1, X), (-bform(d, X, N) / nn, N))

    if f.a:
        c0 = -(f.nu.num.conj() / RingElem.sqrt_d(d).conj()) / f.a
        X0 = point_matrix(d, c0, 1)
    else:
        X0 = (Fraction(1), Fraction(1), Fraction(0), Fraction(0))
    T0 = proj(X0)
    basis = [T0]
    for e in range(4):
        X = tuple(Fraction(int(i == e)) for i in range(4))
        Y = proj(X)
        for b in basis:
            Y = _lin((1, Y), (-bform(d, Y, b) / bform(d, b, b), b))
        if any(Y) and bform(d, Y, Y) != 0:
            basis.append(Y)
        if len(basis) == 3:
            break
    return proj, basis


def project_ocean(f: HermitianForm, graph: OceanGraph) -> Projection:
    """Nearest-point projection of the explored ocean into the Poincare disk of H_f.

    The disk is centred at the top of the hemisphere over the circle of f.
    """
    d = f.d
    N = form_normal(f)
    proj, (T0, E1, E2) = _frame(d, f, N)
    bt, b1, b2 = bform(d, T0, T0), bform(d, E1, E1), bform(d, E2, E2)
    out = Projection(d, f)
    F = Valued(f)
    for k, vx in sorted(graph.vertices.items()):
        P = proj(vertex_matrix(d, vx))
        pp = bform(d, P, P)
        if pp <= 0:
            raise AssertionError("projected vertex is not a point of H_f")
        al = bform(d, P, T0) / bt
        x1 = bform(d, P, E1) / b1
        x2 = bform(d, P, E2) / b2
        t = math.sqrt(float(al * al * bt / pp))
        u1 = math.copysign(math.sqrt(float(x1 * x1 * -b1 / pp)), x1)
        u2 = math.copysign(math.sqrt(float(x2 * x2 * -b2 / pp)), x2)
        out.plane[k] = P
        out.points[k] = DiskPoint(u1 / (1 + t), u2 / (1 + t))
        out.klein[k] = (u1 / t, u2 / t)
        out.invs[k] = F.inv(vx)
    for ck, (p, q, vks) in sorted(graph.cells.items()):
        out.cells.append((ck, list(vks), 1 if F.value(p) > 0 else -1))
    out.edges = sorted(graph.edges.values())
    out.interior = sorted(graph.interior_vertices())
    return out


# -- numeric checks of the projection ------------------------------------------------------

def rhombus_defect(pr: Projection, vks) -> float:
    """Largest deviation (radians) from a 90-60-90-60 rhombus with equal sides."""
    if len(vks) != 4:
        return math.inf
    ang = pr.cell_angles(vks)
    best = math.inf
    for shift in (0, 1):
        want = [math.pi / 2, math.pi / 3] * 2
        want = want[shift:] + want[:shift]
        best = min(best, max(abs(a - w) for a, w in zip(ang, want)))
    sides = [math.acosh(max(1.0, pr.gram(vks[i], vks[(i + 1) % 4]))) for i in range(4)]
    return max(best, max(sides) - min(sides))


def angle_sums(pr: Projection) -> dict:
    """Vertex key -> sum of cell angles there, for interior vertices."""
    acc = {k: 0.0 for k in pr.interior}
    for _, vks, _ in pr.cells:
        n = len(vks)
        for i, k in enumerate(vks):
            if k in acc:
                acc[k] += pr.angle(k, vks[i - 1], vks[(i + 1) % n])
    return acc


def cells_per_vertex(pr: Projection) -> dict:
    cnt = {k: 0 for k in pr.interior}
    for _, vks, _ in pr.cells:
        for k in vks:
            if k in cnt:
                cnt[k] += 1
    return cnt


def _ccw(poly):
    s = sum(poly[i][0] * poly[(i + 1) % len(poly)][1] - poly[(i + 1) % len(poly)][0] * poly[i][1] for i in range(len(poly)))
    return poly if s > 0 else poly[::-1]


def convex_overlap(P, Q) -> float:
    """Area of the intersection of two convex polygons."""
    poly = _ccw(list(P))
    Q = _ccw(list(Q))
    for i in range(len(Q)):
        (x1, y1), (x2, y2) = Q[i], Q[(i + 1) % len(Q)]
        # keep the left side of the directed edge
        cs, ct = (y2 - y1), -(x2 - x1)
        poly = clip(poly, cs, ct, cs * x1 + ct * y1)
        if len(poly) < 3:
            return 0.0
    return polygon_area(poly)


def max_overlap(pr: Projection) -> float:
    """Largest pairwise overlap of projected cells, measured in the Klein model."""
    polys = [[pr.klein[k] for k in vks] for _, vks, _ in pr.cells]
    boxes = [(min(x for x, _ in p), min(y for _, y in p), max(x for x, _ in p), max(y for _, y in p)) for p in polys]
    order = sorted(range(len(polys)), key=lambda i: boxes[i][0])
    worst = 0.0
    for a, i in enumerate(order):
        for j in order[a + 1:]:
            if boxes[j][0] >= boxes[i][2]:
                break
            if boxes[j][1] >= boxes[i][3] or boxes[i][1] >= boxes[j][3]:
                continue
            worst = max(worst, convex_overlap(polys[i], polys[j]))
    return worst


# -- SVG ------------------------------------------------------------------------------------

_PAL_POS = "#7fb3d5"
_PAL_NEG = "#f5b7b1"


def _svg(width: float, height: float, view: str, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:g}" height="{height:g}" viewBox="{view}">\n'
    )
    return head + "".join(line + "\n" for line in body) + "</svg>\n"


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def geodesic_path(p, q, threshold: float = 1e-4) -> str:
    """SVG path segment (after an initial M at p) for the disk geodesic p -> q.

    Coordinates are emitted with y flipped.
    """
    (x1, y1), (x2, y2) = p, q
    cross = x1 * y2 - y1 * x2
    if abs(cross) < 1e-12:
        return f"L {_f(x2)} {_f(-y2)}"
    # the circle through p, q orthogonal to the unit circle: |c|^2 = r^2 + 1
    # 2 c.p = |p|^2 + 1 and 2 c.q = |q|^2 + 1
    a1, a2 = (x1 * x1 + y1 * y1 + 1) / 2, (x2 * x2 + y2 * y2 + 1) / 2
    cx = (a1 * y2 - a2 * y1) / cross
    cy = (x1 * a2 - x2 * a1) / cross
    r = math.sqrt(max(cx * cx + cy * cy - 1, 0.0))
    if r == 0 or 1 / r < threshold:
        return f"L {_f(x2)} {_f(-y2)}"
    sweep = 1 if (x1 - cx) * (y2 - cy) - (y1 - cy) * (x2 - cx) < 0 else 0
    return f"A {_f(r)} {_f(r)} 0 0 {sweep} {_f(x2)} {_f(-y2)}"


def svg_ocean(pr: Projection | None, size: int = 800) -> str:
    body = ['<circle cx="0" cy="0" r="1" fill="white" stroke="black" stroke-width="0.004"/>']
    if pr is not None:
        for _, vks, sign in pr.cells:
            pts = [(pr.points[k].u, pr.points[k].v) for k in vks]
            segs = [f"M {_f(pts[0][0])} {_f(-pts[0][1])}"]
            for i in range(len(pts)):
                segs.append(geodesic_path(pts[i], pts[(i + 1) % len(pts)]))
            fill = _PAL_POS if sign > 0 else _PAL_NEG
            body.append(f'<path d="{" ".join(segs)} Z" fill="{fill}" stroke="black" stroke-width="0.002"/>')
        for k, p in sorted(pr.points.items(), key=lambda kv: (kv[1].u, kv[1].v)):
            inv = pr.invs[k]
            col = "#1f618d" if inv > 0 else ("#922b21" if inv < 0 else "#333333")
            body.append(f'<circle cx="{_f(p.u)}" cy="{_f(-p.v)}" r="0.004" fill="{col}"/>')
    return _svg(size, size, "-1.02 -1.02 2.04 2.04", body)


def svg_tiling(t: Tiling, size: int = 800) -> str:
    x0, y0, x1, y1 = t.window
    w, h = x1 - x0, y1 - y0
    body = []
    weights = sorted({round(s.weight, 9) for s, _ in t.cells}, reverse=True)
    shades = {wt: i for i, wt in enumerate(weights)}
    for site, poly in t.cells:
        level = shades[round(site.weight, 9)]
        grey = max(40, 235 - 28 * level)
        pts = " ".join(f"{_f(z.real)},{_f(-z.imag)}" for z in poly)
        body.append(f'<polygon points="{pts}" fill="rgb({grey},{grey},255)" stroke="black" stroke-width="{_f(w / 800)}"/>')
    view = f"{_f(x0)} {_f(-y1)} {_f(w)} {_f(h)}"
    return _svg(size, size * h / w, view, body)


def svg_topograph(f: QuadraticForm, depth: int = 4, size: int = 800) -> str:
    """Conway's topograph around the standard superbasis, regions labelled by f."""
    body = []
    labels = []
    u, v, w = STANDARD.vectors()
    L = 1.0

    def val(x: LaxVec) -> int:
        return f(x.m, x.n)

    def grow(lvl, start, ang, a, b, c, length):
        # edge between regions a and b, leaving ``start`` away from region c
        end = (start[0] + length * math.cos(ang), start[1] + length * math.sin(ang))
        body.append(
            f'<line x1="{_f(start[0])}" y1="{_f(-start[1])}" x2="{_f(end[0])}" y2="{_f(-end[1])}" '
            f'stroke="black" stroke-width="0.01"/>'
        )
        if lvl + 1 >= depth:
            return
        n = _other(a, b, c)
        spread = math.pi / 3 / (1 + 0.35 * lvl)
        labels.append((end[0] + 0.25 * length * math.cos(ang), end[1] + 0.25 * length * math.sin(ang), val(n)))
        # a is on the left of the edge direction
        grow(lvl + 1, end, ang + spread, a, n, b, length * 0.62)
        grow(lvl + 1, end, ang - spread, n, b, a, length * 0.62)

    centre = (0.0, 0.0)
    dirs = [math.pi / 2, math.pi / 2 + 2 * math.pi / 3, math.pi / 2 + 4 * math.pi / 3]
    # region w lies between the edges {u,v} and ..., label the three central regions
    grow(0, centre, dirs[0], u, v, w, L)
    grow(0, centre, dirs[1], v, w, u, L)
    grow(0, centre, dirs[2], w, u, v, L)
    for k, x in enumerate((v, w, u)):
        ang = dirs[k] + math.pi / 3
        labels.append((0.45 * math.cos(ang), 0.45 * math.sin(ang), val(x)))
    for x, y, t in labels:
        body.append(
            f'<text x="{_f(x)}" y="{_f(-y)}" font-size="0.09" text-anchor="middle" dominant-baseline="middle">{escape(str(t))}</text>'
        )
    return _svg(size, size, "-2.2 -2.2 4.4 4.4", body)
