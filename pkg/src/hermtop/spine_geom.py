"""Geometry of the spine in upper half-space at the cusp infinity.

Points of C are written z = s + t*tau with real (s, t); every line used for
the fundamental cell has rational coefficients in these coordinates, so the
cell polygons are computed exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forms import Cusp, SingularSystemError, solve_rational
from .ring import RingElem, check_disc, elements_up_to_norm, module_norm, units


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point3:
    z: complex
    zeta: float

    def __post_init__(self):
        if not self.zeta > 0:
            raise GeometryError("zeta must be positive")


def _cusp_pair(alpha):
    if isinstance(alpha, Cusp):
        return alpha.a, alpha.b, alpha.normN
    a, b = alpha
    return a, b, module_norm(a, b)


def cusp_distance(alpha, w: Point3) -> float:
    """d_alpha(w) = (N(b) (|z|^2 + zeta^2) - 2 Re(conj(a) b z) + N(a)) / (N(I) zeta)."""
    a, b, n = _cusp_pair(alpha)
    ae, be = a.embed(), b.embed()
    q = abs(w.z) ** 2 + w.zeta**2
    return (b.norm() * q - 2 * (ae.conjugate() * be * w.z).real + a.norm()) / (n * w.zeta)


class HoroballOverlapError(AssertionError):
    """N(ad - bc) < N(I) N(J): impossible for horoballs of the covering family."""


def horoballs_touch(alpha: Cusp, beta: Cusp) -> str:
    """'touch' when N(ad - bc) = N(I) N(J), 'disjoint' when larger."""
    a, b, n1 = _cusp_pair(alpha)
    c, d, n2 = _cusp_pair(beta)
    det = a * d - b * c
    if not det:
        raise GeometryError("the two cusps are equal")
    nd, ni = det.norm(), n1 * n2
    if nd == ni:
        return "touch"
    if nd > ni:
        return "disjoint"
    raise HoroballOverlapError(f"N(ad-bc) = {nd} < N(I)N(J) = {ni}")


# -- exact lines and convex clipping ------------------------------------------------

@dataclass(frozen=True)
class CellLine:
    """tr(z conj(a) b) = N(a) + N(b) - nI; the kept side contains 0."""

    a: RingElem
    b: RingElem
    nI: int

    def coefficients(self) -> tuple[Fraction, Fraction, int]:
        """(cs, ct, rhs) with cs*s + ct*t <= rhs."""
        w = self.a.conj() * self.b
        return _trace_coeffs(w) + (self.a.norm() + self.b.norm() - self.nI,)


def _trace_coeffs(w: RingElem) -> tuple:
    """tr(z w) = s tr(w) + t (D wx + (D^2 + D)/2 wy) for z = s + t tau."""
    d = w.d
    return (w.trace(), d * w.x + (d * d + d) // 2 * w.y)


def clip(poly: list, cs, ct, rhs) -> list:
    """Sutherland-Hodgman: keep cs*s + ct*t <= rhs (works on Fractions or floats)."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = cs * p[0] + ct * p[1] - rhs
        fq = cs * q[0] + ct * q[1] - rhs
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            lam = fp / (fp - fq)
            out.append((p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])))
    return out


def _tidy(poly: list) -> list:
    """Drop repeated and collinear vertices; rotate to start at the least vertex."""
    pts = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 0:
                pts.pop(i)
                changed = True
                break
    if not pts:
        return pts
    k = pts.index(min(pts))
    return pts[k:] + pts[:k]


def _tidy_float(poly: list, eps: float = 1e-12) -> list:
    """Merge vertices closer than eps and drop nearly straight corners."""
    pts = []
    for p in poly:
        if not pts or math.dist(pts[-1], p) > eps:
            pts.append(p)
    while len(pts) > 1 and math.dist(pts[0], pts[-1]) <= eps:
        pts.pop()
    k = 0
    while len(pts) >= 3 and k < len(pts):
        a, b, c = pts[k - 1], pts[k], pts[(k + 1) % len(pts)]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cross) <= eps * math.dist(a, c):
            pts.pop(k)
        else:
            k += 1
    return pts


def polygon_area(poly) -> float:
    n = len(poly)
    s = 0
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


@dataclass
class CellPolygon:
    d: int
    vertices: list  # [(s, t)] exact, counter-clockwise
    lines: list

    def complex_vertices(self) -> list[complex]:
        return [st_to_complex(self.d, s, t) for s, t in self.vertices]

    def area(self) -> float:
        # the map (s, t) -> z has Jacobian sqrt|D|/2
        return float(polygon_area(self.vertices)) * math.sqrt(-self.d) / 2

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "vertices_st": [[_jfrac(s), _jfrac(t)] for s, t in self.vertices],
            "vertices": [[z.real, z.imag] for z in self.complex_vertices()],
            "area": self.area(),
        }


def _jfrac(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else {"num": x.numerator, "den": x.denominator}


def st_to_complex(d: int, s, t) -> complex:
    return complex(float(s) + float(t) * d / 2, float(t) * math.sqrt(-d) / 2)


def complex_to_st(d: int, z: complex) -> tuple[float, float]:
    t = z.imag * 2 / math.sqrt(-d)
    return z.real - t * d / 2, t


def _start_box(d: int) -> list:
    S, T = 2 + abs(d), 2
    return [(Fraction(-S), Fraction(-T)), (Fraction(S), Fraction(-T)), (Fraction(S), Fraction(T)), (Fraction(-S), Fraction(T))]


def _intersect(d: int, lines: list[CellLine]) -> CellPolygon:
    poly = _start_box(d)
    for ln in lines:
        cs, ct, rhs = ln.coefficients()
        poly = clip(poly, cs, ct, rhs)
    return CellPolygon(d, _tidy(poly), lines)


def cell_lines(d: int) -> list[CellLine]:
    """Lines bounding the face between the regions of infinity and 0."""
    check_disc(d)
    nmax = max(1, int(math.floor(math.sqrt(-d / 3))))
    seen = set()
    lines = []
    for nI in range(1, nmax + 1):
        bound = Fraction(nI * -d, 2)
        elems = elements_up_to_norm(d, bound)
        for a in elems:
            for b in elems:
                if module_norm(a, b) != nI:
                    continue
                q = a / b
                k = (q.x, q.y)
                if k in seen:
                    continue
                seen.add(k)
                lines.append(CellLine(a, b, nI))
    return lines


def fundamental_cell(d: int) -> CellPolygon:
    return _intersect(d, cell_lines(d))


def voronoi_cell(d: int) -> CellPolygon:
    """{z : tr(z conj(a)) <= N(a) for all a != 0}: 0 is a nearest lattice point."""
    check_disc(d)
    one = RingElem(1, 0, d)
    lines = [CellLine(a, one, 1) for a in elements_up_to_norm(d, -d + 2)]
    return _intersect(d, lines)


# -- horosphere tilings (power diagrams) --------------------------------------------------

@dataclass(frozen=True)
class PowerSite:
    alpha: complex
    weight: float
    cusp: tuple  # (a, b) generators, for labelling

    def power(self, z: complex) -> float:
        return abs(z - self.alpha) ** 2 - self.weight


def _cusp_sites(d: int, window, margin: float = 1.05) -> list[PowerSite]:
    x0, y0, x1, y1 = window
    lo = complex(x0 - margin, y0 - margin)
    hi = complex(x1 + margin, y1 + margin)
    ratio_max = Fraction(-d, 2)  # N(b)/N(I) <= |D|/2
    bmax = math.sqrt(-d / 3) * (-d) / 2
    reach = max(abs(lo), abs(hi), abs(complex(lo.real, hi.imag)), abs(complex(hi.real, lo.imag)))
    zero = RingElem(0, 0, d)
    seen = {}
    bs = []
    for b in elements_up_to_norm(d, bmax):
        # one b per unit class
        key = min(((u * b).x, (u * b).y) for u in units(d))
        if key == (b.x, b.y):
            bs.append(b)
    for b in bs:
        nb = b.norm()
        amax = nb * reach * reach
        cands = [zero] + elements_up_to_norm(d, amax)
        be = b.embed()
        for a in cands:
            z = a.embed() / be
            if not (lo.real <= z.real <= hi.real and lo.imag <= z.imag <= hi.imag):
                continue
            # N(I) divides N(a) and N(b), so a small gcd rules the cusp out early
            if a and math.gcd(a.norm(), nb) * ratio_max < nb:
                continue
            q = a / b
            k = (q.x, q.y)
            nI = module_norm(a, b) if a else _norm_principal(b)
            r = Fraction(nb, nI)
            if r > ratio_max:
                continue
            if k not in seen or r < seen[k][0]:
                seen[k] = (r, z, (a, b))
    sites = [PowerSite(z, float(1 / r), ab) for k, (r, z, ab) in sorted(seen.items())]
    return sites


def _norm_principal(b: RingElem) -> int:
    return module_norm(RingElem(0, 0, b.d), b)


@dataclass
class Tiling:
    d: int
    window: tuple
    cells: list  # [(PowerSite, [complex vertices])]

    def total_area(self) -> float:
        return sum(polygon_area([(z.real, z.imag) for z in poly]) for _, poly in self.cells)

    def window_area(self) -> float:
        x0, y0, x1, y1 = self.window
        return (x1 - x0) * (y1 - y0)


def _power_cell(sites, i, neigh, box) -> list:
    si = sites[i]
    a = si.alpha
    poly = box
    for j in neigh:
        b = sites[j].alpha
        # |z-a|^2 - wa <= |z-b|^2 - wb  <=>  2 Re(z conj(b - a)) <= |b|^2 - |a|^2 - wb + wa
        cs, ct = 2 * (b - a).real, 2 * (b - a).imag
        rhs = abs(b) ** 2 - abs(a) ** 2 - sites[j].weight + si.weight
        poly = clip(poly, cs, ct, rhs)
        if len(poly) < 3:
            return []
    return poly


def horosphere_tiling(d: int, window) -> Tiling:
    """Power diagram of the cusp hemispheres, clipped to ``window`` = (x0, y0, x1, y1)."""
    check_disc(d)
    x0, y0, x1, y1 = (float(v) for v in window)
    if not (x1 > x0 and y1 > y0):
        raise GeometryError("degenerate window")
    sites = _cusp_sites(d, (x0, y0, x1, y1))
    pos = np.array([s.alpha for s in sites], dtype=complex)
    rad = np.sqrt(np.array([s.weight for s in sites], dtype=float))
    cells = []
    box = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    for i, si in enumerate(sites):
        # only hemispheres meeting this one can cut its cell
        dist = np.abs(pos - si.alpha)
        cand = np.nonzero(dist < rad + rad[i])[0]
        pw = dist[cand] ** 2 - rad[cand] ** 2
        neigh = [int(j) for j in cand[np.argsort(pw, kind="stable")] if j != i]
        poly = _power_cell(sites, i, neigh, box)
        # a power cell lies in its own disk; if not, the pruning was too eager
        if poly and max(abs(complex(x, y) - si.alpha) ** 2 for x, y in poly) > si.weight + 1e-9:
            order = np.argsort(dist**2 - rad**2, kind="stable")
            poly = _power_cell(sites, i, [int(j) for j in order if j != i], box)
        poly = _tidy_float(poly)
        if len(poly) >= 3 and polygon_area(poly) > 1e-15:
            cells.append((si, [complex(x, y) for x, y in poly]))
    return Tiling(d, (x0, y0, x1, y1), cells)


# -- vertices of the spine ------------------------------------------------------------------

def vertex_position(cusps) -> Point3:
    """The point equidistant from the given cusps (at least four).

    Equal distance K gives N(b) Q - tr(conj(a) b z) + N(a) = K N(I) with
    Q = |z|^2 + zeta^2. Writing z = s + t tau makes this linear in (Q, s, t, K)
    with integer coefficients, so the solve is exact.
    """
    cusps = list(cusps)
    if len(cusps) < 4:
        raise GeometryError("need at least four cusps to fix a point of H^3")
    rows, rhs = [], []
    d = None
    for c in cusps:
        a, b, n = _cusp_pair(c)
        d = a.d
        cs, ct = _trace_coeffs(a.conj() * b)
        rows.append([b.norm(), -cs, -ct, -n])
        rhs.append(-a.norm())
    sol = None
    for idx in itertools.combinations(range(len(rows)), 4):
        try:
            sol = solve_rational([rows[i] for i in idx], [rhs[i] for i in idx])
            break
        except SingularSystemError:
            continue
    if sol is None:
        raise GeometryError("cusps are degenerate (collinear or concyclic)")
    for r, y in zip(rows, rhs):
        if sum(Fraction(x) * v for x, v in zip(r, sol)) != y:
            raise GeometryError("no point is equidistant from all the cusps")
    Q, s, t, _ = sol
    # N(s + t tau) = s^2 + D s t + n0 t^2
    z2 = Q - (s * s + d * s * t + Fraction(d * d - d, 4) * t * t)
    if z2 <= 0:
        raise GeometryError("no common point above the boundary")
    return Point3(st_to_complex(d, s, t), math.sqrt(z2))


def cell_vertex_heights(d: int) -> list[float]:
    """zeta at each vertex of the fundamental cell (on the unit hemisphere over 0)."""
    out = []
    for z in fundamental_cell(d).complex_vertices():
        out.append(math.sqrt(max(0.0, 1 - abs(z) ** 2)))
    return out
