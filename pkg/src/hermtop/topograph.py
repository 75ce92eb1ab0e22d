"""Conway's topograph for integral binary quadratic forms over Z."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .forms import IsotropicFormError, NotIndefiniteError, QuadraticForm


@dataclass(frozen=True, order=True)
class LaxVec:
    """A primitive vector up to sign, with m > 0, or m = 0 and n = 1."""

    m: int
    n: int

    @classmethod
    def of(cls, m: int, n: int) -> LaxVec:
        if math.gcd(m, n) != 1:
            raise ValueError(f"({m}, {n}) is not primitive")
        if m < 0 or (m == 0 and n < 0):
            m, n = -m, -n
        return cls(m, n)

    def __add__(self, o: LaxVec):
        return (self.m + o.m, self.n + o.n)

    def __sub__(self, o: LaxVec):
        return (self.m - o.m, self.n - o.n)


def _det(u: LaxVec, v: LaxVec) -> int:
    return u.m * v.n - u.n * v.m


@dataclass(frozen=True)
class SuperBasis:
    u: LaxVec
    v: LaxVec
    w: LaxVec

    def __post_init__(self):
        for a, b in ((self.u, self.v), (self.v, self.w), (self.u, self.w)):
            if abs(_det(a, b)) != 1:
                raise ValueError("not a lax superbasis")

    def vectors(self) -> tuple[LaxVec, LaxVec, LaxVec]:
        return (self.u, self.v, self.w)


STANDARD = SuperBasis(LaxVec(1, 0), LaxVec(0, 1), LaxVec(1, 1))


def vertex_values(f: QuadraticForm, sb: SuperBasis) -> tuple[int, int, int]:
    return tuple(f(x.m, x.n) for x in sb.vectors())


def vertex_disc(a: int, b: int, c: int) -> int:
    return a * a + b * b + c * c - 2 * a * b - 2 * b * c - 2 * a * c


def _other(u: LaxVec, v: LaxVec, w: LaxVec) -> LaxVec:
    """The fourth region at the edge {u, v}: u - v if w = ±(u + v), else u + v."""
    s = u + v
    if LaxVec.of(*s) == w:
        return LaxVec.of(*(u - v))
    return LaxVec.of(*s)


def edge_step(f: QuadraticForm, sb: SuperBasis, which: int) -> SuperBasis:
    """Cross the edge formed by the two vectors other than ``sb[which]``."""
    vs = list(sb.vectors())
    keep = [vs[i] for i in range(3) if i != which]
    vs[which] = _other(keep[0], keep[1], vs[which])
    return SuperBasis(*vs)


def edge_inv(f: QuadraticForm, u: LaxVec, v: LaxVec) -> int:
    return f(u.m, u.n) + f(v.m, v.n)


@dataclass
class RiverResult:
    period: list  # [((a, b), 'L' | 'R')]: edge labels a < 0 < b and the turn taken
    automorph: tuple  # ((p, q), (r, s)), determinant 1
    min_abs: int
    min_vec: LaxVec
    descent: int = 0
    river_values: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "period": [{"label": list(lab), "turn": t} for lab, t in self.period],
            "automorph": [list(r) for r in self.automorph],
            "min_abs": self.min_abs,
            "min_vec": [self.min_vec.m, self.min_vec.n],
            "period_length": len(self.period),
        }


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def check_river_form(f: QuadraticForm) -> None:
    disc = f.disc()
    if disc <= 0:
        raise NotIndefiniteError(f"discriminant {disc} <= 0: no river")
    if _is_square(disc):
        raise IsotropicFormError(f"discriminant {disc} is a square: the form represents 0")


def descend(f: QuadraticForm, sb: SuperBasis = STANDARD) -> tuple[SuperBasis, int]:
    """Replace the largest |value| until the values have mixed signs."""
    steps = 0
    while True:
        vals = vertex_values(f, sb)
        if min(vals) < 0 < max(vals):
            return sb, steps
        top = max(abs(x) for x in vals)
        i = min((i for i in range(3) if abs(vals[i]) == top), key=lambda i: sb.vectors()[i])
        nxt = edge_step(f, sb, i)
        if max(abs(x) for x in vertex_values(f, nxt)) >= top:
            raise NotIndefiniteError("descent stalled: the form has a well and is definite")
        sb = nxt
        steps += 1


def trace_river(f: QuadraticForm) -> RiverResult:
    check_river_form(f)
    sb, steps = descend(f)
    vals = vertex_values(f, sb)
    vs = sb.vectors()
    # candidates for the minimum: this superbasis first, then the river regions
    best = min(range(3), key=lambda i: (abs(vals[i]), i))
    min_abs, min_vec = abs(vals[best]), vs[best]
    neg = next(i for i in range(3) if vals[i] < 0)
    pos = next(i for i in range(3) if vals[i] > 0)
    n = (vs[neg].m, vs[neg].n)
    p = (vs[pos].m, vs[pos].n)
    if n[0] * p[1] - n[1] * p[0] == -1:
        p = (-p[0], -p[1])
    A, C = vals[neg], vals[pos]
    B2 = f(n[0] + p[0], n[1] + p[1]) - A - C
    start = (A, B2, C)
    n0, p0 = n, p
    period = []
    river_values = []
    state = start
    while True:
        A, B2, C = state
        river_values.append((A, C))
        s = A + B2 + C
        if s > 0:
            p = (n[0] + p[0], n[1] + p[1])
            state = (A, 2 * A + B2, s)
            turn = "L"
        else:
            n = (n[0] + p[0], n[1] + p[1])
            state = (s, B2 + 2 * C, C)
            turn = "R"
        period.append(((A, C), turn))
        if abs(s) < min_abs:
            min_abs = abs(s)
            min_vec = LaxVec.of(*(p if s > 0 else n))
        if state == start:
            break
    # g maps (n0, p0) to (n, p): g = [n p][n0 p0]^-1, and [n0 p0] has det 1
    a, b = n0[0], p0[0]
    c, d = n0[1], p0[1]
    inv = ((d, -b), (-c, a))
    M = ((n[0], p[0]), (n[1], p[1]))
    g = tuple(
        tuple(sum(M[i][k] * inv[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )
    return RiverResult(period, g, min_abs, min_vec, steps, river_values)


def so_generator(f: QuadraticForm) -> tuple:
    return trace_river(f).automorph


def apply_quadratic(f: QuadraticForm, g) -> QuadraticForm:
    """f o g for an integer matrix g."""
    (p, q), (r, s) = g
    a = f(p, r)
    c = f(q, s)
    b2 = f(p + q, r + s) - a - c
    return QuadraticForm(a, b2, c)


def brute_min_abs(f: QuadraticForm, box: int = 100) -> int:
    best = None
    for m in range(-box, box + 1):
        for n in range(-box, box + 1):
            if m or n:
                v = abs(f(m, n))
                if best is None or v < best:
                    best = v
    return best


def topograph_tree(f: QuadraticForm, depth: int):
    """Edges of the topograph around the standard superbasis, to the given depth.

    Yields (level, left region, right region) triples; each edge separates the
    two regions named.
    """
    out = []
    start = STANDARD
    u, v, w = start.vectors()
    stack = [(0, u, v, w), (0, v, w, u), (0, w, u, v)]
    while stack:
        lvl, a, b, c = stack.pop()
        out.append((lvl, a, b))
        if lvl + 1 >= depth:
            continue
        nxt = _other(a, b, c)
        stack.append((lvl + 1, a, nxt, b))
        stack.append((lvl + 1, nxt, b, a))
    return out
