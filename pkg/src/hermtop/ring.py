"""Exact arithmetic in the order A = Z[tau] of Q(sqrt(D)), tau = (D + sqrt(D))/2.

Elements are stored in tau-coordinates ``x + y*tau`` so every structure
constant is an integer:  tau + conj(tau) = D  and  tau * conj(tau) = (D^2 - D)/4.
Coordinates may also be Fractions, in which case the element lives in the
field k = Q(sqrt(D)); ``is_integral`` tells the two apart.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

EUCLIDEAN_DISCS = (-3, -4, -7, -8, -11)


class DiscriminantError(ValueError):
    """Raised for a bad, mismatched or unsupported discriminant."""


def _squarefree(n: int) -> bool:
    n = abs(n)
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def is_fundamental(d: int) -> bool:
    if d >= 0:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def check_disc(d: int) -> int:
    """Return ``d`` if it is a negative fundamental discriminant, else raise."""
    if not isinstance(d, int) or not is_fundamental(d):
        raise DiscriminantError(f"{d!r} is not a negative fundamental discriminant")
    return d


def require_euclidean(d: int) -> None:
    if d not in EUCLIDEAN_DISCS:
        raise DiscriminantError(f"Z[tau] is not Euclidean for D={d}")


@dataclass(frozen=True, slots=True)
class RingElem:
    x: int | Fraction
    y: int | Fraction
    d: int

    # -- construction -----------------------------------------------------
    @classmethod
    def of(cls, value: int | RingElem, d: int) -> RingElem:
        if isinstance(value, RingElem):
            if value.d != d:
                raise DiscriminantError(f"discriminants differ: {value.d} vs {d}")
            return value
        return cls(value, 0, d)

    @classmethod
    def tau(cls, d: int) -> RingElem:
        return cls(0, 1, d)

    @classmethod
    def sqrt_d(cls, d: int) -> RingElem:
        """sqrt(D) = 2*tau - D."""
        return cls(-d, 2, d)

    def _coerce(self, other) -> RingElem:
        if isinstance(other, RingElem):
            if other.d != self.d:
                raise DiscriminantError(f"discriminants differ: {self.d} vs {other.d}")
            return other
        if isinstance(other, (int, Fraction)):
            return RingElem(other, 0, self.d)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if type(other) is RingElem and other.d == self.d:
            return RingElem(self.x + other.x, self.y + other.y, self.d)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElem(self.x + o.x, self.y + o.y, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElem(self.x - o.x, self.y - o.y, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return RingElem(-self.x, -self.y, self.d)

    def __mul__(self, other):
        if type(other) is RingElem and other.d == self.d:
            o = other
        else:
            o = self._coerce(other)
            if o is NotImplemented:
                return o
        d = self.d
        n0 = (d * d - d) // 4
        yy = self.y * o.y
        return RingElem(self.x * o.x - n0 * yy, self.x * o.y + self.y * o.x + d * yy, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division in the field k; the result may have Fraction coordinates."""
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in k")
        t = self * o.conj()
        return RingElem(_frac(t.x, n), _frac(t.y, n), self.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return (RingElem(1, 0, self.d) / self) ** (-k)
        out = RingElem(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return self.x != 0 or self.y != 0

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.d == other.d and self.x == other.x and self.y == other.y
        if isinstance(other, (int, Fraction)):
            return self.y == 0 and self.x == other
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y, self.d))

    # -- invariants -------------------------------------------------------
    def conj(self) -> RingElem:
        return RingElem(self.x + self.d * self.y, -self.y, self.d)

    def norm(self):
        d = self.d
        return self.x * self.x + d * self.x * self.y + ((d * d - d) // 4) * self.y * self.y

    def trace(self):
        return 2 * self.x + self.d * self.y

    @property
    def is_integral(self) -> bool:
        return _is_int(self.x) and _is_int(self.y)

    def integral(self) -> RingElem:
        """Return self with int coordinates; raise if it is not in A."""
        if not self.is_integral:
            raise ValueError(f"{self} is not an element of the order")
        return RingElem(int(self.x), int(self.y), self.d)

    def is_unit(self) -> bool:
        return self.is_integral and self.norm() == 1

    def embed(self) -> complex:
        d = self.d
        return complex(self.x + self.y * d / 2, self.y * math.sqrt(-d) / 2)

    def to_json(self) -> dict:
        return {"x": int(self.x), "y": int(self.y), "d": self.d}

    @classmethod
    def from_json(cls, obj: dict, d: int | None = None) -> RingElem:
        return cls(int(obj["x"]), int(obj["y"]), int(obj.get("d", d)))

    def __repr__(self):
        return f"RingElem({self.x}, {self.y}, d={self.d})"

    def __str__(self):
        if self.y == 0:
            return str(self.x)
        return f"{self.x}{'+' if self.y >= 0 else '-'}{abs(self.y)}t"


def _is_int(v) -> bool:
    return isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1)


def _frac(a, b):
    q = Fraction(a, 1) / b
    return int(q) if q.denominator == 1 else q


def arith(e1: RingElem, e2: RingElem, op: str) -> RingElem:
    if op == "add":
        return e1 + e2
    if op == "sub":
        return e1 - e2
    if op == "mul":
        return e1 * e2
    raise ValueError(f"unknown op {op!r}")


def conj(e: RingElem) -> RingElem:
    return e.conj()


def norm(e: RingElem):
    return e.norm()


def trace(e: RingElem):
    return e.trace()


def embed(e: RingElem) -> complex:
    return e.embed()


@lru_cache(maxsize=None)
def units(d: int) -> tuple[RingElem, ...]:
    """The unit group of A, generated by 2 + tau when D is -3 or -4."""
    one = RingElem(1, 0, d)
    if d in (-3, -4):
        g = RingElem(2, 1, d)
        order = 6 if d == -3 else 4
        out, u = [], one
        for _ in range(order):
            out.append(u)
            u = u * g
        return tuple(out)
    return (one, -one)


def canonical_associate(e: RingElem) -> tuple[RingElem, RingElem]:
    """Return ``(u*e, u)`` with u the unit maximising (trace, y) of ``u*e``.

    The chosen associate always has trace >= 0, and 1 is its own canonical
    associate.
    """
    d = e.d
    n0 = (d * d - d) // 4
    ex, ey = e.x, e.y
    best = None
    for u in units(d):
        ux, uy = u.x, u.y
        cy = ux * ey + uy * ex + d * uy * ey
        cx = ux * ex - n0 * uy * ey
        key = (2 * cx + d * cy, cy)
        if best is None or key > best[0]:
            best = (key, cx, cy, u)
    return RingElem(best[1], best[2], d), best[3]


def nearest(z: RingElem) -> RingElem:
    """Lattice point of A nearest to the field element z (ties: smallest (x, y))."""
    d = z.d
    zx, zy = Fraction(z.x), Fraction(z.y)
    best = None
    y0 = math.floor(zy)
    for y in range(y0 - 1, y0 + 3):
        # real part of z - (x + y tau) is zx - x + (zy - y) * D/2
        xr = zx + (zy - y) * Fraction(d, 2)
        x0 = math.floor(xr)
        for x in range(x0 - 1, x0 + 3):
            n = (z - RingElem(x, y, d)).norm()
            key = (n, x, y)
            if best is None or key < best:
                best = key
    return RingElem(best[1], best[2], d)


def euclid_div(a: RingElem, b: RingElem) -> tuple[RingElem, RingElem]:
    require_euclidean(a.d)
    b = a._coerce(b)
    if not b:
        raise ZeroDivisionError("euclid_div by zero")
    q = nearest(a / b)
    r = a - q * b
    assert r.norm() < b.norm()
    return q, r


def gcd(a: RingElem, b: RingElem) -> RingElem:
    """Greatest common divisor, normalised by :func:`canonical_associate`."""
    require_euclidean(a.d)
    b = a._coerce(b)
    while b:
        _, r = euclid_div(a, b)
        a, b = b, r
    if not a:
        return a
    return canonical_associate(a)[0]


def xgcd(a: RingElem, b: RingElem) -> tuple[RingElem, RingElem, RingElem]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) (not normalised)."""
    require_euclidean(a.d)
    d = a.d
    b = a._coerce(b)
    r0, r1 = a, b
    s0, s1 = RingElem(1, 0, d), RingElem(0, 0, d)
    t0, t1 = RingElem(0, 0, d), RingElem(1, 0, d)
    while r1:
        q, r = euclid_div(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def _lattice_index(rows) -> int:
    """Index in Z^2 of the lattice spanned by integer ``rows``.

    Row-reduces to Hermite normal form: a pivot (g1, p) with g1 the gcd of the
    first column, every row reduced against it to (0, *), then g2 the gcd of
    the remaining second column.  The index is g1 * g2.
    """
    rows = [(int(r[0]), int(r[1])) for r in rows]
    g1, p = 0, 0
    for x, y in rows:
        if x == 0:
            continue
        if g1 == 0:
            g1, p = (x, y) if x > 0 else (-x, -y)
            continue
        g, s, t = _ext_gcd(g1, x)
        g1, p = g, s * p + t * y
    if g1 == 0:
        raise ValueError("generators do not span a rank-2 lattice")
    g2 = 0
    for x, y in rows:
        g2 = math.gcd(g2, y - (x // g1) * p)
    if g2 == 0:
        raise ValueError("generators do not span a rank-2 lattice")
    return g1 * g2


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def module_norm(a: RingElem, b: RingElem) -> int:
    """Index [A : I] of the ideal I = aA + bA, via Hermite normal form."""
    b = a._coerce(b)
    if not a and not b:
        raise ValueError("module_norm of (0, 0)")
    tau = RingElem.tau(a.d)
    rows = []
    for e in (a, tau * a, b, tau * b):
        e = e.integral()
        rows.append((e.x, e.y))
    return _lattice_index(rows)


def elements_up_to_norm(d: int, bound) -> list[RingElem]:
    """All elements of A with 0 < N(e) <= bound, in a deterministic order."""
    out = []
    # |Im| = |y| sqrt|D|/2 <= sqrt(bound)
    ymax = int(math.isqrt(int(4 * bound // -d) + 1)) + 1
    for y in range(-ymax, ymax + 1):
        # |x + yD/2| <= sqrt(bound)
        c = -y * d / 2
        r = math.sqrt(bound) + 1
        for x in range(math.floor(c - r), math.ceil(c + r) + 1):
            e = RingElem(x, y, d)
            n = e.norm()
            if 0 < n <= bound:
                out.append(e)
    out.sort(key=lambda e: (e.norm(), e.x, e.y))
    return out


def all_pairs(d: int, box: int):
    """Elements with |x|, |y| <= box (helper for brute-force checks)."""
    return [RingElem(x, y, d) for x, y in product(range(-box, box + 1), repeat=2)]


@dataclass(frozen=True, slots=True)
class DualElem:
    """An element nu = num / sqrt(D) of the dual lattice A*."""

    num: RingElem

    @property
    def d(self) -> int:
        return self.num.d

    def trace_with(self, gamma: RingElem):
        """tr(nu * gamma); equals the tau-coordinate of num * gamma."""
        return (self.num * gamma).y

    def norm(self) -> Fraction:
        return Fraction(self.num.norm()) / -self.d

    def to_complex(self) -> complex:
        return self.num.embed() / cmath.sqrt(self.d)

    def to_json(self) -> dict:
        return {"num": self.num.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> DualElem:
        return cls(RingElem.from_json(obj["num"]))
