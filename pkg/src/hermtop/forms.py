"""Integral binary quadratic forms over Z and hermitian forms over Q(sqrt(D))."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .ring import (
    DiscriminantError,
    DualElem,
    RingElem,
    canonical_associate,
    check_disc,
    gcd,
    module_norm,
    units,
    EUCLIDEAN_DISCS,
)


class DegenerateFormError(ValueError):
    """The form has discriminant zero."""


class IsotropicFormError(ValueError):
    """The form represents zero, so it has no river/ocean."""


class NotIndefiniteError(ValueError):
    pass


class SingularSystemError(ValueError):
    pass


# -- quadratic forms over Z ----------------------------------------------------

@dataclass(frozen=True, slots=True)
class QuadraticForm:
    """a m^2 + b2 m n + c n^2, i.e. a x^2 + 2h xy + c y^2 with b2 = 2h."""

    a: int
    b2: int
    c: int

    def __call__(self, m: int, n: int) -> int:
        return self.a * m * m + self.b2 * m * n + self.c * n * n

    def disc(self) -> int:
        return self.b2 * self.b2 - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b2, self.c) == 1

    def to_json(self) -> dict:
        return {"a": self.a, "b2": self.b2, "c": self.c}


def qeval(f: QuadraticForm, m: int, n: int) -> int:
    return f(m, n)


def qdisc(f: QuadraticForm) -> int:
    return f.disc()


# -- hermitian forms ---------------------------------------------------------

Vec = tuple  # pair (x, y) of RingElem


@dataclass(frozen=True, slots=True)
class HermitianForm:
    """f(x, y) = a N(x) + c N(y) + tr(nu x conj(y)), Gram matrix (a nu; conj(nu) c).

    ``nu`` is stored as ``num / sqrt(D)``.  Integral forms have int ``a``, ``c``
    and ``num`` in A; rational Gram data (Fractions) is allowed as well.
    """

    d: int
    a: int | Fraction
    c: int | Fraction
    nu: DualElem

    @classmethod
    def make(cls, d: int, a, c, num: RingElem | tuple) -> HermitianForm:
        if not isinstance(num, RingElem):
            num = RingElem(num[0], num[1], d)
        if num.d != d:
            raise DiscriminantError(f"nu lives over D={num.d}, form over D={d}")
        return cls(d, a, c, DualElem(num))

    @property
    def num(self) -> RingElem:
        return self.nu.num

    def __call__(self, x, y):
        d = self.d
        x = RingElem.of(x, d)
        y = RingElem.of(y, d)
        return self.a * x.norm() + self.c * y.norm() + self.nu.trace_with(x * y.conj())

    def value(self, v: Vec):
        return self(v[0], v[1])

    def scaled_pairing(self, u: Vec, v: Vec) -> RingElem:
        """sqrt(D) * B(u, v) where B is the sesquilinear form u^T M conj(v)."""
        d = self.d
        s = RingElem.sqrt_d(d)
        u1, u2 = u
        v1, v2 = (RingElem.of(v[0], d).conj(), RingElem.of(v[1], d).conj())
        return s * (self.a * (u1 * v1) + self.c * (u2 * v2)) + self.num * u1 * v2 - self.num.conj() * u2 * v1

    def disc(self):
        """Delta = D (a c - N(nu)) = D a c + N(num)."""
        return self.d * self.a * self.c + self.num.norm()

    @property
    def is_integral(self) -> bool:
        return (
            isinstance(self.a, int) or Fraction(self.a).denominator == 1
        ) and (isinstance(self.c, int) or Fraction(self.c).denominator == 1) and self.num.is_integral

    def integral(self) -> HermitianForm:
        if not self.is_integral:
            raise ValueError("form is not integral")
        n = self.num.integral()
        return HermitianForm(self.d, int(self.a), int(self.c), DualElem(n))

    def content(self) -> int:
        f = self.integral()
        return reduce(math.gcd, (f.a, f.c, f.num.x, f.num.y))

    def is_primitive(self) -> bool:
        return self.content() == 1

    def scale(self, k) -> HermitianForm:
        return HermitianForm(self.d, self.a * k, self.c * k, DualElem(self.num * k))

    def __neg__(self):
        return self.scale(-1)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "a": _json_num(self.a),
            "c": _json_num(self.c),
            "nu": {"x": _json_num(self.num.x), "y": _json_num(self.num.y)},
        }

    @classmethod
    def from_json(cls, obj: dict, d: int | None = None) -> HermitianForm:
        d = int(obj.get("d", d))
        check_disc(d)
        nu = obj["nu"]
        if "num" in nu:
            nu = nu["num"]
        return cls.make(d, int(obj["a"]), int(obj["c"]), (int(nu["x"]), int(nu["y"])))

    def gram_complex(self) -> tuple[complex, complex, complex]:
        """(a, nu, c) as floats/complex, for geometry."""
        return float(self.a), self.nu.to_complex(), float(self.c)


def _json_num(v):
    if isinstance(v, Fraction) and v.denominator != 1:
        return {"num": v.numerator, "den": v.denominator}
    return int(v)


def heval(f: HermitianForm, x, y):
    return f(x, y)


def hdisc(f: HermitianForm):
    return f.disc()


def is_indefinite(f: HermitianForm) -> bool:
    delta = f.disc()
    if delta == 0:
        raise DegenerateFormError("discriminant is zero")
    return delta > 0


# -- matrices over A ----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Mat2A:
    """The 2x2 matrix (p q; r s) over A; acts on column vectors."""

    p: RingElem
    q: RingElem
    r: RingElem
    s: RingElem

    @classmethod
    def identity(cls, d: int) -> Mat2A:
        one, zero = RingElem(1, 0, d), RingElem(0, 0, d)
        return cls(one, zero, zero, one)

    @classmethod
    def of(cls, d: int, p, q, r, s) -> Mat2A:
        return cls(*(RingElem.of(e, d) if not isinstance(e, tuple) else RingElem(e[0], e[1], d)
                     for e in (p, q, r, s)))

    @classmethod
    def from_columns(cls, c1: Vec, c2: Vec) -> Mat2A:
        return cls(c1[0], c2[0], c1[1], c2[1])

    @property
    def d(self) -> int:
        return self.p.d

    def det(self) -> RingElem:
        return self.p * self.s - self.q * self.r

    def is_invertible(self) -> bool:
        return all(e.is_integral for e in (self.p, self.q, self.r, self.s)) and self.det().is_unit()

    def __matmul__(self, o: Mat2A) -> Mat2A:
        return Mat2A(
            self.p * o.p + self.q * o.r,
            self.p * o.q + self.q * o.s,
            self.r * o.p + self.s * o.r,
            self.r * o.q + self.s * o.s,
        )

    def inverse(self) -> Mat2A:
        dt = self.det()
        if not dt:
            raise ZeroDivisionError("singular matrix")
        return Mat2A(self.s / dt, -self.q / dt, -self.r / dt, self.p / dt)

    def scale(self, u: RingElem) -> Mat2A:
        return Mat2A(self.p * u, self.q * u, self.r * u, self.s * u)

    def apply(self, v: Vec) -> Vec:
        x, y = v
        return (self.p * x + self.q * y, self.r * x + self.s * y)

    def columns(self) -> tuple[Vec, Vec]:
        return (self.p, self.r), (self.q, self.s)

    def is_scalar(self) -> bool:
        return not self.q and not self.r and self.p == self.s

    def projective_key(self) -> tuple:
        """A key equal for g and u*g (u a unit)."""
        best = None
        for u in units(self.d):
            m = self.scale(u)
            k = tuple(int(c) for e in (m.p, m.q, m.r, m.s) for c in (e.x, e.y))
            if best is None or k < best:
                best = k
        return best

    def to_json(self) -> list:
        return [[self.p.to_json(), self.q.to_json()], [self.r.to_json(), self.s.to_json()]]

    @classmethod
    def from_json(cls, obj) -> Mat2A:
        (p, q), (r, s) = obj
        return cls(*(RingElem.from_json(e) for e in (p, q, r, s)))


def transform(f: HermitianForm, g: Mat2A) -> HermitianForm:
    """The pull-back f o g, with Gram matrix g^T M conj(g)."""
    if not g.is_invertible():
        raise ValueError("transform needs g in GL2(A): determinant is not a unit")
    c1, c2 = g.columns()
    return HermitianForm(f.d, f.value(c1), f.value(c2), DualElem(f.scaled_pairing(c1, c2)))


# -- cusps -----------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Cusp:
    """A point a/b of P^1(k), carried by a generator pair and N(aA + bA)."""

    a: RingElem
    b: RingElem
    normN: int

    @classmethod
    def from_pair(cls, a, b, d: int | None = None) -> Cusp:
        if d is None:
            d = a.d if isinstance(a, RingElem) else b.d
        a, b = RingElem.of(a, d), RingElem.of(b, d)
        if not a and not b:
            raise ValueError("(0, 0) is not a cusp")
        if d in EUCLIDEAN_DISCS:
            g = gcd(a, b)
            a, b = (a / g).integral(), (b / g).integral()
        _, u = canonical_associate(b if b else a)
        a, b = a * u, b * u
        return cls(a, b, module_norm(a, b))

    @classmethod
    def infinity(cls, d: int) -> Cusp:
        return cls.from_pair(1, 0, d)

    @classmethod
    def zero(cls, d: int) -> Cusp:
        return cls.from_pair(0, 1, d)

    @property
    def d(self) -> int:
        return self.a.d

    @property
    def is_infinite(self) -> bool:
        return not self.b

    def ratio(self) -> RingElem | None:
        """a/b as a field element, or None for infinity."""
        return None if self.is_infinite else self.a / self.b

    def point(self) -> complex | None:
        return None if self.is_infinite else self.a.embed() / self.b.embed()

    def key(self):
        r = self.ratio()
        return ("inf",) if r is None else (r.x, r.y)

    def weight(self) -> Fraction:
        """N(I)/N(b): squared radius of the hemisphere equidistant from this cusp and infinity."""
        return Fraction(self.normN, self.b.norm())


def cusp_value(f: HermitianForm, alpha: Cusp) -> Fraction:
    return Fraction(f(alpha.a, alpha.b)) / alpha.normN


# -- Hilbert symbols and anisotropy ---------------------------------------------

def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _split(n: int, p: int) -> tuple[int, int]:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k, n


def hilbert_symbol(a: int, b: int, p) -> int:
    """The Hilbert symbol (a, b)_p for nonzero integers and p prime or ``'inf'``."""
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p in ("inf", math.inf, 0):
        return -1 if a < 0 and b < 0 else 1
    if p == 2:
        al, u = _split(a, 2)
        be, v = _split(b, 2)
        eps = lambda t: ((t - 1) // 2) % 2
        omega = lambda t: ((t * t - 1) // 8) % 2
        e = eps(u) * eps(v) + al * omega(v) + be * omega(u)
        return -1 if e % 2 else 1
    al, u = _split(a, p)
    be, v = _split(b, p)
    sign = -1 if (al * be * ((p - 1) // 2)) % 2 else 1
    return sign * _legendre(u, p) ** be * _legendre(v, p) ** al


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def disc_is_anisotropic(d: int, delta: int) -> bool:
    """Whether forms of discriminant delta over Q(sqrt(d)) never represent 0."""
    if delta == 0:
        raise DegenerateFormError("discriminant is zero")
    return any(hilbert_symbol(d, delta, p) == -1 for p in prime_factors(2 * d * delta))


def is_anisotropic(f: HermitianForm) -> bool:
    delta = f.disc()
    if delta == 0:
        raise DegenerateFormError("discriminant is zero")
    delta = Fraction(delta)
    # scale a rational discriminant by a square (a norm) to make it integral
    delta_int = delta.numerator * delta.denominator
    return disc_is_anisotropic(f.d, delta_int)


# -- reconstruction from four values ------------------------------------------

def solve_rational(mat: list[list], rhs: list) -> list[Fraction]:
    """Exact Gaussian elimination; raises SingularSystemError."""
    n = len(mat)
    m = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            raise SingularSystemError("linear system is singular")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [v / pv for v in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                fac = m[i][col]
                m[i] = [vi - fac * vc for vi, vc in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def _normalize(v: Fraction):
    return v.numerator if v.denominator == 1 else v


def reconstruct_form(pts: Sequence[Cusp], vals: Sequence) -> HermitianForm:
    """The unique hermitian form with F(pts[i]) = vals[i].

    The unknowns (a, c, num.x, num.y) enter f(x, y) linearly; the system is
    singular exactly when the four cusps lie on a common circle or line.
    """
    if len(pts) != 4 or len(vals) != 4:
        raise ValueError("need exactly four cusps and four values")
    d = pts[0].d
    rows, rhs = [], []
    for alpha, val in zip(pts, vals):
        x, y = alpha.a, alpha.b
        w = x * y.conj()
        # y-coordinate of (nx + ny tau)(wx + wy tau)
        rows.append([x.norm(), y.norm(), w.y, w.x + d * w.y])
        rhs.append(Fraction(val) * alpha.normN)
    a, c, nx, ny = solve_rational(rows, rhs)
    return HermitianForm.make(d, _normalize(a), _normalize(c), RingElem(_normalize(nx), _normalize(ny), d))
