"""Classes of integral hermitian forms of fixed discriminant over Z[i] and Z[rho].

Indefinite anisotropic forms are compared through their oceans: a candidate
is equivalent to a known class when a vertex of its ocean maps onto one of
the class's vertex-orbit representatives by a value-preserving g.  Positive
definite forms are compared by matching bases of vectors with the right
values.  Both tests produce an explicit g, so merging is never guessed.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .forms import (
    DegenerateFormError,
    HermitianForm,
    Mat2A,
    disc_is_anisotropic,
    transform,
)
from .ring import RingElem, canonical_associate, elements_up_to_norm, nearest, units
from . import spine

# squared covering radius of the lattice A in C
COVERING_R2 = {-3: Fraction(1, 3), -4: Fraction(1, 2)}


def _norm_elements(d: int, n: int) -> list[RingElem]:
    if n == 0:
        return [RingElem(0, 0, d)]
    return [e for e in elements_up_to_norm(d, n) if e.norm() == n]


def _up_to_units(es):
    seen = {}
    for e in es:
        c = canonical_associate(e)[0] if e else e
        seen.setdefault((c.x, c.y), c)
    return [seen[k] for k in sorted(seen)]


# -- positive definite forms ------------------------------------------------------------

def vectors_of_value(f: HermitianForm, k: int) -> list[tuple]:
    """All (x, y) in A^2 with f(x, y) = k, for positive definite f."""
    d = f.d
    a = f.a
    delta = -f.disc()  # > 0
    if a <= 0 or delta <= 0:
        raise ValueError("vectors_of_value needs a positive definite form")
    # f = a N(x + conj(nu) y / a) + (delta / (|D| a)) N(y)
    ybound = Fraction(k * -d * a, delta)
    ys = [RingElem(0, 0, d)] + elements_up_to_norm(d, ybound)
    nubar = f.nu.num.conj() / RingElem.sqrt_d(d).conj()
    out = []
    xr = math.sqrt(k / a) + 1
    ts = [RingElem(0, 0, d)] + elements_up_to_norm(d, xr * xr)
    for y in ys:
        c0 = -(nubar * y) / a
        n0 = nearest(c0)
        for t in ts:
            x = n0 + t
            if f(x, y) == k:
                out.append((x, y))
    return out


def definite_equivalence(f: HermitianForm, g: HermitianForm) -> Mat2A | None:
    """Some h in GL2(A) with f o h = g, or None."""
    if f.d != g.d or f.disc() != g.disc():
        return None
    xs = vectors_of_value(f, g.a)
    ys = vectors_of_value(f, g.c)
    for x in xs:
        for y in ys:
            h = Mat2A.from_columns(x, y)
            if h.det().is_unit() and transform(f, h) == g:
                return h
    return None


def _definite_candidates(d: int, delta: int) -> list[HermitianForm]:
    r2 = COVERING_R2[d]
    amax = math.isqrt(int(Fraction(-delta) / (-d * (1 - r2)))) + 1
    out = []
    for a in range(1, amax + 1):
        nmax = int(-d * a * a * r2)
        nums = [RingElem(0, 0, d)] + elements_up_to_norm(d, nmax)
        for num in _up_to_units(nums):
            top = num.norm() - delta
            if top % (-d * a):
                continue
            c = top // (-d * a)
            if c < a:
                continue
            f = HermitianForm(d, a, c, spine_dual(num))
            assert f.disc() == delta
            out.append(f)
    return out


def spine_dual(num: RingElem):
    from .ring import DualElem
    return DualElem(num)


# -- indefinite forms -------------------------------------------------------------------

def _indefinite_candidates(d: int, delta: int) -> list[HermitianForm]:
    out = []
    for a in range(1, delta + 1):
        for c in range(-1, -delta - 1, -1):
            rest = delta + d * a * (-c)  # N(num) = delta - |D| a |c|
            if rest < 0:
                break
            for num in _up_to_units(_norm_elements(d, rest)):
                out.append(HermitianForm(d, a, c, spine_dual(num)))
    return out


@dataclass
class FormClass:
    form: HermitianForm
    reps: list = field(default_factory=list)
    buckets: dict = field(default_factory=dict)
    minimum: int = 0

    @property
    def content(self) -> int:
        return self.form.content()

    def to_json(self) -> dict:
        return {"form": self.form.to_json(), "minimum": self.minimum, "content": self.content}


def _seed(f: HermitianForm) -> spine.Vertex:
    d = f.d
    e1, e2 = spine.vec(d, 1, 0), spine.vec(d, 0, 1)
    return spine.vertex_from(e1, e2, RingElem(1, 0, d))


def indefinite_equivalent(f: HermitianForm, cls: FormClass) -> Mat2A | None:
    """g with cls.form o g = f, via the ocean vertex orbits of the class."""
    Ff = spine.Valued(f)
    Fc = spine.Valued(cls.form)
    v = _seed(f) if spine.is_ocean_vertex(Ff, _seed(f)) else spine.seek_ocean(f)
    sig = tuple(sorted(Ff.labels(v)))
    for r in cls.buckets.get(sig, ()):
        g = spine.find_maps(f, v, cls.form, r, first=True, Fs=Ff, Fd=Fc)
        if g:
            return g[0]
    return None


def _new_indefinite_class(f: HermitianForm) -> FormClass:
    F = spine.Valued(f)
    seed = _seed(f) if spine.is_ocean_vertex(F, _seed(f)) else spine.seek_ocean(f)
    od = spine.vertex_orbits(f, seed)
    cls = FormClass(f, od.reps)
    for r, lab in zip(od.reps, od.labels):
        cls.buckets.setdefault(tuple(sorted(lab)), []).append(r)
    cls.minimum = min(abs(x) for lab in od.labels for x in lab)
    return cls


def classify(d: int, delta: int) -> list[FormClass]:
    """GL2(A)-classes of integral forms of discriminant ``delta``.

    delta < 0: positive definite classes.  delta > 0: anisotropic classes
    (an isotropic discriminant returns an empty list).
    """
    spine.require_spine_disc(d)
    if delta == 0:
        raise DegenerateFormError("discriminant is zero")
    classes: list[FormClass] = []
    if delta < 0:
        for f in _definite_candidates(d, delta):
            if any(definite_equivalence(c.form, f) is not None for c in classes):
                continue
            classes.append(FormClass(f, minimum=definite_minimum(f)))
    else:
        if not disc_is_anisotropic(d, delta):
            return []
        for f in _indefinite_candidates(d, delta):
            if any(indefinite_equivalent(f, c) is not None for c in classes):
                continue
            classes.append(_new_indefinite_class(f))
    return classes


def definite_minimum(f: HermitianForm) -> int:
    """min f over A^2 minus 0 for positive definite f."""
    k = 1
    while not vectors_of_value(f, k):
        k += 1
    return k


def _classify_job(args):
    d, delta = args
    return (d, delta), [c.to_json() for c in classify(d, delta)]


def classify_many(pairs, jobs: int = 1) -> dict:
    """Classify several (d, delta) pairs, optionally in worker processes."""
    pairs = list(pairs)
    if jobs <= 1:
        return dict(_classify_job(p) for p in pairs)
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return dict(ex.map(_classify_job, pairs))


# -- word oracle --------------------------------------------------------------------------

def standard_generators(d: int) -> list[Mat2A]:
    one, zero, tau = RingElem(1, 0, d), RingElem(0, 0, d), RingElem.tau(d)
    z = units(d)[1]
    gens = [
        Mat2A(one, one, zero, one),
        Mat2A(one, -one, zero, one),
        Mat2A(one, tau, zero, one),
        Mat2A(one, -tau, zero, one),
        Mat2A(zero, -one, one, zero),
        Mat2A(z, zero, zero, one),
        Mat2A(z ** -1, zero, zero, one),
    ]
    return [Mat2A(*(e.integral() for e in (g.p, g.q, g.r, g.s))) for g in gens]


def word_ball(f: HermitianForm, depth: int) -> set:
    """Forms f o w for words w of length <= depth in the standard generators."""
    gens = standard_generators(f.d)
    ball = {f}
    layer = [f]
    for _ in range(depth):
        nxt = []
        for h in layer:
            for g in gens:
                k = transform(h, g)
                if k not in ball:
                    ball.add(k)
                    nxt.append(k)
        layer = nxt
    return ball


def word_equivalent(f: HermitianForm, g: HermitianForm, half_depth: int = 3) -> bool:
    """Meet in the middle: words of length <= 2 * half_depth."""
    return not word_ball(f, half_depth).isdisjoint(word_ball(g, half_depth))
