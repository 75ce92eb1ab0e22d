"""The spine over the Eisenstein integers (D = -3): ultrabases, wells and oceans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product

from .forms import (
    Cusp,
    HermitianForm,
    disc_is_anisotropic,
    reconstruct_form,
)
from .ring import RingElem
from . import spine
from .spine import (
    StepLimitError,
    Valued,
    Vertex,
    coords,
    lax,
    vadd,
    vkey,
    vscale,
)

D = -3
RHO = RingElem(2, 1, D)  # e^{i pi / 3}


class NoWellError(ValueError):
    """The form is not positive definite, so the spine has no well."""


# -- label calculus --------------------------------------------------------------

def greeks(lbl) -> tuple[int, int, int, int]:
    a, b, c, d = lbl
    s = a + b + c + d
    return (s - 3 * a, s - 3 * b, s - 3 * c, s - 3 * d)


def disc_e(lbl) -> int:
    a, b, c, d = lbl
    return a * a + b * b + c * c + d * d - a * b - a * c - a * d - b * c - b * d - c * d


def inv_vertex(lbl) -> int:
    return sum(lbl)


EVEN_PERMS = spine.even_permutations(4)


def a4_key(lbl) -> tuple:
    """Canonical labels up to the rotations of the vertex tetrahedron."""
    return max(tuple(lbl[i] for i in p) for p in EVEN_PERMS)


# -- ultrabases ---------------------------------------------------------------------

@dataclass(frozen=True)
class UltraBasis:
    """The vertex {u, v, u+v, u+rho v}."""

    u: tuple
    v: tuple

    def vectors(self) -> tuple:
        u, v = self.u, self.v
        return (u, v, vadd(u, v), vadd(u, vscale(v, RHO)))

    def vertex(self) -> Vertex:
        return Vertex.from_vecs(self.vectors())

    def to_json(self) -> dict:
        return {"u": [e.to_json() for e in self.u], "v": [e.to_json() for e in self.v]}


STANDARD = UltraBasis((RingElem(1, 0, D), RingElem(0, 0, D)), (RingElem(0, 0, D), RingElem(1, 0, D)))


def orient(vx: Vertex) -> UltraBasis:
    """An ultrabasis ordering of the four lax vectors of a vertex."""
    p, q, r, s = vx.vecs
    lam, mu = coords(r, p, q)
    p1, q1 = vscale(p, lam.integral()), vscale(q, mu.integral())
    a, b = coords(s, p1, q1)
    eps = b / a
    if eps == RHO:
        return UltraBasis(p1, q1)
    if eps == RHO.conj():
        return UltraBasis(q1, p1)
    raise ValueError("the four vectors do not form an ultrabasis")


def labels_at(F: Valued, ub: UltraBasis) -> tuple:
    return tuple(F.value(w) for w in ub.vectors())


def eval_at_vertex(lbl, ub: UltraBasis, w) -> int:
    """Value at w = x u + y v from the four labels alone."""
    x, y = coords(w, ub.u, ub.v)
    if not (x.is_integral and y.is_integral):
        raise ValueError("w is not an integral combination of the ultrabasis")
    al, be, ga, de = greeks(lbl)
    tot = be * x.norm() + al * y.norm() + ga * (x - y).norm() + de * (RHO * x - y).norm()
    if tot % 3:
        raise AssertionError("labels are not those of an integral form")
    return tot // 3


def form_from_labels(lbl) -> HermitianForm:
    """The form, in the coordinates of (u, v), with values ``lbl`` on the ultrabasis.

    The Gram data is rational in general; integral label sets are exactly
    those giving an integral form.
    """
    return reconstruct_form([Cusp(w[0], w[1], 1) for w in STANDARD.vectors()], lbl)


def climb(lbl, ub: UltraBasis, i: int, F: Valued | None = None) -> tuple[tuple, UltraBasis]:
    """Cross the edge opposite to vector ``i``; the new value is lbl[i] + greek[i]."""
    vs = ub.vectors()
    keep = [vs[j] for j in range(4) if j != i]
    new_val = lbl[i] + greeks(lbl)[i]
    other = spine.across(ub.vertex(), tuple(sorted(_index_in(ub.vertex(), w) for w in keep)))
    nub = orient(other)
    known = {vkey(lax(w)): lbl[j] for j, w in enumerate(vs)}
    new = tuple(known.get(vkey(lax(w)), new_val) for w in nub.vectors())
    if F is not None:
        assert new == labels_at(F, nub)
    return new, nub


def _index_in(vx: Vertex, w) -> int:
    return vx.key.index(vkey(lax(w)))


# -- wells ----------------------------------------------------------------------------

def _pick(lbl, ub, score):
    """Index minimising ``score``; ties by smaller new label, then by vector key."""
    vs = ub.vectors()
    g = greeks(lbl)
    return min(range(4), key=lambda i: (score(i), lbl[i] + g[i], vkey(lax(vs[i]))))


@dataclass
class Well:
    ultrabasis: UltraBasis
    labels: tuple
    wells: list  # all minimal-inv vertices (several when some greek vanishes)

    @property
    def minimum(self) -> int:
        return min(self.labels)


def find_well(f: HermitianForm, limit: int | None = None) -> Well:
    if f.d != D:
        raise spine.DiscriminantError("find_well needs D=-3")
    limit = spine.step_limit() if limit is None else limit
    F = Valued(f)
    ub = STANDARD
    lbl = labels_at(F, ub)
    if min(lbl) <= 0:
        raise NoWellError("form takes a non-positive value; it is not positive definite")
    steps = 0
    while min(greeks(lbl)) < 0:
        i = _pick(lbl, ub, lambda i: greeks(lbl)[i])
        lbl, ub = climb(lbl, ub, i)
        if min(lbl) <= 0:
            raise NoWellError("descent reached a non-positive value; the form is not positive definite")
        steps += 1
        if steps > limit:
            raise StepLimitError("well descent exceeded the step limit")
    # the well set: vertices reachable through edges with zero greek
    seen = {ub.vertex().key: (lbl, ub)}
    stack = [(lbl, ub)]
    while stack:
        l0, u0 = stack.pop()
        for i, g in enumerate(greeks(l0)):
            if g == 0:
                l1, u1 = climb(l0, u0, i)
                k = u1.vertex().key
                if k not in seen and min(greeks(l1)) >= 0:
                    seen[k] = (l1, u1)
                    stack.append((l1, u1))
    wells = [seen[k] for k in sorted(seen)]
    return Well(ub, lbl, wells)


# -- oceans -------------------------------------------------------------------------------

def find_ocean_vertex(f: HermitianForm, limit: int | None = None) -> tuple[UltraBasis, tuple]:
    """Walk to a vertex with two positive and two negative values."""
    if f.d != D:
        raise spine.DiscriminantError("find_ocean_vertex needs D=-3")
    spine._check_anisotropic_indefinite(f)
    limit = spine.step_limit() if limit is None else limit
    F = Valued(f)
    ub = STANDARD
    lbl = labels_at(F, ub)
    steps = 0
    while True:
        pos = sum(1 for x in lbl if x > 0)
        if pos == 2:
            return ub, lbl
        if pos in (0, 4):
            sgn = 1 if pos == 4 else -1
            i = _pick(lbl, ub, lambda i: sgn * greeks(lbl)[i])
        elif pos == 3:
            i = _pick(lbl, ub, lambda i: -lbl[i])
        else:
            i = _pick(lbl, ub, lambda i: lbl[i])
        lbl, ub = climb(lbl, ub, i)
        steps += 1
        if steps > limit:
            raise StepLimitError("ocean descent exceeded the step limit")


def ocean_graph_e(f: HermitianForm, radius: int) -> spine.OceanGraph:
    ub, _ = find_ocean_vertex(f)
    return spine.explore_ocean(f, radius, ub.vertex())


def uf_generators_e(f: HermitianForm, special: bool = False) -> spine.UFResult:
    ub, _ = find_ocean_vertex(f)
    return spine.analyze(f, ub.vertex(), special=special)


def ocean_minimum(f: HermitianForm) -> int:
    """min |f| over the ocean, read off the U(f)-orbit representatives of its vertices."""
    ub, _ = find_ocean_vertex(f)
    od = spine.vertex_orbits(f, ub.vertex())
    return min(abs(x) for lab in od.labels for x in lab)


# -- classification ---------------------------------------------------------------------

def _integral_form(lbl) -> HermitianForm | None:
    g = form_from_labels(lbl)
    return g.integral() if g.is_integral else None


def _candidate_keys(multiset) -> set:
    return {a4_key(p) for p in set(permutations(multiset))}


def classify_disc_e(delta: int) -> list[tuple]:
    """One canonical label quadruple per class of forms with discriminant ``delta``.

    Definite: positive definite classes keyed by their wells.  Indefinite:
    anisotropic classes keyed by the vertices of the ocean with two positive
    and two negative values.  Keys are maximal under rotations of the vertex.
    """
    if delta == 0:
        from .forms import DegenerateFormError
        raise DegenerateFormError("discriminant is zero")
    if delta < 0:
        return _classify_definite(delta)
    return _classify_indefinite(delta)


def _classify_definite(delta: int) -> list[tuple]:
    bound = -2 * delta  # (a+b+c+d) * min <= -2 delta
    classes = {}
    covered = set()
    for a in range(1, bound + 1):
        for b in range(a, bound + 1):
            for c in range(b, bound + 1):
                for dd in range(c, bound + 1):
                    if (a + b + c + dd) * a > bound:
                        break
                    lbl = (a, b, c, dd)
                    if disc_e(lbl) != delta or min(greeks(lbl)) < 0:
                        continue
                    for key in sorted(_candidate_keys(lbl)):
                        if key in covered:
                            continue
                        f = _integral_form(key)
                        if f is None:
                            continue
                        w = find_well(f)
                        keys = {a4_key(l) for l, _ in w.wells}
                        covered |= keys
                        classes[max(keys)] = f
    return sorted(classes, reverse=True)


def _classify_indefinite(delta: int) -> list[tuple]:
    if not disc_is_anisotropic(D, delta):
        return []
    m = math.isqrt(4 * delta // 3) + 1
    classes = {}
    covered = set()
    rng_pos = range(1, m + 1)
    rng_neg = range(-m, 0)
    for a, b in product(rng_pos, repeat=2):
        if a > b or a * a - a * b + b * b > delta:
            continue
        for c, dd in product(rng_neg, repeat=2):
            if c > dd:
                continue
            lbl = (a, b, c, dd)
            if disc_e(lbl) != delta:
                continue
            for key in sorted(_candidate_keys(lbl)):
                if key in covered:
                    continue
                f = _integral_form(key)
                if f is None:
                    continue
                keys = class_vertex_keys(f)
                covered |= keys
                classes[max(keys)] = f
    return sorted(classes, reverse=True)


def class_vertex_keys(f: HermitianForm) -> set:
    """Rotation-canonical labels of every (2,2)-signed ocean vertex, up to U(f)."""
    res = uf_generators_e(f)
    out = set()
    for vx in res.vertex_reps:
        ub = orient(vx)
        lbl = tuple(f.value(w) for w in ub.vectors())
        if sum(1 for x in lbl if x > 0) == 2:
            out.add(a4_key(lbl))
    return out


def class_form(key) -> HermitianForm:
    f = _integral_form(key)
    if f is None:
        raise ValueError(f"labels {key} do not come from an integral form")
    return f


def well_minimum(f: HermitianForm) -> int:
    return find_well(f).minimum
