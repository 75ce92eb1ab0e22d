"""Combinatorics of the spine for D = -3 and D = -4, and the ocean of a form.

Regions of the spine are lax vectors, 2-cells are lax bases {p, q} and
edges are lax superbases.  With zeta = 2 + tau (a generator of the unit
group, of order 6 resp. 4) the vertices around the cell {p, q} are

    V_k = vertex_from(p, q, zeta^k),   k = 0 .. n-1,

where vertex_from(p, q, eta) is the ultrabasis {p, q, p + eta q, p + eta zeta q}
(D = -3) or the cube vertex spanned by the index-2 pair (p + eta q, p + eta zeta q)
(D = -4).  Consecutive vertices V_{k-1}, V_k share the edge {p, q, p + zeta^k q}.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations

from .forms import HermitianForm, IsotropicFormError, Mat2A, disc_is_anisotropic, transform
from .ring import DiscriminantError, RingElem, canonical_associate, units

Vec = tuple  # (RingElem, RingElem)
Key = tuple  # (int, int, int, int)

SPINE_DISCS = (-3, -4)
DEFAULT_STEP_LIMIT = 10**6


def step_limit() -> int:
    env = os.environ.get("HERMTOP_STEP_LIMIT")
    return int(env) if env else DEFAULT_STEP_LIMIT


class StepLimitError(RuntimeError):
    """A descent exceeded the step limit."""


def require_spine_disc(d: int) -> None:
    if d not in SPINE_DISCS:
        raise DiscriminantError(f"explicit spine combinatorics exist only for D in {SPINE_DISCS}, got {d}")


# -- lax vectors -----------------------------------------------------------------

def vec(d: int, x, y) -> Vec:
    return (_elem(x, d), _elem(y, d))


def _elem(e, d):
    if isinstance(e, RingElem):
        return e
    if isinstance(e, tuple):
        return RingElem(e[0], e[1], d)
    return RingElem(e, 0, d)


def lax(v: Vec) -> Vec:
    """Unit-normalised representative (same rule as cusps)."""
    x, y = v
    _, u = canonical_associate(y if y else x)
    return (x * u, y * u)


def vkey(v: Vec) -> Key:
    return (v[0].x, v[0].y, v[1].x, v[1].y)


def key_vec(k: Key, d: int) -> Vec:
    return (RingElem(k[0], k[1], d), RingElem(k[2], k[3], d))


def det2(u: Vec, v: Vec) -> RingElem:
    return u[0] * v[1] - u[1] * v[0]


def vadd(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vscale(u: Vec, s) -> Vec:
    return (u[0] * s, u[1] * s)


def coords(w: Vec, p: Vec, q: Vec) -> tuple[RingElem, RingElem]:
    """(lam, mu) with w = lam p + mu q (field elements)."""
    dt = det2(p, q)
    return det2(w, q) / dt, det2(p, w) / dt


def apply(g: Mat2A, v: Vec) -> Vec:
    return g.apply(v)


def zeta(d: int) -> RingElem:
    return RingElem(2, 1, d)


@lru_cache(maxsize=None)
def _zeta_powers(d: int) -> tuple[RingElem, ...]:
    return units(d)  # units(d) lists zeta^0, zeta^1, ...


# -- vertices ----------------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    """A spine vertex: the set of its lax vectors (4 for D=-3, 6 for D=-4)."""

    vecs: tuple
    key: tuple

    @classmethod
    def from_vecs(cls, vs) -> Vertex:
        lv = sorted((lax(v) for v in vs), key=vkey)
        return cls(tuple(lv), tuple(vkey(v) for v in lv))

    @property
    def d(self) -> int:
        return self.vecs[0][0].d

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, o):
        return isinstance(o, Vertex) and self.key == o.key


def vertex_from(p: Vec, q: Vec, eta: RingElem) -> Vertex:
    d = p[0].d
    z = zeta(d)
    r = vadd(p, vscale(q, eta))
    s = vadd(p, vscale(q, eta * z))
    if d == -3:
        return Vertex.from_vecs((p, q, r, s))
    return Vertex.from_vecs(cube_vectors(r, s))


def cube_vectors(r: Vec, s: Vec) -> list[Vec]:
    """r, s and the four vectors (1+i)/2 (r + i^k s); requires det(r, s) ~ 1+i."""
    d = r[0].d
    if d != -4:
        raise DiscriminantError("cube vertices exist only for D=-4")
    if det2(r, s).norm() != 2:
        raise ValueError("det(r, s) must be an associate of 1+i")
    half = RingElem(3, 1, d) / 2  # (1+i)/2
    out = [r, s]
    for u in units(d):
        w = vadd(r, vscale(s, u))
        w = (w[0] * half, w[1] * half)
        if not (w[0].is_integral and w[1].is_integral):
            raise ValueError("derived vector is not integral")
        out.append((w[0].integral(), w[1].integral()))
    return out


def standard_vertex(d: int) -> Vertex:
    require_spine_disc(d)
    e1, e2 = vec(d, 1, 0), vec(d, 0, 1)
    return vertex_from(e1, e2, RingElem(1, 0, d))


def opposite_pairs(v: Vertex) -> list[tuple[int, int]]:
    """Index pairs of opposite (non-basis) vectors; empty for D=-3."""
    return [(i, j) for i, j in combinations(range(len(v.vecs)), 2) if not det2(v.vecs[i], v.vecs[j]).is_unit()]


def vertex_cells(v: Vertex) -> list[tuple[int, int]]:
    """Index pairs forming lax bases: the 2-cells through v."""
    return [(i, j) for i, j in combinations(range(len(v.vecs)), 2) if det2(v.vecs[i], v.vecs[j]).is_unit()]


def vertex_edges(v: Vertex) -> list[tuple[int, int, int]]:
    cells = set(vertex_cells(v))
    return [t for t in combinations(range(len(v.vecs)), 3)
            if all(pair in cells for pair in combinations(t, 2))]


def edge_vertices(p: Vec, q: Vec, w: Vec) -> tuple[Vertex, Vertex]:
    """The two vertices on the edge {p, q, w}."""
    lam, mu = coords(w, p, q)
    if not (lam.is_unit() and mu.is_unit()):
        raise ValueError("not a lax superbasis")
    p2 = vscale(p, lam.integral())
    eps = mu.integral()
    zinv = zeta(p[0].d) ** -1
    return vertex_from(p2, q, (eps * zinv).integral()), vertex_from(p2, q, eps)


def across(v: Vertex, edge: tuple[int, int, int]) -> Vertex:
    p, q, w = (v.vecs[i] for i in edge)
    a, b = edge_vertices(p, q, w)
    if a == v:
        return b
    if b != v:
        raise AssertionError("edge does not belong to the vertex")
    return a


def cell_vertices(p: Vec, q: Vec) -> list[Vertex]:
    """Vertices of the cell {p, q} in cyclic order."""
    return [vertex_from(p, q, u) for u in _zeta_powers(p[0].d)]


def cell_key(p: Vec, q: Vec) -> tuple:
    return tuple(sorted((vkey(lax(p)), vkey(lax(q)))))


def edge_key(vs) -> tuple:
    return tuple(sorted(vkey(lax(v)) for v in vs))


def edge_inv(f, vs) -> int:
    return sum(f.value(v) for v in vs)


# -- evaluation with a cache --------------------------------------------------------

class Valued:
    """A form together with a memo of its values on lax vectors."""

    def __init__(self, f: HermitianForm):
        self.f = f
        self._memo: dict = {}

    @property
    def d(self):
        return self.f.d

    def value(self, v: Vec) -> int:
        k = vkey(v)
        r = self._memo.get(k)
        if r is None:
            r = self.f.value(v)
            self._memo[k] = r
        return r

    def labels(self, vx: Vertex) -> tuple:
        return tuple(self.value(v) for v in vx.vecs)

    def inv(self, vx: Vertex) -> int:
        """Sum of values over one opposite pair (D=-4) or all four vectors (D=-3)."""
        if vx.d == -3:
            return sum(self.labels(vx))
        i, j = opposite_pairs(vx)[0]
        return self.value(vx.vecs[i]) + self.value(vx.vecs[j])


def _signs(vals) -> tuple[int, int]:
    vals = list(vals)
    return sum(1 for x in vals if x > 0), sum(1 for x in vals if x < 0)


def is_ocean_vertex(F: Valued, vx: Vertex) -> bool:
    pos, neg = _signs(F.labels(vx))
    return pos > 0 and neg > 0


def ocean_cells_at(F: Valued, vx: Vertex) -> list[tuple[Vec, Vec]]:
    out = []
    for i, j in vertex_cells(vx):
        p, q = vx.vecs[i], vx.vecs[j]
        if F.value(p) * F.value(q) < 0:
            out.append((p, q))
    return out


def ocean_edges_at(F: Valued, vx: Vertex) -> list[tuple[int, int, int]]:
    out = []
    for t in vertex_edges(vx):
        pos, neg = _signs(F.value(vx.vecs[i]) for i in t)
        if pos and neg:
            out.append(t)
    return out


def ocean_neighbors(F: Valued, vx: Vertex) -> list[Vertex]:
    return [across(vx, e) for e in ocean_edges_at(F, vx)]


def neighbors(vx: Vertex) -> list[Vertex]:
    return [across(vx, e) for e in vertex_edges(vx)]


# -- reaching the ocean ---------------------------------------------------------------

def _check_anisotropic_indefinite(f: HermitianForm) -> None:
    delta = f.disc()
    if delta <= 0:
        from .forms import NotIndefiniteError
        raise NotIndefiniteError(f"form has discriminant {delta} <= 0; no ocean")
    if not disc_is_anisotropic(f.d, int(delta)):
        raise IsotropicFormError("form represents zero; the ocean is not cocompact")


def seek_ocean(f: HermitianForm, start: Vertex | None = None, limit: int | None = None) -> Vertex:
    """Best-first search from ``start`` for a vertex with mixed signs.

    Priority is the sum of |values| at the vertex; the search stops as soon
    as an ocean vertex is generated.
    """
    import heapq

    _check_anisotropic_indefinite(f)
    limit = step_limit() if limit is None else limit
    F = Valued(f)
    start = start or standard_vertex(f.d)
    if is_ocean_vertex(F, start):
        return start
    heap = [(sum(abs(x) for x in F.labels(start)), start.key, start)]
    seen = {start.key}
    steps = 0
    while heap:
        _, _, vx = heapq.heappop(heap)
        for nb in neighbors(vx):
            if nb.key in seen:
                continue
            if is_ocean_vertex(F, nb):
                return nb
            seen.add(nb.key)
            heapq.heappush(heap, (sum(abs(x) for x in F.labels(nb)), nb.key, nb))
        steps += 1
        if steps > limit:
            raise StepLimitError(f"no ocean vertex within {limit} steps")
    raise AssertionError("unreachable: the spine is infinite")


# -- maps between vertices -------------------------------------------------------------

def find_maps(f_src: HermitianForm, v: Vertex, f_dst: HermitianForm, w: Vertex,
              first: bool = False, special: bool = False,
              Fs: Valued | None = None, Fd: Valued | None = None) -> list[Mat2A]:
    """All g in GL2(A), modulo scalars, with g(v) = w and f_dst o g = f_src.

    A map is pinned down by the images of one lax basis at v; the first image
    is taken with unit multiplier 1, which picks one matrix per scalar class.
    With ``special`` only g with det(g) a square of a unit are kept.
    """
    d = f_src.d
    Fs = Fs or Valued(f_src)
    Fd = Fd or Valued(f_dst)
    i, j = vertex_cells(v)[0]
    p, q = v.vecs[i], v.vecs[j]
    fp, fq = Fs.value(p), Fs.value(q)
    if sorted(Fs.labels(v)) != sorted(Fd.labels(w)):
        return []
    pq_inv = Mat2A.from_columns(p, q).inverse()
    wkeys = set(w.key)
    squares = {u * u for u in units(d)}
    out = []
    for a, b in vertex_cells(w):
        for p2, q2 in ((w.vecs[a], w.vecs[b]), (w.vecs[b], w.vecs[a])):
            if Fd.value(p2) != fp or Fd.value(q2) != fq:
                continue
            for mu in units(d):
                g = Mat2A.from_columns(p2, vscale(q2, mu)) @ pq_inv
                g = Mat2A(*(e.integral() for e in (g.p, g.q, g.r, g.s)))
                if special and g.det() not in squares:
                    continue
                if transform(f_dst, g) != f_src:
                    continue
                if {vkey(lax(g.apply(x))) for x in v.vecs} != wkeys:
                    continue
                out.append(g)
                if first:
                    return out
    return out


def map_vertex(g: Mat2A, vx: Vertex) -> Vertex:
    return Vertex.from_vecs(g.apply(x) for x in vx.vecs)


# -- orbit analysis ------------------------------------------------------------------------

@dataclass
class OrbitData:
    reps: list[Vertex]
    labels: list[tuple]
    stabilizers: list[list[Mat2A]]
    # for every explored ocean neighbour: (rep index, neighbour, g with g(neighbour) = reps[j], j)
    links: list[tuple]


def vertex_orbits(f: HermitianForm, seed: Vertex, special: bool = False,
                  limit: int | None = None) -> OrbitData:
    """Representatives of the U(f)-orbits of ocean vertices, by BFS over the quotient."""
    limit = step_limit() if limit is None else limit
    F = Valued(f)
    reps: list[Vertex] = []
    buckets: dict[tuple, list[int]] = {}
    links = []

    def locate(vx: Vertex):
        sig = tuple(sorted(F.labels(vx)))
        for j in buckets.get(sig, ()):
            g = find_maps(f, vx, f, reps[j], first=True, special=special, Fs=F, Fd=F)
            if g:
                return j, g[0]
        return None

    reps.append(seed)
    buckets.setdefault(tuple(sorted(F.labels(seed))), []).append(0)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for nb in ocean_neighbors(F, reps[i]):
            hit = locate(nb)
            if hit is None:
                reps.append(nb)
                j = len(reps) - 1
                buckets.setdefault(tuple(sorted(F.labels(nb))), []).append(j)
                queue.append(j)
                hit = (j, Mat2A.identity(f.d))
                if len(reps) > limit:
                    raise StepLimitError("too many vertex orbits")
            links.append((i, nb, hit[1], hit[0]))
    stabs = [find_maps(f, r, f, r, special=special, Fs=F, Fd=F) for r in reps]
    return OrbitData(reps, [F.labels(r) for r in reps], stabs, links)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self):
        return len({self.find(x) for x in self.parent})


def _mapped_key(g: Mat2A, vs) -> tuple:
    return tuple(sorted(vkey(lax(g.apply(v))) for v in vs))


@dataclass
class UFResult:
    d: int
    special: bool
    vertex_orbits: int
    edge_orbits: int
    cell_orbits: int
    vertex_reps: list[Vertex]
    vertex_labels: list[tuple]
    vertex_invs: list[int]
    vertex_stabilizers: list[int]
    edge_invs: list[int]
    edge_stabilizers: list[int]
    cell_stabilizers: list[int]
    generators: list[Mat2A]
    triangle: tuple | None
    minimum: int
    euler: int = field(default=0)


def analyze(f: HermitianForm, seed: Vertex | None = None, special: bool = False) -> UFResult:
    """Vertex, edge and cell orbits of U(f) (modulo scalars) on the ocean."""
    F = Valued(f)
    if seed is None:
        seed = seek_ocean(f)
    od = vertex_orbits(f, seed, special=special)
    reps = od.reps
    buckets: dict[tuple, list[int]] = {}
    for i, lab in enumerate(od.labels):
        buckets.setdefault(tuple(sorted(lab)), []).append(i)
    memo: dict = {}

    def orbit_flags(kind: str):
        """Union-find on flags (rep, cell-or-edge at rep) modulo the rep's stabilizer."""
        uf = _UnionFind()
        objs = {}

        def canon(i, vs):
            k = min(_mapped_key(g, vs) for g in od.stabilizers[i])
            return (i, k)

        def items(vx):
            if kind == "edge":
                return [tuple(vx.vecs[t] for t in e) for e in ocean_edges_at(F, vx)]
            return ocean_cells_at(F, vx)

        for i, r in enumerate(reps):
            for vs in items(r):
                fl = canon(i, vs)
                uf.add(fl)
                objs.setdefault(fl, vs)
        for fl, vs in list(objs.items()):
            i = fl[0]
            if kind == "edge":
                others = [x for x in edge_vertices(*vs) if x.key != reps[i].key]
            else:
                others = [x for x in cell_vertices(*vs) if x.key != reps[i].key]
            for u in others:
                if u.key not in memo:
                    memo[u.key] = _locate(f, F, u, reps, special, buckets)
                j, g = memo[u.key]
                fl2 = canon(j, [g.apply(x) for x in vs])
                uf.add(fl2)
                uf.union(fl, fl2)
        roots = {}
        for fl in sorted(objs):
            roots.setdefault(uf.find(fl), objs[fl])
        return roots

    edge_roots = orbit_flags("edge")
    cell_roots = orbit_flags("cell")

    def stab_of(vs, kind):
        verts = edge_vertices(*vs) if kind == "edge" else cell_vertices(*vs)
        v0 = verts[0]
        target = tuple(sorted(vkey(lax(x)) for x in vs))
        out = []
        for u in verts:
            for g in find_maps(f, v0, f, u, special=special, Fs=F, Fd=F):
                if _mapped_key(g, vs) == target:
                    out.append(g)
        return len(out)

    edge_list = sorted(edge_roots.values(), key=lambda vs: (-edge_inv(F, vs), edge_key(vs)))
    cell_list = sorted(cell_roots.values(), key=lambda vs: cell_key(*vs))
    gens = {}
    for _, _, g, _ in od.links:
        gens.setdefault(g.projective_key(), g)
    for st in od.stabilizers:
        for g in st:
            gens.setdefault(g.projective_key(), g)
    ident = Mat2A.identity(f.d).projective_key()
    gens.pop(ident, None)
    vstab = [len(s) for s in od.stabilizers]
    estab = [stab_of(vs, "edge") for vs in edge_list]
    cstab = [stab_of(vs, "cell") for vs in cell_list]
    V, E, C = len(reps), len(edge_list), len(cell_list)
    triangle = None
    nontriv = sorted(s for s in vstab if s > 1)
    if C == 1 and V - E + C == 2 and len(nontriv) == 3 and all(s == 1 for s in estab + cstab):
        triangle = tuple(nontriv)
    invs = [F.inv(r) for r in reps]
    order = sorted(range(V), key=lambda i: (-invs[i], od.labels[i]))
    return UFResult(
        d=f.d,
        special=special,
        vertex_orbits=V,
        edge_orbits=E,
        cell_orbits=C,
        vertex_reps=[reps[i] for i in order],
        vertex_labels=[od.labels[i] for i in order],
        vertex_invs=[invs[i] for i in order],
        vertex_stabilizers=[vstab[i] for i in order],
        edge_invs=[edge_inv(F, vs) for vs in edge_list],
        edge_stabilizers=estab,
        cell_stabilizers=cstab,
        generators=[gens[k] for k in sorted(gens)],
        triangle=triangle,
        minimum=min(abs(x) for lab in od.labels for x in lab),
        euler=V - E + C,
    )


def _locate(f, F, u: Vertex, reps: list[Vertex], special: bool, buckets: dict):
    for j in buckets.get(tuple(sorted(F.labels(u))), ()):
        g = find_maps(f, u, f, reps[j], first=True, special=special, Fs=F, Fd=F)
        if g:
            return j, g[0]
    raise AssertionError("ocean vertex outside every known orbit")


# -- explored ocean -------------------------------------------------------------------------

@dataclass
class OceanGraph:
    """A finite patch of the ocean: cells grown in layers around a seed vertex."""

    form: HermitianForm
    seed: Vertex
    radius: int
    vertices: dict = field(default_factory=dict)   # key -> Vertex
    labels: dict = field(default_factory=dict)     # key -> tuple of values
    cells: dict = field(default_factory=dict)      # cell key -> (p, q, [vertex keys in cyclic order])
    edges: dict = field(default_factory=dict)      # edge key -> (vkey1, vkey2)
    layer: dict = field(default_factory=dict)      # cell key -> BFS layer

    def interior_vertices(self) -> list:
        """Vertices all of whose ocean cells were explored."""
        F = Valued(self.form)
        out = []
        for k, vx in self.vertices.items():
            if all(cell_key(p, q) in self.cells for p, q in ocean_cells_at(F, vx)):
                out.append(k)
        return out

    def cells_at(self, vk) -> list:
        return [ck for ck, (_, _, vs) in self.cells.items() if vk in vs]


def explore_ocean(f: HermitianForm, radius: int, seed: Vertex | None = None) -> OceanGraph:
    """Every ocean cell meeting a vertex within ``radius - 1`` ocean edges of the seed.

    Vertices closer than ``radius`` to the seed therefore carry all of their
    cells; ``layer`` records the smallest distance of a vertex of each cell.
    """
    F = Valued(f)
    seed = seed or seek_ocean(f)
    g = OceanGraph(f, seed, radius)
    dist = {seed.key: 0}
    frontier = [seed]
    for step in range(radius):
        nxt = []
        for vx in frontier:
            for p, q in ocean_cells_at(F, vx):
                ck = cell_key(p, q)
                if ck in g.cells:
                    continue
                verts = cell_vertices(p, q)
                g.cells[ck] = (p, q, [v.key for v in verts])
                g.layer[ck] = step
                for a, b in zip(verts, verts[1:] + verts[:1]):
                    shared = [x for x in a.vecs if vkey(x) in set(b.key)]
                    g.edges.setdefault(edge_key(shared), (a.key, b.key))
                for v in verts:
                    if v.key not in g.vertices:
                        g.vertices[v.key] = v
                        g.labels[v.key] = F.labels(v)
            for w in ocean_neighbors(F, vx):
                if w.key not in dist:
                    dist[w.key] = step + 1
                    nxt.append(w)
        frontier = nxt
    if seed.key not in g.vertices:
        g.vertices[seed.key] = seed
        g.labels[seed.key] = F.labels(seed)
    return g


def all_permutation_keys(labels: tuple, perms) -> tuple:
    return max(tuple(labels[i] for i in p) for p in perms)


def even_permutations(n: int) -> list[tuple]:
    out = []
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        if inv % 2 == 0:
            out.append(p)
    return out
