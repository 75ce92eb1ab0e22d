"""The spine over the Gaussian integers (D = -4): cube vertices, square cells, oceans."""
from __future__ import annotations

from dataclasses import dataclass

from .forms import HermitianForm
from .ring import DiscriminantError, RingElem
from . import spine
from .spine import Valued, Vertex, det2, lax, vadd, vscale

D = -4
I = RingElem(2, 1, D)


@dataclass(frozen=True)
class GVertex:
    """The cube vertex spanned by an index-2 pair (r, s)."""

    r: tuple
    s: tuple

    def __post_init__(self):
        if det2(self.r, self.s).norm() != 2:
            raise ValueError("det(r, s) must be an associate of 1+i")

    def pairs(self) -> list[tuple]:
        return vertex_vectors(self.r, self.s)

    def vertex(self) -> Vertex:
        return Vertex.from_vecs([v for pr in self.pairs() for v in pr])

    @classmethod
    def from_vertex(cls, vx: Vertex) -> GVertex:
        i, j = spine.opposite_pairs(vx)[0]
        return cls(vx.vecs[i], vx.vecs[j])


def vertex_vectors(r, s) -> list[tuple]:
    """The six lax vectors at the vertex as three opposite pairs.

    The pairs are {r, s}, {d0, d2} and {d1, d3} with d_k = (1+i)/2 (r + i^k s).
    """
    six = spine.cube_vectors(r, s)
    r, s, d0, d1, d2, d3 = (lax(v) for v in six)
    return [(r, s), (d0, d2), (d1, d3)]


def vertex_labels_g(f, v: GVertex) -> tuple:
    F = f if isinstance(f, Valued) else Valued(f)
    return tuple((F.value(a), F.value(b)) for a, b in v.pairs())


def inv_g(f, v: GVertex) -> int:
    F = f if isinstance(f, Valued) else Valued(f)
    return F.value(v.r) + F.value(v.s)


def cube_relation_check(f, v: GVertex) -> bool:
    """2 f(r) + 2 f(s) equals the sum of the four remaining values, and all pair sums agree."""
    labels = vertex_labels_g(f, v)
    (fr, fs), (a, b), (c, d) = labels
    sums = {x + y for x, y in labels}
    return 2 * (fr + fs) == a + b + c + d and len(sums) == 1


def edge_vertices_g(u, v) -> tuple[GVertex, GVertex]:
    """The two vertices on the edge {u, v, u+v}: pairs (u+v, u+iv) and (u+v, u-iv)."""
    w = vadd(u, v)
    return GVertex(w, vadd(u, vscale(v, I))), GVertex(w, vadd(u, vscale(v, -I)))


def edge_step_g(f, u, v, side: int = 0) -> GVertex:
    """The vertex on the given side (0 or 1) of the edge {u, v, u+v}."""
    return edge_vertices_g(u, v)[side]


def edge_inv_g(f, u, v) -> int:
    F = f if isinstance(f, Valued) else Valued(f)
    return F.value(u) + F.value(v) + F.value(vadd(u, v))


def parallelogram_g(f, u, v) -> bool:
    F = f if isinstance(f, Valued) else Valued(f)
    return F.value(vadd(u, vscale(v, I))) + F.value(vadd(u, vscale(v, -I))) == 2 * (F.value(u) + F.value(v))


def delta_from_edge(a: int, b: int, c: int, z: int) -> int:
    """Discriminant from the edge values a, b, c and the invariant z of an endpoint."""
    return 2 * a * (a - z) + 2 * b * (b - z) + 2 * c * (c - z) + z * z


def find_ocean_vertex_g(f: HermitianForm) -> GVertex:
    if f.d != D:
        raise DiscriminantError("find_ocean_vertex_g needs D=-4")
    return GVertex.from_vertex(spine.seek_ocean(f))


def ocean_graph_g(f: HermitianForm, radius: int) -> spine.OceanGraph:
    return spine.explore_ocean(f, radius, find_ocean_vertex_g(f).vertex())


def uf_generators_g(f: HermitianForm, special: bool = False) -> spine.UFResult:
    return spine.analyze(f, find_ocean_vertex_g(f).vertex(), special=special)


def example_form() -> HermitianForm:
    """Gram matrix (1, (1-i)/2; (1+i)/2, -1), discriminant 6."""
    return HermitianForm.make(D, 1, -1, RingElem(3, 1, D))  # num = 1 + i
