import random

import pytest

from hermtop import spine
from hermtop.forms import transform
from hermtop.gaussian import (
    I,
    GVertex,
    cube_relation_check,
    delta_from_edge,
    edge_inv_g,
    edge_vertices_g,
    example_form,
    find_ocean_vertex_g,
    inv_g,
    ocean_graph_g,
    parallelogram_g,
    uf_generators_g,
    vertex_labels_g,
    vertex_vectors,
)
from hermtop.ring import RingElem, gcd

from conftest import random_anisotropic, random_form

D = -4
ONE, ZERO = RingElem(1, 0, D), RingElem(0, 0, D)


def lax_keys(vs):
    return {spine.vkey(spine.lax(v)) for v in vs}


def test_vertex_vectors_example():
    r, s = (ONE, ZERO), (ONE, ONE + I)
    six = [v for pair in vertex_vectors(r, s) for v in pair]
    keys = lax_keys(six)
    assert spine.vkey(spine.lax((ONE, ONE))) in keys
    assert spine.vkey(spine.lax((ZERO, ONE))) in keys
    assert len(keys) == 6
    for x, y in six:
        assert gcd(x, y).is_unit()


def test_vertex_rejects_basis():
    with pytest.raises(ValueError):
        GVertex((ONE, ZERO), (ZERO, ONE))


def test_example_vertex_types():
    f = example_form()
    F = spine.Valued(f)
    g = ocean_graph_g(f, 3)
    seen = {}
    for k, vx in g.vertices.items():
        gv = GVertex.from_vertex(vx)
        pairs = tuple(sorted(tuple(sorted(p)) for p in vertex_labels_g(F, gv)))
        seen.setdefault(inv_g(F, gv), set()).add(pairs)
        assert cube_relation_check(F, gv)
    assert seen[2] == {((-1, 3), (1, 1), (1, 1))}
    assert seen[0] == {((-1, 1), (-1, 1), (-1, 1))}
    assert seen[-2] == {((-3, 1), (-1, -1), (-1, -1))}


def test_example_ocean_cells_are_minus_one_one():
    f = example_form()
    F = spine.Valued(f)
    g = ocean_graph_g(f, 3)
    for p, q, vks in g.cells.values():
        assert sorted((F.value(p), F.value(q))) == [-1, 1]
        invs = [F.inv(g.vertices[k]) for k in vks]
        # corners 0, 2, 0, -2 in cyclic order
        assert sorted(invs) == [-2, 0, 0, 2]
        # the two inv = 0 corners are opposite
        assert (invs[0], invs[2]) == (0, 0) or (invs[1], invs[3]) == (0, 0)
    for ek in g.edges:
        vs = [spine.key_vec(k, D) for k in ek]
        assert abs(spine.edge_inv(F, vs)) == 1


def test_delta_from_edge_example():
    assert delta_from_edge(1, -1, 1, 0) == 6


def random_vertices(rng, n):
    """Random cube vertices, by random walks from the standard vertex."""
    vx = spine.standard_vertex(D)
    out = []
    for _ in range(n):
        vx = rng.choice(spine.neighbors(vx))
        out.append(vx)
        if rng.random() < 0.05:
            vx = spine.standard_vertex(D)
    return out


def test_cube_relation_random():
    rng = random.Random(31)
    verts = random_vertices(rng, 1000)
    for vx in verts:
        f = random_form(rng, D, box=9)
        assert cube_relation_check(f, GVertex.from_vertex(vx))


def test_edge_relations_random():
    rng = random.Random(32)
    for _ in range(1000):
        f = random_form(rng, D, box=9)
        a, b, c, e = (rng.randint(-6, 6) for _ in range(4))
        u = (RingElem(a, b, D), RingElem(c, e, D))
        if not gcd(*u).is_unit():
            continue
        # complete u to a basis (u, v) with det 1
        g, s, t = spine_xgcd(u)
        v = (-t, s)
        assert parallelogram_g(f, u, v)
        v1, v2 = edge_vertices_g(u, v)
        assert inv_g(f, v1) + inv_g(f, v2) == 2 * edge_inv_g(f, u, v)
        F = spine.Valued(f)
        z = inv_g(F, v1)
        vals = [F.value(u), F.value(v), F.value(spine.vadd(u, v))]
        if f.disc():
            assert delta_from_edge(*vals, z) == f.disc()


def spine_xgcd(u):
    from hermtop.ring import xgcd
    g, s, t = xgcd(u[0], u[1])
    # s u0 + t u1 = g, a unit; rescale to 1
    ginv = (ONE / g).integral()
    return ONE, s * ginv, t * ginv


def test_example_orbits_and_presentation():
    res = uf_generators_g(example_form())
    assert (res.vertex_orbits, res.edge_orbits, res.cell_orbits) == (3, 2, 1)
    assert res.vertex_invs == [2, 0, -2]
    assert res.vertex_stabilizers == [4, 3, 4]
    assert sorted(res.edge_invs) == [-1, 1]
    assert res.triangle == (3, 4, 4)
    for g in res.generators:
        assert transform(example_form(), g) == example_form()


def test_ocean_nonempty_random():
    rng = random.Random(33)
    for _ in range(15):
        f = random_anisotropic(rng, D, box=5)
        vx = find_ocean_vertex_g(f).vertex()
        assert spine.is_ocean_vertex(spine.Valued(f), vx)
