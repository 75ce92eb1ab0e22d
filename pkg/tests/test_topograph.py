import math
import random

import pytest

from hermtop.forms import IsotropicFormError, NotIndefiniteError, QuadraticForm
from hermtop.topograph import (
    STANDARD,
    LaxVec,
    SuperBasis,
    apply_quadratic,
    brute_min_abs,
    descend,
    edge_step,
    topograph_tree,
    trace_river,
    vertex_disc,
    vertex_values,
)

GOLDEN = QuadraticForm(1, 1, -1)


def matmul(g, h):
    return tuple(tuple(sum(g[i][k] * h[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def test_vertex_values_and_disc():
    assert vertex_values(GOLDEN, STANDARD) == (1, -1, 1)
    assert vertex_disc(1, -1, 1) == 5 == GOLDEN.disc()
    for a in range(-5, 6):
        assert vertex_disc(a, a, a) == -3 * a * a


def test_crossing_an_edge():
    # cross the edge between the regions valued 1 and -1
    sb = edge_step(GOLDEN, STANDARD, 2)
    assert vertex_values(GOLDEN, sb) == (1, -1, -1)
    assert sb.w == LaxVec.of(1, -1)
    # the region (2, 1) carries 5, next to the regions (1, 0) and (1, 1)
    sb5 = SuperBasis(LaxVec(1, 0), LaxVec(1, 1), LaxVec(2, 1))
    assert vertex_values(GOLDEN, sb5) == (1, 1, 5)


def test_parallelogram_law_random():
    rng = random.Random(11)
    for _ in range(1000):
        f = QuadraticForm(rng.randint(-20, 20), rng.randint(-20, 20), rng.randint(-20, 20))
        u = (rng.randint(-30, 30), rng.randint(-30, 30))
        v = (rng.randint(-30, 30), rng.randint(-30, 30))
        assert f(u[0] + v[0], u[1] + v[1]) + f(u[0] - v[0], u[1] - v[1]) == 2 * f(*u) + 2 * f(*v)


def test_golden_river():
    r = trace_river(GOLDEN)
    assert r.min_abs == 1 and r.min_vec == LaxVec(1, 0)
    assert r.min_abs ** 2 * 5 <= GOLDEN.disc()
    (p, q), (s, t) = r.automorph
    assert abs(p + t) == 3
    assert p * t - q * s == 1
    assert apply_quadratic(GOLDEN, r.automorph) == GOLDEN


def brute_automorph_traces(f, box=10):
    out = set()
    for p in range(-box, box + 1):
        for q in range(-box, box + 1):
            for r in range(-box, box + 1):
                for s in range(-box, box + 1):
                    if p * s - q * r == 1 and (p, q, r, s) not in ((1, 0, 0, 1), (-1, 0, 0, -1)):
                        if apply_quadratic(f, ((p, q), (r, s))) == f:
                            out.add(abs(p + s))
    return out


def test_golden_automorph_is_fundamental():
    traces = brute_automorph_traces(GOLDEN)
    assert min(traces) == 3
    assert abs(sum(trace_river(GOLDEN).automorph[i][i] for i in range(2))) == min(traces)


def test_x2_minus_2y2():
    f = QuadraticForm(1, 0, -2)
    r = trace_river(f)
    assert r.min_abs == 1 == brute_min_abs(f)
    for (a, b), _ in r.period:
        assert abs(a) <= 2 and abs(b) <= 2
        assert a < 0 < b


@pytest.mark.parametrize("f", [QuadraticForm(1, 1, -1), QuadraticForm(1, 0, -2), QuadraticForm(3, 5, -7), QuadraticForm(-2, 9, 4)])
def test_automorph_powers(f):
    g = trace_river(f).automorph
    assert g not in (((1, 0), (0, 1)), ((-1, 0), (0, -1)))
    h = g
    for _ in range(3):
        assert apply_quadratic(f, h) == f
        h = matmul(h, g)


def test_river_rejects_bad_forms():
    with pytest.raises(IsotropicFormError):
        trace_river(QuadraticForm(1, 0, -4))
    with pytest.raises(NotIndefiniteError):
        trace_river(QuadraticForm(1, 1, 1))
    with pytest.raises(NotIndefiniteError):
        trace_river(QuadraticForm(1, 2, 1))


def test_river_labels_bounded():
    rng = random.Random(12)
    n = 0
    while n < 200:
        f = QuadraticForm(rng.randint(-9, 9), rng.randint(-15, 15), rng.randint(-9, 9))
        D = f.disc()
        if D <= 0 or math.isqrt(D) ** 2 == D:
            continue
        n += 1
        r = trace_river(f)
        for (a, b), _ in r.period:
            # adjacent river values satisfy D >= 4|ab| (edge discriminant)
            assert a < 0 < b and 4 * -a * b <= D


def test_descend_reaches_mixed_signs():
    f = QuadraticForm(1, 7, 11)
    sb, steps = descend(f)
    vals = vertex_values(f, sb)
    assert min(vals) < 0 < max(vals)


def test_tree_shape():
    edges = topograph_tree(GOLDEN, 3)
    assert len(edges) == 3 + 6 + 12
    for _, a, b in edges:
        assert abs(a.m * b.n - a.n * b.m) == 1


def test_disc_193_minimum_lies_outside_the_small_box():
    """This form of discriminant 193 reaches 1 only at vectors with a coordinate above 100."""
    import numpy as np

    f = QuadraticForm(-7, -19, -6)
    res = trace_river(f)
    assert res.min_abs == 1
    assert brute_min_abs(f, 100) == 2
    r = np.arange(-1200, 1201, dtype=np.int64)
    m, n = np.meshgrid(r, r, indexing="ij")
    vals = np.abs(f.a * m * m + f.b2 * m * n + f.c * n * n)
    vals[1200, 1200] = vals.max()
    assert int(vals.min()) == 1
