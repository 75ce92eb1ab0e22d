import random

import pytest
from hypothesis import HealthCheck, settings

from hermtop.forms import HermitianForm, QuadraticForm, disc_is_anisotropic
from hermtop.ring import RingElem

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_form(rng: random.Random, d: int, box: int = 6) -> HermitianForm:
    a = rng.randint(-box, box)
    c = rng.randint(-box, box)
    num = RingElem(rng.randint(-box, box), rng.randint(-box, box), d)
    return HermitianForm.make(d, a, c, num)


def random_anisotropic(rng: random.Random, d: int, box: int = 5, max_disc: int | None = None) -> HermitianForm:
    while True:
        f = random_form(rng, d, box)
        delta = f.disc()
        if delta > 0 and (max_disc is None or delta <= max_disc) and disc_is_anisotropic(d, int(delta)):
            return f


def random_quadratic(rng: random.Random, box: int = 12) -> QuadraticForm:
    return QuadraticForm(rng.randint(-box, box), rng.randint(-box, box), rng.randint(-box, box))


@pytest.fixture
def rng():
    return random.Random(20240607)


def brute_hmin(f: HermitianForm, bound: int) -> int:
    """min |f(x, y)| over nonzero pairs with N(x), N(y) <= bound, vectorised."""
    import numpy as np

    from hermtop.ring import elements_up_to_norm

    d = f.d
    n0 = (d * d - d) // 4
    es = [RingElem(0, 0, d)] + elements_up_to_norm(d, bound)
    ex = np.array([e.x for e in es], dtype=np.int64)
    ey = np.array([e.y for e in es], dtype=np.int64)
    nrm = ex * ex + d * ex * ey + n0 * ey * ey
    X1, Y1 = ex[:, None], ey[:, None]
    # conj(y) = (y1 + d y2) - y2 tau
    c1, c2 = (ex + d * ey)[None, :], (-ey)[None, :]
    w1 = X1 * c1 - n0 * Y1 * c2
    w2 = X1 * c2 + Y1 * c1 + d * Y1 * c2
    nx, ny = int(f.num.x), int(f.num.y)
    tr = nx * w2 + ny * w1 + d * ny * w2
    vals = int(f.a) * nrm[:, None] + int(f.c) * nrm[None, :] + tr
    vals[0, 0] = np.iinfo(np.int64).max
    return int(np.abs(vals).min())
