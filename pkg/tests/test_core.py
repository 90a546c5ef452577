import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopbundle import core
from loopbundle.zoo import catalog_names, make_loop

ALL_LOOPS = catalog_names()


@pytest.mark.parametrize("name", ALL_LOOPS)
def test_axiom_sweep(name):
    L = make_loop(name)
    report = core.check_loop_axioms(L, 500, seed=11)
    assert report.passed, [c.as_dict() for c in report.cases]


@pytest.mark.parametrize("name", ALL_LOOPS)
def test_divisions_solve_their_equations(name):
    L = make_loop(name)
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = L.sample(rng), L.sample(rng)
        x = core.left_divide(L, a, b)
        assert core.distance(L, core.product(L, a, x), b) < 1e-12
        y = core.right_divide(L, b, a)
        assert core.distance(L, core.product(L, y, a), b) < 1e-12


def test_associator_definitions():
    L = make_loop("qc")
    rng = np.random.default_rng(7)
    a, b, c = (L.sample(rng) for _ in range(3))
    ab = core.product(L, a, b)
    left = core.associator(L, "left", a, b, c)
    assert core.distance(L, core.product(L, ab, left),
                         core.product(L, a, core.product(L, b, c))) < 1e-13
    right = core.associator(L, "right", a, b, c)
    assert core.distance(L, core.product(L, right, ab),
                         core.product(L, core.product(L, c, a), b)) < 1e-13


def test_associator_trivial_at_identity():
    L = make_loop("qc")
    rng = np.random.default_rng(9)
    a, c = L.sample(rng), L.sample(rng)
    e = list(L.identity)
    for kind in ("left", "right", "adjoint"):
        out = core.associator(L, kind, a, e, c)
        assert core.distance(L, out, np.asarray(c, dtype=float)) < 1e-13


def test_ad_map_fixes_identity():
    L = make_loop("qh2")
    rng = np.random.default_rng(3)
    b, a = L.sample(rng), L.sample(rng)
    e = list(L.identity)
    out = core.ad_map(L, b, a, e)
    assert core.distance(L, out, np.asarray(e)) < 1e-13


def test_ad_inverse_map_inverts():
    L = make_loop("qc")
    rng = np.random.default_rng(13)
    for _ in range(20):
        b, a, c = 0.5 * L.sample(rng), 0.5 * L.sample(rng), 0.5 * L.sample(rng)
        fwd = core.ad_map(L, b, a, c)
        back = core.ad_inverse_map(L, b, a, fwd)
        assert core.distance(L, back, np.asarray(c, dtype=float)) < 1e-12


def test_newton_divide_matches_closed_form():
    L = make_loop("qc")
    rng = np.random.default_rng(21)
    for _ in range(20):
        a, b = 0.6 * L.sample(rng), 0.6 * L.sample(rng)
        closed = core.left_divide(L, a, b)
        iterated = core.newton_divide(L, a, b, side="left")
        assert core.distance(L, closed, iterated) < 1e-10


coords = st.floats(-0.6, 0.6, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(coords, coords, coords, coords)
def test_mobius_division_round_trip(a1, a2, b1, b2):
    L = make_loop("qc")
    a, b = [a1, a2], [b1, b2]
    x = core.left_divide(L, a, b)
    assert core.distance(L, core.product(L, a, x), np.asarray(b)) < 1e-10
