import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from loopbundle.dual import (Dual, dirderiv, dual_parts, gatan, gatan2, gcos,
                             ginv, gsin, gsolve, gsqrt, gtan, gtanh, jacobian,
                             next_level, pack, primal, seed)


def test_arithmetic_first_derivatives():
    x = Dual(2.0, 1.0, lvl=next_level())
    y = x * x * x - 4.0 * x + 1.0
    assert y.re == pytest.approx(1.0)
    assert y.du == pytest.approx(3 * 4.0 - 4.0)


def test_division_derivative():
    lvl = next_level()
    x = Dual(3.0, 1.0, lvl)
    y = 1.0 / x
    assert y.re == pytest.approx(1.0 / 3.0)
    assert y.du == pytest.approx(-1.0 / 9.0)
    z = x / (x + 1.0)
    assert z.du == pytest.approx(1.0 / 16.0)


@pytest.mark.parametrize("fn,ref,dref", [
    (gsin, math.sin, math.cos),
    (gcos, math.cos, lambda t: -math.sin(t)),
    (gtan, math.tan, lambda t: 1.0 / math.cos(t) ** 2),
    (gtanh, math.tanh, lambda t: 1.0 - math.tanh(t) ** 2),
    (gsqrt, math.sqrt, lambda t: 0.5 / math.sqrt(t)),
    (gatan, math.atan, lambda t: 1.0 / (1.0 + t * t)),
])
def test_scalar_functions(fn, ref, dref):
    t = 0.7
    out = fn(Dual(t, 1.0, next_level()))
    assert out.re == pytest.approx(ref(t), abs=1e-14)
    assert out.du == pytest.approx(dref(t), abs=1e-14)


def test_atan2_gradient():
    y0, x0 = 0.4, -0.8
    lvl = next_level()
    out = gatan2(Dual(y0, 1.0, lvl), Dual(x0, 0.0, lvl))
    assert out.du == pytest.approx(x0 / (x0 * x0 + y0 * y0))
    out = gatan2(Dual(y0, 0.0, lvl), Dual(x0, 1.0, lvl))
    assert out.du == pytest.approx(-y0 / (x0 * x0 + y0 * y0))


def test_nested_levels_mixed_second_derivative():
    # f(x, y) = x^2 y; d2f/dxdy = 2x, which an untagged dual would drop.
    def inner(x, y):
        return x * x * y

    outer_lvl = next_level()
    x = Dual(1.5, 1.0, outer_lvl)
    col = jacobian(lambda ys: [inner(x, ys[0])], [2.0])
    entry = col[0][0]  # df/dy carrying the outer epsilon
    assert primal(entry) == pytest.approx(1.5 ** 2)
    assert isinstance(entry, Dual)
    assert entry.du == pytest.approx(2 * 1.5)


def test_jacobian_plain():
    j = jacobian(lambda v: [v[0] * v[1], v[0] + gsin(v[1])], [2.0, 0.5])
    expect = np.array([[0.5, 2.0], [1.0, math.cos(0.5)]])
    assert np.allclose(np.asarray(j, dtype=float), expect)


def test_dirderiv_matches_jacobian_action():
    f = lambda v: [v[0] ** 2 + v[1], v[0] * v[1]]
    x = [1.2, -0.3]
    direction = [0.7, 0.4]
    j = np.asarray(jacobian(f, x), dtype=float)
    d = np.asarray(dirderiv(f, x, direction), dtype=float)
    assert np.allclose(d, j @ direction)


def test_dual_parts_ignores_other_levels():
    lvl_a = next_level()
    lvl_b = next_level()
    xs = seed([1.0, 2.0], [1.0, 0.0], lvl_a)
    assert dual_parts(xs, lvl_b) == [0.0, 0.0]
    assert dual_parts(xs, lvl_a) == [1.0, 0.0]


def test_gsolve_matches_numpy_and_propagates_duals():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 3))
    b = rng.standard_normal(3)
    assert np.allclose(gsolve(a, b), np.linalg.solve(a, b))

    # derivative of solve(A(t), b) by duals vs the closed form -A^-1 A' A^-1 b
    lvl = next_level()
    at = np.empty((2, 2), dtype=object)
    a0 = np.array([[2.0, 1.0], [0.5, 3.0]])
    da = np.array([[1.0, 0.0], [0.0, -1.0]])
    for i in range(2):
        for j in range(2):
            at[i, j] = Dual(a0[i, j], da[i, j], lvl)
    b2 = np.array([1.0, 2.0])
    sol = gsolve(at, b2)
    expect = -np.linalg.inv(a0) @ da @ np.linalg.solve(a0, b2)
    got = np.array([s.du for s in sol])
    assert np.allclose(got, expect)


def test_ginv_dual_free():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.allclose(ginv(a), np.linalg.inv(a))


def test_pack_keeps_duals():
    lvl = next_level()
    out = pack([Dual(1.0, 2.0, lvl), 3.0])
    assert out.dtype == object
    assert primal(out[0]) == 1.0


@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_product_rule(a, b, t):
    lvl = next_level()
    x = Dual(t, 1.0, lvl)
    f = a * x + b
    g = x * x + 1.0
    h = f * g
    assert h.du == pytest.approx(f.du * g.re + f.re * g.du, abs=1e-9)
