import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from dubrovin.curvefield import XY, CurveElem, PlaneCurve, implicit_derivative, trott_curve
from dubrovin.exactalg import WPoly
from dubrovin.param import (GroupElement, adapt_coordinates, apply_group, clear_denominators,
                            lift_canonical, orbit_coordinates, orbit_surface_equations)

HEX = PlaneCurve("y^2 - x^6 + 1")


def P(s):
    return WPoly.parse(s, XY)


def E(C, num, yk=0):
    return CurveElem(C, P(num), {P("y"): yk} if yk else None)


def hex_point(x):
    return x, cmath.sqrt(x ** 6 - 1)


def test_genus2_running_coordinates(genus2_param):
    p = genus2_param
    assert p.U[0] == E(HEX, "-1", 1)
    assert p.U[1] == E(HEX, "-x", 1)
    assert p.V[0] == E(HEX, "3*x^5", 3)
    assert p.V[1] == E(HEX, "2*y^2 + 3", 3)
    assert p.W[0] == E(HEX, "-(12*y^2 + 27)*x^4/2", 5)
    assert p.W[1] == E(HEX, "-(6*y^2 + 27)*x^5/2", 5)
    # (2y)^2 * (-1/y) = -4y
    assert p.cleared[0][0] == P("-4*y")


def test_derivative_chain(random_quartic_params, genus2_param):
    for p in random_quartic_params + [genus2_param]:
        for u, v, w in zip(p.U, p.V, p.W):
            assert v == implicit_derivative(u)
            assert w * 2 == implicit_derivative(v)


def test_trott_display_coordinates(trott_param_display):
    C = trott_param_display.curve
    fy = C.fy
    V = [e.cleared(fy, 3) for e in trott_param_display.V]
    W = [e.cleared(fy, 5) for e in trott_param_display.W]
    nf = lambda s: C.normal_form(P(s))
    # printed v1 and v3, with the evident factors of x restored
    assert V[0] == nf("12*(39556*x^3*y^2-4650*x^3-13950*x*y^2+2025*x)")
    assert V[1] == nf("4*(79112*x^4*y^2-13950*x^4-13950*x^2*y^2+6075*x^2-3969*y^2)")
    assert V[2] == nf("496*(638*x^2-225)*x*y^3")
    assert W[0] == nf("(450627015168*x^10+1095273995200*x^8*y^2-982215036000*x^8"
                      "-1260877167000*x^6*y^2+710159081508*x^6+430938071100*x^4*y^2"
                      "-196724295000*x^4-30435203250*x^2*y^2+11445723549*x^2"
                      "-5650169175*y^2+2242385775)/3")
    assert W[1] == nf("(225313507584*x^11+547636997600*x^9*y^2-391782402000*x^9"
                      "-355914999000*x^7*y^2+132297850476*x^7-102485711700*x^5*y^2"
                      "+68233160700*x^5+101045778750*x^3*y^2-45254399085*x^3"
                      "-16950507525*x*y^2+6727157325*x)/3")
    assert W[2] == nf("62/3*(25236728*x^6-14833500*x^4+1652778*x^2+297675)"
                      "*(144*x^4+350*x^2*y^2-225*x^2-225*y^2+81)*y")


def test_trott_printed_w2_constant_terms_are_off(trott_param_display):
    # the printed w2 has its last two terms without the factor x
    C = trott_param_display.curve
    W2 = trott_param_display.W[1].cleared(C.fy, 5)
    printed = C.normal_form(P(
        "(225313507584*x^11+547636997600*x^9*y^2-391782402000*x^9"
        "-355914999000*x^7*y^2+132297850476*x^7-102485711700*x^5*y^2"
        "+68233160700*x^5+101045778750*x^3*y^2-45254399085*x^3"
        "-16950507525*y^2+6727157325)/3"))
    assert W2 != printed


def test_cleared_same_weighted_point(genus2_param):
    p = genus2_param
    for x0 in (0.4 + 0.3j, 1.7 - 0.2j, -0.9 + 1.1j):
        x, y = hex_point(x0)
        U, V, W = p.evaluate(x, y)
        Uc, Vc, Wc = p.evaluate(x, y, cleared=True)
        lam = complex(HEX.fy.evaluate([x, y])) ** 2
        assert np.allclose(Uc, lam * U, rtol=1e-12)
        assert np.allclose(Vc, lam ** 2 * V, rtol=1e-12)
        assert np.allclose(Wc, lam ** 3 * W, rtol=1e-12)


def test_group_identity_and_law(genus2_param):
    p = genus2_param
    same = apply_group(p, GroupElement(1, 0, 0))
    assert all(a == b for a, b in zip(same.coordinates(), p.coordinates()))
    g1 = GroupElement(Fraction(2), Fraction(-1, 3), Fraction(5))
    g2 = GroupElement(Fraction(-3, 2), Fraction(4), Fraction(1, 7))
    lhs = apply_group(apply_group(p, g2), g1)
    rhs = apply_group(p, g1 * g2)
    assert all(a == b for a, b in zip(lhs.coordinates(), rhs.coordinates()))
    with pytest.raises(ValueError):
        GroupElement(0, 1, 1)


def test_group_law_on_matrices():
    g1 = GroupElement(Fraction(2), Fraction(-1, 3), Fraction(5))
    g2 = GroupElement(Fraction(-3, 2), Fraction(4), Fraction(1, 7))
    A, B = np.array(g1.matrix(), dtype=object), np.array(g2.matrix(), dtype=object)
    assert (A.dot(B) == np.array((g1 * g2).matrix(), dtype=object)).all()


def test_symbolic_orbit_matches_numeric(genus2_param):
    u, v, w = apply_group(genus2_param, "symbolic")
    g = GroupElement(3, -2, 5)
    un, vn, wn = orbit_coordinates(genus2_param, symbolic=False, g=g)
    for s, n in zip(u + v + w, un + vn + wn):
        assert s.substitute([WPoly.var(XY, "x"), WPoly.var(XY, "y"),
                             WPoly.const(XY, 3), WPoly.const(XY, -2), WPoly.const(XY, 5)], XY) == n


def test_orbit_surface_equations():
    eq = orbit_surface_equations([1, 0], [0, 0], [0, 0])
    assert eq[0] == WPoly.parse("u2", eq[0].vt)
    rng = np.random.default_rng(5)
    U, V, W = (rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(3))
    eqs = orbit_surface_equations(U, V, W)
    assert len(eqs) == 9
    g = GroupElement(1.3 - 0.4j, 0.7 + 0.2j, -1.1 + 0.5j)
    for pt in ((U, V, W), g.act(U, V, W)):
        vals = list(pt[0]) + list(pt[1]) + list(pt[2])
        for e in eqs:
            assert abs(e.evaluate(vals)) < 1e-10
    far = list(U) + list(V + 1) + list(W)
    assert max(abs(e.evaluate(far)) for e in eqs) > 1e-3
    with pytest.raises(ValueError):
        orbit_surface_equations([0, 0], [1, 0], [0, 1])


def test_adapt_coordinates():
    rng = np.random.default_rng(2)
    U, V, W = (rng.normal(size=2) + 0j for _ in range(3))
    out = adapt_coordinates(U, V, W, 2j * math.pi * np.eye(2))
    assert all(np.allclose(a, b) for a, b in zip(out, (U, V, W)))
    out = adapt_coordinates(U, V, W, np.eye(2) / (2j * math.pi))
    assert all(np.allclose(a, -4 * math.pi ** 2 * b) for a, b in zip(out, (U, V, W)))
    Pa = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = adapt_coordinates(U, V, W, Pa)
    b = adapt_coordinates(U, V, W, 4 * Pa)
    assert all(np.allclose(x, 4 * y) for x, y in zip(a, b))
    with pytest.raises(ValueError):
        adapt_coordinates(U, V, W, np.zeros((2, 2)))


def test_residual_denominator_rejected():
    C = trott_curve()
    bad = [CurveElem(C, P("1"), {P("x + 2"): 1})]
    with pytest.raises(ValueError):
        clear_denominators(lift_canonical(C, bad))
