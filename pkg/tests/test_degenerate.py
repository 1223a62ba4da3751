import math
from fractions import Fraction

import numpy as np
import pytest

from dubrovin.degenerate import (FOUR_LINES, ExpSumTheta, PolyTheta, expsum_hirota, expsum_hirota_symbolic,
                                 expsum_solution_check, graph_curve_components, graph_curve_membership,
                                 line_parametrization, pair_polynomial, polytheta_from_monomial_curve,
                                 product_of_factors, tetrahedral_theta, theta_surface_map)
from dubrovin.exactalg import VarTable, WPoly
from dubrovin.hirota import DubrovinPoint, hirota_quartic
from dubrovin.ideal import theorem_generators

VT = VarTable.standard(3, with_cd=True)

MIXED = "u{i}^4 + 6*c*u{i}^2 + 3*v{i}^2 - 4*u{i}*w{i} + 16*d"
PAIR = ("u{i}^4 - 4*u{i}^3*u{j} + 6*u{i}^2*u{j}^2 + 6*c*u{i}^2 - 4*u{i}*u{j}^3 - 12*c*u{i}*u{j}"
        " + u{j}^4 - 4*u{i}*w{i} + 4*u{i}*w{j} + 6*c*u{j}^2 + 4*w{i}*u{j} - 4*w{j}*u{j}"
        " + 3*v{i}^2 - 6*v{i}*v{j} + 3*v{j}^2 + 16*d")

E = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def unit_sum(*idx):
    return tuple(sum(E[k][n] for k in idx) for n in range(3))


def displayed_expansion():
    d8 = WPoly.parse("8*d", VT)
    want = {unit_sum(k, k): [((k, k), d8)] for k in range(4)}
    for i in (1, 2, 3):
        want[unit_sum(0, i)] = [((0, i), WPoly.parse(MIXED.format(i=i), VT))]
    for i, j in ((1, 2), (1, 3), (2, 3)):
        want[unit_sum(i, j)] = [((i, j), WPoly.parse(PAIR.format(i=i, j=j), VT))]
    return want


def test_tetrahedral_expansion_exact():
    got = expsum_hirota_symbolic(E)
    want = displayed_expansion()
    assert set(got) == set(want)
    for key in want:
        assert got[key] == want[key]
    for items in got.values():
        for _, p in items:
            assert all(isinstance(c, Fraction) for c in p.terms.values())


def test_tetrahedral_numeric_gammas():
    H = expsum_hirota(tetrahedral_theta())
    want = displayed_expansion()
    for key, [((i, j), p)] in want.items():
        sign = [1, 1, 1, -1][i] * [1, 1, 1, -1][j]
        assert H[key] == p * sign


def test_single_exponential():
    th = ExpSumTheta([(2, -1)], [3])
    H = expsum_hirota(th)
    assert list(H) == [(4, -2)]
    assert H[(4, -2)] == WPoly.parse("72*d", VarTable.standard(2, with_cd=True))
    pt = DubrovinPoint([0.4, 1.3], [0, 0], [0, 0], c=0.7, d=0)
    grid = [(x, y, t) for x in (-1, 0, 2) for y in (0, 1) for t in (0, 0.5)]
    r = expsum_solution_check(th, pt, grid)
    assert r.hirota_relative <= 1e-12 and r.kp <= 1e-12 and not r.singular


def test_two_term_support():
    a, b = (1, 2), (-1, 0)
    vt = VarTable.standard(2, with_cd=True)
    sym = expsum_hirota_symbolic([a, b])
    assert set(sym) == {(2, 4), (-2, 0), (0, 2)}
    [((i, j), p)] = sym[(0, 2)]
    # hand expansion with p = 2 u1 + 2 u2, q = 2 v1 + 2 v2, r = 2 w1 + 2 w2
    P, Q, R = (WPoly.parse(f"2*{x}1 + 2*{x}2", vt) for x in "uvw")
    c, d = WPoly.var(vt, "c"), WPoly.var(vt, "d")
    assert (i, j) == (0, 1)
    assert p == P ** 4 - P * R * 4 + c * P * P * 6 + Q * Q * 3 + d * 16
    # the pair polynomial is symmetric under swapping the two exponents
    assert pair_polynomial(a, b, vt) == pair_polynomial(b, a, vt)


def soliton_point(kappa, c=0.0):
    """U = kappa_i - kappa_0, V, W from the squares and cubes, then the shift
    W -> W + 3c/2 U which keeps every pair coefficient zero."""
    k = np.asarray(kappa, float)
    U = k[1:] - k[0]
    V = k[1:] ** 2 - k[0] ** 2
    W = k[1:] ** 3 - k[0] ** 3 + 1.5 * c * U
    return np.concatenate([U, V, W, [c, 0.0]])


def coefficient_values(H, x):
    return np.array([complex(p.evaluate(list(x))) for p in H.values()])


def solve_tetrahedral(x0, iters=30):
    """Gauss-Newton on the seven coefficient equations."""
    H = expsum_hirota(tetrahedral_theta())
    derivs = {k: [p.diff(n) for n in VT.names] for k, p in H.items()}
    x = np.array(x0, dtype=float)
    for _ in range(iters):
        F = coefficient_values(H, x).real
        J = np.array([[float(q.evaluate(list(x))) for q in derivs[k]] for k in H])
        x = x - np.linalg.lstsq(J, F, rcond=None)[0]
    return H, x


def test_tetrahedral_solution():
    rng = np.random.default_rng(4)
    start = soliton_point([0.1, 0.8, -0.5, 0.3], c=0.2) + 0.02 * rng.normal(size=11)
    H, x = solve_tetrahedral(start)
    assert np.abs(coefficient_values(H, x)).max() < 1e-12
    pt = DubrovinPoint(x[0:3], x[3:6], x[6:9], c=x[9], d=x[10])
    grid = [(x, y, t) for x in (-1, 0.5, 2) for y in (-0.5, 0.7) for t in (0, 1)]
    r = expsum_solution_check(tetrahedral_theta(), pt, grid)
    assert r.hirota_relative <= 1e-8 and r.kp_relative <= 1e-8


def test_tetrahedral_negative_control():
    rng = np.random.default_rng(9)
    x = rng.normal(size=11)
    pt = DubrovinPoint(x[0:3], x[3:6], x[6:9], c=x[9], d=x[10])
    r = expsum_solution_check(tetrahedral_theta(), pt, [(0.1, 0.2, 0.3), (1, -1, 0.5)])
    assert r.hirota_relative > 1e-2
    with pytest.raises(ValueError):
        expsum_solution_check(tetrahedral_theta(), DubrovinPoint([1], [0], [0]), [(0, 0, 0)])


def test_bridge_to_theta_genus1():
    B = -2 * math.pi
    z = 0.3 + 0.2j
    H = hirota_quartic(np.array([z]), [[B]]).coefficients()
    names = VarTable.standard(1, with_cd=True).names
    errs = []
    for N in (2, 4, 6):
        ns = range(-N, N + 1)
        th = ExpSumTheta([(n,) for n in ns], [math.exp(0.5 * B * n * n) for n in ns])
        total = {}
        for key, p in expsum_hirota(th).items():
            for e, c in p.terms.items():
                total[e] = total.get(e, 0) + complex(c) * np.exp(key[0] * z)
        assert len(names) == len(next(iter(total)))
        errs.append(max(abs(total.get(e, 0) - H.get(e, 0)) for e in set(total) | set(H)))
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-12
    assert errs[2] < 1e-10 * max(abs(v) for v in H.values())


def test_polytheta_quintic():
    PT, zs = polytheta_from_monomial_curve((4, 1, 0), "z3^5 - 20*z2^2*z3 + 20*z1")
    pq = zs[0].vt
    assert zs[0] == WPoly.parse("(p^5 + q^5)/5", pq)
    assert zs[1] == WPoly.parse("(p^2 + q^2)/2", pq)
    assert zs[2] == WPoly.parse("p + q", pq)
    assert not PT.poly.substitute(zs, pq)
    found, _ = polytheta_from_monomial_curve((4, 1, 0))
    assert found.poly.terms == PT.poly.terms


def test_polytheta_symmetric():
    zs = theta_surface_map((4, 1, 0))
    pq = zs[0].vt
    swap = [WPoly.var(pq, "q"), WPoly.var(pq, "p")]
    for z in zs:
        assert z.substitute(swap, pq) == z


def test_polytheta_errors():
    with pytest.raises(ValueError):
        polytheta_from_monomial_curve((0,), "z1")
    with pytest.raises(ValueError):
        polytheta_from_monomial_curve((4, 1, 0), "z3^5 - 20*z2^2*z3 + 19*z1")
    with pytest.raises(ValueError):
        theta_surface_map((-1,))
    with pytest.raises(ValueError):
        PolyTheta(WPoly.zero(VarTable(("z1",))))


def test_graph_curve_lines():
    f = product_of_factors(FOUR_LINES)
    assert f == WPoly.parse("u2*u3*(u2 - u1)*(u3 - u1)", f.vt)
    assert graph_curve_membership(FOUR_LINES, f.embed(VarTable.standard(3)))
    comps = graph_curve_components(FOUR_LINES, "u1")
    assert not all(comps)
    gens = theorem_generators("genus3_cubics", f) + theorem_generators("genus3_quartics", f)
    for g in gens:
        assert graph_curve_membership(FOUR_LINES, g)
    assert not graph_curve_membership(FOUR_LINES, "u1*v1 - w1")


def test_graph_curve_associated_prime():
    # on the line u2 = 0 the lifted coordinates of index 2 vanish identically
    others = [o for o in FOUR_LINES if o != "u2"]
    u, v, w = line_parametrization("u2", others)
    assert not u[1] and not v[1] and not w[1]
    assert all(graph_curve_components(FOUR_LINES, s)[0] for s in ("u2", "v2", "w2"))
    assert not graph_curve_components(FOUR_LINES, "u2")[1]


def test_graph_curve_errors():
    with pytest.raises(ValueError):
        graph_curve_membership(["u1^2", "u2"], "u1")
    with pytest.raises(ValueError):
        graph_curve_membership(["u2", "u2"], "u1")
    with pytest.raises(ValueError):
        graph_curve_membership(FOUR_LINES, "u1 + v1")


def test_expsum_validation():
    for support, coeffs in (([], []), ([(0,), (0,)], [1, 1]), ([(0,), (0, 1)], [1, 1]),
                            ([(0,)], [1, 2]), ([(0,), (1,)], [0, 0])):
        with pytest.raises(ValueError):
            ExpSumTheta(support, coeffs)
    with pytest.raises(ValueError):
        expsum_hirota_symbolic([])
    th = ExpSumTheta([(0, 1), (1, 0)], [2, -1])
    z = np.array([0.3, -0.2])
    assert abs(th(z) - (2 * math.exp(-0.2) - math.exp(0.3))) < 1e-14
