import math

import numpy as np
import pytest

from dubrovin import presets
from dubrovin.curvefield import PlaneCurve, holomorphic_basis, trott_curve
from dubrovin.exactalg import VarTable, WPoly
from dubrovin.ideal import theorem_generators
from dubrovin.param import adapt_coordinates, lift_canonical
from dubrovin.schottky import (genus2_quintic_space, lambda_nullspace, lambda_system,
                               recover_canonical_quartics, u_vartable)
from dubrovin.theta import doubled_constants

from conftest import SECRET_TROTT

PI = math.pi


def relative_value(p, vals):
    """|p(vals)| over the sum of the term moduli."""
    total = 0j
    scale = 0.0
    for e, c in p.terms.items():
        t = complex(c) * np.prod([v ** k for v, k in zip(vals, e)])
        total += t
        scale += abs(t)
    return abs(total) / scale


def trott_points(n, rng):
    """Points (x, y) of the Trott curve, y solved from the quartic in y."""
    out = []
    while len(out) < n:
        x = complex(rng.uniform(-1.2, 1.2), rng.uniform(-0.3, 0.3))
        # 144 y^4 + (350 x^2 - 225) y^2 + (144 x^4 - 225 x^2 + 81) = 0
        roots = np.roots([144, 0, 350 * x * x - 225, 0, 144 * x ** 4 - 225 * x * x + 81])
        out.append((x, roots[rng.integers(4)]))
    return out


def test_nullspace_dimensions(genus2_constants, trott_constants):
    s2 = lambda_nullspace(genus2_constants)
    s3 = lambda_nullspace(trott_constants)
    assert (s2.dimension, s3.dimension) == (0, 1)
    assert s2.gap >= 1e3 and s3.gap >= 1e3
    lam = s3.basis[0]
    M = lambda_system(trott_constants)
    assert np.abs(M @ lam).max() < 1e-8 * np.abs(M).max()


def test_random_genus3_dimension():
    rng = np.random.default_rng(21)
    M = rng.normal(size=(3, 3))
    S = rng.normal(size=(3, 3))
    B = -(M @ M.T + 2 * np.eye(3)) + 1j * (S + S.T)
    assert lambda_nullspace(doubled_constants(B)).dimension == 2 ** 3 - 6 - 1


def test_recovered_trott_quartic(trott_constants):
    (q,) = recover_canonical_quartics(trott_constants)
    vt = u_vartable(3)
    assert abs(q.coeff((2, 1, 1)) - 1) < 1e-12
    top = SECRET_TROTT[(2, 1, 1)]
    for e, c in SECRET_TROTT.items():
        assert abs(q.coeff(e) - c / top) <= 1e-4 * abs(c / top) + 1e-12
    assert set(q.terms) == set(SECRET_TROTT)
    assert q.vt == vt


def test_recovered_quartic_vanishes_on_curve(trott_constants):
    (q,) = recover_canonical_quartics(trott_constants)
    C = trott_curve()
    H = holomorphic_basis(C, ["x", "y", "1"])
    rng = np.random.default_rng(3)
    for x, y in trott_points(12, rng):
        U = np.array([-complex(h.evaluate(x, y)) for h in H])
        Ua, _, _ = adapt_coordinates(U, U, U, presets.TROTT_PA)
        assert relative_value(q, Ua) < 1e-6


def test_recovery_stable_under_tolerance(trott_constants):
    (q,) = recover_canonical_quartics(trott_constants)
    (q2,) = recover_canonical_quartics(doubled_constants(presets.TROTT_B, tol=1e-13, tol_d4=5e-11))
    assert all(abs(complex(q.coeff(e)) - complex(q2.coeff(e))) < 1e-8 for e in q.terms)


def adapted_genus2(rng, n):
    C = PlaneCurve(presets.GENUS2_CURVE["f"])
    P = lift_canonical(C, holomorphic_basis(C, presets.GENUS2_CURVE["basis"]))
    out = []
    for _ in range(n):
        x = complex(rng.normal(), rng.normal())
        y = np.sqrt(x ** 6 - 1)
        U, V, W = P.evaluate(x, y)
        # the printed periods belong to the differentials dx/(2y), x dx/(2y)
        out.append(adapt_coordinates(U, V, W, 2 * presets.GENUS2_PA))
    return out


def test_genus2_quintics_vanish(genus2_constants):
    qs, gap = genus2_quintic_space(genus2_constants)
    assert len(qs) == 2 and gap > 1e3
    rng = np.random.default_rng(0)
    for U, V, W in adapted_genus2(rng, 6):
        vals = list(U) + list(V) + list(W)
        for q in qs:
            assert relative_value(q, vals) < 1e-5


def test_genus2_quintics_involution(genus2_constants):
    qs, _ = genus2_quintic_space(genus2_constants)
    rng = np.random.default_rng(7)
    for U, V, W in adapted_genus2(rng, 4):
        vals = list(U) + list(-V) + list(W)
        for q in qs:
            assert relative_value(q, vals) < 1e-5


def test_genus2_quintic_span(genus2_constants):
    # with algebraic-geometry derivatives the span holds the theorem quintics of
    # the sextic (r u1 + s u2)^6 + (s u1 + r u2)^6 in the adapted coordinates
    qs, _ = genus2_quintic_space(genus2_constants, derivative_scale=2j * PI)
    vt = VarTable.standard(2)
    u1, u2 = WPoly.var(vt, "u1"), WPoly.var(vt, "u2")
    r, s = 0.5596349 - 0.9693161j, 1.11926985
    Fbar = (u1 * r + u2 * s) ** 6 + (u1 * s + u2 * r) ** 6
    keys = sorted({e for p in qs for e in p.terms})
    M = np.array([[complex(p.coeff(e)) for e in keys] for p in qs]).T
    for t in theorem_generators("genus2_quintics", Fbar):
        assert set(t.terms) <= set(keys)
        b = np.array([complex(t.coeff(e)) for e in keys])
        x = np.linalg.lstsq(M, b, rcond=None)[0]
        assert np.linalg.norm(M @ x - b) / np.linalg.norm(b) < 1e-6


def test_genus2_required(trott_constants):
    with pytest.raises(ValueError):
        genus2_quintic_space(trott_constants)
    with pytest.raises(ValueError):
        recover_canonical_quartics(doubled_constants(presets.GENUS2_B))
