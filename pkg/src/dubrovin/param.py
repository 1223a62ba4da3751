"""The lifted canonical curve (U, V, W) and its orbit under the group G.

G is the group of lower triangular 3x3 matrices
    [[a, 0, 0], [2b, a^2, 0], [c, 3ab, a^3]]   (acting on the block columns
as u -> a u, v -> 2 b u + a^2 v, w -> c u + 3 a b v + a^3 w).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .curvefield import XY, PlaneCurve, holomorphic_basis, implicit_derivative
from .exactalg import VarTable, WPoly

ORBIT_VT = VarTable(("x", "y", "a", "b", "c"))


@dataclass(frozen=True)
class GroupElement:
    a: object = 1
    b: object = 0
    c: object = 0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("group element needs a != 0")

    def matrix(self):
        a, b, c = self.a, self.b, self.c
        return [[a, 0, 0], [2 * b, a * a, 0], [c, 3 * a * b, a ** 3]]

    def __mul__(self, other):
        """Composition: (g1 * g2)(p) = g1(g2(p))."""
        a1, b1, c1 = self.a, self.b, self.c
        a2, b2, c2 = other.a, other.b, other.c
        # entries of the matrix product
        a = a1 * a2
        b = b1 * a2 + a1 * a1 * b2
        c = c1 * a2 + 3 * a1 * b1 * 2 * b2 + a1 ** 3 * c2
        return GroupElement(a, b, c)

    def act(self, u, v, w):
        a, b, c = self.a, self.b, self.c
        return (a * u, 2 * b * u + a * a * v, c * u + 3 * a * b * v + a ** 3 * w)


@dataclass
class DubrovinParam:
    curve: PlaneCurve
    U: list
    V: list
    W: list
    cleared: Optional[tuple] = None
    basis_numerators: list = field(default_factory=list)

    @property
    def g(self):
        return len(self.U)

    def coordinates(self):
        return list(self.U) + list(self.V) + list(self.W)

    def evaluate(self, x, y, cleared=False):
        """Numeric (U, V, W) at a curve point."""
        if cleared:
            if self.cleared is None:
                raise ValueError("parametrization has not been cleared")
            return tuple(np.array([complex(p.evaluate([x, y])) for p in block])
                         for block in self.cleared)
        return tuple(np.array([complex(e.evaluate(x, y)) for e in block])
                     for block in (self.U, self.V, self.W))


def lift_canonical(C, basis=None):
    """U = -H, V = -dH/dx, W = -(1/2) d^2H/dx^2 for the basis H."""
    if basis is None:
        basis = holomorphic_basis(C)
    U = [-h for h in basis]
    V = [implicit_derivative(u, C) for u in U]
    W = [implicit_derivative(v, C) * Fraction(1, 2) for v in V]
    nums = [h.num for h in basis]
    return DubrovinParam(C, U, V, W, None, nums)


def clear_denominators(p):
    """Multiply U, V, W by f_y^2, f_y^4, f_y^6."""
    C = p.curve
    fy = C.fy
    try:
        blocks = tuple([e.cleared(fy, k) for e in blk]
                       for blk, k in ((p.U, 2), (p.V, 4), (p.W, 6)))
    except ValueError as exc:
        raise ValueError("residual denominator: basis is not of the h/f_y form") from exc
    return DubrovinParam(C, p.U, p.V, p.W, blocks, p.basis_numerators)


def orbit_coordinates(p, symbolic=True, g=None):
    """Cleared coordinates after the group action, as polynomials in
    x, y, a, b, c (symbolic) or in x, y for a numeric group element."""
    if p.cleared is None:
        p = clear_denominators(p)
    Uc, Vc, Wc = p.cleared
    if g is None and symbolic:
        a = WPoly.var(ORBIT_VT, "a")
        b = WPoly.var(ORBIT_VT, "b")
        c = WPoly.var(ORBIT_VT, "c")
        emb = lambda q: q.embed(ORBIT_VT)
        Uc, Vc, Wc = ([emb(q) for q in blk] for blk in (Uc, Vc, Wc))
    else:
        a, b, c = g.a, g.b, g.c
    C = p.curve

    def nf(q):
        if q.vt == XY:
            return C.normal_form(q)
        return _nf_orbit(C, q)

    u = [nf(a * q) for q in Uc]
    v = [nf(2 * b * q + a * a * r) for q, r in zip(Uc, Vc)]
    w = [nf(c * q + 3 * a * b * r + a ** 3 * s) for q, r, s in zip(Uc, Vc, Wc)]
    return u, v, w


def _nf_orbit(C, q):
    """y-reduce a polynomial in (x, y, a, b, c)."""
    groups = {}
    for e, coef in q.terms.items():
        key = e[2:]
        groups.setdefault(key, {})[e[:2]] = coef
    out = {}
    for key, terms in groups.items():
        red = C.normal_form(WPoly(XY, terms))
        for e2, coef in red.terms.items():
            out[e2 + key] = coef
    return WPoly(ORBIT_VT, out)


def apply_group(p, g):
    """Apply a group element.  With g = "symbolic" the result is the triple
    of coordinate lists in x, y, a, b, c (denominators cleared); with a
    GroupElement it is a new DubrovinParam over the same curve."""
    if isinstance(g, str):
        if g != "symbolic":
            raise ValueError("g must be a GroupElement or 'symbolic'")
        return orbit_coordinates(p, symbolic=True)
    if g.a == 0:
        raise ValueError("group element needs a != 0")
    a, b, c = (Fraction(t) if isinstance(t, int) else t for t in (g.a, g.b, g.c))
    U = [u * a for u in p.U]
    V = [u * (2 * b) + v * (a * a) for u, v in zip(p.U, p.V)]
    W = [u * c + v * (3 * a * b) + w * (a ** 3) for u, v, w in zip(p.U, p.V, p.W)]
    out = DubrovinParam(p.curve, U, V, W, None, p.basis_numerators)
    if p.cleared is not None:
        out = clear_denominators(out)
    return out


def orbit_surface_equations(Ut, Vt, Wt, vt=None):
    """Equations of the G-orbit of a numeric point (Ut, Vt, Wt), three
    families indexed by i < j."""
    Ut, Vt, Wt = (list(t) for t in (Ut, Vt, Wt))
    g = len(Ut)
    if all(t == 0 for t in Ut):
        raise ValueError("orbit equations need a nonzero U")
    if vt is None:
        vt = VarTable.standard(g)
    u = [WPoly.var(vt, f"u{i}") for i in range(1, g + 1)]
    v = [WPoly.var(vt, f"v{i}") for i in range(1, g + 1)]
    w = [WPoly.var(vt, f"w{i}") for i in range(1, g + 1)]
    pairs = [(i, j) for i in range(g) for j in range(i + 1, g)]
    out = [u[j] * Ut[i] - u[i] * Ut[j] for i, j in pairs]
    out += [(v[i] * Ut[j] - v[j] * Ut[i]) * Ut[i] - u[i] * (u[j] * Vt[i] - u[i] * Vt[j])
            for i, j in pairs]
    out += [(w[i] * Ut[j] - w[j] * Ut[i]) * (2 * Ut[j] ** 2)
            - u[j] * u[j] * (u[j] * Wt[i] - u[i] * Wt[j]) * 2
            + u[j] * (v[i] * Vt[j] - v[j] * Vt[i]) * (3 * Ut[j])
            for i, j in pairs]
    return out


def adapt_coordinates(Ut, Vt, Wt, Pa, cond_limit=1e12):
    """U, V, W for the adapted basis: each vector times 2*pi*i * Pa^{-1}."""
    Pa = np.asarray(Pa, dtype=complex)
    if np.linalg.cond(Pa) > cond_limit:
        raise ValueError("period matrix is singular or badly conditioned")
    M = 2j * np.pi * np.linalg.inv(Pa)
    return tuple(M @ np.asarray(t, dtype=complex) for t in (Ut, Vt, Wt))
