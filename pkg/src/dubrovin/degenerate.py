"""Degenerate theta functions: finite exponential sums (nodal curves) and
polynomial thetas (node-free curves), with exact Hirota expansions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exactalg import VarTable, WPoly, monomials_of_degree
from .hirota import DubrovinPoint, evaluate_terms, summarize


@dataclass
class ExpSumTheta:
    """sum_k gamma_k exp(support_k . z)."""
    support: list
    coeffs: list

    def __post_init__(self):
        self.support = [tuple(int(a) for a in s) for s in self.support]
        if not self.support:
            raise ValueError("support must not be empty")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support vectors must be distinct")
        if len({len(s) for s in self.support}) != 1:
            raise ValueError("support vectors must have a common length")
        self.coeffs = list(self.coeffs)
        if len(self.coeffs) != len(self.support):
            raise ValueError("need one coefficient per support vector")
        if all(c == 0 for c in self.coeffs):
            raise ValueError("at least one coefficient must be nonzero")

    @property
    def g(self):
        return len(self.support[0])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(complex(c) * np.exp(np.dot(s, z)) for s, c in zip(self.support, self.coeffs))


def tetrahedral_theta():
    """gamma_0 + exp(z1) + exp(z2) - exp(z3) on the Delaunay tetrahedron."""
    return ExpSumTheta([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [1, 1, 1, -1])


def pair_polynomial(a, b, vt=None):
    """Coefficient of gamma_a gamma_b exp((a + b).z) in the Hirota form for
    a != b: with p = (a - b).U, q = (a - b).V, r = (a - b).W,
        p^4 - 4 p r + 6 c p^2 + 3 q^2 + 16 d."""
    g = len(a)
    vt = vt or VarTable.standard(g, with_cd=True)
    diff = [x - y for x, y in zip(a, b)]

    def lin(block):
        out = WPoly.zero(vt)
        for i, k in enumerate(diff):
            if k:
                out = out + WPoly.var(vt, f"{block}{i + 1}") * k
        return out

    p, q, r = lin("u"), lin("v"), lin("w")
    c, d = WPoly.var(vt, "c"), WPoly.var(vt, "d")
    return p ** 4 - p * r * 4 + c * p * p * 6 + q * q * 3 + d * 16


def expsum_hirota_symbolic(support):
    """key (sum of two support vectors) -> list of ((i, j), polynomial): the
    Hirota form of sum gamma_k exp(support_k . z) is
        sum_key exp(key . z) sum_{(i, j)} gamma_i gamma_j polynomial,
    with i == j for the diagonal terms 8 d gamma_i^2 and i < j otherwise."""
    support = [tuple(int(a) for a in s) for s in support]
    if not support:
        raise ValueError("support must not be empty")
    g = len(support[0])
    vt = VarTable.standard(g, with_cd=True)
    d = WPoly.var(vt, "d")
    out = {}
    for i, a in enumerate(support):
        key = tuple(2 * x for x in a)
        out.setdefault(key, []).append(((i, i), d * 8))
    for i, j in combinations(range(len(support)), 2):
        a, b = support[i], support[j]
        key = tuple(x + y for x, y in zip(a, b))
        out.setdefault(key, []).append(((i, j), pair_polynomial(a, b, vt)))
    return out


def expsum_hirota(theta):
    """key -> coefficient polynomial in U, V, W, c, d with the gammas inserted."""
    sym = expsum_hirota_symbolic(theta.support)
    out = {}
    for key, items in sym.items():
        total = None
        for (i, j), poly in items:
            gam = theta.coeffs[i] * theta.coeffs[j]
            if isinstance(gam, int):
                gam = Fraction(gam)
            term = poly * gam
            total = term if total is None else total + term
        out[key] = total
    return out


def expsum_solution_check(theta, point, grid, D=None):
    """KP/Hirota residuals of u = 2 d_x^2 log tau + c for the finite sum tau."""
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    if point.g != theta.g:
        raise ValueError("point and theta have different genus")
    pts = np.array(theta.support, dtype=float)
    gam = np.array([complex(c) for c in theta.coeffs])
    D = np.zeros(theta.g) if D is None else np.asarray(D, dtype=complex)
    grid = list(grid)
    evals = []
    for x, y, t in grid:
        z = point.U * x + point.V * y + point.W * t + D
        ex = pts @ z
        m = ex.real.max()
        evals.append(evaluate_terms(point, pts, gam * np.exp(ex - m)))
    return summarize(evals, grid)


# -- polynomial thetas ---------------------------------------------------

PQ = VarTable(("p", "q"))


@dataclass
class PolyTheta:
    poly: WPoly

    def __post_init__(self):
        if not self.poly:
            raise ValueError("polynomial theta must be nonzero")


def theta_surface_map(exponents):
    """z_i(p, q) = (p^(k+1) + q^(k+1)) / (k + 1) for differentials t^k dt."""
    out = []
    for k in exponents:
        if k < 0:
            raise ValueError("exponents must be non-negative")
        n = k + 1
        out.append(WPoly(PQ, {(n, 0): Fraction(1, n), (0, n): Fraction(1, n)}))
    return out


def z_vartable(g, weights=None):
    return VarTable([f"z{i}" for i in range(1, g + 1)], weights)


def polytheta_from_monomial_curve(exponents, poly=None, max_degree=12):
    """(PolyTheta, [z_i(p, q)]).  A supplied polynomial is verified;
    otherwise the lowest-degree polynomial vanishing on the theta surface is
    found by exact linear algebra (grading: z_i has weight k_i + 1)."""
    zs = theta_surface_map(exponents)
    g = len(zs)
    weights = [k + 1 for k in exponents]
    vt = z_vartable(g, weights)
    if poly is not None:
        if isinstance(poly, str):
            poly = WPoly.parse(poly, z_vartable(g))
        if poly.vt.names != vt.names:
            raise ValueError("polynomial variables must be z1..zg")
        poly = WPoly(vt, poly.terms)
        if poly.substitute(zs, PQ):
            raise ValueError("the polynomial does not vanish on the theta surface")
        return PolyTheta(poly), zs
    from .ideal import nullspace_fraction_free
    from ._modular import lcm_den
    for deg in range(1, max_degree + 1):
        mons = monomials_of_degree(vt, deg)
        if not mons:
            continue
        images = [WPoly.monomial(vt, e).substitute(zs, PQ) for e in mons]
        keys = sorted({k for im in images for k in im.terms})
        rows = []
        for k in keys:
            rows.append([im.coeff(k) for im in images])
        scale = lcm_den([c for r in rows for c in r] or [Fraction(1)])
        rows = [[int(c * scale) for c in r] for r in rows]
        ker = nullspace_fraction_free(rows, len(mons))
        if ker:
            vec = ker[0]
            # integer normalization: clear denominators, primitive content
            den = lcm_den(vec)
            ints = [int(v * den) for v in vec]
            from math import gcd
            cont = 0
            for v in ints:
                cont = gcd(cont, v)
            p = WPoly(vt, {e: Fraction(v, cont) for e, v in zip(mons, ints) if v})
            lead = p.sorted_terms()[0][1]
            if lead < 0:
                p = -p
            return PolyTheta(p), zs
    raise ValueError(f"no polynomial theta up to weighted degree {max_degree}")


# -- graph curves --------------------------------------------------------

U3 = VarTable(("u1", "u2", "u3"))
LINE_VT = VarTable(("s", "a", "b", "c"))


def _linear(form, vt=U3):
    if isinstance(form, str):
        form = WPoly.parse(form, vt)
    if not form or any(sum(e) != 1 for e in form.terms):
        raise ValueError("component is not a linear form")
    return [Fraction(form.coeff(tuple(1 if k == i else 0 for k in range(len(vt))))) for i in range(len(vt))]


def _kernel_basis(coeffs):
    """Two rational vectors spanning {x : coeffs . x = 0} in Q^3."""
    i = next(k for k, c in enumerate(coeffs) if c)
    out = []
    for j in range(3):
        if j == i:
            continue
        v = [Fraction(0)] * 3
        v[j] = Fraction(1)
        v[i] = -coeffs[j] / coeffs[i]
        out.append(v)
    return out


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def line_parametrization(factor, others):
    """Cleared orbit coordinates of the lifted canonical curve along the line
    {factor = 0}, as polynomials in (s, a, b, c).

    P(s) = p0 + s q spans the line and N(s) is the product of the other
    factors at P(s).  The dualizing differentials restrict to mu P / N ds,
    where p0 x q = mu * (coefficients of factor); with the sign convention
    of lift_canonical, U = -mu P / N, V = dU/ds, W = 1/2 d^2U/ds^2.  These
    are multiplied by N, N^2, N^3, which the group action absorbs."""
    L = LINE_VT
    coeffs = _linear(factor)
    p0, q = _kernel_basis(coeffs)
    cr = _cross(p0, q)
    k = next(i for i, c in enumerate(coeffs) if c)
    mu = cr[k] / coeffs[k]
    s = WPoly.var(L, "s")
    P = [WPoly.const(L, a) + s * b for a, b in zip(p0, q)]
    Q = [WPoly.const(L, b) for b in q]
    N = WPoly.const(L, 1)
    for o in others:
        oc = _linear(o)
        N = N * sum((Pi * c for Pi, c in zip(P, oc)), WPoly.zero(L))
    if not N:
        raise ValueError("repeated component: the remaining factors vanish on the line")
    N1 = N.diff("s")
    N2 = N1.diff("s")
    Uc = [Pi * -mu for Pi in P]
    Vc = [(Qi * N - Pi * N1) * -mu for Pi, Qi in zip(P, Q)]
    Wc = [(Pi * N * N2 + Qi * N * N1 * 2 - Pi * N1 * N1 * 2) * (mu / 2) for Pi, Qi in zip(P, Q)]
    a, b, c = (WPoly.var(L, n) for n in "abc")
    u = [a * x for x in Uc]
    v = [b * x * N * 2 + a * a * y for x, y in zip(Uc, Vc)]
    w = [c * x * N * N + a * b * y * N * 3 + a ** 3 * z for x, y, z in zip(Uc, Vc, Wc)]
    return u, v, w


def graph_curve_components(f_factors, candidate):
    """Per line component, whether the candidate vanishes on its orbit."""
    vt = VarTable.standard(3)
    if isinstance(candidate, str):
        candidate = WPoly.parse(candidate, vt)
    if candidate.vt != vt:
        candidate = candidate.embed(vt)
    if candidate and candidate.weighted_degree() == "inhomogeneous":
        raise ValueError("candidate must be homogeneous")
    out = []
    for k, fac in enumerate(f_factors):
        others = [o for j, o in enumerate(f_factors) if j != k]
        u, v, w = line_parametrization(fac, others)
        out.append(not candidate.substitute(u + v + w, LINE_VT))
    return out


def graph_curve_membership(f_factors, candidate):
    return all(graph_curve_components(f_factors, candidate))


def product_of_factors(f_factors):
    out = WPoly.const(U3, 1)
    for fac in f_factors:
        out = out * (WPoly.parse(fac, U3) if isinstance(fac, str) else fac)
    return out


FOUR_LINES = ["u2", "u3", "u2 - u1", "u3 - u1"]
