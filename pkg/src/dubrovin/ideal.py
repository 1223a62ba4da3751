"""Relations of the Dubrovin threefold: membership, graded implicitization,
trailing terms and the canonical initial ideal.

Polynomials live on VarTable.standard(g).  Exact answers come from two
engines: a symbolic one (substitute the orbit coordinates, reduce modulo f)
and the multimodular grid test in ``_modular`` which is much faster for
large degrees and equally rigorous.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import _modular
from .curvefield import XY
from .exactalg import (VarTable, WPoly, block_monomials, monomials_of_degree,
                       polarization_exponents, polarize, split_blocks, weights_from_blocks)
from .param import ORBIT_VT, _nf_orbit, clear_denominators, orbit_coordinates

INITIAL_WEIGHTS = {"u": 0, "v": 1, "w": 2}
DEFAULT_CAP = 200_000
# above this many unknowns the trailing space is built from the ladder
FULL_SPACE_LIMIT = 700


class NoSolution(ValueError):
    """No trailing polynomial exists in the given space."""


class Inconclusive(RuntimeError):
    """The structured search could not decide."""


class MatrixTooLarge(ValueError):
    pass


@dataclass
class GradedRelationSpace:
    degree: int
    basis: list
    dimension: int

    def contains(self, p):
        """Exact test whether p lies in the span of the basis."""
        if not p:
            return True
        return _reduce_against(p, self.basis).is_zero()


def _reduce_against(p, basis):
    """Reduce p by an echelon basis (distinct monic leading terms)."""
    r = p
    for b in basis:
        lead, _ = b.sorted_terms()[0]
        c = r.coeff(lead)
        if c:
            r = r - b * c
    return r


# -- parametrization helpers ---------------------------------------------

def _cleared(param):
    if param.cleared is None:
        param = clear_denominators(param)
    return param


def curve_data(param):
    """Cached multimodular data for a parametrization."""
    cached = getattr(param, "_modular_data", None)
    if cached is None:
        param = _cleared(param)
        cached = _modular.CurveData(param)
        try:
            object.__setattr__(param, "_modular_data", cached)
        except AttributeError:
            pass
    return cached


def _check_vars(p, param):
    g = param.g
    vt = VarTable.standard(g)
    if p.vt != vt:
        if set(p.vt.names) <= set(vt.names):
            p = p.embed(vt)
        else:
            raise ValueError(f"polynomial variables do not match genus {g}")
    return p


class _SymbolicOrbit:
    """Orbit coordinates in x, y, a, b, c with cached reduced powers."""

    def __init__(self, param):
        param = _cleared(param)
        self.curve = param.curve
        u, v, w = orbit_coordinates(param, symbolic=True)
        self.coords = u + v + w
        self._pow = {}
        self._mono = {}

    def power(self, k, m):
        key = (k, m)
        if key not in self._pow:
            if m == 1:
                self._pow[key] = self.coords[k]
            else:
                self._pow[key] = _nf_orbit(self.curve, self.power(k, m - 1) * self.coords[k])
        return self._pow[key]

    def monomial(self, e):
        e = tuple(e)
        if e in self._mono:
            return self._mono[e]
        n = len(e)
        if not any(e):
            val = WPoly.const(ORBIT_VT, 1)
        else:
            k = max(i for i in range(n) if e[i])
            rest = list(e)
            m = rest[k]
            rest[k] = 0
            val = self.monomial(tuple(rest))
            val = _nf_orbit(self.curve, val * self.power(k, m))
        self._mono[e] = val
        return val

    def substitute(self, p):
        out = WPoly.zero(ORBIT_VT)
        for e, c in p.terms.items():
            out = out + self.monomial(e).scale(c)
        return out


def _symbolic(param):
    cached = getattr(param, "_symbolic_orbit", None)
    if cached is None:
        cached = _SymbolicOrbit(param)
        try:
            object.__setattr__(param, "_symbolic_orbit", cached)
        except AttributeError:
            pass
    return cached


# -- operations ----------------------------------------------------------

def membership_check(p, param, method="modular"):
    """True iff p vanishes identically on the orbit parametrization."""
    p = _check_vars(p, param)
    if not p:
        return True
    if not p.is_exact():
        raise ValueError("membership needs rational coefficients")
    if p.weighted_degree() == "inhomogeneous":
        # the ideal is homogeneous: test each graded piece
        pieces = {}
        for e, c in p.terms.items():
            pieces.setdefault(p.term_weight(e), {})[e] = c
        return all(membership_check(WPoly(p.vt, t), param, method) for t in pieces.values())
    if method == "symbolic":
        return _symbolic(param).substitute(p).is_zero()
    if method != "modular":
        raise ValueError(f"unknown method {method!r}")
    return _modular.certify_zero(curve_data(param), p.terms)


def graded_implicitize(param, degree, cap=DEFAULT_CAP):
    """All relations of the given weighted degree, in reduced echelon form."""
    if degree < 1:
        raise ValueError("degree must be positive")
    g = param.g
    vt = VarTable.standard(g)
    cols = monomials_of_degree(vt, degree)
    if not cols:
        return GradedRelationSpace(degree, [], 0)
    orbit = _symbolic(param)
    images = [orbit.monomial(e) for e in cols]
    row_keys = sorted({k for im in images for k in im.terms})
    if len(row_keys) * len(cols) > cap:
        raise MatrixTooLarge(
            f"{len(row_keys)} x {len(cols)} matrix exceeds the cap of {cap} entries; "
            "raise cap to proceed")
    index = {k: i for i, k in enumerate(row_keys)}
    # columns scaled to integers; scaling a column rescales the kernel entry
    matrix = [[0] * len(cols) for _ in row_keys]
    col_scale = []
    for j, im in enumerate(images):
        den = _modular.lcm_den(im.terms.values())
        col_scale.append(den)
        for k, c in im.terms.items():
            matrix[index[k]][j] = int(c * den)
    kernel = nullspace_fraction_free(matrix, len(cols))
    polys = []
    for vec in kernel:
        terms = {cols[j]: Fraction(v) * col_scale[j] for j, v in enumerate(vec) if v}
        polys.append(WPoly(vt, terms))
    basis = echelon_basis(polys)
    return GradedRelationSpace(degree, basis, len(basis))


def nullspace_fraction_free(rows, ncols):
    """Integer-preserving (Bareiss) elimination; returns a kernel basis, one
    vector per free column, as lists of Fractions."""
    M = [list(r) for r in rows if any(r)]
    m = len(M)
    pivots = []
    prev = 1
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, m) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        a = pr[col]
        for i in range(r + 1, m):
            row = M[i]
            b = row[col]
            M[i] = [(a * x - b * y) // prev for x, y in zip(row, pr)]
        prev = a
        pivots.append(col)
        r += 1
        if r == m:
            break
    # back substitution over Q on the echelon rows
    E = [[Fraction(x) for x in M[i]] for i in range(r)]
    for i in range(r - 1, -1, -1):
        col = pivots[i]
        lead = E[i][col]
        E[i] = [x / lead for x in E[i]]
        for k in range(i):
            f = E[k][col]
            if f:
                E[k] = [x - f * y for x, y in zip(E[k], E[i])]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = -E[i][fc]
        basis.append(vec)
    return basis


def echelon_basis(polys):
    """Reduced echelon form in the canonical term order (monic leads)."""
    if not polys:
        return []
    vt = polys[0].vt
    keys = sorted({e for p in polys for e in p.terms},
                  key=lambda e: (sum(a * w for a, w in zip(e, vt.weights)), e), reverse=True)
    rows = [[p.coeff(e) for e in keys] for p in polys]
    rows = [[Fraction(x) for x in r] for r in rows]
    piv_rows = []
    r = 0
    for col in range(len(keys)):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_rows.append(r)
        r += 1
    return [WPoly(vt, {e: c for e, c in zip(keys, rows[i]) if c}) for i in range(r)]


# -- generators from the closed formulas ------------------------------

def homogenize_sextic(F, vt=None):
    """F(x) -> F(u2/u1) u1^6 on the u-variables of ``vt``."""
    if vt is None:
        vt = VarTable(("u1", "u2"))
    F = F if isinstance(F, WPoly) else WPoly.parse(str(F), VarTable(("x",)))
    xi = F.vt.index("x")
    out = {}
    for e, c in F.terms.items():
        k = e[xi]
        if k > 6:
            raise ValueError("F has degree above 6")
        ex = [0] * len(vt)
        ex[vt.index("u1")] = 6 - k
        ex[vt.index("u2")] = k
        out[tuple(ex)] = c
    return WPoly(vt, out)


def homogenize_plane(f, degree=None, vt=None):
    """f(x, y) -> u3^n f(u1/u3, u2/u3)."""
    if vt is None:
        vt = VarTable(("u1", "u2", "u3"))
    f = f if isinstance(f, WPoly) else WPoly.parse(str(f), XY)
    if f.vt != XY:
        f = f.embed(XY) if set(f.vt.names) <= {"x", "y"} else f.restrict(XY)
    n = max(sum(e) for e in f.terms) if degree is None else degree
    out = {}
    for (i, j), c in f.terms.items():
        ex = [0] * len(vt)
        ex[vt.index("u1")] = i
        ex[vt.index("u2")] = j
        ex[vt.index("u3")] = n - i - j
        out[tuple(ex)] = c
    return WPoly(vt, out)


def _to_standard(f, g):
    vt = VarTable.standard(g)
    return f.embed(vt) if f.vt != vt else f


def genus2_invariants(vt=None):
    vt = vt or VarTable.standard(2)
    P = lambda s: WPoly.parse(s, vt)
    I1 = P("2*u2^2*w1 - 2*u1*u2*w2 + 3*u1*v2^2 - 3*u2*v1*v2")
    I2 = P("2*u1^2*w2 - 2*u1*u2*w1 + 3*u2*v1^2 - 3*u1*v1*v2")
    return I1, I2


def theorem_generators(kind, f):
    if kind == "genus2_quintics":
        vt = VarTable.standard(2)
        F = _to_standard(f, 2)
        if F.weighted_degree() != 6 or F.variables() and not set(F.variables()) <= {"u1", "u2"}:
            raise ValueError("genus2_quintics needs a binary sextic in u1, u2")
        I1, I2 = genus2_invariants(vt)
        return [F.diff("u1") - 2 * I1, F.diff("u2") - 2 * I2]
    if kind in ("genus3_cubics", "genus3_quartics"):
        vt = VarTable.standard(3)
        F = _to_standard(f, 3)
        if F.weighted_degree() != 4 or not set(F.variables()) <= {"u1", "u2", "u3"}:
            raise ValueError(f"{kind} needs a ternary quartic in u1, u2, u3")
        u = [WPoly.var(vt, f"u{i}") for i in (1, 2, 3)]
        if kind == "genus3_cubics":
            other = [WPoly.var(vt, f"v{i}") for i in (1, 2, 3)]
            G, scale = F, 1
        else:
            other = [WPoly.var(vt, f"w{i}") for i in (1, 2, 3)]
            vs = [WPoly.var(vt, f"v{i}") for i in (1, 2, 3)]
            G = sum((v * F.diff(f"u{i}") for i, v in zip((1, 2, 3), vs)), WPoly.zero(vt))
            scale = 2
        m = lambda i, j: u[i] * other[j] - u[j] * other[i]
        return [G.diff("u1") + scale * m(1, 2),
                G.diff("u2") - scale * m(0, 2),
                G.diff("u3") + scale * m(0, 1)]
    raise ValueError(f"unknown generator family {kind!r}")


# -- trailing terms ------------------------------------------------------

def _as_terms(q):
    return dict(q.terms) if isinstance(q, WPoly) else dict(q)


def solve_trailing(leading, param, trailing_space, seed=0, max_primes=60):
    """The polynomial A in the span of ``trailing_space`` with
    leading - A vanishing on the orbit.  Raises NoSolution."""
    leading = _check_vars(leading, param)
    space = [_check_vars(t, param) for t in trailing_space]
    vt = leading.vt
    if not leading and not space:
        return WPoly.zero(vt)
    solver = _modular.TrailingSolver(curve_data(param),
                                     [(leading.terms, [t.terms for t in space])], seed=seed)
    status, coeffs = solver.solve(max_primes=max_primes)
    if status == "none":
        raise NoSolution("no trailing polynomial in the given space")
    if status == "inconclusive":
        raise Inconclusive("could not certify a trailing polynomial")
    out = WPoly.zero(vt)
    for c, t in zip(coeffs, space):
        if c:
            out = out + t * c
    return out


def solve_trailing_system(param, equations, unknown_spaces, seed=0, max_primes=80):
    """Several equations sharing unknown polynomials.

    ``equations``: list of (leading, [(coefficient, unknown_index, map)]) where
    map turns a candidate monomial of the unknown into the polynomial that
    enters the equation (e.g. a polarization).  ``unknown_spaces``: list of
    monomial lists.  Returns the solved unknowns as WPolys."""
    flat = [(k, m) for k, space in enumerate(unknown_spaces) for m in space]
    systems = []
    for lead, uses in equations:
        lead = _check_vars(lead, param)
        cands = []
        for k, m in flat:
            acc = WPoly.zero(lead.vt)
            for coef, idx, fn in uses:
                if idx == k:
                    acc = acc + fn(m) * coef
            cands.append(acc.terms)
        systems.append((lead.terms, cands))
    solver = _modular.TrailingSolver(curve_data(param), systems, seed=seed)
    status, coeffs = solver.solve(max_primes=max_primes)
    if status == "none":
        raise NoSolution("the equations have no common solution")
    if status == "inconclusive":
        raise Inconclusive("could not certify a common solution")
    vt = VarTable.standard(param.g)
    out = [WPoly.zero(vt) for _ in unknown_spaces]
    for c, (k, m) in zip(coeffs, flat):
        if c:
            out[k] = out[k] + m * c
    return out


def minors(g, vt=None):
    """The 2x2 minors of the g x 3 matrix (U V W), grouped by block pair."""
    vt = vt or VarTable.standard(g)
    cols = {b: [WPoly.var(vt, f"{b}{i}") for i in range(1, g + 1)] for b in "uvw"}
    out = []
    for a, b in (("u", "v"), ("u", "w"), ("v", "w")):
        for i, j in combinations(range(g), 2):
            out.append(cols[a][i] * cols[b][j] - cols[a][j] * cols[b][i])
    return out


def initial_ideal_generators(canonical_gens, g):
    vt = VarTable.standard(g)
    out = []
    for f in canonical_gens:
        f = _to_standard(f, g)
        k = f.weighted_degree()
        for a, b, c in polarization_exponents(k):
            out.append(polarize(f, a, b, c, vt))
    return out + minors(g, vt)


def secondary_weight(p):
    w = weights_from_blocks(p.vt, INITIAL_WEIGHTS)
    return p.weighted_degree(w)


def lower_weight_monomials(vt, degree, weight, min_weight=None):
    w2 = weights_from_blocks(vt, INITIAL_WEIGHTS)
    out = []
    for e in monomials_of_degree(vt, degree):
        s = sum(a * b for a, b in zip(e, w2))
        if s < weight and (min_weight is None or s >= min_weight):
            out.append(WPoly.monomial(vt, e))
    return out


def _as_polarization(gen):
    """(f, (a, b, c)) when gen is a polarization of a U-only form."""
    vt = gen.vt
    U, V, W = split_blocks(vt)
    g = len(U)
    a = sum(sum(e[i] for i in U) for e in list(gen.terms)[:1])
    b = sum(sum(e[i] for i in V) for e in list(gen.terms)[:1])
    c = sum(sum(e[i] for i in W) for e in list(gen.terms)[:1])
    # collapse V, W onto U: gen(U, U, U) = multinomial * f(U)
    images = [WPoly.var(vt, f"u{(i % g) + 1}") for i in range(3 * g)]
    collapsed = gen.substitute(images, vt)
    mult = math.comb(a + b + c, a) * math.comb(b + c, b)
    if not collapsed:
        return None
    f = collapsed * Fraction(1, mult)
    if polarize(f, a, b, c, vt) != gen:
        return None
    return f, (a, b, c)


class Ladder:
    """Stage-by-stage trailing terms for all polarizations of f."""

    def __init__(self, param, f, seed=0):
        self.param = param
        self.vt = VarTable.standard(param.g)
        self.f = _to_standard(f, param.g)
        self.k = self.f.weighted_degree()
        self.seed = seed
        self.relations = {}  # (a,b,c) -> trailing polynomial
        self.new_parts = {}  # (a,b,c) -> U-only part (the A polynomial)

    def candidates(self, alpha):
        a, b, c = alpha
        D = self.k + b + 2 * c
        vt = self.vt
        cands = list(block_monomials(vt, D, "u"))
        seen = set()
        for s, A in self.new_parts.items():
            Ds = self.k + s[1] + 2 * s[2]
            if not A or Ds >= D:
                continue
            drop = D - Ds
            for gb in range(drop + 1):
                if (drop - gb) % 2:
                    continue
                gc = (drop - gb) // 2
                ga = Ds - gb - gc
                if ga < 0:
                    continue
                key = (s, (ga, gb, gc))
                if key not in seen:
                    seen.add(key)
                    cands.append(polarize(A, ga, gb, gc, vt))
        # completions by multiples of f in degrees above k
        for Ds in range(self.k + 1, D):
            drop = D - Ds
            mults = [m * self.f for m in block_monomials(vt, Ds - self.k, "u")]
            for gb in range(drop + 1):
                if (drop - gb) % 2:
                    continue
                gc = (drop - gb) // 2
                ga = Ds - gb - gc
                if ga < 0:
                    continue
                for h in mults:
                    cands.append(polarize(h, ga, gb, gc, vt))
        return [q for q in cands if q]

    def solve_stage(self, alpha):
        if alpha in self.relations:
            return self.relations[alpha]
        # every stage of smaller weight first
        w = alpha[1] + 2 * alpha[2]
        for beta in polarization_exponents(self.k):
            if beta[1] + 2 * beta[2] < w:
                self.solve_stage(beta)
        lead = polarize(self.f, *alpha, vt=self.vt)
        if w == 0:
            self.relations[alpha] = WPoly.zero(self.vt)
            self.new_parts[alpha] = WPoly.zero(self.vt)
            return self.relations[alpha]
        cands = self.candidates(alpha)
        T = solve_trailing(lead, self.param, cands, seed=self.seed)
        wts = weights_from_blocks(self.vt, INITIAL_WEIGHTS)
        A = WPoly(self.vt, {e: c for e, c in T.terms.items()
                            if sum(x * y for x, y in zip(e, wts)) == 0})
        self.relations[alpha] = T
        self.new_parts[alpha] = A
        return T


def _ladder(param, f):
    store = getattr(param, "_ladders", None)
    if store is None:
        store = {}
        try:
            object.__setattr__(param, "_ladders", store)
        except AttributeError:
            pass
    if f not in store:
        store[f] = Ladder(param, f)
    return store[f]


def find_trailing(param, initial_gen, max_trailing_degree_shift=None, full_limit=FULL_SPACE_LIMIT):
    """Trailing polynomial T with initial_gen - T in the ideal and every term
    of T of strictly lower (0,1,2)-weight.  Raises NoSolution/Inconclusive."""
    gen = _check_vars(initial_gen, param)
    if not gen:
        return gen
    D = gen.weighted_degree()
    w = secondary_weight(gen)
    if D == "inhomogeneous" or w == "inhomogeneous":
        raise ValueError("initial generator must be homogeneous in both gradings")
    lo = None if max_trailing_degree_shift is None else w - max_trailing_degree_shift
    space = lower_weight_monomials(gen.vt, D, w, lo)
    if len(space) <= full_limit:
        return solve_trailing(gen, param, space)
    pol = _as_polarization(gen)
    if pol is None:
        raise Inconclusive("trailing space too large and no structure to exploit")
    f, alpha = pol
    T = _ladder(param, f).solve_stage(alpha)
    if lo is not None and T and min(
            sum(x * y for x, y in zip(e, weights_from_blocks(gen.vt, INITIAL_WEIGHTS)))
            for e in T.terms) < lo:
        raise Inconclusive("ladder solution drops more weight than allowed")
    return T


def verify_initial_containment(param, initial_gen, max_trailing_degree_shift=None):
    """True iff initial_gen is the initial form of an element of the ideal.

    With the full lower-weight space (small degrees) both answers are exact
    up to the three-prime inconsistency test; when the ladder space is used a
    failure raises Inconclusive instead of returning False."""
    try:
        find_trailing(param, initial_gen, max_trailing_degree_shift)
    except NoSolution:
        gen = _check_vars(initial_gen, param)
        D = gen.weighted_degree()
        w = secondary_weight(gen)
        lo = None if max_trailing_degree_shift is None else w - max_trailing_degree_shift
        if len(lower_weight_monomials(gen.vt, D, w, lo)) > FULL_SPACE_LIMIT:
            raise Inconclusive("ladder space exhausted; no verdict") from None
        return False
    return True


def lemma_minor_relations(param, i, j):
    """Trailing polynomials for the three minor families at (i, j):
    returns (A, T_uw, B) with
      u_i v_j - u_j v_i - A,
      u_i w_j - u_j w_i - T_uw,
      v_i w_j - v_j w_i + (1/3) sum dA/du_h w_h - (1/4) sum d2A v_h v_k - B
    all in the ideal."""
    g = param.g
    vt = VarTable.standard(g)
    u = lambda k: WPoly.var(vt, f"u{k + 1}")
    v = lambda k: WPoly.var(vt, f"v{k + 1}")
    w = lambda k: WPoly.var(vt, f"w{k + 1}")
    A = solve_trailing(u(i) * v(j) - u(j) * v(i), param, block_monomials(vt, 3, "u"))
    uv_space = [m * v(h) for m in block_monomials(vt, 2, "u") for h in range(g)]
    T = solve_trailing(u(i) * w(j) - u(j) * w(i), param, uv_space)
    grad = [A.diff(f"u{h + 1}") for h in range(g)]
    lead = v(i) * w(j) - v(j) * w(i)
    lead = lead + sum((grad[h] * w(h) for h in range(g)), WPoly.zero(vt)) * Fraction(1, 3)
    hess = WPoly.zero(vt)
    for h in range(g):
        for k in range(g):
            hess = hess + grad[h].diff(f"u{k + 1}") * v(h) * v(k)
    lead = lead - hess * Fraction(1, 4)
    B = solve_trailing(lead, param, block_monomials(vt, 5, "u"))
    return A, T, B
