"""Function field arithmetic on an affine plane curve f(x, y) = 0.

Elements are kept y-reduced: every polynomial in x, y is rewritten with
y-degree below deg_y f using the relation y^d = -(f - lc*y^d)/lc.
"""
from __future__ import annotations

from fractions import Fraction

from .exactalg import VarTable, WPoly

XY = VarTable(("x", "y"))


def _as_xy(p):
    if isinstance(p, str):
        return WPoly.parse(p, XY)
    if isinstance(p, WPoly):
        if p.vt != XY:
            return p.embed(XY) if set(p.vt.names) <= {"x", "y"} else p.restrict(XY)
        return p
    return WPoly.const(XY, p)


class PlaneCurve:
    """Affine plane curve with a constant leading coefficient in y."""

    def __init__(self, f):
        f = _as_xy(f)
        if not f.is_exact():
            raise ValueError("curve equation must have rational coefficients")
        d = f.degree_in("y")
        if d < 1:
            raise ValueError("f must involve y")
        lead = {e: c for e, c in f.terms.items() if e[1] == d}
        if set(lead) != {(0, d)}:
            raise ValueError(
                "the coefficient of y^%d is not constant; apply a linear change "
                "of coordinates (e.g. x -> x + t*y) first" % d)
        self.f = f
        self.degree_y = d
        self.lc = lead[(0, d)]
        # y^d == tail modulo f
        tail = {e: -c / self.lc for e, c in f.terms.items() if e[1] < d}
        self.tail = WPoly(XY, tail)
        self.fx = f.diff("x")
        self.fy = f.diff("y")
        self._ypow = {}

    def __eq__(self, other):
        return isinstance(other, PlaneCurve) and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __repr__(self):
        return f"PlaneCurve({self.f.to_expr()} = 0)"

    @property
    def total_degree(self):
        return max(sum(e) for e in self.f.terms)

    def _reduced_ypow(self, k):
        """Normal form of y^k, as a dict y-power -> WPoly in x (cached)."""
        if k not in self._ypow:
            d = self.degree_y
            if k < d:
                self._ypow[k] = WPoly.monomial(XY, (0, k))
            else:
                prev = self._reduced_ypow(k - 1)
                self._ypow[k] = self.normal_form(prev * WPoly.monomial(XY, (0, 1)), _shallow=True)
        return self._ypow[k]

    def normal_form(self, p, _shallow=False):
        p = _as_xy(p)
        d = self.degree_y
        if all(e[1] < d for e in p.terms):
            return p
        if _shallow:
            # p has y-degree at most d: one substitution suffices
            out = {e: c for e, c in p.terms.items() if e[1] < d}
            res = WPoly(XY, out)
            for e, c in p.terms.items():
                if e[1] == d:
                    res = res + self.tail * WPoly.monomial(XY, (e[0], 0), c)
                elif e[1] > d:
                    return self.normal_form(p)
            return res
        out = {}
        for (i, j), c in p.terms.items():
            if j < d:
                out[(i, j)] = out.get((i, j), 0) + c
                continue
            for (a, b), t in self._reduced_ypow(j).terms.items():
                key = (a + i, b)
                out[key] = out.get(key, 0) + c * t
        return WPoly(XY, out)

    def is_zero(self, p):
        return not self.normal_form(p)

    def mul(self, p, q):
        return self.normal_form(p * q)


def normal_form(p, C):
    return C.normal_form(p)


def _normalize_base(b):
    """Scale a denominator factor so its leading coefficient is 1."""
    lead = b.sorted_terms()[0][1]
    return b.scale(1 / lead), lead


class CurveElem:
    """numerator / prod(base^k), numerator y-reduced.

    The denominator is stored as a factored product of monic polynomials so
    that repeated differentiation only raises powers of f_y.
    """

    __slots__ = ("curve", "num", "den")

    def __init__(self, curve, num, den=None):
        self.curve = curve
        num = curve.normal_form(_as_xy(num))
        scale = Fraction(1)
        factors = {}
        for base, k in (den or {}).items():
            base = _as_xy(base)
            if k == 0:
                continue
            if not base.variables():
                scale /= Fraction(base.coeff((0, 0))) ** k
                continue
            base = curve.normal_form(base)
            if not base:
                raise ZeroDivisionError("denominator vanishes on the curve")
            nb, lead = _normalize_base(base)
            scale /= Fraction(lead) ** k
            factors[nb] = factors.get(nb, 0) + k
        self.num = num.scale(scale) if scale != 1 else num
        self.den = {b: k for b, k in factors.items() if k}
        if not self.num:
            self.den = {}

    @classmethod
    def from_poly(cls, curve, p):
        return cls(curve, p)

    @property
    def numerator(self):
        return self.num

    @property
    def denominator(self):
        """The denominator expanded and reduced (exact, can be large)."""
        out = WPoly.const(XY, 1)
        for b, k in self.den.items():
            out = self.curve.normal_form(out * b ** k)
        return out

    def is_zero(self):
        return not self.num

    def _common(self, other):
        """Numerators of self and other over the lcm of the factored dens."""
        den = dict(self.den)
        for b, k in other.den.items():
            den[b] = max(den.get(b, 0), k)
        C = self.curve

        def lift(e):
            n = e.num
            for b, k in den.items():
                extra = k - e.den.get(b, 0)
                if extra:
                    n = C.normal_form(n * b ** extra)
            return n

        return lift(self), lift(other), den

    def _coerce(self, other):
        if isinstance(other, CurveElem):
            if other.curve != self.curve:
                raise ValueError("elements live on different curves")
            return other
        return CurveElem(self.curve, _as_xy(other))

    def __add__(self, other):
        other = self._coerce(other)
        a, b, den = self._common(other)
        return CurveElem(self.curve, a + b, den)

    __radd__ = __add__

    def __neg__(self):
        return CurveElem(self.curve, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CurveElem(self.curve, self.num.scale(Fraction(other)), self.den)
        other = self._coerce(other)
        den = dict(self.den)
        for b, k in other.den.items():
            den[b] = den.get(b, 0) + k
        return CurveElem(self.curve, self.curve.normal_form(self.num * other.num), den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by the zero element")
        num = WPoly.const(XY, 1)
        C = self.curve
        for b, k in self.den.items():
            num = C.normal_form(num * b ** k)
        return CurveElem(C, num, {self.num: 1})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, (CurveElem, WPoly, int, Fraction)):
            return (self - self._coerce(other)).is_zero()
        return NotImplemented

    def __hash__(self):
        return id(self)

    def __repr__(self):
        dens = " * ".join(f"({b.to_expr()})^{k}" for b, k in self.den.items())
        return f"CurveElem(({self.num.to_expr()}) / ({dens or '1'}))"

    def cleared(self, base, power):
        """Polynomial equal to self * base^power when the denominator only
        involves ``base``; raises otherwise."""
        C = self.curve
        nb, lead = _normalize_base(C.normal_form(_as_xy(base)))
        extra = set(self.den) - {nb}
        if extra:
            raise ValueError("residual denominator not of the requested form")
        k = self.den.get(nb, 0)
        if k > power:
            raise ValueError(f"denominator power {k} exceeds {power}")
        out = self.num * nb ** (power - k)
        return C.normal_form(out.scale(Fraction(lead) ** power))

    def evaluate(self, x, y):
        num = self.num.evaluate([x, y])
        den = 1
        for b, k in self.den.items():
            den = den * b.evaluate([x, y]) ** k
        return num / den


def total_derivative_poly(C, q):
    """Numerator of d/dx q(x, y(x)) over f_y: q_x f_y - q_y f_x (reduced)."""
    return C.normal_form(q.diff("x") * C.fy - q.diff("y") * C.fx)


def implicit_derivative(e, C=None):
    """d/dx of e(x, y(x)) using dy/dx = -f_x / f_y."""
    C = e.curve if C is None else C
    if e.is_zero():
        return e
    fy_base, fy_lead = _normalize_base(C.normal_form(C.fy))
    bases = list(e.den.items())
    # d/dx (N / prod b^k) = (N' prod b - N sum k b' prod_{j != i} b_j) / prod b^{k+1}
    prod_all = WPoly.const(XY, 1)
    for b, _ in bases:
        prod_all = C.normal_form(prod_all * b)
    num = C.normal_form(total_derivative_poly(C, e.num) * prod_all)
    for i, (b, k) in enumerate(bases):
        others = WPoly.const(XY, 1)
        for j, (bj, _) in enumerate(bases):
            if j != i:
                others = C.normal_form(others * bj)
        term = C.normal_form(total_derivative_poly(C, b) * others).scale(Fraction(k))
        num = num - C.normal_form(e.num * term)
    den = {b: k + 1 for b, k in bases}
    den[fy_base] = den.get(fy_base, 0) + 1
    return CurveElem(C, num.scale(1 / Fraction(fy_lead)), den)


def holomorphic_basis(C, numerators=None):
    """The elements h_i / f_y; default numerators x^i y^j with i + j <= d - 3."""
    if numerators is None:
        d = C.total_degree
        numerators = [WPoly.monomial(XY, (i, j)) for s in range(d - 2)
                      for j in range(s + 1) for i in [s - j]]
    numerators = [_as_xy(h) for h in numerators]
    if not numerators:
        raise ValueError("need at least one numerator")
    return [CurveElem(C, h, {C.fy: 1}) for h in numerators]


def trott_curve():
    return PlaneCurve("144*(x^4+y^4) - 225*(x^2+y^2) + 350*x^2*y^2 + 81")
