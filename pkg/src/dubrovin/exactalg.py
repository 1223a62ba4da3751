"""Sparse multivariate polynomials with a weighted grading.

A WPoly is a dict from exponent tuples to coefficients.  Coefficients are
either fractions.Fraction (exact) or Python complex numbers; the complex
case never compares against a hidden global tolerance, callers pass one.
"""
from __future__ import annotations

import ast
import json
from fractions import Fraction
from itertools import product
from numbers import Number


class VarTable:
    """Ordered variable names with positive integer weights."""

    __slots__ = ("names", "weights", "_index")

    def __init__(self, names, weights=None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        if weights is None:
            weights = (1,) * len(names)
        weights = tuple(int(w) for w in weights)
        if len(weights) != len(names):
            raise ValueError("need one weight per variable")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        self.names = names
        self.weights = weights
        self._index = {n: i for i, n in enumerate(names)}

    @classmethod
    def standard(cls, g, with_cd=False):
        """u1..ug, v1..vg, w1..wg (weights 1, 2, 3), optionally c, d (2, 4)."""
        names = [f"u{i}" for i in range(1, g + 1)]
        names += [f"v{i}" for i in range(1, g + 1)]
        names += [f"w{i}" for i in range(1, g + 1)]
        weights = [1] * g + [2] * g + [3] * g
        if with_cd:
            names += ["c", "d"]
            weights += [2, 4]
        return cls(names, weights)

    def __len__(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        return (isinstance(other, VarTable) and self.names == other.names
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.names, self.weights))

    def __repr__(self):
        return f"VarTable({list(self.names)!r}, {list(self.weights)!r})"


def _is_zero(c):
    return c == 0


def _to_coeff(c):
    if isinstance(c, (Fraction, complex)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        return complex(c)
    if isinstance(c, Number):
        return complex(c)
    return Fraction(c)


class WPoly:
    """Immutable sparse polynomial over a VarTable."""

    __slots__ = ("vt", "terms", "_hash")

    def __init__(self, vt, terms=None):
        self.vt = vt
        n = len(vt)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError("exponent length does not match vartable")
                if not _is_zero(c):
                    clean[e] = c
        self.terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, vt, c):
        c = _to_coeff(c)
        return cls(vt, {(0,) * len(vt): c})

    @classmethod
    def zero(cls, vt):
        return cls(vt, {})

    @classmethod
    def var(cls, vt, name):
        e = [0] * len(vt)
        e[vt.index(name)] = 1
        return cls(vt, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, vt, exps, coeff=1):
        return cls(vt, {tuple(exps): _to_coeff(coeff)})

    @classmethod
    def parse(cls, text, vt):
        """Build a polynomial from an arithmetic expression such as
        ``"3*u1^5 + 2*u2^2*w1 - 1/2*x"``.  Only +, -, *, / by numbers, integer
        powers, numeric literals and the names in ``vt`` are accepted."""
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return _eval_ast(tree.body, vt)

    # -- basic queries ------------------------------------------------
    def is_zero(self, tol=None):
        if tol is None:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def nvars(self):
        return len(self.vt)

    def is_exact(self):
        return all(isinstance(c, (Fraction, int)) for c in self.terms.values())

    def term_weight(self, e, weights=None):
        w = self.vt.weights if weights is None else weights
        return sum(a * b for a, b in zip(e, w))

    def weighted_degree(self, weights=None):
        """Common weighted degree of all terms, or the string "inhomogeneous"."""
        if not self.terms:
            raise ValueError("weighted degree of the zero polynomial")
        degs = {self.term_weight(e, weights) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return "inhomogeneous"

    def max_weight(self, weights=None):
        if not self.terms:
            raise ValueError("zero polynomial")
        return max(self.term_weight(e, weights) for e in self.terms)

    def degree_in(self, name):
        i = self.vt.index(name)
        return max((e[i] for e in self.terms), default=0)

    def variables(self):
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return [self.vt.names[i] for i in sorted(used)]

    def coeff(self, exps):
        return self.terms.get(tuple(exps), 0)

    def sorted_terms(self):
        """Terms in the canonical order: weighted degree, then lex, descending."""
        return sorted(self.terms.items(),
                      key=lambda t: (self.term_weight(t[0]), t[0]), reverse=True)

    # -- arithmetic ---------------------------------------------------
    def _check(self, other):
        if not isinstance(other, WPoly):
            return WPoly.const(self.vt, other)
        if other.vt != self.vt:
            raise ValueError("vartable mismatch")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return WPoly(self.vt, out)

    __radd__ = __add__

    def __neg__(self):
        return WPoly(self.vt, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, s):
        if isinstance(s, int):
            s = Fraction(s)
        return WPoly(self.vt, {e: c * s for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, WPoly):
            return self.scale(other)
        other = self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return WPoly(self.vt, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, s):
        if isinstance(s, WPoly):
            raise TypeError("polynomial division is not supported")
        if isinstance(s, int):
            s = Fraction(s)
        return self.scale(1 / s)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = WPoly.const(self.vt, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, WPoly):
            return self.vt == other.vt and self.terms == other.terms
        if isinstance(other, Number):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vt, frozenset(self.terms.items())))
        return self._hash

    def equals(self, other, tol=0.0):
        """Coefficient-wise comparison with an absolute tolerance."""
        return (self - other).is_zero(tol)

    def map_coeffs(self, fn):
        return WPoly(self.vt, {e: fn(c) for e, c in self.terms.items()})

    def to_complex(self):
        return self.map_coeffs(complex)

    # -- calculus and gradings ---------------------------------------
    def diff(self, name):
        i = self.vt.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return WPoly(self.vt, out)

    def initial_form(self, weights):
        if not self.terms:
            raise ValueError("initial form of the zero polynomial")
        top = self.max_weight(weights)
        return WPoly(self.vt, {e: c for e, c in self.terms.items()
                               if self.term_weight(e, weights) == top})

    # -- substitution -------------------------------------------------
    def evaluate(self, values):
        """Evaluate at a point given as a sequence or a name -> value dict."""
        if isinstance(values, dict):
            values = [values[n] for n in self.vt.names]
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(values, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def substitute(self, images, target_vt=None):
        """Ring map sending variable i to images[i] (WPolys on target_vt or
        scalars).  Powers are cached per variable."""
        if isinstance(images, dict):
            images = [images.get(n, WPoly.var(self.vt, n)) for n in self.vt.names]
        if target_vt is None:
            target_vt = next((im.vt for im in images if isinstance(im, WPoly)), self.vt)
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                im = images[i]
                if not isinstance(im, WPoly):
                    im = WPoly.const(target_vt, im)
                cache[key] = im if k == 1 else power(i, k - 1) * im
            return cache[key]

        out = WPoly.zero(target_vt)
        for e, c in self.terms.items():
            t = WPoly.const(target_vt, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def embed(self, vt):
        """Same polynomial on a larger vartable (matching names)."""
        idx = [vt.index(n) for n in self.vt.names]
        n = len(vt)
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * n
            for i, k in zip(idx, e):
                e2[i] = k
            out[tuple(e2)] = c
        return WPoly(vt, out)

    def restrict(self, vt):
        """Inverse of embed; fails if a dropped variable occurs."""
        keep = [self.vt.index(n) for n in vt.names]
        dropped = set(range(len(self.vt))) - set(keep)
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in dropped):
                raise ValueError("polynomial uses variables outside the target table")
            out[tuple(e[i] for i in keep)] = c
        return WPoly(vt, out)

    # -- text and JSON ------------------------------------------------
    def __repr__(self):
        return f"WPoly({self.to_expr()})"

    def to_expr(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}"
                            for n, k in zip(self.vt.names, e) if k)
            cs = _coeff_str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_text(self):
        lines = []
        for e, c in self.sorted_terms():
            c = Fraction(c)
            lines.append(f"{c.numerator}/{c.denominator} : " + " ".join(map(str, e)))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text, vt):
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff, _, exps = line.partition(":")
            num, _, den = coeff.strip().partition("/")
            c = Fraction(int(num), int(den) if den else 1)
            e = tuple(int(t) for t in exps.split())
            terms[e] = terms.get(e, 0) + c
        return cls(vt, terms)

    def to_json_obj(self):
        out = []
        for e, c in self.sorted_terms():
            if isinstance(c, complex):
                cc = [c.real, c.imag]
            else:
                c = Fraction(c)
                cc = [str(c.numerator), str(c.denominator)]
            out.append({"coeff": cc, "exp": list(e)})
        return {"vars": list(self.vt.names), "weights": list(self.vt.weights),
                "terms": out}

    @classmethod
    def from_json_obj(cls, obj, vt=None):
        if vt is None:
            vt = VarTable(obj["vars"], obj.get("weights"))
        elif list(obj.get("vars", vt.names)) != list(vt.names):
            raise ValueError("JSON polynomial variables do not match")
        terms = {}
        for t in obj["terms"]:
            a, b = t["coeff"]
            if isinstance(a, str):
                c = Fraction(int(a), int(b))
            else:
                c = complex(a, b)
            e = tuple(t["exp"])
            terms[e] = terms.get(e, 0) + c
        return cls(vt, terms)

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, s, vt=None):
        return cls.from_json_obj(json.loads(s), vt)


def _coeff_str(c):
    if isinstance(c, complex):
        return f"({c.real:.12g}{c.imag:+.12g}j)"
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _eval_ast(node, vt):
    if isinstance(node, ast.BinOp):
        left = _eval_ast(node.left, vt)
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                raise ValueError("exponents must be integer literals")
            return left ** node.right.value
        right = _eval_ast(node.right, vt)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.variables():
                raise ValueError("can only divide by numbers")
            return left / right.coeff((0,) * len(vt))
        raise ValueError(f"unsupported operator {type(node.op).__name__}")
    if isinstance(node, ast.UnaryOp):
        val = _eval_ast(node.operand, vt)
        if isinstance(node.op, ast.USub):
            return -val
        if isinstance(node.op, ast.UAdd):
            return val
        raise ValueError("unsupported unary operator")
    if isinstance(node, ast.Constant):
        v = node.value
        if isinstance(v, bool) or not isinstance(v, (int, float, complex)):
            raise ValueError(f"bad literal {v!r}")
        if isinstance(v, float):
            v = Fraction(str(v))
        return WPoly.const(vt, v)
    if isinstance(node, ast.Name):
        return WPoly.var(vt, node.id)
    raise ValueError(f"unsupported syntax: {ast.dump(node)}")


# -- module-level operations -------------------------------------------

def arith(p, q, op):
    if p.vt != q.vt:
        raise ValueError("vartable mismatch")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown op {op!r}")


def weighted_degree(p, weights=None):
    return p.weighted_degree(weights)


def partial_derivative(p, var):
    return p.diff(var)


def initial_form(p, weights):
    return p.initial_form(weights)


def weights_from_blocks(vt, block_weights):
    """Per-variable weights from a map on the leading letter, e.g.
    {"u": 0, "v": 1, "w": 2}; unlisted letters get weight 0."""
    return tuple(block_weights.get(n.rstrip("0123456789"), 0) for n in vt.names)


def split_blocks(vt):
    """Indices of the u, v and w blocks of a standard table."""
    blocks = {"u": [], "v": [], "w": []}
    for i, n in enumerate(vt.names):
        head = n.rstrip("0123456789")
        if head in blocks and n != head:
            blocks[head].append(i)
    g = len(blocks["u"])
    if not (len(blocks["v"]) == g == len(blocks["w"])) or g == 0:
        raise ValueError("vartable lacks matching u, v, w blocks")
    return blocks["u"], blocks["v"], blocks["w"]


def polarize(f, a, b, c, vt=None):
    """Coefficient of x^a y^b t^c in f(xU + yV + tW).

    f lives in the u-variables (either on a standard table or on a table
    whose names are u1..ug); the result lives on the standard table ``vt``
    (built from g when not given).
    """
    if vt is None:
        ui = [n for n in f.vt.names if n.startswith("u")]
        vt = f.vt if _has_blocks(f.vt) else VarTable.standard(len(ui))
    U, V, W = split_blocks(vt)
    g = len(U)
    src = [f.vt.index(f"u{i}") for i in range(1, g + 1)]
    for i, n in enumerate(f.vt.names):
        if i not in src and f.degree_in(n):
            raise ValueError("polarize needs a polynomial in the U block only")
    deg = f.weighted_degree(tuple(1 if i in src else 0 for i in range(len(f.vt))))
    if deg == "inhomogeneous":
        raise ValueError("polarize needs f homogeneous in U")
    if a + b + c != deg:
        raise ValueError(f"a+b+c = {a + b + c} differs from deg f = {deg}")
    n = len(vt)
    out = {}
    for e, coef in f.terms.items():
        ks = [e[i] for i in src]
        # distribute each u_h^k over (u_h, v_h, w_h) with multinomial weights
        for split in _splits(ks, a, b, c):
            mult = 1
            ex = [0] * n
            for h, (p, q, r) in enumerate(split):
                mult *= _multinomial(p, q, r)
                ex[U[h]] += p
                ex[V[h]] += q
                ex[W[h]] += r
            key = tuple(ex)
            out[key] = out.get(key, 0) + coef * mult
    return WPoly(vt, out)


def _has_blocks(vt):
    try:
        split_blocks(vt)
        return True
    except ValueError:
        return False


def _multinomial(p, q, r):
    from math import comb
    return comb(p + q + r, p) * comb(q + r, q)


def _splits(ks, a, b, c):
    """All ways to write each k_h = p_h + q_h + r_h with sum p = a, sum q = b."""
    g = len(ks)
    results = []

    def rec(h, ra, rb, rc, acc):
        if h == g:
            if ra == rb == rc == 0:
                results.append(list(acc))
            return
        k = ks[h]
        for p in range(min(k, ra) + 1):
            for q in range(min(k - p, rb) + 1):
                r = k - p - q
                if r > rc:
                    continue
                acc.append((p, q, r))
                rec(h + 1, ra - p, rb - q, rc - r, acc)
                acc.pop()

    rec(0, a, b, c, [])
    return results


def polarization_exponents(deg):
    """All (a,b,c) with a+b+c = deg, ordered by the weight b + 2c."""
    out = [(deg - b - c, b, c) for b in range(deg + 1) for c in range(deg + 1 - b)]
    return sorted(out, key=lambda t: (t[1] + 2 * t[2], -t[0], -t[1]))


def monomials_of_degree(vt, degree, weights=None):
    """Exponent tuples of weighted degree ``degree`` (in canonical order)."""
    w = vt.weights if weights is None else weights
    n = len(vt)
    out = []

    def rec(i, left, acc):
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        wi = w[i]
        if wi == 0:
            raise ValueError("zero weight makes the degree piece infinite")
        for k in range(left // wi + 1):
            acc.append(k)
            rec(i + 1, left - k * wi, acc)
            acc.pop()

    rec(0, degree, [])
    out.sort(reverse=True)
    return out


def block_monomials(vt, degree, block="u"):
    """Monomials of the given degree in a single block (as WPolys)."""
    idx = [i for i, n in enumerate(vt.names) if n.rstrip("0123456789") == block and n != block]
    n = len(vt)
    res = []
    for ks in product(range(degree + 1), repeat=len(idx)):
        if sum(ks) != degree:
            continue
        e = [0] * n
        for i, k in zip(idx, ks):
            e[i] = k
        res.append(WPoly.monomial(vt, e))
    res.sort(key=lambda m: next(iter(m.terms)), reverse=True)
    return res
