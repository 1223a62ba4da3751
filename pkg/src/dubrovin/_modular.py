"""Multimodular evaluation of polynomials on the orbit parametrization.

A polynomial P(u, v, w) composed with the group orbit of the cleared
coordinates becomes an element of K[b, c] (a = 1 suffices for weighted
homogeneous P).  After y-reduction its coefficients are polynomials in
x, b, c whose degrees are bounded a priori, so vanishing on a tensor grid
of (x, b, c) values decides vanishing identically.  We evaluate on that grid
in the rings F_p[y] / f(x0, y) for enough primes p that a nonzero integer
numerator could not be divisible by all of them.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy import sparse
from sympy import prevprime

# p < 2^30 keeps sums of a handful of products below 2^63
_PRIME_START = 2 ** 30


def primes_below(start=_PRIME_START, avoid=1):
    p = start
    while True:
        p = prevprime(p)
        if avoid % p:
            yield p


def lcm_den(values):
    return reduce(lambda a, b: a * b // math.gcd(a, b),
                  (Fraction(v).denominator for v in values), 1)


def modp(c, p):
    c = Fraction(c)
    return c.numerator % p * pow(c.denominator % p, -1, p) % p


def rational_reconstruct(a, m):
    """r/s with r = a s mod m, |r|, s <= sqrt(m/2); None if there is none."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


class CurveData:
    """Precomputed integer data of a cleared parametrization."""

    def __init__(self, param):
        C = param.curve
        self.curve = C
        self.d = C.degree_y
        self.g = param.g
        Uc, Vc, Wc = param.cleared
        self.blocks = (Uc, Vc, Wc)
        self.tail = C.tail
        lc_int, f_int = _integer_scaling(C.f)
        self.lc_int = lc_int
        self.f_int = f_int
        coords = list(Uc) + list(Vc) + list(Wc)
        self.den_coord = [lcm_den(q.terms.values()) for q in coords]
        self.den_all = lcm_den([c for q in coords for c in q.terms.values()]
                               + list(C.f.terms.values())) * abs(lc_int)
        # x-degree potential: deg_x NF(x^i y^j) <= i + s j
        d = self.d
        s = Fraction(0)
        for (a, b) in C.tail.terms:
            s = max(s, Fraction(a, d - b))
        self.slope = s
        phi = [max((i + s * j for (i, j) in q.terms), default=Fraction(0)) for q in coords]
        g = self.g
        pu, pv, pw = phi[:g], phi[g:2 * g], phi[2 * g:]
        # v' = 2 b U + V, w' = c U + 3 b V + W
        self.phi = pu + [max(a, b) for a, b in zip(pu, pv)] + \
            [max(a, b, c) for a, b, c in zip(pu, pv, pw)]
        ydeg = [max((j for (_, j) in q.terms), default=0) for q in coords]
        yu, yv, yw = ydeg[:g], ydeg[g:2 * g], ydeg[2 * g:]
        self.ydeg = yu + [max(a, b) for a, b in zip(yu, yv)] + \
            [max(a, b, c) for a, b, c in zip(yu, yv, yw)]
        tau = max(1.0, sum(abs(float(c)) for c in C.tail.terms.values()))
        self.log_tau = math.log(tau)
        logs = [_log_majorant(q, tau) for q in coords]
        lu, lv, lw = logs[:g], logs[g:2 * g], logs[2 * g:]
        # majorants of the orbit coordinates with |b| = |c| = 1
        self.log_major = lu + [_logsumexp([math.log(2) + a, b]) for a, b in zip(lu, lv)] + \
            [_logsumexp([a, math.log(3) + b, c]) for a, b, c in zip(lu, lv, lw)]
        dens = self.den_coord
        du, dv, dw = dens[:g], dens[g:2 * g], dens[2 * g:]
        self.log_den = [math.log(x) for x in du] + \
            [math.log(_lcm(a, b)) for a, b in zip(du, dv)] + \
            [math.log(_lcm(_lcm(a, b), c)) for a, b, c in zip(du, dv, dw)]

    # -- bounds ---------------------------------------------------------
    def grid_shape(self, exps):
        g = self.g
        nx = nb = nc = 0
        for e in exps:
            phi = sum(k * p for k, p in zip(e, self.phi))
            nx = max(nx, math.floor(phi))
            nb = max(nb, sum(e[g:]))
            nc = max(nc, sum(e[2 * g:]))
        return nx + 1, nb + 1, nc + 1

    def log_height(self, terms):
        """Upper bound for log |integer numerators| of NF(P o orbit)."""
        if not terms:
            return 0.0
        n = 3 * self.g
        emax = [max(e[k] for e in terms) for k in range(n)]
        log_L = math.log(lcm_den(terms.values()))
        log_delta = log_L + sum(k * ld for k, ld in zip(emax, self.log_den))
        J = max(sum(k * y for k, y in zip(e, self.ydeg)) for e in terms)
        log_lc = J * math.log(abs(self.lc_int)) if abs(self.lc_int) > 1 else 0.0
        parts = []
        for e, c in terms.items():
            parts.append(math.log(abs(Fraction(c))) +
                         sum(k * m for k, m in zip(e, self.log_major)))
        log_major = _logsumexp(parts)
        return log_delta + log_lc + log_major + 1.0


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _logsumexp(xs):
    m = max(xs)
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def _log_majorant(q, tau):
    if not q.terms:
        return -math.inf
    return _logsumexp([math.log(abs(Fraction(c))) + j * math.log(tau)
                       for (i, j), c in q.terms.items()])


def _integer_scaling(f):
    den = lcm_den(f.terms.values())
    d = f.degree_in("y")
    lc = Fraction(f.coeff((0, d))) * den
    return int(lc), {e: int(Fraction(c) * den) for e, c in f.terms.items()}


class ModRing:
    """The rings F_p[y]/f(x_n, y) for a batch of points x_n, vectorized."""

    def __init__(self, data, p, xs, bs, cs):
        self.p = p
        self.data = data
        d = data.d
        self.d = d
        xs = np.asarray(xs, dtype=np.int64) % p
        self.N = len(xs)
        # y^d = sum_beta t_beta(x) y^beta
        self.tail = np.zeros((self.N, d), dtype=np.int64)
        maxdeg = max([i for (i, _) in data.tail.terms] +
                     [i for blk in data.blocks for q in blk for (i, _) in q.terms] + [0])
        self.xpow = np.ones((maxdeg + 1, self.N), dtype=np.int64)
        for k in range(1, maxdeg + 1):
            self.xpow[k] = self.xpow[k - 1] * xs % p
        for (i, j), c in data.tail.terms.items():
            self.tail[:, j] = (self.tail[:, j] + modp(c, p) * self.xpow[i]) % p
        bs = np.asarray(bs, dtype=np.int64)[:, None] % p
        cs = np.asarray(cs, dtype=np.int64)[:, None] % p
        Uc, Vc, Wc = (list(map(self.poly_xy, blk)) for blk in data.blocks)
        u = Uc
        v = [(2 * bs * a % p + b) % p for a, b in zip(Uc, Vc)]
        w = [(cs * a % p + 3 * bs % p * b % p + c) % p for a, b, c in zip(Uc, Vc, Wc)]
        self.vars = u + v + w

    def poly_xy(self, q):
        out = np.zeros((self.N, self.d), dtype=np.int64)
        p = self.p
        for (i, j), c in q.terms.items():
            out[:, j] = (out[:, j] + modp(c, p) * self.xpow[i]) % p
        return out

    def mul(self, A, B):
        p, d = self.p, self.d
        conv = np.zeros((A.shape[0], 2 * d - 1), dtype=np.int64)
        for i in range(d):
            conv[:, i:i + d] = (conv[:, i:i + d] + A[:, i:i + 1] * B) % p
        for k in range(2 * d - 2, d - 1, -1):
            top = conv[:, k:k + 1]
            conv[:, k - d:k] = (conv[:, k - d:k] + top * self.tail) % p
        return conv[:, :d].copy()

    def one(self):
        out = np.zeros((self.N, self.d), dtype=np.int64)
        out[:, 0] = 1
        return out

    def monomial_values(self, exps):
        """dict exponent -> value array, sharing prefixes."""
        cache = {}
        n = len(self.vars)
        zero = (0,) * n

        def get(e):
            if e in cache:
                return cache[e]
            if e == zero:
                val = self.one()
            else:
                k = max(i for i in range(n) if e[i])
                parent = list(e)
                parent[k] -= 1
                val = self.mul(get(tuple(parent)), self.vars[k])
            cache[e] = val
            return val

        for e in sorted(exps):
            get(tuple(e))
        return cache

    def evaluate_terms(self, terms):
        """Value of sum c_e * mono_e without keeping all monomials around:
        recursive Horner-like descent over the variables."""
        p = self.p
        n = len(self.vars)
        items = [(e, modp(c, p)) for e, c in terms.items()]
        powers = {}

        def power(k, m):
            key = (k, m)
            if key not in powers:
                powers[key] = self.vars[k] if m == 1 else self.mul(power(k, m - 1), self.vars[k])
            return powers[key]

        def rec(items, k):
            if k == n:
                acc = 0
                for _, c in items:
                    acc = (acc + c) % p
                out = self.one()
                out[:, 0] = acc
                return out
            groups = {}
            for e, c in items:
                groups.setdefault(e[k], []).append((e, c))
            total = None
            for m, sub in groups.items():
                val = rec(sub, k + 1)
                if m:
                    val = self.mul(val, power(k, m))
                total = val if total is None else (total + val) % p
            return total

        if not items:
            return np.zeros((self.N, self.d), dtype=np.int64)
        return rec(items, 0)


def full_grid(nx, nb, nc):
    X, Bg, Cg = np.meshgrid(np.arange(nx), np.arange(nb), np.arange(nc), indexing="ij")
    return X.ravel(), Bg.ravel(), Cg.ravel()


def certify_zero(data, terms, max_primes=5000):
    """True iff P o orbit is identically zero (terms: exponent -> Fraction).
    Either answer is rigorous."""
    terms = {e: c for e, c in terms.items() if c != 0}
    if not terms:
        return True
    nx, nb, nc = data.grid_shape(terms)
    xs, bs, cs = full_grid(nx, nb, nc)
    need = data.log_height(terms)
    avoid = data.den_all * lcm_den(terms.values())
    acc = 0.0
    for count, p in enumerate(primes_below(avoid=avoid)):
        if count >= max_primes:
            raise RuntimeError("prime budget exhausted in certified zero test")
        ring = ModRing(data, p, xs, bs, cs)
        val = ring.evaluate_terms(terms)
        if np.any(val):
            return False
        acc += math.log(p)
        if acc > need:
            return True


def _split_mod_matmul(Cmat, M, p):
    """(Cmat @ M) mod p for a sparse int matrix with entries < p < 2^30."""
    lo = Cmat.copy()
    lo.data = lo.data & 0x7FFF
    hi = Cmat.copy()
    hi.data = hi.data >> 15
    r_lo = np.asarray(lo @ M) % p
    r_hi = np.asarray(hi @ M) % p
    return (r_hi * (1 << 15) + r_lo) % p


def solve_mod_p(A, rhs, p):
    """Pivot columns and a particular solution (free variables zero), or
    None for an inconsistent system.  A: rows x K int64 array mod p."""
    R, K = A.shape
    M = np.concatenate([A, rhs[:, None]], axis=1) % p
    pivots = []
    r = 0
    for col in range(K):
        if r == R:
            break
        nz = np.flatnonzero(M[r:, col])
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, col]), p - 2, p)
        M[r] = M[r] * inv % p
        fac = M[:, col].copy()
        fac[r] = 0
        rows = np.flatnonzero(fac)
        if len(rows):
            M[rows] = (M[rows] - fac[rows, None] * M[r][None, :]) % p
        pivots.append(col)
        r += 1
    if np.any(M[r:, K]):
        return None
    sol = np.zeros(K, dtype=np.int64)
    for i, col in enumerate(pivots):
        sol[col] = M[i, K]
    return tuple(pivots), sol


class TrailingSolver:
    """Find rational c with  leading_e - sum_i c_i cand_{e,i} == 0  on the
    orbit, simultaneously for every equation e (shared unknowns c)."""

    def __init__(self, data, systems, seed=0):
        self.data = data
        self.systems = [(dict(lead), [dict(c) for c in cands]) for lead, cands in systems]
        ks = {len(c) for _, c in self.systems}
        if len(ks) > 1:
            raise ValueError("every equation needs one candidate per unknown")
        self.K = ks.pop() if ks else 0
        self.seed = seed
        monos = set()
        for lead, cands in self.systems:
            monos.update(lead)
            for c in cands:
                monos.update(c)
        self.monos = sorted(monos)
        self.index = {e: i for i, e in enumerate(self.monos)}

    def _rows(self, terms_list, p, Mv):
        rows, cols, dat = [], [], []
        for i, cand in enumerate(terms_list):
            for e, c in cand.items():
                rows.append(i)
                cols.append(self.index[e])
                dat.append(modp(c, p))
        Cm = sparse.csr_matrix((np.array(dat, dtype=np.int64),
                                (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
                               shape=(len(terms_list), len(self.monos)), dtype=np.int64)
        return _split_mod_matmul(Cm, Mv, p)

    def _system(self, p, npts, rng):
        xs = rng.integers(0, p, npts)
        bs = rng.integers(0, p, npts)
        cs = rng.integers(0, p, npts)
        ring = ModRing(self.data, p, xs, bs, cs)
        vals = ring.monomial_values(self.monos)
        Mv = np.stack([vals[e].ravel() for e in self.monos])  # nm x (N d)
        blocks_A, blocks_b = [], []
        for lead, cands in self.systems:
            blocks_A.append(self._rows(cands, p, Mv).T if cands else
                            np.zeros((Mv.shape[1], 0), dtype=np.int64))
            blocks_b.append(self._rows([lead], p, Mv).ravel())
        return np.concatenate(blocks_A), np.concatenate(blocks_b)

    def combos(self, coeffs):
        out = []
        for lead, cands in self.systems:
            combo = dict(lead)
            for coef, cand in zip(coeffs, cands):
                if coef:
                    for e, c in cand.items():
                        combo[e] = combo.get(e, 0) - coef * c
            out.append(combo)
        return out

    def solve(self, max_primes=60, certify=True):
        """Returns ("ok", coeffs), ("none", None) or ("inconclusive", None).

        "ok" is certified exactly.  "none" means the system was inconsistent
        modulo three independent primes."""
        K = self.K
        if K == 0:
            ok = all(certify_zero(self.data, lead) for lead, _ in self.systems)
            return ("ok", []) if ok else ("none", None)
        rng = np.random.default_rng(self.seed)
        neq = len(self.systems)
        npts = max(4, int(math.ceil(1.3 * K / (self.data.d * neq))) + 6)
        avoid = self.data.den_all
        for lead, cands in self.systems:
            avoid *= lcm_den(lead.values())
            for c in cands:
                avoid *= lcm_den(c.values())
        used = 0
        inconsistent = 0
        pivots_ref = None
        modulus = 1
        crt = None
        last = None
        for p in primes_below(avoid=avoid):
            if used >= max_primes:
                return ("inconclusive", None)
            used += 1
            A, rhs = self._system(p, npts, rng)
            res = solve_mod_p(A, rhs, p)
            if res is None:
                inconsistent += 1
                if inconsistent >= 3 and pivots_ref is None:
                    return ("none", None)
                continue
            piv, sol = res
            if pivots_ref is None or len(piv) > len(pivots_ref):
                pivots_ref = piv
                crt = [int(s) for s in sol]
                modulus = p
                last = None
                continue
            if piv != pivots_ref:
                continue
            inv = pow(modulus, -1, p)
            crt = [a + modulus * (((int(s) - a) * inv) % p) for a, s in zip(crt, sol)]
            modulus *= p
            rec = [rational_reconstruct(a, modulus) for a in crt]
            if any(r is None for r in rec):
                continue
            if rec == last:
                if not certify:
                    return ("ok", rec)
                if all(certify_zero(self.data, c) for c in self.combos(rec)):
                    return ("ok", rec)
            last = rec
