"""Hirota and Dubrovin quartics, the c, d fit and KP solutions from theta.

All derivatives are analytic lattice sums.  ``derivative_scale`` multiplies
every z-derivative by a constant; 1 is the convention of the theta module,
2*pi*i gives derivatives along the algebraic-geometry coordinates
z_ag = z / (2 pi i).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .exactalg import VarTable, WPoly
from .theta import (DEFAULT_TOL, HalfCharacteristic, _points_and_weights, as_riemann,
                    theta_jet)

QUARTIC_WEIGHTS_NOTE = "u: 1, v: 2, w: 3, c: 2, d: 4"


@dataclass
class DubrovinPoint:
    U: np.ndarray
    V: np.ndarray
    W: np.ndarray
    c: complex = 0j
    d: complex = 0j

    def __post_init__(self):
        self.U, self.V, self.W = (np.asarray(t, dtype=complex).reshape(-1) for t in (self.U, self.V, self.W))
        if not (len(self.U) == len(self.V) == len(self.W)):
            raise ValueError("U, V, W must have the same length")
        if not (np.any(self.U) or np.any(self.V) or np.any(self.W)):
            raise ValueError("(U, V, W) must not be zero")

    @property
    def g(self):
        return len(self.U)

    def rescaled(self, lam):
        """The weighted-equivalent point (lam U, lam^2 V, lam^3 W, lam^2 c, lam^4 d)."""
        return DubrovinPoint(lam * self.U, lam ** 2 * self.V, lam ** 3 * self.W,
                             lam ** 2 * self.c, lam ** 4 * self.d)

    def values(self):
        """Coordinates in VarTable.standard(g, True) order."""
        return list(self.U) + list(self.V) + list(self.W) + [self.c, self.d]


class QuarticForm:
    """A weighted-degree-4 polynomial in U, V, W, c, d with complex coefficients."""

    def __init__(self, poly):
        if poly and poly.weighted_degree() not in (4,):
            raise ValueError("quartic form must be weighted homogeneous of degree 4")
        self.poly = poly

    @property
    def vt(self):
        return self.poly.vt

    def __call__(self, point):
        if isinstance(point, DubrovinPoint):
            point = point.values()
        return complex(self.poly.evaluate(list(point)))

    def coefficients(self):
        return {e: complex(c) for e, c in self.poly.terms.items()}

    def coeff_norm(self):
        return max((abs(c) for c in self.poly.terms.values()), default=0.0)

    def __sub__(self, other):
        return QuarticForm(self.poly - other.poly)

    def __repr__(self):
        return f"QuarticForm({len(self.poly)} terms)"


def _vars(g):
    vt = VarTable.standard(g, with_cd=True)
    idx = {b: [vt.index(f"{b}{i}") for i in range(1, g + 1)] for b in "uvw"}
    return vt, idx


def tensor_form(T, vt, cols, scale=1.0):
    """The form x -> T(x, ..., x) on the variables ``cols`` (indices in vt)."""
    T = np.asarray(T)
    k = T.ndim
    n = len(vt)
    terms = {}
    if k == 0:
        terms[(0,) * n] = complex(T) * scale ** 0
        return WPoly(vt, terms)
    g = T.shape[0]
    for combo in combinations_with_replacement(range(g), k):
        mult = math.factorial(k)
        for i in set(combo):
            mult //= math.factorial(combo.count(i))
        val = complex(T[combo]) * mult * scale ** k
        if val != 0:
            e = [0] * n
            for i in combo:
                e[cols[i]] += 1
            key = tuple(e)
            terms[key] = terms.get(key, 0) + val
    return WPoly(vt, terms)


def bilinear_form(T2, vt, cols1, cols2, scale=1.0):
    """sum T2[i, j] x_i y_j."""
    n = len(vt)
    terms = {}
    g = T2.shape[0]
    for i in range(g):
        for j in range(g):
            val = complex(T2[i, j]) * scale ** 2
            if val == 0:
                continue
            e = [0] * n
            e[cols1[i]] += 1
            e[cols2[j]] += 1
            key = tuple(e)
            terms[key] = terms.get(key, 0) + val
    return WPoly(vt, terms)


def _cd(vt):
    return WPoly.var(vt, "c"), WPoly.var(vt, "d")


def hirota_quartic(z, B, tol=DEFAULT_TOL, derivative_scale=1.0):
    """H_z as a quartic form in (U, V, W, c, d)."""
    rm = as_riemann(B)
    return quartic_from_jet(theta_jet(z, rm, 4, tol=tol), rm.g, derivative_scale)


def quartic_from_jet(T, g, derivative_scale=1.0):
    """Assemble H_z from the derivative tensors T[0..4] of theta at z."""
    vt, idx = _vars(g)
    s = derivative_scale
    t0 = WPoly.const(vt, complex(T[0]))
    tU = tensor_form(T[1], vt, idx["u"], s)
    tUU = tensor_form(T[2], vt, idx["u"], s)
    tUUU = tensor_form(T[3], vt, idx["u"], s)
    tUUUU = tensor_form(T[4], vt, idx["u"], s)
    tV = tensor_form(T[1], vt, idx["v"], s)
    tVV = tensor_form(T[2], vt, idx["v"], s)
    tW = tensor_form(T[1], vt, idx["w"], s)
    tUW = bilinear_form(T[2], vt, idx["u"], idx["w"], s)
    c, d = _cd(vt)
    H = (tUUUU * t0 - tUUU * tU * 4 + tUU * tUU * 3
         + (tU * tW - t0 * tUW) * 4
         + c * (tUU * t0 - tU * tU) * 6
         + (t0 * tVV - tV * tV) * 3
         + d * t0 * t0 * 8)
    return QuarticForm(H)


def dubrovin_quartic(eps, constants, derivative_scale=1.0):
    """F[eps] = d_U^4 th - d_U d_W th + 3/2 c d_U^2 th + 3/4 d_V^2 th + d th
    for th = theta-hat[eps] at 0."""
    g = constants.g
    vt, idx = _vars(g)
    k = constants.index(tuple(eps))
    s = derivative_scale
    T4 = constants.T4[k]
    Q = constants.Q[k]
    val = complex(constants.values[k])
    c, d = _cd(vt)
    F = (tensor_form(T4, vt, idx["u"], s)
         - bilinear_form(Q, vt, idx["u"], idx["w"], s)
         + c * tensor_form(Q, vt, idx["u"], s) * 1.5
         + tensor_form(Q, vt, idx["v"], s) * 0.75
         + d * val)
    return QuarticForm(F)


def dubrovin_quartics(constants, derivative_scale=1.0):
    return [dubrovin_quartic(e, constants, derivative_scale) for e in constants.chars]


def theta_hat(eps, z, B, tol=DEFAULT_TOL):
    """theta-hat[eps](z) = theta[eps; 0](z | 2B)."""
    rm = as_riemann(B)
    return theta_jet(z, rm.doubled(), 0, HalfCharacteristic(tuple(eps)).shift, tol)[0]


def addition_identity_residual(z, B, tol=DEFAULT_TOL, constants=None):
    """max |coefficient of H_z - 8 sum_eps theta-hat[eps](2z) F[eps]| divided
    by the largest coefficient of H_z."""
    from .theta import doubled_constants
    rm = as_riemann(B)
    z = np.asarray(z, dtype=complex)
    if constants is None:
        constants = doubled_constants(rm, tol)
    H = hirota_quartic(z, rm, tol).poly
    rhs = WPoly.zero(H.vt)
    for eps in constants.chars:
        rhs = rhs + dubrovin_quartic(eps, constants).poly * (8 * theta_hat(eps, 2 * z, rm, tol))
    diff = H - rhs
    scale = max(abs(c) for c in H.terms.values())
    return max((abs(c) for c in diff.terms.values()), default=0.0) / scale


# -- numeric evaluation at a point -------------------------------------

def _taylor(pts, w, U, V, W, shape, center=(0, 0, 0)):
    """Taylor coefficients of tau(x, y, t) at 0 with exponents < shape, from
    lattice points and weights (tau = sum w exp(n.(Ux + Vy + Wt))).  With a
    center (mx, my, mt) the series is that of exp(-mx x - my y - mt t) tau."""
    pU, pV, pW = pts @ U - center[0], pts @ V - center[1], pts @ W - center[2]
    nx, ny, nt = shape
    out = np.zeros(shape, dtype=complex)
    powU = [w]
    for a in range(1, nx):
        powU.append(powU[-1] * pU)
    for a in range(nx):
        fa = powU[a] / math.factorial(a)
        fb = fa
        for b in range(ny):
            if b:
                fb = fb * pV / b
            fc = fb
            for c in range(nt):
                if c:
                    fc = fc * pW / c
                out[a, b, c] = fc.sum()
    return out


class _Series:
    """Truncated power series in (x, y, t) with per-variable degree caps."""

    def __init__(self, shape):
        self.shape = shape
        idx = list(np.ndindex(*shape))
        self.pairs = []
        for i, a in enumerate(idx):
            for j, b in enumerate(idx):
                k = tuple(p + q for p, q in zip(a, b))
                if all(k[m] < shape[m] for m in range(3)):
                    self.pairs.append((a, b, k))

    def mul(self, A, B):
        out = np.zeros(self.shape, dtype=complex)
        for a, b, k in self.pairs:
            out[k] += A[a] * B[b]
        return out

    def log(self, T):
        """log(T) - log(T[0,0,0])."""
        e = T / T[0, 0, 0]
        e[0, 0, 0] = 0
        total = np.zeros(self.shape, dtype=complex)
        p = e.copy()
        order = sum(s - 1 for s in self.shape)
        for k in range(1, order + 1):
            total += ((-1) ** (k + 1) / k) * p
            p = self.mul(p, e)
        return total


_SHAPE = (7, 3, 2)
_SERIES = None


def _series():
    global _SERIES
    if _SERIES is None:
        _SERIES = _Series(_SHAPE)
    return _SERIES


def _d(S, a, b, c):
    return S[a, b, c] * math.factorial(a) * math.factorial(b) * math.factorial(c)


@dataclass
class PointEval:
    tau_rel: float  # |tau| / largest term
    u: complex
    kp: complex
    kp_scale: float
    hirota: complex
    hirota_scale: float
    singular: bool


SINGULAR_RATIO = 1e-8


def evaluate_at(point, D, B, x, y, t, tol=DEFAULT_TOL):
    """tau, u and the KP and Hirota residuals at (x, y, t)."""
    rm = as_riemann(B)
    z = point.U * x + point.V * y + point.W * t + np.asarray(D, dtype=complex)
    dn = max(1.0, float(np.abs(point.U).sum() + np.abs(point.V).sum() + np.abs(point.W).sum()))
    pts, w, m = _points_and_weights(rm, z, np.zeros(rm.g), 6, dn, tol)
    return evaluate_terms(point, pts, w)


def evaluate_terms(point, pts, w):
    """Same as evaluate_at for tau = sum_k w_k exp(pts_k . (Ux + Vy + Wt))
    at the origin.  The weights may carry any common scale factor."""
    T = _taylor(pts, w, point.U, point.V, point.W, _SHAPE)
    tau = T[0, 0, 0]
    rel = abs(tau) / max(1e-300, float(np.abs(w).max()))
    c, d = point.c, point.d
    t_ = lambda a, b, cc: _d(T, a, b, cc)
    terms = [t_(4, 0, 0) * tau, -4 * t_(3, 0, 0) * t_(1, 0, 0), 3 * t_(2, 0, 0) ** 2,
             4 * t_(1, 0, 0) * t_(0, 0, 1), -4 * tau * t_(1, 0, 1),
             6 * c * t_(2, 0, 0) * tau, -6 * c * t_(1, 0, 0) ** 2,
             3 * tau * t_(0, 2, 0), -3 * t_(0, 1, 0) ** 2, 8 * d * tau ** 2]
    hir = sum(terms)
    hscale = float(sum(abs(v) for v in terms))
    if rel < SINGULAR_RATIO:
        return PointEval(rel, complex("nan"), complex("nan"), 0.0, hir, hscale, True)
    # log tau up to a linear function, which no KP term sees; centering the
    # exponents keeps the log series small
    aw = np.abs(w)
    center = tuple((aw * (pts @ X)).sum() / aw.sum() for X in (point.U, point.V, point.W))
    L = _series().log(_taylor(pts, w, point.U, point.V, point.W, _SHAPE, center))
    ld = lambda a, b, cc: 2 * _d(L, a, b, cc)
    u = ld(2, 0, 0) + c
    ux, uxx, uxxxx = ld(3, 0, 0), ld(4, 0, 0), ld(6, 0, 0)
    uxt, uyy = ld(3, 0, 1), ld(2, 2, 0)
    kterms = [4 * uxt, -6 * ux ** 2, -6 * u * uxx, -uxxxx, -3 * uyy]
    kp = sum(kterms)
    kscale = float(sum(abs(v) for v in kterms))
    return PointEval(rel, u, kp, kscale, hir, hscale, False)


def summarize(evals, samples):
    kp = kpr = hr = 0.0
    sing = []
    for ev, p in zip(evals, samples):
        if ev.singular:
            sing.append(tuple(p))
            continue
        kp = max(kp, abs(ev.kp))
        kpr = max(kpr, abs(ev.kp) / ev.kp_scale if ev.kp_scale else 0.0)
        hr = max(hr, abs(ev.hirota) / ev.hirota_scale if ev.hirota_scale else 0.0)
    return KPResidual(kp, kpr, hr, sing)


def kp_solution(point, D, B, tol=DEFAULT_TOL):
    """u(x, y, t) = 2 d_x^2 log tau + c; returns nan at singular samples."""
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    rm = as_riemann(B)
    if point.g != rm.g:
        raise ValueError("point and Riemann matrix have different genus")
    if not np.any(point.U) and not np.any(point.V) and not np.any(point.W):
        raise ValueError("zero point")

    def u(x, y, t):
        return evaluate_at(point, D, rm, x, y, t, tol).u

    return u


@dataclass
class KPResidual:
    kp: float            # max |d_x(4u_t - 6uu_x - u_xxx) - 3u_yy|
    kp_relative: float   # same divided by the sum of the term sizes
    hirota_relative: float
    singular: list

    def as_dict(self):
        return {"kp": self.kp, "kp_relative": self.kp_relative,
                "hirota_relative": self.hirota_relative, "singular": [list(p) for p in self.singular]}


def kp_residual(point, D, B, grid, tol=DEFAULT_TOL):
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    rm = as_riemann(B)
    grid = list(grid)
    return summarize([evaluate_at(point, D, rm, x, y, t, tol) for x, y, t in grid], grid)


def kp_grid(point, D, B, xs, ys, ts, tol=DEFAULT_TOL):
    """Rows (x, y, t, re_u, im_u, singular) over the tensor grid."""
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    rm = as_riemann(B)
    rows = []
    for t in ts:
        for y in ys:
            for x in xs:
                ev = evaluate_at(point, D, rm, x, y, t, tol)
                rows.append((x, y, t, ev.u.real, ev.u.imag, int(ev.singular)))
    return rows


def random_z(rm, rng):
    """A random point of a fundamental domain: B a + 2 pi i b, a, b in [0,1)^g."""
    g = rm.g
    return rm.B @ rng.random(g) + 2j * math.pi * rng.random(g)


def _cd_rows(point, rm, zs, tol):
    rows, rhs = [], []
    U, V, W = point.U, point.V, point.W
    for z in zs:
        pts, w, m = _points_and_weights(rm, z, np.zeros(rm.g), 4,
                                        max(1.0, float(np.abs(U).sum() + np.abs(V).sum() + np.abs(W).sum())), tol)
        pU, pV, pW = pts @ U, pts @ V, pts @ W
        t0 = w.sum()
        tU, tUU, tUUU, tUUUU = ((w * pU ** k).sum() for k in (1, 2, 3, 4))
        tV, tVV = (w * pV).sum(), (w * pV ** 2).sum()
        tW, tUW = (w * pW).sum(), (w * pU * pW).sum()
        base = (tUUUU * t0 - 4 * tUUU * tU + 3 * tUU ** 2 + 4 * (tU * tW - t0 * tUW)
                + 3 * (t0 * tVV - tV ** 2))
        a1 = 6 * (tUU * t0 - tU ** 2)
        a2 = 8 * t0 ** 2
        nrm = max(abs(a1), abs(a2), abs(base), 1e-300)
        rows.append([a1 / nrm, a2 / nrm])
        rhs.append(-base / nrm)
    return np.array(rows), np.array(rhs)


def estimate_cd(point, B, n_samples=32, seed=0, tol=DEFAULT_TOL, rank_tol=1e-10):
    """Least-squares c, d from n_samples Hirota quartics at random z.

    Returns (c, d, residual) with residual = |A x - b| / |b| using
    row-normalized equations."""
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    rm = as_riemann(B)
    if point.g != rm.g:
        raise ValueError("point and Riemann matrix have different genus")
    rng = np.random.default_rng(seed)
    zs = [random_z(rm, rng) for _ in range(n_samples)]
    A, b = _cd_rows(point, rm, zs, tol)
    Qm, Rm = np.linalg.qr(A)
    diag = np.abs(np.diag(Rm))
    if diag.min() <= rank_tol * max(diag.max(), 1e-300):
        raise ValueError("degenerate point: the c, d system is rank deficient")
    x = np.linalg.solve(Rm, Qm.conj().T @ b)
    nb = np.linalg.norm(b)
    res = float(np.linalg.norm(A @ x - b) / nb) if nb else float(np.linalg.norm(A @ x - b))
    return complex(x[0]), complex(x[1]), res


def hirota_residual(point, B, n_samples=16, seed=1, tol=DEFAULT_TOL):
    """Relative size of H_z(point) at random z, point including c and d."""
    if not isinstance(point, DubrovinPoint):
        point = DubrovinPoint(*point)
    rm = as_riemann(B)
    rng = np.random.default_rng(seed)
    zs = [random_z(rm, rng) for _ in range(n_samples)]
    A, b = _cd_rows(point, rm, zs, tol)
    r = A @ np.array([point.c, point.d]) - b
    return float(np.abs(r).max())
