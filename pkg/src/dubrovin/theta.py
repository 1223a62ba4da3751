"""Riemann theta functions in the convention

    theta(z | B) = sum_{u in Z^g} exp(1/2 u^T B u + u^T z),   Re B < 0,

with directional derivatives, half-characteristics and the theta
constants of the doubled matrix 2B.

Truncation: write A = -Re B = L^T L and s = A^{-1} Re z.  Every term has
modulus exp(1/2 s^T A s) * exp(-1/2 |L(u - s)|^2) * |poly(u)|, so we sum over
the ellipsoid |L(u - s)| <= R and choose R from an incomplete-gamma bound on
the omitted tail.  The tolerance is relative to exp(1/2 s^T A s), the size of
the largest possible term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc, gammaln

DEFAULT_TOL = 1e-12
DEFAULT_TOL_D4 = 1e-10
MAX_POINTS = 5_000_000


class RiemannMatrix:
    """Complex symmetric g x g matrix with negative definite real part."""

    def __init__(self, B, symmetry_tol=1e-12):
        B = np.array(B, dtype=complex)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("Riemann matrix must be square")
        scale = max(1.0, np.abs(B).max())
        if np.abs(B - B.T).max() > symmetry_tol * scale:
            raise ValueError("Riemann matrix is not symmetric")
        B = (B + B.T) / 2
        A = -B.real
        try:
            L = np.linalg.cholesky(A)  # A = L L^T, L lower
        except np.linalg.LinAlgError:
            raise ValueError("real part of B is not negative definite") from None
        self.B = B
        self.g = B.shape[0]
        self.A = A
        # upper factor: A = R^T R
        self.R = L.T
        self.Rinv = np.linalg.inv(self.R)
        self.Ainv = np.linalg.inv(A)
        self.lam_min = float(np.linalg.eigvalsh(A)[0])

    def __repr__(self):
        return f"RiemannMatrix(g={self.g})"

    def doubled(self):
        return RiemannMatrix(2 * self.B)

    def to_json_obj(self):
        return {"g": self.g, "B": [[[float(x.real), float(x.imag)] for x in row] for row in self.B],
                "convention": "dubrovin"}

    @classmethod
    def from_json_obj(cls, obj):
        B = np.array([[complex(a, b) for a, b in row] for row in obj["B"]])
        if obj.get("convention", "dubrovin") == "ag":
            return convert_convention(B)
        if obj.get("convention", "dubrovin") != "dubrovin":
            raise ValueError(f"unknown convention {obj['convention']!r}")
        out = cls(B)
        if "g" in obj and obj["g"] != out.g:
            raise ValueError("g does not match the size of B")
        return out


def as_riemann(B):
    return B if isinstance(B, RiemannMatrix) else RiemannMatrix(B)


def convert_convention(B_ag):
    """Algebraic-geometry matrix (Im positive definite) -> 2*pi*i*B_ag."""
    B_ag = np.array(B_ag, dtype=complex)
    try:
        np.linalg.cholesky((B_ag.imag + B_ag.imag.T) / 2)
    except np.linalg.LinAlgError:
        raise ValueError("imaginary part of B_ag is not positive definite") from None
    return RiemannMatrix(2j * math.pi * B_ag)


@dataclass(frozen=True)
class HalfCharacteristic:
    eps: tuple

    def __post_init__(self):
        if any(e not in (0, 1) for e in self.eps):
            raise ValueError("half-characteristic entries must be 0 or 1")

    @property
    def shift(self):
        return np.array(self.eps, dtype=float) / 2


def characteristics(g):
    """All eps in (Z/2)^g, index k <-> bits of k little-endian."""
    return [tuple((k >> i) & 1 for i in range(g)) for k in range(2 ** g)]


# -- truncation ---------------------------------------------------------

def _tail_bound(R, g, rho, a, b, N):
    """Upper bound for sum over |v| >= R of exp(-|v|^2/2) (a + b|v|)^N, v in a
    translate of a lattice with minimal distance >= rho.

    Balls of radius rho/2 around the points are disjoint; on such a ball
    |w| - rho/2 <= |v| <= |w| + rho/2, so each term is at most the ball
    average of exp(-(|w| - rho/2)^2/2) (a + b rho/2 + b|w|)^N.  Integrating
    in polar coordinates with r = |w| - rho/2 >= R - rho leaves a polynomial
    times a Gaussian, i.e. incomplete gamma functions."""
    r0 = R - rho
    if r0 <= 0:
        return math.inf
    # (r + rho/2)^(g-1) (a + b rho + b r)^N as a polynomial in r, coefficients >= 0
    poly = np.polynomial.polynomial.polypow([rho / 2, 1.0], g - 1)
    poly = np.polynomial.polynomial.polymul(poly, np.polynomial.polynomial.polypow([a + b * rho, b], N))
    log_surf = math.log(2) + (g / 2) * math.log(math.pi) - gammaln(g / 2)
    log_ball = (g / 2) * math.log(math.pi) + g * math.log(rho / 2) - gammaln(g / 2 + 1)
    total = 0.0
    for k, ck in enumerate(poly):
        if ck <= 0:
            continue
        # int_{r0}^inf r^k exp(-r^2/2) dr = 2^((k-1)/2) Gamma((k+1)/2, r0^2/2)
        s = (k + 1) / 2
        q = gammaincc(s, r0 * r0 / 2)
        if q == 0:
            continue
        total += ck * math.exp((s - 1) * math.log(2) + gammaln(s) + math.log(q) + log_surf - log_ball)
    return total


class _Truncation:
    def __init__(self, rm, Rz, N, dir_norm, tol):
        self.rm = rm
        g = rm.g
        s = rm.Ainv @ Rz
        rho = math.sqrt(rm.lam_min)  # lower bound on the shortest vector of R Z^g
        # |u| <= |s| + |R^{-1}| |v|
        a = float(np.linalg.norm(s)) * dir_norm
        b = float(np.linalg.norm(rm.Rinv, 2)) * dir_norm
        R = max(rho, 1.0)
        while max(_tail_bound(R, g, rho, a, b, k) for k in range(N + 1)) > tol:
            R *= 1.15
            if R > 1e3:
                raise RuntimeError("theta tolerance not achievable")
        self.s = s
        self.radius = R
        self.points = _ellipsoid_points(rm, s, R)


def _ellipsoid_points(rm, s, R):
    """Integer u with |R_chol (u - s)| <= R (recursive Fincke-Pohst)."""
    g = rm.g
    Rc = rm.R
    out = []

    def rec(k, partial, used):
        # coordinates k..g-1 fixed in partial (dict), used = sum of squares so far
        if k < 0:
            out.append(list(partial))
            return
        # row k of upper triangular Rc involves u_k..u_{g-1}
        rest = sum(Rc[k, j] * (partial[j] - s[j]) for j in range(k + 1, g))
        rem = R * R - used
        if rem < 0:
            return
        half = math.sqrt(rem) / abs(Rc[k, k])
        center = s[k] - rest / Rc[k, k]
        lo = math.ceil(center - half)
        hi = math.floor(center + half)
        for n in range(lo, hi + 1):
            partial[k] = n
            t = Rc[k, k] * (n - s[k]) + rest
            rec(k - 1, partial, used + t * t)
            if len(out) > MAX_POINTS:
                raise RuntimeError("theta truncation needs too many lattice points")
        partial[k] = 0

    rec(g - 1, [0] * g, 0.0)
    pts = np.array(out, dtype=float).reshape(-1, g)
    # fixed summation order: by norm, then lexicographic
    order = np.lexsort(tuple(pts[:, i] for i in reversed(range(g))) + (np.round((pts ** 2).sum(1), 9),))
    return pts[order]


def _points_and_weights(rm, z, shift, N, dir_norm, tol):
    """Lattice points (shifted) and the exponential weights exp(terms - m),
    together with the common log-scale m."""
    z = np.asarray(z, dtype=complex).reshape(rm.g)
    # shifted lattice: u + shift; Re part of exponent is -1/2 (u+sh) A (u+sh) + (u+sh) Re z
    tr = _Truncation(rm, z.real, N, dir_norm, tol)
    # recentre around s - shift so that the ellipsoid is for u + shift
    if np.any(shift):
        pts = _ellipsoid_points(rm, tr.s - shift, tr.radius) + shift
    else:
        pts = tr.points
    expo = 0.5 * np.einsum("ni,ij,nj->n", pts, rm.B, pts) + pts @ z
    m = float(expo.real.max()) if len(expo) else 0.0
    return pts, np.exp(expo - m), m


def _check_dirs(dirs, g):
    out = []
    for d in dirs:
        d = np.asarray(d, dtype=complex).reshape(-1)
        if d.shape != (g,):
            raise ValueError("direction has the wrong length")
        out.append(d)
    return out


def lattice_sum(z, B, dirsets=((),), shift=None, tol=DEFAULT_TOL, log_scale=False):
    """For each list of directions in ``dirsets``, the derivative value
    sum P(u) exp(...) with P(u) = prod (u . d).  One lattice pass for all.

    With log_scale=True returns (values * exp(-m), m) to avoid overflow."""
    rm = as_riemann(B)
    g = rm.g
    dirsets = [_check_dirs(ds, g) for ds in dirsets]
    N = max((len(ds) for ds in dirsets), default=0)
    dn = max([1.0] + [float(np.abs(d).sum()) for ds in dirsets for d in ds])
    shift = np.zeros(g) if shift is None else np.asarray(shift, float)
    pts, w, m = _points_and_weights(rm, z, shift, N, dn, tol)
    vals = []
    cache = {}
    for ds in dirsets:
        f = w
        for d in ds:
            key = d.tobytes()
            if key not in cache:
                cache[key] = pts @ d
            f = f * cache[key]
        vals.append(f.sum())
    vals = np.array(vals)
    if log_scale:
        return vals, m
    return vals * math.exp(m)


def theta(z, B, tol=DEFAULT_TOL):
    return lattice_sum(z, B, [()], tol=tol)[0]


def _expand_orders(orders):
    dirs = []
    for d, k in orders:
        if k < 0:
            raise ValueError("negative derivative count")
        dirs += [d] * k
    return dirs


def theta_dirderiv(orders, z, B, tol=DEFAULT_TOL, max_order=4):
    """Directional derivative prod_i d_{dir_i}^{count_i} theta at z."""
    dirs = _expand_orders(orders)
    if len(dirs) > max_order:
        raise ValueError(f"derivative order {len(dirs)} exceeds {max_order}")
    return lattice_sum(z, B, [dirs], tol=tol)[0]


def theta_char(eps, delta, z, B, tol=DEFAULT_TOL):
    """sum exp(1/2 (u+e/2)^T B (u+e/2) + (z + 2 pi i d/2)^T (u + e/2))."""
    rm = as_riemann(B)
    e = HalfCharacteristic(tuple(eps)).shift
    dl = HalfCharacteristic(tuple(delta)).shift
    z = np.asarray(z, dtype=complex) + 2j * math.pi * dl
    return lattice_sum(z, rm, [()], shift=e, tol=tol)[0]


def theta_tensor(z, B, order, shift=None, tol=DEFAULT_TOL):
    """Array of partial derivatives d^order theta / dz_i1 ... dz_ik."""
    rm = as_riemann(B)
    g = rm.g
    shift = np.zeros(g) if shift is None else np.asarray(shift, float)
    pts, w, m = _points_and_weights(rm, z, shift, order, 1.0, tol)
    if order == 0:
        return w.sum() * math.exp(m)
    letters = "abcdefgh"[:order]
    subs = "n," + ",".join(f"n{c}" for c in letters) + "->" + letters
    return np.einsum(subs, w, *([pts] * order)) * math.exp(m)


@dataclass
class ThetaConstants:
    """theta-hat[eps](0), its Hessian Q[eps] and fourth derivative tensor at 0
    for the doubled matrix 2B, eps in little-endian index order."""
    B: RiemannMatrix
    chars: list
    values: np.ndarray
    Q: np.ndarray  # (2^g, g, g)
    T4: np.ndarray  # (2^g, g, g, g, g)
    tol: float = DEFAULT_TOL

    @property
    def g(self):
        return self.B.g

    def index(self, eps):
        return self.chars.index(tuple(eps))

    def d4(self, eps, U):
        U = np.asarray(U, dtype=complex)
        return np.einsum("ijkl,i,j,k,l->", self.T4[self.index(eps)], U, U, U, U)

    def d2(self, eps, X, Y=None):
        X = np.asarray(X, dtype=complex)
        Y = X if Y is None else np.asarray(Y, dtype=complex)
        return X @ self.Q[self.index(eps)] @ Y


def doubled_constants(B, tol=DEFAULT_TOL, tol_d4=DEFAULT_TOL_D4):
    rm = as_riemann(B)
    g = rm.g
    B2 = rm.doubled()
    chars = characteristics(g)
    vals, Qs, T4s = [], [], []
    zero = np.zeros(g)
    for eps in chars:
        sh = HalfCharacteristic(eps).shift
        vals.append(theta_tensor(zero, B2, 0, sh, tol))
        Q = theta_tensor(zero, B2, 2, sh, tol)
        Qs.append((Q + Q.T) / 2)
        T4s.append(theta_tensor(zero, B2, 4, sh, min(tol, tol_d4)))
    return ThetaConstants(rm, chars, np.array(vals), np.array(Qs), np.array(T4s), tol)


def theta_jet(z, B, order, shift=None, tol=DEFAULT_TOL):
    """[T0, T1, ..., T_order]: all partial derivative tensors at z, one pass."""
    rm = as_riemann(B)
    g = rm.g
    shift = np.zeros(g) if shift is None else np.asarray(shift, float)
    pts, w, m = _points_and_weights(rm, z, shift, order, 1.0, tol)
    scale = math.exp(m)
    out = [w.sum() * scale]
    letters = "abcdefgh"
    for k in range(1, order + 1):
        subs = "n," + ",".join(f"n{c}" for c in letters[:k]) + "->" + letters[:k]
        out.append(np.einsum(subs, w, *([pts] * k)) * scale)
    return out
