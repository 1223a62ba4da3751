"""Linear algebra on theta constants: the lambda system, recovery of the
canonical quartic (genus 3) and the two quintics (genus 2)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .exactalg import VarTable, WPoly
from .hirota import dubrovin_quartic

DEFAULT_RANK_TOL = 1e-6
NOISE_FLOOR = 1e-15


@dataclass
class LambdaSolutionSpace:
    basis: list           # complex vectors of length 2^g, theta-module eps order
    chars: list
    singular_values: np.ndarray
    gap: float

    @property
    def dimension(self):
        return len(self.basis)


def _nullspace(M, tol):
    """Numeric nullspace by SVD with threshold tol * sigma_max.

    gap = smallest kept singular value / largest dropped one (or the noise
    floor sigma_max * 1e-15 when nothing can be dropped)."""
    M = np.asarray(M, dtype=complex)
    rows, cols = M.shape
    _, s, Vh = np.linalg.svd(M)
    smax = s[0] if len(s) else 0.0
    if smax == 0:
        return [np.eye(cols)[i] for i in range(cols)], s, math.inf
    rank = int(np.sum(s > tol * smax))
    dropped = s[rank:]
    floor = smax * NOISE_FLOOR
    denom = max(float(dropped.max()) if len(dropped) else 0.0, floor)
    gap = float(s[rank - 1] / denom) if rank else 0.0
    basis = [Vh[k].conj() for k in range(rank, cols)]
    return basis, s, gap


def lambda_system(constants):
    g = constants.g
    iu = np.triu_indices(g)
    rows = [constants.Q[:, i, j] for i, j in zip(*iu)]
    rows.append(constants.values)
    return np.array(rows)


def lambda_nullspace(constants, tol=DEFAULT_RANK_TOL):
    basis, s, gap = _nullspace(lambda_system(constants), tol)
    return LambdaSolutionSpace(basis, list(constants.chars), s, gap)


def u_vartable(g):
    return VarTable([f"u{i}" for i in range(1, g + 1)])


def quartic_from_tensor(T, vt=None):
    g = T.shape[0]
    vt = vt or u_vartable(g)
    terms = {}
    for combo in combinations_with_replacement(range(g), 4):
        mult = math.factorial(4)
        e = [0] * len(vt)
        for i in set(combo):
            mult //= math.factorial(combo.count(i))
        for i in combo:
            e[i] += 1
        terms[tuple(e)] = complex(T[combo]) * mult
    return WPoly(vt, terms)


def normalize(p):
    """Divide by the largest-magnitude coefficient (which becomes 1)."""
    lead = max(p.terms.values(), key=abs)
    return p.map_coeffs(lambda c: c / lead)


def recover_canonical_quartics(constants, tol=DEFAULT_RANK_TOL):
    space = lambda_nullspace(constants, tol)
    if not space.basis:
        raise ValueError("the lambda system has only the zero solution")
    out = []
    for lam in space.basis:
        T = np.einsum("e,eijkl->ijkl", lam, constants.T4)
        out.append(normalize(quartic_from_tensor(T)))
    return out


def genus2_quintics(constants, tol=DEFAULT_RANK_TOL, derivative_scale=1.0):
    """Two quintics sum_eps l[eps](U) F[eps] free of c and d."""
    return genus2_quintic_space(constants, tol, derivative_scale)[0]


def genus2_quintic_space(constants, tol=DEFAULT_RANK_TOL, derivative_scale=1.0):
    """(quintics, singular-value gap) for the six-by-eight system."""
    if constants.g != 2:
        raise ValueError("genus2_quintics needs genus 2 constants")
    n = len(constants.chars)
    # unknown l[eps] = a_eps u1 + b_eps u2, ordered (eps, k)
    # sum l Q(U, U): cubic monomials u1^3, u1^2 u2, u1 u2^2, u2^3
    cubics = [(3, 0), (2, 1), (1, 2), (0, 3)]
    rows = []
    for m in cubics:
        row = []
        for k in range(n):
            Q = constants.Q[k]
            quad = {(2, 0): Q[0, 0], (1, 1): 2 * Q[0, 1], (0, 2): Q[1, 1]}
            for var in range(2):
                shift = (1, 0) if var == 0 else (0, 1)
                key = (m[0] - shift[0], m[1] - shift[1])
                row.append(quad.get(key, 0.0))
        rows.append(row)
    for var in range(2):
        row = []
        for k in range(n):
            row += [constants.values[k] if v == var else 0.0 for v in range(2)]
        rows.append(row)
    basis, s, gap = _nullspace(np.array(rows, dtype=complex), tol)
    if len(basis) != 2:
        raise ValueError(f"expected a 2-dimensional solution space, found {len(basis)}")
    vt = VarTable.standard(2, with_cd=True)
    target = VarTable.standard(2)
    u = [WPoly.var(vt, "u1"), WPoly.var(vt, "u2")]
    out = []
    for vec in basis:
        total = WPoly.zero(vt)
        for k, eps in enumerate(constants.chars):
            ell = u[0] * complex(vec[2 * k]) + u[1] * complex(vec[2 * k + 1])
            total = total + ell * dubrovin_quartic(eps, constants, derivative_scale).poly
        # c and d drop out up to rounding
        total = WPoly(vt, {e: c for e, c in total.terms.items() if e[-1] == 0 and e[-2] == 0})
        out.append(total.restrict(target))
    return out, gap
