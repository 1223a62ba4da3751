"""Command-line front end.

Input files are JSON (or plain text where noted):

  curve    {"vars": ["x", "y"], "f": .., "numerators": [..]}; f and the
           numerators are sparse-polynomial JSON or strings such as
           "y^2 - x^6 + 1"; "basis" is accepted for "numerators"; a bare
           equation in a text file also works
  riemann  {"B": [[[re, im], ...], ...], "convention": "dubrovin" | "ag"}
  polys    ["u1*v2 - u2*v1", ...]  or one polynomial per line
  point    {"U": [...], "V": [...], "W": [...], "c": .., "d": .., "Pa": [[...]]}

Complex numbers are written [re, im]; plain numbers and "1+2j" strings are
accepted on input.  Presets: --curve @genus2 | @trott, --riemann @genus2 |
@trott, --point @genus2 | @trott.

Every subcommand prints a short summary to stdout and writes its artifact
(JSON, or CSV for kp-grid) to --out, or to stdout when --out is absent.
Errors exit with status 1 and a JSON object {"error", "message"} on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import presets
from .curvefield import XY, PlaneCurve, holomorphic_basis
from .exactalg import VarTable, WPoly
from .param import adapt_coordinates, clear_denominators, lift_canonical
from .theta import DEFAULT_TOL, RiemannMatrix, doubled_constants, theta, theta_char

SUBCOMMANDS = ("parametrize", "verify-ideal", "implicitize", "initial-check", "theta-eval",
               "hirota", "estimate-cd", "schottky-recover", "kp-grid", "degenerate-hirota")
CSV_HEADER = ["x", "y", "t", "re_u", "im_u", "singular"]


class InputError(ValueError):
    pass


@dataclass
class JobConfig:
    subcommand: str
    curve: str = None
    riemann: str = None
    polys: str = None
    point: str = None
    support: str = None
    gamma: str = None
    z: list = None
    char: str = None
    degree: int = None
    tol: float = None
    seed: int = 0
    out: str = None
    method: str = "modular"
    scale: str = "dubrovin"
    canonical: bool = False
    grid: list = field(default_factory=lambda: [-5.0, 5.0, 10, -5.0, 5.0, 10, "0,0.5,1"])


# -- input parsing -------------------------------------------------------

def _read(path, what):
    if path is None:
        raise InputError(f"missing --{what}")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None
    if not text.strip():
        raise InputError(f"{what} file {path} is empty")
    return text


def _json_or_text(path, what):
    text = _read(path, what)
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cplx(x):
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    if isinstance(x, (int, float, complex)):
        return complex(x)
    raise InputError(f"not a complex number: {x!r}")


def cvec(xs):
    return np.array([cplx(x) for x in xs], dtype=complex)


def cjson(z):
    z = complex(z)
    return [z.real, z.imag]


def load_curve(source):
    if source == "@genus2":
        obj = presets.GENUS2_CURVE
    elif source == "@trott":
        obj = presets.TROTT_CURVE
    else:
        obj = _json_or_text(source, "curve")
    if isinstance(obj, str):
        obj = {"f": obj.strip()}
    if not isinstance(obj, dict) or "f" not in obj:
        raise InputError("curve JSON needs a field 'f'")
    f = obj["f"]
    if isinstance(f, dict):
        f = WPoly.from_json_obj(f, XY)
    try:
        C = PlaneCurve(f)
    except SyntaxError as exc:
        raise InputError(f"cannot parse curve equation: {exc}") from None
    basis = obj.get("numerators", obj.get("basis"))
    if basis is not None:
        basis = [WPoly.from_json_obj(h, XY) if isinstance(h, dict) else h for h in basis]
    return C, lift_canonical(C, holomorphic_basis(C, basis))


def load_riemann(source):
    if source == "@genus2":
        return RiemannMatrix(presets.GENUS2_B)
    if source == "@trott":
        return RiemannMatrix(presets.TROTT_B)
    obj = _json_or_text(source, "riemann")
    if isinstance(obj, list):
        obj = {"B": obj}
    if not isinstance(obj, dict) or "B" not in obj:
        raise InputError("riemann JSON needs a field 'B'")
    B = [[cplx(x) for x in row] for row in obj["B"]]
    return RiemannMatrix.from_json_obj({"B": [[cjson(x) for x in row] for row in B],
                                        "convention": obj.get("convention", "dubrovin")})


def load_polys(source, vt):
    obj = _json_or_text(source, "polys")
    if isinstance(obj, dict):
        obj = obj.get("polys", [])
    if isinstance(obj, str):
        obj = [line for line in obj.splitlines() if line.strip() and not line.startswith("#")]
    out = []
    for item in obj:
        if isinstance(item, dict):
            out.append(WPoly.from_json_obj(item, vt))
        else:
            try:
                out.append(WPoly.parse(str(item), vt))
            except (SyntaxError, KeyError, ValueError) as exc:
                raise InputError(f"cannot parse polynomial {item!r}: {exc}") from None
    if not out:
        raise InputError("no polynomials given")
    return out


def load_point(source):
    from .hirota import DubrovinPoint
    if source == "@trott":
        U, V, W = presets.adapted_trott_point()
        return DubrovinPoint(U, V, W), True
    if source == "@genus2":
        obj = presets.GENUS2_POINT
    else:
        obj = _json_or_text(source, "point")
    if not isinstance(obj, dict) or not all(k in obj for k in "UVW"):
        raise InputError("point JSON needs fields U, V, W")
    U, V, W = (cvec(obj[k]) for k in "UVW")
    if "Pa" in obj:
        Pa = np.array([[cplx(x) for x in row] for row in obj["Pa"]])
        U, V, W = adapt_coordinates(U, V, W, Pa)
    has_cd = "c" in obj and "d" in obj
    c = cplx(obj.get("c", 0))
    d = cplx(obj.get("d", 0))
    return DubrovinPoint(U, V, W, c, d), not has_cd


def point_json(pt):
    return {"U": [cjson(x) for x in pt.U], "V": [cjson(x) for x in pt.V],
            "W": [cjson(x) for x in pt.W], "c": cjson(pt.c), "d": cjson(pt.d)}


def _tol(cfg, default):
    return default if cfg.tol is None else cfg.tol


# -- subcommands ---------------------------------------------------------

def cmd_parametrize(cfg):
    C, p = load_curve(cfg.curve)
    p = clear_denominators(p)
    blocks = {name: [e.to_json_obj() for e in blk] for name, blk in zip("UVW", p.cleared)}
    art = {"f": C.f.to_json_obj(), "f_y": C.fy.to_json_obj(), "genus": p.g,
           "basis_numerators": [h.to_json_obj() for h in p.basis_numerators],
           "cleared": blocks, "clearing_powers": {"U": 2, "V": 4, "W": 6}}
    summary = [f"genus {p.g}: U, V, W cleared by f_y^2, f_y^4, f_y^6"]
    return art, summary


def cmd_verify_ideal(cfg):
    from .ideal import membership_check
    _, p = load_curve(cfg.curve)
    vt = VarTable.standard(p.g)
    polys = load_polys(cfg.polys, vt)
    res = [membership_check(q, p, cfg.method) for q in polys]
    art = {"method": cfg.method, "results": [
        {"poly": q.to_json_obj(), "member": bool(r)} for q, r in zip(polys, res)]}
    summary = [f"{'PASS' if r else 'FAIL'}  {q.to_expr()}" for q, r in zip(polys, res)]
    return art, summary


def cmd_implicitize(cfg):
    from .ideal import DEFAULT_CAP, graded_implicitize
    if cfg.degree is None:
        raise InputError("implicitize needs --degree")
    _, p = load_curve(cfg.curve)
    space = graded_implicitize(p, cfg.degree, DEFAULT_CAP)
    art = {"degree": space.degree, "dimension": space.dimension,
           "basis": [b.to_json_obj() for b in space.basis]}
    summary = [f"degree {space.degree}: relation space of dimension {space.dimension}"]
    summary += [f"  {b.to_expr()}" for b in space.basis]
    return art, summary


def cmd_initial_check(cfg):
    from .ideal import Inconclusive, initial_ideal_generators, verify_initial_containment
    _, p = load_curve(cfg.curve)
    vt = VarTable.standard(p.g)
    polys = load_polys(cfg.polys, vt)
    if cfg.canonical:
        polys = initial_ideal_generators(polys, p.g)
    rows, summary = [], []
    for q in polys:
        try:
            verdict = "true" if verify_initial_containment(p, q, cfg.degree) else "false"
        except Inconclusive:
            verdict = "inconclusive"
        rows.append({"poly": q.to_json_obj(), "verdict": verdict})
        summary.append(f"{verdict:12s} {q.to_expr()}")
    return {"results": rows}, summary


def _parse_z(values, g):
    """--z values: each a JSON vector, entries numbers, [re, im] or "a+bj"."""
    if not values:
        return [np.zeros(g, dtype=complex)]
    zs = []
    for text in values:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            raise InputError(f"--z is not JSON: {text!r}") from None
        if not isinstance(obj, list):
            obj = [obj]
        z = cvec(obj)
        if len(z) != g:
            raise InputError(f"z must have {g} entries")
        zs.append(z)
    return zs


def cmd_theta_eval(cfg):
    rm = load_riemann(cfg.riemann)
    tol = _tol(cfg, DEFAULT_TOL)
    zs = _parse_z(cfg.z, rm.g)
    if cfg.char:
        eps, _, delta = cfg.char.partition("/")
        eps = [int(t) for t in eps.split(",")]
        delta = [int(t) for t in delta.split(",")] if delta else [0] * rm.g
        vals = [theta_char(eps, delta, z, rm, tol) for z in zs]
    else:
        vals = [theta(z, rm, tol) for z in zs]
    art = {"riemann": rm.to_json_obj(), "char": cfg.char, "tol": tol,
           "values": [{"z": [cjson(x) for x in z], "theta": cjson(v)} for z, v in zip(zs, vals)]}
    summary = [f"theta({', '.join(f'{x:.6g}' for x in z)}) = {complex(v):.12g}" for z, v in zip(zs, vals)]
    return art, summary


def _scale(cfg):
    if cfg.scale == "dubrovin":
        return 1.0
    if cfg.scale == "ag":
        return 2j * np.pi
    raise InputError("--scale must be 'dubrovin' or 'ag'")


def cmd_hirota(cfg):
    from .hirota import dubrovin_quartics, hirota_quartic
    rm = load_riemann(cfg.riemann)
    s = _scale(cfg)
    if cfg.z is not None:
        forms = [("z", hirota_quartic(z, rm, _tol(cfg, DEFAULT_TOL), s)) for z in _parse_z(cfg.z, rm.g)]
    else:
        C = doubled_constants(rm)
        forms = [("".join(map(str, eps)), q) for eps, q in zip(C.chars, dubrovin_quartics(C, s))]
    art = {"scale": cfg.scale, "forms": [{"label": k, "poly": q.poly.to_json_obj()} for k, q in forms]}
    summary = [f"{k}: {len(q.poly)} terms, max |coeff| {q.coeff_norm():.6g}" for k, q in forms]
    return art, summary


def _fitted_point(cfg, rm):
    from .hirota import DubrovinPoint, estimate_cd
    pt, need_fit = load_point(cfg.point)
    if pt.g != rm.g:
        raise InputError("point and Riemann matrix have different genus")
    res = None
    if need_fit:
        c, d, res = estimate_cd(pt, rm, seed=cfg.seed)
        pt = DubrovinPoint(pt.U, pt.V, pt.W, c, d)
    return pt, res


def cmd_estimate_cd(cfg):
    from .hirota import DubrovinPoint, estimate_cd
    rm = load_riemann(cfg.riemann)
    pt, _ = load_point(cfg.point)
    c, d, res = estimate_cd(pt, rm, seed=cfg.seed)
    pt = DubrovinPoint(pt.U, pt.V, pt.W, c, d)
    art = {"point": point_json(pt), "c": cjson(c), "d": cjson(d), "relative_residual": res}
    summary = [f"c = {c:.10g}", f"d = {d:.10g}", f"relative residual {res:.3g}"]
    return art, summary


def cmd_schottky(cfg):
    from .schottky import DEFAULT_RANK_TOL, genus2_quintic_space, lambda_nullspace, recover_canonical_quartics
    rm = load_riemann(cfg.riemann)
    C = doubled_constants(rm)
    tol = _tol(cfg, DEFAULT_RANK_TOL)
    space = lambda_nullspace(C, tol)
    art = {"g": rm.g, "nullspace_dimension": space.dimension, "gap": space.gap,
           "singular_values": [float(x) for x in space.singular_values]}
    summary = [f"lambda nullspace dimension {space.dimension} (gap {space.gap:.3g})"]
    if rm.g == 3 and space.dimension:
        qs = recover_canonical_quartics(C, tol)
        art["quartics"] = [q.to_json_obj() for q in qs]
        summary += [f"  {q.to_expr()}" for q in qs]
    elif rm.g == 2:
        qs, gap = genus2_quintic_space(C, tol, _scale(cfg))
        art["quintics"] = [q.to_json_obj() for q in qs]
        art["quintic_gap"] = gap
        summary.append(f"two quintics (gap {gap:.3g})")
    return art, summary


def _grid(cfg):
    x0, x1, nx, y0, y1, ny, ts = cfg.grid
    xs = np.linspace(float(x0), float(x1), int(nx))
    ys = np.linspace(float(y0), float(y1), int(ny))
    ts = [float(t) for t in str(ts).split(",")]
    return xs, ys, ts


def cmd_kp_grid(cfg):
    from .hirota import kp_grid, kp_residual
    rm = load_riemann(cfg.riemann)
    pt, fit = _fitted_point(cfg, rm)
    xs, ys, ts = _grid(cfg)
    D = np.zeros(rm.g)
    tol = _tol(cfg, DEFAULT_TOL)
    rows = kp_grid(pt, D, rm, xs, ys, ts, tol)
    grid = [(x, y, t) for x in xs for y in ys for t in ts]
    res = kp_residual(pt, D, rm, grid, tol)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for x, y, t, re_u, im_u, sing in rows:
        w.writerow([repr(float(x)), repr(float(y)), repr(float(t)), repr(float(re_u)),
                    repr(float(im_u)), int(bool(sing))])
    summary = [f"{len(rows)} grid points, c = {pt.c:.10g}",
               f"KP relative residual {res.kp_relative:.3g}, Hirota relative {res.hirota_relative:.3g}, "
               f"{len(res.singular)} singular"]
    if fit is not None:
        summary.append(f"c, d fitted (relative residual {fit:.3g})")
    return buf.getvalue(), summary


def load_support(source):
    obj = _json_or_text(source, "support")
    if not isinstance(obj, list) or not all(isinstance(v, list) for v in obj):
        raise InputError("support JSON must be a list of integer vectors")
    return [tuple(int(a) for a in v) for v in obj]


def _exact_or_complex(x):
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str) and "j" not in x and "i" not in x:
        return Fraction(x)
    return cplx(x)


def cmd_degenerate_hirota(cfg):
    from .degenerate import ExpSumTheta, expsum_hirota, expsum_hirota_symbolic
    support = load_support(cfg.support)
    keyname = lambda k: ",".join(map(str, k))
    if cfg.gamma is None:
        sym = expsum_hirota_symbolic(support)
        art = {"support": [list(s) for s in support], "gamma": None, "coefficients": [
            {"key": list(k), "terms": [{"pair": list(ij), "poly": p.to_json_obj()} for ij, p in items]}
            for k, items in sorted(sym.items())]}
        summary = [f"exp({keyname(k)}): {len(items)} gamma products" for k, items in sorted(sym.items())]
        return art, summary
    gam = _json_or_text(cfg.gamma, "gamma")
    if not isinstance(gam, list):
        raise InputError("gamma JSON must be a list")
    th = ExpSumTheta(support, [_exact_or_complex(x) for x in gam])
    H = expsum_hirota(th)
    art = {"support": [list(s) for s in support],
           "gamma": [str(c) if isinstance(c, Fraction) else cjson(c) for c in th.coeffs],
           "coefficients": [{"key": list(k), "poly": p.to_json_obj()} for k, p in sorted(H.items())]}
    summary = [f"exp({keyname(k)}): {p.to_expr() if p else '0'}" for k, p in sorted(H.items())]
    return art, summary


COMMANDS = {
    "parametrize": cmd_parametrize,
    "verify-ideal": cmd_verify_ideal,
    "implicitize": cmd_implicitize,
    "initial-check": cmd_initial_check,
    "theta-eval": cmd_theta_eval,
    "hirota": cmd_hirota,
    "estimate-cd": cmd_estimate_cd,
    "schottky-recover": cmd_schottky,
    "kp-grid": cmd_kp_grid,
    "degenerate-hirota": cmd_degenerate_hirota,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="dubrovin", description="Dubrovin threefolds: exact and numeric tools")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--out", help="artifact file (default: stdout)")
        p.add_argument("--seed", type=int, default=0, help="seed for random sampling (default 0)")
        p.add_argument("--tol", type=float, help="tolerance (module default if omitted)")
        return p

    p = common(sub.add_parser("parametrize", help="cleared lifted canonical curve"))
    p.add_argument("--curve", required=True)

    p = common(sub.add_parser("verify-ideal", help="membership of polynomials in the ideal"))
    p.add_argument("--curve", required=True)
    p.add_argument("--polys", required=True)
    p.add_argument("--method", choices=["modular", "symbolic"], default="modular")

    p = common(sub.add_parser("implicitize", help="relations of one weighted degree"))
    p.add_argument("--curve", required=True)
    p.add_argument("--degree", type=int, required=True)

    p = common(sub.add_parser("initial-check", help="initial forms with lower-weight trailing terms"))
    p.add_argument("--curve", required=True)
    p.add_argument("--polys", required=True)
    p.add_argument("--canonical", action="store_true",
                   help="treat --polys as canonical generators and check all their initial generators")
    p.add_argument("--degree", type=int, help="largest allowed drop in secondary weight")

    p = common(sub.add_parser("theta-eval", help="Riemann theta values"))
    p.add_argument("--riemann", required=True)
    p.add_argument("--z", action="append", help="JSON vector; repeat for several points (default: the origin)")
    p.add_argument("--char", help="half-characteristic 'e1,e2/d1,d2'")

    p = common(sub.add_parser("hirota", help="Hirota quartic at z, or the 2^g Dubrovin quartics"))
    p.add_argument("--riemann", required=True)
    p.add_argument("--z", action="append", help="JSON vector; repeat for several points")
    p.add_argument("--scale", default="dubrovin", help="derivative convention: dubrovin (1) or ag (2 pi i)")

    p = common(sub.add_parser("estimate-cd", help="least-squares c, d for a point"))
    p.add_argument("--riemann", required=True)
    p.add_argument("--point", required=True)

    p = common(sub.add_parser("schottky-recover", help="canonical equations from theta constants"))
    p.add_argument("--riemann", required=True)
    p.add_argument("--scale", default="dubrovin")

    p = common(sub.add_parser("kp-grid", help="CSV grid of the KP solution"))
    p.add_argument("--riemann", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--x", nargs=3, default=["-5", "5", "10"], metavar=("X0", "X1", "NX"))
    p.add_argument("--y", nargs=3, default=["-5", "5", "10"], metavar=("Y0", "Y1", "NY"))
    p.add_argument("--t", default="0,0.5,1", help="comma separated times")

    p = common(sub.add_parser("degenerate-hirota", help="Hirota expansion of a finite exponential sum"))
    p.add_argument("--support", required=True)
    p.add_argument("--gamma", help="JSON list of coefficients (symbolic gammas if omitted)")
    return ap


def config_from_args(ns):
    cfg = JobConfig(ns.subcommand)
    for k, v in vars(ns).items():
        if hasattr(cfg, k) and k != "grid":
            setattr(cfg, k, v)
    if ns.subcommand == "kp-grid":
        cfg.grid = list(ns.x) + list(ns.y) + [ns.t]
    return cfg


def emit(art, out):
    text = art if isinstance(art, str) else json.dumps(art, indent=1)
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def run(cfg):
    """Execute one job; returns the exit status."""
    try:
        if cfg.subcommand not in COMMANDS:
            raise InputError(f"unknown subcommand {cfg.subcommand!r}")
        art, summary = COMMANDS[cfg.subcommand](cfg)
    except Exception as exc:  # every module error becomes an error record
        rec = {"error": type(exc).__name__, "message": str(exc), "subcommand": cfg.subcommand}
        sys.stderr.write(json.dumps(rec) + "\n")
        return 1
    for line in summary:
        print(line)
    emit(art, cfg.out)
    return 0


def main(argv=None):
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
