"""nil-theta: command-line front end.

Exit codes: 0 success, 1 a verify criterion failed, 2 invalid input,
3 a numerical result could not be certified.  Errors are written to stderr
as a JSON object {"error": kind, "message": text}.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import acceptance, coadjoint, ladder, lie, reps, spectral, symplectic, theta

class ValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


# ---------------------------------------------------------------- parsing helpers

def _rationals(text: str, count: int | None = None) -> list[Fraction]:
    try:
        values = [lie.parse_rational(p) for p in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse {text!r} as comma-separated rationals") from exc
    if count is not None and len(values) != count:
        raise ValidationError(f"expected {count} components, got {len(values)} in {text!r}")
    return values


def _rational(text: str) -> Fraction:
    return _rationals(text, 1)[0]


def _family_param(text: str):
    t = text.strip().lower()
    if t in ("inf", "+inf", "oo", "infinity"):
        return coadjoint.INF
    if t in ("-inf", "-oo", "-infinity"):
        return -coadjoint.INF
    return _rational(text)


def _reals(text: str, count: int) -> list[float]:
    return [float(v) for v in _rationals(text, count)]


def _json_number(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}")
    return value


# ---------------------------------------------------------------- subcommands

def cmd_group(args) -> dict:
    g = lie.GroupElement(*_rationals(args.g, 5))
    if args.op == "multiply":
        if args.h is None:
            raise ValidationError("multiply needs --h")
        h = lie.GroupElement(*_rationals(args.h, 5))
        return {"product": lie.to_json(lie.multiply(g, h)),
                "psi": _json_number(lie.cocycle_psi(g, h))}
    if args.op == "inverse":
        return {"inverse": lie.to_json(lie.inverse(g))}
    if args.op == "reduce":
        gamma, g0 = lie.lattice_reduce(g)
        return {"gamma": lie.to_json(gamma), "reduced": lie.to_json(g0)}
    return {"matrix": lie.to_json(lie.to_matrix(g)), "log": lie.to_json(lie.log_group(g))}


def _orbit_json(orbit) -> dict:
    out = {"class": type(orbit).__name__}
    for name, value in vars(orbit).items():
        out[name] = _json_number(value)
    return out


def cmd_orbits(args) -> dict:
    lam = coadjoint.Covector(*_rationals(args.covector, 5))
    out = _orbit_json(coadjoint.classify_orbit(lam))
    if args.op == "normalize":
        if lam.mu == 0:
            raise ValidationError("normalizer exists only for mu != 0")
        g = coadjoint.orbit_normalizer(lam)
        out["normalizer"] = lie.to_json(g)
        out["image"] = [_json_number(c) for c in coadjoint.coadjoint_action(g, lam)]
    return out


def cmd_subalg(args) -> dict:
    params = [_family_param(p) for p in args.params]
    try:
        h = coadjoint.subordinate_family(args.family, *params)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc
    out = {"family": args.family, "params": args.params,
           "basis": [lie.to_json(v) for v in h.basis],
           "is_subalgebra": coadjoint.is_subalgebra(h), "is_ideal": coadjoint.is_ideal(h),
           "is_commutative": coadjoint.is_commutative(h)}
    L = symplectic.subalgebra_to_lagrangian(h)
    out["lagrangian"] = [lie.to_json(v) for v in L]
    out["is_lagrangian"] = symplectic.is_lagrangian(L)
    if args.covector:
        lam = coadjoint.Covector(*_rationals(args.covector, 5))
        out["subordinate_to"] = [_json_number(c) for c in lam]
        out["is_subordinate"] = coadjoint.is_subordinate(h, lam)
    return out


def cmd_foliate(args) -> dict:
    e = _rational(args.e)
    c = symplectic.cy_structure(e)
    report = symplectic.verify_cy(c)
    L = symplectic.lagrangian_for_e(e)
    report["lagrangian"] = [lie.to_json(v) for v in L]
    report["special_lagrangian"] = symplectic.is_special_lagrangian(L, c)
    report["J"] = c.J.round(15).tolist()
    report["period"] = [[[z.real, z.imag] for z in row] for row in c.period]
    if args.x is not None:
        parts = _rationals(args.x)
        if len(parts) not in (1, 3) or (len(parts) == 3 and parts[2].denominator != 1):
            raise ValidationError("--x takes p/q or p,q,d meaning p + q sqrt(d)")
        x = symplectic.QuadraticSurd(*parts[:2], int(parts[2])) if len(parts) == 3 else symplectic.QuadraticSurd(parts[0])
        report["torus_fiber"] = symplectic.is_torus_fiber(e, x)
    return report


def cmd_intpoints(args):
    k = args.k
    if k == 0:
        raise ValidationError("k must be nonzero")
    pts = reps.enumerate_integral_points(k)
    index = {(p.m, p.n): i for i, p in enumerate(pts)}
    rows = []
    if args.window is None:
        rows = [(p.m, p.n, i) for i, p in enumerate(pts)]
    else:
        W = _positive("window", args.window, 0)
        for m in range(-W, W + 1):
            for n in range(-W, W + 1):
                rows.append((m, n, index[reps.orbit_representative(k, (m, n))]))
    if args.format == "csv":
        return _csv(["m", "n", "orbit_id"], rows)
    return {"k": k, "count": len(pts), "rows": [dict(m=m, n=n, orbit_id=o) for m, n, o in rows]}


def _gaussian(args) -> theta.GaussianSpec:
    if args.sigma <= 0:
        raise ValidationError("sigma must be positive")
    return theta.GaussianSpec(args.x0, args.t0, args.sigma)


def cmd_theta(args) -> dict:
    if args.k == 0:
        raise ValidationError("k must be nonzero")
    f = _gaussian(args)
    point = _reals(args.point, 4)
    if args.op == "eval":
        window = theta.TruncationWindow(args.window, args.tol) if args.window else None
        val = theta.theta_R4(args.k, args.m, args.n, f, point, window=window, tol=args.tol)
        return {"k": args.k, "m": args.m, "n": args.n, "point": point, "value": [val.real, val.imag]}
    rep = theta.check_pseudoperiodicity(args.k, args.m, args.n, f, point, tol=args.tol)
    rep["passed"] = max(rep["residuals"]) < 1e-10
    return rep


def cmd_spectrum(args):
    N = _positive("N", args.N, 4)
    count = _positive("count", args.count)
    if args.eps is not None:
        eps = float(_rational(args.eps))
        if eps < 0:
            raise ValidationError("eps must be nonnegative")
        rep = spectral.band_report((eps,), N, count)["rows"][0]
        vals = rep["eigenvalues"]
        payload = {"eps": eps, "basis": N, "eigenvalues": vals,
                   "centers": rep["centers"], "deviations": rep["deviations"]}
    else:
        k = _positive("k", args.k)
        report = spectral.spectrum_delta_k(k, N, count)
        if not report.converged:
            raise spectral.NonConvergenceError(
                f"lowest eigenvalue moved by {report.refinement_change:.2e} under basis refinement")
        payload = report.to_json()
        vals = payload["eigenvalues"]
    if args.format == "csv":
        return _csv(["index", "eigenvalue"], list(enumerate(vals)))
    return payload


def _poly_json(p: ladder.LadderPolynomial) -> dict:
    return {"text": str(p), "terms": p.to_json()}


def cmd_bnf(args) -> dict:
    try:
        layers = ladder.bnf(args.order)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    out = {"order": args.order, "convention": "a1^al1 a2^al2 b1^be1 b2^be2, [a_i, b_j] = delta_ij, a lowers, b raises, a to the left"}
    for grade, (K, A) in enumerate(layers, start=2):
        out[f"K{grade}"] = _poly_json(K)
        out[f"A{grade}"] = _poly_json(A)
    if args.order == 4:
        out["vacuum_K4"] = str(ladder.vacuum_expectation(layers[2][0]))
    return out


def cmd_quantize(args) -> dict:
    k = _positive("k", args.k)
    basis = spectral.quantization_basis(k, _positive("N", args.N, 4))
    gs = basis[0].ground_state
    out = {"k": k, "count": len(basis), "ground_energy": gs.eigenvalue, "gap": gs.gap}
    if args.point:
        point = _reals(args.point, 4)
        out["point"] = point
        out["values"] = [{"m": ev.point.m, "n": ev.point.n, "value": [complex(ev(point)).real, complex(ev(point)).imag]}
                         for ev in basis]
    return out


def cmd_verify(args):
    ids = list(acceptance.CRITERIA) if args.criterion == "all" else [args.criterion]
    results = []
    for cid in ids:
        try:
            results.append(acceptance.run_criterion(cid))
        except KeyError as exc:
            raise ValidationError(str(exc)) from exc
    payload = []
    for r in results:
        item = r.to_json()
        if not args.timing:
            item.pop("elapsed_s")
        payload.append(item)
    code = 0 if all(r.passed for r in results) else 1
    return (payload[0] if len(payload) == 1 else payload), code


# ---------------------------------------------------------------- plumbing

def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Fraction):
        return _json_number(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    p = _Parser(prog="nil-theta", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("group", parents=[common], help="exact group arithmetic")
    g.add_argument("op", choices=("multiply", "inverse", "reduce", "matrix"))
    g.add_argument("--g", required=True, help="a1,a2,a3,r,v as rationals")
    g.add_argument("--h", help="second factor for multiply")
    g.set_defaults(func=cmd_group)

    o = sub.add_parser("orbits", parents=[common], help="coadjoint orbit classification")
    o.add_argument("op", choices=("classify", "normalize"))
    o.add_argument("--covector", required=True, help="alpha1,alpha2,alpha3,rho,mu")
    o.set_defaults(func=cmd_orbits)

    s = sub.add_parser("subalg", parents=[common], help="members of the subordinate subalgebra families")
    s.add_argument("family", choices=("c", "bd", "e"))
    s.add_argument("params", nargs="+", help="rational parameters; inf and -inf allowed")
    s.add_argument("--covector", help="also test subordinacy to this covector")
    s.set_defaults(func=cmd_subalg)

    f = sub.add_parser("foliate", parents=[common], help="compatible structure and special Lagrangian check for one e")
    f.add_argument("--e", required=True)
    f.add_argument("--x", help="test whether the fibre through x closes up; p/q or p,q,d for p + q sqrt(d)")
    f.set_defaults(func=cmd_foliate)

    ip = sub.add_parser("intpoints", parents=[common], help="integral points of level k")
    ip.add_argument("--k", type=int, required=True)
    ip.add_argument("--window", type=int, help="label every (m, n) in [-W, W]^2 by its orbit")
    ip.add_argument("--format", "--emit", dest="format", choices=("csv", "json"), default="csv")
    ip.set_defaults(func=cmd_intpoints)

    th = sub.add_parser("theta", parents=[common], help="theta functions of a Gaussian")
    th.add_argument("op", choices=("eval", "check"))
    th.add_argument("--k", type=int, default=1)
    th.add_argument("--m", type=int, default=0)
    th.add_argument("--n", type=int, default=0)
    th.add_argument("--point", required=True, help="x,y,z,t")
    th.add_argument("--x0", type=float, default=0.0)
    th.add_argument("--t0", type=float, default=0.0)
    th.add_argument("--sigma", type=float, default=1.0)
    th.add_argument("--window", type=int, help="fixed lattice window (otherwise certified)")
    th.add_argument("--tol", type=float, default=1e-12)
    th.set_defaults(func=cmd_theta)

    sp = sub.add_parser("spectrum", parents=[common], help="low eigenvalues of Delta_k or of H_eps")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--eps", help="use H_eps with this eps instead of Delta_k")
    sp.add_argument("--N", type=int, default=40, help="total Hermite degree cut")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_spectrum)

    b = sub.add_parser("bnf", parents=[common], help="Birkhoff normal form in ladder operators")
    b.add_argument("--order", type=int, default=4)
    b.set_defaults(func=cmd_bnf)

    q = sub.add_parser("quantize", parents=[common], help="theta-function basis from the ground state")
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--N", type=int, default=40)
    q.add_argument("--point", help="evaluate every basis function at x,y,z,t")
    q.set_defaults(func=cmd_quantize)

    v = sub.add_parser("verify", parents=[common], help="run an acceptance criterion (1..12, its name, or all)")
    v.add_argument("criterion")
    v.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identical reruns)")
    v.set_defaults(func=cmd_verify)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.func(args)
        code = 0
        if isinstance(result, tuple):
            result, code = result
    except (ValidationError, ValueError, ZeroDivisionError) as exc:
        return _fail("validation", str(exc), 2)
    except (spectral.NonConvergenceError, theta.TruncationError) as exc:
        return _fail("nonconvergence", str(exc), 3)

    text = result if isinstance(result, str) else json.dumps(result, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
