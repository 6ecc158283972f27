"""Command-line front end.

    ellcommute ba xi --preset lame --B 2 --omega i --basepoint 0.5 --smax 8 --zorder 16
    ellcommute commutant build --preset lame --omega i --principal '[1,0,0,0]' --weight 3
    ellcommute commutant dim --K 3
    ellcommute curve compute|genus|verify-bc|verify-weights ...
    ellcommute modular verify-weight|eisenstein ...
    ellcommute monodromy run --preset lame --X "2+0i" --loop-preset around0
    ellcommute verify all --preset lame --omega i

Every command prints a JSON report (and writes it to --out when given).
Exit codes: 0 success, 1 a verification failed, 2 usage/config error,
3 numerical breakdown.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import pipeline
from .baker_akhiezer import compute_xi
from .commutant import DEFAULT_OMEGA_GRID, GradedRingView, PrincipalPart, build_commutant, dim_DK
from .config import DEFAULT_TOL
from .curve import PlaneCurve, char_poly, genus, rep_matrix, single_valued_criterion
from .elliptic import eisenstein, elliptic_constants, parse_word, verify_weight, wp_eval
from .errors import EllCommuteError, NumericalBreakdown, UsageError
from .lame import lame_operator, operator_from_family
from .monodromy import PathSpec, lame_loops, monodromy_matrix, permutation_from_matrices
from .operators import DifferentialOperator, bc_residual, is_commuting

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_COMPLEX_RE = re.compile(r"(?<![0-9.eE])j")


def parse_complex(text: str) -> complex:
    """Accept '2', '2+0i', 'i', '-i', '0.5+i', '1e-3+2i', '2j'."""
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("i", "j")
    s = _COMPLEX_RE.sub("1j", s)
    try:
        return complex(s)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_list(text: str) -> list:
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [t for t in text.split(",") if t.strip()]
    if not isinstance(data, list) or not data:
        raise UsageError(f"expected a non-empty list, got {text!r}")
    return [parse_complex(v) if isinstance(v, str) else complex(v) for v in data]


@dataclass
class JobConfig:
    """Operator source plus command parameters, validated once."""

    preset: Optional[str] = None
    B: float = 2.0
    omega: complex = 1j
    operator_path: Optional[str] = None
    basepoint: complex = 0.5
    s_max: int = 8
    z_order: int = 20
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.omega.imag <= 0:
            raise UsageError("Im Ω must be positive")
        if self.s_max < 0 or self.z_order < 1:
            raise UsageError("s_max and z_order must be positive")

    def operator(self, center: complex | None = None) -> DifferentialOperator:
        center = self.basepoint if center is None else center
        if self.operator_path:
            data = json.loads(Path(self.operator_path).read_text())
            op = DifferentialOperator.from_json(data)
            fam = data.get("family")
            if fam:
                # rebuild from the family so that evaluators (and any center) are available
                return operator_from_family(fam, center, self.z_order)
            if abs(op.center - center) > 1e-12:
                raise UsageError("operator JSON is expanded at a different basepoint and has no family to re-expand")
            return op
        if self.preset == "lame":
            return lame_operator(self.B, self.omega, center, self.z_order)
        raise UsageError("give --preset lame or --operator FILE")


def _config(args) -> JobConfig:
    return JobConfig(
        preset=getattr(args, "preset", None), B=float(getattr(args, "B", 2.0)),
        omega=parse_complex(getattr(args, "omega", "i")), operator_path=getattr(args, "operator", None),
        basepoint=parse_complex(getattr(args, "basepoint", "0.5")), s_max=int(getattr(args, "smax", 8)),
        z_order=int(getattr(args, "zorder", 20)),
    )


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, default=_json_default)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _principal(args, default_m: int | None = None) -> PrincipalPart:
    text = getattr(args, "principal", None)
    if text is None:
        if default_m is None:
            raise UsageError("--principal is required")
        return PrincipalPart.monomial(default_m)
    vals = parse_list(text)
    weight = getattr(args, "weight", None)
    prin = PrincipalPart.from_list(vals, None if weight is None else int(weight))
    if weight is not None and int(weight) != prin.m and getattr(args, "strict_weight", False):
        raise UsageError("weight must equal the rank for a homogeneous principal part")
    return prin


# ---- commands -------------------------------------------------------------------


def cmd_ba_xi(args) -> int:
    cfg = _config(args)
    p = cfg.operator()
    ba = compute_xi(p, cfg.basepoint, cfg.s_max, cfg.z_order)
    rep = {"command": "ba xi", "basepoint": [cfg.basepoint.real, cfg.basepoint.imag], "s_max": ba.s_max,
           "xi": [x.to_json() for x in ba.xi]}
    checks = {"xi0_is_one": bool((ba[0] - 1.0).max_abs() < DEFAULT_TOL.operator_zero),
              "xi_vanish_at_basepoint": bool(max(abs(complex(ba[s].coeff(0))) for s in range(1, ba.s_max + 1))
                                             < DEFAULT_TOL.operator_zero) if ba.s_max else True}
    rep["checks"] = checks
    rep["passed"] = all(checks.values())
    _emit(rep, args)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_commutant_build(args) -> int:
    cfg = _config(args)
    prin = _principal(args)
    p = cfg.operator()
    ba = compute_xi(p, cfg.basepoint, max(cfg.s_max, prin.m + 4), cfg.z_order)
    q, a = build_commutant(p, prin, ba)
    ok, res = is_commuting(p, q)
    rep = {"command": "commutant build", "principal": prin.to_json(), "commutator_residual": res,
           "passed": bool(ok), "A": a.to_json(), "Q": q.to_json()}
    if args.q_out:
        Path(args.q_out).write_text(json.dumps(q.to_json()))
    if args.a_out:
        Path(args.a_out).write_text(json.dumps(a.to_json()))
    _emit(rep, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_commutant_dim(args) -> int:
    view = GradedRingView(int(args.K), None if args.M_cap is None else int(args.M_cap))
    rep = {"command": "commutant dim", "dim": dim_DK(int(args.K), args.M_cap), "view": view.to_json(),
           "note": "upper bound when not every modular principal part is realizable"}
    _emit(rep, args)
    return EXIT_OK


def _pair(args):
    cfg = _config(args)
    prin = _principal(args, default_m=3)
    p = cfg.operator()
    ba = compute_xi(p, cfg.basepoint, max(cfg.s_max, prin.m + 4), cfg.z_order)
    q, a = build_commutant(p, prin, ba)
    return cfg, p, q, a


def cmd_curve_compute(args) -> int:
    cfg, p, q, a = _pair(args)
    curve = char_poly(rep_matrix(p, q))
    rep = {"command": "curve compute", "curve": curve.to_json(), "passed": True}
    if args.curve_out:
        Path(args.curve_out).write_text(json.dumps(curve.to_json()))
    _emit(rep, args)
    return EXIT_OK


def _load_curve(args, p=None, q=None) -> PlaneCurve:
    if getattr(args, "curve", None):
        return PlaneCurve.from_json(json.loads(Path(args.curve).read_text()))
    if p is None:
        _, p, q, _ = _pair(args)
    return char_poly(rep_matrix(p, q))


def cmd_curve_genus(args) -> int:
    curve = _load_curve(args)
    g = genus(curve)
    rep = {"command": "curve genus", "genus": g.to_json(), "N": curve.n}
    if args.coprime:
        rep["single_valued_criterion"] = single_valued_criterion(curve.n, g, coprime=True)
    rep["passed"] = True
    _emit(rep, args)
    return EXIT_OK


def cmd_curve_verify_bc(args) -> int:
    cfg, p, q, a = _pair(args)
    curve = _load_curve(args, p, q)
    res = bc_residual(curve, p, q)
    tol = float(args.tol)
    rep = {"command": "curve verify-bc", "residual": res, "tol": tol, "passed": bool(res < tol)}
    _emit(rep, args)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_curve_verify_weights(args) -> int:
    omegas = parse_list(args.omegas)
    r = pipeline.weight_report(omegas, tol=float(args.tol))
    _emit(r.to_json(), args)
    return EXIT_OK if r.passed else EXIT_FAIL


def cmd_modular_verify_weight(args) -> int:
    alpha = parse_word(args.alpha)
    omegas = parse_list(args.omegas)
    form = args.form
    if form == "wp":
        zs = [parse_complex(z) for z in args.z.split(",")]
        chk = verify_weight(lambda om, z: wp_eval(om, z), 2, alpha, [(o, z) for o in omegas for z in zs])
        weight = 2
    elif form in ("g2", "g3"):
        weight = 4 if form == "g2" else 6
        chk = verify_weight(lambda om: getattr(elliptic_constants(om), form), weight, alpha, omegas)
    else:
        raise UsageError(f"unknown form {form!r} (wp, g2, g3)")
    rep = {"command": "modular verify-weight", "form": form, "weight": weight, "alpha": alpha.to_list(),
           "max_rel_error": chk.max_rel_error, "n_checked": chk.n_checked,
           "skipped": [str(s) for s in chk.skipped], "passed": chk.passed(float(args.tol))}
    _emit(rep, args)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


def cmd_modular_eisenstein(args) -> int:
    om = parse_complex(args.omega)
    val, qe = eisenstein(om, int(args.weight), int(args.kmax))
    rep = {"command": "modular eisenstein", "omega": om, "weight": int(args.weight), "value": val,
           "q_expansion": qe.to_json(), "passed": True}
    _emit(rep, args)
    return EXIT_OK


def _loops(args, cfg: JobConfig):
    if args.loop:
        data = json.loads(Path(args.loop).read_text())
        items = data if isinstance(data, list) else [data]
        ps = cfg.operator().pole_set
        return [PathSpec.from_json(d, ps) for d in items]
    lps = lame_loops(cfg.omega, cfg.basepoint)
    if args.loop_preset == "all":
        return lps
    chosen = [lp for lp in lps if lp.label == args.loop_preset]
    if not chosen:
        raise UsageError(f"unknown loop preset {args.loop_preset!r}")
    return chosen


def _monodromy_job(job):
    cfg, x, loop, with_q = job
    p = cfg.operator()
    m = monodromy_matrix(p, x, loop)
    rec = {"X": [x.real, x.imag], "loop": loop.label, "monodromy": m.to_json()}
    if with_q:
        ba = compute_xi(p, cfg.basepoint, 8, cfg.z_order)
        q, _ = build_commutant(p, PrincipalPart.monomial(3), ba)
        rec["permutation"] = permutation_from_matrices(rep_matrix(p, q).at(x), m.matrix).to_json()
    return rec


def cmd_monodromy_run(args) -> int:
    cfg = _config(args)
    xs = [parse_complex(x) for x in args.X.split(",")]
    loops = _loops(args, cfg)
    jobs = [(cfg, x, lp, bool(args.with_q)) for x in xs for lp in loops]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            results = list(ex.map(_monodromy_job, jobs))
    else:
        results = [_monodromy_job(j) for j in jobs]
    rep = {"command": "monodromy run", "results": results, "passed": True}
    _emit(rep, args)
    return EXIT_OK


def _verify_omega(job):
    om, loops = job
    return pipeline.lame_golden_path(om, loops=loops).to_json()


def cmd_verify_all(args) -> int:
    if args.preset != "lame":
        raise UsageError("verify all supports --preset lame")
    omegas = parse_list(args.omegas) if args.omegas else [parse_complex(args.omega)]
    jobs = [(om, not args.no_loops) for om in omegas]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            runs = list(ex.map(_verify_omega, jobs))
    else:
        runs = [_verify_omega(j) for j in jobs]
    extra = [pipeline.safe(pipeline.lame_quarter_monodromy, omegas[0]).to_json(),
             pipeline.safe(pipeline.weight_report, DEFAULT_OMEGA_GRID).to_json(),
             pipeline.safe(pipeline.cusp_report).to_json()]
    if args.rank5:
        extra.append(pipeline.safe(pipeline.rank5_report, omegas[0]).to_json())
    reports = runs + extra
    c = elliptic_constants(omegas[0])
    curve = runs[0]["data"].get("curve", {}).get("coeffs", []) if runs[0].get("data") else []
    computed = {f"f_{j}{k}": v for j, k, v in curve if (j, k) in ((1, 0), (0, 0))}
    coeffs = {"g2/4": c.g2 / 4, "g3/4": c.g3 / 4, **computed}
    rep = {"command": "verify all", "preset": "lame", "curve_coefficients": coeffs,
           "reports": reports, "passed": all(r["passed"] for r in reports),
           "failing": [f"{r['title']}: {ch['name']}" for r in reports for ch in r["checks"] if not ch["passed"]]}
    _emit(rep, args)
    return EXIT_OK if rep["passed"] else EXIT_FAIL


# ---- parser ---------------------------------------------------------------------


def _operator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["lame"], help="built-in operator family")
    p.add_argument("--B", default=2.0, type=float, help="Lamé coupling B in ∂² − B℘")
    p.add_argument("--omega", default="i", help="lattice parameter Ω (e.g. i, 0.5+i)")
    p.add_argument("--operator", help="operator JSON file")
    p.add_argument("--basepoint", default="0.5")
    p.add_argument("--smax", default=8, type=int)
    p.add_argument("--zorder", default=20, type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ellcommute", description="Commuting operators with elliptic coefficients")
    ap.add_argument("--out", help="also write the JSON report here")
    sub = ap.add_subparsers(dest="group", required=True)

    ba = sub.add_parser("ba").add_subparsers(dest="cmd", required=True)
    x = ba.add_parser("xi")
    _operator_args(x)
    x.set_defaults(func=cmd_ba_xi)

    cm = sub.add_parser("commutant").add_subparsers(dest="cmd", required=True)
    b = cm.add_parser("build")
    _operator_args(b)
    b.add_argument("--principal", required=True, help="JSON list A_{-M}..A_0, e.g. '[1,0,0,0]'")
    b.add_argument("--weight", type=int)
    b.add_argument("--q-out", dest="q_out")
    b.add_argument("--a-out", dest="a_out")
    b.set_defaults(func=cmd_commutant_build)
    d = cm.add_parser("dim")
    d.add_argument("--K", required=True, type=int)
    d.add_argument("--M-cap", dest="M_cap", type=int)
    d.set_defaults(func=cmd_commutant_dim)

    cv = sub.add_parser("curve").add_subparsers(dest="cmd", required=True)
    for name, fn in (("compute", cmd_curve_compute), ("genus", cmd_curve_genus), ("verify-bc", cmd_curve_verify_bc)):
        c = cv.add_parser(name)
        _operator_args(c)
        c.add_argument("--principal")
        c.add_argument("--weight", type=int)
        if name != "compute":
            c.add_argument("--curve", help="curve JSON (otherwise computed)")
        if name == "compute":
            c.add_argument("--curve-out", dest="curve_out")
        if name == "genus":
            c.add_argument("--coprime", action="store_true", help="assert the coprimality hypothesis")
        if name == "verify-bc":
            c.add_argument("--tol", default=1e-8, type=float)
        c.set_defaults(func=fn)
    vw = cv.add_parser("verify-weights")
    vw.add_argument("--omegas", default="[\"0.1+1.1i\", \"0.3+0.9i\", \"-0.2+1.3i\"]")
    vw.add_argument("--tol", default=1e-7, type=float)
    vw.set_defaults(func=cmd_curve_verify_weights)

    md = sub.add_parser("modular").add_subparsers(dest="cmd", required=True)
    w = md.add_parser("verify-weight")
    w.add_argument("--form", default="g2", help="wp, g2 or g3")
    w.add_argument("--alpha", default="S", help="word in S, T")
    w.add_argument("--omegas", default="[\"0.1+1.1i\", \"0.3+0.9i\"]")
    w.add_argument("--z", default="0.21+0.13i")
    w.add_argument("--tol", default=1e-7, type=float)
    w.set_defaults(func=cmd_modular_verify_weight)
    e = md.add_parser("eisenstein")
    e.add_argument("--omega", default="i")
    e.add_argument("--weight", default=4, type=int, choices=[4, 6])
    e.add_argument("--kmax", default=24, type=int)
    e.set_defaults(func=cmd_modular_eisenstein)

    mo = sub.add_parser("monodromy").add_subparsers(dest="cmd", required=True)
    r = mo.add_parser("run")
    _operator_args(r)
    r.add_argument("--X", default="2", help="comma-separated spectral values")
    r.add_argument("--loop", help="loop JSON file (PathSpec or list)")
    r.add_argument("--loop-preset", default="around0", help="around0, aroundOmega, around1+Omega or all")
    r.add_argument("--with-q", action="store_true", help="also compute the branch permutation for Q from λ³")
    r.add_argument("--workers", default=1, type=int)
    r.set_defaults(func=cmd_monodromy_run)

    vf = sub.add_parser("verify").add_subparsers(dest="cmd", required=True)
    a = vf.add_parser("all")
    a.add_argument("--preset", default="lame")
    a.add_argument("--omega", default="i")
    a.add_argument("--omegas", help="list of Ω; overrides --omega")
    a.add_argument("--no-loops", action="store_true")
    a.add_argument("--rank5", action="store_true", help="include the B = 6, prin = λ⁵ run")
    a.add_argument("--workers", default=1, type=int)
    a.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return int(args.func(args))
    except UsageError as exc:
        print(json.dumps({"error": "usage", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except NumericalBreakdown as exc:
        print(json.dumps({"error": "numerical", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_NUMERIC
    except EllCommuteError as exc:
        print(json.dumps({"error": "verification", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_FAIL
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "usage", "type": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
