"""Command-line front end.

Every invocation writes one JSON report to stdout and a short summary to
stderr. Exit status: 0 when the report passes, 1 when a verification fails,
2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import charclass as cc
from . import dualcurve as dc
from . import hkquotient as hk
from . import lagclass as lc
from . import legendre as lg
from . import symplin as sl
from . import verify
from .errors import HKFlopError, InputError
from .exactpoly import parse

log = logging.getLogger("hkflop")


class UsageError(Exception):
    """Bad file or argument content detected after argparse."""


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


class Report:
    def __init__(self, command: str, inputs: dict, seed: int):
        self.command = command
        self.inputs = inputs
        self.seed = seed
        self.results: dict = {}
        self.residuals: list[verify.Residual] = []
        self.checks: dict[str, bool] = {}

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.residuals) and all(self.checks.values())

    def to_json(self, duration_ms: int) -> dict:
        return jsonable({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "residuals": [r.to_json() for r in self.residuals],
            "checks": self.checks,
            "pass": self.passed,
            "seed": self.seed,
            "duration_ms": duration_ms,
        })


# ---------------------------------------------------------------------------
# input helpers

def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _read_poly(path: str):
    lines = [ln.split("#", 1)[0].strip() for ln in _read_text(path).splitlines()]
    return parse(" ".join(ln for ln in lines if ln))


def _vector(text: str, kind=int) -> list:
    try:
        return [kind(v.strip().replace("i", "j")) if kind is complex else kind(v.strip())
                for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad vector {text!r}") from exc


def _tol(args, default: float) -> float:
    return default if args.tolerance is None else args.tolerance


# ---------------------------------------------------------------------------
# subcommands

def cmd_dual(args, rep: Report):
    f = _read_poly(args.poly)
    rep.inputs.update(poly=f.to_text())
    res = dc.dual_polynomial(f, seed=args.seed)
    rep.results.update(dual_poly=res.dual_poly.to_text(), dual_degree=res.dual_degree,
                       stripped_factors=[{"factor": t, "multiplicity": m} for t, m in res.extraneous_factors_removed],
                       eliminant_degree=res.eliminant_degree)
    rep.residuals.append(verify.Residual("membership", res.membership_residual, _tol(args, 1e-8)))


def cmd_pluecker(args, rep: Report):
    t = dc.PlueckerTriple(args.d, args.delta, args.kappa)
    rep.inputs.update(d=t.d, delta=t.delta, kappa=t.kappa)
    d_dual, kappa_dual = dc.pluecker(t)
    rep.results.update(d_dual=d_dual, kappa_dual=kappa_dual, chi_bar=dc.chi_bar_formula(t))
    if args.dual_d is not None:
        td = dc.PlueckerTriple(args.dual_d, args.dual_delta or 0, args.dual_kappa or 0)
        ident = dc.degree_identity_report(t, td)
        rep.inputs.update(dual_d=td.d, dual_delta=td.delta, dual_kappa=td.kappa)
        # reported, never asserted
        rep.results["degree_identity"] = {"lhs": ident.lhs, "rhs": ident.rhs, "match": ident.match,
                                          "chi_bar_dual": dc.chi_bar_formula(td)}


def cmd_legendre_eval(args, rep: Report):
    f = _read_poly(args.poly)
    xi = np.array(_vector(args.xi, complex))
    rep.inputs.update(poly=f.to_text(), xi=xi)
    ev = lg.dual_evaluate(f, xi, lg.NewtonConfig(seed=args.seed))
    rep.results.update(xi=ev.xi, x=ev.x, f_dual_value=ev.value, residual=ev.residual)
    scale = 1.0 + abs(ev.euler_value)
    rep.residuals.append(verify.Residual("gradient", ev.residual, _tol(args, 1e-9) * max(1.0, float(np.linalg.norm(xi)))))
    rep.residuals.append(verify.Residual("euler_relation", ev.discrepancy / scale, _tol(args, 1e-9)))


def _subspace(path: str) -> sl.SymplecticSubspace:
    return sl.subspace_from_json(_read_json(path))


def cmd_symplin_classify(args, rep: Report):
    C = _subspace(args.subspace)
    rep.inputs.update(subspace=sl.subspace_to_json(C))
    cls = sl.classify(C)
    rep.results.update(classification=cls.value, dim=C.dim, perp=sl.subspace_to_json(sl.perp(C)))
    m = C.codim
    if 1 <= m <= C.ambient.n:
        coiso = sl.wedge_power_vanishes(C, C.ambient.n - m + 1)
        rep.results["wedge_criterion"] = coiso
        rep.checks["wedge_criterion_agrees"] = coiso == (cls in (sl.Classification.COISOTROPIC,
                                                                  sl.Classification.LAGRANGIAN))


def cmd_symplin_reduce(args, rep: Report):
    D = _subspace(args.subspace)
    rep.inputs.update(subspace=sl.subspace_to_json(D))
    red = sl.reduce(D)
    rep.results.update(dim=red.dim, kernel=sl.subspace_to_json(red.kernel),
                       representatives=[[str(x) for x in v] for v in red.representatives],
                       gram=None if red.space is None else [[str(x) for x in r] for r in red.space.gram])


def cmd_symplin_project(args, rep: Report):
    C, D = _subspace(args.c), _subspace(args.d)
    rep.inputs.update(c=sl.subspace_to_json(C), d=sl.subspace_to_json(D))
    proj = sl.lag_project(C, D)
    reduced = sl.lag_reduce(C, D)
    rep.results.update(projection=sl.subspace_to_json(proj),
                       reduced_basis=[[str(x) for x in v] for v in reduced.basis],
                       quotient_dim=reduced.reduction.dim)
    rep.checks["projection_lagrangian"] = sl.classify(proj) is sl.Classification.LAGRANGIAN
    rep.checks["reduction_lagrangian"] = sl.reduced_is_lagrangian(reduced)


def _hk_config(args, samples: int) -> hk.NumericConfig:
    return hk.NumericConfig(samples=args.samples or samples, seed=args.seed, tolerance=_tol(args, 1e-8))


def _hk_report(rep: Report, out: hk.CheckReport):
    rep.results.update(out.to_json())
    rep.checks["check_passed"] = out.passed


def cmd_hk_flop(args, rep: Report):
    cfg = _hk_config(args, 100)
    rep.inputs.update(n=args.n, samples=cfg.samples)
    _hk_report(rep, hk.flop_check(args.n, cfg))


def cmd_hk_calabi(args, rep: Report):
    cfg = _hk_config(args, 50)
    rep.inputs.update(n=args.n, samples=cfg.samples)
    _hk_report(rep, hk.calabi_check(args.n, cfg))


def cmd_hk_conormal(args, rep: Report):
    f = _read_poly(args.poly)
    cfg = _hk_config(args, 20)
    rep.inputs.update(poly=f.to_text(), samples=cfg.samples)
    _hk_report(rep, hk.conormal_transport(f, cfg.samples, cfg))


def _table(path: str) -> lc.LagrangianClassTable:
    return lc.LagrangianClassTable.from_json(_read_json(path))


def cmd_lag_transform(args, rep: Report):
    t = _table(args.table)
    rep.inputs.update(table=t.to_json())
    names = [args.class_name] if args.class_name else list(t.labels) + [lc.CENTER]
    out = []
    for name in names:
        tr = lc.normalized_transform(t, name)
        out.append({"class": name, "transform": tr.to_text(), "terms": dict(tr.terms), "integral": tr.integral})
    rep.results["transforms"] = out
    rep.results["warnings"] = [f"non-integral coefficient in L({o['class']})" for o in out if not o["integral"]]
    rep.checks["preserves_product"] = lc.transform_preserves_product(t)


def cmd_lag_check(args, rep: Report):
    t = _table(args.table)
    rep.inputs.update(table=t.to_json())
    pairs = []
    for i, u in enumerate(t.labels):
        for v in t.labels[i:]:
            lhs, rhs = lc.pluecker_type_check(t, u, v)
            pairs.append({"i": u, "j": v, "lhs": lhs, "rhs": rhs})
    rep.results["pluecker_type"] = pairs
    rep.checks["pluecker_type"] = all(p["lhs"] == p["rhs"] for p in pairs)
    rep.checks["preserves_product"] = lc.transform_preserves_product(t)


def cmd_lag_reflect(args, rep: Report):
    doc = _read_json(args.gram)
    L = lc.GramLattice(tuple(map(tuple, doc["gram"] if isinstance(doc, dict) else doc)))
    P, C = _vector(args.p), _vector(args.c)
    rep.inputs.update(gram=L.gram, p=P, c=C)
    verbatim = lc.k3_reflection(L, P, C)
    variant = lc.picard_lefschetz(L, P, C)
    rep.results.update(verbatim=verbatim, picard_lefschetz=variant,
                       c_square=L.pair(C, C), verbatim_square=L.pair(verbatim, verbatim),
                       picard_lefschetz_square=L.pair(variant, variant))
    rep.checks["picard_lefschetz_isometry"] = L.pair(variant, variant) == L.pair(C, C)
    rep.checks["picard_lefschetz_involutive"] = list(lc.picard_lefschetz(L, P, variant)) == list(C)


def cmd_charclass_identity(args, rep: Report):
    rep.inputs.update(kind=args.kind, rank=args.rank, degree=args.degree)
    if args.kind == "ahat-square":
        r = cc.a_hat_square_report(args.rank, args.degree)
        rep.results.update(a_hat_sum=r.a_hat_sum.to_text(), a_hat_square=r.a_hat_square.to_text(),
                           todd_sum=r.todd_sum.to_text())
        rep.checks["a_hat_square"] = r.holds
    elif args.kind == "odd-chern":
        doubled = cc.chern_of_E_plus_Edual(cc.FormalClassSeries.total_chern(args.rank, args.degree))
        rep.results["chern_E_plus_Edual"] = doubled.to_text()
        rep.checks["odd_components_vanish"] = all(doubled.component(k).is_zero()
                                                  for k in range(1, args.degree + 1, 2))
    else:
        Ls = cc.genus_series(cc.GenusKind.L, args.rank, args.degree)
        root = cc.sqrt_series(Ls)
        rep.results.update(L=Ls.to_text(), sqrt_L=root.to_text())
        rep.checks["sqrt_squared"] = root * root == Ls


def cmd_verify_all(args, rep: Report):
    rep.inputs.update(only=sorted(args.only) if args.only else None)
    items = verify.run_suite(args.seed, set(args.only) if args.only else None)
    rep.results["items"] = [it.to_json() for it in items]
    for it in items:
        rep.residuals += [verify.Residual(f"{it.name}.{r.name}", r.value, r.tolerance) for r in it.residuals]
        rep.checks.update({f"{it.name}.{k}": v for k, v in it.exact.items()})
    rep.results["failing"] = [f"{it.name}: {', '.join(it.failures())}" for it in items if not it.passed]


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--json-only", action="store_true", help="no summary on stderr")

    parser = argparse.ArgumentParser(prog="hkflop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(parent, name, func, **kw):
        p = parent.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    p = leaf(sub, "dual", cmd_dual, help="dual curve of a plane curve")
    p.add_argument("--poly", required=True)

    p = leaf(sub, "pluecker", cmd_pluecker, help="Plücker numbers of a plane curve")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=int, default=0)
    p.add_argument("--kappa", type=int, default=0)
    p.add_argument("--dual-d", type=int)
    p.add_argument("--dual-delta", type=int)
    p.add_argument("--dual-kappa", type=int)

    grp = sub.add_parser("legendre").add_subparsers(dest="action", required=True)
    p = leaf(grp, "eval", cmd_legendre_eval)
    p.add_argument("--poly", required=True)
    p.add_argument("--xi", required=True, help="comma-separated, complex entries like 1+2j")

    grp = sub.add_parser("symplin").add_subparsers(dest="action", required=True)
    leaf(grp, "classify", cmd_symplin_classify).add_argument("--subspace", required=True)
    leaf(grp, "reduce", cmd_symplin_reduce).add_argument("--subspace", required=True)
    p = leaf(grp, "project", cmd_symplin_project)
    p.add_argument("--c", required=True, help="Lagrangian subspace JSON")
    p.add_argument("--d", required=True, help="coisotropic subspace JSON")

    grp = sub.add_parser("hk").add_subparsers(dest="action", required=True)
    leaf(grp, "flop-check", cmd_hk_flop).add_argument("--n", type=int, required=True)
    leaf(grp, "calabi-check", cmd_hk_calabi).add_argument("--n", type=int, required=True)
    leaf(grp, "conormal", cmd_hk_conormal).add_argument("--poly", required=True)

    grp = sub.add_parser("lag").add_subparsers(dest="action", required=True)
    p = leaf(grp, "transform", cmd_lag_transform)
    p.add_argument("--table", required=True)
    p.add_argument("--class", dest="class_name")
    leaf(grp, "check", cmd_lag_check).add_argument("--table", required=True)
    p = leaf(grp, "reflect", cmd_lag_reflect)
    p.add_argument("--gram", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--c", required=True)

    grp = sub.add_parser("charclass").add_subparsers(dest="action", required=True)
    p = leaf(grp, "identity", cmd_charclass_identity)
    p.add_argument("--kind", choices=("ahat-square", "odd-chern", "sqrt-l"), default="ahat-square")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)

    grp = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    p = leaf(grp, "all", cmd_verify_all)
    p.add_argument("--only", action="append", help="run only the named item (repeatable)")
    return parser


def _command_name(args) -> str:
    action = getattr(args, "action", None)
    return f"{args.command} {action}" if action else args.command


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.json_only else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    rep = Report(_command_name(args), {}, args.seed)
    t0 = time.perf_counter()
    try:
        args.func(args, rep)
    except (UsageError, InputError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HKFlopError as exc:
        rep.results["error"] = f"{type(exc).__name__}: {exc}"
        rep.checks["completed"] = False
    duration = int(round((time.perf_counter() - t0) * 1000))
    json.dump(rep.to_json(duration), sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not args.json_only:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{rep.command}: {status} ({duration} ms)", file=sys.stderr)
        for name, ok in rep.checks.items():
            if not ok:
                print(f"  failed check: {name}", file=sys.stderr)
        for r in rep.residuals:
            if not r.ok:
                print(f"  residual {r.name} = {r.value:.3e} > {r.tolerance:.1e}", file=sys.stderr)
    return 0 if rep.passed else 1


def main():
    sys.exit(run())
