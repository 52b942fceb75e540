"""The full verification suite behind ``verify all`` and the acceptance tests.

Each item is a function ``(seed) -> CheckItem`` with its own derived seed,
so items are independent and reproducible one at a time. Runtime limits are
recorded as boolean checks; raw timings only go to the log, which keeps
reports identical across runs apart from ``duration_ms``.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import charclass as cc
from . import dualcurve as dc
from . import hkquotient as hk
from . import lagclass as lc
from . import legendre as lg
from . import symplin as sl
from .exactpoly import parse

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Residual:
    name: str
    value: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(self.value <= self.tolerance)

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance, "pass": self.ok}


@dataclass
class CheckItem:
    name: str
    residuals: list[Residual] = field(default_factory=list)
    exact: dict[str, bool] = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.residuals) and all(self.exact.values())

    def failures(self) -> list[str]:
        return [r.name for r in self.residuals if not r.ok] + [k for k, v in self.exact.items() if not v]

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "exact": dict(self.exact),
                "residuals": [r.to_json() for r in self.residuals], "results": self.results}


def item_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _timed(item: CheckItem, limit: float | None, fn: Callable[[], None]):
    t0 = time.perf_counter()
    fn()
    item.elapsed = time.perf_counter() - t0
    if limit is not None:
        item.exact[f"runtime_under_{limit:g}s"] = item.elapsed < limit


# ---------------------------------------------------------------------------
# 1-3: dual curves

CONIC = "x0*x2 - x1^2"
CUSPIDAL_CUBIC = "x0^3 - x1^2*x2"
FERMAT_QUADRIC = "x0^2 - x1^2 - x2^2"


def check_dual_conic(seed: int) -> CheckItem:
    item = CheckItem("dual_conic")
    expected = parse("x1^2 - 4*x0*x2")

    def run():
        res = dc.dual_polynomial(parse(CONIC), seed=seed % 1000)
        c = dc.proportionality(res.dual_poly, expected)
        item.exact["proportional_to_x1^2-4x0x2"] = c is not None
        item.results.update(dual_poly=res.dual_poly.to_text(), scalar=str(c))

    _timed(item, 1.0, run)
    return item


def check_pluecker_numbers(seed: int) -> CheckItem:
    item = CheckItem("pluecker_numbers")
    cases = {(3, 0, 0): (6, 9), (3, 1, 0): (4, 3), (2, 0, 0): (2, 0)}

    def run():
        for (d, delta, kappa), want in cases.items():
            got = dc.pluecker(dc.PlueckerTriple(d, delta, kappa))
            item.exact[f"pluecker({d},{delta},{kappa})={want}"] = got == want
        res = dc.dual_polynomial(parse(CUSPIDAL_CUBIC), seed=seed % 1000)
        expect = dc.pluecker(dc.PlueckerTriple(3, 0, 1))[0]
        item.exact["cuspidal_cubic_dual_degree=3"] = res.dual_degree == expect == 3
        item.results["cuspidal_cubic_dual"] = res.dual_poly.to_text()

    _timed(item, 5.0, run)
    return item


def check_biduality(seed: int) -> CheckItem:
    item = CheckItem("biduality")

    def run():
        for name, text in (("conic", CONIC), ("cuspidal_cubic", CUSPIDAL_CUBIC)):
            ok, c = dc.bidual_check(parse(text), seed=seed % 1000)
            item.exact[f"bidual_{name}"] = ok
            item.results[f"{name}_scalar"] = str(c)

    _timed(item, 30.0, run)
    return item


# ---------------------------------------------------------------------------
# 4: homogeneous Legendre relation

LEGENDRE_FORMS = ("x0*x1", CONIC, CUSPIDAL_CUBIC)


def check_legendre_relation(seed: int, samples: int = 100, tolerance: float = 1e-9) -> CheckItem:
    """f_dual(grad f(x)) = (p - 1) f(x) on the branch through x.

    For p > 2 the dual function is multivalued; Newton is started from a
    perturbation of x so the branch through x is the one evaluated.
    """
    item = CheckItem("legendre_relation")
    rng = np.random.default_rng(seed)

    def run():
        for text in LEGENDRE_FORMS:
            f = parse(text)
            nf = lg.NumericForm(f)
            p = f.degree
            worst = worst_zero = 0.0
            done = 0
            while done < samples:
                x = (rng.standard_normal(f.nvars) + 1j * rng.standard_normal(f.nvars)) / np.sqrt(2)
                _, xi, H = nf.derivs(x)
                if abs(np.linalg.det(H)) <= 1e-6:
                    continue  # off the smooth locus of the gradient map
                hint = x * (1 + 1e-3 * rng.standard_normal(f.nvars)) if p > 2 else None
                ev = lg.dual_evaluate(nf, xi, lg.NewtonConfig(seed=int(rng.integers(1 << 31))), x_hint=hint)
                fx = nf.value(x)
                worst = max(worst, abs(ev.value - (p - 1) * fx) / (1 + abs(fx)))
                done += 1
            for y in lg.points_on_hypersurface(nf, samples, rng):
                ev = lg.dual_evaluate(nf, nf.grad(y), lg.NewtonConfig(seed=int(rng.integers(1 << 31))),
                                      x_hint=y * (1 + 1e-3 * rng.standard_normal(f.nvars)) if p > 2 else None)
                worst_zero = max(worst_zero, abs(ev.value))
            item.residuals.append(Residual(f"relation[{text}]", float(worst), tolerance))
            item.residuals.append(Residual(f"zero_set[{text}]", float(worst_zero), tolerance))

    _timed(item, None, run)
    return item


# ---------------------------------------------------------------------------
# 5-7: hyperkähler quotient

def check_flop_suite(seed: int, samples: int = 100) -> CheckItem:
    item = CheckItem("flop_suite")

    def run():
        for n in (1, 2, 3):
            rep = hk.flop_check(n, hk.NumericConfig(samples=samples, seed=seed + n))
            item.residuals += [Residual(f"n={n}.level", rep.residuals["level"], 1e-10),
                               Residual(f"n={n}.involution", rep.residuals["involution"], 1e-10),
                               Residual(f"n={n}.pullback", rep.residuals["pullback"], 1e-6)]

    _timed(item, 10.0, run)
    return item


def check_calabi_metric(seed: int, samples: int = 50) -> CheckItem:
    item = CheckItem("calabi_metric")

    def run():
        for n in (1, 2):
            rep = hk.calabi_check(n, hk.NumericConfig(samples=samples, seed=seed + n))
            item.residuals += [Residual(f"n={n}.hermitian", rep.residuals["hermitian"], 1e-6),
                               Residual(f"n={n}.det_spread", rep.residuals["det_spread"], 1e-6)]
            item.exact[f"n={n}.positive_definite"] = rep.residuals["min_eigenvalue"] > 0
            item.results[f"n={n}.det"] = round(rep.residuals["det_reference"], 6)

    _timed(item, 10.0, run)
    return item


def check_conormal_transport(seed: int, samples: int = 20) -> CheckItem:
    item = CheckItem("conormal_transport")

    def run():
        for name, text in (("conic", CONIC), ("fermat_quadric", FERMAT_QUADRIC)):
            rep = hk.conormal_transport(parse(text), samples, hk.NumericConfig(seed=seed % 100000))
            item.residuals.append(Residual(f"{name}.dual_membership", rep.max_residual, 1e-8))

    _timed(item, None, run)
    return item


# ---------------------------------------------------------------------------
# 8: symplectic linear algebra

def _covector_of(space: sl.SymplecticSpace, v) -> tuple[Fraction, ...]:
    # alpha(w) = Omega(v, w)
    g = space.gram
    return tuple(sum((v[i] * g[i][j] for i in range(space.dim)), Fraction(0)) for j in range(space.dim))


def _random_hyperplane_system(rng: random.Random, space: sl.SymplecticSpace) -> list:
    """Covectors, half the time Omega-dual to an isotropic family (so the intersection is coisotropic)."""
    m = rng.randint(1, space.n + 1)
    if rng.random() < 0.5:
        L = sl.random_lagrangian(rng, space)
        m = min(m, space.n)
        vecs = [tuple(sum((Fraction(rng.randint(-3, 3)) * b[i] for b in L.basis), Fraction(0))
                      for i in range(space.dim)) for _ in range(m)]
    else:
        vecs = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(space.dim)) for _ in range(m)]
    return [_covector_of(space, v) for v in vecs]


def check_symplectic_lemmas(seed: int, instances: int = 600) -> CheckItem:
    item = CheckItem("symplectic_lemmas")
    rng = random.Random(seed)
    coiso = {sl.Classification.COISOTROPIC, sl.Classification.LAGRANGIAN}

    def run():
        wedge_bad = hyper_bad = proj_bad = red_bad = 0
        hyper_checked = 0
        for _ in range(instances):
            n = rng.randint(1, 4)
            V = sl.SymplecticSpace.standard(n)
            # codim m in 1..n so that the exponent n - m + 1 is in range
            m = rng.randint(1, n)
            gen = rng.choice((sl.random_subspace, sl.random_sparse_subspace,
                              lambda r, a, d: sl.random_coisotropic(r, a, 2 * n - d)))
            C = gen(rng, V, 2 * n - m)
            if (sl.classify(C) in coiso) != sl.wedge_power_vanishes(C, n - m + 1):
                wedge_bad += 1
            covs = _random_hyperplane_system(rng, V)
            if sl.rank(covs) == len(covs):
                hyper_checked += 1
                ok, _ = sl.coisotropic_via_hyperplanes(V, covs)
                if ok != (sl.classify(sl.intersection_of_hyperplanes(V, covs)) in coiso):
                    hyper_bad += 1
            L = sl.random_lagrangian(rng, V)
            D = sl.random_coisotropic(rng, V, rng.randint(0, n))
            if sl.classify(sl.lag_project(L, D)) is not sl.Classification.LAGRANGIAN:
                proj_bad += 1
            if not sl.reduced_is_lagrangian(sl.lag_reduce(L, D)):
                red_bad += 1
        item.exact.update(wedge_criterion=wedge_bad == 0, hyperplane_criterion=hyper_bad == 0,
                          lag_project_lagrangian=proj_bad == 0, lag_reduce_lagrangian=red_bad == 0)
        item.results.update(instances=instances, hyperplane_systems=hyper_checked)

    _timed(item, None, run)
    return item


# ---------------------------------------------------------------------------
# 9-10: Lagrangian classes

def check_normalized_legendre(seed: int, tables: int = 1000) -> CheckItem:
    item = CheckItem("normalized_legendre")
    rng = random.Random(seed)

    def run():
        product = center = mixed = mukai = 0
        for _ in range(tables):
            t = lc.random_table(rng, rng.randint(1, 4), rng.randint(1, 4))
            product += not lc.transform_preserves_product(t)
            LP = lc.normalized_transform(t, lc.CENTER)
            center += lc.transformed_product(t, LP, LP) != t.center_square
            for lab in t.labels:
                mixed += lc.transformed_product(t, lc.normalized_transform(t, lab), LP) != lc.original_product(
                    t, lab, lc.CENTER)
            i, j = rng.choice(t.labels), rng.choice(t.labels)
            rep = lc.mukai_pluecker_check(*lc.mukai_from_table(t, i, j))
            mukai += (rep.lhs, rep.rhs) != lc.pluecker_type_check(t, i, j) or not rep.preserves_product
        item.exact.update(products_preserved=product == 0, center_square_preserved=center == 0,
                          center_pairing_preserved=mixed == 0, mukai_specializes=mukai == 0)
        item.results["tables"] = tables

    _timed(item, None, run)
    return item


def _random_gram_with_root(rng: random.Random, rank: int) -> lc.GramLattice:
    g = [[0] * rank for _ in range(rank)]
    for i in range(rank):
        for j in range(i, rank):
            g[i][j] = g[j][i] = rng.randint(-4, 4) if i != j else 2 * rng.randint(-3, 3)
    g[0][0] = -2
    return lc.GramLattice(tuple(map(tuple, g)))


def check_reflection(seed: int, lattices: int = 200) -> CheckItem:
    item = CheckItem("reflection")
    rng = random.Random(seed)

    def run():
        bad = {"involutive": 0, "isometry": 0, "fixes_perp": 0, "negates_P": 0, "verbatim": 0}
        for _ in range(lattices):
            L = _random_gram_with_root(rng, rng.randint(1, 6))
            P = [1] + [0] * (L.rank - 1)
            for _ in range(5):
                C1 = [rng.randint(-9, 9) for _ in range(L.rank)]
                C2 = [rng.randint(-9, 9) for _ in range(L.rank)]
                R1, R2 = lc.picard_lefschetz(L, P, C1), lc.picard_lefschetz(L, P, C2)
                bad["involutive"] += list(lc.picard_lefschetz(L, P, R1)) != C1
                bad["isometry"] += L.pair(R1, R2) != L.pair(C1, C2)
                cp = L.pair(C1, P)
                bad["verbatim"] += list(lc.k3_reflection(L, P, C1)) != [c - cp * p for c, p in zip(C1, P)]
                # project C1 into P-perp: 2 C1 + (C1.P) P has pairing 2 cp - 2 cp = 0
                W = [2 * c + cp * p for c, p in zip(C1, P)]
                bad["fixes_perp"] += list(lc.picard_lefschetz(L, P, W)) != W
            bad["negates_P"] += list(lc.picard_lefschetz(L, P, P)) != [-p for p in P]
        item.exact.update({k: v == 0 for k, v in bad.items()})
        # the verbatim display on C = P: P - (P.P) P = 3P, with square -18
        L = lc.GramLattice(((-2,),))
        image = lc.k3_reflection(L, (1,), (1,))
        item.exact["verbatim_on_P_is_3P"] = image == (3,)
        item.results["verbatim_on_P_square"] = L.pair(image, image)

    _timed(item, None, run)
    return item


# ---------------------------------------------------------------------------
# 11: characteristic classes

def check_charclass(seed: int) -> CheckItem:
    item = CheckItem("charclass")

    def run():
        odd_ok = True
        for r in range(1, 5):
            doubled = cc.chern_of_E_plus_Edual(cc.FormalClassSeries.total_chern(r, 8))
            odd_ok &= all(doubled.component(k).is_zero() for k in range(1, 9, 2))
        item.exact["odd_chern_vanish"] = odd_ok
        item.exact["a_hat_square_identity"] = all(cc.a_hat_square_identity(r, 8) for r in range(1, 5))
        L_ok = True
        for r in range(1, 5):
            Ls = cc.genus_series(cc.GenusKind.L, r, 8)
            root = cc.sqrt_series(Ls)
            L_ok &= root * root == Ls
        item.exact["sqrt_L_squared"] = L_ok

    _timed(item, None, run)
    return item


SUITE: tuple[Callable[[int], CheckItem], ...] = (
    check_dual_conic,
    check_pluecker_numbers,
    check_biduality,
    check_legendre_relation,
    check_flop_suite,
    check_calabi_metric,
    check_conormal_transport,
    check_symplectic_lemmas,
    check_normalized_legendre,
    check_reflection,
    check_charclass,
)


def run_suite(seed: int, only: set[str] | None = None) -> list[CheckItem]:
    out = []
    for index, check in enumerate(SUITE):
        name = check.__name__.removeprefix("check_")
        if only and name not in only:
            continue
        try:
            item = check(item_seed(seed, index))
        except Exception as exc:  # a crashing check is a failing check
            item = CheckItem(name)
            item.exact["completed"] = False
            item.results["error"] = f"{type(exc).__name__}: {exc}"
        log.info("%-22s %s  (%.2fs)", item.name, "pass" if item.passed else "FAIL", item.elapsed)
        out.append(item)
    return out
