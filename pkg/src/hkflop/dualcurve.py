"""Dual curves of plane curves and the Plücker calculus.

The dual of ``S = {f = 0}`` in P^2 is computed exactly: a line ``xi`` is
tangent to ``S`` iff the restriction of ``f`` to the line has a repeated root.
Solving ``<xi, x> = 0`` for ``x2`` (clearing ``xi2``) turns the restriction into
a binary form ``F(x0, x1)`` with coefficients in ``xi``; the resultant of its
two partial derivatives eliminates ``x1``. Spurious factors (powers of ``xi2``
and friends) are then removed by checking each irreducible factor against
tangent covectors ``grad f(x)`` at sampled smooth points of ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegreeTooLarge,
    DegreeTooSmall,
    DimensionMismatch,
    EliminationCollapse,
    InconsistentDualDegree,
    InputError,
    NonReduced,
)
from .exactpoly import HomogeneousPolynomial, Poly, irreducible_factors, resultant
from .legendre import NumericForm, points_on_hypersurface

MAX_DEGREE = 4


@dataclass(frozen=True)
class PlueckerTriple:
    d: int
    delta: int = 0
    kappa: int = 0

    def __post_init__(self):
        if self.d < 1 or self.delta < 0 or self.kappa < 0:
            raise InputError(f"invalid plane-curve data {self}")
        if self.delta + self.kappa > (self.d - 1) * (self.d - 2) // 2:
            raise InputError(f"delta + kappa exceeds the genus bound for degree {self.d}")


@dataclass
class DualCurveResult:
    dual_poly: HomogeneousPolynomial
    dual_degree: int
    extraneous_factors_removed: list[tuple[str, int]] = field(default_factory=list)
    eliminant_degree: int = 0
    membership_residual: float = 0.0


def _embed(f: HomogeneousPolynomial) -> Poly:
    """f(x0, x1, x2) moved into the ring Q[x0, x1, xi0, xi1, xi2] with x2 eliminated.

    Returns xi2^d * f(x0, x1, -(xi0 x0 + xi1 x1) / xi2).
    """
    d = f.degree
    N = 5
    lin = -(Poly.var(2, N) * Poly.var(0, N) + Poly.var(3, N) * Poly.var(1, N))
    xi2 = Poly.var(4, N)
    out = Poly.zero(N)
    lin_pows = [Poly.constant(1, N)]
    xi2_pows = [Poly.constant(1, N)]
    for _ in range(d):
        lin_pows.append(lin_pows[-1] * lin)
        xi2_pows.append(xi2_pows[-1] * xi2)
    for (a, b, e), c in f.terms.items():
        mono = Poly({(a, b, 0, 0, 0): c}, N)
        out = out + mono * lin_pows[e] * xi2_pows[d - e]
    return out


def _project_to_xi(p: Poly) -> Poly:
    terms = {}
    for m, c in p.terms.items():
        if m[0] or m[1]:
            raise AssertionError("x variables survived elimination")
        terms[m[2:]] = c
    return Poly(terms, 3)


def tangency_eliminant(f: HomogeneousPolynomial) -> Poly:
    """Resultant in xi whose zero set contains the dual curve (plus spurious factors)."""
    d = f.degree
    F = _embed(f)
    F0 = F.diff(0).substitute(0, Poly.constant(1, 5))
    F1 = F.diff(1).substitute(0, Poly.constant(1, 5))
    # binary forms of degree d-1 in (x0, x1): formal degrees keep the homogeneous resultant
    R = resultant(F0, F1, 1, deg_f=d - 1, deg_g=d - 1)
    return _project_to_xi(R)


def _membership_residuals(factor: Poly, xis: list[np.ndarray]) -> np.ndarray:
    nf = NumericForm(factor.as_homogeneous())
    X = np.array([xi / np.linalg.norm(xi) for xi in xis])
    return np.abs(nf.values(X)) / nf.coeff_norm


def _check_input(f: HomogeneousPolynomial):
    if f.nvars != 3:
        raise DimensionMismatch("plane curves need exactly 3 homogeneous variables")
    if f.degree < 2:
        raise DegreeTooSmall("dual of a line is a point, not a curve")
    if f.degree > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {f.degree} exceeds the supported maximum {MAX_DEGREE}")
    if any(mult > 1 for _, mult in irreducible_factors(f)):
        raise NonReduced("curve has a repeated component")


def dual_polynomial(f: HomogeneousPolynomial, *, lines: int = 20, seed: int = 0,
                    tolerance: float = 1e-8) -> DualCurveResult:
    """Defining polynomial of the dual curve, in dual coordinates (printed as x0, x1, x2).

    A factor of the eliminant is kept when it vanishes (to ``tolerance``,
    coefficients normalized) at the tangent covector of every sampled point on
    at least ``lines`` sample points, i.e. on a whole component of the curve.
    """
    _check_input(f)
    R = tangency_eliminant(f)
    if R.is_zero():
        raise EliminationCollapse("tangency eliminant vanishes identically")
    rng = np.random.default_rng(seed)
    nf = NumericForm(f)
    pts = points_on_hypersurface(nf, lines, rng, all_roots=True)
    xis = [nf.grad(x) for x in pts]
    kept: list[Poly] = []
    removed: list[tuple[str, int]] = []
    worst = 0.0
    for fac, mult in irreducible_factors(R):
        res = _membership_residuals(fac, xis)
        hits = res <= tolerance
        if hits.sum() >= lines:
            kept.append(fac)
            worst = max(worst, float(res[hits].max()))
        else:
            removed.append((fac.to_text(), mult))
    if not kept:
        raise EliminationCollapse("no factor of the eliminant passed the tangency test")
    dual = Poly.constant(1, 3)
    for fac in kept:
        dual = dual * fac
    dual = dual.primitive().as_homogeneous()
    return DualCurveResult(dual, dual.degree, removed, R.total_degree(), worst)


def pluecker(t: PlueckerTriple) -> tuple[int, int]:
    """Class and cusp count of the dual: (d(d-1) - 2δ - 3κ, 3d² - 6d - 6δ - 8κ)."""
    if t.d < 2:
        raise DegreeTooSmall("Plücker formulas need d >= 2")
    d, delta, kappa = t.d, t.delta, t.kappa
    return d * (d - 1) - 2 * delta - 3 * kappa, 3 * d * d - 6 * d - 6 * delta - 8 * kappa


def chi_bar_formula(t: PlueckerTriple) -> int:
    """Intersection Euler characteristic of a plane curve, d² - 3d + 2δ + 3κ.

    This is the printed sign convention; for a smooth curve it equals
    minus the topological Euler characteristic 3d - d².
    """
    return t.d * t.d - 3 * t.d + 2 * t.delta + 3 * t.kappa


@dataclass(frozen=True)
class DegreeIdentityReport:
    lhs: int
    rhs: int

    @property
    def match(self) -> bool:
        return self.lhs == self.rhs


def degree_identity_report(t: PlueckerTriple, t_dual: PlueckerTriple) -> DegreeIdentityReport:
    """Both sides of 3 d_dual = -chi_bar(S) - 2 chi_bar(S_dual); reports, never asserts."""
    expected, _ = pluecker(t)
    if t_dual.d != expected:
        raise InconsistentDualDegree(f"dual degree {t_dual.d} but Plücker gives {expected}")
    return DegreeIdentityReport(3 * t_dual.d, -chi_bar_formula(t) - 2 * chi_bar_formula(t_dual))


def proportionality(a: Poly, b: Poly) -> Fraction | None:
    """The scalar c with a == c * b, or None."""
    if a.nvars != b.nvars or set(a.terms) != set(b.terms) or not a.terms:
        return None
    m = next(iter(a.terms))
    c = a.terms[m] / b.terms[m]
    return c if all(a.terms[k] == c * b.terms[k] for k in a.terms) else None


def bidual_check(f: HomogeneousPolynomial, **kwargs) -> tuple[bool, Fraction | None]:
    """Dualize twice and test exact proportionality with f; returns (ok, scalar)."""
    first = dual_polynomial(f, **kwargs)
    if first.dual_degree > MAX_DEGREE:
        raise DegreeTooLarge(f"dual has degree {first.dual_degree}; second dualization unsupported")
    second = dual_polynomial(first.dual_poly, **kwargs)
    c = proportionality(second.dual_poly, f)
    return c is not None, c
