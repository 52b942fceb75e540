"""Pointwise Legendre transform of homogeneous polynomials.

For a form ``f`` of degree ``p`` the gradient map ``x -> xi = grad f(x)`` is
inverted numerically (damped Newton with restarts) and the dual function is
evaluated by its defining formula ``f_dual(xi) = <x, xi> - f(x)``. By Euler's
identity this equals ``(p - 1) f(x)`` on the branch through ``x``; for
``p > 2`` the gradient map is a branched cover, so ``f_dual`` is multi-valued
and a branch can be pinned with ``x_hint``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DegreeOne, DimensionMismatch, NoConvergence, SingularSample, ZeroPolynomial
from .exactpoly import HomogeneousPolynomial, term_arrays


class NumericForm:
    """Floating-point view of a form, backed by the compiled kernels."""

    def __init__(self, f: HomogeneousPolynomial):
        if f.is_zero():
            raise ZeroPolynomial("numeric view of the zero form")
        self.form = f
        self.nvars = f.nvars
        self.degree = f.degree
        self.exps, self.coeffs = term_arrays(f)
        self.coeff_norm = float(np.abs(self.coeffs).sum())

    def value(self, x) -> complex:
        return complex(_kernels.poly_eval(self.exps, self.coeffs, np.asarray(x)[None, :])[0])

    def values(self, X) -> np.ndarray:
        return _kernels.poly_eval(self.exps, self.coeffs, X)

    def derivs(self, x):
        v, g, h = _kernels.poly_derivs(self.exps, self.coeffs, np.asarray(x)[None, :])
        return complex(v[0]), g[0], h[0]

    def grad(self, x) -> np.ndarray:
        return self.derivs(x)[1]


def _check_point(f: HomogeneousPolynomial, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (f.nvars,):
        raise DimensionMismatch(f"point has shape {x.shape}, form has {f.nvars} variables")
    return x


def _numeric(f) -> NumericForm:
    return f if isinstance(f, NumericForm) else NumericForm(f)


@dataclass(frozen=True)
class NewtonConfig:
    tolerance: float = 1e-12
    max_iterations: int = 60
    restarts: int = 16
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class LegendrePoint:
    x: np.ndarray
    xi: np.ndarray
    f_value: complex
    f_dual_value: complex


def legendre_map(f: HomogeneousPolynomial, x) -> LegendrePoint:
    nf = _numeric(f)
    x = _check_point(nf.form, x)
    val, grad, _ = nf.derivs(x)
    return LegendrePoint(x, grad, val, complex(np.dot(x, grad) - val))


@dataclass(frozen=True)
class Inversion:
    """A solution of grad f(x) = xi."""

    x: np.ndarray
    residual: float
    iterations: int
    start: int
    singular: bool = False  # Hessian (numerically) degenerate at x

    def __iter__(self):
        yield self.x
        yield self.residual


def _newton(nf: NumericForm, xi: np.ndarray, x0: np.ndarray, cfg: NewtonConfig, tol: float):
    x = x0.copy()
    _, g, H = nf.derivs(x)
    r = g - xi
    res = float(np.linalg.norm(r))
    for it in range(cfg.max_iterations):
        if res <= tol:
            return x, res, it
        try:
            step = np.linalg.solve(H, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, -r, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        lam = 1.0
        for _ in range(30):
            cand = x + lam * step
            _, gc, Hc = nf.derivs(cand)
            rc = gc - xi
            rescand = float(np.linalg.norm(rc))
            if rescand < res:
                x, r, H, res = cand, rc, Hc, rescand
                break
            lam *= 0.5
        else:
            break
    return x, res, cfg.max_iterations


def _starts(nf: NumericForm, xi: np.ndarray, cfg: NewtonConfig, x_hint):
    rng = np.random.default_rng(cfg.seed)
    n = nf.nvars
    p = nf.degree
    scale = max(float(np.linalg.norm(xi)), 1e-300) ** (1.0 / (p - 1))
    starts = []
    if x_hint is not None:
        starts.append(np.asarray(x_hint, dtype=np.complex128))
    starts.append(xi.copy())
    while len(starts) < cfg.restarts + (x_hint is not None):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        starts.append(z * scale / np.sqrt(2 * n))
    return starts


def _hessian_singular(nf: NumericForm, x: np.ndarray) -> bool:
    _, _, H = nf.derivs(x)
    s = np.linalg.svd(H, compute_uv=False)
    return bool(s[-1] <= 1e-10 * max(s[0], 1e-300)) if s.size else True


def legendre_invert(f, xi, cfg: NewtonConfig = NewtonConfig(), x_hint=None) -> Inversion:
    """Solve grad f(x) = xi by damped Newton from several starts.

    The residual test is ``|grad f(x) - xi| <= tolerance * max(1, |xi|)``.
    ``x_hint`` is tried first and selects the branch when the gradient map is
    not injective.
    """
    nf = _numeric(f)
    xi = _check_point(nf.form, xi)
    if nf.degree < 2:
        raise DegreeOne("gradient of a linear form is constant; nothing to invert")
    if not np.any(xi):
        # x = 0 is always a solution; the Hessian vanishes there once p > 2
        return Inversion(np.zeros(nf.nvars, dtype=np.complex128), 0.0, 0, -1, singular=nf.degree > 2)
    tol = cfg.tolerance * max(1.0, float(np.linalg.norm(xi)))
    best = np.inf
    for k, x0 in enumerate(_starts(nf, xi, cfg, x_hint)):
        x, res, it = _newton(nf, xi, x0, cfg, tol)
        if res <= tol:
            return Inversion(x, res, it, k, _hessian_singular(nf, x))
        best = min(best, res)
    raise NoConvergence(f"no restart reached tolerance (best residual {best:.3e})", best)


def legendre_branches(f, xi, cfg: NewtonConfig = NewtonConfig(), dedupe: float = 1e-7) -> list[Inversion]:
    """All distinct solutions of grad f(x) = xi reached from the restart set."""
    nf = _numeric(f)
    xi = _check_point(nf.form, xi)
    if nf.degree < 2:
        raise DegreeOne("gradient of a linear form is constant; nothing to invert")
    tol = cfg.tolerance * max(1.0, float(np.linalg.norm(xi)))
    found: list[Inversion] = []
    for k, x0 in enumerate(_starts(nf, xi, cfg, None)):
        x, res, it = _newton(nf, xi, x0, cfg, tol)
        if res > tol:
            continue
        if any(np.linalg.norm(x - b.x) <= dedupe * (1 + np.linalg.norm(x)) for b in found):
            continue
        found.append(Inversion(x, res, it, k, _hessian_singular(nf, x)))
    return found


@dataclass(frozen=True)
class DualEvaluation:
    xi: np.ndarray
    x: np.ndarray
    value: complex           # <x, xi> - f(x)
    euler_value: complex     # (p - 1) f(x), must agree with value
    residual: float          # |grad f(x) - xi|

    @property
    def discrepancy(self) -> float:
        return abs(self.value - self.euler_value)


def dual_evaluate(f, xi, cfg: NewtonConfig = NewtonConfig(), x_hint=None) -> DualEvaluation:
    nf = _numeric(f)
    xi = _check_point(nf.form, xi)
    inv = legendre_invert(nf, xi, cfg, x_hint)
    fx = nf.value(inv.x)
    return DualEvaluation(xi, inv.x, complex(np.dot(inv.x, xi) - fx), (nf.degree - 1) * fx, inv.residual)


def dual_value(f, xi, cfg: NewtonConfig = NewtonConfig(), x_hint=None) -> complex:
    """f_dual(xi) on the branch found (or pinned by ``x_hint``)."""
    return dual_evaluate(f, xi, cfg, x_hint).value


def dual_values(f, xi, cfg: NewtonConfig = NewtonConfig()) -> list[DualEvaluation]:
    """f_dual(xi) on every branch reached by the restarts."""
    nf = _numeric(f)
    xi = _check_point(nf.form, xi)
    out = []
    for inv in legendre_branches(nf, xi, cfg):
        fx = nf.value(inv.x)
        out.append(DualEvaluation(xi, inv.x, complex(np.dot(inv.x, xi) - fx), (nf.degree - 1) * fx, inv.residual))
    return out


def dual_gradient(f, xi, cfg: NewtonConfig = NewtonConfig(), x_hint=None, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of f_dual at xi, continued along the branch of ``x_hint``."""
    nf = _numeric(f)
    xi = _check_point(nf.form, xi)
    h = step * max(1.0, float(np.linalg.norm(xi)))
    grad = np.empty(nf.nvars, dtype=np.complex128)
    for j in range(nf.nvars):
        e = np.zeros(nf.nvars, dtype=np.complex128)
        e[j] = h
        plus = dual_evaluate(nf, xi + e, cfg, x_hint)
        minus = dual_evaluate(nf, xi - e, cfg, x_hint)
        grad[j] = (plus.value - minus.value) / (2 * h)
    return grad


@dataclass
class InvolutionReport:
    samples: int
    forward_residual: float   # |grad f_dual(grad f(x)) - x| / max(1, |x|)
    backward_residual: float  # |grad f(x(xi)) - xi| / max(1, |xi|)
    skipped: int = 0
    per_sample: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.forward_residual, self.backward_residual)


def involution_check(f, samples: int, cfg: NewtonConfig = NewtonConfig(), step: float = 1e-5) -> InvolutionReport:
    """Check both compositions of the gradient maps of f and f_dual at random points.

    Forward: x -> xi = grad f(x) -> grad f_dual(xi), which should return x.
    Backward: random xi -> x = inverse(xi) -> grad f(x), which should return xi.
    Points with |det Hessian| <= 1e-8 are skipped.
    """
    nf = _numeric(f)
    if nf.degree < 2:
        raise DegreeOne("involution needs degree >= 2")
    rng = np.random.default_rng(cfg.seed)
    n = nf.nvars
    fwd = bwd = 0.0
    skipped = 0
    rows = []
    for s in range(samples):
        x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        _, xi, H = nf.derivs(x)
        if abs(np.linalg.det(H)) <= 1e-8:
            skipped += 1
            continue
        sub = NewtonConfig(cfg.tolerance, cfg.max_iterations, cfg.restarts, cfg.seed + s + 1)
        back = dual_gradient(nf, xi, sub, x_hint=x, step=step)
        r_f = float(np.linalg.norm(back - x) / max(1.0, np.linalg.norm(x)))
        eta = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        inv = legendre_invert(nf, eta, sub)
        r_b = float(np.linalg.norm(nf.grad(inv.x) - eta) / max(1.0, np.linalg.norm(eta)))
        fwd = max(fwd, r_f)
        bwd = max(bwd, r_b)
        rows.append({"sample": s, "forward": r_f, "backward": r_b})
    return InvolutionReport(samples, fwd, bwd, skipped, rows)


def fermat_dual(p: int, n: int) -> tuple[Fraction, int]:
    """Conjugate exponent q (1/p + 1/q = 1) and the degree p(p-1)^(n-1) of the dual Fermat hypersurface."""
    if p < 2 or n < 1:
        raise ValueError("need p >= 2 and n >= 1")
    return Fraction(p, p - 1), p * (p - 1) ** (n - 1)


# ---------------------------------------------------------------------------
# sampling on hypersurfaces

def _line_polynomial(nf: NumericForm, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coefficients (highest first) of t -> f(u + t v), recovered by a DFT on a circle."""
    d = nf.degree
    m = d + 1
    t = np.exp(2j * np.pi * np.arange(m) / m)
    vals = nf.values(u[None, :] + t[:, None] * v[None, :])
    coeffs = np.fft.fft(vals) / m  # coefficient k sits at index k
    return coeffs[::-1]


def points_on_hypersurface(f, count: int, rng: np.random.Generator, *, all_roots: bool = False,
                           singular_tol: float = 1e-8, max_tries: int | None = None) -> list[np.ndarray]:
    """Random smooth points of {f = 0}, unit-normalized.

    Each random complex line ``u + t v`` is cut with the zero set by
    polynomial root-finding, then polished by Newton along the line. With
    ``all_roots`` every intersection point of a line is kept (so every
    component is hit); otherwise one per line. Points where
    ``|grad f| <= singular_tol`` are rejected; if no acceptable point is found
    within ``max_tries`` lines, :class:`SingularSample` is raised.
    """
    nf = _numeric(f)
    n = nf.nvars
    d = nf.degree
    max_tries = max_tries if max_tries is not None else 20 * count + 20
    points: list[np.ndarray] = []
    tries = 0
    while len(points) < count:
        tries += 1
        if tries > max_tries:
            raise SingularSample(f"could not find smooth points on the zero set after {max_tries} lines")
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        roots = np.roots(_line_polynomial(nf, u, v))
        if len(roots) != d:
            continue
        line_pts = []
        ok = True
        for t in roots:
            for _ in range(4):
                val, g, _h = nf.derivs(u + t * v)
                dv = np.dot(g, v)
                if dv == 0:
                    break
                t = t - val / dv
            x = u + t * v
            x = x / np.linalg.norm(x)
            _, g, _h = nf.derivs(x)
            if np.linalg.norm(g) <= singular_tol:
                ok = False
                break
            line_pts.append(x)
        if not ok:
            continue
        if all_roots:
            points.extend(line_pts)
        else:
            points.append(line_pts[int(rng.integers(len(line_pts)))])
    return points[:count] if not all_roots else points
