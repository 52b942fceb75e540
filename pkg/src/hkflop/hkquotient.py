"""The hyperkähler quotient model of T*P^n and its flop.

Points are represented on the level set ``xi(x) = 0, |x|^2 - |xi|^2 = 1``
(side M) or ``|xi|^2 - |x|^2 = 1`` (side M'), modulo the circle action
``(x, xi) -> (e^{it} x, e^{-it} xi)``. Both sides use complex moment level
``xi(x) = 0``; the flop preserves it. The holomorphic symplectic form on both
sides is the restriction of ``sum_i dx_i ^ dxi_i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    ComplexMomentNonzero,
    DimensionMismatch,
    NumericBreakdown,
    SingularSample,
    Unnormalizable,
    ZeroSection,
)
from .exactpoly import HomogeneousPolynomial

LEVEL_TOL = 1e-10


class Side(enum.Enum):
    M = "M"
    M_PRIME = "M_prime"

    @property
    def other(self) -> "Side":
        return Side.M_PRIME if self is Side.M else Side.M


def _as_pair(x, xi) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.complex128)
    xi = np.asarray(xi, dtype=np.complex128)
    if x.ndim != 1 or x.shape != xi.shape:
        raise DimensionMismatch(f"x and xi must be vectors of equal length, got {x.shape} and {xi.shape}")
    return x, xi


@dataclass(frozen=True)
class QuotientPoint:
    x: np.ndarray
    xi: np.ndarray
    side: Side = Side.M

    def __post_init__(self):
        x, xi = _as_pair(self.x, self.xi)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)
        scale = 1.0 + float(np.vdot(x, x).real + np.vdot(xi, xi).real)
        mu_c, level = self.constraint_residuals()
        if mu_c > LEVEL_TOL * scale or level > LEVEL_TOL * scale:
            raise ComplexMomentNonzero(f"not on the level set (|xi(x)| = {mu_c:.2e}, level defect {level:.2e})")

    @property
    def n(self) -> int:
        return self.x.shape[0] - 1

    def constraint_residuals(self) -> tuple[float, float]:
        nx = float(np.vdot(self.x, self.x).real)
        nxi = float(np.vdot(self.xi, self.xi).real)
        level = nx - nxi if self.side is Side.M else nxi - nx
        return abs(complex(np.dot(self.xi, self.x))), abs(level - 1.0)

    def rotate(self, theta: float) -> "QuotientPoint":
        u = np.exp(1j * theta)
        return QuotientPoint(u * self.x, self.xi / u, self.side)


@dataclass(frozen=True)
class CotangentChart:
    z: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        z, zeta = _as_pair(self.z, self.zeta)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "zeta", zeta)


@dataclass(frozen=True)
class NumericConfig:
    # 4th-order central stencils; h = 1e-3 balances O(h^4) truncation against rounding
    fd_step: float = 1e-3
    tolerance: float = 1e-8
    samples: int = 100
    seed: int = 0
    hermitian_tolerance: float = 1e-6

    def __post_init__(self):
        if not (self.fd_step > 0 and self.tolerance > 0):
            raise ValueError("fd_step and tolerance must be positive")


# ---------------------------------------------------------------------------
# moment maps and level sets

def moment_maps(x, xi) -> tuple[complex, complex]:
    """(mu_J, mu_c) = (i|x|^2 - i|xi|^2, xi(x))."""
    x, xi = _as_pair(x, xi)
    mu_j = 1j * (np.vdot(x, x).real - np.vdot(xi, xi).real)
    return complex(mu_j), complex(np.dot(xi, x))


def _gauge(x: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rotate so the first non-negligible coordinate of x (or of xi if x = 0) is real positive."""
    ref = x if np.linalg.norm(x) > 0 else xi
    big = np.abs(ref) > 1e-12 * np.linalg.norm(ref)
    if not big.any():
        return x, xi
    k = int(np.argmax(big))
    u = ref[k] / abs(ref[k])
    if ref is x:
        return x / u, xi * u
    return x * u, xi / u


def level_normalize(x, xi, side: Side = Side.M) -> QuotientPoint:
    """Move (x, xi) along the real scaling (s x, xi / s) onto the level set, then fix the phase."""
    x, xi = _as_pair(x, xi)
    nx = float(np.vdot(x, x).real)
    nxi = float(np.vdot(xi, xi).real)
    if abs(complex(np.dot(xi, x))) > 1e-12 * max(1.0, np.sqrt(nx * nxi)):
        raise ComplexMomentNonzero(f"xi(x) = {complex(np.dot(xi, x)):.3e} cannot be removed by rescaling")
    lead, other = (nx, nxi) if side is Side.M else (nxi, nx)
    if lead == 0.0:
        raise Unnormalizable("the leading vector vanishes; no positive rescaling reaches the level set")
    # u = s^2 solves lead*u^2 - u - other = 0; take the positive root
    u = (1.0 + np.sqrt(1.0 + 4.0 * lead * other)) / (2.0 * lead)
    s = np.sqrt(u)
    if side is Side.M:
        x, xi = s * x, xi / s
    else:
        x, xi = x / s, s * xi
    x, xi = _gauge(x, xi)
    # clean up the residual level error from rounding
    return QuotientPoint(x, xi, side)


def to_base(p: QuotientPoint) -> np.ndarray:
    """Unit representative of the base point: x / sqrt(1 + |xi|^2) on M, xi / sqrt(1 + |x|^2) on M'."""
    if p.side is Side.M:
        return p.x / np.sqrt(1.0 + np.vdot(p.xi, p.xi).real)
    return p.xi / np.sqrt(1.0 + np.vdot(p.x, p.x).real)


def to_chart(p: QuotientPoint) -> CotangentChart:
    """Inhomogeneous cotangent coordinates in the chart x0 != 0 (side M only).

    Convention: z_j = x_j / x_0 and zeta_j = (x_0 / |x|) xi_j for j >= 1. Over
    y = [1, 0, ..., 0] this is the identification of the fiber with
    (b_1, ..., b_n); elsewhere it is one choice among unitarily equivalent ones.
    """
    if p.side is not Side.M:
        raise ValueError("charts are defined on side M")
    if abs(p.x[0]) == 0:
        raise ValueError("point lies outside the chart x0 != 0")
    x0 = p.x[0]
    return CotangentChart(p.x[1:] / x0, (x0 / np.linalg.norm(p.x)) * p.xi[1:])


def _flop_arrays(x: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nx = np.linalg.norm(x)
    nxi = np.linalg.norm(xi)
    return (nxi / nx) * x, (nx / nxi) * xi


def flop(p: QuotientPoint) -> QuotientPoint:
    """(x, xi) -> (|xi|/|x| x, |x|/|xi| xi), landing on the opposite side."""
    fiber = p.xi if p.side is Side.M else p.x
    if not np.any(fiber):
        raise ZeroSection("the flop is undefined on the zero section")
    x, xi = _flop_arrays(p.x, p.xi)
    return QuotientPoint(x, xi, p.side.other)


def blowdown(p: QuotientPoint) -> np.ndarray:
    """Rank <= 1, trace-free matrix x ⊗ xi, i.e. A[i, j] = x_i xi_j."""
    return np.outer(p.x, p.xi)


def phase_distance(p: QuotientPoint, q: QuotientPoint) -> float:
    """Distance between representatives after the best circle alignment."""
    inner = np.vdot(q.x, p.x) + np.vdot(p.xi, q.xi)
    u = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.sqrt(np.linalg.norm(p.x - u * q.x) ** 2 + np.linalg.norm(p.xi - np.conj(u) * q.xi) ** 2))


def random_level_point(rng: np.random.Generator, n: int, side: Side = Side.M,
                       min_fiber: float = 1e-3) -> QuotientPoint:
    """Random point of the level set away from the zero section (|fiber| >= min_fiber)."""
    while True:
        x = (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)) / np.sqrt(2)
        xi = (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)) / np.sqrt(2)
        if side is Side.M:
            xi = xi - np.dot(xi, x) * np.conj(x) / np.vdot(x, x).real
        else:
            x = x - np.dot(xi, x) * np.conj(xi) / np.vdot(xi, xi).real
        xi *= np.exp(rng.uniform(-2.0, 1.0))
        p = level_normalize(x, xi, side)
        fiber = p.xi if side is Side.M else p.x
        if np.linalg.norm(fiber) >= min_fiber:
            return p


# ---------------------------------------------------------------------------
# Calabi metric

def calabi_f(t):
    s = np.sqrt(1.0 + 4.0 * np.asarray(t, dtype=np.float64))
    return s - np.log1p(s)


def calabi_t(c: CotangentChart) -> float:
    nz = 1.0 + np.vdot(c.z, c.z).real
    return float(nz * (np.vdot(c.zeta, c.zeta).real + abs(np.dot(c.z, c.zeta)) ** 2))


def calabi_potential(c: CotangentChart) -> float:
    """log(1 + |z|^2) + f(t) with t = (1 + |z|^2)(|zeta|^2 + |z.zeta|^2)."""
    return float(_kernels.calabi_potential(np.concatenate([c.z, c.zeta])[None, :])[0])


_D1 = {-2: 1.0 / 12, -1: -8.0 / 12, 1: 8.0 / 12, 2: -1.0 / 12}
_D2 = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


def real_hessian(func, u0: np.ndarray, h: float) -> np.ndarray:
    """4th-order central-difference Hessian of a batched real function of real vectors."""
    N = u0.shape[0]
    pts = []
    plan = []
    for i in range(N):
        for j in range(N):
            if i == j:
                stencil = [(a, 0, c) for a, c in _D2.items()]
            else:
                stencil = [(a, b, ca * cb) for a, ca in _D1.items() for b, cb in _D1.items()]
            for a, b, c in stencil:
                u = u0.copy()
                u[i] += a * h
                if b:
                    u[j] += b * h
                plan.append((i, j, c))
                pts.append(u)
    vals = func(np.array(pts))
    H = np.zeros((N, N))
    for (i, j, c), v in zip(plan, vals):
        H[i, j] += c * v
    return H / (h * h)


@dataclass
class CalabiMetric:
    g: np.ndarray
    min_eigenvalue: float
    det: float
    hermitian_defect: float


def calabi_metric(c: CotangentChart, cfg: NumericConfig = NumericConfig()) -> CalabiMetric:
    """g_{i jbar} = d^2 K / dw_i dwbar_j in w = (z, zeta), by finite differences."""
    w = np.concatenate([c.z, c.zeta])
    m = w.shape[0]

    def potential(U):
        return _kernels.calabi_potential(U[:, :m] + 1j * U[:, m:])

    H = real_hessian(potential, np.concatenate([w.real, w.imag]), cfg.fd_step)
    Hxx, Hxy, Hyx, Hyy = H[:m, :m], H[:m, m:], H[m:, :m], H[m:, m:]
    g = 0.25 * (Hxx + Hyy + 1j * (Hxy - Hyx))
    defect = float(np.abs(g - g.conj().T).max())
    if defect > cfg.hermitian_tolerance:
        raise NumericBreakdown(f"metric not Hermitian to {cfg.hermitian_tolerance:g} (defect {defect:.2e})")
    gh = 0.5 * (g + g.conj().T)
    eig = np.linalg.eigvalsh(gh)
    return CalabiMetric(g, float(eig.min()), float(np.linalg.det(gh).real), defect)


def random_chart(rng: np.random.Generator, n: int, scale: float = 1.0) -> CotangentChart:
    z = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    zeta = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    return CotangentChart(z, zeta)


# ---------------------------------------------------------------------------
# flop: symplectic pullback

def _real(x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return np.concatenate([x.real, x.imag, xi.real, xi.imag])


def _complex(v: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    return v[:m] + 1j * v[m:2 * m], v[2 * m:3 * m] + 1j * v[3 * m:]


def quotient_tangent_basis(p: QuotientPoint) -> np.ndarray:
    """Orthonormal real basis (rows) of the level-set tangent space orthogonal to the circle orbit."""
    x, xi = p.x, p.xi
    m = x.shape[0]
    J = np.concatenate([xi, 1j * xi, x, 1j * x])  # differential of xi(x) in real coordinates
    sign = 1.0 if p.side is Side.M else -1.0
    level = sign * 2.0 * np.concatenate([x.real, x.imag, -xi.real, -xi.imag])
    orbit = _real(1j * x, -1j * xi)
    A = np.vstack([J.real, J.imag, level, orbit])
    _, s, Vt = np.linalg.svd(A)
    return Vt[4:]  # constraints and orbit are independent away from the zero section


def holomorphic_form(u, v, m: int) -> complex:
    """sum_i dx_i ^ dxi_i evaluated on two real tangent vectors."""
    ux, uxi = _complex(u, m)
    vx, vxi = _complex(v, m)
    return complex(np.dot(ux, vxi) - np.dot(vx, uxi))


def _form_matrix(vectors: np.ndarray, m: int) -> np.ndarray:
    k = vectors.shape[0]
    out = np.zeros((k, k), dtype=np.complex128)
    for a in range(k):
        for b in range(a + 1, k):
            out[a, b] = holomorphic_form(vectors[a], vectors[b], m)
            out[b, a] = -out[a, b]
    return out


def flop_pushforward(p: QuotientPoint, vectors: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference image of real tangent vectors under the flop map."""
    m = p.x.shape[0]
    u0 = _real(p.x, p.xi)
    out = []
    for v in vectors:
        xp, xip = _flop_arrays(*_complex(u0 + h * v, m))
        xm, xim = _flop_arrays(*_complex(u0 - h * v, m))
        out.append((_real(xp, xip) - _real(xm, xim)) / (2 * h))
    return np.array(out)


def symplectic_pullback_residual(p: QuotientPoint, h: float = 1e-6) -> float:
    m = p.x.shape[0]
    basis = quotient_tangent_basis(p)
    before = _form_matrix(basis, m)
    after = _form_matrix(flop_pushforward(p, basis, h), m)
    return float(np.abs(after - before).max())


@dataclass
class CheckReport:
    max_residual: float
    per_sample: list[dict]
    passed: bool
    residuals: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"max_residual": self.max_residual, "per_sample": self.per_sample,
                "pass": self.passed, "residuals": self.residuals}


def symplectic_pullback_check(n: int, cfg: NumericConfig = NumericConfig()) -> float:
    rng = np.random.default_rng(cfg.seed)
    return max(symplectic_pullback_residual(random_level_point(rng, n)) for _ in range(cfg.samples))


def flop_check(n: int, cfg: NumericConfig = NumericConfig(), *, level_tol: float = 1e-10,
               involution_tol: float = 1e-10, pullback_tol: float = 1e-6) -> CheckReport:
    """Level preservation, involution and symplectic pullback at random level points."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = {"level": 0.0, "involution": 0.0, "pullback": 0.0}
    for s in range(cfg.samples):
        p = random_level_point(rng, n)
        q = flop(p)
        level = max(q.constraint_residuals())
        back = flop(q)
        inv = phase_distance(p, back)
        pull = symplectic_pullback_residual(p)
        worst["level"] = max(worst["level"], level)
        worst["involution"] = max(worst["involution"], inv)
        worst["pullback"] = max(worst["pullback"], pull)
        rows.append({"sample": s, "level": level, "involution": inv, "pullback": pull})
    ok = worst["level"] <= level_tol and worst["involution"] <= involution_tol and worst["pullback"] <= pullback_tol
    return CheckReport(max(worst.values()), rows, ok, worst)


def calabi_check(n: int, cfg: NumericConfig = NumericConfig(), *, det_rel_tol: float = 1e-6) -> CheckReport:
    """Hermitian symmetry, positivity and constancy of det(g) at random chart points."""
    rng = np.random.default_rng(cfg.seed)
    rows = []
    dets = []
    herm = 0.0
    min_eig = np.inf
    for s in range(cfg.samples):
        c = random_chart(rng, n)
        g = calabi_metric(c, cfg)
        dets.append(g.det)
        herm = max(herm, g.hermitian_defect)
        min_eig = min(min_eig, g.min_eigenvalue)
        rows.append({"sample": s, "det": g.det, "min_eigenvalue": g.min_eigenvalue,
                     "hermitian_defect": g.hermitian_defect})
    dets = np.array(dets)
    ref = float(np.median(dets))
    spread = float(np.abs(dets - ref).max() / abs(ref))
    ok = herm <= cfg.hermitian_tolerance and min_eig > 0 and spread <= det_rel_tol
    return CheckReport(max(herm, spread), rows, bool(ok),
                       {"hermitian": herm, "det_spread": spread, "min_eigenvalue": float(min_eig),
                        "det_reference": ref})


# ---------------------------------------------------------------------------
# conormal transport through the flop

def conormal_transport(f: HomogeneousPolynomial, samples: int, cfg: NumericConfig = NumericConfig(),
                       *, dual=None) -> CheckReport:
    """Push conormal covectors of {f = 0} through the flop and test them against the dual.

    For plane curves the exact dual polynomial is used (or ``dual`` if
    given); otherwise the numeric dual function must vanish at the flopped
    base point.
    """
    from .dualcurve import dual_polynomial
    from .legendre import NewtonConfig, NumericForm, dual_evaluate, points_on_hypersurface

    nf = NumericForm(f)
    n = f.nvars - 1
    rng = np.random.default_rng(cfg.seed)
    if n == 2:
        dual_nf = NumericForm(dual if dual is not None else dual_polynomial(f, seed=cfg.seed).dual_poly)
    pts = points_on_hypersurface(nf, samples, rng)
    rows = []
    worst = 0.0
    for s, x in enumerate(pts):
        grad = nf.grad(x)
        if np.linalg.norm(grad) <= 1e-8:
            raise SingularSample(f"gradient vanishes at sample {s}")
        c = rng.uniform(0.5, 2.0)
        xi = c * grad / np.linalg.norm(grad)
        p = level_normalize(x, xi)
        q = flop(p)
        y = to_base(q)
        y = y / np.linalg.norm(y)
        if n == 2:
            res = float(abs(dual_nf.value(y)) / dual_nf.coeff_norm)
        else:
            mu = np.vdot(grad, y) / np.vdot(grad, grad)
            hint = mu ** (1.0 / (nf.degree - 1)) * x
            ev = dual_evaluate(nf, y, NewtonConfig(seed=cfg.seed + s), x_hint=hint)
            res = float(abs(ev.value) / max(1.0, np.linalg.norm(ev.x) ** nf.degree))
        base_err = float(np.sqrt(max(0.0, 1.0 - abs(np.vdot(to_base(p), x)) ** 2)))
        worst = max(worst, res)
        rows.append({"sample": s, "residual": res, "base_residual": base_err})
    return CheckReport(worst, rows, worst <= cfg.tolerance, {"dual_membership": worst})
