"""Truncated characteristic-class algebra in Chern classes.

A :class:`FormalClassSeries` of rank ``r`` lives in ``Q[c1..cr]`` graded by
``deg c_i = i`` (Chern-root degree, so a root ``t`` has degree 1) and is cut
off above degree ``N``. Multiplicative genera are built from the
characteristic power series ``Q(t)``: the log of ``prod Q(t_i)`` is
``sum_k l_k p_k`` with ``l_k`` the coefficients of ``log Q`` and ``p_k`` the
power sums of the roots, which Newton's identities express in the ``c_i``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BadConstantTerm, InputError, TruncationTooLarge
from .exactpoly import Poly

MAX_TRUNCATION = 12


# ---------------------------------------------------------------------------
# univariate exact power series (lists of Fractions, index = degree)

def _ps_mul(a: Sequence[Fraction], b: Sequence[Fraction], N: int) -> list[Fraction]:
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a[: N + 1]):
        if x:
            for j, y in enumerate(b[: N + 1 - i]):
                out[i + j] += x * y
    return out


def _ps_inv(a: Sequence[Fraction], N: int) -> list[Fraction]:
    if a[0] == 0:
        raise BadConstantTerm("series is not invertible")
    out = [Fraction(0)] * (N + 1)
    out[0] = 1 / Fraction(a[0])
    for k in range(1, N + 1):
        s = sum((a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -s * out[0]
    return out


def _ps_log(a: Sequence[Fraction], N: int) -> list[Fraction]:
    """log of a series with constant term 1, via log(a)' = a'/a."""
    if a[0] != 1:
        raise BadConstantTerm("log needs constant term 1")
    da = [k * a[k] for k in range(1, min(len(a), N + 1))] + [Fraction(0)] * N
    q = _ps_mul(da, _ps_inv(a, N), N)
    return [Fraction(0)] + [q[k - 1] / k for k in range(1, N + 1)]


def _taylor(kind: "GenusKind", N: int) -> list[Fraction]:
    # each characteristic series is 1 / g(t) with g an explicit exponential-type series
    fact = math.factorial
    if kind is GenusKind.A_HAT:
        # sinh(t/2) / (t/2) = sum (t/2)^(2m) / (2m+1)!
        g = [Fraction(1, 2 ** k * fact(k + 1)) if k % 2 == 0 else Fraction(0) for k in range(N + 1)]
        return _ps_inv(g, N)
    if kind is GenusKind.TODD:
        # (1 - e^{-t}) / t = sum (-1)^k t^k / (k+1)!
        g = [Fraction((-1) ** k, fact(k + 1)) for k in range(N + 1)]
        return _ps_inv(g, N)
    # t / tanh t = cosh t / (sinh t / t)
    cosh = [Fraction(1, fact(k)) if k % 2 == 0 else Fraction(0) for k in range(N + 1)]
    sinh_t = [Fraction(1, fact(k + 1)) if k % 2 == 0 else Fraction(0) for k in range(N + 1)]
    return _ps_mul(cosh, _ps_inv(sinh_t, N), N)


class GenusKind(enum.Enum):
    A_HAT = "A_hat"
    TODD = "Todd"
    L = "L"

    @classmethod
    def parse(cls, text: str) -> "GenusKind":
        def norm(v: str) -> str:
            return v.strip().lower().replace("-", "").replace("_", "")

        key = norm(text)
        for kind in cls:
            if norm(kind.value) == key or norm(kind.name) == key:
                return kind
        raise InputError(f"unknown genus kind {text!r}")


def characteristic_series(kind: GenusKind, N: int) -> list[Fraction]:
    """Coefficients of Q(t) through t^N."""
    _check_truncation(N)
    return _taylor(kind, N)


def _check_truncation(N: int):
    if N < 0:
        raise InputError("truncation degree must be non-negative")
    if N > MAX_TRUNCATION:
        raise TruncationTooLarge(f"truncation {N} exceeds {MAX_TRUNCATION}")


# ---------------------------------------------------------------------------
# graded series

def _weighted_degree(m: tuple[int, ...]) -> int:
    return sum((i + 1) * e for i, e in enumerate(m))


@dataclass(frozen=True)
class FormalClassSeries:
    rank: int
    N: int
    poly: Poly

    def __post_init__(self):
        if self.poly.nvars != self.rank:
            raise InputError("polynomial ring does not match the rank")
        if any(_weighted_degree(m) > self.N for m in self.poly.terms):
            kept = {m: c for m, c in self.poly.terms.items() if _weighted_degree(m) <= self.N}
            object.__setattr__(self, "poly", Poly(kept, self.rank))

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, rank: int, N: int) -> "FormalClassSeries":
        return cls(rank, N, Poly.constant(value, rank))

    @classmethod
    def chern(cls, i: int, rank: int, N: int) -> "FormalClassSeries":
        """c_i as a series; c_0 = 1 and c_i = 0 beyond the rank."""
        if i == 0:
            return cls.constant(1, rank, N)
        if i > rank:
            return cls.constant(0, rank, N)
        return cls(rank, N, Poly.var(i - 1, rank))

    @classmethod
    def total_chern(cls, rank: int, N: int) -> "FormalClassSeries":
        out = cls.constant(1, rank, N)
        for i in range(1, rank + 1):
            out = out + cls.chern(i, rank, N)
        return out

    # -- access -------------------------------------------------------------
    def component(self, k: int) -> Poly:
        return Poly({m: c for m, c in self.poly.terms.items() if _weighted_degree(m) == k}, self.rank)

    @property
    def constant_term(self) -> Fraction:
        return self.poly.terms.get((0,) * self.rank, Fraction(0))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "FormalClassSeries"):
        if self.rank != other.rank:
            raise InputError("series live in different rings")

    def __add__(self, other: "FormalClassSeries") -> "FormalClassSeries":
        self._check(other)
        return FormalClassSeries(self.rank, min(self.N, other.N), self.poly + other.poly)

    def __sub__(self, other: "FormalClassSeries") -> "FormalClassSeries":
        return self + (-other)

    def __neg__(self) -> "FormalClassSeries":
        return FormalClassSeries(self.rank, self.N, -self.poly)

    def scale(self, c) -> "FormalClassSeries":
        return FormalClassSeries(self.rank, self.N, self.poly * Poly.constant(c, self.rank))

    def __mul__(self, other: "FormalClassSeries") -> "FormalClassSeries":
        self._check(other)
        N = min(self.N, other.N)
        out: dict[tuple[int, ...], Fraction] = {}
        for ma, ca in self.poly.terms.items():
            da = _weighted_degree(ma)
            for mb, cb in other.poly.terms.items():
                if da + _weighted_degree(mb) > N:
                    continue
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = out.get(m, Fraction(0)) + ca * cb
        return FormalClassSeries(self.rank, N, Poly(out, self.rank))

    def __eq__(self, other):
        if not isinstance(other, FormalClassSeries):
            return NotImplemented
        N = min(self.N, other.N)
        return self.rank == other.rank and self.truncate(N).poly == other.truncate(N).poly

    def __hash__(self):
        return hash(self.rank)

    def truncate(self, N: int) -> "FormalClassSeries":
        return FormalClassSeries(self.rank, min(N, self.N), self.poly)

    def dual(self) -> "FormalClassSeries":
        """Series of the dual bundle: c_i -> (-1)^i c_i."""
        out = {}
        for m, c in self.poly.terms.items():
            sign = (-1) ** sum((i + 1) * e for i, e in enumerate(m) if (i + 1) % 2)
            out[m] = sign * c
        return FormalClassSeries(self.rank, self.N, Poly(out, self.rank))

    def substitute_chern(self, images: Sequence["FormalClassSeries"]) -> "FormalClassSeries":
        """Replace c_1..c_rank by the given series (all in one target ring)."""
        if len(images) != self.rank:
            raise InputError(f"need {self.rank} images")
        target = images[0]
        N = min([self.N] + [im.N for im in images])
        out = FormalClassSeries.constant(0, target.rank, N)
        for m, c in self.poly.terms.items():
            term = FormalClassSeries.constant(c, target.rank, N)
            for im, e in zip(images, m):
                for _ in range(e):
                    term = term * im
            out = out + term
        return out

    def to_text(self) -> str:
        """Canonical print: weighted degree ascending, then grlex inside a degree."""
        if self.poly.is_zero():
            return "0"
        pieces = []
        for k in range(self.N + 1):
            comp = self.component(k)
            if comp.is_zero():
                continue
            pieces.append(comp_text(comp))
        return " + ".join(pieces).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"rank": self.rank, "N": self.N,
                "components": {str(k): comp_text(self.component(k)) for k in range(self.N + 1)
                               if not self.component(k).is_zero()}}


def comp_text(p: Poly) -> str:
    """Print a polynomial in c1..cr (the generic printer counts variables from 0)."""
    text = p.to_text("c")
    # shift indices c0..c{r-1} -> c1..cr, highest first so nothing is renamed twice
    for i in reversed(range(p.nvars)):
        text = text.replace(f"c{i}", f"c{{{i + 1}}}")
    return text.replace("{", "").replace("}", "")


# ---------------------------------------------------------------------------
# exp / log / sqrt in the graded ring

def _exp_nilpotent(x: FormalClassSeries) -> FormalClassSeries:
    if x.constant_term != 0:
        raise BadConstantTerm("exp needs a series without constant term")
    out = FormalClassSeries.constant(1, x.rank, x.N)
    power = FormalClassSeries.constant(1, x.rank, x.N)
    for m in range(1, x.N + 1):
        power = (power * x).scale(Fraction(1, m))
        if power.is_zero():
            break
        out = out + power
    return out


def power_sums(rank: int, N: int) -> list[FormalClassSeries]:
    """p_1..p_N of the Chern roots in terms of c_1..c_r (Newton's identities)."""
    p: list[FormalClassSeries] = [FormalClassSeries.constant(rank, rank, N)]
    for k in range(1, N + 1):
        acc = FormalClassSeries.chern(k, rank, N).scale((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + (FormalClassSeries.chern(i, rank, N) * p[k - i]).scale((-1) ** (i - 1))
        p.append(acc)
    return p


def genus_from_series(q: Sequence[Fraction], rank: int, N: int) -> FormalClassSeries:
    """prod_i Q(t_i) for a characteristic series Q with Q(0) = 1."""
    _check_truncation(N)
    if q[0] != 1:
        raise BadConstantTerm("characteristic series must start with 1")
    log_q = _ps_log(list(q) + [Fraction(0)] * (N + 1 - len(q)), N)
    ps = power_sums(rank, N)
    x = FormalClassSeries.constant(0, rank, N)
    for k in range(1, N + 1):
        if log_q[k]:
            x = x + ps[k].scale(log_q[k])
    return _exp_nilpotent(x)


def genus_series(kind: GenusKind | str, rank: int, N: int) -> FormalClassSeries:
    if isinstance(kind, str):
        kind = GenusKind.parse(kind)
    if rank < 1:
        raise InputError("rank must be positive")
    _check_truncation(N)
    return genus_from_series(_taylor(kind, N), rank, N)


def sqrt_series(s: FormalClassSeries) -> FormalClassSeries:
    """Unique square root with constant term 1, built degree by degree."""
    if s.constant_term != 1:
        raise BadConstantTerm(f"constant term is {s.constant_term}, expected 1")
    root = FormalClassSeries.constant(1, s.rank, s.N)
    for k in range(1, s.N + 1):
        # (root + y)^2 = s in degree k with y of degree k: 2y = s_k - (root^2)_k
        gap = FormalClassSeries(s.rank, s.N, s.component(k) - (root * root).component(k))
        root = root + gap.scale(Fraction(1, 2))
    return root


def chern_of_E_plus_Edual(c: FormalClassSeries) -> FormalClassSeries:
    """c(E + E*) = c(E) c(E*), roots {t_i, -t_i}."""
    return c * c.dual()


def whitney_images(total: FormalClassSeries, rank_sum: int) -> list[FormalClassSeries]:
    """The graded pieces c_1..c_R of a total Chern class, as substitution images."""
    return [FormalClassSeries(total.rank, total.N, total.component(k)) for k in range(1, rank_sum + 1)]


def pontryagin(c: FormalClassSeries, k: int) -> FormalClassSeries:
    """p_k = (-1)^k c_{2k}(E + E*)."""
    doubled = chern_of_E_plus_Edual(c)
    return FormalClassSeries(c.rank, c.N, doubled.component(2 * k)).scale((-1) ** k)


def genus_of_E_plus_Edual(kind: GenusKind | str, rank: int, N: int) -> FormalClassSeries:
    """Genus of the rank-2r bundle E + E*, expressed in the Chern classes of E."""
    big = genus_series(kind, 2 * rank, N)
    total = chern_of_E_plus_Edual(FormalClassSeries.total_chern(rank, N))
    return big.substitute_chern(whitney_images(total, 2 * rank))


@dataclass(frozen=True)
class AHatSquareReport:
    rank: int
    N: int
    a_hat_sum: FormalClassSeries
    a_hat_square: FormalClassSeries
    todd_sum: FormalClassSeries

    @property
    def holds(self) -> bool:
        return self.a_hat_sum == self.a_hat_square == self.todd_sum


def a_hat_square_report(rank: int, N: int) -> AHatSquareReport:
    if N > 8:
        raise TruncationTooLarge("the A-hat square identity is checked through degree 8")
    a_sum = genus_of_E_plus_Edual(GenusKind.A_HAT, rank, N)
    a = genus_series(GenusKind.A_HAT, rank, N)
    todd_sum = genus_of_E_plus_Edual(GenusKind.TODD, rank, N)
    return AHatSquareReport(rank, N, a_sum, a * a, todd_sum)


def a_hat_square_identity(rank: int, N: int) -> bool:
    """Todd(E + E*) = A_hat(E + E*) = A_hat(E)^2 through degree N."""
    return a_hat_square_report(rank, N).holds


def series_from_components(rank: int, N: int, components: Mapping[int, Poly]) -> FormalClassSeries:
    total = Poly.zero(rank)
    for k, p in components.items():
        if any(_weighted_degree(m) != k for m in p.terms):
            raise InputError(f"component {k} is not homogeneous of that degree")
        total = total + p
    return FormalClassSeries(rank, N, total)
