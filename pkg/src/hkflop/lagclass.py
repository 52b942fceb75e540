"""Integer intersection calculus of Lagrangian classes under a flop.

A :class:`LagrangianClassTable` records, for classes ``C_1..C_k`` in ``M``
and their transforms in ``M'``, the pairings ``s_ij = C_i.C_j``,
``s'_ij = C_i^v.C_j^v`` and the center data ``a_i = C_i.P``,
``b_i = C_i^v.P*``, where ``P`` is the flopped ``P^n`` and
``P.P = P*.P* = (-1)^n (n+1)``. Construction enforces the Plücker-type
relation

    s_ij + a_i a_j / ((-1)^(n+1) (n+1)) = s'_ij + b_i b_j / ((-1)^(n+1) (n+1)).

Everything is exact (``int`` and ``Fraction``).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    AllNull,
    DegenerateProjection,
    InconsistentTable,
    InputError,
    MissingClass,
    NotMinusTwo,
)

CENTER = "P"
DUAL_CENTER = "P*"


def center_square(n: int) -> int:
    """P.P = (-1)^n (n+1), from chi(P^n) = n+1 and chi(C) = (-1)^n C.C."""
    return (-1) ** n * (n + 1)


def euler_from_class(n: int, self_intersection: int) -> int:
    return (-1) ** n * self_intersection


def ext_euler(n: int, c1_dot_c2: int) -> int:
    """Alternating sum of Ext dimensions between two Lagrangians."""
    return (-1) ** n * c1_dot_c2


def clean_intersection_euler(dim_D: int, euler_D: int) -> int:
    """Intersection number of a clean intersection with component D."""
    return (-1) ** dim_D * euler_D


@dataclass(frozen=True)
class LagrangianClassTable:
    n: int
    labels: tuple[str, ...]
    s: tuple[tuple[int, ...], ...]
    a: tuple[int, ...]
    b: tuple[int, ...]
    s_dual: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.labels)
        if self.n < 1:
            raise InputError("n must be positive")
        if len(set(self.labels)) != k or CENTER in self.labels or DUAL_CENTER in self.labels:
            raise InputError("labels must be distinct and must not use the reserved center names")
        for name in ("s", "s_dual"):
            m = tuple(tuple(int(v) for v in row) for row in getattr(self, name))
            if len(m) != k or any(len(row) != k for row in m):
                raise InputError(f"{name} must be {k}x{k}")
            if any(m[i][j] != m[j][i] for i in range(k) for j in range(k)):
                raise InconsistentTable(f"{name} is not symmetric")
            object.__setattr__(self, name, m)
        for name in ("a", "b"):
            v = tuple(int(x) for x in getattr(self, name))
            if len(v) != k:
                raise InputError(f"{name} must have length {k}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "labels", tuple(self.labels))
        for i in range(k):
            for j in range(i, k):
                lhs, rhs = self._sides(i, j)
                if lhs != rhs:
                    raise InconsistentTable(
                        f"Plücker-type relation fails for ({self.labels[i]}, {self.labels[j]}): {lhs} != {rhs}")

    @property
    def center_square(self) -> int:
        return center_square(self.n)

    @property
    def _denominator(self) -> int:
        return (-1) ** (self.n + 1) * (self.n + 1)

    def _sides(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        d = self._denominator
        lhs = self.s[i][j] + Fraction(self.a[i] * self.a[j], d)
        rhs = self.s_dual[i][j] + Fraction(self.b[i] * self.b[j], d)
        return lhs, rhs

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise MissingClass(f"no class named {label!r}") from None

    # -- JSON ---------------------------------------------------------------
    @classmethod
    def from_json(cls, doc: Mapping) -> "LagrangianClassTable":
        try:
            return cls(int(doc["n"]), tuple(doc["labels"]), tuple(map(tuple, doc["s"])),
                       tuple(doc["a"]), tuple(doc["b"]), tuple(map(tuple, doc["s_dual"])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad class table: {exc}") from exc

    def to_json(self) -> dict:
        return {"n": self.n, "labels": list(self.labels), "s": [list(r) for r in self.s],
                "a": list(self.a), "b": list(self.b), "s_dual": [list(r) for r in self.s_dual]}


def pluecker_type_check(t: LagrangianClassTable, i: str | int, j: str | int) -> tuple[Fraction, Fraction]:
    i = t.index(i) if isinstance(i, str) else i
    j = t.index(j) if isinstance(j, str) else j
    if not (0 <= i < len(t.labels) and 0 <= j < len(t.labels)):
        raise MissingClass("class index out of range")
    return t._sides(i, j)


# ---------------------------------------------------------------------------
# normalized transform

@dataclass(frozen=True)
class TransformedClass:
    """A formal combination of classes on the M' side: ``{label: coefficient}``.

    Labels are ``"<name>^v"`` for the transform of a table class and ``"P*"``
    for the dual center.
    """

    source: str
    terms: Mapping[str, Fraction]
    integral: bool

    def to_text(self) -> str:
        parts = []
        for lab, c in self.terms.items():
            if c == 0:
                continue
            coeff = "" if c == 1 else "-" if c == -1 else f"{c}*"
            parts.append(f"{coeff}{lab}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def _dual_label(label: str) -> str:
    return f"{label}^v"


def normalized_transform(t: LagrangianClassTable, i: str | int) -> TransformedClass:
    """L(C) = C^v + ((C.P) + (-1)^(n+1) (C^v.P*)) / (n+1) P*, and L(P) = (-1)^n P*."""
    if i == CENTER:
        return TransformedClass(CENTER, {DUAL_CENTER: Fraction((-1) ** t.n)}, True)
    idx = t.index(i) if isinstance(i, str) else i
    if not 0 <= idx < len(t.labels):
        raise MissingClass("class index out of range")
    coeff = Fraction(t.a[idx] + (-1) ** (t.n + 1) * t.b[idx], t.n + 1)
    label = t.labels[idx]
    return TransformedClass(label, {_dual_label(label): Fraction(1), DUAL_CENTER: coeff},
                            coeff.denominator == 1)


def dual_pairing(t: LagrangianClassTable, u: str, v: str) -> int:
    """Pairing of the M'-side generators ``C^v`` and ``P*``."""
    if u == DUAL_CENTER and v == DUAL_CENTER:
        return t.center_square
    if u == DUAL_CENTER:
        u, v = v, u
    iu = t.index(u[:-2])
    if v == DUAL_CENTER:
        return t.b[iu]
    return t.s_dual[iu][t.index(v[:-2])]


def transformed_product(t: LagrangianClassTable, x: TransformedClass, y: TransformedClass) -> Fraction:
    return sum((cx * cy * dual_pairing(t, u, v) for u, cx in x.terms.items() for v, cy in y.terms.items()),
               Fraction(0))


def original_product(t: LagrangianClassTable, i: str, j: str) -> int:
    """Pairing on the M side, with ``P`` allowed as either argument."""
    if i == CENTER and j == CENTER:
        return t.center_square
    if i == CENTER:
        i, j = j, i
    ii = t.index(i)
    if j == CENTER:
        return t.a[ii]
    return t.s[ii][t.index(j)]


def transform_preserves_product(t: LagrangianClassTable) -> bool:
    """L(C_i).L(C_j) == C_i.C_j for all classes including P, exactly."""
    names = list(t.labels) + [CENTER]
    images = {name: normalized_transform(t, name) for name in names}
    return all(transformed_product(t, images[u], images[v]) == original_product(t, u, v)
               for u, v in itertools.combinations_with_replacement(names, 2))


def random_table(rng: random.Random, n: int, k: int, bound: int = 20) -> LagrangianClassTable:
    """Random table satisfying the Plücker-type relation.

    ``a`` and ``s'`` are drawn freely; ``b = eps*a + (n+1) r`` with a global
    sign eps, which makes ``(b_i b_j - a_i a_j)`` divisible by n+1 so that
    ``s`` comes out integral.
    """
    N = n + 1
    sign_n = (-1) ** (n + 1)
    eps = rng.choice((1, -1))
    a = [rng.randint(-bound, bound) for _ in range(k)]
    b = [eps * x + N * rng.randint(-2, 2) for x in a]
    s_dual = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            s_dual[i][j] = s_dual[j][i] = rng.randint(-bound, bound)
    s = [[s_dual[i][j] + sign_n * (b[i] * b[j] - a[i] * a[j]) // N for j in range(k)] for i in range(k)]
    labels = tuple(f"C{i + 1}" for i in range(k))
    return LagrangianClassTable(n, labels, tuple(map(tuple, s)), tuple(a), tuple(b), tuple(map(tuple, s_dual)))


# ---------------------------------------------------------------------------
# K3 reflections

@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(int(v) for v in row) for row in self.gram)
        r = len(g)
        if any(len(row) != r for row in g):
            raise InputError("gram must be square")
        if any(g[i][j] != g[j][i] for i in range(r) for j in range(r)):
            raise InputError("gram must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, u: Sequence, v: Sequence):
        if len(u) != self.rank or len(v) != self.rank:
            raise InputError("vector length does not match the lattice rank")
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank))


def _require_minus_two(L: GramLattice, P: Sequence[int]):
    if L.pair(P, P) != -2:
        raise NotMinusTwo(f"P.P = {L.pair(P, P)}, expected -2")


def k3_reflection(L: GramLattice, P: Sequence[int], C: Sequence[int]) -> tuple[int, ...]:
    """C - (C.P) P, exactly the displayed n = 1 transform (not an isometry)."""
    _require_minus_two(L, P)
    cp = L.pair(C, P)
    return tuple(c - cp * p for c, p in zip(C, P))


def picard_lefschetz(L: GramLattice, P: Sequence[int], C: Sequence[int]) -> tuple[int, ...]:
    """C + (C.P) P, the reflection in a (-2)-class: an involutive isometry."""
    _require_minus_two(L, P)
    cp = L.pair(C, P)
    return tuple(c + cp * p for c, p in zip(C, P))


# ---------------------------------------------------------------------------
# Mukai elementary modification

@dataclass(frozen=True)
class MukaiCenterData:
    """Per-class data for a P^k-bundle flop.

    ``c_proj`` = C.C^proj, ``proj_sq`` = C^proj.C^proj,
    ``dual_proj`` = C^v.C^vproj, ``dual_proj_sq`` = C^vproj.C^vproj.
    """

    k: int
    c_proj: int
    proj_sq: int
    dual_proj: int
    dual_proj_sq: int

    def __post_init__(self):
        if self.proj_sq != self.dual_proj_sq:
            raise InconsistentTable("C^proj.C^proj must equal C^vproj.C^vproj")
        if self.proj_sq == 0:
            raise DegenerateProjection("C^proj.C^proj = 0 leaves the formula undefined")


@dataclass(frozen=True)
class MukaiPairings:
    """Cross pairings for two classes: (C1.C2, C1.P2, P1.C2, P1.P2) on each side."""

    c1c2: int
    c1p2: int
    p1c2: int
    p1p2: int
    d1d2: int
    d1q2: int
    q1d2: int
    q1q2: int


@dataclass(frozen=True)
class MukaiReport:
    lhs: Fraction
    rhs: Fraction
    transformed_product: Fraction
    original_product: int

    @property
    def pluecker_ok(self) -> bool:
        return self.lhs == self.rhs

    @property
    def preserves_product(self) -> bool:
        return self.transformed_product == self.original_product


def _corrected(x1x2, x1p2, p1x2, p1p2, lam1, lam2) -> Fraction:
    # (X1 - lam1 P1).(X2 - lam2 P2)
    return x1x2 - lam2 * x1p2 - lam1 * p1x2 + lam1 * lam2 * p1p2


def mukai_transform_coefficient(d: MukaiCenterData) -> Fraction:
    """Coefficient of C^vproj in L(C) = C^v + ((-1)^k C.C^proj - C^v.C^vproj) / (C^proj.C^proj) C^vproj."""
    return Fraction((-1) ** d.k * d.c_proj - d.dual_proj, d.proj_sq)


def mukai_pluecker_check(d1: MukaiCenterData, d2: MukaiCenterData, pr: MukaiPairings) -> MukaiReport:
    """Both sides of the general Plücker-type formula, plus the product of the general transforms."""
    lam1 = Fraction(d1.c_proj, d1.proj_sq)
    lam2 = Fraction(d2.c_proj, d2.proj_sq)
    mu1 = Fraction(d1.dual_proj, d1.dual_proj_sq)
    mu2 = Fraction(d2.dual_proj, d2.dual_proj_sq)
    lhs = _corrected(pr.c1c2, pr.c1p2, pr.p1c2, pr.p1p2, lam1, lam2)
    rhs = _corrected(pr.d1d2, pr.d1q2, pr.q1d2, pr.q1q2, mu1, mu2)
    nu1 = mukai_transform_coefficient(d1)
    nu2 = mukai_transform_coefficient(d2)
    # L(C1).L(C2) = (C1^v + nu1 Q1).(C2^v + nu2 Q2)
    prod = pr.d1d2 + nu2 * pr.d1q2 + nu1 * pr.q1d2 + nu1 * nu2 * pr.q1q2
    return MukaiReport(lhs, rhs, prod, pr.c1c2)


def mukai_from_table(t: LagrangianClassTable, i: str, j: str) -> tuple[MukaiCenterData, MukaiCenterData, MukaiPairings]:
    """Specialize a P^n-flop table to Mukai data (C^proj = P, k = n)."""
    ii, jj = t.index(i), t.index(j)
    q = t.center_square
    d1 = MukaiCenterData(t.n, t.a[ii], q, t.b[ii], q)
    d2 = MukaiCenterData(t.n, t.a[jj], q, t.b[jj], q)
    pr = MukaiPairings(t.s[ii][jj], t.a[ii], t.a[jj], q, t.s_dual[ii][jj], t.b[ii], t.b[jj], q)
    return d1, d2, pr


def random_mukai(rng: random.Random, bound: int = 12) -> tuple[MukaiCenterData, MukaiCenterData, MukaiPairings]:
    """Consistent random data for two classes whose projections share one class Q.

    The dual pairing C1^v.C2^v is solved from the Plücker-type relation, with
    the projection square chosen to divide the correction exactly.
    """
    k = rng.randint(1, 4)
    q = rng.choice([v for v in range(-bound, bound + 1) if v])
    a1, a2 = (q * rng.randint(-3, 3) + rng.choice((0, 0, q)) for _ in range(2))
    b1, b2 = (q * rng.randint(-3, 3) for _ in range(2))
    c1c2 = rng.randint(-bound, bound)
    # s - a1 a2 / q = s' - b1 b2 / q
    d1d2 = c1c2 - Fraction(a1 * a2, q) + Fraction(b1 * b2, q)
    d1d2 = int(d1d2)
    d1 = MukaiCenterData(k, a1, q, b1, q)
    d2 = MukaiCenterData(k, a2, q, b2, q)
    return d1, d2, MukaiPairings(c1c2, a1, a2, q, d1d2, b1, b2, q)


# ---------------------------------------------------------------------------
# Fujiki constant

@dataclass(frozen=True)
class FujikiFit:
    c: Fraction
    max_defect: Fraction
    samples: int


def bb_fujiki_fit(q_gram: GramLattice, power_integrals: Sequence[tuple[Sequence[int], int]] | Mapping,
                  n: int, k: int = 0) -> FujikiFit:
    """Least-squares constant c in  int(alpha phi^(2n-2k)) = c q(phi)^(n-k)."""
    items = list(power_integrals.items()) if isinstance(power_integrals, Mapping) else list(power_integrals)
    if not items:
        raise InputError("no samples supplied")
    e = n - k
    if e < 0:
        raise InputError("need k <= n")
    xs = [Fraction(q_gram.pair(list(phi), list(phi))) ** e for phi, _ in items]
    ys = [Fraction(v) for _, v in items]
    denom = sum(x * x for x in xs)
    if denom == 0:
        raise AllNull("every sample has q(phi) = 0")
    c = sum(x * y for x, y in zip(xs, ys)) / denom
    defect = max(abs(y - c * x) for x, y in zip(xs, ys))
    return FujikiFit(c, defect, len(items))
