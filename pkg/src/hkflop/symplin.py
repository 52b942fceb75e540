"""Exact symplectic linear algebra over the rationals.

Vectors are tuples of :class:`~fractions.Fraction`; a subspace is stored by a
basis and compared through its reduced row-echelon form. The default form on
``Q^{2n}`` pairs ``e_i`` with ``e_{n+i}``: ``Omega(e_i, e_{n+i}) = 1``.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    BadExponent,
    DependentHyperplanes,
    DependentVectors,
    DimensionMismatch,
    InputError,
    NotCoisotropic,
    NotLagrangian,
)

Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


# ---------------------------------------------------------------------------
# row reduction helpers

def _vec(v: Sequence) -> Vector:
    return tuple(Fraction(x) for x in v)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[list[Vector], list[int]]:
    """Reduced row-echelon form (nonzero rows only) and pivot columns."""
    m = [[x if type(x) is Fraction else Fraction(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        if m[r][c] != 1:
            inv = 1 / m[r][c]
            m[r] = [x * inv if x else x for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b if b else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(rref(rows)[0]) if rows else 0


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of {v : row . v = 0 for every row}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fcol]
        basis.append(tuple(v))
    return basis


def _solve_in_basis(basis: Sequence[Vector], v: Vector) -> list[Fraction]:
    """Coordinates of v in a linearly independent list (v must lie in the span)."""
    k = len(basis)
    dim = len(v)
    aug = [[basis[j][i] for j in range(k)] + [v[i]] for i in range(dim)]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        raise ValueError("vector not in span")
    coords = [Fraction(0)] * k
    for row, pc in zip(red, pivots):
        coords[pc] = row[k]
    return coords


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class SymplecticSpace:
    """Q^{2n} with a nondegenerate antisymmetric Gram matrix."""

    n: int
    gram: Matrix

    def __post_init__(self):
        g = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        size = 2 * self.n
        if len(g) != size or any(len(row) != size for row in g):
            raise DimensionMismatch(f"gram must be {size}x{size}")
        for i in range(size):
            for j in range(size):
                if g[i][j] != -g[j][i]:
                    raise InputError("gram matrix is not antisymmetric")
        if rank(g) != size:
            raise InputError("gram matrix is degenerate")
        # nonzero entries only; the standard form has 2n of (2n)^2
        object.__setattr__(self, "_entries", tuple((i, j, g[i][j]) for i in range(size)
                                                   for j in range(size) if g[i][j]))

    @classmethod
    def standard(cls, n: int) -> "SymplecticSpace":
        size = 2 * n
        g = [[Fraction(0)] * size for _ in range(size)]
        for i in range(n):
            g[i][n + i] = Fraction(1)
            g[n + i][i] = Fraction(-1)
        return cls(n, tuple(tuple(r) for r in g))

    @property
    def dim(self) -> int:
        return 2 * self.n

    def omega(self, v: Sequence, w: Sequence) -> Fraction:
        return sum((v[i] * c * w[j] for i, j, c in self._entries if v[i] and w[j]), Fraction(0))

    def lower(self, w: Sequence) -> Vector:
        """The covector Omega(., w) = G w."""
        out = [Fraction(0)] * self.dim
        for i, j, c in self._entries:
            if w[j]:
                out[i] += c * w[j]
        return tuple(out)

    def unit(self, i: int) -> Vector:
        """Standard basis vector e_i (1-based, as in the usual notation)."""
        return tuple(Fraction(int(j == i - 1)) for j in range(self.dim))


@dataclass(frozen=True, eq=False)
class SymplecticSubspace:
    ambient: SymplecticSpace
    basis: tuple[Vector, ...]
    echelon: tuple[Vector, ...] = field(init=False, repr=False)

    def __post_init__(self):
        basis = tuple(_vec(v) for v in self.basis)
        for v in basis:
            if len(v) != self.ambient.dim:
                raise DimensionMismatch(f"vector of length {len(v)} in a {self.ambient.dim}-dimensional space")
        red, _ = rref(basis, self.ambient.dim) if basis else ([], [])
        if len(red) != len(basis):
            raise DependentVectors("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "echelon", tuple(red))

    @classmethod
    def span(cls, ambient: SymplecticSpace, vectors: Sequence[Sequence]) -> "SymplecticSubspace":
        """Subspace spanned by possibly dependent vectors."""
        vecs = [_vec(v) for v in vectors]
        red, _ = rref(vecs, ambient.dim) if vecs else ([], [])
        return cls(ambient, tuple(red))

    @classmethod
    def of_units(cls, ambient: SymplecticSpace, indices: Sequence[int]) -> "SymplecticSubspace":
        return cls(ambient, tuple(ambient.unit(i) for i in indices))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.dim

    def contains(self, other: "SymplecticSubspace") -> bool:
        if not other.basis:
            return True
        return rank(list(self.echelon) + list(other.echelon)) == self.dim

    def __eq__(self, other):
        if not isinstance(other, SymplecticSubspace):
            return NotImplemented
        return self.ambient == other.ambient and self.echelon == other.echelon

    def __hash__(self):
        return hash((self.ambient, self.echelon))

    def restricted_gram(self) -> list[list[Fraction]]:
        return [[self.ambient.omega(v, w) for w in self.basis] for v in self.basis]


class Classification(enum.Enum):
    ISOTROPIC = "Isotropic"
    COISOTROPIC = "Coisotropic"
    LAGRANGIAN = "Lagrangian"
    NONE = "None"


# ---------------------------------------------------------------------------
# operations

def perp(C: SymplecticSubspace) -> SymplecticSubspace:
    """Omega-orthogonal complement."""
    size = C.ambient.dim
    # Omega(v, w) = v^T G w, so each w in C contributes the row (G w)^T
    rows = [C.ambient.lower(w) for w in C.basis]
    return SymplecticSubspace(C.ambient, tuple(nullspace(rows, size)))


def intersect(A: SymplecticSubspace, B: SymplecticSubspace) -> SymplecticSubspace:
    if not A.basis or not B.basis:
        return SymplecticSubspace(A.ambient, ())
    size = A.ambient.dim
    ka = A.dim
    # a-coefficients of solutions to sum a_i A_i - sum b_j B_j = 0
    rows = [tuple([A.basis[i][r] for i in range(ka)] + [-B.basis[j][r] for j in range(B.dim)])
            for r in range(size)]
    sols = nullspace(rows, ka + B.dim)
    vecs = [tuple(sum((s[i] * A.basis[i][r] for i in range(ka)), Fraction(0)) for r in range(size))
            for s in sols]
    return SymplecticSubspace.span(A.ambient, vecs)


def subspace_sum(A: SymplecticSubspace, B: SymplecticSubspace) -> SymplecticSubspace:
    return SymplecticSubspace.span(A.ambient, list(A.basis) + list(B.basis))


def classify(C: SymplecticSubspace) -> Classification:
    isotropic = all(v == 0 for row in C.restricted_gram() for v in row)
    coisotropic = C.contains(perp(C))
    if isotropic and coisotropic:
        return Classification.LAGRANGIAN
    if isotropic:
        return Classification.ISOTROPIC
    if coisotropic:
        return Classification.COISOTROPIC
    return Classification.NONE


def _wedge(a: dict[tuple[int, ...], Fraction], b: dict[tuple[int, ...], Fraction]) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for ia, ca in a.items():
        sa = set(ia)
        for ib, cb in b.items():
            if sa.intersection(ib):
                continue
            merged = ia + ib
            # sign of the sorting permutation = parity of inversions
            inv = sum(1 for x in ia for y in ib if x > y)
            key = tuple(sorted(merged))
            v = out.get(key, Fraction(0)) + (-ca * cb if inv & 1 else ca * cb)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def restricted_wedge_power(C: SymplecticSubspace, k: int) -> dict[tuple[int, ...], Fraction]:
    """Components of (Omega|_C)^k on the 2k-subsets of C's basis."""
    A = C.restricted_gram()
    two_form = {(i, j): A[i][j] for i in range(C.dim) for j in range(i + 1, C.dim) if A[i][j]}
    power: dict[tuple[int, ...], Fraction] = {(): Fraction(1)}
    for _ in range(k):
        power = _wedge(power, two_form)
        if not power:
            break
    return power


def wedge_power_vanishes(C: SymplecticSubspace, k: int) -> bool:
    """True iff Omega^k restricts to zero on C."""
    if not 1 <= k <= C.ambient.n:
        raise BadExponent(f"exponent {k} outside 1..{C.ambient.n}")
    return not restricted_wedge_power(C, k)


def hyperplane(ambient: SymplecticSpace, covector: Sequence) -> SymplecticSubspace:
    cov = _vec(covector)
    if len(cov) != ambient.dim:
        raise DimensionMismatch("covector length does not match the space")
    return SymplecticSubspace(ambient, tuple(nullspace([cov], ambient.dim)))


def coisotropic_via_hyperplanes(ambient: SymplecticSpace,
                                covectors: Sequence[Sequence]) -> tuple[bool, tuple[int, int] | None]:
    """Pairwise test: Omega^{n-1} vanishes on every D_i ∩ D_j.

    Returns ``(ok, witness)`` with ``witness`` the first failing pair (1-based)
    or ``None``.
    """
    covs = [_vec(c) for c in covectors]
    if any(len(c) != ambient.dim for c in covs):
        raise DimensionMismatch("covector length does not match the space")
    if rank(covs) != len(covs):
        raise DependentHyperplanes("hyperplane covectors are linearly dependent")
    k = ambient.n - 1
    for i, j in itertools.combinations(range(len(covs)), 2):
        D = SymplecticSubspace(ambient, tuple(nullspace([covs[i], covs[j]], ambient.dim)))
        # Omega^0 = 1 never vanishes (only arises for n = 1)
        if k == 0 or restricted_wedge_power(D, k):
            return False, (i + 1, j + 1)
    return True, None


def intersection_of_hyperplanes(ambient: SymplecticSpace, covectors: Sequence[Sequence]) -> SymplecticSubspace:
    covs = [_vec(c) for c in covectors]
    return SymplecticSubspace(ambient, tuple(nullspace(covs, ambient.dim)))


@dataclass(frozen=True)
class Reduction:
    """The symplectic quotient D / D-perp of a coisotropic subspace.

    ``representatives`` are ambient vectors whose classes form the quotient
    basis; ``kernel`` is D-perp. :meth:`project` gives quotient coordinates of a
    vector of D.
    """

    source: SymplecticSubspace
    kernel: SymplecticSubspace
    representatives: tuple[Vector, ...]
    space: SymplecticSpace | None

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def project(self, v: Sequence) -> Vector:
        coords = _solve_in_basis(list(self.representatives) + list(self.kernel.basis), _vec(v))
        return tuple(coords[: self.dim])


def reduce(D: SymplecticSubspace) -> Reduction:
    if classify(D) not in (Classification.COISOTROPIC, Classification.LAGRANGIAN):
        raise NotCoisotropic("reduction needs a coisotropic subspace")
    K = perp(D)
    reps: list[Vector] = []
    current = list(K.basis)
    for v in D.basis:
        if rank(current + [v]) > len(current):
            current.append(v)
            reps.append(v)
    if reps:
        gram = tuple(tuple(D.ambient.omega(v, w) for w in reps) for v in reps)
        space = SymplecticSpace(len(reps) // 2, gram)
    else:
        space = None
    return Reduction(D, K, tuple(reps), space)


def _check_pair(C: SymplecticSubspace, D: SymplecticSubspace):
    if C.ambient != D.ambient:
        raise DimensionMismatch("subspaces live in different spaces")
    if classify(C) is not Classification.LAGRANGIAN:
        raise NotLagrangian("first argument must be Lagrangian")
    if classify(D) not in (Classification.COISOTROPIC, Classification.LAGRANGIAN):
        raise NotCoisotropic("second argument must be coisotropic")


def lag_project(C: SymplecticSubspace, D: SymplecticSubspace) -> SymplecticSubspace:
    """C ∩ D + D-perp, a Lagrangian inside D."""
    _check_pair(C, D)
    return subspace_sum(intersect(C, D), perp(D))


@dataclass(frozen=True)
class ReducedLagrangian:
    reduction: Reduction
    basis: tuple[Vector, ...]  # quotient coordinates

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_subspace(self) -> SymplecticSubspace | None:
        if self.reduction.space is None:
            return None
        return SymplecticSubspace(self.reduction.space, self.basis)


def lag_reduce(C: SymplecticSubspace, D: SymplecticSubspace) -> ReducedLagrangian:
    """Image of C ∩ D in D / D-perp."""
    _check_pair(C, D)
    red = reduce(D)
    images = [red.project(v) for v in intersect(C, D).basis]
    if red.dim == 0:
        return ReducedLagrangian(red, ())
    echelon, _ = rref(images, red.dim) if images else ([], [])
    return ReducedLagrangian(red, tuple(echelon))


def reduced_is_lagrangian(L: ReducedLagrangian) -> bool:
    sub = L.as_subspace()
    if sub is None:
        return L.dim == 0
    return classify(sub) is Classification.LAGRANGIAN


# ---------------------------------------------------------------------------
# JSON input and random instances

def subspace_from_json(doc: dict) -> SymplecticSubspace:
    """``{"n": 2, "gram": [[...]], "basis": [["1", "0", "1/2", "0"], ...]}``; gram optional."""
    try:
        n = int(doc["n"])
        space = SymplecticSpace(n, doc["gram"]) if doc.get("gram") is not None else SymplecticSpace.standard(n)
        basis = tuple(tuple(Fraction(str(x)) for x in v) for v in doc.get("basis", []))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad subspace document: {exc}") from exc
    return SymplecticSubspace(space, basis)


def subspace_to_json(C: SymplecticSubspace) -> dict:
    return {"n": C.ambient.n, "basis": [[str(x) for x in v] for v in C.basis]}


def random_subspace(rng: random.Random, ambient: SymplecticSpace, dim: int, bound: int = 5) -> SymplecticSubspace:
    """Random subspace with small integer basis entries, redrawn until independent."""
    while True:
        vecs = [tuple(Fraction(rng.randint(-bound, bound)) for _ in range(ambient.dim)) for _ in range(dim)]
        if rank(vecs) == dim:
            return SymplecticSubspace(ambient, tuple(vecs))


def random_sparse_subspace(rng: random.Random, ambient: SymplecticSpace, dim: int) -> SymplecticSubspace:
    """Like :func:`random_subspace` but mostly zeros, so degenerate cases show up."""
    while True:
        vecs = [tuple(Fraction(rng.choice((0, 0, 0, 1, -1, 2))) for _ in range(ambient.dim)) for _ in range(dim)]
        if rank(vecs) == dim:
            return SymplecticSubspace(ambient, tuple(vecs))


def random_lagrangian(rng: random.Random, ambient: SymplecticSpace, bound: int = 3) -> SymplecticSubspace:
    """Random Lagrangian built by isotropic extension."""
    vecs: list[Vector] = []
    while len(vecs) < ambient.n:
        current = SymplecticSubspace(ambient, tuple(vecs))
        candidates = perp(current).basis
        coeffs = [rng.randint(-bound, bound) for _ in candidates]
        v = tuple(sum((c * b[i] for c, b in zip(coeffs, candidates)), Fraction(0)) for i in range(ambient.dim))
        if rank(vecs + [v]) == len(vecs) + 1:
            vecs.append(v)
    return SymplecticSubspace(ambient, tuple(vecs))


def random_coisotropic(rng: random.Random, ambient: SymplecticSpace, codim: int, bound: int = 3) -> SymplecticSubspace:
    """Perp of a random isotropic subspace of dimension ``codim``."""
    lag = random_lagrangian(rng, ambient, bound)
    vecs = list(lag.basis)
    rng.shuffle(vecs)
    iso = SymplecticSubspace.span(ambient, vecs[:codim])
    return perp(iso)
