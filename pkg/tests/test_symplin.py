import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hkflop.errors import BadExponent, DependentHyperplanes, DependentVectors, NotCoisotropic, NotLagrangian
from hkflop.symplin import (
    Classification,
    SymplecticSpace,
    SymplecticSubspace,
    classify,
    coisotropic_via_hyperplanes,
    hyperplane,
    intersect,
    lag_project,
    lag_reduce,
    perp,
    random_coisotropic,
    random_lagrangian,
    random_sparse_subspace,
    random_subspace,
    reduce,
    reduced_is_lagrangian,
    restricted_wedge_power,
    subspace_from_json,
    subspace_to_json,
    wedge_power_vanishes,
)

V2 = SymplecticSpace.standard(2)
V3 = SymplecticSpace.standard(3)


def span(V, *idx):
    return SymplecticSubspace.of_units(V, idx)


def coordinate_covector(V, i):
    return [int(j == i - 1) for j in range(V.dim)]


# -- oracle: rank of the restricted Gram matrix (sympy, independent of the wedge code)

def gram_rank(C) -> int:
    return sympy.Matrix(C.restricted_gram()).rank() if C.dim else 0


def is_coisotropic_oracle(C) -> bool:
    # dim(C ∩ C⊥) = dim C - rank; coisotropic iff that equals codim C
    return C.dim - gram_rank(C) == C.codim


# -- examples ---------------------------------------------------------------

def test_perp_examples():
    assert perp(span(V2, 1, 2)) == span(V2, 1, 2)
    assert perp(span(V2, 1)) == span(V2, 1, 2, 4)
    assert perp(span(V3, 1, 2, 3, 4)) == span(V3, 2, 3)


def test_classify_examples():
    assert classify(span(V2, 1)) is Classification.ISOTROPIC
    assert classify(span(V2, 1, 2, 3)) is Classification.COISOTROPIC
    assert classify(span(V2, 1, 3)) is Classification.NONE
    assert classify(span(V2, 1, 2)) is Classification.LAGRANGIAN


def test_wedge_examples():
    assert wedge_power_vanishes(span(V2, 1, 2), 1)
    assert wedge_power_vanishes(span(V3, 1, 2, 3, 4), 2)
    assert not wedge_power_vanishes(span(V3, 1, 4, 2, 5), 2)
    with pytest.raises(BadExponent):
        wedge_power_vanishes(span(V2, 1), 3)
    with pytest.raises(BadExponent):
        wedge_power_vanishes(span(V2, 1), 0)


def test_wedge_value_is_pfaffian():
    # Omega^2 on (e1, e4, e2, e5) in the standard form: 2 * Pf = 2
    comps = restricted_wedge_power(span(V3, 1, 4, 2, 5), 2)
    assert list(comps.values()) == [2]


def test_hyperplane_examples():
    ok, witness = coisotropic_via_hyperplanes(V2, [coordinate_covector(V2, 1), coordinate_covector(V2, 2)])
    assert ok and witness is None
    D = intersect(hyperplane(V2, coordinate_covector(V2, 1)), hyperplane(V2, coordinate_covector(V2, 2)))
    assert classify(D) is Classification.LAGRANGIAN
    ok, witness = coisotropic_via_hyperplanes(V2, [coordinate_covector(V2, 1), coordinate_covector(V2, 3)])
    assert not ok and witness == (1, 2)
    ok, _ = coisotropic_via_hyperplanes(V3, [coordinate_covector(V3, i) for i in (1, 2, 3)])
    assert ok


def test_dependent_hyperplanes():
    with pytest.raises(DependentHyperplanes):
        coisotropic_via_hyperplanes(V2, [[1, 0, 0, 0], [2, 0, 0, 0]])


def test_dependent_basis():
    with pytest.raises(DependentVectors):
        SymplecticSubspace(V2, ((1, 0, 0, 0), (2, 0, 0, 0)))


def test_reduce_examples():
    r = reduce(span(V2, 1, 2, 3))
    assert r.dim == 2 and r.kernel == span(V2, 2)
    reps = r.representatives
    assert abs(V2.omega(reps[0], reps[1])) == 1
    assert reduce(span(V2, 1, 2)).dim == 0
    r3 = reduce(span(V3, 1, 2, 3, 4))
    assert r3.dim == 2 and r3.kernel == span(V3, 2, 3)
    assert {tuple(v) for v in r3.representatives} == {V3.unit(1), V3.unit(4)}
    with pytest.raises(NotCoisotropic):
        reduce(span(V2, 1, 3))


def test_lag_project_examples():
    D = span(V2, 1, 2, 3)
    assert lag_project(span(V2, 1, 2), D) == span(V2, 1, 2)
    assert lag_project(span(V2, 3, 4), D) == span(V2, 2, 3)
    L = span(V2, 1, 2)
    assert lag_project(L, L) == L
    with pytest.raises(NotLagrangian):
        lag_project(span(V2, 1), D)
    with pytest.raises(NotCoisotropic):
        lag_project(L, span(V2, 1))


def test_lag_reduce_examples():
    D = span(V2, 1, 2, 3)
    r = lag_reduce(span(V2, 1, 2), D)
    assert r.dim == 1 and r.reduction.project(V2.unit(1)) == r.basis[0]
    r = lag_reduce(span(V2, 3, 4), D)
    assert r.dim == 1 and r.reduction.project(V2.unit(3)) == r.basis[0]
    L = span(V2, 1, 2)
    r = lag_reduce(L, L)
    assert r.dim == 0 and r.reduction.dim == 0 and reduced_is_lagrangian(r)


def test_json_roundtrip():
    C = SymplecticSubspace(V2, ((1, Fraction(1, 2), 0, 0),))
    doc = subspace_to_json(C)
    assert doc["basis"] == [["1", "1/2", "0", "0"]]
    assert subspace_from_json(doc) == C


def test_custom_gram():
    g = [[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]
    C = subspace_from_json({"n": 2, "gram": [[str(v) for v in r] for r in g], "basis": [["1", "0", "0", "0"]]})
    assert perp(C) == SymplecticSubspace(C.ambient, ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))


# -- properties on random rational subspaces --------------------------------

seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_perp_involution_and_dimension(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    V = SymplecticSpace.standard(n)
    C = random_subspace(rng, V, rng.randint(0, 2 * n))
    P = perp(C)
    assert C.dim + P.dim == 2 * n
    assert perp(P) == C


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_wedge_criterion_vs_rank_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    V = SymplecticSpace.standard(n)
    m = rng.randint(1, n)
    make = rng.choice([random_subspace, random_sparse_subspace])
    C = make(rng, V, 2 * n - m) if rng.random() < 0.6 else random_coisotropic(rng, V, m)
    coiso = classify(C) in (Classification.COISOTROPIC, Classification.LAGRANGIAN)
    assert coiso == is_coisotropic_oracle(C)
    assert coiso == wedge_power_vanishes(C, n - m + 1)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_wedge_power_vs_rank(seed):
    """Omega^k|_C = 0 exactly when the restricted form has rank < 2k."""
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    V = SymplecticSpace.standard(n)
    C = random_sparse_subspace(rng, V, rng.randint(1, 2 * n))
    k = rng.randint(1, n)
    assert wedge_power_vanishes(C, k) == (gram_rank(C) < 2 * k)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_lagrangian_outputs(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    V = SymplecticSpace.standard(n)
    L = random_lagrangian(rng, V)
    D = random_coisotropic(rng, V, rng.randint(0, n))
    P = lag_project(L, D)
    assert classify(P) is Classification.LAGRANGIAN
    assert D.contains(P)
    assert reduced_is_lagrangian(lag_reduce(L, D))


def test_random_generators_hit_every_class():
    rng = random.Random(3)
    seen = set()
    for _ in range(300):
        n = rng.randint(1, 3)
        V = SymplecticSpace.standard(n)
        seen.add(classify(random_sparse_subspace(rng, V, rng.randint(1, 2 * n))))
    assert seen == set(Classification)
