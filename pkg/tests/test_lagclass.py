import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hkflop.errors import AllNull, DegenerateProjection, InconsistentTable, InputError, MissingClass, NotMinusTwo
from hkflop.lagclass import (
    CENTER,
    GramLattice,
    LagrangianClassTable,
    MukaiCenterData,
    MukaiPairings,
    bb_fujiki_fit,
    center_square,
    clean_intersection_euler,
    euler_from_class,
    ext_euler,
    k3_reflection,
    mukai_from_table,
    mukai_pluecker_check,
    normalized_transform,
    original_product,
    picard_lefschetz,
    pluecker_type_check,
    random_mukai,
    random_table,
    transform_preserves_product,
    transformed_product,
)

# n = 1 table with a = 1, s = -2, b = -1, s' = -2
K3_TABLE = LagrangianClassTable(1, ("C",), ((-2,),), (1,), (-1,), ((-2,),))


# -- Euler bookkeeping --------------------------------------------------------

def test_euler_examples():
    assert euler_from_class(1, -2) == 2
    assert euler_from_class(2, 3) == 3
    assert euler_from_class(2, 0) == 0
    assert [euler_from_class(n, center_square(n)) for n in range(1, 7)] == list(range(2, 8))


def test_ext_and_clean_intersection():
    assert ext_euler(2, 5) == 5 and ext_euler(3, 5) == -5 and ext_euler(4, 0) == 0
    assert clean_intersection_euler(0, 1) == 1
    assert clean_intersection_euler(1, 2) == -2
    for d in range(1, 7):
        genus = (d - 1) * (d - 2) // 2
        assert clean_intersection_euler(1, 2 - 2 * genus) == d * d - 3 * d


# -- tables -------------------------------------------------------------------

def test_pluecker_type_examples():
    assert pluecker_type_check(K3_TABLE, "C", "C") == (Fraction(-3, 2), Fraction(-3, 2))
    t = LagrangianClassTable(2, ("A", "B"), ((1, 4), (4, 0)), (0, 0), (0, 0), ((1, 4), (4, 0)))
    assert pluecker_type_check(t, "A", "B") == (4, 4)
    with pytest.raises(MissingClass):
        pluecker_type_check(t, "A", "Z")


def test_inconsistent_tables_rejected():
    with pytest.raises(InconsistentTable):
        LagrangianClassTable(1, ("C",), ((-2,),), (1,), (0,), ((-2,),))
    with pytest.raises(InconsistentTable):
        LagrangianClassTable(2, ("A", "B"), ((0, 1), (2, 0)), (0, 0), (0, 0), ((0, 1), (2, 0)))
    with pytest.raises(InputError):
        LagrangianClassTable(2, ("P",), ((0,),), (0,), (0,), ((0,),))


def test_json_roundtrip():
    t = random_table(random.Random(1), 3, 4)
    assert LagrangianClassTable.from_json(t.to_json()) == t
    with pytest.raises(InputError):
        LagrangianClassTable.from_json({"n": 1})


# -- normalized transform ------------------------------------------------------

def test_transform_of_center():
    for n in range(1, 5):
        t = LagrangianClassTable(n, (), (), (), (), ())
        LP = normalized_transform(t, CENTER)
        assert transformed_product(t, LP, LP) == center_square(n)


def test_k3_display_recovered_with_b_minus_a():
    L = normalized_transform(K3_TABLE, "C")
    assert L.to_text() == "C^v" and L.integral


def test_nonintegral_coefficient_flagged():
    # n = 2: coefficient (a - b)/3
    rng = random.Random(0)
    for _ in range(200):
        t = random_table(rng, 2, 1)
        L = normalized_transform(t, "C1")
        assert L.integral == ((t.a[0] - t.b[0]) % 3 == 0)


def test_transform_pairs_with_center():
    rng = random.Random(3)
    for _ in range(100):
        t = random_table(rng, rng.randint(1, 4), 3)
        LP = normalized_transform(t, CENTER)
        for lab in t.labels:
            assert transformed_product(t, normalized_transform(t, lab), LP) == original_product(t, lab, CENTER)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_preservation_symbolic(n):
    """Expand L(C1).L(C2) - C1.C2 with s eliminated through the relation: identically zero."""
    a1, a2, b1, b2, sd = sympy.symbols("a1 a2 b1 b2 sd")
    N = n + 1
    d = (-1) ** (n + 1) * N
    q = (-1) ** n * N
    s = sd + (b1 * b2 - a1 * a2) / d
    nu1 = (a1 + (-1) ** (n + 1) * b1) / N
    nu2 = (a2 + (-1) ** (n + 1) * b2) / N
    prod = sd + nu2 * b1 + nu1 * b2 + nu1 * nu2 * q
    assert sympy.simplify(prod - s) == 0


@st.composite
def tables(draw):
    """Consistent tables built by solving the relation for s where it is integral."""
    n = draw(st.integers(1, 4))
    k = draw(st.integers(1, 4))
    N = n + 1
    ints = st.integers(-20, 20)
    a = draw(st.lists(ints, min_size=k, max_size=k))
    r = draw(st.lists(st.integers(-2, 2), min_size=k, max_size=k))
    eps = draw(st.sampled_from((1, -1)))
    b = [eps * x + N * y for x, y in zip(a, r)]
    sd = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            sd[i][j] = sd[j][i] = draw(ints)
    s = [[Fraction(sd[i][j]) + Fraction(b[i] * b[j] - a[i] * a[j], (-1) ** (n + 1) * N) for j in range(k)]
         for i in range(k)]
    assert all(v.denominator == 1 for row in s for v in row)
    return LagrangianClassTable(n, tuple(f"C{i}" for i in range(k)), tuple(tuple(int(v) for v in row) for row in s),
                                tuple(a), tuple(b), tuple(map(tuple, sd)))


@settings(max_examples=1000, deadline=None)
@given(tables())
def test_transform_preserves_product_random(t):
    assert transform_preserves_product(t)
    for u in t.labels:
        for v in t.labels:
            lhs, rhs = pluecker_type_check(t, u, v)
            assert lhs == rhs


def test_k3_table_preserves():
    assert transform_preserves_product(K3_TABLE)


# -- K3 reflections -----------------------------------------------------------

U_PLUS_A1 = GramLattice(((0, 1, 0), (1, 0, 0), (0, 0, -2)))
P = (0, 0, 1)


def test_reflection_examples():
    C = (1, 0, 0)
    assert k3_reflection(U_PLUS_A1, P, C) == C
    assert k3_reflection(U_PLUS_A1, P, P) == (0, 0, 3)
    assert U_PLUS_A1.pair((0, 0, 3), (0, 0, 3)) == -18  # not an isometry as displayed
    C = (1, 1, -1)  # C.P = 2
    D = (1, 0, 1)  # D.P = -2, D.D = -2
    assert U_PLUS_A1.pair(D, P) == -2
    v = (0, 1, 0)
    w = (1, 3, 0)
    for x in (C, D, v, w):
        r = k3_reflection(U_PLUS_A1, P, x)
        cp = U_PLUS_A1.pair(x, P)
        assert U_PLUS_A1.pair(r, r) == U_PLUS_A1.pair(x, x) - 4 * cp * cp


def test_not_minus_two():
    with pytest.raises(NotMinusTwo):
        k3_reflection(U_PLUS_A1, (1, 0, 0), (1, 0, 0))
    with pytest.raises(NotMinusTwo):
        picard_lefschetz(U_PLUS_A1, (1, 1, 0), (1, 0, 0))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
       st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_picard_lefschetz_is_involutive_isometry(x, y):
    L = U_PLUS_A1
    rx, ry = picard_lefschetz(L, P, x), picard_lefschetz(L, P, y)
    assert L.pair(rx, ry) == L.pair(x, y)
    assert picard_lefschetz(L, P, rx) == tuple(x)
    assert picard_lefschetz(L, P, P) == (0, 0, -1)
    if L.pair(x, P) == 0:
        assert rx == tuple(x) == k3_reflection(L, P, x)


# -- Mukai modifications ------------------------------------------------------

def test_mukai_specializes_to_flop_table():
    rng = random.Random(5)
    for _ in range(200):
        t = random_table(rng, rng.randint(1, 4), 2)
        rep = mukai_pluecker_check(*mukai_from_table(t, "C1", "C2"))
        assert (rep.lhs, rep.rhs) == pluecker_type_check(t, "C1", "C2")
        # C^proj.C^proj = P.P = (-1)^n (n+1) turns both corrections into the table ones
        assert rep.lhs == t.s[0][1] - Fraction(t.a[0] * t.a[1], t.center_square)
        assert rep.preserves_product


def test_mukai_vanishing_corrections():
    d = MukaiCenterData(2, 0, 5, 0, 5)
    rep = mukai_pluecker_check(d, d, MukaiPairings(7, 0, 0, 5, 7, 0, 0, 5))
    assert (rep.lhs, rep.rhs) == (7, 7)


def test_mukai_random_consistent():
    rng = random.Random(9)
    for _ in range(500):
        rep = mukai_pluecker_check(*random_mukai(rng))
        assert rep.pluecker_ok and rep.preserves_product


def test_mukai_errors():
    with pytest.raises(DegenerateProjection):
        MukaiCenterData(1, 1, 0, 1, 0)
    with pytest.raises(InconsistentTable):
        MukaiCenterData(1, 1, 2, 1, 3)


# -- Fujiki constants ---------------------------------------------------------

def test_fujiki_examples():
    L = GramLattice(((0, 1, 0), (1, 0, 0), (0, 0, -2)))
    phis = [(1, 1, 0), (1, 2, 1), (0, 0, 1), (3, -1, 2)]
    fit = bb_fujiki_fit(L, [(phi, L.pair(phi, phi)) for phi in phis], 1)
    assert fit.c == 1 and fit.max_defect == 0
    fit = bb_fujiki_fit(L, [(phi, 3 * L.pair(phi, phi) ** 2) for phi in phis], 2)
    assert fit.c == 3 and fit.max_defect == 0
    one = GramLattice(((1,),))
    fit = bb_fujiki_fit(one, [((1,), 2), ((1,), 4)], 1)
    assert fit.c == 3 and fit.max_defect == 1


def test_fujiki_errors():
    L = GramLattice(((0, 1), (1, 0)))
    with pytest.raises(AllNull):
        bb_fujiki_fit(L, [((1, 0), 0), ((0, 1), 0)], 1)
    with pytest.raises(InputError):
        bb_fujiki_fit(L, [], 1)
