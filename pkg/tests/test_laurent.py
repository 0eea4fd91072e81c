import random
from fractions import Fraction

import pytest

from conealg.laurent import (
    BundleTriple,
    LaurentMatrix,
    LaurentPoly,
    birkhoff_factorize,
    equivalent_triples,
    koszul_diagram_checks,
    koszul_twist,
    polarization_interval,
)

F = Fraction

T = LaurentPoly.variable()
TI = LaurentPoly.variable(-1)
ONE = LaurentPoly.one()
ZERO = LaurentPoly.zero()


def lm(rows):
    return LaurentMatrix.from_rows(rows)


def diag(*polys):
    n = len(polys)
    return lm([[polys[i] if i == j else ZERO for j in range(n)] for i in range(n)])


def random_poly(rng, lo, hi, density=0.6):
    terms = {}
    for e in range(lo, hi + 1):
        if rng.random() < density:
            c = rng.randint(-3, 3)
            if c:
                terms[e] = F(c)
    return LaurentPoly(terms)


def random_invertible(rng, n, spread=4):
    """Product of elementary and unit-diagonal matrices, so det stays a unit."""
    m = LaurentMatrix.identity(n)
    for _ in range(2 * n + 2):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            d = rng.randint(-1, 1)
            c = rng.choice([1, -1, 2])
            m = m @ elementary_unit(n, i, c, d)
        else:
            lo = rng.randint(-spread // 2, 0)
            m = m @ elementary_add(n, i, j, random_poly(rng, lo, lo + spread // 2))
    return m


def elementary_add(n, i, j, p):
    rows = [
        [ONE if a == b else (p if (a, b) == (i, j) else ZERO) for b in range(n)]
        for a in range(n)
    ]
    return lm(rows)


def elementary_unit(n, i, c, d):
    rows = [
        [
            (LaurentPoly({d: F(c)}) if a == i else ONE) if a == b else ZERO
            for b in range(n)
        ]
        for a in range(n)
    ]
    return lm(rows)


def random_poly_side(rng, n, negative):
    """Unimodular matrix over one-sided polynomials."""
    m = LaurentMatrix.identity(n)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        if negative:
            p = random_poly(rng, -2, 0)
        else:
            p = random_poly(rng, 0, 2)
        m = m @ elementary_add(n, i, j, p)
    return m


# ---------------------------------------------------------------------------
# polynomial and matrix arithmetic


def test_poly_arithmetic():
    p = T + ONE
    q = T - ONE
    assert p * q == LaurentPoly({2: F(1), 0: F(-1)})
    assert p + q == LaurentPoly({1: F(2)})
    assert (p - p).is_zero
    assert TI * T == ONE
    assert p.low == 0 and p.high == 1
    assert LaurentPoly({3: F(2)}).is_monomial


def test_matrix_multiplication_and_det():
    a = lm([[T, ONE], [ZERO, TI]])
    assert (a @ LaurentMatrix.identity(2)) == a
    assert a.det() == ONE
    b = diag(T * T, TI)
    assert b.det() == T
    assert not lm([[T, ZERO], [T, ZERO]]).is_invertible()
    assert a.is_invertible()


# ---------------------------------------------------------------------------
# two-sided splitting


def check_factorization(theta):
    sigma, u, tau = birkhoff_factorize(theta)
    n = theta.n
    assert list(u) == sorted(u, reverse=True)
    prod = sigma @ theta @ tau
    assert prod == diag(*[LaurentPoly({u[i]: F(1)}) for i in range(n)])
    # one-sided frames with constant nonzero determinant
    assert sigma.high() <= 0 and sigma.det().is_constant
    assert tau.low() >= 0 and tau.det().is_constant
    d = theta.det()
    assert sum(u) == d.low
    return u


def test_split_diagonal_anchor():
    u = check_factorization(diag(T * T, TI))
    assert tuple(u) == (2, -1)


def test_split_balanced_anchor():
    # det 1 with an off-diagonal unit: both exponents collapse to zero
    u = check_factorization(lm([[T, ONE], [ZERO, TI]]))
    assert tuple(u) == (0, 0)


def test_split_one_sided_elementary():
    u = check_factorization(lm([[ONE, TI], [ZERO, ONE]]))
    assert tuple(u) == (0, 0)


def test_split_rejects_singular():
    with pytest.raises(ValueError, match="not invertible"):
        birkhoff_factorize(lm([[T, T], [ONE, ONE]]))
    with pytest.raises(ValueError, match="not invertible"):
        birkhoff_factorize(lm([[T + ONE, ZERO], [ZERO, ONE]]))


def test_split_random_matrices():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 4)
        theta = random_invertible(rng, n)
        check_factorization(theta)


def test_split_exponents_are_invariant():
    rng = random.Random(11)
    theta = lm([[T, ONE], [ZERO, TI]])
    base = sorted(check_factorization(theta))
    for _ in range(40):
        left = random_poly_side(rng, 2, negative=True)
        right = random_poly_side(rng, 2, negative=False)
        u = check_factorization(left @ theta @ right)
        assert sorted(u) == base


# ---------------------------------------------------------------------------
# polarization intervals


def test_interval_anchors():
    assert polarization_interval(BundleTriple(2, diag(T * T, TI))) == (-1, 2)
    assert polarization_interval(BundleTriple(2, lm([[T, ONE], [ZERO, TI]]))) == (0, 0)
    assert polarization_interval(BundleTriple(2, LaurentMatrix.identity(2))) == (0, 0)


def test_interval_of_direct_sum_is_hull():
    rng = random.Random(3)
    for _ in range(10):
        a = random_invertible(rng, 2)
        b = random_invertible(rng, 2)
        ia = polarization_interval(BundleTriple(2, a))
        ib = polarization_interval(BundleTriple(2, b))
        both = polarization_interval(BundleTriple(4, a.direct_sum(b)))
        assert both == (min(ia[0], ib[0]), max(ia[1], ib[1]))


# ---------------------------------------------------------------------------
# twists


def test_twist_shapes():
    one = BundleTriple(1, LaurentMatrix.identity(1))
    assert koszul_twist(one, "square").theta == diag(T * T)
    assert koszul_twist(one, "double").theta == diag(T, T)
    with pytest.raises(ValueError, match="twist mode"):
        koszul_twist(one, "cube")


def test_twist_diagram_identities():
    triple = BundleTriple(2, lm([[T, ONE], [ZERO, TI]]))
    report = koszul_diagram_checks(triple)
    assert [c["status"] for c in report] == ["pass"] * 4
    assert [c["clause"] for c in report] == [
        "top row composes to zero",
        "bottom row composes to zero",
        "left square commutes",
        "right square commutes",
    ]


# ---------------------------------------------------------------------------
# equivalence of triples


def test_equivalence_of_identical_triples():
    theta = lm([[T, ONE], [ZERO, TI]])
    ok, witness = equivalent_triples(theta, theta)
    assert ok
    left, right = witness
    assert left @ theta @ right == theta


def test_equivalence_up_to_permutation():
    ok, witness = equivalent_triples(diag(T, ONE), diag(ONE, T))
    assert ok
    left, right = witness
    assert left @ diag(T, ONE) @ right == diag(ONE, T)


def test_equivalence_refuted_by_exponents():
    ok, reason = equivalent_triples(diag(T, TI), LaurentMatrix.identity(2))
    assert not ok
    assert "splitting exponents" in reason


def test_equivalence_needs_equal_sizes():
    with pytest.raises(ValueError, match="sizes"):
        equivalent_triples(LaurentMatrix.identity(2), LaurentMatrix.identity(3))
