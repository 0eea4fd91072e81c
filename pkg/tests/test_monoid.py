import itertools
import random
from fractions import Fraction

import pytest

from conealg.cone import Cone, intersect_cones
from conealg.linalg import det_int, dot, hnf_basis, in_lattice, vec_add, vec_sub
from conealg.monoid import (
    AffineMonoid,
    embed_in_free,
    free_basis_in_region,
    hilbert_basis,
    in_interior_submonoid,
    interior_ideal,
    interior_submonoid,
    invert_extremal,
    is_normal,
    is_seminormal,
    normal_monoid,
    normalization,
    region_submonoid,
    seminormalization,
    _sn_step_generators,
)
from conealg.polytope import Polytope, cross_section

from oracles import hilbert_oracle, sn_face_oracle

F = Fraction


def monoid(*gens):
    return AffineMonoid(list(gens))


# -- Hilbert bases -----------------------------------------------------------


def test_hilbert_free():
    assert hilbert_basis(Cone([(1, 0), (0, 1)])) == [(0, 1), (1, 0)]


def test_hilbert_width_three():
    got = hilbert_basis(Cone([(1, 0), (1, 3)]))
    assert got == [(1, 0), (1, 1), (1, 2), (1, 3)]


def test_hilbert_square_cone():
    got = hilbert_basis(Cone([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]))
    assert got == [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]


def test_hilbert_sublattice_even_sum():
    got = hilbert_basis(Cone([(1, 0), (0, 1)]), [(1, 1), (1, -1)])
    assert got == [(0, 2), (1, 1), (2, 0)]


def test_hilbert_nonpointed_rejected():
    with pytest.raises(ValueError, match="not unique"):
        hilbert_basis(Cone([(1, 0), (-1, 0), (0, 1)]))


def test_hilbert_generates():
    C = Cone([(2, 1), (1, 3)])
    hb = hilbert_basis(C)
    M = AffineMonoid(hb)
    for x in itertools.product(range(0, 7), repeat=2):
        inside = C.contains(x) != "outside"
        assert (x in M) == inside


def test_hilbert_matches_oracle_small_random():
    rng = random.Random(7)
    done = 0
    while done < 30:
        d = rng.choice([2, 3])
        gens = [
            tuple(rng.randint(-6, 6) for _ in range(d))
            for _ in range(rng.randint(d, d + 2))
        ]
        try:
            C = Cone(gens, d)
        except ValueError:
            continue
        if C.rank != d or not C.is_pointed:
            continue
        assert hilbert_basis(C) == hilbert_oracle(C)
        done += 1


# -- membership and gp -------------------------------------------------------


def test_numerical_membership():
    M = monoid((2,), (3,))
    assert (0,) in M and (2,) in M and (5,) in M and (7,) in M
    assert (1,) not in M
    assert M.in_gp((1,))


def test_axis_parity_membership():
    M = monoid((2, 0), (0, 1), (1, 1))
    assert (2, 0) in M and (1, 1) in M and (3, 1) in M
    assert (1, 0) not in M and (3, 0) not in M
    assert (5, 0) not in M and (4, 0) in M


def test_gp_of_even_sum():
    M = monoid((2, 0), (1, 1), (0, 2))
    assert M.in_gp((1, 1)) and M.in_gp((2, 0))
    assert not M.in_gp((1, 0))


def test_fractional_point_not_member():
    M = monoid((1, 0), (0, 1))
    assert (F(1, 2), F(1, 2)) not in M


# -- normalization -----------------------------------------------------------


def test_normalization_two_three():
    M = monoid((2,), (3,))
    assert not is_normal(M)
    n = normalization(M)
    assert n.minimal_generators() == ((1,),)
    assert is_normal(n)


def test_even_sum_is_normal():
    assert is_normal(monoid((2, 0), (1, 1), (0, 2)))


def test_free_is_normal():
    assert is_normal(monoid((1, 0), (0, 1)))


def test_normalization_idempotent_extensive():
    rng = random.Random(3)
    for _ in range(10):
        d = rng.choice([2, 3])
        gens = [tuple(rng.randint(0, 4) for _ in range(d)) for _ in range(3)]
        try:
            M = AffineMonoid(gens, d)
        except ValueError:
            continue
        if not M.is_pointed:
            continue
        n = normalization(M)
        assert all(g in n for g in M.generators)
        assert normalization(n).equals(n)


# -- seminormalization -------------------------------------------------------


def test_sn_two_three():
    M = monoid((2,), (3,))
    assert not is_seminormal(M)
    s = seminormalization(M)
    assert s.equals(monoid((1,)))


def test_sn_three_four_five_two_steps():
    M = monoid((3,), (4,), (5,))
    step1 = AffineMonoid(_sn_step_generators(M))
    assert step1.equals(monoid((2,), (3,)))
    assert not is_seminormal(step1)
    step2 = AffineMonoid(_sn_step_generators(step1))
    assert step2.equals(monoid((1,)))
    assert seminormalization(M).equals(monoid((1,)))


def test_axis_parity_seminormal_not_normal():
    M = monoid((2, 0), (0, 1), (1, 1))
    assert is_seminormal(M)
    assert not is_normal(M)


def test_sn_matches_face_oracle():
    rng = random.Random(11)
    done = 0
    while done < 12:
        d = rng.choice([1, 2])
        gens = [
            tuple(rng.randint(0, 4) for _ in range(d))
            for _ in range(rng.randint(2, 4))
        ]
        try:
            M = AffineMonoid(gens, d)
        except ValueError:
            continue
        if not M.is_pointed or M.rank == 0:
            continue
        s = seminormalization(M)
        for x in itertools.product(range(0, 9), repeat=d):
            assert (x in s) == sn_face_oracle(M, x), (gens, x)
        done += 1


def test_sn_idempotent_extensive():
    for gens in [[(2,), (7,)], [(2, 0), (1, 2)], [(3, 1), (1, 3), (1, 1)]]:
        M = AffineMonoid(gens)
        s = seminormalization(M)
        assert all(g in s for g in M.generators)
        assert seminormalization(s).equals(s)
        assert is_seminormal(s)


# -- interior submonoid and ideal -------------------------------------------


def test_interior_free_plane():
    M = monoid((1, 0), (0, 1))
    I = interior_submonoid(M)
    assert I.minimal_generators() == ((1, 1), (1, 2), (2, 1))
    assert in_interior_submonoid(M, (1, 1))
    assert in_interior_submonoid(M, (3, 1))
    assert not in_interior_submonoid(M, (1, 0))
    assert in_interior_submonoid(M, (0, 0))


def test_interior_line():
    M = monoid((1,))
    I = interior_submonoid(M)
    assert I.equals(M)


def test_interior_even_sum():
    M = monoid((2, 0), (1, 1), (0, 2))
    I = interior_submonoid(M)
    assert (1, 1) in I.generators
    assert min(I.generators) == (1, 1)
    assert in_interior_submonoid(M, (1, 1))
    assert not in_interior_submonoid(M, (2, 0))


def test_interior_ideal_property():
    for gens in [[(1, 0), (0, 1)], [(2, 0), (1, 1), (0, 2)], [(2, 1), (1, 2)]]:
        M = AffineMonoid(gens)
        ideal = interior_ideal(M)
        elems = ideal.minimal_elements_in_box(4)
        assert elems
        for x in elems:
            for g in M.generators:
                assert vec_add(x, g) in ideal


# -- region submonoids -------------------------------------------------------


def test_region_full_cross_section():
    M = monoid((1, 0), (0, 1))
    W = cross_section(M.cone)
    R = region_submonoid(M, W)
    assert R.equals(M)


def test_region_midpoint_ray():
    M = monoid((1, 0), (0, 1))
    W = Polytope([(F(1, 2), F(1, 2))])
    R = region_submonoid(M, W)
    assert R.minimal_generators() == ((1, 1),)


def test_region_half_segment():
    M = monoid((1, 0), (0, 1))
    W = Polytope([(F(1), F(0)), (F(1, 2), F(1, 2))])
    R = region_submonoid(M, W)
    expect = normal_monoid(Cone([(1, 0), (1, 1)]))
    assert R.equals(expect)
    for a, b in itertools.product(range(0, 5), repeat=2):
        assert ((a, b) in R) == (a >= b)


def test_region_outside_error():
    M = monoid((1, 0), (0, 1))
    W = Polytope([(F(2), F(-1))])
    with pytest.raises(ValueError, match="not inside"):
        region_submonoid(M, W)


def test_region_routes_agree():
    C = Cone([(2, 1), (1, 2)])
    Mn = normal_monoid(C)
    Mg = AffineMonoid(Mn.generators)  # same monoid, no normality shortcut
    W = Polytope([(F(2, 3), F(1, 3)), (F(1, 2), F(1, 2))])
    assert region_submonoid(Mn, W).equals(region_submonoid(Mg, W))


def test_region_gp_preserved_for_full_dim_region():
    M = monoid((2, 0), (1, 1), (0, 2))
    W = Polytope([(F(3, 4), F(1, 4)), (F(1, 4), F(3, 4))])
    R = region_submonoid(M, W)
    assert hnf_basis(list(R.generators)) == hnf_basis(list(M.generators))


# -- extremal inversion ------------------------------------------------------


def test_invert_free_plane():
    M = normal_monoid(Cone([(1, 0), (0, 1)]))
    inv = invert_extremal(M, (1, 0))
    N = inv.monoid
    assert N.rank == 1 and N.is_pointed
    assert N.minimal_generators() == ((1,),)


def test_invert_segre():
    M = normal_monoid(Cone([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]))
    inv = invert_extremal(M, (0, 0, 1))
    N = inv.monoid
    assert N.rank == 2 and N.is_pointed
    assert len(hilbert_basis(N.cone, list(N.gp_basis))) == 2


def test_invert_width_three():
    M = normal_monoid(Cone([(1, 0), (1, 3)]))
    inv = invert_extremal(M, (1, 0))
    N = inv.monoid
    assert N.rank == 1 and N.is_pointed


def test_invert_rejects_non_extremal():
    M = normal_monoid(Cone([(1, 0), (0, 1)]))
    with pytest.raises(ValueError, match="extremal"):
        invert_extremal(M, (1, 1))


def test_invert_rejects_non_minimal():
    M = normal_monoid(Cone([(1, 0), (0, 1)]))
    with pytest.raises(ValueError, match="minimal edge generator"):
        invert_extremal(M, (2, 0))


def _in_localized(M, t, x, j_cap=60):
    for j in range(j_cap):
        if vec_add(x, tuple(j * c for c in t)) in M:
            return True
    return False


def test_invert_recombines():
    cones = [
        Cone([(1, 0), (1, 3)]),
        Cone([(1, 0), (0, 1)]),
        Cone([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]),
    ]
    rng = random.Random(5)
    for C in cones:
        M = normal_monoid(C)
        t = M.cone.extremal_rays[0]
        inv = invert_extremal(M, t)
        N = inv.monoid
        d = M.ambient_dim
        for _ in range(40):
            x = tuple(rng.randint(-4, 6) for _ in range(d))
            via_n = M.in_gp(x) and tuple(
                int(dot(r, x)) for r in inv.projection
            ) in N
            assert _in_localized(M, t, x) == via_n, (C.generators, t, x)


def test_invert_splitting_reconstructs():
    M = normal_monoid(Cone([(1, 0), (1, 3)]))
    t = (1, 0)
    inv = invert_extremal(M, t)
    for x in [(2, 3), (0, 3), (5, 1), (-1, 2)]:
        pi = [int(dot(r, x)) for r in inv.projection]
        rebuilt = [0, 0]
        for c, s in zip(pi, inv.section):
            rebuilt = [rebuilt[i] + c * s[i] for i in range(2)]
        diff = vec_sub(x, tuple(rebuilt))
        # the residue lies on the inverted edge
        assert diff[1] == 0


# -- free bases in regions ---------------------------------------------------


def test_free_basis_full_region():
    M = normal_monoid(Cone([(1, 0), (0, 1)]))
    W = cross_section(M.cone)
    basis = free_basis_in_region(M, W)
    assert len(basis) == 2
    assert abs(det_int([list(b) for b in basis])) == 1
    assert all(b in M for b in basis)


def test_free_basis_neighborhood_of_midpoint():
    M = normal_monoid(Cone([(1, 0), (0, 1)]))
    W = Polytope([(F(9, 20), F(11, 20)), (F(11, 20), F(9, 20))])
    basis = free_basis_in_region(M, W)
    assert basis[0] == (1, 1)
    b = basis[1]
    assert abs(b[0] - b[1]) == 1 and min(b) >= 1
    for v in basis:
        s = v[0] + v[1]
        r = (F(v[0], s), F(v[1], s))
        assert W.contains(r) != "outside"


def test_free_basis_even_sum():
    M = AffineMonoid(hilbert_basis(Cone([(1, 0), (0, 1)]), [(1, 1), (1, -1)]),
                     assume_normal=True)
    W = cross_section(M.cone)
    basis = free_basis_in_region(M, W)
    coords = [list(c) for c in
              ([*map(lambda b: _coords(M, b), basis)])]
    assert abs(det_int(coords)) == 1
    assert all(b in M for b in basis)


def _coords(M, v):
    from conealg.linalg import lattice_coords

    return lattice_coords(v, list(M.gp_basis))


# -- free embeddings ---------------------------------------------------------


def test_embed_free_plane_identity():
    M = monoid((1, 0), (0, 1))
    rows, grading = embed_in_free(M)
    assert [tuple(map(int, r)) for r in rows] == [(1, 0), (0, 1)]
    assert tuple(map(int, grading)) == (1, 1)


def test_embed_numerical():
    M = monoid((2,), (3,))
    rows, grading = embed_in_free(M)
    assert len(rows) == 1
    assert [int(v) for v in rows[0]] == [1]
    assert int(grading[0]) == 1


def test_embed_even_sum():
    M = monoid((2, 0), (1, 1), (0, 2))
    rows, grading = embed_in_free(M)
    assert len(rows) == 2
    images = []
    for g in M.generators:
        img = tuple(int(dot(r, g)) for r in rows)
        assert all(v >= 0 for v in img)
        assert sum(img) > 0
        images.append(img)
    # embedding is injective on gp and hits a full-rank sublattice with
    # determinant 1 relative to the image of gp
    gp_imgs = [tuple(int(dot(r, b)) for r in rows) for b in M.gp_basis]
    assert abs(det_int([list(v) for v in gp_imgs])) == 1
    for g in M.generators:
        assert int(dot(grading, g)) > 0


def test_embed_random_monoids():
    rng = random.Random(13)
    done = 0
    while done < 10:
        d = rng.choice([2, 3])
        gens = [tuple(rng.randint(0, 3) for _ in range(d)) for _ in range(3)]
        try:
            M = AffineMonoid(gens, d)
        except ValueError:
            continue
        if not M.is_pointed or M.rank < 1:
            continue
        rows, grading = embed_in_free(M)
        assert len(rows) == M.rank
        for g in M.generators:
            img = [Fraction(dot(r, g)) for r in rows]
            assert all(v.denominator == 1 and v >= 0 for v in img)
            assert sum(img) > 0
        done += 1


# -- interaction: intersect cones keeps monoid structures coherent -----------


def test_normal_monoid_of_intersection():
    A = Cone([(1, 0), (1, 2)])
    B = Cone([(2, 1), (0, 1)])
    C = intersect_cones(A, B)
    M = normal_monoid(C)
    for x in itertools.product(range(0, 6), repeat=2):
        expected = A.contains(x) != "outside" and B.contains(x) != "outside"
        assert (x in M) == expected
