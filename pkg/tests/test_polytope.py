from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conealg.cone import Cone
from conealg.polytope import (
    Polytope,
    affine_hyperplane,
    cross_section,
    polar_project,
)

F = Fraction


def test_cross_section_quadrant():
    P = cross_section(Cone([(1, 0), (0, 1)]))
    assert P.vertices == ((F(0), F(1)), (F(1), F(0)))
    assert P.dim == 1


def test_cross_section_square_cone():
    C = Cone([(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    P = cross_section(C)
    assert len(P.vertices) == len(C.extremal_rays) == 4
    assert P.dim == 2


def test_cross_section_simplicial():
    P = cross_section(Cone([(2, 0), (1, 1)]))
    assert P.vertices == ((F(1), F(0)), (F(1), F(1)))


def test_cross_section_requires_pointed():
    C = Cone([(1, 0), (-1, 0), (0, 1)])
    with pytest.raises(ValueError):
        cross_section(C)


def test_vertices_are_extreme_points():
    P = Polytope([(0, 0), (2, 0), (0, 2), (1, 1), (2, 2)])
    assert P.vertices == ((F(0), F(0)), (F(0), F(2)), (F(2), F(0)), (F(2), F(2)))


def test_face_counts():
    tri = Polytope([(0, 0), (1, 0), (0, 1)])
    assert tri.f_vector() == (3, 3, 1)
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sq.f_vector() == (4, 4, 1)
    octa = Polytope(
        [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    )
    assert octa.f_vector() == (6, 12, 8, 1)


def euler(P):
    fv = P.f_vector()
    return sum((-1) ** i * fv[i] for i in range(P.dim))


def test_euler_characteristic():
    for P in (
        Polytope([(0, 0), (1, 0), (0, 1)]),
        Polytope([(0, 0), (3, 0), (0, 3), (3, 3)]),
        Polytope([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]),
        Polytope([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    ):
        assert euler(P) == 1 - (-1) ** P.dim


def test_contains():
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sq.contains((F(1, 2), F(1, 2))) == "interior"
    assert sq.contains((0, F(1, 2))) == "boundary"
    assert sq.contains((2, 0)) == "outside"
    seg = Polytope([(0, 0), (2, 0)])
    assert seg.contains((1, 0)) == "interior"
    assert seg.contains((2, 0)) == "boundary"
    assert seg.contains((1, 1)) == "outside"


def test_visible_facets():
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    vis = sq.visible_facets((2, F(1, 2)))
    assert vis == [((-1, 0), -1)]
    assert sq.visible_facets((F(1, 2), F(1, 2))) == []


def test_polar_project_examples():
    target = ((0, 1), 0)
    assert polar_project((0, 1), (0, 2), target) == (F(0), F(0))
    assert polar_project((1, 1), (0, 2), target) == (F(2), F(0))
    with pytest.raises(ValueError):
        polar_project((1, 2), (0, 2), target)


def test_polar_project_idempotent_on_target():
    target = affine_hyperplane([(0, 0), (1, 0)])
    assert target == ((0, 1), 0)
    for x in [(F(1, 3), 0), (5, 0), (-2, 0)]:
        assert polar_project(x, (0, 2), target) == (F(x[0]), F(0))


def test_affine_hyperplane_errors():
    with pytest.raises(ValueError):
        affine_hyperplane([(0, 0, 0), (1, 0, 0)])  # codim 2 in 3-space
    with pytest.raises(ValueError):
        affine_hyperplane([(0, 0), (1, 0), (0, 1)])  # full dimensional


def pts_strategy(dim, max_pts=7):
    coord = st.integers(-4, 4)
    vec = st.tuples(*[coord for _ in range(dim)])
    return st.lists(vec, min_size=1, max_size=max_pts)


@given(pts_strategy(2))
@settings(max_examples=60, deadline=None)
def test_hull_invariants_2d(pts):
    P = Polytope(pts)
    for v in P.vertices:
        assert tuple(int(x) for x in v) in [tuple(p) for p in pts]
    for p in pts:
        assert p in P
    assert Polytope(P.vertices).vertices == P.vertices
    if P.dim >= 1:
        assert euler(P) == 1 - (-1) ** P.dim


@given(pts_strategy(3, max_pts=6))
@settings(max_examples=40, deadline=None)
def test_hull_invariants_3d(pts):
    P = Polytope(pts)
    for p in pts:
        assert p in P
    assert len(P.facets) == len(P.facet_vertex_sets())
    for a, b in P.facets:
        assert all(
            sum(ai * xi for ai, xi in zip(a, v)) >= b for v in P.vertices
        )
