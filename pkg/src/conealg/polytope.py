"""Rational convex polytopes via homogenization.

A polytope on points v_1..v_k is handled through the pointed cone on the
lifted generators (v_i, 1); vertices, facets and the face lattice all come
from that cone.  Facets are stored as pairs (a, b) meaning a . x >= b, with
(a, -b) jointly primitive.
"""

from __future__ import annotations

from fractions import Fraction

from .cone import Cone
from .linalg import (
    clear_denominators,
    dot,
    frac_vec,
    primitive_vector,
    rational_nullspace,
    rational_rank,
    vec_sub,
)


class Polytope:
    """Convex hull of finitely many rational points."""

    __slots__ = ("ambient_dim", "vertices", "facets", "_hcone", "_faces")

    def __init__(self, points, ambient_dim=None):
        pts = [frac_vec(p) for p in points]
        if ambient_dim is None:
            if not pts:
                raise ValueError("ambient dimension required for an empty polytope")
            ambient_dim = len(pts[0])
        for p in pts:
            if len(p) != ambient_dim:
                raise ValueError("point dimension mismatch")
        self.ambient_dim = ambient_dim
        if not pts:
            self.vertices = ()
            self.facets = ()
            self._hcone = Cone([], ambient_dim + 1)
            self._faces = None
            return
        lifted = [clear_denominators(tuple(p) + (Fraction(1),)) for p in pts]
        hcone = Cone(lifted, ambient_dim + 1)
        self._hcone = hcone
        verts = []
        for r in hcone.extremal_rays:
            t = r[-1]
            assert t > 0
            verts.append(tuple(Fraction(x, t) for x in r[:-1]))
        self.vertices = tuple(sorted(verts))
        facets = []
        for nrm in hcone.facet_normals:
            a, beta = nrm[:-1], nrm[-1]
            b = -beta
            tight = [v for v in self.vertices if dot(a, v) == b]
            if tight:
                facets.append((a, b))
        self.facets = tuple(sorted(facets))
        self._faces = None

    @property
    def dim(self):
        """Dimension of the affine hull (-1 for the empty polytope)."""
        return self._hcone.rank - 1

    def contains(self, point):
        """Classify a point: 'outside', 'boundary' or 'interior' (relative)."""
        p = frac_vec(point)
        lifted = clear_denominators(tuple(p) + (Fraction(1),))
        return self._hcone.contains(lifted)

    def __contains__(self, point):
        return self.contains(point) != "outside"

    def __eq__(self, other):
        return (
            isinstance(other, Polytope)
            and self.ambient_dim == other.ambient_dim
            and self.vertices == other.vertices
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.vertices))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)})"

    def facet_vertex_sets(self):
        """Per facet, the frozenset of vertex indices lying on it."""
        out = []
        for a, b in self.facets:
            out.append(
                frozenset(
                    i for i, v in enumerate(self.vertices) if dot(a, v) == b
                )
            )
        return out

    def face_lattice(self):
        """All nonempty proper and improper faces as (vertex index set, dim),
        sorted by (dim, indices).  The empty face is excluded."""
        if self._faces is not None:
            return self._faces
        n = len(self.vertices)
        full = frozenset(range(n))
        sets = {full}
        frontier = set(self.facet_vertex_sets())
        sets |= frontier
        while frontier:
            new = set()
            for f in frontier:
                for inc in self.facet_vertex_sets():
                    x = f & inc
                    if x and x not in sets:
                        new.add(x)
            sets |= new
            frontier = new
        graded = []
        for s in sets:
            if not s:
                continue
            pts = [self.vertices[i] for i in sorted(s)]
            if len(pts) == 1:
                d = 0
            else:
                d = rational_rank([vec_sub(p, pts[0]) for p in pts[1:]])
            graded.append((s, d))
        graded.sort(key=lambda fd: (fd[1], sorted(fd[0])))
        self._faces = graded
        return graded

    def f_vector(self):
        """Counts of i-dimensional faces for i = 0..dim."""
        counts = [0] * (self.dim + 1)
        for _, d in self.face_lattice():
            counts[d] += 1
        return tuple(counts)

    def visible_facets(self, point):
        """Facets (a, b) whose supporting halfspace excludes the point."""
        p = frac_vec(point)
        return [(a, b) for a, b in self.facets if dot(a, p) < b]

    def relint_point(self):
        """Average of the vertices: a point in the relative interior."""
        k = len(self.vertices)
        if k == 0:
            raise ValueError("empty polytope has no relative interior")
        acc = [Fraction(0)] * self.ambient_dim
        for v in self.vertices:
            for j, x in enumerate(v):
                acc[j] += x
        return tuple(x / k for x in acc)


def cross_section(cone):
    """Canonical compact cross-section of a pointed cone.

    Uses the functional xi = sum of primitive facet normals (equivalently the
    sum of the extremal rays of the dual cone inside span(C)); each extremal
    ray r maps to the vertex r / xi(r).
    """
    xi = cone.xi_functional()
    pts = []
    for g in cone.minimal_generators():
        v = dot(xi, g)
        assert v > 0
        pts.append(tuple(Fraction(x, v) for x in g))
    return Polytope(pts, cone.ambient_dim)


def affine_hyperplane(points):
    """The affine hyperplane through the given points, as (a, b): a . x = b.

    Requires the affine hull to have codimension 1 in the ambient space.
    """
    pts = [frac_vec(p) for p in points]
    if not pts:
        raise ValueError("no points given")
    dirs = [vec_sub(p, pts[0]) for p in pts[1:]]
    n = len(pts[0])
    if not dirs:
        if n != 1:
            raise ValueError("points do not span an affine hyperplane")
        normals = [(Fraction(1),)]
    else:
        normals = rational_nullspace(dirs)
    if len(normals) != 1:
        raise ValueError("points do not span an affine hyperplane")
    a = primitive_vector(normals[0])
    if next((x for x in a if x != 0), 0) < 0:
        a = tuple(-x for x in a)
    return a, dot(a, pts[0])


def polar_project(x, pole, target):
    """Project x from the pole onto the target affine hyperplane (a, b).

    Returns the unique intersection of the line through pole and x with the
    hyperplane {p : a . p = b}.
    """
    a, b = target
    z = frac_vec(pole)
    p = frac_vec(x)
    direction = vec_sub(p, z)
    denom = dot(a, direction)
    if denom == 0:
        raise ValueError("line parallel to target hyperplane")
    t = Fraction(b - dot(a, z), 1) / denom
    return tuple(zi + t * di for zi, di in zip(z, direction))
