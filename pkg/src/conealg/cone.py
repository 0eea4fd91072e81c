"""Finitely generated rational polyhedral cones with exact arithmetic.

A cone is stored by primitive integer generators together with derived data:
the saturated lattice of its linear span, facet normals (canonical primitive
lifts inside the span's row space), extremal rays and the lineality space.
All computations happen in coordinates on the span lattice, where the cone is
full dimensional.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .linalg import (
    dot,
    frac_vec,
    hnf_basis,
    identity,
    integer_kernel,
    is_zero_vec,
    lattice_coords,
    mat_mul,
    primitive_vector,
    rational_rank,
    rational_solve,
    saturate_rows,
    transpose,
)


class Cone:
    """Cone generated by finitely many integer vectors."""

    __slots__ = (
        "ambient_dim",
        "generators",
        "span_basis",
        "rank",
        "facet_normals",
        "extremal_rays",
        "lineality_basis",
        "is_pointed",
        "_gens_s",
        "_normals_s",
    )

    def __init__(self, generators, ambient_dim=None):
        gens = []
        for g in generators:
            p = primitive_vector(g)
            if not is_zero_vec(p):
                gens.append(p)
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient dimension required for a trivial cone")
            ambient_dim = len(gens[0])
        for g in gens:
            if len(g) != ambient_dim:
                raise ValueError("generator dimension mismatch")
        self.ambient_dim = ambient_dim
        self.generators = tuple(sorted(set(gens)))
        self.span_basis = tuple(saturate_rows(list(self.generators)))
        d = len(self.span_basis)
        self.rank = d
        self._gens_s = tuple(
            lattice_coords(g, list(self.span_basis)) for g in self.generators
        )
        normals = set()
        if d > 0:
            gs = self._gens_s
            for T in combinations(range(len(gs)), d - 1):
                K = integer_kernel([gs[i] for i in T], n=d)
                if len(K) != 1:
                    continue
                h = K[0]
                pos = any(dot(h, g) > 0 for g in gs)
                neg = any(dot(h, g) < 0 for g in gs)
                if pos and neg:
                    continue
                if neg:
                    h = tuple(-x for x in h)
                normals.add(h)
        pairs = sorted((self._lift_functional(h), h) for h in normals)
        self.facet_normals = tuple(p[0] for p in pairs)
        self._normals_s = tuple(p[1] for p in pairs)
        if d == 0:
            lin_s = []
        elif normals:
            lin_s = integer_kernel(list(self._normals_s), n=d)
        else:
            lin_s = [tuple(r) for r in identity(d)]
        self.lineality_basis = tuple(
            hnf_basis([self._from_span(x) for x in lin_s])
        )
        self.is_pointed = not lin_s
        rays = []
        if self.is_pointed and d > 0:
            for g, gs_ in zip(self.generators, self._gens_s):
                tight = [h for h in self._normals_s if dot(h, gs_) == 0]
                if rational_rank(tight) == d - 1:
                    rays.append(g)
        self.extremal_rays = tuple(sorted(rays))

    @property
    def span_dim(self):
        return self.rank

    @property
    def ambient_rank(self):
        return self.ambient_dim

    # -- coordinate helpers -------------------------------------------------

    def _from_span(self, x):
        """Ambient vector with span coordinates x."""
        S = self.span_basis
        return tuple(
            sum(x[i] * S[i][j] for i in range(len(S)))
            for j in range(self.ambient_dim)
        )

    def span_coords(self, v):
        """Rational span coordinates of v, or None if v is off the span."""
        if self.rank == 0:
            return () if all(Fraction(x) == 0 for x in v) else None
        return rational_solve(transpose(list(self.span_basis)), frac_vec(v))

    def lattice_point_coords(self, v):
        """Integer span-lattice coordinates of an integer vector, or None."""
        if self.rank == 0:
            return () if is_zero_vec(v) else None
        return lattice_coords(v, list(self.span_basis))

    def _lift_functional(self, h):
        # canonical lift: the unique vector a in the row space of span_basis
        # with a . s = h . coords(s) for all s in the span, made primitive
        S = list(self.span_basis)
        G = mat_mul(S, transpose(S))
        c = rational_solve(G, h)
        a = [Fraction(0)] * self.ambient_dim
        for i, ci in enumerate(c):
            for j in range(self.ambient_dim):
                a[j] += ci * S[i][j]
        return primitive_vector(a)

    # -- predicates ---------------------------------------------------------

    def contains(self, point):
        """Classify a rational point: 'outside', 'boundary' or 'interior'.

        Interior means relative interior with respect to the linear span.
        """
        p = frac_vec(point)
        if len(p) != self.ambient_dim:
            raise ValueError("point dimension mismatch")
        if self.rank == 0:
            return "interior" if all(x == 0 for x in p) else "outside"
        x = self.span_coords(p)
        if x is None:
            return "outside"
        vals = [dot(h, x) for h in self._normals_s]
        if any(v < 0 for v in vals):
            return "outside"
        if any(v == 0 for v in vals):
            return "boundary"
        return "interior"

    def __contains__(self, point):
        return self.contains(point) != "outside"

    def contains_cone(self, other):
        return all(g in self for g in other.generators)

    def relint_point(self):
        """An integer point in the relative interior."""
        s = [0] * self.ambient_dim
        for g in self.generators:
            s = [a + b for a, b in zip(s, g)]
        return tuple(s)

    # -- canonical form -----------------------------------------------------

    def canonical_key(self):
        return (self.ambient_dim, self.span_basis, self.facet_normals)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return f"Cone(rank={self.rank}, generators={list(self.generators)})"

    # -- structure ----------------------------------------------------------

    def minimal_generators(self):
        """Extremal rays when pointed, otherwise the stored generators."""
        if self.is_pointed:
            return list(self.extremal_rays)
        return list(self.generators)

    def dual(self):
        """The dual cone {y : y . x >= 0 for all x in the cone}."""
        gens = list(self.facet_normals)
        ann = integer_kernel(list(self.span_basis), n=self.ambient_dim)
        for k in ann:
            gens.append(k)
            gens.append(tuple(-x for x in k))
        return Cone(gens, self.ambient_dim)

    def xi_functional(self):
        """Sum of the primitive facet normals; positive on the cone minus 0.

        Only defined for pointed cones, where it gives a canonical compact
        cross-section {xi = 1}.
        """
        if not self.is_pointed:
            raise ValueError("cone has nontrivial lineality")
        s = [0] * self.ambient_dim
        for h in self.facet_normals:
            s = [a + b for a, b in zip(s, h)]
        return tuple(s)

    def facet_incidences(self):
        """Per facet, the frozenset of generator indices lying on it."""
        return [
            frozenset(i for i, g in enumerate(self._gens_s) if dot(h, g) == 0)
            for h in self._normals_s
        ]

    def face_generator_sets(self):
        """Generator index sets of all faces, from minimal face to the cone."""
        full = frozenset(range(len(self.generators)))
        incidences = self.facet_incidences()
        sets = {full}
        frontier = set(incidences)
        sets |= frontier
        while frontier:
            new = set()
            for f in frontier:
                for inc in incidences:
                    x = f & inc
                    if x not in sets:
                        new.add(x)
            sets |= new
            frontier = new
        return sorted(sets, key=lambda s: (len(s), sorted(s)))

    def face_cone(self, indices):
        return Cone([self.generators[i] for i in indices], self.ambient_dim)


def cut_by_halfspace(cone, a):
    """Intersect a cone with the halfspace {x : a . x >= 0} (one DD step)."""
    keep, pos, neg = [], [], []
    for g in cone.generators:
        v = dot(a, g)
        if v >= 0:
            keep.append(g)
        if v > 0:
            pos.append((v, g))
        elif v < 0:
            neg.append((v, g))
    new = list(keep)
    for vp, gp in pos:
        for vn, gn in neg:
            w = tuple(vp * y - vn * x for x, y in zip(gp, gn))
            if not is_zero_vec(w):
                new.append(primitive_vector(w))
    return Cone(new, cone.ambient_dim)


def intersect_cones(c1, c2):
    """Exact intersection, via successive halfspace cuts of c1 by c2's H-rep."""
    if c1.ambient_dim != c2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    out = c1
    ann = integer_kernel(list(c2.span_basis), n=c2.ambient_dim)
    for k in ann:
        out = cut_by_halfspace(out, k)
        out = cut_by_halfspace(out, tuple(-x for x in k))
        out = Cone(out.minimal_generators(), out.ambient_dim)
    for h in c2.facet_normals:
        out = cut_by_halfspace(out, h)
        out = Cone(out.minimal_generators(), out.ambient_dim)
    return out
