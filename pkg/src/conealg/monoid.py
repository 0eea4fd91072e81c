"""Finitely generated affine monoids over integer lattices.

Monoids are given by integer generators; derived data are the difference
group gp(M) (an HNF lattice basis), the cone C(M) and, on demand, the
Hilbert basis of the normalization.  Membership is exact: a memoized
descent over generators, with a fast path once a monoid is known normal.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from fractions import Fraction

from .cone import Cone, cut_by_halfspace, intersect_cones
from .linalg import (
    det_int,
    dot,
    frac_vec,
    gcd_list,
    hnf_basis,
    identity,
    in_lattice,
    int_matrix_inverse,
    integer_kernel,
    is_zero_vec,
    lattice_coords,
    mat_vec,
    primitive_vector,
    rational_rank,
    rational_solve,
    snf,
    transpose,
    unimodular_completion,
    vec_add,
    vec_scale,
    vec_sub,
)
from .polytope import cross_section

sys.setrecursionlimit(20000)


class AffineMonoid:
    """Submonoid of Z^r generated by finitely many integer vectors."""

    def __init__(self, generators, ambient_dim=None, assume_normal=False):
        gens = []
        for g in generators:
            v = tuple(int(x) for x in g)
            if not is_zero_vec(v):
                gens.append(v)
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient dimension required for the trivial monoid")
            ambient_dim = len(gens[0])
        for g in gens:
            if len(g) != ambient_dim:
                raise ValueError("generator dimension mismatch")
        self.ambient_dim = ambient_dim
        self.generators = tuple(sorted(set(gens)))
        self.gp_basis = tuple(hnf_basis(list(self.generators)))
        self.cone = Cone(self.generators, ambient_dim)
        self.rank = len(self.gp_basis)
        self._hilbert = None
        self._normal = True if assume_normal else None
        self._memo = {}
        self._xi = None
        self._min_gens = None
        self._desc_gens = None

    @property
    def ambient_rank(self):
        return self.ambient_dim

    def __repr__(self):
        return f"AffineMonoid(rank={self.rank}, generators={list(self.generators)})"

    @property
    def is_pointed(self):
        """True iff U(M) = 0, equivalently C(M) pointed."""
        return self.cone.is_pointed

    def in_gp(self, v):
        return in_lattice(v, list(self.gp_basis))

    def _xi_vec(self):
        if self._xi is None:
            self._xi = self.cone.xi_functional()
        return self._xi

    def __contains__(self, x):
        x = tuple(x)
        if any(Fraction(v).denominator != 1 for v in x):
            return False
        x = tuple(int(v) for v in x)
        if len(x) != self.ambient_dim:
            raise ValueError("point dimension mismatch")
        if is_zero_vec(x):
            return True
        if not self.in_gp(x):
            return False
        if self.cone.contains(x) == "outside":
            return False
        if self._normal:
            return True
        if not self.is_pointed:
            raise ValueError("membership requires trivial units")
        return self._member_descent(x)

    def _member_descent(self, x):
        # terminates: the grading xi strictly decreases at each subtraction
        memo = self._memo
        cached = memo.get(x)
        if cached is not None:
            return cached
        if self._desc_gens is None:
            xi = self._xi_vec()
            self._desc_gens = sorted(self.generators, key=lambda g: -dot(xi, g))
        res = False
        for g in self._desc_gens:
            nxt = vec_sub(x, g)
            if is_zero_vec(nxt):
                res = True
                break
            if self.cone.contains(nxt) == "outside":
                continue
            if self._member_descent(nxt):
                res = True
                break
        memo[x] = res
        return res

    def minimal_generators(self):
        """Irreducible elements among the generators (requires U(M)=0).

        For a pointed affine monoid this is the unique minimal generating
        set, provided the stored generators generate.
        """
        if self._min_gens is not None:
            return self._min_gens
        if not self.is_pointed:
            raise ValueError("minimal generators require trivial units")
        out = []
        for g in self.generators:
            reducible = False
            for h in self.generators:
                d = vec_sub(g, h)
                if is_zero_vec(d) or self.cone.contains(d) == "outside":
                    continue
                if d in self:
                    reducible = True
                    break
            if not reducible:
                out.append(g)
        self._min_gens = tuple(sorted(out))
        return self._min_gens

    def equals(self, other):
        """Same submonoid of the same ambient lattice."""
        if self.ambient_dim != other.ambient_dim:
            return False
        return all(g in other for g in self.generators) and all(
            g in self for g in other.generators
        )


# ---------------------------------------------------------------------------
# Hilbert bases


def _pulling_triangulation(cone):
    """Simplices (tuples of extremal rays) of the pulling triangulation."""
    rays = list(cone.extremal_rays)
    d = cone.rank
    if d == 0:
        return []
    if len(rays) == d:
        return [tuple(rays)]
    v0 = rays[0]  # lex-least extremal ray
    out = []
    for inc in cone.facet_incidences():
        facet_rays = sorted(
            g for i, g in enumerate(cone.generators) if i in inc and g in set(rays)
        )
        if v0 in facet_rays:
            continue
        sub = Cone(facet_rays, cone.ambient_dim)
        for simplex in _pulling_triangulation(sub):
            out.append(tuple(sorted(simplex + (v0,))))
    # facets through v0 are excluded, so simplices may repeat across facets
    return sorted(set(out))


def _parallelepiped_points(rows):
    """Lattice points of the half-open parallelepiped spanned by the rows.

    The rows are a basis of a finite-index sublattice of Z^d; one point per
    coset of that sublattice is returned, reduced into sum λ_i rows_i with
    0 <= λ_i < 1.
    """
    d = len(rows)
    D, U, V = snf(rows)
    diag = [D[i][i] for i in range(d)]
    Vinv = int_matrix_inverse(V)
    pts = []
    for w in itertools.product(*[range(x) for x in diag]):
        # x = w * Vinv is an integer coset representative
        x = tuple(
            sum(w[i] * Vinv[i][j] for i in range(d)) for j in range(d)
        )
        mu = rational_solve(transpose(rows), frac_vec(x))
        shift = [int(m) if m.denominator == 1 else (m.numerator // m.denominator) for m in mu]
        p = tuple(
            x[j] - sum(shift[i] * rows[i][j] for i in range(d))
            for j in range(d)
        )
        pts.append(p)
    return pts


def _hilbert_fulldim(cone):
    """Hilbert basis of (cone n Z^d) for a pointed cone of full rank d."""
    d = cone.rank
    if d == 0:
        return []
    xi = cone.xi_functional()
    candidates = set(cone.extremal_rays)
    for simplex in _pulling_triangulation(cone):
        for p in _parallelepiped_points([list(r) for r in simplex]):
            if not is_zero_vec(p):
                candidates.add(tuple(p))
    ordered = sorted(candidates, key=lambda p: (dot(xi, p), p))
    basis = []
    for x in ordered:
        reducible = False
        for h in basis:
            r = vec_sub(x, h)
            if is_zero_vec(r):
                continue
            if cone.contains(r) != "outside":
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return sorted(basis)


def hilbert_basis(cone, lattice_rows=None):
    """Minimal generating set of cone n L, L the lattice spanned by the rows.

    Defaults to L = Z^r.  The cone must be pointed; the result is the unique
    set of irreducible elements, sorted lexicographically.
    """
    if not cone.is_pointed:
        raise ValueError("minimal generating set not unique for a non-pointed cone")
    r = cone.ambient_dim
    if lattice_rows is None:
        lattice_rows = [tuple(row) for row in identity(r)]
    L = [tuple(int(x) for x in row) for row in lattice_rows]
    if L and rational_rank(L) != len(L):
        raise ValueError("lattice basis rows are dependent")
    if cone.rank == 0 or not L:
        return []
    # restrict the cone to span(L)
    W = cone
    if not all(rational_solve(transpose(L), frac_vec(g)) is not None
               for g in cone.generators):
        spanL = Cone([v for row in L for v in (row, tuple(-x for x in row))], r)
        W = intersect_cones(cone, spanL)
    if W.rank == 0:
        return []
    # the sublattice L n span(W), with basis K . L
    annW = integer_kernel(list(W.span_basis), n=r)
    rows = [tuple(dot(a, row) for row in L) for a in annW]
    K = integer_kernel(rows, n=len(L))
    B2 = [tuple(mat_vec(transpose(L), k)) for k in K]
    if not B2:
        return []
    # W in B2-coordinates (full dimensional there)
    gens2 = []
    for g in W.minimal_generators():
        c = rational_solve(transpose(B2), frac_vec(g))
        gens2.append(primitive_vector(c))
    C2 = Cone(gens2, len(B2))
    hb2 = _hilbert_fulldim(C2)
    out = [tuple(mat_vec(transpose(B2), h)) for h in hb2]
    return sorted(out)


def normal_monoid(cone, lattice_rows=None):
    """The normal affine monoid cone n L as an AffineMonoid."""
    hb = hilbert_basis(cone, lattice_rows)
    return AffineMonoid(hb, cone.ambient_dim, assume_normal=True)


def normalization(M):
    """n(M) = C(M) n gp(M), as a monoid with its Hilbert basis."""
    if M._hilbert is None:
        M._hilbert = tuple(hilbert_basis(M.cone, list(M.gp_basis)))
    return AffineMonoid(M._hilbert, M.ambient_dim, assume_normal=True)


def is_normal(M):
    n = normalization(M)
    return all(h in M for h in n.generators)


# ---------------------------------------------------------------------------
# lattice point enumeration below a degree bound


def _gp_points_under_xi(cone, gp_rows, bound):
    """Lattice points x of span-lattice gp with x in cone, xi(x) <= bound,
    sorted by (xi(x), x).  The zero vector is excluded."""
    d = len(gp_rows)
    if d == 0 or bound <= 0:
        return []
    xi = cone.xi_functional()
    phi = cross_section(cone)
    rows = [list(r) for r in gp_rows]
    los = [Fraction(0)] * d
    his = [Fraction(0)] * d
    for v in phi.vertices:
        z = rational_solve(transpose(rows), v)
        for i in range(d):
            zi = z[i] * bound
            los[i] = min(los[i], zi)
            his[i] = max(his[i], zi)
    ranges = []
    for i in range(d):
        lo = los[i].numerator // los[i].denominator
        hi = -((-his[i].numerator) // his[i].denominator)
        ranges.append(range(lo, hi + 1))
    # everything is linear in the gp coordinates z: work there
    xi_z = [dot(xi, r) for r in rows]
    normals_z = [[dot(h, r) for r in rows] for h in cone.facet_normals]
    pts = []
    Bt = transpose(rows)
    for z in itertools.product(*ranges):
        if all(c == 0 for c in z):
            continue
        s = dot(xi_z, z)
        if s <= 0 or s > bound:
            continue
        if any(dot(nz, z) < 0 for nz in normals_z):
            continue
        x = tuple(mat_vec(Bt, z))
        pts.append((s, x))
    pts.sort()
    return [x for _, x in pts]


# ---------------------------------------------------------------------------
# seminormalization


def _sn_step_generators(M, caps=6):
    """Minimal generators of sn1(M) = {x in gp(M) : 2x, 3x in M}.

    Sieve over lattice points of C(M) n gp(M) below an adaptively grown
    degree bound; the bound is accepted once doubling produces no new
    irreducible and all current generators of M are reachable.
    """
    if not M.is_pointed:
        raise ValueError("seminormalization requires trivial units")
    if M.rank == 0:
        return []
    xi = M._xi_vec()

    def in_s(x):
        return vec_scale(2, x) in M and vec_scale(3, x) in M

    bound = 2 * max(dot(xi, g) for g in M.generators) + M.rank
    prev = None
    for _ in range(caps):
        # irreducibles of S = sn1(M) up to degree `bound`: exact below the
        # bound, since every reducible point has an S-divisor of lower degree
        pts = _gp_points_under_xi(M.cone, M.gp_basis, bound)
        s_flags = {}
        irred = []
        for x in pts:
            flag = in_s(x)
            s_flags[x] = flag
            if not flag:
                continue
            reducible = False
            for h in irred:
                r = vec_sub(x, h)
                if not is_zero_vec(r) and s_flags.get(r, False):
                    reducible = True
                    break
            if not reducible:
                irred.append(x)
        cur = tuple(sorted(irred))
        if prev is not None and cur == prev:
            # doubling found no new irreducible; confirm generation
            reach = {}
            if all(_reachable(g, cur, M, reach) for g in M.generators):
                return list(cur)
        prev = cur
        bound *= 2
    raise ValueError("seminormalization degree cap exceeded")


def _reachable(x, gens, M, memo):
    """x expressible as a nonnegative integer combination of gens."""
    if x in memo:
        return memo[x]
    for h in gens:
        r = vec_sub(x, h)
        if is_zero_vec(r):
            memo[x] = True
            return True
        if M.cone.contains(r) == "outside":
            continue
        if _reachable(r, gens, M, memo):
            memo[x] = True
            return True
    memo[x] = False
    return False


def seminormalization(M, max_steps=20):
    """Least fixpoint of the one-step operator T -> {x : 2x, 3x in T}."""
    cur = M
    for _ in range(max_steps):
        gens = _sn_step_generators(cur)
        nxt = AffineMonoid(gens, M.ambient_dim)
        if nxt.equals(cur):
            return nxt
        cur = nxt
    raise ValueError("seminormalization did not stabilize")


def is_seminormal(M):
    gens = _sn_step_generators(M)
    return AffineMonoid(gens, M.ambient_dim).equals(M)


# ---------------------------------------------------------------------------
# interior submonoid and interior ideal


def in_interior_submonoid(M, x):
    """Exact membership in M_+ = (int C(M) n M) u {0}."""
    x = tuple(int(v) for v in x)
    if is_zero_vec(x):
        return True
    return M.cone.contains(x) == "interior" and x in M


def interior_submonoid(M, box_factor=None):
    """Truncated generating approximation of M_+ = (int C(M) n M) u {0}.

    M_+ is not finitely generated in general (for rank >= 2 it has
    irreducible elements arbitrarily far out along the boundary), so this
    returns the submonoid generated by the irreducible elements of M_+
    whose coordinates are bounded by rank * (largest extremal-ray
    coordinate), the canonical desk-scale truncation.  Exact membership in
    the full M_+ is available via in_interior_submonoid.
    """
    if not M.is_pointed:
        raise ValueError("interior submonoid requires trivial units")
    if M.rank == 0:
        return AffineMonoid([], M.ambient_dim)
    if box_factor is None:
        box_factor = M.rank
    big = max(
        abs(c) for r in M.cone.extremal_rays for c in r
    )
    B = box_factor * big
    xi = M._xi_vec()
    pts = []
    for z in itertools.product(range(-B, B + 1), repeat=M.ambient_dim):
        x = tuple(z)
        if is_zero_vec(x):
            continue
        if M.cone.contains(x) != "interior":
            continue
        if not M.in_gp(x):
            continue
        if x in M:
            pts.append(x)
    pts.sort(key=lambda p: (dot(xi, p), p))
    irred = []
    for x in pts:
        reducible = False
        for h in irred:
            r = vec_sub(x, h)
            if is_zero_vec(r):
                continue
            if in_interior_submonoid(M, r):
                reducible = True
                break
        if not reducible:
            irred.append(x)
    return AffineMonoid(irred, M.ambient_dim)


class InteriorIdeal:
    """The ideal int(M) = M n int C(M), as an exact predicate."""

    def __init__(self, M):
        self.monoid = M

    def __contains__(self, x):
        x = tuple(int(v) for v in x)
        return self.monoid.cone.contains(x) == "interior" and x in self.monoid

    def minimal_elements_in_box(self, bound):
        """Elements x of the ideal with no generator g of M and x - g still
        in the ideal, within the coordinate box |x_i| <= bound."""
        M = self.monoid
        out = []
        for z in itertools.product(range(-bound, bound + 1), repeat=M.ambient_dim):
            x = tuple(z)
            if x not in self:
                continue
            if any(vec_sub(x, g) in self for g in M.generators):
                continue
            out.append(x)
        return sorted(out)


def interior_ideal(M):
    return InteriorIdeal(M)


# ---------------------------------------------------------------------------
# region submonoids M(W)


def region_cone(M, W):
    """The cone R_+ W for a polytope W inside the cross-section of C(M)."""
    phi = cross_section(M.cone)
    for v in W.vertices:
        if phi.contains(v) == "outside":
            raise ValueError("region is not inside the cross-section")
    gens = [primitive_vector(v) for v in W.vertices]
    return Cone(gens, M.ambient_dim)


def region_submonoid(M, W):
    """M(W) = R_+ W n M; finitely generated for any finitely generated M."""
    K = region_cone(M, W)
    if M._normal:
        return normal_monoid(intersect_cones(K, M.cone), list(M.gp_basis))
    # preimage route: lambda in Z_+^k with G . lambda in R_+ W
    G = list(M.generators)
    k = len(G)
    lam_cone = Cone([tuple(int(i == j) for j in range(k)) for i in range(k)], k)
    ann = integer_kernel(list(K.span_basis), n=M.ambient_dim)
    for a in ann:
        row = tuple(dot(a, g) for g in G)
        lam_cone = cut_by_halfspace(lam_cone, row)
        lam_cone = cut_by_halfspace(lam_cone, tuple(-x for x in row))
    for h in K.facet_normals:
        row = tuple(dot(h, g) for g in G)
        lam_cone = cut_by_halfspace(lam_cone, row)
    hb = hilbert_basis(lam_cone)
    images = set()
    for lam in hb:
        img = tuple(
            sum(lam[i] * G[i][j] for i in range(k)) for j in range(M.ambient_dim)
        )
        if not is_zero_vec(img):
            images.add(img)
    out = AffineMonoid(sorted(images), M.ambient_dim)
    return AffineMonoid(out.minimal_generators(), M.ambient_dim)


# ---------------------------------------------------------------------------
# extremal inversion (splitting off an edge)


@dataclass(frozen=True)
class ExtremalInversion:
    direction: tuple
    monoid: AffineMonoid
    projection: tuple  # rows of the map gp(M) -> Z^(rank-1), on ambient coords
    section: tuple  # rows: basis of the complement of Z t inside gp(M)


def _gp_coords(M, v):
    c = lattice_coords(v, list(M.gp_basis))
    if c is None:
        raise ValueError("vector not in gp(M)")
    return c


def invert_extremal(M, t):
    """Split Z_+(-t) + M as Z x N by a lattice projection killing t.

    Requires M normal with U(M)=0 and t the minimal monoid generator on an
    extremal ray of C(M).  Returns the direction t, the rank-1-lower normal
    monoid N in projected coordinates, the projection matrix and the
    section basis (ambient vectors mapping to the unit vectors of N).
    """
    t = tuple(int(x) for x in t)
    ray = primitive_vector(t)
    if ray not in M.cone.extremal_rays:
        raise ValueError("t is not on an extremal ray")
    tau = _gp_coords(M, t)
    if gcd_list(tau) != 1:
        raise ValueError("t is not the minimal edge generator")
    d = M.rank
    basis = unimodular_completion(tau)  # rows of Z^d, first row = tau
    Binv = int_matrix_inverse([list(r) for r in basis])
    # x (gp coords) -> coordinates in (tau, u_2..u_d): x . Binv
    # projection drops the tau coordinate
    gp_rows = [list(r) for r in M.gp_basis]
    proj_rows = []
    Gram = [[dot(a, b) for b in gp_rows] for a in gp_rows]
    for j in range(1, d):
        col = [Binv[i][j] for i in range(d)]
        # functional on gp coords: x -> sum_i x_i col_i; express on ambient
        c = rational_solve(Gram, col)
        a = [Fraction(0)] * M.ambient_dim
        for i, ci in enumerate(c):
            for jj in range(M.ambient_dim):
                a[jj] += ci * gp_rows[i][jj]
        proj_rows.append(tuple(a))
    section = []
    for i in range(1, d):
        u = basis[i]
        amb = tuple(mat_vec(transpose(gp_rows), u))
        section.append(amb)
    n_gens = []
    for g in M.generators:
        img = []
        for row in proj_rows:
            v = Fraction(dot(row, g))
            assert v.denominator == 1
            img.append(int(v))
        img = tuple(img)
        if not is_zero_vec(img):
            n_gens.append(img)
    N0 = AffineMonoid(sorted(set(n_gens)), d - 1)
    assert N0.rank == d - 1
    assert N0.is_pointed, "projected monoid has nontrivial units"
    hb = hilbert_basis(N0.cone, list(N0.gp_basis))
    assert all(h in N0 for h in hb), "projected monoid is not normal"
    N = AffineMonoid(hb, d - 1, assume_normal=True)
    return ExtremalInversion(
        direction=t,
        monoid=N,
        projection=tuple(proj_rows),
        section=tuple(section),
    )


# ---------------------------------------------------------------------------
# free bases in regions and free embeddings


def _radial_point(M, x):
    xi = M._xi_vec()
    v = dot(xi, x)
    if v <= 0:
        raise ValueError("point not in the positive side of the grading")
    return tuple(Fraction(c, v) for c in x)


def free_basis_in_region(M, W, c_cap=2 ** 16, search_cap=12):
    """Vectors of M(W) forming a Z-basis of gp(M), shaped m, u_i + c m.

    W must be a polytope of full dimension inside the cross-section of
    C(M); M must be normal.  The rays of all returned vectors meet W.
    """
    phi = cross_section(M.cone)
    if W.dim != phi.dim:
        raise ValueError("region must be full dimensional in the cross-section")
    for v in W.vertices:
        if phi.contains(v) == "outside":
            raise ValueError("region is not inside the cross-section")
    d = M.rank
    xi = M._xi_vec()
    m = None
    bound = max(dot(xi, g) for g in M.generators)
    for _ in range(search_cap):
        for x in _gp_points_under_xi(M.cone, M.gp_basis, bound):
            if W.contains(_radial_point(M, x)) != "interior":
                continue
            if gcd_list(_gp_coords(M, x)) != 1:
                continue
            if x not in M:
                continue
            m = x
            break
        if m is not None:
            break
        bound *= 2
    if m is None:
        raise ValueError("no primitive monoid element with ray in the region")
    tau = _gp_coords(M, m)
    basis_rows = unimodular_completion(tau)
    gp_rows = [list(r) for r in M.gp_basis]
    others = [tuple(mat_vec(transpose(gp_rows), u)) for u in basis_rows[1:]]
    c = 1
    while c <= c_cap:
        cand = [vec_add(u, vec_scale(c, m)) for u in others]
        ok = True
        for b in cand:
            if dot(xi, b) <= 0:
                ok = False
                break
            if M.cone.contains(b) == "outside":
                ok = False
                break
            if W.contains(_radial_point(M, b)) == "outside":
                ok = False
                break
            if b not in M:
                ok = False
                break
        if ok:
            out = [m] + cand
            coords = [list(_gp_coords(M, b)) for b in out]
            assert abs(det_int(coords)) == 1
            return out
        c *= 2
    raise ValueError("free basis search cap exceeded")


def embed_in_free(M):
    """Injective lattice map M -> Z_+^rank with gp(M) -> Z^rank bijective.

    Returns (rows, grading): rows are rational functionals on the ambient
    space, integral on gp(M); grading is their sum, strictly positive on
    M minus 0.
    """
    if not M.is_pointed:
        raise ValueError("free embedding requires trivial units")
    d = M.rank
    if d == 0:
        return (), ()
    gp_rows = [list(r) for r in M.gp_basis]
    coords = [_gp_coords(M, g) for g in M.generators]
    Mp = AffineMonoid(coords, d)
    Cd = Mp.cone.dual()
    D = normal_monoid(Cd)
    hb = list(D.generators)
    if len(hb) == d and abs(det_int([list(h) for h in hb])) == 1:
        # descending order makes the embedding of a free monoid the identity
        f_rows = sorted(hb, reverse=True)
    else:
        W = cross_section(Cd)
        f_rows = free_basis_in_region(D, W)
    # functional x -> f . coords(x), expressed on the ambient space
    Gram = [[dot(a, b) for b in gp_rows] for a in gp_rows]
    rows = []
    for f in f_rows:
        c = rational_solve(Gram, f)
        a = [Fraction(0)] * M.ambient_dim
        for i, ci in enumerate(c):
            for j in range(M.ambient_dim):
                a[j] += ci * gp_rows[i][j]
        rows.append(tuple(a))
    grading = tuple(sum(r[j] for r in rows) for j in range(M.ambient_dim))
    for g in M.generators:
        vals = [dot(r, g) for r in rows]
        assert all(v.denominator == 1 and v >= 0 for v in map(Fraction, vals))
        assert sum(vals) > 0
    return tuple(rows), grading
