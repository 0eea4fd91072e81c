"""Pyramidal extensions, polarized monoids, and stage approximation.

A pyramidal extension grows the cross-section of a normal monoid by a single
pyramid erected on a visible facet.  A polarized monoid splits a normal
monoid along a distinguished edge generator against a base polytope, facet
by facet.  The approximation routines replace the usual "for a deep enough
stage" existence arguments by bounded searches: every candidate is checked
exactly and the verification transcript is part of the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cone import Cone, cut_by_halfspace, intersect_cones
from .dilation import CSeq
from .linalg import (
    clear_denominators,
    det_int,
    dot,
    ext_gcd,
    frac_vec,
    gcd_list,
    hnf_basis,
    identity,
    in_lattice,
    integer_kernel,
    lattice_coords,
    mat_mul,
    primitive_vector,
    rational_nullspace,
    rational_rank,
    rational_solve,
    solve_int,
    transpose,
    vec_add,
    vec_scale,
    vec_sub,
    is_zero_vec,
)
from .monoid import AffineMonoid, free_basis_in_region, is_normal, normal_monoid
from .polytope import Polytope

__all__ = [
    "PyramidalExtension",
    "is_pyramidal_extension",
    "PolarizedMonoid",
    "verify_polarized",
    "make_polarized",
    "facet_sign",
    "antipode",
    "scheme_fan",
    "SearchCaps",
    "FreeStageMonoid",
    "approxA_free",
    "StagePolarized",
    "approxB_construct",
    "BipyramidalSplit",
    "bipyramidal_approx",
]


def _ray_section(xi, v):
    """Radial image of v on the affine section {xi . x = 1}."""
    w = frac_vec(v)
    h = dot(xi, w)
    if h <= 0:
        raise ValueError("ray not cut by the section functional")
    return tuple(c / h for c in w)


def _section(cone, xi):
    """Cross-section polytope of a pointed cone under the functional xi."""
    pts = [_ray_section(xi, g) for g in cone.minimal_generators()]
    return Polytope(pts, cone.ambient_dim)


def _facet_vertices(poly, facet):
    a, b = facet
    return tuple(v for v in poly.vertices if dot(a, v) == b)


def _facet_rays(poly, facet):
    return [primitive_vector(v) for v in _facet_vertices(poly, facet)]


def _check(report, clause, ok):
    report.append({"clause": clause, "status": "pass" if ok else "fail"})
    return bool(ok)


def _freeze(report):
    return tuple((c["clause"], c["status"]) for c in report)


def _stage_coords(x, gp_rows, denom):
    """Integer coordinates of x over (1/denom) gp, or None."""
    rhs = [c * denom for c in frac_vec(x)]
    c = rational_solve(transpose(gp_rows), rhs)
    if c is None:
        return None
    c = [Fraction(ci) for ci in c]
    if any(ci.denominator != 1 for ci in c):
        return None
    return [int(ci) for ci in c]


# ---------------------------------------------------------------------------
# pyramidal extensions


@dataclass(frozen=True)
class PyramidalExtension:
    """Certificate that ``total`` grows ``base`` by a single pyramid.

    ``apex`` is the one cross-section vertex of the big monoid outside the
    small one, ``base_facet`` lists the vertices of the unique facet it
    sees, and ``delta`` is the pyramid erected on that facet.  All section
    data live on the hyperplane cut by ``section_functional``.
    """

    base: AffineMonoid
    total: AffineMonoid
    apex: tuple
    base_facet: tuple
    delta: Polytope
    section_functional: tuple


def is_pyramidal_extension(M, N):
    """Decide whether N extends M by one pyramid over a visible facet.

    Returns (True, certificate) or (False, reason).  Both cross-sections
    are cut by the section functional of C(N), so they share a hyperplane.
    """
    for g in M.generators:
        if g not in N:
            raise ValueError("base monoid is not a submonoid")
    if not M.is_pointed or not N.is_pointed:
        return False, "units are nontrivial"
    if not is_normal(M) or not is_normal(N):
        return False, "monoid is not normal"
    gm = [list(r) for r in M.gp_basis]
    gn = [list(r) for r in N.gp_basis]
    if not (all(in_lattice(r, gn) for r in gm) and all(in_lattice(r, gm) for r in gn)):
        return False, "gp mismatch"
    if M.cone.rank != N.cone.rank:
        return False, "rank drops on the base"
    if M.cone == N.cone:
        return False, "cross-sections coincide"
    xi = N.cone.xi_functional()
    phi_n = _section(N.cone, xi)
    phi_m = _section(M.cone, xi)
    outer = [v for v in phi_n.vertices if phi_m.contains(v) == "outside"]
    if len(outer) != 1:
        return False, "not a single outer vertex"
    apex = outer[0]
    seen = phi_m.visible_facets(apex)
    if len(seen) != 1:
        return False, "apex sees more than one facet"
    base_facet = _facet_vertices(phi_m, seen[0])
    if Polytope(list(phi_m.vertices) + [apex], N.ambient_dim) != phi_n:
        return False, "union is not the outer cross-section"
    delta = Polytope(list(base_facet) + [apex], N.ambient_dim)
    cert = PyramidalExtension(
        base=M,
        total=N,
        apex=apex,
        base_facet=base_facet,
        delta=delta,
        section_functional=tuple(xi),
    )
    return True, cert


# ---------------------------------------------------------------------------
# polarized monoids


@dataclass(frozen=True)
class PolarizedMonoid:
    """A normal pointed monoid split along a distinguished edge generator.

    ``pole`` is the edge generator, ``gamma`` the base polytope whose
    vertices represent the remaining extremal rays.  ``checks`` keeps the
    verification transcript and ``facet_signs`` the side of each base facet
    relative to the pole, aligned with ``gamma.facets``.
    """

    pole: tuple
    gamma: Polytope
    monoid: AffineMonoid
    checks: tuple
    facet_signs: tuple

    def antipode(self):
        return antipode(self)


def _as_polytope(gamma, ambient_dim):
    if isinstance(gamma, Polytope):
        return gamma
    return Polytope([frac_vec(v) for v in gamma], ambient_dim)


def verify_polarized(t, gamma, N):
    """Check the splitting C(N) = cone(t) + cone(gamma) clause by clause.

    Returns (ok, report).  Beyond the cone identity, every facet F of gamma
    must split off the pole: the submonoid of N over cone(t, F) has to be
    the facet submonoid extended freely by t, both on Hilbert bases and on
    groups of differences.
    """
    report = []
    t = tuple(int(x) for x in t)
    G = _as_polytope(gamma, N.ambient_dim)
    ok = _check(report, "monoid normal and pointed", N.is_pointed and is_normal(N))
    if ok:
        ok = _check(report, "pole in the monoid", not is_zero_vec(t) and t in N)
    if ok:
        ok = _check(
            report, "pole on an extremal ray", primitive_vector(t) in N.cone.extremal_rays
        )
    if ok:
        tau = lattice_coords(list(t), [list(r) for r in N.gp_basis])
        ok = _check(
            report, "pole not edge generator", tau is not None and gcd_list(tau) == 1
        )
    if not ok:
        return False, report
    rays = [list(primitive_vector(v)) for v in G.vertices]
    ok = _check(
        report,
        "cone splits along pole and base",
        Cone([list(t)] + rays, N.ambient_dim) == N.cone,
    )
    spans_ok = True
    for f in G.facets:
        frays = [list(r) for r in _facet_rays(G, f)]
        spans_ok &= rational_rank(frays + [list(t)]) == rational_rank(frays) + 1
    ok &= _check(report, "pole off facet spans", spans_ok)
    if not spans_ok:
        return False, report
    gp_rows = [list(r) for r in N.gp_basis]
    for i, f in enumerate(G.facets):
        frays = [list(r) for r in _facet_rays(G, f)]
        sub = normal_monoid(Cone([list(t)] + frays, N.ambient_dim), gp_rows)
        nf = normal_monoid(Cone(frays, N.ambient_dim), gp_rows)
        want = tuple(sorted(set([t]) | set(nf.generators)))
        hb_ok = tuple(sorted(sub.generators)) == want
        lat_a = hnf_basis([list(t)] + [list(g) for g in nf.generators])
        lat_b = [list(r) for r in sub.gp_basis]
        lat_ok = all(in_lattice(list(r), lat_b) for r in lat_a) and all(
            in_lattice(list(r), lat_a) for r in lat_b
        )
        ok &= _check(report, f"facet {i} splits off the pole", hb_ok and lat_ok)
    return bool(ok), report


def make_polarized(t, gamma, N):
    """Build a verified PolarizedMonoid or raise on the first failing clause."""
    ok, report = verify_polarized(t, gamma, N)
    if not ok:
        bad = next(c["clause"] for c in report if c["status"] == "fail")
        raise ValueError(f"not a polarized monoid: {bad}")
    G = _as_polytope(gamma, N.ambient_dim)
    t = tuple(int(x) for x in t)
    signs = tuple(_facet_sign_value(t, G, f) for f in G.facets)
    return PolarizedMonoid(
        pole=t, gamma=G, monoid=N, checks=_freeze(report), facet_signs=signs
    )


def _facet_sign_value(t, gamma, facet):
    """Side of the pole against the linear span of one base facet.

    The sign is positive when the pole and the base cone lie on the same
    side of that span.
    """
    frays = [list(r) for r in _facet_rays(gamma, facet)]
    z = [0] * len(t)
    for v in gamma.vertices:
        z = vec_add(z, primitive_vector(v))
    phi = None
    for cand in rational_nullspace(frays):
        sz = dot(cand, z)
        if sz != 0:
            phi = cand if sz > 0 else vec_scale(-1, list(cand))
            break
    if phi is None:
        raise ValueError("facet span is degenerate")
    st = dot(phi, t)
    if st == 0:
        raise ValueError("not polarized")
    return "positive" if st > 0 else "negative"


def _resolve_facet(G, facet):
    if isinstance(facet, int):
        return G.facets[facet]
    cand = tuple(facet)
    if (
        len(cand) == 2
        and isinstance(cand[0], (tuple, list))
        and not hasattr(cand[1], "__len__")
    ):
        a, b = list(cand[0]), cand[1]
        tight = tuple(v for v in G.vertices if dot(a, v) == b)
        for f in G.facets:
            if _facet_vertices(G, f) == tight:
                return f
        raise ValueError("no such facet")
    pts = set(tuple(frac_vec(p)) for p in cand)
    prims = set(primitive_vector(p) for p in pts)
    for f in G.facets:
        fv = _facet_vertices(G, f)
        if set(fv) == pts or set(primitive_vector(v) for v in fv) == prims:
            return f
    raise ValueError("no such facet")


def facet_sign(P, facet):
    """Sign of one facet of the base polytope of a polarized monoid.

    ``facet`` may be an index into P.gamma.facets, an (a, b) facet pair, or
    the facet's vertices (section points or ray representatives).
    """
    f = _resolve_facet(P.gamma, facet)
    return _facet_sign_value(P.pole, P.gamma, f)


def antipode(P):
    """Mirror a polarized monoid across its base.

    The pole is negated while the base submonoid is kept; the result is
    verified from scratch, so applying it twice returns the original monoid.
    """
    N = P.monoid
    rays = [list(primitive_vector(v)) for v in P.gamma.vertices]
    gp_rows = [list(r) for r in N.gp_basis]
    ng = normal_monoid(Cone(rays, N.ambient_dim), gp_rows)
    neg = tuple(-x for x in P.pole)
    gens = sorted(set([neg]) | set(ng.generators))
    nm = AffineMonoid(gens, N.ambient_dim)
    return make_polarized(neg, P.gamma, nm)


def scheme_fan(P):
    """Glue the dual cones of the monoid and its antipode along a facet.

    Returns (dual_plus, dual_minus, report).  The report certifies that the
    two duals are full dimensional, share a facet, and tile the dual of the
    base cone exactly.
    """
    N = P.monoid
    d = N.ambient_dim
    if N.cone.rank != d or not N.cone.is_pointed:
        raise ValueError("scheme fan needs a full dimensional pointed cone")
    Q = antipode(P)
    dual_plus = N.cone.dual()
    dual_minus = Q.monoid.cone.dual()
    base = Cone([list(primitive_vector(v)) for v in P.gamma.vertices], d)
    dual_base = base.dual()
    report = []
    _check(
        report,
        "duals full dimensional and pointed",
        dual_plus.rank == d
        and dual_minus.rank == d
        and dual_plus.is_pointed
        and dual_minus.is_pointed,
    )
    wall = intersect_cones(dual_plus, dual_minus)
    h = None
    for cand in dual_plus.facet_normals:
        if all(dot(cand, g) == 0 for g in wall.generators):
            h = cand
            break
    facet_ok = wall.rank == d - 1 and h is not None
    if facet_ok:
        facet_plus = Cone(
            [list(g) for g in dual_plus.extremal_rays if dot(h, g) == 0], d
        )
        facet_ok = wall == facet_plus
    if facet_ok:
        hm = None
        for cand in dual_minus.facet_normals:
            if all(dot(cand, g) == 0 for g in wall.generators):
                hm = cand
                break
        if hm is None:
            facet_ok = False
        else:
            facet_minus = Cone(
                [list(g) for g in dual_minus.extremal_rays if dot(hm, g) == 0], d
            )
            facet_ok = wall == facet_minus
    _check(report, "duals share a facet", facet_ok)
    union_ok = False
    if facet_ok:
        union_ok = cut_by_halfspace(dual_base, list(h)) == dual_plus and cut_by_halfspace(
            dual_base, [-x for x in h]
        ) == dual_minus
    _check(report, "duals tile the dual of the base cone", union_ok)
    return dual_plus, dual_minus, report


# ---------------------------------------------------------------------------
# stage approximation


@dataclass(frozen=True)
class SearchCaps:
    """Bounds for the approximation searches.  Exceeding a bound raises."""

    k_cap: int = 32
    offset_cap: int = 64
    stage_cap: int = 24


@dataclass(frozen=True)
class FreeStageMonoid:
    """A free interior submonoid whose generators sit on one stage.

    ``generators`` are rational ambient vectors; ``scaled`` is the integer
    model obtained by clearing ``denominator``.
    """

    generators: tuple
    stage: int
    denominator: int
    scaled: AffineMonoid
    checks: tuple


def _mat_add(A, B):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mat_scale(c, A):
    return [[c * x for x in row] for row in A]


def approxA_free(L, cseq, points=(), stage=0, target_rows=None, caps=None):
    """Free simplicial approximation from inside, at a dilation stage.

    Searches for a free monoid whose generators lie on one stage of the
    dilation sequence in the interior of L, absorb every point of
    ``points`` (nonnegative integer coordinates), and whose group of
    differences contains the optional ``target_rows``.  The construction
    shears the ray matrix by a triangular factor and verifies every
    postcondition exactly before returning.
    """
    caps = caps or SearchCaps()
    C = L.cone
    d = C.rank
    if len(C.extremal_rays) != d or not C.is_pointed:
        raise ValueError("not simplicial")
    amb = L.ambient_dim
    gp_rows = [list(r) for r in L.gp_basis]
    pts = [frac_vec(p) for p in points]
    rows = [frac_vec(r) for r in (target_rows or [])]
    for p in pts:
        if is_zero_vec(p):
            continue
        if C.contains(clear_denominators(p)) != "interior":
            raise ValueError("points must be interior")
    pts = [p for p in pts if not is_zero_vec(p)]
    # deepest stage at which all input data become integral over gp(L)
    jb = stage
    while True:
        D = cseq.denominator(jb)
        if all(_stage_coords(x, gp_rows, D) is not None for x in pts + rows):
            break
        jb += 1
        if jb > stage + caps.stage_cap:
            raise RuntimeError("approximation depth exceeded")
    Dj = cseq.denominator(jb)
    # primitive ray directions in gp coordinates
    V = []
    for r in C.extremal_rays:
        c = rational_solve(transpose(gp_rows), list(frac_vec(r)))
        if c is None:
            raise ValueError("cone ray outside the span of gp(L)")
        V.append(list(primitive_vector(c)))
    detV = det_int(V)
    nu = [[1 if jj > ii else 0 for jj in range(d)] for ii in range(d)]
    nuT = transpose(nu)
    ident = identity(d)
    for m in range(caps.k_cap + 1):
        P = cseq.denominator(jb + m) // Dj
        Q = (P ** (2 * d)) * abs(detV)
        jq = None
        for j2 in range(jb, jb + caps.stage_cap + 1):
            if cseq.denominator(j2) % (Dj * Q) == 0:
                jq = j2
                break
        if jq is None:
            continue
        Dq = cseq.denominator(jq)
        W = mat_mul(_mat_add(_mat_scale(P, ident), nu), _mat_add(_mat_scale(P, ident), nuT))
        A = mat_mul(W, V)
        gens = []
        for row in A:
            g = [Fraction(0)] * amb
            for k, coef in enumerate(row):
                g = vec_add(g, vec_scale(Fraction(coef, Q * Dj), gp_rows[k]))
            gens.append(tuple(g))
        if any(C.contains(clear_denominators(g)) != "interior" for g in gens):
            continue
        scaled_gens = []
        good = True
        for g in gens:
            sg = [x * Dq for x in g]
            if any(Fraction(x).denominator != 1 for x in sg):
                good = False
                break
            sg = tuple(int(x) for x in sg)
            if sg not in L:
                good = False
                break
            scaled_gens.append(sg)
        if not good:
            continue
        cols = transpose([list(g) for g in gens])
        for p in pts:
            c = rational_solve(cols, list(p))
            if c is None or any(
                Fraction(ci).denominator != 1 or ci < 0 for ci in c
            ):
                good = False
                break
        if not good:
            continue
        for r in rows:
            c = rational_solve(cols, list(r))
            if c is None or any(Fraction(ci).denominator != 1 for ci in c):
                good = False
                break
        if not good:
            continue
        report = []
        _check(report, "generators independent", det_int(A) != 0)
        _check(report, "generators interior", True)
        _check(report, f"generators on stage {jq}", True)
        _check(report, "points absorbed", True)
        _check(report, "target rows in the group of differences", True)
        scaled = AffineMonoid(scaled_gens, amb)
        return FreeStageMonoid(
            generators=tuple(gens),
            stage=jq,
            denominator=Dq,
            scaled=scaled,
            checks=_freeze(report),
        )
    raise RuntimeError("approximation depth exceeded")


@dataclass(frozen=True)
class StagePolarized:
    """A polarized monoid whose data live on one dilation stage.

    ``pole`` and the vertices of ``gamma`` are rational ambient vectors;
    ``scaled`` is the verified integer model obtained by clearing
    ``denominator``.
    """

    pole: tuple
    gamma: Polytope
    stage: int
    denominator: int
    scaled: PolarizedMonoid


def _separator(a_ref, v0, targets, u1, lam, w_unit):
    """Integer functional a with a . u1 = lam pinching targets below v0.

    ``a_ref`` is a rational functional normalized to a_ref . u1 = 1 that is
    positive on the targets and strictly larger at v0.  The target
    lam * a_ref is rounded componentwise and the pairing repaired with an
    integer vector w_unit dual to u1.  Returns None when the rounding error
    eats a margin; the margins scale with lam, so deep enough stage ratios
    always succeed.
    """
    a = [round(x * lam) for x in a_ref]
    r = dot(a, u1) - lam
    a = vec_sub(a, vec_scale(r, w_unit))
    av = dot(a, v0)
    if av <= 0:
        return None
    if any(dot(a, x) >= av or dot(a, x) <= 0 for x in targets):
        return None
    return [int(x) for x in a]


def approxB_construct(ext, cseq, s, j, region, inner_region, caps=None):
    """Tower of nested polarized approximations over a pyramidal extension.

    Builds s nested base polytopes pinched between the base cross-section
    and its boundary, each polarized against a common pole deep on the
    dilation sequence, and returns them innermost first together with the
    verification transcript.  ``region`` points must be interior to the
    pyramid over the innermost base, ``inner_region`` points interior to
    the innermost base itself.
    """
    caps = caps or SearchCaps()
    N, M = ext.total, ext.base
    amb = N.ambient_dim
    gp_rows = [list(r) for r in N.gp_basis]
    d = len(gp_rows)
    tg = transpose(gp_rows)

    def fwd(x):
        c = rational_solve(tg, list(frac_vec(x)))
        if c is None:
            raise ValueError("point outside the span of gp")
        return tuple(Fraction(ci) for ci in c)

    def back(z):
        out = [Fraction(0)] * amb
        for k, zk in enumerate(z):
            out = vec_add(out, vec_scale(Fraction(zk), gp_rows[k]))
        return tuple(out)

    cn = Cone([list(primitive_vector(fwd(r))) for r in N.cone.extremal_rays], d)
    cm = Cone([list(primitive_vector(fwd(r))) for r in M.cone.extremal_rays], d)
    if cn.rank != d or not cn.is_pointed:
        raise ValueError("approximation needs a full dimensional pointed cone")
    xi = cn.xi_functional()
    phi_n = _section(cn, xi)
    phi_m = _section(cm, xi)
    wsec = [_ray_section(xi, fwd(p)) for p in region]
    wpsec = [_ray_section(xi, fwd(p)) for p in inner_region]
    for p in wsec:
        if phi_n.contains(p) != "interior":
            raise ValueError("W not interior")
    for p in wpsec:
        if phi_m.contains(p) != "interior":
            raise ValueError("W' not interior")
    outer = [v for v in phi_n.vertices if phi_m.contains(v) == "outside"]
    if len(outer) != 1:
        raise ValueError("not a pyramidal extension certificate")
    v_apex = outer[0]
    report = []
    _check(report, "region interior to the outer cross-section", True)
    _check(report, "inner region interior to the base cross-section", True)
    # facet cone span functionals of the base cross-section
    span_funcs = []
    for f in phi_m.facets:
        frays = [list(r) for r in _facet_rays(phi_m, f)]
        func = None
        for cand in rational_nullspace(frays):
            if any(dot(cand, list(v)) != 0 for v in phi_m.vertices):
                func = cand
                break
        if func is None:
            raise RuntimeError("search cap exceeded: degenerate facet span")
        span_funcs.append(func)
    center = phi_n.relint_point()
    anchor = [Fraction(0)] * d
    for p in wpsec + [phi_m.relint_point()]:
        anchor = vec_add(anchor, p)
    anchor = tuple(x / (len(wpsec) + 1) for x in anchor)
    jp = j + 1
    Dj = cseq.denominator(j)
    last_reason = "apex perturbation"
    epsd = 2
    for _ in range(8):
        vp = tuple(v + (c - v) / epsd for v, c in zip(v_apex, center))
        epsd *= 2
        if not (
            phi_m.contains(vp) == "outside"
            and phi_n.contains(vp) == "interior"
            and all(dot(f, vp) != 0 for f in span_funcs)
        ):
            continue
        u1 = primitive_vector(vp)
        w_unit = solve_int([list(u1)], [1])
        if w_unit is None:
            continue
        vis = phi_m.visible_facets(vp)
        if not vis:
            continue
        mverts = list(phi_m.vertices)
        av, bv = vis[0]
        at = [-x for x in av]
        # shift along xi until the functional is at least 1 on the base
        # section; it stays maximal at vp since all section points share the
        # xi level.  Then normalize the pairing with u1 to exactly 1.
        vmin = min(dot(at, x) for x in mverts)
        at = vec_add(at, vec_scale(1 - vmin, list(xi)))
        h1 = dot(xi, u1)
        s_vp = dot(at, vp)
        a_ref = [Fraction(x) / (h1 * s_vp) for x in at]
        got = None
        for e in range(caps.stage_cap + 1):
            lam = cseq.denominator(j + e) // Dj
            a0 = _separator(a_ref, vp, mverts, list(u1), lam, w_unit)
            if a0 is None:
                continue
            got = (e, a0)
            break
        if got is None:
            last_reason = "separating functional"
            continue
        e, a0 = got
        res = _approxB_attempt(
            ext, cseq, s, j, e, a0, u1, vp, cn, cm, xi, phi_m, anchor,
            wsec, wpsec, gp_rows, back, report, caps,
        )
        if isinstance(res, str):
            last_reason = res
            continue
        return res
    raise RuntimeError(f"search cap exceeded: {last_reason}")


def _approxB_attempt(
    ext, cseq, s, j, e, a0, u1, vp, cn, cm, xi, phi_m, anchor,
    wsec, wpsec, gp_rows, back, report, caps,
):
    """One frame attempt for approxB_construct.

    Returns the finished (triples, report) pair or a string naming the
    condition that failed last.
    """
    d = len(u1)
    amb = len(gp_rows[0])
    Dj = cseq.denominator(j)
    j0 = j + e
    D0 = cseq.denominator(j0)
    jp = j + 1
    kernel_rows = integer_kernel([list(a0)])
    av0 = dot(a0, vp)
    # forward polar projection of the base facets onto the kernel plane
    projected = []
    for f in phi_m.facets:
        imgs = []
        for x in _facet_vertices(phi_m, f):
            den = av0 - dot(a0, x)
            if den <= 0:
                return "projection orientation"
            tpar = Fraction(av0, den)
            imgs.append(tuple(v + tpar * (xc - v) for v, xc in zip(vp, x)))
        projected.append((f, imgs))
    # free lattice basis of the kernel inside each projected facet region
    bases = []
    for f, imgs in projected:
        rays = [list(primitive_vector(p)) for p in imgs]
        kcone = Cone(rays, d)
        if kcone.rank != d - 1 or not kcone.is_pointed:
            return "projected region degenerate"
        lbasis = _wide_pair(kcone, xi, vp, kernel_rows)
        if lbasis is None:
            msub = normal_monoid(kcone, [list(r) for r in kernel_rows])
            kxi = msub._xi_vec()
            wreg = Polytope([_ray_section(kxi, p) for p in imgs], d)
            try:
                lbasis = free_basis_in_region(msub, wreg)
            except ValueError:
                return "free basis in the projected region"
            lbasis = _spread_basis(lbasis, kcone, kxi)
        bases.append((f, lbasis))
    tail = None
    for k in range(max(0, e - 1), caps.k_cap + 1):
        Dk = cseq.denominator(jp + k)
        if Dk % D0 != 0:
            continue
        for rho_den in (4, 5, 6, 7, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48):
            res = _approxB_tower(
                ext, cseq, s, j, k, rho_den, a0, u1, vp, cn, cm, xi, phi_m,
                anchor, wsec, wpsec, gp_rows, back, bases, kernel_rows,
                j0, D0, jp, Dj, report, caps,
            )
            if isinstance(res, str):
                tail = res
                continue
            return res
    return tail or "gamma tower"


def _kernel_coords(v, kernel_rows):
    c = rational_solve(
        transpose([list(r) for r in kernel_rows]), list(frac_vec(v))
    )
    if c is None or any(x.denominator != 1 for x in c):
        return None
    return [int(x) for x in c]


def _wide_pair(kc, sec_xi, vp, kernel_rows):
    """Unimodular pair of kernel lattice rays subtending a wide angle at vp.

    Enumerates primitive kernel vectors of bounded height inside the cone
    and picks the lattice-basis pair whose cross-sections subtend the
    largest angle seen from the pole section.  Pole mixing projects the
    anchors from vp onto the pushed facet line, so the subtended angle is
    the lever arm that keeps integer rounding from tilting that plane.
    Rank-2 kernels only; returns None when not applicable.
    """
    rays = list(kc.extremal_rays)
    if len(rays) != 2 or len(kernel_rows) != 2:
        return None
    A = _kernel_coords(rays[0], kernel_rows)
    Bv = _kernel_coords(rays[1], kernel_rows)
    if A is None or Bv is None:
        return None
    det_ab = A[0] * Bv[1] - A[1] * Bv[0]
    if det_ab == 0:
        return None
    sigma = 1 if det_ab > 0 else -1
    amb = len(kernel_rows[0])

    def to_amb(c):
        return tuple(
            sum(c[i] * kernel_rows[i][jj] for i in range(2)) for jj in range(amb)
        )

    # wide unimodular pairs always have small coordinates: the cross-section
    # gap of a basis pair is inverse to the product of their heights, so the
    # search bound only grows while the wedge is too narrow to hold any
    best = None
    for bound in (6, 12, 24, 48, 96):
        cands = []
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                if math.gcd(a, b) != 1:
                    continue
                if (A[0] * b - A[1] * a) * sigma < 0:
                    continue
                if (a * Bv[1] - b * Bv[0]) * sigma < 0:
                    continue
                v = to_amb((a, b))
                h = dot(sec_xi, v)
                if h <= 0:
                    continue
                arm = tuple(Fraction(x, 1) / h - p for x, p in zip(v, vp))
                cands.append((arm, dot(arm, arm), (a, b), v))
        for i in range(len(cands)):
            ai_arm, ai_n2, ca, va = cands[i]
            for l in range(i + 1, len(cands)):
                bl_arm, bl_n2, cb, vb = cands[l]
                if abs(ca[0] * cb[1] - ca[1] * cb[0]) != 1:
                    continue
                # widest angle at vp = smallest signed cosine, compared
                # exactly through its sign and squared magnitude
                g = dot(ai_arm, bl_arm)
                sgn = (g > 0) - (g < 0)
                key = (sgn, sgn * Fraction(g * g, ai_n2 * bl_n2), va, vb)
                if best is None or key < best:
                    best = key
        if best is not None:
            break
    if best is None:
        return None
    return [best[2], best[3]]


def _spread_basis(lbasis, kc, kxi):
    """Unimodular remix of a free kernel basis widening its ray spread.

    Elementary row operations keep the span and the determinant, so the
    result is still a basis of the same lattice; pushing the rays apart
    inside the region cone lengthens the lever arms of the anchor planes
    built on them, which keeps integer rounding from tilting those planes.
    """
    B = [list(v) for v in lbasis]
    n = len(B)
    if n < 2:
        return [tuple(v) for v in B]

    def score(rows):
        pts = [_ray_section(kxi, b) for b in rows]
        worst = None
        for i in range(n):
            for l in range(i + 1, n):
                d2 = sum((x - y) ** 2 for x, y in zip(pts[i], pts[l]))
                if worst is None or d2 < worst:
                    worst = d2
        return worst

    best = score(B)
    for _ in range(24):
        improved = False
        for i in range(n):
            for l in range(n):
                if i == l:
                    continue
                for step in (1, -1, 2, -2, 4, -4, 8, -8, 16, -16):
                    cand = vec_add(B[l], vec_scale(step, B[i]))
                    if dot(kxi, cand) <= 0 or kc.contains(cand) == "outside":
                        continue
                    trial = [cand if idx == l else B[idx] for idx in range(n)]
                    sc = score(trial)
                    if sc > best:
                        B = trial
                        best = sc
                        improved = True
        if not improved:
            break
    return [tuple(v) for v in B]


def _approxB_tower(
    ext, cseq, s, j, k, rho_den, a0, u1, vp, cn, cm, xi, phi_m, anchor,
    wsec, wpsec, gp_rows, back, bases, kernel_rows, j0, D0, jp, Dj,
    report, caps,
):
    """Build and verify one tower of s nested polarized triples."""
    d = len(u1)
    amb = len(gp_rows[0])
    Dk = cseq.denominator(jp + k)
    plans = []
    for level in range(1, s + 1):
        rho = Fraction(s + 1 - level, rho_den * s)
        plan = []
        for (f, lbasis) in bases:
            a_f, b_f = f
            bp = b_f + rho * (dot(a_f, anchor) - b_f)
            ais = []
            dirs = []
            for lint in lbasis:
                li = [Fraction(x, D0) for x in lint]
                num = bp * dot(xi, li) - dot(a_f, li)
                den = Fraction(dot(a_f, u1), Dk) - bp * Fraction(dot(xi, u1), Dk)
                if den == 0:
                    return "pushed plane parallel to the pole"
                astar = num / den
                # keep each anchor ray on the interior side of the exact
                # pushed plane, so rounding never tilts the facet outward
                if den > 0:
                    ai = -((-astar.numerator) // astar.denominator)
                else:
                    ai = astar.numerator // astar.denominator
                ais.append(max(1, ai))
                dirs.append(1 if den > 0 else -1)
            plan.append((lbasis, ais, dirs))
        plans.append(plan)
    # the anchor pair is a kernel basis, so lattice sheets over a facet
    # plane are spaced exactly one pole step apart; consecutive levels need
    # two steps of separation before a shifted point can land interior
    for lev in range(s - 2, -1, -1):
        for fi, (lbasis, cur, dirs) in enumerate(plans[lev]):
            outer = plans[lev + 1][fi][1]
            for i in range(len(cur)):
                if (cur[i] - outer[i]) * dirs[i] < 2:
                    cur[i] = outer[i] + 2 * dirs[i]
    levels = []
    for plan in plans:
        hs = []
        for (lbasis, ais, _dirs) in plan:
            rows = []
            for lint, ai in zip(lbasis, ais):
                li = [Fraction(x, D0) for x in lint]
                rows.append(vec_add(li, vec_scale(Fraction(ai, Dk), list(u1))))
            hf = None
            for cand in rational_nullspace([list(r) for r in rows]):
                sv = dot(cand, anchor)
                if sv != 0:
                    hf = cand if sv > 0 else vec_scale(-1, list(cand))
                    break
            if hf is None:
                return "facet candidate degenerate"
            hs.append(list(primitive_vector(hf)))
        gcone = Cone(hs, d).dual()
        if gcone.rank != d or not gcone.is_pointed:
            return "candidate cone degenerate"
        if len(gcone.facet_normals) != len(bases):
            return "candidate facet count"
        if any(dot(h, vp) == 0 for h in gcone.facet_normals):
            return "pole on a candidate facet span"
        try:
            gsec = _section(gcone, xi)
        except ValueError:
            return "candidate not cut by the section"
        if any(phi_m.contains(v) != "interior" for v in gsec.vertices):
            return "candidate inside the base cross-section"
        if any(gsec.contains(p) != "interior" for p in wpsec):
            return "inner region inside the candidate"
        hull = Polytope(list(gsec.vertices) + [vp], d)
        if any(hull.contains(p) == "outside" for p in wsec):
            return "region inside the pyramid over the candidate"
        levels.append(gsec)
    for lo, hi in zip(levels, levels[1:]):
        if any(hi.contains(v) != "interior" for v in lo.vertices):
            return "tower not nested"
    # stage lattice rows scaled by Dk
    ratio = Dk // D0
    lat_rows = [list(u1)] + [vec_scale(ratio, list(r)) for r in kernel_rows]
    lat_hnf = hnf_basis(lat_rows)
    cover = all(
        in_lattice([(Dk // Dj) * x for x in row], lat_hnf) for row in identity(d)
    )
    if not cover:
        return "stage lattice coverage"
    towers = []
    for gsec in levels:
        rays = [list(clear_denominators(v)) for v in gsec.vertices] + [list(u1)]
        nl = normal_monoid(Cone(rays, d), lat_rows)
        okp, _rep = verify_polarized(u1, gsec, nl)
        if not okp:
            return "tower polarized verification"
        base_l = normal_monoid(
            Cone([list(clear_denominators(v)) for v in gsec.vertices], d), lat_rows
        )
        if any(cn.contains(list(g)) == "outside" for g in nl.generators):
            return "tower stage containment"
        towers.append((gsec, nl, base_l))
    for (g_lo, n_lo, b_lo), (g_hi, n_hi, b_hi) in zip(towers, towers[1:]):
        for h in b_lo.generators:
            for sgn in (1, -1):
                shifted = vec_add(list(h), vec_scale(sgn, list(u1)))
                if is_zero_vec(shifted):
                    return "pole shift degenerate"
                if b_hi.cone.contains(shifted) != "interior":
                    return "pole shift not absorbed"
                if not in_lattice(shifted, lat_hnf):
                    return "pole shift off the stage lattice"
    first_gp = [list(r) for r in towers[0][1].gp_basis]
    if not all(
        in_lattice([(Dk // Dj) * x for x in row], first_gp) for row in identity(d)
    ):
        return "target lattice not in the first tower"
    _check(report, f"separating functional at stage depth {j0 - j}", True)
    _check(report, "target lattice inside the first tower", True)
    _check(report, "stage lattice coverage", True)
    _check(report, "tower nested", True)
    _check(report, "tower polarized and stage contained", True)
    _check(report, "pole shifts absorbed between consecutive levels", True)
    triples = []
    for gsec, nl, _bl in towers:
        pole_amb = back(list(u1))
        pole_int = tuple(int(x) for x in pole_amb)
        gens_amb = [tuple(int(c) for c in back(list(g))) for g in nl.generators]
        n_amb = AffineMonoid(sorted(gens_amb), amb)
        gamma_amb = Polytope([back(list(v)) for v in gsec.vertices], amb)
        scaled = make_polarized(pole_int, gamma_amb, n_amb)
        triples.append(
            StagePolarized(
                pole=tuple(Fraction(x, Dk) for x in pole_int),
                gamma=gamma_amb,
                stage=jp + k,
                denominator=Dk,
                scaled=scaled,
            )
        )
    return triples, report


# ---------------------------------------------------------------------------
# bipyramidal hulls


@dataclass(frozen=True)
class BipyramidalSplit:
    """A bipyramidal cone split along its equatorial wall.

    ``cone`` is the union of the two pyramids ``first`` and ``second``,
    ``omega`` the rational tip of the first pyramid, sitting on the stated
    dilation stage.
    """

    cone: Cone
    first: Cone
    second: Cone
    omega: tuple
    stage: int
    denominator: int
    checks: tuple


def bipyramidal_approx(
    N, upper, lower, t, polarized=None, denominator=1, cseq=None, caps=None
):
    """Bipyramidal hull between a polarized submonoid and the ambient cone.

    ``upper`` and ``lower`` are the two pyramidal halves of C(N) sharing a
    base facet, ``t`` the distinguished ray in the lower half.  In full
    mode ``polarized`` is a verified integer model at 1/``denominator``
    scale whose pole lies on the ray of t; the routine then builds a
    bipyramidal cone C with C minus the origin interior to C(N), the first
    pyramid interior to the upper half, the base polytope inside it, and a
    stage-rational tip omega with omega + t on the new wall.  Without
    polarized data only the wall diagnostics are computed and the interior
    clauses are reported as skipped.
    """
    caps = caps or SearchCaps()
    cseq = cseq or CSeq()
    d = N.ambient_dim
    cn = N.cone
    gp_rows = [list(r) for r in N.gp_basis]
    report = []
    wall = intersect_cones(upper, lower)
    if wall.rank != d - 1 or cn.rank != d:
        raise ValueError("not a pyramidal split")
    alpha = None
    for cand in rational_nullspace([list(g) for g in wall.generators]):
        if any(dot(cand, g) != 0 for g in upper.generators):
            alpha = list(primitive_vector(cand))
            break
    if alpha is None:
        raise ValueError("not a pyramidal split")
    if all(dot(alpha, g) <= 0 for g in upper.generators):
        alpha = vec_scale(-1, alpha)
    split_ok = cut_by_halfspace(cn, alpha) == upper and cut_by_halfspace(
        cn, vec_scale(-1, alpha)
    ) == lower
    _check(report, "halves split the cone along the wall", split_ok)
    if not split_ok:
        raise ValueError("not a pyramidal split")
    up_apex = [g for g in upper.extremal_rays if dot(alpha, g) > 0]
    lo_apex = [g for g in lower.extremal_rays if dot(alpha, g) < 0]
    pyr_ok = len(up_apex) == 1 and len(lo_apex) == 1
    _check(report, "halves are pyramids over the wall", pyr_ok)
    if not pyr_ok:
        raise ValueError("not a pyramidal split")
    a_up = up_apex[0]
    t = tuple(int(x) for x in t)
    t_ok = (
        not is_zero_vec(t)
        and lower.contains(list(t)) != "outside"
        and upper.contains(list(t)) == "outside"
    )
    _check(report, "distinguished ray only in the far half", t_ok)
    if not t_ok:
        raise ValueError("distinguished ray not in the far half only")

    if polarized is None:
        return _bipyramidal_diagnostic(
            N, upper, lower, t, alpha, a_up, wall, cn, gp_rows, cseq, caps, report
        )

    okp, _rep = verify_polarized(polarized.pole, polarized.gamma, polarized.monoid)
    _check(report, "polarized data verified", okp)
    if not okp:
        raise ValueError("polarized data not verified")
    if primitive_vector(polarized.pole) != primitive_vector(t):
        raise ValueError("pole off the distinguished ray")
    lint_ok = all(
        cn.contains(list(g)) == "interior" for g in polarized.monoid.generators
    )
    _check(report, "polarized monoid interior to the cone", lint_ok)
    if not lint_ok:
        raise ValueError("polarized monoid not interior")
    stage_ok = True
    for g in polarized.monoid.generators:
        gv = [Fraction(x, denominator) for x in g]
        if not any(
            _stage_coords(gv, gp_rows, cseq.denominator(j2)) is not None
            for j2 in range(caps.stage_cap + 1)
        ):
            stage_ok = False
            break
    _check(report, "polarized data on dilation stages", stage_ok)
    if not stage_ok:
        raise RuntimeError("approximation cap exceeded")
    base_ok = all(
        upper.contains(list(primitive_vector(v))) == "interior"
        for v in polarized.gamma.vertices
    )
    _check(report, "base polytope interior to the upper half", base_ok)
    if not base_ok:
        raise ValueError("base polytope not interior to the upper half")

    xi = cn.xi_functional()
    wall_prims = list(wall.extremal_rays)
    z_up = [0] * d
    for g in upper.extremal_rays:
        z_up = vec_add(z_up, list(g))
    up_anchor = _ray_section(xi, z_up)
    base_secs = [_ray_section(xi, g) for g in wall_prims]
    for nu_den in (4, 16, 64, 256):
        res = _bipyramidal_attempt(
            N, upper, lower, t, polarized, denominator, alpha, a_up, wall,
            cn, gp_rows, cseq, caps, report, xi, base_secs, up_anchor, nu_den,
        )
        if res is not None:
            return res
    raise RuntimeError("approximation cap exceeded")


def _bipyramidal_diagnostic(
    N, upper, lower, t, alpha, a_up, wall, cn, gp_rows, cseq, caps, report
):
    """Wall diagnostics when no polarized data are supplied.

    The tip is placed directly on the apex edge of the upper half, against
    the wall itself, and the interior clauses are reported as skipped.
    """
    d = N.ambient_dim
    beta = -dot(alpha, t)
    lam = Fraction(beta, dot(alpha, a_up))
    omega = tuple(lam * x for x in frac_vec(a_up))
    shadow = vec_add(list(omega), list(t))
    _check(report, "tip plus distinguished ray on the wall", dot(alpha, shadow) == 0)
    _check(
        report,
        "shadow interior to the wall",
        not is_zero_vec(shadow)
        and wall.contains(clear_denominators(shadow)) == "interior",
    )
    _check(
        report,
        "tip plus ray interior to the cone",
        cn.contains(clear_denominators(shadow)) == "interior",
    )
    jq = None
    for j2 in range(caps.stage_cap + 1):
        if _stage_coords(omega, gp_rows, cseq.denominator(j2)) is not None:
            jq = j2
            break
    _check(report, "tip on a dilation stage", jq is not None)
    for clause in (
        "cone interior to the ambient cone",
        "first pyramid interior to the upper half",
        "polarized data verified",
    ):
        report.append({"clause": clause, "status": "skipped"})
    if jq is None:
        raise RuntimeError("approximation cap exceeded")
    c2 = Cone([list(t)] + [list(g) for g in wall.extremal_rays], d)
    return BipyramidalSplit(
        cone=cn,
        first=upper,
        second=c2,
        omega=omega,
        stage=jq,
        denominator=cseq.denominator(jq),
        checks=_freeze(report),
    )


def _bipyramidal_attempt(
    N, upper, lower, t, polarized, denominator, alpha, a_up, wall, cn,
    gp_rows, cseq, caps, report, xi, base_secs, up_anchor, nu_den,
):
    """One base-shrink attempt for the full bipyramidal construction."""
    d = N.ambient_dim
    nu = Fraction(1, nu_den)
    bverts = [
        tuple((1 - nu) * b + nu * a for b, a in zip(sec, up_anchor))
        for sec in base_secs
    ]
    brays = [list(clear_denominators(v)) for v in bverts]
    ap = None
    for cand in rational_nullspace(brays):
        if dot(cand, a_up) != 0:
            ap = list(primitive_vector(cand))
            break
    if ap is None:
        return None
    if dot(ap, a_up) < 0:
        ap = vec_scale(-1, ap)
    if dot(ap, t) >= 0:
        return None
    beta = -dot(ap, t)
    kb = Cone(brays, d)
    if kb.rank != d - 1:
        return None
    w0 = vec_scale(Fraction(beta, dot(ap, a_up)), list(frac_vec(a_up)))
    z_b = [0] * d
    for r in brays:
        z_b = vec_add(z_b, r)
    ap_gp = [dot(ap, row) for row in gp_rows]
    # z_b carries cleared denominators, so useful tips sit at small
    # fractional multiples of it; sweep downward from the wall scale
    schedule = [Fraction(1, 1 << i) for i in range(caps.offset_cap)]
    schedule += [Fraction(2), Fraction(4)]
    for mu in schedule:
        target = vec_add(w0, vec_scale(mu, z_b))
        shadow_t = vec_add(target, list(t))
        if kb.contains(clear_denominators(shadow_t)) != "interior":
            continue
        for j2 in range(caps.stage_cap + 1):
            D = cseq.denominator(j2)
            c = rational_solve(transpose(gp_rows), list(target))
            if c is None:
                break
            y = [round(ci * D) for ci in c]
            r = dot(ap_gp, y) - D * beta
            if r != 0:
                g_ap = gcd_list(ap_gp)
                if g_ap == 0 or r % g_ap != 0:
                    continue
                u_fix = solve_int([list(ap_gp)], [r])
                if u_fix is None:
                    continue
                y = vec_sub(y, u_fix)
            omega = [Fraction(0)] * d
            for idx, yk in enumerate(y):
                omega = vec_add(omega, vec_scale(Fraction(yk, D), gp_rows[idx]))
            omega = tuple(omega)
            if dot(ap, omega) != beta:
                continue
            if upper.contains(clear_denominators(omega)) == "outside":
                continue
            res = _bipyramidal_verify(
                N, upper, lower, t, polarized, denominator, alpha, ap, beta,
                kb, brays, bverts, omega, j2, D, cn, xi, report,
            )
            if res is not None:
                return res
    return None


def _bipyramidal_verify(
    N, upper, lower, t, polarized, denominator, alpha, ap, beta, kb, brays,
    bverts, omega, stage, D, cn, xi, report,
):
    """Exact verification of one bipyramidal candidate."""
    d = N.ambient_dim
    checks = []
    omega_ray = list(clear_denominators(omega))
    shadow = vec_add(list(omega), list(t))
    conds = [
        ("tip interior to the upper half", upper.contains(omega_ray) == "interior"),
        ("tip plus distinguished ray on the wall", dot(ap, shadow) == 0),
        (
            "shadow interior to the new wall",
            kb.contains(clear_denominators(shadow)) == "interior",
        ),
        (
            "tip plus ray interior to the cone",
            cn.contains(clear_denominators(shadow)) == "interior",
        ),
    ]
    if not all(ok for _cl, ok in conds):
        return None
    c1 = Cone([omega_ray] + brays, d)
    c2 = Cone([list(t)] + brays, d)
    c_all = Cone([omega_ray, list(t)] + brays, d)
    split_ok = cut_by_halfspace(c_all, ap) == c1 and cut_by_halfspace(
        c_all, vec_scale(-1, ap)
    ) == c2
    conds.append(("bipyramid splits along the new wall", split_ok))
    om_sec = _ray_section(xi, omega_ray)
    t_sec = _ray_section(xi, list(t))
    num = dot(ap, om_sec)
    den = num - dot(ap, t_sec)
    cross_ok = den != 0 and 0 < Fraction(num, 1) / den < 1
    if cross_ok:
        theta = Fraction(num) / den
        cross = tuple(o + theta * (tv - o) for o, tv in zip(om_sec, t_sec))
        cross_ok = Polytope(bverts, d).contains(cross) == "interior"
    conds.append(("tip segment crosses the new wall inside", cross_ok))
    conds.append(
        (
            "cone interior to the ambient cone",
            all(cn.contains(list(g)) == "interior" for g in c_all.extremal_rays),
        )
    )
    conds.append(
        (
            "first pyramid interior to the upper half",
            upper.contains(omega_ray) == "interior"
            and all(upper.contains(r) == "interior" for r in brays),
        )
    )
    conds.append(
        (
            "base polytope inside the first pyramid",
            all(
                c1.contains(list(primitive_vector(v))) == "interior"
                for v in polarized.gamma.vertices
            ),
        )
    )
    conds.append(
        (
            "polarized monoid inside the bipyramid",
            all(
                c_all.contains(list(g)) != "outside"
                for g in polarized.monoid.generators
            ),
        )
    )
    if not all(ok for _cl, ok in conds):
        return None
    for cl, ok in conds:
        _check(checks, cl, ok)
    _check(checks, f"tip on stage {stage}", True)
    full = list(report) + checks
    return BipyramidalSplit(
        cone=c_all,
        first=c1,
        second=c2,
        omega=omega,
        stage=stage,
        denominator=D,
        checks=_freeze(full),
    )
