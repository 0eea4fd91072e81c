"""Dilation towers M/(c1...cj), their seminormality-in-the-limit and
excision witnesses, and the edge-inversion stage monoids N_c.

A dilation tower is never materialized as a limit object: every operation
takes an explicit stage index together with the dilation sequence, and a
stage is represented by the scalar denominator c1...cj over the base
monoid, so membership always reduces to the base lattice.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .cone import Cone, cut_by_halfspace
from .linalg import dot, rational_nullspace, vec_sub
from .monoid import (
    AffineMonoid,
    free_basis_in_region,
    hilbert_basis,
    interior_ideal,
    invert_extremal,
)
from .polytope import cross_section


@dataclass(frozen=True)
class CSeq:
    """Dilation sequence: finite prefix plus a constant tail, entries >= 2."""

    prefix: tuple = ()
    tail: int = 2

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(c) for c in self.prefix))
        object.__setattr__(self, "tail", int(self.tail))
        if any(c < 2 for c in self.prefix) or self.tail < 2:
            raise ValueError("every dilation entry must be at least 2")

    def entry(self, j):
        """c_j for j >= 1."""
        if j < 1:
            raise ValueError("dilation entries are indexed from 1")
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        return self.tail

    def denominator(self, j):
        """c_1 * ... * c_j; 1 for j = 0."""
        if j < 0:
            raise ValueError("stage index must be nonnegative")
        out = 1
        for i in range(1, j + 1):
            out *= self.entry(i)
        return out


class DilationStage:
    """Stage j of the tower: the monoid M/(c1...cj) over (1/(c1...cj))gp(M)."""

    def __init__(self, base, cseq, j):
        if j < 0:
            raise ValueError("stage index must be nonnegative")
        self.base = base
        self.cseq = cseq
        self.j = j
        self.denominator = cseq.denominator(j)

    def __repr__(self):
        return f"DilationStage(j={self.j}, denominator={self.denominator})"

    @property
    def generators(self):
        D = self.denominator
        return tuple(
            tuple(Fraction(c, D) for c in g) for g in self.base.generators
        )

    def _scaled(self, x):
        v = tuple(Fraction(c) * self.denominator for c in x)
        if any(c.denominator != 1 for c in v):
            return None
        return tuple(int(c) for c in v)

    def __contains__(self, x):
        v = self._scaled(x)
        return v is not None and v in self.base

    def in_gp(self, x):
        v = self._scaled(x)
        return v is not None and self.base.in_gp(v)

    def in_interior(self, x):
        v = self._scaled(x)
        if v is None:
            return False
        return v in interior_ideal(self.base)


def stage(M, cseq, j):
    return DilationStage(M, cseq, j)


def seminormal_limit_witness(M, cseq, m, j, step_cap=4):
    """Least stage index j' >= j with m in stage j', given 2m, 3m in stage j.

    Always j' <= j+1: 2m, 3m in stage j force c*m in stage j for every
    c >= 2, in particular c_{j+1}*m, which exhibits m at stage j+1.
    """
    m = tuple(Fraction(c) for c in m)
    sj = DilationStage(M, cseq, j)
    two = tuple(2 * c for c in m)
    three = tuple(3 * c for c in m)
    if two not in sj or three not in sj:
        raise ValueError("2m or 3m not in stage")
    for jp in range(j, j + step_cap + 1):
        if m in DilationStage(M, cseq, jp):
            return jp
    raise ValueError("seminormal limit witness not found")


def _least_interior_element(M):
    """Lexicographically least minimal element of the ideal int(M)."""
    ideal = interior_ideal(M)
    big = max(abs(c) for r in M.cone.extremal_rays for c in r)
    bound = M.rank * big
    for _ in range(6):
        elems = ideal.minimal_elements_in_box(bound)
        if elems:
            return elems[0]
        bound *= 2
    raise ValueError("no interior element found")


@dataclass(frozen=True)
class ExcisionWitness:
    b: tuple
    u: tuple
    v: tuple
    stage: DilationStage


def excision_witness(M, cseq, a, j=0, stage_cap=16):
    """Factor each interior monomial a_i as b_i + u + v with every part
    interior at a common later stage.

    The recipe follows the one-element splitting m = m/c + (c-1)(m/c):
    pick the least interior m, find j' with all a_i - m/(c1...cj')
    interior one stage further down, and put u = m/(c1...cj'c_{j'+1}),
    v = (c_{j'+1}-1)u.
    """
    if not a:
        raise ValueError("empty monomial batch")
    a = [tuple(Fraction(c) for c in ai) for ai in a]
    sj = DilationStage(M, cseq, j)
    for ai in a:
        if not sj.in_interior(ai):
            raise ValueError("batch element is not interior")
    m = _least_interior_element(M)
    for jp in range(j, j + stage_cap + 1):
        D = cseq.denominator(jp)
        c_next = cseq.entry(jp + 1)
        s_out = DilationStage(M, cseq, jp + 1)
        mjp = tuple(Fraction(c, D) for c in m)
        b = [tuple(x - y for x, y in zip(ai, mjp)) for ai in a]
        if not all(s_out.in_interior(bi) for bi in b):
            continue
        u = tuple(Fraction(c, D * c_next) for c in m)
        v = tuple((c_next - 1) * c for c in u)
        assert s_out.in_interior(u) and s_out.in_interior(v)
        for ai, bi in zip(a, b):
            assert all(
                x == y + z + w for x, y, z, w in zip(ai, bi, u, v)
            )
        return ExcisionWitness(b=tuple(b), u=u, v=v, stage=s_out)
    raise ValueError("excision stage cap exceeded")


# ---------------------------------------------------------------------------
# stage monoids N_c for an inverted extremal edge


def _minimal_shift_into(M, x, t):
    """Least k >= 0 with x + k t in M, for x in Z_+(-t) + M (normal M)."""
    k = 0
    cur = tuple(x)
    while k <= 2 ** 20:
        if cur in M:
            return k
        cur = tuple(a + b for a, b in zip(cur, t))
        k += 1
    raise ValueError("no shift into the monoid")


def pyrapp_stage(M, t, c):
    """The stage monoid N_c = L_c n (Z_+(-t) + M) for an inverted edge.

    L_c is the lattice spanned by b_i - c t where the b_i are canonical
    monoid lifts of a free basis of the inverted quotient.  Returns N_c as
    a monoid in ambient coordinates; it is normal with trivial units and
    rank M - 1, and Zt + N_c recovers Z_+(-t) + M.
    """
    c = int(c)
    if c < 1:
        raise ValueError("stage parameter c must be >= 1")
    inv = invert_extremal(M, t)
    t = inv.direction
    N = inv.monoid
    d = M.rank
    if d <= 1:
        return AffineMonoid([], M.ambient_dim)
    betas = free_basis_in_region(N, cross_section(N.cone))
    b = []
    for beta in betas:
        x = tuple(
            sum(beta[i] * inv.section[i][j] for i in range(d - 1))
            for j in range(M.ambient_dim)
        )
        k = _minimal_shift_into(M, x, t)
        b.append(tuple(a + k * s for a, s in zip(x, t)))
    lat = [vec_sub(bi, tuple(c * s for s in t)) for bi in b]
    # cone over span(L_c) cut by the facets through t
    gens = list(lat) + [tuple(-v for v in r) for r in lat]
    K = Cone(gens, M.ambient_dim)
    for h in M.cone.facet_normals:
        if dot(h, t) == 0:
            K = cut_by_halfspace(K, h)
    assert K.is_pointed
    hb = hilbert_basis(K, lat)
    out = AffineMonoid(hb, M.ambient_dim, assume_normal=True)
    assert out.rank == d - 1 and out.is_pointed
    return out


def in_zt_plus(t, stage_monoid, x):
    """Membership of x in Z t + N_c, decided through the slice lattice.

    t is transverse to span(N_c), so x - a t lies in that span for exactly
    one rational a; x belongs to Z t + N_c iff a is an integer and the
    shifted point belongs to N_c.
    """
    x = tuple(int(v) for v in x)
    t = tuple(int(v) for v in t)
    span = [list(r) for r in stage_monoid.cone.span_basis]
    if not span:
        span = [[0] * len(t)]
    phi = None
    for cand in rational_nullspace(span):
        if dot(cand, t) != 0:
            phi = cand
            break
    assert phi is not None, "edge direction lies in the slice span"
    a = Fraction(dot(phi, x)) / Fraction(dot(phi, t))
    if a.denominator != 1:
        return False
    shifted = tuple(xi - int(a) * ti for xi, ti in zip(x, t))
    return shifted in stage_monoid
