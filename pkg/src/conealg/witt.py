"""Truncated big Witt vectors over the rationals.

A vector of truncation m is stored through its additive normal form: the
power series 1 + a_1 T + ... + a_m T^m with rational coefficients, taken
modulo T^(m+1).  Addition is the series product.  The multiplication is
the unique functorial product that turns the ghost coordinate map into a
componentwise ring isomorphism; over the rationals the ghost map is
bijective, so the product is computed by transport and independently by
expanding both factors into one-term series (1 - r T^n), multiplying
those by a closed formula, and summing.  The two routes are kept separate
so each can check the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Tuple

Rat = Fraction


# ---------------------------------------------------------------------------
# series helpers: lists c[0..m] with c[0] = 1 represent units mod T^(m+1)


def _mul(a, b, m):
    out = [Fraction(0)] * (m + 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(min(len(b), m + 1 - i)):
            if b[j]:
                out[i + j] += ai * b[j]
    return out


def _inv(a, m):
    # inverse of a unit series by the usual coefficient recursion
    out = [Fraction(0)] * (m + 1)
    out[0] = 1 / Fraction(a[0])
    for n in range(1, m + 1):
        s = Fraction(0)
        for i in range(1, min(n, len(a) - 1) + 1):
            if a[i]:
                s += a[i] * out[n - i]
        out[n] = -s * out[0]
    return out


def _log(a, m):
    # log of a unit series with constant term 1, coefficients 1..m
    da = [i * a[i] for i in range(1, len(a))]
    q = _mul(da + [Fraction(0)] * (m - len(da)), _inv(a, m), m - 1)
    return [q[k - 1] / k for k in range(1, m + 1)]

def _exp(l, m):
    # exp of a series with zero constant term, given by coefficients 1..m
    out = [Fraction(0)] * (m + 1)
    out[0] = Fraction(1)
    for k in range(1, m + 1):
        s = Fraction(0)
        for i in range(1, k + 1):
            li = l[i - 1] if i <= len(l) else Fraction(0)
            if li:
                s += i * li * out[k - i]
        out[k] = s / k
    return out


@dataclass(frozen=True)
class WittVector:
    """Unit power series 1 + a_1 T + ... + a_m T^m modulo T^(m+1)."""

    truncation: int
    coeffs: Tuple[Rat, ...]

    def __post_init__(self):
        if self.truncation < 1:
            raise ValueError("truncation must be at least one")
        if len(self.coeffs) != self.truncation:
            raise ValueError("coefficient count does not match the truncation")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def elementary(cls, r, n, m):
        """The one-term series 1 - r T^n at truncation m."""
        if not 1 <= n <= m:
            raise ValueError("term degree outside the truncation window")
        cs = [Fraction(0)] * m
        cs[n - 1] = -Fraction(r)
        return cls(m, tuple(cs))

    def series(self):
        return [Fraction(1)] + list(self.coeffs)

    def __str__(self):
        bits = ["1"]
        for n, c in enumerate(self.coeffs, start=1):
            if not c:
                continue
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            head = "" if mag == 1 else f"{mag}"
            tail = "T" if n == 1 else f"T^{n}"
            bits.append(f"{sign}{head}{tail}")
        return "".join(bits)


def _check_pair(f, g):
    if f.truncation != g.truncation:
        raise ValueError("truncation levels differ")
    return f.truncation


def witt_add(f: WittVector, g: WittVector) -> WittVector:
    m = _check_pair(f, g)
    prod = _mul(f.series(), g.series(), m)
    return WittVector(m, tuple(prod[1:]))


def witt_neg(f: WittVector) -> WittVector:
    inv = _inv(f.series(), f.truncation)
    return WittVector(f.truncation, tuple(inv[1:]))


def ghost(f: WittVector) -> Tuple[Rat, ...]:
    """Ghost coordinates gh_1..gh_m, read off -T f'/f."""
    m = f.truncation
    lg = _log(f.series(), m)
    return tuple(-k * lg[k - 1] for k in range(1, m + 1))


def from_ghost(v) -> WittVector:
    """Invert the ghost map; valid over the rationals."""
    v = [Fraction(x) for x in v]
    m = len(v)
    if m < 1:
        raise ValueError("empty ghost vector")
    a = [Fraction(1)] + [Fraction(0)] * m
    for n in range(1, m + 1):
        s = Fraction(0)
        for i in range(1, n + 1):
            s += v[i - 1] * a[n - i]
        a[n] = -s / n
    return WittVector(m, tuple(a[1:]))


def witt_star(f: WittVector, g: WittVector) -> WittVector:
    """The product, computed through the ghost isomorphism."""
    _check_pair(f, g)
    return from_ghost([a * b for a, b in zip(ghost(f), ghost(g))])


def _star_elementary(r, a, s, b, m):
    # (1 - r T^a) * (1 - s T^b) = (1 - r^(b/d) s^(a/d) T^(ab/d))^d, d = gcd
    d = gcd(a, b)
    n = a * b // d
    acc = WittVector(m, (Fraction(0),) * m)
    if n > m:
        return acc
    piece = WittVector.elementary(Fraction(r) ** (b // d) * Fraction(s) ** (a // d), n, m)
    for _ in range(d):
        acc = witt_add(acc, piece)
    return acc


def witt_star_direct(f: WittVector, g: WittVector) -> WittVector:
    """The product again, through factor expansions and the closed formula."""
    m = _check_pair(f, g)
    rs = factor_expansion(f)
    ss = factor_expansion(g)
    acc = WittVector(m, (Fraction(0),) * m)
    for a, r in enumerate(rs, start=1):
        if not r:
            continue
        for b, s in enumerate(ss, start=1):
            if not s:
                continue
            if a * b // gcd(a, b) > m:
                continue
            acc = witt_add(acc, _star_elementary(r, a, s, b, m))
    return acc


def factor_expansion(f: WittVector) -> Tuple[Rat, ...]:
    """Coordinates r_n with f = prod over n of (1 - r_n T^n) mod T^(m+1)."""
    m = f.truncation
    rest = f.series()
    out = []
    for n in range(1, m + 1):
        r = -rest[n]
        out.append(r)
        if r:
            rest = _mul(rest, _inv(WittVector.elementary(r, n, m).series(), m), m)
    return tuple(out)


def filtration_degree(f: WittVector) -> int:
    """Least n with r_n nonzero in the factor expansion; m+1 for the zero."""
    for n, r in enumerate(factor_expansion(f), start=1):
        if r:
            return n
    return f.truncation + 1


def verschiebung(f: WittVector, n: int) -> WittVector:
    """Substitute T^n for T; the truncation stretches by the same factor."""
    if n < 1:
        raise ValueError("substitution index must be positive")
    m = f.truncation * n
    cs = [Fraction(0)] * m
    for i, c in enumerate(f.coeffs, start=1):
        cs[i * n - 1] = c
    return WittVector(m, tuple(cs))


def frobenius(f: WittVector, n: int) -> WittVector:
    """Push forward along T -> T^(1/n) by multiplying over the n-th roots.

    The product over all substitutions T -> zeta T with zeta^n = 1 keeps
    exactly the exponents divisible by n and multiplies their logs by n;
    both steps are rational, so no root of unity is ever materialised.
    """
    if n < 1:
        raise ValueError("transfer index must be positive")
    m2 = f.truncation // n
    if m2 < 1:
        raise ValueError("truncation too small for the transfer")
    lg = _log(f.series(), f.truncation)
    compressed = [n * lg[j * n - 1] for j in range(1, m2 + 1)]
    out = _exp(compressed, m2)
    return WittVector(m2, tuple(out[1:]))


# ---------------------------------------------------------------------------
# graded rings and the splitting into Witt coordinates


@dataclass(frozen=True)
class GradedElement:
    """Finite sum of monomial terms, each carrying a nonnegative degree.

    A term is (exponent vector, coefficient, degree).  Degree zero is
    reserved for the constant monomial, so the pieces of positive degree
    generate an ideal and the constant term is the augmentation.
    """

    terms: Tuple[Tuple[Tuple[int, ...], Rat, int], ...]

    def __post_init__(self):
        merged: Dict[Tuple[Tuple[int, ...], int], Fraction] = {}
        for mono, coef, deg in self.terms:
            mono = tuple(int(x) for x in mono)
            deg = int(deg)
            if deg < 0:
                raise ValueError("degree must be nonnegative")
            if deg == 0 and any(mono):
                raise ValueError("degree zero holds only the constant term")
            merged[(mono, deg)] = merged.get((mono, deg), Fraction(0)) + Fraction(coef)
        clean = tuple(
            (mono, c, deg)
            for (mono, deg), c in sorted(merged.items())
            if c
        )
        object.__setattr__(self, "terms", clean)


def graded_mul(x: GradedElement, y: GradedElement) -> GradedElement:
    out = []
    for mx, cx, dx in x.terms:
        for my, cy, dy in y.terms:
            out.append((tuple(a + b for a, b in zip(mx, my)), cx * cy, dx + dy))
    return GradedElement(tuple(out))


def weibel_map(x: GradedElement) -> Dict[int, GradedElement]:
    """Split an element into its graded pieces, indexed by degree.

    The index records the exponent the piece would carry on the Witt
    side, so a support bound below by n on degrees becomes the same
    bound on the indices.  Summing the pieces undoes the map.
    """
    pieces: Dict[int, list] = {}
    for mono, coef, deg in x.terms:
        pieces.setdefault(deg, []).append((mono, coef, deg))
    return {deg: GradedElement(tuple(ts)) for deg, ts in sorted(pieces.items())}


def weibel_specialize(image: Dict[int, GradedElement]) -> GradedElement:
    acc = []
    for piece in image.values():
        acc.extend(piece.terms)
    return GradedElement(tuple(acc))
