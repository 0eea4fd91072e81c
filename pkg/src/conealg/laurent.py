"""Invertible matrices over one-variable Laurent polynomials.

The central operation splits such a matrix into a frame of nonpositive
powers, a diagonal of pure powers, and a frame of nonnegative powers.
The diagonal exponents are the complete invariant used everywhere else:
they bound the polarization interval of a transition matrix, decide
equivalence of transition data, and survive one-sided recombination.

Coefficients are exact rationals throughout.  The splitting is computed
by column reduction: after clearing denominators in t, right elementary
operations over the polynomial ring make the leading-column-coefficient
matrix invertible, and the reduced matrix factors through the diagonal
directly.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import rational_nullspace


class LaurentPoly:
    """Finite rational combination of integer powers of one variable.

    Immutable; ``terms`` is a sorted tuple of (exponent, coefficient)
    pairs with no zero coefficients.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc = {}
        for e, c in items:
            e = int(e)
            c = acc.get(e, Fraction(0)) + Fraction(c)
            if c:
                acc[e] = c
            elif e in acc:
                del acc[e]
        self.terms = tuple(sorted(acc.items()))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls):
        return cls({0: Fraction(1)})

    @classmethod
    def const(cls, c):
        return cls({0: Fraction(c)})

    @classmethod
    def variable(cls, d=1):
        return cls({d: Fraction(1)})

    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_monomial(self):
        return len(self.terms) == 1

    @property
    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def low(self):
        if not self.terms:
            raise ValueError("zero polynomial has no order")
        return self.terms[0][0]

    @property
    def high(self):
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return self.terms[-1][0]

    def coeff(self, e):
        for exp, c in self.terms:
            if exp == e:
                return c
        return Fraction(0)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        return LaurentPoly(self.terms + other.terms)

    def __neg__(self):
        return LaurentPoly([(e, -c) for e, c in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return LaurentPoly(acc)

    def scaled(self, c):
        c = Fraction(c)
        return LaurentPoly([(e, c * x) for e, x in self.terms])

    def monomial_inverse(self):
        if not self.is_monomial:
            raise ValueError("only monomials are invertible")
        e, c = self.terms[0]
        return LaurentPoly({-e: Fraction(1) / c})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                body = str(c)
            else:
                var = "t" if e == 1 else f"t^{e}"
                if c == 1:
                    body = var
                elif c == -1:
                    body = f"-{var}"
                else:
                    body = f"{c}*{var}"
            if parts and not body.startswith("-"):
                parts.append("+" + body)
            else:
                parts.append(body)
        return "".join(parts)

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"


_ZP = LaurentPoly.zero()


class LaurentMatrix:
    """Rectangular matrix of Laurent polynomials; square for most uses."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        w = len(rows[0])
        for r in rows:
            if len(r) != w:
                raise ValueError("ragged matrix rows")
            for p in r:
                if not isinstance(p, LaurentPoly):
                    raise ValueError("entries must be Laurent polynomials")
        self.rows = rows

    @classmethod
    def from_rows(cls, rows):
        return cls(rows)

    @classmethod
    def identity(cls, n):
        one = LaurentPoly.one()
        return cls([[one if i == j else _ZP for j in range(n)] for i in range(n)])

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def n(self):
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    def __eq__(self, other):
        return isinstance(other, LaurentMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("matrix sizes differ")
        out = []
        for r in self.rows:
            row = []
            for j in range(other.ncols):
                s = _ZP
                for k, p in enumerate(r):
                    if p:
                        s = s + p * other.rows[k][j]
                row.append(s)
            out.append(row)
        return LaurentMatrix(out)

    def scaled(self, p):
        return LaurentMatrix([[p * x for x in r] for r in self.rows])

    def direct_sum(self, other):
        out = []
        for r in self.rows:
            out.append(list(r) + [_ZP] * other.ncols)
        for r in other.rows:
            out.append([_ZP] * self.ncols + list(r))
        return LaurentMatrix(out)

    def low(self):
        exps = [p.low for r in self.rows for p in r if p]
        return min(exps, default=0)

    def high(self):
        exps = [p.high for r in self.rows for p in r if p]
        return max(exps, default=0)

    def det(self):
        n = self.n
        if n == 1:
            return self.rows[0][0]
        total = _ZP
        sign = 1
        for j in range(n):
            p = self.rows[0][j]
            if p:
                minor = LaurentMatrix(
                    [
                        [r[k] for k in range(n) if k != j]
                        for r in self.rows[1:]
                    ]
                )
                term = p * minor.det()
                total = total + (term if sign > 0 else -term)
            sign = -sign
        return total

    def is_invertible(self):
        d = self.det()
        return bool(d) and d.is_monomial

    def inverse(self):
        d = self.det()
        if not d or not d.is_monomial:
            raise ValueError("matrix is not invertible over Laurent polynomials")
        n = self.n
        dinv = d.monomial_inverse()
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [
                    [self.rows[r][c] for c in range(n) if c != j]
                    for r in range(n)
                    if r != i
                ]
                if minor:
                    cof = LaurentMatrix(minor).det()
                else:
                    cof = LaurentPoly.one()
                if (i + j) % 2:
                    cof = -cof
                # adjugate transposes the cofactor grid
                out[j][i] = cof * dinv
        return LaurentMatrix(out)

    def __str__(self):
        return "[" + "; ".join(", ".join(str(p) for p in r) for r in self.rows) + "]"

    def __repr__(self):
        return f"LaurentMatrix({str(self)!r})"


@dataclass(frozen=True)
class BundleTriple:
    """Transition data of rank ``rank`` along the distinguished variable.

    ``trivial_class`` is an unverified annotation: whether the reduced
    class of the matrix is declared trivial by the caller.  Only the
    determinant-is-a-unit consequence is checkable here, and it is
    enforced as the invertibility invariant.
    """

    rank: int
    theta: LaurentMatrix
    trivial_class: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.theta.n != self.rank:
            raise ValueError("rank does not match the matrix size")
        if not self.theta.is_invertible():
            raise ValueError("bundle matrix must be invertible")


def _column_kernel(mat_rows):
    """First basis vector of the rational kernel of the column map, or None."""
    basis = rational_nullspace([list(r) for r in mat_rows])
    for v in basis:
        if any(x != 0 for x in v):
            return list(v)
    return None


def birkhoff_factorize(theta):
    """Split theta as sigma^-1 . diag(t^u) . tau^-1 with one-sided frames.

    Returns (sigma, u, tau) with sigma . theta . tau = diag(t^u), where
    sigma is invertible over nonpositive powers, tau over nonnegative
    powers, and u is sorted descending.  The exponent sum equals the
    order of det(theta).  Raises ValueError when theta is not invertible
    over Laurent polynomials.
    """
    d = theta.det()
    if not d or not d.is_monomial:
        raise ValueError("matrix is not invertible over Laurent polynomials")
    n = theta.n
    shift = max(0, -theta.low())
    tpow = LaurentPoly.variable(1)
    a = [[LaurentPoly.variable(shift) * p for p in r] for r in theta.rows]
    w = [[LaurentPoly.one() if i == j else _ZP for j in range(n)] for i in range(n)]
    while True:
        degs = [max(a[i][j].high for i in range(n) if a[i][j]) for j in range(n)]
        lead = [[a[i][j].coeff(degs[j]) for j in range(n)] for i in range(n)]
        lam = _column_kernel(lead)
        if lam is None:
            break
        support = [j for j in range(n) if lam[j] != 0]
        piv = max(support, key=lambda j: (degs[j], j))
        for j in support:
            if j == piv:
                continue
            gap = degs[piv] - degs[j]
            factor = LaurentPoly({gap: Fraction(lam[j]) / Fraction(lam[piv])})
            for i in range(n):
                a[i][piv] = a[i][piv] + factor * a[i][j]
                w[i][piv] = w[i][piv] + factor * w[i][j]
    # reduced matrix factors as (t^-d_j columns) . diag(t^d_j)
    u = [degs[j] - shift for j in range(n)]
    c_rows = [
        [a[i][j] * LaurentPoly.variable(-degs[j]) for j in range(n)]
        for i in range(n)
    ]
    order = sorted(range(n), key=lambda j: (-u[j], j))
    perm = [[LaurentPoly.one() if order[i] == j else _ZP for j in range(n)] for i in range(n)]
    pm = LaurentMatrix(perm)
    sigma = pm @ LaurentMatrix(c_rows).inverse()
    tau = LaurentMatrix(w) @ LaurentMatrix(
        [[LaurentPoly.one() if order[j] == i else _ZP for j in range(n)] for i in range(n)]
    )
    u = tuple(u[j] for j in order)
    target = LaurentMatrix(
        [[LaurentPoly({u[i]: Fraction(1)}) if i == j else _ZP for j in range(n)] for i in range(n)]
    )
    if sigma @ theta @ tau != target:
        raise RuntimeError("splitting postcondition failed")
    if sigma.high() > 0 or tau.low() < 0:
        raise RuntimeError("splitting frames are not one-sided")
    if sum(u) != d.low:
        raise RuntimeError("splitting exponents disagree with the determinant")
    return sigma, u, tau


def polarization_interval(triple):
    """Smallest exponent window [a, b] containing the splitting type."""
    _, u, _ = birkhoff_factorize(triple.theta)
    return (min(u), max(u))


def koszul_twist(triple, mode):
    """Twist transition data by the distinguished variable.

    ``mode`` is "double" for the middle term (two copies, each twisted
    once) or "square" for the twice-twisted end term.
    """
    t = LaurentPoly.variable(1)
    if mode == "double":
        half = triple.theta.scaled(t)
        return BundleTriple(2 * triple.rank, half.direct_sum(half), triple.trivial_class)
    if mode == "square":
        return BundleTriple(triple.rank, triple.theta.scaled(t * t), triple.trivial_class)
    raise ValueError(f"unknown twist mode: {mode}")


def koszul_diagram_checks(triple):
    """Exact identities tying a matrix to its twisted resolutions.

    The two-row diagram with vertical maps (square twist, double twist,
    original) must have exact rows and commuting squares; each clause is
    a literal matrix identity over Laurent polynomials.
    """
    n = triple.rank
    t = LaurentPoly.variable(1)
    ti = LaurentPoly.variable(-1)
    ident = LaurentMatrix.identity(n)
    zero = LaurentMatrix([[_ZP] * n for _ in range(n)])
    j_top = LaurentMatrix(list(ident.scaled(t).rows) + list(ident.scaled(LaurentPoly.const(-1)).rows))
    s_top = LaurentMatrix([list(a) + list(b) for a, b in zip(ident.rows, ident.scaled(t).rows)])
    j_bot = LaurentMatrix(list(ident.rows) + list(ident.scaled(-ti).rows))
    s_bot = LaurentMatrix([list(a) + list(b) for a, b in zip(ident.scaled(ti).rows, ident.rows)])
    f1 = koszul_twist(triple, "double").theta
    f2 = koszul_twist(triple, "square").theta
    report = []
    checks = [
        ("top row composes to zero", s_top @ j_top == zero),
        ("bottom row composes to zero", s_bot @ j_bot == zero),
        ("left square commutes", f1 @ j_top == j_bot @ f2),
        ("right square commutes", triple.theta @ s_top == s_bot @ f1),
    ]
    for clause, ok in checks:
        report.append({"clause": clause, "status": "pass" if ok else "fail"})
    return report


def equivalent_triples(theta1, theta2, degree_cap=None):
    """Decide one-sided equivalence of two transition matrices.

    Returns (True, (left, right)) with left . theta1 . right = theta2,
    left invertible over nonpositive powers and right over nonnegative
    powers, or (False, reason).  The splitting exponents are a complete
    invariant here, so the decision is exact; ``degree_cap`` is accepted
    for callers budgeting a search but is never needed.
    """
    if theta1.n != theta2.n:
        raise ValueError("matrix sizes differ")
    s1, u1, t1 = birkhoff_factorize(theta1)
    s2, u2, t2 = birkhoff_factorize(theta2)
    if u1 != u2:
        return False, "distinct splitting exponents"
    left = s2.inverse() @ s1
    right = t1 @ t2.inverse()
    if left @ theta1 @ right != theta2:
        raise RuntimeError("equivalence witness failed verification")
    return True, (left, right)
