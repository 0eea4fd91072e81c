"""Exact integer and rational linear algebra on tuples.

Vectors are tuples of ints (lattice vectors) or Fractions (rational points).
Matrices are lists/tuples of row vectors.  Everything here is exact; numpy is
deliberately not used in this module.
"""

from fractions import Fraction
from math import gcd


def ext_gcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def gcd_list(xs):
    g = 0
    for x in xs:
        g = gcd(g, int(x))
        if g == 1:
            return 1
    return g


def lcm(a, b):
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


def clear_denominators(v):
    """Scale a rational vector to an integer vector along the same ray."""
    den = 1
    for x in v:
        f = Fraction(x)
        den = lcm(den, f.denominator)
    return tuple(int(Fraction(x) * den) for x in v)


def primitive_vector(v):
    """Shortest integer vector with the same direction as v (zero stays zero)."""
    w = clear_denominators(v)
    g = gcd_list(w)
    if g == 0:
        return tuple(0 for _ in w)
    return tuple(x // g for x in w)


def frac_vec(v):
    return tuple(Fraction(x) for x in v)


def dot(u, v):
    s = 0
    for a, b in zip(u, v):
        s += a * b
    return s


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    return tuple(c * x for x in v)


def is_zero_vec(v):
    return all(x == 0 for x in v)


def transpose(rows):
    return [list(col) for col in zip(*rows)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    Bt = list(zip(*B))
    return [[dot(row, col) for col in Bt] for row in A]


def mat_vec(A, v):
    return tuple(dot(row, v) for row in A)


# ---------------------------------------------------------------------------
# rational Gaussian elimination


def _frac_rows(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rational_rank(rows):
    if not rows:
        return 0
    A = _frac_rows(rows)
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, m):
            if A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [A[i][j] - f * A[r][j] for j in range(n)]
        r += 1
        if r == m:
            break
    return r


def rational_solve(rows, rhs):
    """One rational solution x of rows * x = rhs, or None.  Free vars are 0."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    A = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    r = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [A[i][j] - f * A[r][j] for j in range(n + 1)]
        pivots.append((r, c))
        r += 1
    for i in range(r, m):
        if A[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in pivots:
        x[c] = A[i][n] / A[i][c]
    return tuple(x)


def rational_nullspace(rows):
    """Basis of {x rational : rows * x = 0} as Fraction tuples."""
    m = len(rows)
    if m == 0:
        raise ValueError("ambient dimension unknown for empty row list")
    n = len(rows[0])
    A = _frac_rows(rows)
    r = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [A[i][j] - f * A[r][j] for j in range(n)]
        pivots.append((r, c))
        r += 1
    pivot_cols = {c for _, c in pivots}
    basis = []
    for c in range(n):
        if c in pivot_cols:
            continue
        x = [Fraction(0)] * n
        x[c] = Fraction(1)
        for i, pc in pivots:
            x[pc] = -A[i][c] / A[i][pc]
        basis.append(tuple(x))
    return basis


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms


def hnf(rows):
    """Row-style Hermite normal form.

    Returns (H, U, pivots) with U unimodular, U*A = H, pivot entries positive,
    entries above each pivot reduced into [0, pivot).  H keeps zero rows.
    """
    A = [[int(x) for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    r = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        U[r], U[piv] = U[piv], U[r]
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = ext_gcd(a, b)
            p, q = a // g, b // g
            A[r], A[i] = (
                [x * A[r][j] + y * A[i][j] for j in range(n)],
                [-q * A[r][j] + p * A[i][j] for j in range(n)],
            )
            U[r], U[i] = (
                [x * U[r][j] + y * U[i][j] for j in range(m)],
                [-q * U[r][j] + p * U[i][j] for j in range(m)],
            )
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q != 0:
                A[i] = [A[i][j] - q * A[r][j] for j in range(n)]
                U[i] = [U[i][j] - q * U[r][j] for j in range(m)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    H = [tuple(row) for row in A]
    return H, U, pivots


def hnf_basis(rows):
    """Canonical basis (nonzero HNF rows) of the lattice generated by rows."""
    if not rows:
        return []
    H, _, pivots = hnf(rows)
    return [H[i] for i in range(len(pivots))]


def lattice_coords(v, hrows):
    """Integer coordinates of v in the HNF basis hrows, or None."""
    w = [int(x) for x in v]
    coords = []
    for h in hrows:
        c = next((j for j in range(len(h)) if h[j] != 0), None)
        if c is None:
            coords.append(0)
            continue
        if w[c] % h[c] != 0:
            return None
        q = w[c] // h[c]
        coords.append(q)
        if q != 0:
            w = [w[j] - q * h[j] for j in range(len(w))]
    if any(x != 0 for x in w):
        return None
    return tuple(coords)


def in_lattice(v, hrows):
    return lattice_coords(v, hrows) is not None


def snf(rows):
    """Smith normal form.  Returns (D, U, V) with U*A*V = D diagonal,
    d_1 | d_2 | ... , all d_i >= 0."""
    A = [[int(x) for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        A[i] = [A[i][k] + q * A[j][k] for k in range(n)]
        U[i] = [U[i][k] + q * U[j][k] for k in range(m)]

    def add_col(i, j, q):
        # col_i += q * col_j
        for row in A:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    t = 0
    while t < min(m, n):
        # locate a nonzero entry in the trailing block
        pos = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best):
                    best = abs(A[i][j])
                    pos = (i, j)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                    dirty = True
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                    dirty = True
            if not dirty:
                break
        # divisibility fix-up: d_t must divide the whole trailing block
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t] != 0:
                    add_row(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    D = [tuple(row) for row in A]
    return D, U, V


def integer_kernel(rows, n=None):
    """Basis of the saturated lattice {x in Z^n : rows * x = 0}."""
    m = len(rows)
    if m == 0:
        if n is None:
            raise ValueError("ambient dimension required for empty row list")
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    n = len(rows[0])
    At = transpose(rows)
    _, U, pivots = hnf(At)
    return [tuple(U[i]) for i in range(len(pivots), n)]


def saturate_rows(rows, n=None):
    """Basis of span(rows) n Z^n, the saturation of the row lattice."""
    if not rows:
        return []
    ker = integer_kernel(rows)
    sat = integer_kernel(ker, n=len(rows[0]))
    return hnf_basis(sat)


def det_int(rows):
    """Determinant of a square integer matrix (fraction-free via Fractions)."""
    n = len(rows)
    if n == 0:
        return 1
    A = _frac_rows(rows)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [A[i][j] - f * A[c][j] for j in range(n)]
    assert det.denominator == 1
    return int(det)


def int_matrix_inverse(M):
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [A[i][j] - f * A[c][j] for j in range(2 * n)]
    out = []
    for i in range(n):
        row = A[i][n:]
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def solve_int(rows, rhs):
    """One integer solution x of rows * x = rhs, or None."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    D, U, V = snf(rows)
    b = mat_vec(U, rhs)
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d == 0:
            if b[i] != 0:
                return None
        else:
            if b[i] % d != 0:
                return None
            if i < n:
                y[i] = b[i] // d
    return mat_vec(V, y)


def lattice_index(sub_rows, sup_rows):
    """Index [sup : sub] for full-rank sublattice sub of sup (same span)."""
    Hsub = hnf_basis(sub_rows)
    Hsup = hnf_basis(sup_rows)
    if len(Hsub) != len(Hsup):
        raise ValueError("lattices have different rank")
    C = []
    for v in Hsub:
        c = lattice_coords(v, Hsup)
        if c is None:
            raise ValueError("not a sublattice")
        C.append(list(c))
    return abs(det_int(C))


def unimodular_completion(v):
    """Rows forming a basis of Z^n whose first row is the primitive vector v."""
    v = tuple(int(x) for x in v)
    if gcd_list(v) != 1:
        raise ValueError("vector is not primitive")
    col = [[x] for x in v]
    H, U, pivots = hnf(col)
    assert H[0][0] == 1 and len(pivots) == 1
    W = int_matrix_inverse(U)
    basis = [tuple(W[i][j] for i in range(len(v))) for j in range(len(v))]
    assert basis[0] == v
    return basis
