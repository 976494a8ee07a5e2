"""Exact linear algebra: integer Smith normal form and fraction-free
elimination for matrices over Z[t, t^-1] or over Q.

Matrices are lists of rows.  Everything is exact; unimodularity of the
Smith transforms is asserted at the end of the computation.
"""

from __future__ import annotations

from fractions import Fraction

from .laurent import LaurentPoly


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for p in range(k):
            c = ai[p]
            if c:
                bp = b[p]
                for j in range(m):
                    oi[j] += c * bp[j]
    return out


def mat_is_zero(a):
    return all(all(x == 0 for x in row) for row in a)


def det_int(a):
    """Determinant of a square integer matrix by Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a):
    """Smith normal form with transforms.

    Returns (d, u, v) with u * a * v = d, u and v unimodular, and d diagonal
    with d[i] | d[i+1] and nonnegative diagonal entries.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(r) for r in a]
    u = identity(rows)
    v = identity(cols)

    def row_op(i, j, q):  # row i -= q * row j
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col i -= q * col j
        for r in m:
            r[i] -= q * r[j]
        for r in v:
            r[i] -= q * r[j]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # find a pivot of least absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = m[i][j]
                if x != 0 and (best is None or abs(x) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    row_op(i, t, q)
                    if m[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    col_op(j, t, q)
                    if m[t][j]:
                        swap_cols(t, j)
                        dirty = True
        # ensure divisibility of the remaining block by the pivot
        stable = False
        while not stable:
            stable = True
            for i in range(t + 1, rows):
                bad = next((j for j in range(t + 1, cols) if m[i][j] % m[t][t] != 0), None)
                if bad is not None:
                    # add row i to row t, then clean again
                    m[t] = [x + y for x, y in zip(m[t], m[i])]
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                    for j in range(t + 1, cols):
                        if m[t][j]:
                            q = m[t][j] // m[t][t]
                            col_op(j, t, q)
                            if m[t][j]:
                                swap_cols(t, j)
                    for i2 in range(t + 1, rows):
                        if m[i2][t]:
                            q = m[i2][t] // m[t][t]
                            row_op(i2, t, q)
                    stable = False
                    break
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    assert abs(det_int(u)) == 1 and abs(det_int(v)) == 1
    assert mat_mul(mat_mul(u, a), v) == m
    return m, u, v


def diagonal_of(d):
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def homology_groups(boundaries, dims):
    """Homology of a finite chain complex of free Z-modules.

    boundaries[i] is the matrix of d_i : C_i -> C_{i-1} (dims[i-1] x dims[i]);
    returns a list, one entry per dimension, of (betti, [torsion coefficients]).
    """
    top = len(dims) - 1
    ranks = {}
    invariant = {}
    for i, mat in boundaries.items():
        if dims.get(i, 0) == 0 or dims.get(i - 1, 0) == 0:
            ranks[i] = 0
            invariant[i] = []
            continue
        d, _, _ = smith_normal_form(mat)
        diag = [x for x in diagonal_of(d) if x != 0]
        ranks[i] = len(diag)
        invariant[i] = [x for x in diag if x not in (0, 1)]
    out = []
    for i in range(top + 1):
        r_in = ranks.get(i + 1, 0)
        r_out = ranks.get(i, 0)
        betti = dims.get(i, 0) - r_out - r_in
        out.append((betti, invariant.get(i + 1, [])))
    return out


def solve_integer(a, b):
    """One integer solution x of a x = b, or None if none exists."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d, u, v = smith_normal_form(a)
    ub = [sum(u[i][k] * b[k] for k in range(rows)) for i in range(rows)]
    y = [0] * cols
    for i in range(min(rows, cols)):
        di = d[i][i]
        if di == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
    for i in range(min(rows, cols), rows):
        if ub[i] != 0:
            return None
    return [sum(v[i][k] * y[k] for k in range(cols)) for i in range(cols)]


def kernel_basis(a):
    """Integer basis of the kernel of a (columns of v past the rank)."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if rows == 0:
        return [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    d, _, v = smith_normal_form(a)
    rank = len([x for x in diagonal_of(d) if x != 0])
    return [[v[i][j] for i in range(cols)] for j in range(rank, cols)]


# --- generic field wrappers so the same elimination runs over Q(t) and Q ---

class FieldOps:
    """Field operations used by rank/determinant routines."""

    def is_zero(self, x):
        raise NotImplementedError


class RationalOps(FieldOps):
    zero = Fraction(0)
    one = Fraction(1)

    def is_zero(self, x):
        return x == 0

    def mul(self, x, y):
        return x * y

    def sub(self, x, y):
        return x - y

    def div(self, x, y):
        return x / y


class LaurentFieldOps(FieldOps):
    """Q(t) represented lazily: elements are LaurentPoly numerators over an
    implicit common history; we only ever need fraction-free pivoting."""

    zero = LaurentPoly.zero()
    one = LaurentPoly.one()

    def is_zero(self, x):
        return x.is_zero()

    def mul(self, x, y):
        return x * y

    def sub(self, x, y):
        return x - y


def _bareiss_echelon(matrix, ops):
    """Fraction-free row echelon; works over any integral domain.

    Returns (pivot column list, final pivot value, row-permutation sign,
    echelon matrix).  The determinant of a square matrix with full pivot set
    is sign * final pivot.
    """
    m = [list(r) for r in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    prev = ops.one
    sign = 1
    r = 0
    pivots = []
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if not ops.is_zero(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
            sign = -sign
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                num = ops.sub(ops.mul(m[i][j], m[r][c]), ops.mul(m[i][c], m[r][j]))
                m[i][j] = _exact_quot(num, prev, ops)
            m[i][c] = ops.zero
        prev = m[r][c]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots, prev, sign, m


def _exact_quot(num, den, ops):
    if isinstance(ops, LaurentFieldOps):
        return laurent_divexact(num, den)
    return num / den


def laurent_divexact(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Exact division of Laurent polynomials (den must divide num)."""
    from .laurent import poly_divexact
    if num.is_zero():
        return LaurentPoly.zero()
    pn, sn = num.to_intpoly()
    pd, sd = den.to_intpoly()
    q = poly_divexact(pn, pd)
    return LaurentPoly.from_intpoly(q, sn - sd)


def laurent_rank(matrix):
    """Rank over Q(t) of a matrix with LaurentPoly entries."""
    if not matrix or not matrix[0]:
        return 0
    pivots, _, _, _ = _bareiss_echelon(matrix, LaurentFieldOps())
    return len(pivots)


def rational_rank(matrix):
    if not matrix or not matrix[0]:
        return 0
    pivots, _, _, _ = _bareiss_echelon(matrix, RationalOps())
    return len(pivots)


def greedy_independent_columns(matrix, needed, ops):
    """Leftmost maximal independent column subset of prescribed size.

    Deterministic: scans columns left to right, keeping a column iff it
    increases the rank of the kept set.  Raises if fewer than `needed`
    independent columns exist.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    chosen = []
    kept = [[] for _ in range(rows)]
    rank = 0
    for c in range(cols):
        if rank == needed:
            break
        for i in range(rows):
            kept[i].append(matrix[i][c])
        pivots, _, _, _ = _bareiss_echelon(kept, ops)
        if len(pivots) > rank:
            rank = len(pivots)
            chosen.append(c)
        else:
            for i in range(rows):
                kept[i].pop()
    if rank != needed:
        raise ValueError(f"needed {needed} independent columns, found {rank}")
    return chosen


def laurent_det(matrix) -> LaurentPoly:
    """Exact determinant of a square matrix over Z[t, t^-1]."""
    n = len(matrix)
    if n == 0:
        return LaurentPoly.one()
    pivots, last, sign, _ = _bareiss_echelon(matrix, LaurentFieldOps())
    if len(pivots) < n:
        return LaurentPoly.zero()
    return last if sign == 1 else -last


def rational_det(matrix) -> Fraction:
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    pivots, last, sign, _ = _bareiss_echelon(matrix, RationalOps())
    if len(pivots) < n:
        return Fraction(0)
    return last if sign == 1 else -last
