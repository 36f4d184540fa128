"""Exact integer linear algebra: Smith normal form, Z-linear solving, kernels.

Everything here works on lists of lists of Python ints, so results are exact
for arbitrarily large entries.  numpy is deliberately not used in this module.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def mat_copy(m):
    return [row[:] for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k = len(a), len(b)
    p = len(b[0]) if b else 0
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(p):
                    oi[j] += c * bt[j]
    return out


def mat_vec(a, v):
    return [sum(c * x for c, x in zip(row, v)) for row in a]


def _min_pivot(m, r, c):
    """Position of the nonzero entry of least absolute value in m[r:][c:]."""
    best = None
    for i in range(r, len(m)):
        for j in range(c, len(m[0])):
            x = m[i][j]
            if x != 0 and (best is None or abs(x) < abs(m[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(m, want_transforms=False):
    """Return (d, u, v) with u*m*v = d diagonal, divisibility-ordered.

    u, v are unimodular; they are None unless want_transforms is set.
    The diagonal of d is the list of invariant factors (nonnegative).
    """
    a = mat_copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows) if want_transforms else None
    v = identity(cols) if want_transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if v is not None:
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        if u is not None:
            u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        if v is not None:
            for row in v:
                row[dst] += c * row[src]

    t = 0
    while True:
        piv = _min_pivot(a, t, t)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        # force divisibility of the remaining block by the pivot
        p = a[t][t]
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(bad, t, 1)
            continue
        if p < 0:
            for j in range(cols):
                a[t][j] = -a[t][j]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1
        if t == rows or t == cols:
            break
    return a, u, v


def invariant_factors(m):
    if not m or not m[0]:
        return []
    d, _, _ = smith_normal_form(m)
    out = []
    for i in range(min(len(d), len(d[0]))):
        if d[i][i]:
            out.append(abs(d[i][i]))
    return out


def is_primitive_stack(m):
    """True iff the rows of m span a full-rank-primitive sublattice.

    Equivalently, m has all Smith invariant factors equal to 1 (the rows are
    independent and extend to a basis of the ambient lattice).
    """
    if not m:
        return True
    facs = invariant_factors(m)
    return len(facs) == len(m) and all(f == 1 for f in facs)


def solve_integer(m, rhs):
    """One integer solution x of m x = rhs, or None if there is none."""
    rows = len(m)
    if rows == 0:
        return None
    cols = len(m[0])
    d, u, v = smith_normal_form(m, want_transforms=True)
    b = mat_vec(u, rhs)
    y = [0] * cols
    r = min(rows, cols)
    for i in range(r):
        if d[i][i]:
            if b[i] % d[i][i]:
                return None
            y[i] = b[i] // d[i][i]
        elif b[i]:
            return None
    for i in range(r, rows):
        if b[i]:
            return None
    return mat_vec(v, y)


def kernel_basis(m):
    """Basis (list of int vectors) of the integer kernel of m."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0:
        return [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    d, _, v = smith_normal_form(m, want_transforms=True)
    r = 0
    for i in range(min(rows, cols)):
        if d[i][i]:
            r += 1
    basis = []
    for j in range(r, cols):
        basis.append([v[i][j] for i in range(cols)])
    return basis


def rational_rank(m):
    """Rank of m over Q, by fraction-free Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    rows, cols = len(a), len(a[0]) if m else 0
    rank = 0
    for c in range(cols):
        piv = None
        for i in range(rank, rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][c]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(rows):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def make_primitive(v):
    """Divide out the content of v; error on the zero vector."""
    g = vec_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return [x // g for x in v]
