"""Small exact linear algebra over the integers and rationals.

Matrices are lists of rows.  Integer routines use column operations with
a tracked unimodular transform, enough to solve A x = b over Z and to get
a Z-basis of the integer kernel.
"""

from fractions import Fraction


def _col_echelon(a):
    """Column-style echelon form.

    Returns (H, U) with A U = H, U unimodular, and the nonzero columns of
    H in echelon form (pivot rows strictly increasing).  Also returns the
    list of pivot rows.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    h = [list(map(int, row)) for row in a]
    u = [[int(r == c) for c in range(n)] for r in range(n)]

    def col_op(dst, src, q):
        # column dst -= q * column src
        for row in h:
            row[dst] -= q * row[src]
        for row in u:
            row[dst] -= q * row[src]

    def swap(c1, c2):
        for row in h:
            row[c1], row[c2] = row[c2], row[c1]
        for row in u:
            row[c1], row[c2] = row[c2], row[c1]

    pivots = []
    col = 0
    for r in range(m):
        if col >= n:
            break
        while True:
            nz = [c for c in range(col, n) if h[r][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda c: abs(h[r][c]))
            swap(col, p)
            done = True
            for c in range(col + 1, n):
                if h[r][c]:
                    col_op(c, col, h[r][c] // h[r][col])
                    if h[r][c]:
                        done = False
            if done:
                break
        if h[r][col] if col < n else 0:
            if h[r][col] < 0:
                for row in h:
                    row[col] = -row[col]
                for row in u:
                    row[col] = -row[col]
            pivots.append(r)
            col += 1
    return h, u, pivots


def solve_int(a, b):
    """An integer solution x of A x = b, or None."""
    n = len(a[0])
    h, u, pivots = _col_echelon(a)
    y = [0] * n
    for c, r in enumerate(pivots):
        acc = b[r] - sum(h[r][cc] * y[cc] for cc in range(c))
        if acc % h[r][c]:
            return None
        y[c] = acc // h[r][c]
    x = [sum(u[r][c] * y[c] for c in range(n)) for r in range(n)]
    if any(sum(ai * xi for ai, xi in zip(row, x)) != bi for row, bi in zip(a, b)):
        return None
    return x


def kernel_int(a, n=None):
    """Z-basis (list of vectors) of {x in Z^n : A x = 0}."""
    if not a:
        return [[int(r == c) for r in range(n)] for c in range(n)]
    n = len(a[0])
    _, u, pivots = _col_echelon(a)
    return [[u[r][c] for r in range(n)] for c in range(len(pivots), n)]


def quotient_map(relations, n):
    """Coordinates on Z^n modulo the span of the relation vectors.

    Returns (phi, lifts): phi is a list of integer row vectors giving the
    quotient coordinates, lifts are vectors in Z^n mapping to the unit
    coordinate vectors.  Requires the relation lattice to be saturated,
    which is checked.
    """
    if not relations:
        eye = [[int(r == c) for c in range(n)] for r in range(n)]
        return eye, eye
    h, u, pivots = _col_echelon(relations)
    r = len(pivots)
    for c in range(r):
        if abs(h[pivots[c]][c]) != 1:
            raise ValueError("relation lattice is not saturated")
    vt = [[u[a][b] for a in range(n)] for b in range(n)]  # V = U^T
    vinv = inverse_unimodular(vt)
    phi = vt[r:]
    lifts = [[vinv[a][c] for a in range(n)] for c in range(r, n)]
    return phi, lifts


def inverse_unimodular(u):
    n = len(u)
    aug = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(u)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = [[x for x in row[n:]] for row in aug]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


def rank_q(rows):
    """Rank over Q of a list of rational vectors."""
    rows = [[Fraction(x) for x in r] for r in rows if any(r)]
    if not rows:
        return 0
    n = len(rows[0])
    rank = 0
    for c in range(n):
        p = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        piv = rows[rank][c]
        for r in range(rank + 1, len(rows)):
            if rows[r][c] != 0:
                f = rows[r][c] / piv
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def solve_q(a, b):
    """A rational solution of A x = b (free variables 0), or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    aug = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(a, b)]
    piv_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    if any(all(x == 0 for x in row[:n]) and row[n] != 0 for row in aug):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


def det_int(a):
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return int(d)
