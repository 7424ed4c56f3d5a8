"""Integer-matrix linear algebra: column Hermite form, kernels, solving.

Everything here is exact over the integers.  The Hermite routine tracks the
unimodular column transform so kernels and preimages of image-lattice points
come out for free; Smith form (for subgroup indices) is delegated to sympy.
"""

from __future__ import annotations

from typing import Optional, Sequence


def column_hnf(
    mat: Sequence[Sequence[int]],
) -> tuple[list[list[int]], list[list[int]], list[tuple[int, int]]]:
    """Column-style Hermite normal form H = M * U with U unimodular.

    Returns (H, U, pivots) where pivots lists (row, col) pairs with strictly
    increasing rows and cols 0..rank-1; pivot entries are positive, entries
    to their left in the pivot row are reduced to [0, pivot); columns past
    the rank are zero.
    """
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    h = [list(row) for row in mat]
    u = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_axpy(dst: int, src: int, q: int) -> None:
        if not q:
            return
        for row in h:
            row[dst] -= q * row[src]
        for row in u:
            row[dst] -= q * row[src]

    def col_swap(a: int, b: int) -> None:
        if a == b:
            return
        for row in h:
            row[a], row[b] = row[b], row[a]
        for row in u:
            row[a], row[b] = row[b], row[a]

    def col_negate(c: int) -> None:
        for row in h:
            row[c] = -row[c]
        for row in u:
            row[c] = -row[c]

    pivots: list[tuple[int, int]] = []
    c = 0
    for r in range(nrows):
        if c == ncols:
            break
        piv = next((j for j in range(c, ncols) if h[r][j]), None)
        if piv is None:
            continue
        col_swap(c, piv)
        for j in range(c + 1, ncols):
            # euclidean gcd steps between columns c and j on row r
            while h[r][j]:
                col_axpy(j, c, h[r][j] // h[r][c])
                if h[r][j]:
                    col_swap(c, j)
        if h[r][c] < 0:
            col_negate(c)
        for j in range(c):
            col_axpy(j, c, h[r][j] // h[r][c])
        pivots.append((r, c))
        c += 1
    return h, u, pivots


def integer_kernel(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {n : mat n = 0} over the integers, as column vectors.

    Complete by unimodularity: every integer kernel element is an integer
    combination of the returned vectors.
    """
    h, u, pivots = column_hnf(mat)
    rank = len(pivots)
    ncols = len(u)
    return [[u[i][j] for i in range(ncols)] for j in range(rank, ncols)]


def solve_in_lattice(
    h: Sequence[Sequence[int]],
    pivots: Sequence[tuple[int, int]],
    target: Sequence[int],
) -> Optional[list[int]]:
    """Coefficients c with (nonzero columns of H) * c = target, or None.

    H must come from column_hnf; forward substitution on the pivot rows,
    then full verification so non-pivot rows reject off-lattice targets.
    """
    coeffs = [0] * len(pivots)
    for idx, (r, c) in enumerate(pivots):
        acc = target[r]
        for j in range(idx):
            acc -= h[r][j] * coeffs[j]
        d = h[r][c]
        if acc % d:
            return None
        coeffs[idx] = acc // d
    for r in range(len(h)):
        acc = sum(h[r][j] * coeffs[j] for j in range(len(pivots)))
        if acc != target[r]:
            return None
    return coeffs


def lattice_index(columns: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by the given column vectors in Z^k.

    Requires a square full-rank system; computed as the product of the
    invariant factors of the matrix.
    """
    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors

    m = Matrix([[col[i] for col in columns] for i in range(len(columns[0]))])
    factors = invariant_factors(m)
    out = 1
    for f in factors:
        f = int(f)
        if f == 0:
            raise ValueError("columns do not span a finite-index sublattice")
        out *= abs(f)
    return out


def gram_lll(gram: Sequence[Sequence], delta=None) -> list[list[int]]:
    """LLL reduction of a lattice given only its Gram matrix.

    Takes an exact positive-definite Gram matrix (Fraction entries) and
    returns a unimodular integer transform whose rows are the coordinates
    of the reduced basis in the input basis.  Working from the Gram form
    instead of coordinates lets a lattice be reduced under any rational
    quadratic form, not just the ambient dot product.
    """
    from fractions import Fraction

    if delta is None:
        delta = Fraction(3, 4)
    n = len(gram)
    gp = [[Fraction(x) for x in row] for row in gram]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n

    def refresh(upto: int) -> None:
        for i in range(upto + 1):
            for j in range(i):
                s = gp[i][j]
                for l in range(j):
                    s -= mu[j][l] * mu[i][l] * bstar[l]
                mu[i][j] = s / bstar[j]
            s = gp[i][i]
            for l in range(i):
                s -= mu[i][l] * mu[i][l] * bstar[l]
            bstar[i] = s
            if bstar[i] <= 0:
                raise ValueError("gram matrix is not positive definite")

    def row_op(i: int, j: int, q: int) -> None:
        # u_i <- u_i - q u_j, mirrored on the gram form
        for l in range(n):
            u[i][l] -= q * u[j][l]
        for l in range(n):
            gp[i][l] -= q * gp[j][l]
        for l in range(n):
            gp[l][i] -= q * gp[l][j]

    def swap(i: int) -> None:
        u[i], u[i - 1] = u[i - 1], u[i]
        gp[i], gp[i - 1] = gp[i - 1], gp[i]
        for row in gp:
            row[i], row[i - 1] = row[i - 1], row[i]

    refresh(n - 1)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = (2 * mu[k][j] + 1) // 2  # nearest integer
            if q:
                row_op(k, j, int(q))
                refresh(k)
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]:
            k += 1
        else:
            swap(k)
            refresh(n - 1)
            k = max(k - 1, 1)
    return u
