import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icopack.intlat import (
    column_hnf,
    gram_lll,
    integer_kernel,
    lattice_index,
    solve_in_lattice,
)


def mat_mul(a, b):
    return [
        [sum(a[i][l] * b[l][j] for l in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def frac_det(mat):
    a = [[Fraction(x) for x in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def frac_rank(mat):
    a = [[Fraction(x) for x in row] for row in mat]
    rank = 0
    for col in range(len(a[0]) if a else 0):
        piv = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


small_matrix = st.integers(1, 5).flatmap(
    lambda rows: st.integers(1, 5).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-9, 9), min_size=cols, max_size=cols),
            min_size=rows,
            max_size=rows,
        )
    )
)


class TestColumnHnf:
    @settings(max_examples=80, deadline=None)
    @given(small_matrix)
    def test_factorization_and_shape(self, mat):
        h, u, pivots = column_hnf(mat)
        ncols = len(mat[0])
        assert abs(frac_det(u)) == 1
        assert h == mat_mul(mat, u)
        rows = [r for r, _ in pivots]
        cols = [c for _, c in pivots]
        assert rows == sorted(rows) and len(set(rows)) == len(rows)
        assert cols == list(range(len(pivots)))
        for r, c in pivots:
            assert h[r][c] > 0
            for j in range(c):
                assert 0 <= h[r][j] < h[r][c]
            # pivot is the first nonzero in its column
            for rr in range(r):
                assert h[rr][c] == 0
        for j in range(len(pivots), ncols):
            assert all(h[i][j] == 0 for i in range(len(mat)))

    @settings(max_examples=80, deadline=None)
    @given(small_matrix)
    def test_kernel(self, mat):
        kernel = integer_kernel(mat)
        assert len(kernel) == len(mat[0]) - frac_rank(mat)
        for v in kernel:
            assert all(
                sum(row[j] * v[j] for j in range(len(v))) == 0 for row in mat
            )
        if kernel:
            assert frac_rank(kernel) == len(kernel)


class TestSolveInLattice:
    @settings(max_examples=80, deadline=None)
    @given(small_matrix, st.data())
    def test_roundtrip(self, mat, data):
        h, _, pivots = column_hnf(mat)
        coeffs = [
            data.draw(st.integers(-5, 5)) for _ in range(len(pivots))
        ]
        target = [
            sum(h[r][j] * coeffs[j] for j in range(len(pivots)))
            for r in range(len(mat))
        ]
        assert solve_in_lattice(h, pivots, target) == coeffs

    def test_off_lattice(self):
        h, _, pivots = column_hnf([[2, 0], [0, 3]])
        assert solve_in_lattice(h, pivots, [1, 0]) is None
        assert solve_in_lattice(h, pivots, [2, 3]) == [1, 1]

    def test_nonpivot_row_rejects(self):
        # column space is the diagonal in Z^2: (1, 2) is off it
        h, _, pivots = column_hnf([[1], [1]])
        assert solve_in_lattice(h, pivots, [1, 2]) is None
        assert solve_in_lattice(h, pivots, [3, 3]) == [3]


class TestLatticeIndex:
    def test_known_values(self):
        assert lattice_index([[1, 0], [0, 1]]) == 1
        assert lattice_index([[2, 0], [0, 3]]) == 6
        assert lattice_index([[1, 1], [0, 2]]) == 2

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            lattice_index([[1, 2], [2, 4]])

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.lists(st.integers(-6, 6), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    def test_equals_abs_determinant(self, cols):
        mat = [[cols[j][i] for j in range(3)] for i in range(3)]
        det = frac_det(mat)
        if det == 0:
            with pytest.raises(ValueError):
                lattice_index(cols)
        else:
            assert lattice_index(cols) == abs(det)


def gram_schmidt(gram):
    """mu and squared star-norms from a Gram matrix, over Fractions."""
    n = len(gram)
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n
    for i in range(n):
        norms[i] = Fraction(gram[i][i])
        for j in range(i):
            mu[i][j] = Fraction(gram[i][j])
            for l in range(j):
                mu[i][j] -= mu[i][l] * mu[j][l] * norms[l]
            mu[i][j] /= norms[j]
            norms[i] -= mu[i][j] ** 2 * norms[j]
    return mu, norms


class TestGramLll:
    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(2, 4).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(-8, 8), min_size=n, max_size=n),
                min_size=n,
                max_size=n,
            )
        )
    )
    def test_reduction_contract(self, basis):
        if frac_det(basis) == 0:
            return
        n = len(basis)
        gram = [
            [
                Fraction(sum(basis[i][l] * basis[j][l] for l in range(n)))
                for j in range(n)
            ]
            for i in range(n)
        ]
        u = gram_lll(gram)
        assert abs(frac_det(u)) == 1
        new_gram = [
            [
                sum(
                    u[i][a] * gram[a][b] * u[j][b]
                    for a in range(n)
                    for b in range(n)
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
        mu, norms = gram_schmidt(new_gram)
        assert all(x > 0 for x in norms)
        for i in range(n):
            for j in range(i):
                assert abs(mu[i][j]) <= Fraction(1, 2)
        delta = Fraction(3, 4)
        for i in range(1, n):
            assert norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]

    def test_skew_basis_becomes_short(self):
        basis = [[1, 0], [1000, 1]]
        gram = [
            [sum(a * b for a, b in zip(x, y)) for y in basis] for x in basis
        ]
        u = gram_lll(gram)
        reduced = [
            [sum(u[i][l] * basis[l][j] for l in range(2)) for j in range(2)]
            for i in range(2)
        ]
        assert all(sum(c * c for c in row) <= 2 for row in reduced)

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError):
            gram_lll([[1, 0], [0, -1]])

    def test_rejects_degenerate(self):
        rng = random.Random(7)
        basis = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(2)]
        basis.append([a + b for a, b in zip(basis[0], basis[1])])
        gram = [
            [sum(a * b for a, b in zip(x, y)) for y in basis] for x in basis
        ]
        with pytest.raises(ValueError):
            gram_lll(gram)
