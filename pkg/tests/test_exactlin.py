import random
from fractions import Fraction as F

import pytest

from nilforge.exactlin import (AffineMap, Matrix, rat, rational_spectrum,
                               rref_solve, sparse_kernel, sparse_solve)


# -- independent dense elimination oracle ------------------------------------

def dense_rank(rows):
    """Naive fraction-arithmetic Gaussian elimination, kept separate from
    the library implementation on purpose."""
    rows = [list(map(F, r)) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pv = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def random_matrix(rng, m, n, bound=6):
    return [[F(rng.randint(-bound, bound), rng.randint(1, 3))
             for _ in range(n)] for _ in range(m)]


def test_identity_solve():
    A = Matrix.identity(2)
    sol = rref_solve(A, [F(3), F(5)])
    assert sol.particular == (F(3), F(5))
    assert sol.kernel_basis == []
    assert sol.rank == 2


def test_single_constraint_kernel():
    A = Matrix.from_rows([[1, 1]])
    sol = rref_solve(A, [F(0)])
    assert sol.rank == 1
    assert len(sol.kernel_basis) == 1
    v = sol.kernel_basis[0]
    assert v[0] + v[1] == 0 and any(v)


def test_rank_against_dense_oracle():
    rng = random.Random(2024)
    for _ in range(10):
        rows = random_matrix(rng, 5, 7)
        A = Matrix.from_rows(rows)
        assert rref_solve(A).rank == dense_rank(rows)


def test_rank_transpose_up_to_8x8():
    rng = random.Random(7)
    for _ in range(8):
        m = rng.randint(2, 8)
        n = rng.randint(2, 8)
        rows = random_matrix(rng, m, n)
        A = Matrix.from_rows(rows)
        assert rref_solve(A).rank == rref_solve(A.transpose()).rank
        assert rref_solve(A).rank == dense_rank(rows)


def test_solution_substitutes_back():
    rng = random.Random(11)
    for _ in range(10):
        m, n = rng.randint(2, 6), rng.randint(2, 6)
        rows = random_matrix(rng, m, n)
        A = Matrix.from_rows(rows)
        x = [F(rng.randint(-4, 4)) for _ in range(n)]
        b = A.apply(x)
        sol = rref_solve(A, b)
        assert sol.consistent
        assert A.apply(sol.particular) == b
        for v in sol.kernel_basis:
            assert A.apply(v) == tuple([F(0)] * m)
        assert sol.rank + len(sol.kernel_basis) == n


def test_inconsistent_system():
    A = Matrix.from_rows([[1, 1], [1, 1]])
    sol = rref_solve(A, [F(1), F(2)])
    assert not sol.consistent
    assert sol.particular is None


def test_out_of_bounds_entry():
    A = Matrix.identity(2)
    with pytest.raises(IndexError):
        A.entry(0, 2)
    with pytest.raises(IndexError):
        A.entry(-1, 0)


def test_inverse_roundtrip():
    rng = random.Random(3)
    while True:
        rows = random_matrix(rng, 4, 4)
        A = Matrix.from_rows(rows)
        if rref_solve(A).rank == 4:
            break
    assert A * A.inverse() == Matrix.identity(4)


def test_rat_rejects_floats():
    with pytest.raises(TypeError):
        rat(0.5)


# -- sparse engine ------------------------------------------------------------

def test_sparse_kernel_matches_dense():
    rng = random.Random(5)
    for _ in range(10):
        m, n = rng.randint(2, 7), rng.randint(2, 7)
        rows = random_matrix(rng, m, n)
        cols = [{i: rows[i][j] for i in range(m) if rows[i][j]}
                for j in range(n)]
        rank, kernel = sparse_kernel(cols)
        assert rank == dense_rank(rows)
        assert rank + len(kernel) == n
        A = Matrix.from_rows(rows)
        for v in kernel:
            assert A.apply(v) == tuple([F(0)] * m)


def test_sparse_solve_roundtrip():
    rng = random.Random(6)
    for _ in range(10):
        m, n = rng.randint(2, 7), rng.randint(2, 7)
        rows = random_matrix(rng, m, n)
        cols = [{i: rows[i][j] for i in range(m) if rows[i][j]}
                for j in range(n)]
        x = [F(rng.randint(-3, 3)) for _ in range(n)]
        b = Matrix.from_rows(rows).apply(x)
        sol = sparse_solve(cols, {i: v for i, v in enumerate(b) if v})
        assert sol.consistent
        assert Matrix.from_rows(rows).apply(sol.particular) == b


# -- spectra -------------------------------------------------------------------

def test_spectrum_diagonal():
    A = Matrix.diagonal([F(1, 3), F(2, 3)])
    spec = rational_spectrum(A)
    assert [(l, am, gm) for l, am, gm in spec.eigenvalues] == \
        [(F(1, 3), 1, 1), (F(2, 3), 1, 1)]
    assert spec.diagonalizable_over_Q


def test_spectrum_jordan_block():
    A = Matrix.from_rows([[0, 1], [0, 0]])
    spec = rational_spectrum(A)
    assert spec.eigenvalues == [(F(0), 2, 1)]
    assert not spec.diagonalizable_over_Q


def test_spectrum_companion_sqrt2():
    # companion matrix of t^2 - 2: no rational eigenvalues, and the
    # rational root theorem says so directly (candidates +-1, +-2 fail)
    for cand in (F(1), F(-1), F(2), F(-2)):
        assert cand * cand - 2 != 0
    A = Matrix.from_rows([[0, 2], [1, 0]])
    spec = rational_spectrum(A)
    assert spec.eigenvalues == []
    assert not spec.char_poly_splits_over_Q
    assert not spec.diagonalizable_over_Q


def test_eigen_pairs_exact():
    A = Matrix.from_rows([[F(1, 2), 1, 0], [0, F(1, 2), 0], [0, 0, F(3)]])
    spec = rational_spectrum(A)
    n = A.nrows
    for lam, _, gm in spec.eigenvalues:
        shifted = A - Matrix.identity(n).scale(lam)
        kernel = rref_solve(shifted).kernel_basis
        assert len(kernel) == gm
        for v in kernel:
            assert A.apply(v) == tuple(lam * x for x in v)


def test_affine_map_compose_inverse():
    L = Matrix.from_rows([[1, 1], [0, 1]])
    g = AffineMap(L, (F(1), F(2)))
    h = g.inverse()
    x = (F(3), F(-4))
    assert h.apply(g.apply(x)) == x
    assert g.compose(h).apply(x) == x
