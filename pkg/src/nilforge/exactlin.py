"""Exact linear algebra over the rationals.

Scalars are ``fractions.Fraction`` (aliased ``QQ``): arbitrary precision,
always reduced, positive denominator, never rounded.  Matrices are sparse
(dict rows); elimination runs on gcd-normalized integer rows so that no
Fraction reduction happens in the hot loops.

The heavy solvers used elsewhere in the package (`sparse_kernel`,
`sparse_solve`) take a matrix *by columns* over arbitrary hashable row
keys.  They echelonize the transpose, which keeps the working set at
one row per unknown even for systems with ~10^5 equation rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Optional, Sequence

QQ = Fraction

__all__ = [
    "QQ",
    "rat",
    "Matrix",
    "AffineMap",
    "LinearSolution",
    "rref_solve",
    "rational_spectrum",
    "sparse_kernel",
    "sparse_solve",
    "sparse_rank",
    "vec_add",
    "vec_sub",
    "vec_scale",
    "vec_dot",
    "zero_vec",
]


def rat(x) -> Fraction:
    """Coerce an int, Fraction or 'p/q' string to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("exact rational expected, got %r" % (x,))


# ---------------------------------------------------------------------------
# plain vectors (tuples of QQ)

def zero_vec(n: int) -> tuple:
    return (Fraction(0),) * n


def vec_add(u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c: Fraction, u: Sequence[Fraction]) -> tuple:
    return tuple(c * a for a in u)


def vec_dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    acc = Fraction(0)
    for a, b in zip(u, v, strict=True):
        if a and b:
            acc += a * b
    return acc


# ---------------------------------------------------------------------------
# Matrix

class Matrix:
    """Sparse matrix over QQ, immutable after construction.

    Entries are addressed by (row, col); out-of-range access raises
    IndexError rather than zero-extending.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict]):
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        clean = []
        for r in rows:
            d = {}
            for j, v in r.items():
                if not 0 <= j < ncols:
                    raise IndexError("column index %d out of range" % j)
                v = rat(v)
                if v:
                    d[j] = v
            clean.append(d)
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(clean)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "Matrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            rows.append({j: rat(v) for j, v in enumerate(r) if rat(v)})
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols, [{} for _ in range(nrows)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        return cls(n, n, [{i: rat(e)} for i, e in enumerate(entries)])

    # -- access ------------------------------------------------------------

    def entry(self, i: int, j: int) -> Fraction:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError("entry (%d, %d) out of range" % (i, j))
        return self.rows[i].get(j, Fraction(0))

    def __getitem__(self, ij):
        return self.entry(*ij)

    def row(self, i: int) -> tuple:
        if not 0 <= i < self.nrows:
            raise IndexError("row %d out of range" % i)
        r = self.rows[i]
        return tuple(r.get(j, Fraction(0)) for j in range(self.ncols))

    def col(self, j: int) -> tuple:
        if not 0 <= j < self.ncols:
            raise IndexError("col %d out of range" % j)
        return tuple(r.get(j, Fraction(0)) for r in self.rows)

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.nrows)]

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def density(self) -> Fraction:
        cells = self.nrows * self.ncols
        if cells == 0:
            return Fraction(0)
        return Fraction(sum(len(r) for r in self.rows), cells)

    # -- algebra -----------------------------------------------------------

    def transpose(self) -> "Matrix":
        rows = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return Matrix(self.ncols, self.nrows, rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        rows = []
        for r, s in zip(self.rows, other.rows):
            d = dict(r)
            for j, v in s.items():
                w = d.get(j, Fraction(0)) + v
                if w:
                    d[j] = w
                else:
                    d.pop(j, None)
            rows.append(d)
        return Matrix(self.nrows, self.ncols, rows)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(Fraction(-1))

    def scale(self, c) -> "Matrix":
        c = rat(c)
        return Matrix(self.nrows, self.ncols,
                      [{j: c * v for j, v in r.items()} for r in self.rows])

    def apply(self, v: Sequence[Fraction]) -> tuple:
        """Matrix * column vector."""
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        out = []
        for r in self.rows:
            acc = Fraction(0)
            for j, c in r.items():
                if v[j]:
                    acc += c * v[j]
            out.append(acc)
        return tuple(out)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            bt = other.transpose()
            rows = []
            for r in self.rows:
                d = {}
                for j, brow in enumerate(bt.rows):
                    acc = Fraction(0)
                    for k, v in r.items():
                        w = brow.get(k)
                        if w is not None:
                            acc += v * w
                    if acc:
                        d[j] = acc
                rows.append(d)
            return Matrix(self.nrows, other.ncols, rows)
        if isinstance(other, (list, tuple)):
            return self.apply(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix)
                and self.nrows == other.nrows
                and self.ncols == other.ncols
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.nrows, self.ncols,
                     tuple(tuple(sorted(r.items())) for r in self.rows)))

    def __repr__(self):
        return "Matrix(%d, %d, %r)" % (self.nrows, self.ncols,
                                       [dict(r) for r in self.rows])

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        sol_cols = []
        for j in range(n):
            b = tuple(Fraction(1) if i == j else Fraction(0) for i in range(n))
            sol = rref_solve(self, b)
            if sol.particular is None:
                raise ValueError("matrix is singular")
            sol_cols.append(sol.particular)
        rows = [{j: sol_cols[j][i] for j in range(n) if sol_cols[j][i]}
                for i in range(n)]
        return Matrix(n, n, rows)


@dataclass(frozen=True)
class AffineMap:
    """x |-> linear * x + translation, exact."""

    linear: Matrix
    translation: tuple

    def __post_init__(self):
        if self.linear.nrows != len(self.translation):
            raise ValueError("translation length mismatch")

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(Matrix.identity(n), zero_vec(n))

    def apply(self, v: Sequence[Fraction]) -> tuple:
        return vec_add(self.linear.apply(v), self.translation)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: x |-> self(other(x))."""
        return AffineMap(self.linear * other.linear,
                         vec_add(self.linear.apply(other.translation),
                                 self.translation))

    def inverse(self) -> "AffineMap":
        inv = self.linear.inverse()
        return AffineMap(inv, vec_scale(Fraction(-1), inv.apply(self.translation)))


# ---------------------------------------------------------------------------
# integer-row echelon engine
#
# Rows are sorted lists of (index, int_coeff) with nonzero coefficients and
# gcd 1.  Elimination always happens on the smallest present index, so the
# caller controls the pivot preference by the indexing of the columns.

def _row_content(row) -> int:
    g = 0
    for _, c in row:
        g = gcd(g, c)
        if g == 1:
            return 1
    return g


def _normalize_row(row):
    if not row:
        return row
    g = _row_content(row)
    if row[0][1] < 0:
        g = -g
    if g != 1:
        row = [(i, c // g) for i, c in row]
    return row


def _combine(row, piv):
    """row * a - piv * b  eliminating the shared leading index."""
    x = row[0][1]
    y = piv[0][1]
    g = gcd(x, y)
    a = y // g
    b = x // g
    out = []
    i, j = 1, 1
    nr, np_ = len(row), len(piv)
    while i < nr and j < np_:
        ri, rc = row[i]
        pj, pc = piv[j]
        if ri < pj:
            out.append((ri, a * rc))
            i += 1
        elif ri > pj:
            out.append((pj, -b * pc))
            j += 1
        else:
            c = a * rc - b * pc
            if c:
                out.append((ri, c))
            i += 1
            j += 1
    while i < nr:
        out.append((row[i][0], a * row[i][1]))
        i += 1
    while j < np_:
        out.append((piv[j][0], -b * piv[j][1]))
        j += 1
    return _normalize_row(out)


class _IntEchelon:
    """Incremental integer row echelon; columns eliminated in index order."""

    def __init__(self):
        self.pivots = {}  # leading index -> row

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row):
        """Reduce leading entries against the current pivots."""
        row = _normalize_row(row)
        while row:
            piv = self.pivots.get(row[0][0])
            if piv is None:
                return row
            row = _combine(row, piv)
        return row

    def insert(self, row):
        """Insert a row; returns its pivot index, or None if dependent."""
        row = self.reduce(row)
        if not row:
            return None
        self.pivots[row[0][0]] = row
        return row[0][0]

    def back_reduce(self):
        """Clear pivot columns from all tails (reduced echelon, integer rows)."""
        for lead in sorted(self.pivots, reverse=True):
            piv = self.pivots[lead]
            for other_lead, other in list(self.pivots.items()):
                if other_lead == lead:
                    continue
                entry = None
                for i, c in other:
                    if i == lead:
                        entry = c
                        break
                    if i > lead:
                        break
                if entry is None:
                    continue
                x = entry
                y = piv[0][1]
                g = gcd(x, y)
                a, b = y // g, x // g
                merged = {}
                for i, c in other:
                    merged[i] = a * c
                for i, c in piv:
                    merged[i] = merged.get(i, 0) - b * c
                new = _normalize_row(sorted((i, c) for i, c in merged.items() if c))
                self.pivots[other_lead] = new


def _int_row_from_qq(entries: Iterable) -> list:
    """entries: iterable of (index, Fraction) -> normalized integer row."""
    items = [(i, v) for i, v in entries if v]
    if not items:
        return []
    items.sort(key=lambda t: t[0])
    den = 1
    for _, v in items:
        den = den * v.denominator // gcd(den, v.denominator)
    return _normalize_row([(i, int(v * den)) for i, v in items])


# ---------------------------------------------------------------------------
# RREF / solving on Matrix

@dataclass
class LinearSolution:
    """Result of an exact linear solve.

    particular is None when no right-hand side was supplied or the system
    is inconsistent (see `consistent`).  rank + len(kernel_basis) equals
    the number of columns.
    """

    rank: int
    kernel_basis: list
    particular: Optional[tuple] = None
    consistent: bool = True


def rref_solve(A: Matrix, b: Optional[Sequence] = None) -> LinearSolution:
    """Reduced row echelon solve of A x = b over QQ.

    Deterministic: pivots are the first rows (lowest index) showing a
    nonzero entry in each column, columns swept left to right; the
    reduced form, kernel basis and particular solution are the canonical
    ones (free variables set to zero).
    """
    if b is not None:
        b = [rat(x) for x in b]
        if len(b) != A.nrows:
            raise ValueError("rhs length %d != row count %d" % (len(b), A.nrows))
    ncols = A.ncols
    AUG = ncols  # augmented column index
    ech = _IntEchelon()
    for i in range(A.nrows):
        entries = list(A.rows[i].items())
        if b is not None and b[i]:
            entries.append((AUG, b[i]))
        ech.insert(_int_row_from_qq(entries))
    consistent = AUG not in ech.pivots
    ech.back_reduce()

    pivots = {}
    for lead, row in ech.pivots.items():
        if lead == AUG:
            continue
        pivots[lead] = row
    rank = len(pivots)

    free_cols = [j for j in range(ncols) if j not in pivots]
    kernel = []
    for f in free_cols:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for lead, row in pivots.items():
            coeff = Fraction(0)
            plead = Fraction(0)
            for i, c in row:
                if i == lead:
                    plead = Fraction(c)
                elif i == f:
                    coeff = Fraction(c)
            if coeff:
                v[lead] = -coeff / plead
        kernel.append(tuple(v))

    particular = None
    if b is not None and consistent:
        x = [Fraction(0)] * ncols
        for lead, row in pivots.items():
            plead = Fraction(0)
            rhs = Fraction(0)
            for i, c in row:
                if i == lead:
                    plead = Fraction(c)
                elif i == AUG:
                    rhs = Fraction(c)
            x[lead] = rhs / plead
        particular = tuple(x)

    return LinearSolution(rank=rank, kernel_basis=kernel,
                          particular=particular,
                          consistent=(b is None) or consistent)


# ---------------------------------------------------------------------------
# sparse systems given by columns over arbitrary row keys

def _index_rows(columns, extra=(), key: Optional[Callable] = None):
    keys = set()
    for col in columns:
        keys.update(col)
    for col in extra:
        keys.update(col)
    return {k: i for i, k in enumerate(sorted(keys, key=key))}


def _tagged_int_column(col: dict, index: dict, tag: int, ntag_base: int) -> list:
    entries = [(index[k], v) for k, v in col.items() if v]
    entries.append((ntag_base + tag, Fraction(1)))
    return _int_row_from_qq(entries)


def _echelonize_columns(columns, index, order=None):
    """Insert tagged columns; returns (echelon, kernel tag rows, pivot row keys)."""
    base = len(index)
    ech = _IntEchelon()
    kernel_rows = []
    if order is None:
        order = sorted(range(len(columns)),
                       key=lambda j: (len(columns[j]), j))
    for j in order:
        row = _tagged_int_column(columns[j], index, j, base)
        row = ech.reduce(row)
        if not row or row[0][0] >= base:
            kernel_rows.append(row)
        if row:
            ech.pivots[row[0][0]] = row
    return ech, kernel_rows, base


def sparse_kernel(columns: Sequence[dict], *, key: Optional[Callable] = None):
    """Rank and kernel of the matrix whose j-th column is columns[j].

    Columns are dicts mapping arbitrary (sortable) row keys to QQ.
    Returns (rank, kernel_basis) with kernel vectors as Fraction tuples
    of length len(columns).  `key` fixes the elimination order of the
    row keys (ascending).
    """
    index = _index_rows(columns, key=key)
    ech, kernel_rows, base = _echelonize_columns(columns, index)
    rank = sum(1 for lead in ech.pivots if lead < base)
    ncols = len(columns)
    basis = []
    for row in kernel_rows:
        v = [Fraction(0)] * ncols
        for i, c in row:
            v[i - base] = Fraction(c)
        basis.append(tuple(v))
    return rank, basis


def sparse_rank(columns: Sequence[dict], *, key: Optional[Callable] = None) -> int:
    index = _index_rows(columns, key=key)
    ech = _IntEchelon()
    for j in range(len(columns)):
        ech.insert(_int_row_from_qq((index[k], v) for k, v in columns[j].items()))
    return ech.rank


def sparse_solve(columns: Sequence[dict], rhs: dict, *,
                 key: Optional[Callable] = None) -> LinearSolution:
    """Solve  sum_j x_j * columns[j] = rhs  exactly.

    Returns a LinearSolution over the column index; particular is None
    and consistent False when the system has no solution.
    """
    index = _index_rows(columns, extra=[rhs], key=key)
    base = len(index)
    ech = _IntEchelon()
    kernel_rows = []
    order = sorted(range(len(columns)), key=lambda j: (len(columns[j]), j))
    for j in order:
        row = ech.reduce(_tagged_int_column(columns[j], index, j, base))
        if not row or row[0][0] >= base:
            kernel_rows.append(row)
        if row:
            ech.pivots[row[0][0]] = row
    rank = sum(1 for lead in ech.pivots if lead < base)

    rhs_tag = base + len(columns)
    row = [(index[k], v) for k, v in rhs.items() if v]
    row.append((rhs_tag, Fraction(1)))
    red = ech.reduce(_int_row_from_qq(row))

    ncols = len(columns)
    kernel = []
    for krow in kernel_rows:
        v = [Fraction(0)] * ncols
        for i, c in krow:
            v[i - base] = Fraction(c)
        kernel.append(tuple(v))

    if red and red[0][0] < base:
        return LinearSolution(rank=rank, kernel_basis=kernel,
                              particular=None, consistent=False)
    # reduction ended inside tag space: rhs = -(1/t) * sum coeff_j columns[j]
    t = None
    coeffs = {}
    for i, c in red:
        if i == rhs_tag:
            t = c
        else:
            coeffs[i - base] = c
    if t is None:
        raise AssertionError("rhs tag lost during reduction")
    particular = [Fraction(0)] * ncols
    for j, c in coeffs.items():
        particular[j] = Fraction(-c, t)
    return LinearSolution(rank=rank, kernel_basis=kernel,
                          particular=tuple(particular), consistent=True)


# ---------------------------------------------------------------------------
# rational spectra

def _charpoly(A: Matrix) -> list:
    """Characteristic polynomial of A, coefficients [1, c1, ..., cn]
    for  lambda^n + c1 lambda^(n-1) + ... + cn  (Faddeev-LeVerrier)."""
    n = A.nrows
    M = Matrix.identity(n)
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        AM = A * M
        tr = sum((AM.entry(i, i) for i in range(n)), Fraction(0))
        ck = -tr / k
        coeffs.append(ck)
        M = AM + Matrix.identity(n).scale(ck)
    return coeffs


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    import random
    if n % 2 == 0:
        return 2
    rng = random.Random(0xC0FFEE ^ n)
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d


def _factorize(n: int) -> dict:
    n = abs(n)
    out = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return out


def _divisors(n: int) -> list:
    fac = _factorize(n)
    divs = [1]
    for p, e in fac.items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(set(divs))


def _poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs: list, root: Fraction) -> list:
    """Divide the integer-normalized polynomial by (x - root), exactly."""
    out = []
    acc = Fraction(0)
    for c in coeffs[:-1]:
        acc = acc * root + c
        out.append(acc)
    den = 1
    for c in out:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in out]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
    return ints


@dataclass
class SpectrumResult:
    eigenvalues: list  # [(lambda, algebraic_mult, geometric_mult)]
    char_poly_splits_over_Q: bool
    diagonalizable_over_Q: bool


def rational_spectrum(A: Matrix) -> SpectrumResult:
    """Exact rational eigenvalues of a square matrix.

    Rational roots of the characteristic polynomial are found by the
    rational root theorem on the integer-cleared polynomial; geometric
    multiplicities are kernel dimensions of A - lambda*I.
    """
    if not A.is_square:
        raise ValueError("rational_spectrum needs a square matrix")
    n = A.nrows
    coeffs = _charpoly(A)
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]

    # strip trailing zeros: roots at 0
    mult0 = 0
    while ints and ints[-1] == 0:
        ints.pop()
        mult0 += 1

    roots = {}
    if mult0:
        roots[Fraction(0)] = mult0
    while len(ints) > 1:
        lead, trail = ints[0], ints[-1]
        found = None
        for p in _divisors(trail):
            for q in _divisors(lead):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if _poly_eval(ints, cand) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots[found] = roots.get(found, 0) + 1
        ints = _deflate(ints, found)

    splits = sum(roots.values()) == n
    eigen = []
    geo_sum = 0
    for lam in sorted(roots):
        shifted = A - Matrix.identity(n).scale(lam)
        geo = len(rref_solve(shifted).kernel_basis)
        geo_sum += geo
        eigen.append((lam, roots[lam], geo))
    return SpectrumResult(
        eigenvalues=eigen,
        char_poly_splits_over_Q=splits,
        diagonalizable_over_Q=splits and geo_sum == n,
    )
