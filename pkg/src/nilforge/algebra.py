"""Commutative nilpotent algebras given by structure constants.

An algebra is stored as the sparse products e_i * e_j (only i <= j, so
commutativity holds by construction) of an ordered basis.  Everything
downstream -- power and socle chains, Hilbert function, annihilator,
derivations, smash products, adapted decompositions, gradings -- is
exact rational linear algebra on those constants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Optional, Sequence

from .exactlin import (AffineMap, Matrix, QQ, rat, rref_solve, sparse_kernel,
                       sparse_solve, vec_add, vec_scale, zero_vec)

__all__ = [
    "NilAlgebra", "AlgebraVerification", "Pointing", "Grading",
    "Subspace", "AdaptedDecomposition", "AlgebraError",
    "derivation_algebra", "DerivationReport", "smash_product",
    "adapted_decomposition", "grading_index3",
    "algebra_to_json", "algebra_from_json",
]


class AlgebraError(ValueError):
    pass


# ---------------------------------------------------------------------------
# subspaces as canonical reduced row echelon bases

class Subspace:
    """Subspace of QQ^n with a canonical RREF basis (set equality is
    basis equality)."""

    __slots__ = ("n", "basis", "_pivots")

    def __init__(self, n: int, vectors: Sequence[Sequence] = ()):
        self.n = n
        rows = []  # list of (pivot, tuple row) with pivot entry 1
        for v in vectors:
            rows = self._absorb(rows, [rat(x) for x in v])
        rows.sort(key=lambda t: t[0])
        self._pivots = tuple(p for p, _ in rows)
        self.basis = tuple(r for _, r in rows)

    @staticmethod
    def _absorb(rows, v):
        for p, r in rows:
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, r)]
        lead = next((i for i, a in enumerate(v) if a), None)
        if lead is None:
            return rows
        inv = v[lead]
        v = [a / inv for a in v]
        new = []
        for p, r in rows:
            if r[lead]:
                c = r[lead]
                r = tuple(a - c * b for a, b in zip(r, v))
            new.append((p, r))
        new.append((lead, tuple(v)))
        return new

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence) -> tuple:
        v = [rat(x) for x in v]
        for p, r in zip(self._pivots, self.basis):
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, r)]
        return tuple(v)

    def contains(self, v: Sequence) -> bool:
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence) -> Optional[tuple]:
        """Coefficients of v in the canonical basis, or None."""
        v = [rat(x) for x in v]
        coords = []
        for p, r in zip(self._pivots, self.basis):
            c = v[p]
            coords.append(c)
            if c:
                v = [a - c * b for a, b in zip(v, r)]
        if any(v):
            return None
        return tuple(coords)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.n == other.n
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.n, self.basis))

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace(self.n, list(self.basis) + list(other.basis))

    def intersection(self, other: "Subspace") -> "Subspace":
        # Zassenhaus-free route: x in both iff x = U^T a = W^T b; solve
        # [U^T | -W^T] kernel and read off the U-part.
        cols = []
        for v in self.basis:
            cols.append({i: x for i, x in enumerate(v) if x})
        for v in other.basis:
            cols.append({i: -x for i, x in enumerate(v) if x})
        _, kernel = sparse_kernel(cols)
        vecs = []
        for k in kernel:
            acc = [Fraction(0)] * self.n
            for c, v in zip(k[:self.dim], self.basis):
                if c:
                    for i, x in enumerate(v):
                        acc[i] += c * x
            vecs.append(acc)
        return Subspace(self.n, vecs)

    def extend_basis_within(self, other: "Subspace") -> list:
        """Vectors of `other`'s basis completing self to self+other."""
        rows = list(zip(self._pivots, self.basis))
        out = []
        for v in other.basis:
            before = len(rows)
            rows = self._absorb(rows, list(v))
            if len(rows) > before:
                out.append(tuple(v))
        return out

    @classmethod
    def full(cls, n: int) -> "Subspace":
        eye = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
               for i in range(n)]
        return cls(n, eye)


# ---------------------------------------------------------------------------
# the algebra

@dataclass
class AlgebraVerification:
    associative: bool
    nilpotent: bool
    nil_index: Optional[int]
    admissible: bool
    failures: list = field(default_factory=list)  # witnessing triples, 1-based

    @property
    def ok(self) -> bool:
        return self.associative and self.nilpotent


class NilAlgebra:
    """Commutative algebra on an ordered basis via structure constants.

    products: {(i, j): {k: QQ}} with 0-based indices and i <= j; missing
    pairs multiply to zero.
    """

    def __init__(self, dim: int, products: dict, labels: Optional[Sequence[str]] = None):
        self.dim = dim
        self.labels = tuple(labels) if labels else tuple(
            "e%d" % (i + 1) for i in range(dim))
        if len(self.labels) != dim:
            raise AlgebraError("label count mismatch")
        table = {}
        for (i, j), vec in products.items():
            if not (0 <= i <= j < dim):
                raise AlgebraError("bad product key (%d, %d)" % (i, j))
            clean = {}
            for k, v in vec.items():
                if not 0 <= k < dim:
                    raise AlgebraError("bad product target index %d" % k)
                v = rat(v)
                if v:
                    clean[k] = v
            if clean:
                table[(i, j)] = clean
        self._prod = table

    # -- products ----------------------------------------------------------

    def product_basis(self, i: int, j: int) -> dict:
        if i > j:
            i, j = j, i
        return self._prod.get((i, j), {})

    def mul_sparse(self, u: dict, v: dict) -> dict:
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                prod = self.product_basis(i, j)
                if not prod:
                    continue
                c = a * b
                for k, w in prod.items():
                    val = out.get(k, Fraction(0)) + c * w
                    if val:
                        out[k] = val
                    else:
                        out.pop(k, None)
        return out

    def mul(self, u: Sequence, v: Sequence) -> tuple:
        du = {i: rat(x) for i, x in enumerate(u) if x}
        dv = {i: rat(x) for i, x in enumerate(v) if x}
        out = self.mul_sparse(du, dv)
        return tuple(out.get(i, Fraction(0)) for i in range(self.dim))

    def multiplication_operator(self, u: Sequence) -> Matrix:
        """M_u : x -> u x as a matrix."""
        cols = []
        for j in range(self.dim):
            cols.append(self.mul_sparse({i: rat(x) for i, x in enumerate(u) if x},
                                        {j: Fraction(1)}))
        rows = [{} for _ in range(self.dim)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows[i][j] = v
        return Matrix(self.dim, self.dim, rows)

    # -- element series ----------------------------------------------------

    def element_powers(self, x: Sequence) -> list:
        """[x, x^2, ...] until the zero vector (exclusive)."""
        out = []
        cur = {i: rat(v) for i, v in enumerate(x) if v}
        base = dict(cur)
        while cur:
            out.append(tuple(cur.get(i, Fraction(0)) for i in range(self.dim)))
            cur = self.mul_sparse(base, cur)
            if len(out) > self.dim + 1:
                raise AlgebraError("element powers do not terminate; "
                                   "algebra is not nilpotent")
        return out

    def exp1(self, x: Sequence) -> tuple:
        acc = zero_vec(self.dim)
        for k, p in enumerate(self.element_powers(x), start=1):
            acc = vec_add(acc, vec_scale(Fraction(1, factorial(k)), p))
        return acc

    def exp2(self, x: Sequence) -> tuple:
        full = self.exp1(x)
        return tuple(a - rat(b) for a, b in zip(full, x))

    def log1(self, x: Sequence) -> tuple:
        acc = zero_vec(self.dim)
        for k, p in enumerate(self.element_powers(x), start=1):
            acc = vec_add(acc, vec_scale(Fraction((-1) ** (k + 1), k), p))
        return acc

    # -- chains and invariants ----------------------------------------------

    @cached_property
    def power_chain(self) -> list:
        """[N^1, N^2, ..., N^nu]  (the nonzero powers)."""
        chain = [Subspace.full(self.dim)]
        while True:
            prev = chain[-1]
            vecs = []
            for w in prev.basis:
                dw = {i: v for i, v in enumerate(w) if v}
                for i in range(self.dim):
                    prod = self.mul_sparse({i: Fraction(1)}, dw)
                    if prod:
                        vecs.append(tuple(prod.get(k, Fraction(0))
                                          for k in range(self.dim)))
            nxt = Subspace(self.dim, vecs)
            if nxt.dim == 0:
                return chain
            if nxt.dim == prev.dim:
                raise AlgebraError("power chain is stationary and nonzero; "
                                   "algebra is not nilpotent")
            chain.append(nxt)

    @cached_property
    def nil_index(self) -> int:
        return len(self.power_chain)

    def power(self, k: int) -> Subspace:
        """N^k (zero subspace for k > nil_index)."""
        if k < 1:
            raise AlgebraError("power index must be >= 1")
        chain = self.power_chain
        return chain[k - 1] if k <= len(chain) else Subspace(self.dim)

    @cached_property
    def socle_chain(self) -> list:
        """[N_[0], N_[1], ..., N_[nu]] with N_[k] = {x : x N^k = 0}."""
        chain = [Subspace(self.dim)]
        for k in range(1, self.nil_index + 1):
            cols = []
            for j in range(self.dim):
                col = {}
                for w_idx, w in enumerate(self.power(k).basis):
                    prod = self.mul_sparse({j: Fraction(1)},
                                           {i: v for i, v in enumerate(w) if v})
                    for c, v in prod.items():
                        col[(w_idx, c)] = v
                cols.append(col)
            _, kernel = sparse_kernel(cols)
            chain.append(Subspace(self.dim, kernel))
        return chain

    def socle(self, k: int) -> Subspace:
        if k < 0:
            raise AlgebraError("socle index must be >= 0")
        chain = self.socle_chain
        return chain[k] if k <= self.nil_index else Subspace.full(self.dim)

    @cached_property
    def annihilator(self) -> Subspace:
        return self.socle(1)

    @cached_property
    def is_admissible(self) -> bool:
        return self.annihilator.dim == 1

    @cached_property
    def hilbert_function(self) -> tuple:
        """(H(0), ..., H(nu)) with H(k) = dim N^k/N^(k+1)."""
        dims = [s.dim for s in self.power_chain] + [0]
        return (1,) + tuple(dims[k] - dims[k + 1] for k in range(len(dims) - 1))

    @property
    def hilbert_symmetric(self) -> bool:
        H = self.hilbert_function
        nu = self.nil_index
        return all(H[k] == H[nu - k] for k in range(nu + 1))

    # -- verification --------------------------------------------------------

    def verify(self, max_failures: int = 3) -> AlgebraVerification:
        failures = []
        pair_cache = {}
        for i in range(self.dim):
            for j in range(i, self.dim):
                pair_cache[(i, j)] = self.product_basis(i, j)
        associative = True
        for i in range(self.dim):
            for j in range(i, self.dim):
                eij = pair_cache[(i, j)]
                for k in range(j, self.dim):
                    left = self.mul_sparse(eij, {k: Fraction(1)})
                    right = self.mul_sparse({i: Fraction(1)},
                                            pair_cache[(j, k)])
                    if left != right:
                        associative = False
                        if len(failures) < max_failures:
                            failures.append((i + 1, j + 1, k + 1))
        try:
            nu = self.nil_index
            nilpotent = True
        except AlgebraError:
            nu = None
            nilpotent = False
        admissible = nilpotent and self.is_admissible
        return AlgebraVerification(associative=associative, nilpotent=nilpotent,
                                   nil_index=nu, admissible=admissible,
                                   failures=failures)

    # -- associated graded algebra -------------------------------------------

    def graded_complements(self) -> list:
        """Vectors C_k with N^k = span(C_k) + N^(k+1), k = 1..nu."""
        out = []
        for k in range(1, self.nil_index + 1):
            nxt = self.power(k + 1)
            out.append(nxt.extend_basis_within(self.power(k)))
        return out

    def gr(self) -> "NilAlgebra":
        """The associated graded algebra on the complements C_k."""
        comps = self.graded_complements()
        basis = []
        weights = []
        for k, vecs in enumerate(comps, start=1):
            for v in vecs:
                basis.append(v)
                weights.append(k)
        n = self.dim
        index_of = list(range(len(basis)))
        products = {}
        for a in range(len(basis)):
            for b in range(a, len(basis)):
                w = weights[a] + weights[b]
                if w > self.nil_index:
                    continue
                prod = self.mul(basis[a], basis[b])
                # coordinates of prod modulo N^(w+1) in the C_w block
                block = [i for i in index_of if weights[i] == w]
                cols = []
                for i in block:
                    cols.append({r: x for r, x in enumerate(basis[i]) if x})
                for v in self.power(w + 1).basis:
                    cols.append({r: x for r, x in enumerate(v) if x})
                rhs = {r: x for r, x in enumerate(prod) if x}
                sol = sparse_solve(cols, rhs)
                if sol.particular is None:
                    raise AlgebraError("graded product fell outside N^%d" % w)
                vec = {}
                for pos, i in enumerate(block):
                    if sol.particular[pos]:
                        vec[i] = sol.particular[pos]
                if vec:
                    products[(a, b)] = vec
        labels = ["gr%d_%d" % (w, i + 1) for i, w in enumerate(weights)]
        return NilAlgebra(len(basis), products, labels)

    # -- change of basis -----------------------------------------------------

    def change_basis(self, new_basis: Sequence[Sequence]) -> "NilAlgebra":
        """Structure constants in the basis given by `new_basis` rows."""
        n = self.dim
        if len(new_basis) != n:
            raise AlgebraError("new basis must have %d vectors" % n)
        S = Matrix.from_rows(new_basis)          # rows = new basis vectors
        St_inv = S.transpose().inverse()         # old coords -> new coords
        products = {}
        for i in range(n):
            for j in range(i, n):
                prod = self.mul(new_basis[i], new_basis[j])
                coords = St_inv.apply(prod)
                vec = {k: c for k, c in enumerate(coords) if c}
                if vec:
                    products[(i, j)] = vec
        return NilAlgebra(n, products, ["b%d" % (i + 1) for i in range(n)])

    def __repr__(self):
        return "NilAlgebra(dim=%d, labels=%r)" % (self.dim, list(self.labels))


# ---------------------------------------------------------------------------
# pointings

class Pointing:
    """Linear functional omega with omega(Ann N) = QQ on an admissible algebra.

    Carries the induced admissible projection pi (range = annihilator),
    the bilinear form b(x, y) = omega(x y) and an adapted basis that puts
    ker(omega) first and a scaled annihilator generator last.
    """

    def __init__(self, algebra: NilAlgebra, omega: Sequence):
        if not algebra.is_admissible:
            raise AlgebraError("pointing requires an admissible algebra")
        self.algebra = algebra
        self.omega = tuple(rat(x) for x in omega)
        if len(self.omega) != algebra.dim:
            raise AlgebraError("pointing functional has wrong length")
        gen = algebra.annihilator.basis[0]
        val = sum((w * g for w, g in zip(self.omega, gen)), Fraction(0))
        if not val:
            raise AlgebraError("pointing vanishes on the annihilator")
        self.ann_gen = vec_scale(1 / val, gen)  # omega(ann_gen) = 1

    @classmethod
    def default(cls, algebra: NilAlgebra) -> "Pointing":
        """Dual functional of the last adapted basis vector: if the last
        basis vector spans the annihilator the adapted basis is the
        original one."""
        n = algebra.dim
        last = tuple(Fraction(1) if i == n - 1 else Fraction(0) for i in range(n))
        if algebra.annihilator.dim == 1 and algebra.annihilator.contains(last):
            omega = [Fraction(0)] * n
            omega[n - 1] = Fraction(1) / algebra.annihilator.basis[0][n - 1]
            return cls(algebra, omega)
        # move an annihilator generator last, keep an independent subset
        # of the original basis in front
        gen = algebra.annihilator.basis[0]
        span = Subspace(n, [gen])
        front = []
        for i in range(n):
            e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
            if not span.contains(e):
                span = Subspace(n, list(span.basis) + [e])
                front.append(e)
        basis = front + [gen]
        # omega = dual of gen w.r.t. this basis
        S = Matrix.from_rows(basis)
        St_inv = S.transpose().inverse()
        omega = tuple(St_inv.rows[n - 1].get(j, Fraction(0)) for j in range(n))
        return cls(algebra, omega)

    def value(self, v: Sequence) -> Fraction:
        return sum((w * rat(x) for w, x in zip(self.omega, v) if x), Fraction(0))

    def project(self, v: Sequence) -> tuple:
        """pi(v) = omega(v) * ann_gen."""
        return vec_scale(self.value(v), self.ann_gen)

    def projection_matrix(self) -> Matrix:
        n = self.algebra.dim
        rows = [{} for _ in range(n)]
        for i in range(n):
            ai = self.ann_gen[i]
            if not ai:
                continue
            for j in range(n):
                if self.omega[j]:
                    rows[i][j] = ai * self.omega[j]
        return Matrix(n, n, rows)

    @cached_property
    def kernel_basis(self) -> list:
        """Canonical basis of W = ker(omega)."""
        n = self.algebra.dim
        A = Matrix(1, n, [{j: w for j, w in enumerate(self.omega) if w}])
        return rref_solve(A).kernel_basis

    @cached_property
    def adapted_basis(self) -> list:
        """Basis rows: ker(omega) vectors then the annihilator generator.

        If omega is the dual of the last original basis vector the
        adapted basis is the original basis (identity rows)."""
        n = self.algebra.dim
        ident = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
                 for i in range(n)]
        if (all(self.omega[i] == 0 for i in range(n - 1))
                and self.ann_gen == ident[n - 1]):
            return ident
        return list(self.kernel_basis) + [self.ann_gen]

    def bilinear_form(self, u: Sequence, v: Sequence) -> Fraction:
        return self.value(self.algebra.mul(u, v))

    def gram_on_kernel(self) -> Matrix:
        W = self.adapted_basis[:-1]
        m = len(W)
        rows = []
        for i in range(m):
            row = {}
            for j in range(m):
                v = self.bilinear_form(W[i], W[j])
                if v:
                    row[j] = v
            rows.append(row)
        return Matrix(m, m, rows)

    def on_hypersurface(self, a: Sequence) -> bool:
        """a in S iff omega(exp_1 a) = 0."""
        return self.value(self.algebra.exp1(a)) == 0

    def random_surface_point(self, rng, bound: int = 3) -> tuple:
        """log_1 of a random kernel element: an exact rational point of S."""
        while True:
            coeffs = [Fraction(rng.randint(-bound, bound),
                               rng.randint(1, bound)) for _ in self.kernel_basis]
            w = zero_vec(self.algebra.dim)
            for c, v in zip(coeffs, self.kernel_basis):
                w = vec_add(w, vec_scale(c, v))
            if any(w):
                return self.algebra.log1(w)


# ---------------------------------------------------------------------------
# gradings

class GradingError(AlgebraError):
    pass


class Grading:
    """Decomposition N = sum of N_k recorded as a basis with positive
    integer weights; verification is by direct product expansion."""

    def __init__(self, algebra: NilAlgebra, basis: Sequence[Sequence],
                 weights: Sequence[int]):
        if len(basis) != algebra.dim or len(weights) != algebra.dim:
            raise GradingError("basis/weights must match the dimension")
        if any(w < 1 or int(w) != w for w in weights):
            raise GradingError("weights must be positive integers")
        self.algebra = algebra
        self.basis = [tuple(rat(x) for x in v) for v in basis]
        self.weights = tuple(int(w) for w in weights)
        self._St_inv = Matrix.from_rows(self.basis).transpose().inverse()

    def coords(self, v: Sequence) -> tuple:
        return self._St_inv.apply(v)

    def verify(self) -> bool:
        """Check N_j N_k subset N_{j+k} for all basis pairs; raises on failure."""
        n = self.algebra.dim
        for a in range(n):
            for b in range(a, n):
                target = self.weights[a] + self.weights[b]
                prod = self.algebra.mul(self.basis[a], self.basis[b])
                coords = self.coords(prod)
                for c, val in enumerate(coords):
                    if val and self.weights[c] != target:
                        raise GradingError(
                            "product of weights (%d, %d) leaks into weight %d"
                            % (self.weights[a], self.weights[b], self.weights[c]))
        return True

    def theta(self, t) -> Matrix:
        """Scaling automorphism acting by t^k on the weight-k block."""
        t = rat(t)
        n = self.algebra.dim
        S = Matrix.from_rows(self.basis)
        D = Matrix.diagonal([t ** w for w in self.weights])
        return S.transpose() * D * self._St_inv

    def component(self, v: Sequence, weight: int) -> tuple:
        coords = self.coords(v)
        acc = zero_vec(self.algebra.dim)
        for c, val in enumerate(coords):
            if val and self.weights[c] == weight:
                acc = vec_add(acc, vec_scale(val, self.basis[c]))
        return acc

    def min_weight(self, v: Sequence) -> Optional[int]:
        coords = self.coords(v)
        present = [self.weights[c] for c, val in enumerate(coords) if val]
        return min(present) if present else None


# ---------------------------------------------------------------------------
# derivations

@dataclass
class DerivationReport:
    dim: int
    basis: list                      # matrices D with D(e_k) = sum_a D[a,k] e_a
    ty_lower_bound: int              # (dim N/N^2) dim N_[1] + dim N_[3]/N_[2]
    quarter_lower_bound: int         # dim N/N^4
    aff_generators: Optional[list] = None  # AffineMap list, same length as basis


def derivation_algebra(A: NilAlgebra, pointing: Optional[Pointing] = None) -> DerivationReport:
    """der(A) as the exact solution space of the Leibniz system
    D(e_i e_j) = D(e_i) e_j + e_i D(e_j)."""
    n = A.dim
    pair = {(i, j): A.product_basis(i, j) for i in range(n) for j in range(i, n)}
    # unknown (a, k) -> column of equation coefficients; equations keyed
    # by (i, j, coordinate)
    columns = [dict() for _ in range(n * n)]

    def col(a, k):
        return columns[a * n + k]

    for i in range(n):
        for j in range(i, n):
            cij = pair[(i, j)]
            for k, v in cij.items():
                for c in range(n):
                    # D(e_i e_j) contributes v * D[c, k] to coordinate c
                    col(c, k)[(i, j, c)] = col(c, k).get((i, j, c), Fraction(0)) + v
            for b in range(n):
                ebj = pair[(min(b, j), max(b, j))]
                for c, v in ebj.items():
                    col(b, i)[(i, j, c)] = col(b, i).get((i, j, c), Fraction(0)) - v
                eib = pair[(min(i, b), max(i, b))]
                for c, v in eib.items():
                    col(b, j)[(i, j, c)] = col(b, j).get((i, j, c), Fraction(0)) - v
    for c in columns:
        for key in [k for k, v in c.items() if not v]:
            del c[key]
    _, kernel = sparse_kernel(columns)
    basis = []
    for vec in kernel:
        rows = [{} for _ in range(n)]
        for idx, v in enumerate(vec):
            if v:
                rows[idx // n][idx % n] = v
        basis.append(Matrix(n, n, rows))

    H = A.hilbert_function
    ty = H[1] * A.socle(1).dim + (A.socle(3).dim - A.socle(2).dim)
    quarter = A.dim - A.power(4).dim if A.nil_index >= 4 else A.dim
    report = DerivationReport(dim=len(basis), basis=basis,
                              ty_lower_bound=ty, quarter_lower_bound=quarter)

    if pointing is not None:
        report.aff_generators = [derivation_to_affine(D, pointing) for D in basis]
    return report


def derivation_to_affine(D: Matrix, pointing: Pointing) -> AffineMap:
    """The affine map D - v with [pi, D] = pi M_v, v in ker(pi);
    v is solved from the nondegenerate form b(x,y) = omega(xy)."""
    A = pointing.algebra
    W = pointing.adapted_basis[:-1]
    gram = pointing.gram_on_kernel()
    rhs = [pointing.value(D.apply(w)) for w in W]
    sol = rref_solve(gram, rhs)
    if sol.particular is None:
        raise AlgebraError("pointing form is degenerate on ker(omega)")
    v = zero_vec(A.dim)
    for c, w in zip(sol.particular, W):
        if c:
            v = vec_add(v, vec_scale(c, w))
    return AffineMap(D, vec_scale(Fraction(-1), v))


# ---------------------------------------------------------------------------
# smash products

def smash_product(pa: Pointing, pb: Pointing):
    """Smash product of two pointed admissible algebras.

    Quotient of the direct product identifying the pointed annihilators;
    returns (algebra, pointing) with basis [ker a..., ker b..., shared ann].
    """
    A, B = pa.algebra, pb.algebra
    a_basis = pa.adapted_basis
    b_basis = pb.adapted_basis
    Aa = A.change_basis(a_basis)
    Bb = B.change_basis(b_basis)
    p, q = A.dim, B.dim
    n = p + q - 1
    ann = n - 1

    def remap_a(k):
        return ann if k == p - 1 else k

    def remap_b(k):
        return ann if k == q - 1 else (p - 1) + k

    products = {}
    for (i, j), vec in Aa._prod.items():
        if i >= p - 1 or j >= p - 1:
            continue  # annihilator products vanish
        products[(i, j)] = {remap_a(k): v for k, v in vec.items()}
    for (i, j), vec in Bb._prod.items():
        if i >= q - 1 or j >= q - 1:
            continue
        key = (remap_b(i), remap_b(j))
        products[key] = {remap_b(k): v for k, v in vec.items()}
    labels = (["a%d" % (i + 1) for i in range(p - 1)]
              + ["b%d" % (i + 1) for i in range(q - 1)] + ["ann"])
    N = NilAlgebra(n, products, labels)
    omega = [Fraction(0)] * n
    omega[ann] = Fraction(1)
    return N, Pointing(N, omega)


# ---------------------------------------------------------------------------
# adapted decompositions

@dataclass
class AdaptedDecomposition:
    E0: list
    E1: list
    E2: list
    E3: list

    def all_blocks(self):
        return [self.E0, self.E1, self.E2, self.E3]


def adapted_decomposition(W: NilAlgebra, h: Matrix) -> AdaptedDecomposition:
    """Split the representation space of the multiplication action of W
    against a nondegenerate symmetric form h for which every
    multiplication operator is selfadjoint.

    E3 = (span of products) \\cap (common kernel); E2, E0 complements
    inside those; E1 a totally isotropic partner of E3.
    """
    n = W.dim
    if h.nrows != n or h.ncols != n:
        raise AlgebraError("form size mismatch")
    for i in range(n):
        for j in range(i, n):
            if h.entry(i, j) != h.entry(j, i):
                raise AlgebraError("form is not symmetric")
    if rref_solve(h).rank != n:
        raise AlgebraError("form is degenerate")
    # selfadjointness: h(e_i e_j, e_k) = h(e_j, e_i e_k) for all triples
    def hval(u_dict, k):
        acc = Fraction(0)
        for i, v in u_dict.items():
            w = h.entry(i, k)
            if w:
                acc += v * w
        return acc

    for i in range(n):
        for j in range(n):
            pij = W.product_basis(min(i, j), max(i, j))
            for k in range(n):
                pik = W.product_basis(min(i, k), max(i, k))
                if hval(pij, k) != hval(pik, j):
                    raise AlgebraError(
                        "multiplication operator %d is not selfadjoint" % (i + 1))

    prods = []
    for i in range(n):
        for j in range(i, n):
            p = W.product_basis(i, j)
            if p:
                prods.append(tuple(p.get(k, Fraction(0)) for k in range(n)))
    B = Subspace(n, prods)
    cols = []
    for j in range(n):
        col = {}
        for i in range(n):
            p = W.product_basis(min(i, j), max(i, j))
            for k, v in p.items():
                col[(i, k)] = v
        cols.append(col)
    _, kern = sparse_kernel(cols)
    K = Subspace(n, kern)

    E3 = B.intersection(K)
    E2 = E3.extend_basis_within(B)
    E0 = E3.extend_basis_within(K)

    # U = orthogonal complement of E0 + E2 w.r.t. h; contains E3 with
    # dim U = 2 dim E3
    anchor = list(E0) + list(E2)
    if anchor:
        rows = [{j: v for j, v in enumerate(h.apply(a)) if v} for a in anchor]
        U_basis = rref_solve(Matrix(len(anchor), n, rows)).kernel_basis
    else:
        U_basis = list(Subspace.full(n).basis)
    U = Subspace(n, U_basis)
    d = E3.dim
    if U.dim != 2 * d or not all(U.contains(v) for v in E3.basis):
        raise AlgebraError("adapted decomposition failed; "
                           "action is not a selfadjoint nilpotent system")

    E1 = []
    if d:
        f = list(E3.basis)
        # dual vectors g_i in U with h(f_i, g_j) = delta_ij
        gram_rows = []
        for u in U.basis:
            gram_rows.append([sum((x * y for x, y in
                                   zip(h.apply(u), fv)), Fraction(0))
                              for fv in f])
        duals = []
        for i in range(d):
            rhs = [Fraction(1) if j == i else Fraction(0) for j in range(d)]
            sol = rref_solve(Matrix.from_rows(gram_rows).transpose(), rhs)
            if sol.particular is None:
                raise AlgebraError("isotropic partner construction failed")
            g = zero_vec(n)
            for c, u in zip(sol.particular, U.basis):
                if c:
                    g = vec_add(g, vec_scale(c, u))
            duals.append(g)
        # correct duals to a totally isotropic complement
        hgg = [[sum((x * y for x, y in zip(h.apply(duals[i]), duals[j])),
                    Fraction(0)) for j in range(d)] for i in range(d)]
        for i in range(d):
            g = duals[i]
            for j in range(d):
                if hgg[i][j]:
                    g = vec_add(g, vec_scale(-hgg[i][j] / 2, f[j]))
            E1.append(g)
    return AdaptedDecomposition(E0=list(E0), E1=E1,
                                E2=list(E2), E3=list(E3.basis))


# ---------------------------------------------------------------------------
# W = ker(omega) as an algebra (the product of the reconstruction)

def kernel_algebra(pointing: Pointing):
    """ker(omega) with product x.y = xy - pi(xy), plus the Gram matrix of
    b(x, y) = omega(xy) on that basis."""
    A = pointing.algebra
    W = pointing.adapted_basis[:-1]
    m = len(W)
    St_inv = Matrix.from_rows(list(W) + [pointing.ann_gen]).transpose().inverse()
    products = {}
    for i in range(m):
        for j in range(i, m):
            prod = A.mul(W[i], W[j])
            w_part = vec_add(prod, vec_scale(Fraction(-1), pointing.project(prod)))
            coords = St_inv.apply(w_part)
            vec = {k: c for k, c in enumerate(coords[:m]) if c}
            if coords[m]:
                raise AlgebraError("kernel product has annihilator component")
            if vec:
                products[(i, j)] = vec
    Walg = NilAlgebra(m, products, ["w%d" % (i + 1) for i in range(m)])
    return Walg, pointing.gram_on_kernel()


def grading_index3(A: NilAlgebra, pointing: Optional[Pointing] = None) -> Grading:
    """Grading with weights (2, 3, 4, 6) for admissible algebras of
    nil-index <= 3, built from an adapted decomposition of ker(omega)."""
    if not A.is_admissible:
        raise AlgebraError("grading_index3 requires an admissible algebra")
    if A.nil_index > 3:
        raise AlgebraError("nil-index %d > 3" % A.nil_index)
    if pointing is None:
        pointing = Pointing.default(A)
    Walg, gram = kernel_algebra(pointing)
    dec = adapted_decomposition(Walg, gram)
    if dec.E2:
        raise AlgebraError("unexpected E2 block for nil-index <= 3")
    W = pointing.adapted_basis[:-1]

    def lift(vecs):
        out = []
        for v in vecs:
            acc = zero_vec(A.dim)
            for c, w in zip(v, W):
                if c:
                    acc = vec_add(acc, vec_scale(c, w))
            out.append(acc)
        return out

    basis = []
    weights = []
    for block, weight in ((dec.E1, 2), (dec.E0, 3), (dec.E3, 4)):
        for v in lift(block):
            basis.append(v)
            weights.append(weight)
    basis.append(pointing.ann_gen)
    weights.append(6)
    g = Grading(A, basis, weights)
    g.verify()
    return g


# ---------------------------------------------------------------------------
# JSON interchange
#
# {"dim": n, "labels": [...], "products": {"i,j": [[k, "num/den"], ...]}}
# with 1-based indices, i <= j keys only, absent key = zero product.

def algebra_to_json(A: NilAlgebra) -> dict:
    products = {}
    for (i, j) in sorted(A._prod):
        vec = A._prod[(i, j)]
        products["%d,%d" % (i + 1, j + 1)] = [
            [k + 1, str(vec[k])] for k in sorted(vec)]
    return {"dim": A.dim, "labels": list(A.labels), "products": products}


def algebra_from_json(data: dict) -> NilAlgebra:
    dim = int(data["dim"])
    labels = data.get("labels")
    products = {}
    for key, entries in data.get("products", {}).items():
        i_s, j_s = key.split(",")
        i, j = int(i_s) - 1, int(j_s) - 1
        products[(i, j)] = {int(k) - 1: Fraction(v) for k, v in entries}
    return NilAlgebra(dim, products, labels)


def load_algebra(path) -> NilAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        return algebra_from_json(json.load(fh))


def save_algebra(A: NilAlgebra, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(algebra_to_json(A), fh, indent=2, sort_keys=True)
        fh.write("\n")
