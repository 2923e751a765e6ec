"""Affine homogeneity of nil-hypersurface graphs, exactly over QQ.

The graph of a nil-polynomial is locally affinely homogeneous at the
origin iff, for every coordinate direction, an explicit linear system in
the entries of an affine vector field is solvable.  All systems here are
assembled sparsely (rows keyed by monomials, merged on the fly) and
solved through the column-echelon kernel engine, so the 23-dimensional
counterexample stays minutes-scale.

Also here: the gradability necessary test (Euler-type field with
eigenvalue conditions), degree-bounded Jacobi ideal membership, and the
constructive transitivity witnesses for graded algebras and for points
in the third / fourth socle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .algebra import (AlgebraError, Grading, GradingError, NilAlgebra,
                      Pointing, Subspace, adapted_decomposition,
                      kernel_algebra)
from .exactlin import (AffineMap, Matrix, _IntEchelon, _int_row_from_qq,
                       rat, rational_spectrum, rref_solve, sparse_kernel,
                       sparse_solve, vec_add, vec_scale, vec_sub, zero_vec)
from .mpoly import MPoly
from .nilpoly import (NilPolynomial, NilPolyError, extended_nil_polynomial,
                      reconstruct_algebra)

__all__ = [
    "HomogeneityReport", "JPAnalysis", "homogeneity_report",
    "aff_lie_algebra", "GradingReport", "grading_necessary_test",
    "jacobi_membership", "TransitivityWitness", "transitivity_witness",
]


def _row_order(key):
    """Eliminate high-degree monomial rows first."""
    m, mono = key
    return (m, -sum(mono), tuple(-e for e in mono))


def _add_poly(col: dict, m: int, poly: MPoly, sign: int = 1):
    for mono, c in poly.terms.items():
        k = (m, mono)
        v = col.get(k, Fraction(0)) + (c if sign > 0 else -c)
        if v:
            col[k] = v
        else:
            col.pop(k, None)


@dataclass
class HomogeneityReport:
    per_ell_solvable: list
    orbit_dim_at_origin: int
    aff_dim: int
    verdict: str                      # "AH" or "locally_non_homogeneous"
    cross_check_passed: Optional[bool]
    timings_ms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "per_ell": list(self.per_ell_solvable),
            "orbit_dim": self.orbit_dim_at_origin,
            "aff_dim": self.aff_dim,
            "verdict": self.verdict,
            "cross_check": self.cross_check_passed,
            "timings_ms": dict(self.timings_ms),
        }


class JPAnalysis:
    """Shared solve for the graph-tangency systems of one nil-polynomial.

    The homogeneous parts of all per-direction systems coincide; the
    per-direction data enters through extra columns (one per translation
    unknown), so a single kernel computation answers every question:
    direction solvability, the origin-orbit dimension, the dimension and
    a basis of the tangent affine maps.
    """

    def __init__(self, P: NilPolynomial, polys: Optional[Sequence[MPoly]] = None):
        self.P = P
        self.r = len(P.vars)
        self.polys = list(polys) if polys is not None else [P.poly]
        self.s = len(self.polys)
        self.n = self.r + self.s
        self.timings = {}
        self._kernel = None
        self._orbit = None

    # -- system assembly ---------------------------------------------------

    def _assemble(self):
        r, n, s = self.r, self.n, self.s
        polys = self.polys
        t0 = time.perf_counter()
        gens = [MPoly.gen(self.P.vars, k) for k in range(r)]
        partials = [[p.derivative(j) for j in range(r)] for p in polys]
        columns = {}

        def col(key):
            if key not in columns:
                columns[key] = {}
            return columns[key]

        for mi, p_m in enumerate(polys):
            m = r + mi
            # left-hand side P_m
            for k in range(r):
                _add_poly(col(("a", m, k)), mi, gens[k])
            for k in range(r, n):
                _add_poly(col(("a", m, k)), mi, polys[k - r])
            # right-hand side sum over j <= r of (P_j + c_j) dp_m/dx_j
            for j in range(r):
                dp = partials[mi][j]
                if dp.is_zero():
                    continue
                for k in range(r):
                    _add_poly(col(("a", j, k)), mi, gens[k] * dp, sign=-1)
                for k in range(r, n):
                    _add_poly(col(("a", j, k)), mi, polys[k - r] * dp, sign=-1)
                _add_poly(col(("c", j)), mi, dp, sign=-1)
        order = [("a", j, k) for j in range(n) for k in range(n)] \
            + [("c", j) for j in range(r)]
        self.unknowns = order
        self.columns = [columns.get(u, {}) for u in order]
        self.timings["assemble_ms"] = int(1000 * (time.perf_counter() - t0))

    # -- solving -------------------------------------------------------------

    def kernel(self):
        if self._kernel is None:
            self._assemble()
            t0 = time.perf_counter()
            rank, basis = sparse_kernel(self.columns, key=_row_order)
            self.timings["solve_ms"] = int(1000 * (time.perf_counter() - t0))
            self.rank = rank
            self._kernel = basis
        return self._kernel

    def aff_dim(self) -> int:
        return len(self.kernel())

    def _orbit_echelon(self):
        if self._orbit is None:
            base = self.n * self.n
            ech = _IntEchelon()
            for vec in self.kernel():
                row = [(j, vec[base + j]) for j in range(self.r)
                       if vec[base + j]]
                ech.insert(_int_row_from_qq(row))
            self._orbit = ech
        return self._orbit

    def orbit_dim(self) -> int:
        return self._orbit_echelon().rank

    def direction_solvable(self, ell: int) -> bool:
        """1-based direction index; True iff the tangency system with
        unit translation in direction ell has a rational solution."""
        if not 1 <= ell <= self.r:
            raise ValueError("direction index out of range")
        ech = self._orbit_echelon()
        return not ech.reduce([(ell - 1, 1)])

    def affine_basis(self, canonical: bool = True) -> list:
        """Basis of the tangent affine maps on the ambient n-space."""
        vecs = self.kernel()
        if canonical:
            vecs = Subspace(self.n * self.n + self.r, vecs).basis
        out = []
        n, r = self.n, self.r
        for vec in vecs:
            rows = [{} for _ in range(n)]
            for j in range(n):
                for k in range(n):
                    v = vec[j * n + k]
                    if v:
                        rows[j][k] = v
            trans = [vec[n * n + j] for j in range(r)] + [Fraction(0)] * self.s
            out.append(AffineMap(Matrix(n, n, rows), tuple(trans)))
        return out

    def verify_tangency(self, amap: AffineMap) -> bool:
        """Directional derivative of each graph equation along the map
        vanishes identically after substituting the graph."""
        r, n = self.r, self.n
        gens = [MPoly.gen(self.P.vars, k) for k in range(r)]
        subst = gens + self.polys     # x_k for k <= r, then p_k
        zero = MPoly.zero(self.P.vars)

        def coord(j):
            acc = MPoly.constant(amap.translation[j], self.P.vars)
            for k, v in amap.linear.rows[j].items():
                acc = acc + subst[k] * v
            return acc

        for mi, p_m in enumerate(self.polys):
            m = r + mi
            g = coord(m)
            for j in range(r):
                dp = p_m.derivative(j)
                if not dp.is_zero():
                    g = g - coord(j) * dp
            if not g.is_zero():
                return False
        return True

    # -- the independently assembled scalar cross formulation ---------------

    def cross_check(self) -> Optional[bool]:
        """For a scalar graph, rebuild the verdicts from the eigenfield
        formulation  xi(f) = rho * f  with f = p - x_n and compare."""
        if self.s != 1:
            return None
        t0 = time.perf_counter()
        r = self.r
        n = self.n
        names = list(self.P.vars) + ["x%d" % n]
        p_ext = MPoly(names, {mono + (0,): c
                              for mono, c in self.polys[0].terms.items()})
        xn = MPoly.gen(names, n - 1)
        f = p_ext - xn
        gens = [MPoly.gen(names, k) for k in range(n)]
        partials = [f.derivative(j) for j in range(n)]
        columns = {}

        def col(key):
            if key not in columns:
                columns[key] = {}
            return columns[key]

        for j in range(n):
            dp = partials[j]
            if dp.is_zero():
                continue
            for k in range(n):
                _add_poly(col(("a", j, k)), 0, gens[k] * dp)
        _add_poly(col(("rho",)), 0, f, sign=-1)
        for ell in range(r):
            _add_poly(col(("c", ell)), 0, partials[ell])
        order = [("a", j, k) for j in range(n) for k in range(n)] \
            + [("rho",)] + [("c", ell) for ell in range(r)]
        cols = [columns.get(u, {}) for u in order]
        _, kern = sparse_kernel(cols, key=_row_order)
        base = n * n + 1
        ech = _IntEchelon()
        for vec in kern:
            row = [(j, vec[base + j]) for j in range(r) if vec[base + j]]
            ech.insert(_int_row_from_qq(row))
        verdicts = [not ech.reduce([(ell, 1)]) for ell in range(r)]
        self.timings["cross_check_ms"] = int(1000 * (time.perf_counter() - t0))
        return verdicts == [self.direction_solvable(ell + 1)
                            for ell in range(r)]

    # -- the report ----------------------------------------------------------

    def report(self, cross_check: bool = True,
               checkpoint=None) -> HomogeneityReport:
        per_ell = []
        for ell in range(1, self.r + 1):
            ok = self.direction_solvable(ell)
            per_ell.append(ok)
            if checkpoint is not None:
                checkpoint(ell, ok)
        verdict = "AH" if all(per_ell) else "locally_non_homogeneous"
        cc = self.cross_check() if cross_check else None
        return HomogeneityReport(
            per_ell_solvable=per_ell,
            orbit_dim_at_origin=self.orbit_dim(),
            aff_dim=self.aff_dim(),
            verdict=verdict,
            cross_check_passed=cc,
            timings_ms=dict(self.timings),
        )


def homogeneity_report(P: NilPolynomial, cross_check: bool = True,
                       checkpoint=None) -> HomogeneityReport:
    return JPAnalysis(P).report(cross_check=cross_check, checkpoint=checkpoint)


def aff_lie_algebra(P: NilPolynomial, verify: bool = True) -> list:
    """Basis of the affine maps tangent to the graph of P; each basis map
    is checked against the graph identity when verify is set."""
    an = JPAnalysis(P)
    basis = an.affine_basis()
    if verify:
        for amap in basis:
            if not an.verify_tangency(amap):
                raise AssertionError("tangency verification failed")
    return basis


# ---------------------------------------------------------------------------
# gradability necessary test

@dataclass
class GradingReport:
    system_solvable: bool
    solution_space_dim: int
    witness: Optional[Grading]
    verdict: str     # not_gradable | gradable_with_witness | inconclusive
    spectrum: Optional[object] = None
    conditions: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "system_solvable": self.system_solvable,
            "solution_space_dim": self.solution_space_dim,
            "verdict": self.verdict,
            "conditions": {k: v for k, v in self.conditions.items()},
        }
        if self.witness is not None:
            out["witness_weights"] = list(self.witness.weights)
        if self.spectrum is not None:
            out["eigenvalues"] = [[str(l), am, gm]
                                  for l, am, gm in self.spectrum.eigenvalues]
        return out


def _euler_system(P: NilPolynomial):
    """Columns of  sum a_jk x_k dp/dx_j  and the right-hand side p."""
    r = len(P.vars)
    gens = [MPoly.gen(P.vars, k) for k in range(r)]
    partials = [P.poly.derivative(j) for j in range(r)]
    columns = []
    for j in range(r):
        for k in range(r):
            colm = {}
            if not partials[j].is_zero():
                _add_poly(colm, 0, gens[k] * partials[j])
            columns.append(colm)
    rhs = {}
    _add_poly(rhs, 0, P.poly)
    return columns, rhs


def _matrix_from_vec(vec, r) -> Matrix:
    rows = [{} for _ in range(r)]
    for j in range(r):
        for k in range(r):
            v = vec[j * r + k]
            if v:
                rows[j][k] = v
    return Matrix(r, r, rows)


def _spectrum_conditions(spec) -> dict:
    eigs = {lam: am for lam, am, _ in spec.eigenvalues}
    positive = all(lam > 0 for lam in eigs)
    mirrored = all(eigs.get(1 - lam) == am for lam, am in eigs.items())
    return {
        "diagonalizable_over_Q": spec.diagonalizable_over_Q,
        "eigenvalues_positive_rational":
            spec.char_poly_splits_over_Q and positive,
        "mirror_multiplicities": spec.char_poly_splits_over_Q and mirrored,
    }


def _grading_from_diagonalizable(P: NilPolynomial, A: Matrix,
                                 spec) -> Optional[Grading]:
    """Try to turn a diagonalizable Euler-field solution into a verified
    grading of the (reconstructed or provenance) algebra."""
    prov = P.provenance or {}
    algebra = prov.get("algebra")
    if algebra is None:
        recon = reconstruct_algebra(P.quadratic, P.cubic)
        if not recon.accepted:
            return None
        algebra = recon.algebra
    r = len(P.vars)
    if algebra.dim != r + 1:
        return None
    denom = 1
    for lam, _, _ in spec.eigenvalues:
        denom = denom * lam.denominator // __import__("math").gcd(
            denom, lam.denominator)
    basis = []
    weights = []
    for lam, _, _ in spec.eigenvalues:
        shifted = A - Matrix.identity(r).scale(lam)
        for v in rref_solve(shifted).kernel_basis:
            basis.append(tuple(v) + (Fraction(0),))
            weights.append(int(lam * denom))
    if len(basis) != r:
        return None
    basis.append(tuple([Fraction(0)] * r) + (Fraction(1),))
    weights.append(denom)
    try:
        g = Grading(algebra, basis, weights)
        g.verify()
        return g
    except (GradingError, AlgebraError, ValueError):
        return None


def grading_necessary_test(P: NilPolynomial,
                           witness: Optional[Grading] = None) -> GradingReport:
    """Necessary test for gradability: solvability of the Euler-field
    identity  xi(p) = p  with linear coefficient matrix.

    Infeasibility proves the algebra has no grading.  A feasible system
    upgrades to gradable_with_witness only with a grading that passes
    direct verification (supplied, carried by provenance, or found from
    a diagonalizable solution); otherwise the verdict is inconclusive."""
    columns, rhs = _euler_system(P)
    sol = sparse_solve(columns, rhs)
    r = len(P.vars)
    if not sol.consistent:
        return GradingReport(system_solvable=False,
                             solution_space_dim=len(sol.kernel_basis),
                             witness=None, verdict="not_gradable")

    if witness is None:
        prov = P.provenance or {}
        witness = prov.get("grading")
    if witness is not None:
        witness.verify()
        return GradingReport(system_solvable=True,
                             solution_space_dim=len(sol.kernel_basis),
                             witness=witness,
                             verdict="gradable_with_witness")

    candidates = [_matrix_from_vec(sol.particular, r)]
    prov = P.provenance or {}
    algebra = prov.get("algebra")
    pointing = prov.get("pointing")
    if algebra is not None and pointing is not None:
        # canonical-progression ansatz: filtration depth over nil-index
        nu = algebra.nil_index
        depth = []
        for w in pointing.adapted_basis[:-1]:
            k = max(kk for kk in range(1, nu + 1)
                    if algebra.power(kk).contains(w))
            depth.append(Fraction(k, nu))
        cand = Matrix.diagonal(depth)
        if _euler_residual(P, cand).is_zero():
            candidates.append(cand)

    spectrum = None
    conditions = {}
    for A in candidates:
        spec = rational_spectrum(A)
        conds = _spectrum_conditions(spec)
        if spectrum is None:
            spectrum, conditions = spec, conds
        if all(conds.values()):
            g = _grading_from_diagonalizable(P, A, spec)
            if g is not None:
                return GradingReport(system_solvable=True,
                                     solution_space_dim=len(sol.kernel_basis),
                                     witness=g, verdict="gradable_with_witness",
                                     spectrum=spec, conditions=conds)
    return GradingReport(system_solvable=True,
                         solution_space_dim=len(sol.kernel_basis),
                         witness=None, verdict="inconclusive",
                         spectrum=spectrum, conditions=conditions)


def _euler_residual(P: NilPolynomial, A: Matrix) -> MPoly:
    """xi(p) - p for the field with coefficient matrix A."""
    r = len(P.vars)
    gens = [MPoly.gen(P.vars, k) for k in range(r)]
    acc = -P.poly
    for j in range(r):
        dp = P.poly.derivative(j)
        if dp.is_zero():
            continue
        lin = MPoly.zero(P.vars)
        for k, v in A.rows[j].items():
            lin = lin + gens[k] * v
        if not lin.is_zero():
            acc = acc + lin * dp
    return acc


# ---------------------------------------------------------------------------
# Jacobi ideal membership with a degree bound

def jacobi_membership(P: NilPolynomial, degree_bound: int) -> Optional[list]:
    """Coefficients lambda_k with  p = sum lambda_k dp/dx_k  and
    deg(lambda_k) <= degree_bound; None when no such representation
    exists within the bound (this is not a proof of non-membership)."""
    if degree_bound < 0:
        raise ValueError("degree bound must be >= 0")
    r = len(P.vars)
    partials = [P.poly.derivative(k) for k in range(r)]
    monos = _monomials_leq(r, degree_bound)
    columns = []
    unknowns = []
    for k in range(r):
        if partials[k].is_zero():
            continue
        for mono in monos:
            shifted = MPoly(P.vars, {tuple(a + b for a, b in zip(m, mono)): c
                                     for m, c in partials[k].terms.items()})
            colm = {}
            _add_poly(colm, 0, shifted)
            columns.append(colm)
            unknowns.append((k, mono))
    rhs = {}
    _add_poly(rhs, 0, P.poly)
    sol = sparse_solve(columns, rhs, key=_row_order)
    if not sol.consistent:
        return None
    lambdas = [MPoly.zero(P.vars) for _ in range(r)]
    for (k, mono), v in zip(unknowns, sol.particular):
        if v:
            lambdas[k] = lambdas[k] + MPoly(P.vars, {mono: v})
    # verify by substitution
    acc = MPoly.zero(P.vars)
    for k in range(r):
        if not lambdas[k].is_zero():
            acc = acc + lambdas[k] * partials[k]
    if acc != P.poly:
        raise AssertionError("membership verification failed")
    return lambdas


def _monomials_leq(nvars: int, d: int) -> list:
    out = [(0,) * nvars]
    frontier = [(0,) * nvars]
    for _ in range(d):
        nxt = []
        for mono in frontier:
            for i in range(nvars):
                m = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                nxt.append(m)
        frontier = sorted(set(nxt))
        out.extend(frontier)
    return sorted(set(out))


# ---------------------------------------------------------------------------
# transitivity witnesses

@dataclass
class TransitivityWitness:
    mode: str
    map: AffineMap
    steps: list
    point: tuple
    f_preserved: bool
    maps_point_to_origin: bool


def _affine_from_unital(g: Matrix, n: int) -> AffineMap:
    """Restrict a unital-extension operator fixing the hyperplane 1 + N
    to the affine map it induces on N (coordinates [1, e_1..e_n])."""
    rows = [{} for _ in range(n)]
    trans = []
    for i in range(n):
        grow = g.rows[i + 1]
        trans.append(grow.get(0, Fraction(0)))
        for j, v in grow.items():
            if j >= 1:
                rows[i][j - 1] = v
    return AffineMap(Matrix(n, n, rows), tuple(trans))


def _exp_nilpotent(M: Matrix) -> Matrix:
    n = M.nrows
    acc = Matrix.identity(n)
    term = Matrix.identity(n)
    k = 1
    while True:
        term = term * M
        if all(not r for r in term.rows):
            return acc
        acc = acc + term.scale(Fraction(1, factorial(k)))
        k += 1
        if k > n + 1:
            raise AlgebraError("operator is not nilpotent")


def _socle3_map(pointing: Pointing, a: Sequence) -> AffineMap:
    """Inverse of h_a(x) = x - rho(a x) + a with rho = (id + pi)/2."""
    A = pointing.algebra
    n = A.dim
    Ma = A.multiplication_operator(a)
    PMa = pointing.projection_matrix() * Ma
    L = Matrix.identity(n) - (Ma + PMa).scale(Fraction(1, 2))
    h = AffineMap(L, tuple(rat(x) for x in a))
    return h.inverse()


def _socle4_reduction(pointing: Pointing, a: Sequence) -> AffineMap:
    """Affine surface automorphism pushing a fourth-socle surface point
    into the third socle (exp of an explicit nilpotent operator on the
    unital extension)."""
    A = pointing.algebra
    n = A.dim
    Walg, gram = kernel_algebra(pointing)
    dec = adapted_decomposition(Walg, gram)
    m = Walg.dim
    basis = pointing.adapted_basis
    St_inv = Matrix.from_rows(basis).transpose().inverse()
    coords = St_inv.apply(tuple(rat(x) for x in a))
    c = tuple(coords[:m])  # W-component of a in the adapted basis

    blocks = [dec.E0, dec.E1, dec.E2, dec.E3]
    full = [v for blk in blocks for v in blk]
    T = Matrix.from_rows(full).transpose()      # decomposition -> W coords
    T_inv = T.inverse()

    def projector(which: int) -> Matrix:
        offs = 0
        rows = [{} for _ in range(m)]
        sel = [Fraction(0)] * len(full)
        for b, blk in enumerate(blocks):
            for _ in blk:
                if b == which:
                    sel[offs] = Fraction(1)
                offs += 1
        D = Matrix.diagonal(sel)
        return T * D * T_inv

    pi1, pi2, pi3 = projector(1), projector(2), projector(3)
    Nc = Walg.multiplication_operator(c)
    Pop = pi3 * Nc * pi2 - pi2 * Nc * pi1
    Q = Nc.scale(Fraction(1, 2)) + Pop.scale(Fraction(1, 6))

    # lambda on [1, W, ann]: (s, x, t) -> (0, Qx - s c, gram(c, x))
    lam_rows = [{} for _ in range(m + 2)]
    for i in range(m):
        if c[i]:
            lam_rows[i + 1][0] = -c[i]
        for j, v in Q.rows[i].items():
            lam_rows[i + 1][j + 1] = v
    hc = gram.apply(c)
    for j in range(m):
        if hc[j]:
            lam_rows[m + 1][j + 1] = hc[j]
    lam = Matrix(m + 2, m + 2, lam_rows)
    g = _exp_nilpotent(lam)
    step_adapted = _affine_from_unital(g, m + 1)

    # conjugate back to the algebra's own coordinates
    B = Matrix.from_rows(basis).transpose()     # adapted -> original
    B_inv = B.inverse()
    return AffineMap(B * step_adapted.linear * B_inv,
                     B.apply(step_adapted.translation))


def _graded_steps(pointing: Pointing, grading: Grading, a: Sequence) -> list:
    """Weight-raising induction for a graded algebra with a compatible
    pointing; returns the affine steps moving a to the origin."""
    A = pointing.algebra
    n = A.dim
    ann_weights = {grading.weights[i]
                   for i, v in enumerate(grading.coords(pointing.ann_gen)) if v}
    if len(ann_weights) != 1:
        raise AlgebraError("annihilator is not homogeneous for the grading")
    d = ann_weights.pop()
    for i, w in enumerate(grading.weights):
        if w != d and pointing.value(grading.basis[i]):
            raise AlgebraError("pointing does not vanish on weight %d" % w)

    St = Matrix.from_rows(grading.basis).transpose()
    St_inv = St.inverse()

    def weight_projector(pred) -> Matrix:
        D = Matrix.diagonal([Fraction(1) if pred(w) else Fraction(0)
                             for w in grading.weights])
        return St * D * St_inv

    steps = []
    cur = tuple(rat(x) for x in a)
    guard = 0
    while True:
        present = [grading.weights[i]
                   for i, v in enumerate(grading.coords(cur)) if v]
        low = [w for w in present if w < d]
        if not low:
            break
        j = min(low)
        aj = grading.component(cur, j)
        Maj = A.multiplication_operator(aj)
        scaled = Matrix.zeros(n, n)
        for k in range(1, d - j + 1):
            Pk = weight_projector(lambda w, kk=k: w == kk)
            scaled = scaled + Pk.scale(Fraction(k, d - j))
        lamN = Maj * scaled
        lam_rows = [dict() for _ in range(n + 1)]
        for i in range(n):
            if aj[i]:
                lam_rows[i + 1][0] = -aj[i]
            for k, v in lamN.rows[i].items():
                lam_rows[i + 1][k + 1] = v
        g = _exp_nilpotent(Matrix(n + 1, n + 1, lam_rows))
        step = _affine_from_unital(g, n)
        nxt = step.apply(cur)
        new_min = grading.min_weight(nxt)
        if new_min is not None and new_min <= j:
            raise AlgebraError("induction failed to raise the minimal weight")
        steps.append(step)
        cur = nxt
        guard += 1
        if guard > n + 2:
            raise AlgebraError("graded induction did not terminate")
    # translation killing the kernel part of the residue
    shift = vec_sub(cur, pointing.project(cur))
    if any(shift):
        step = AffineMap(Matrix.identity(n),
                         tuple(-x for x in shift))
        steps.append(step)
        cur = step.apply(cur)
    if any(cur):
        raise AlgebraError("graded witness did not reach the origin")
    return steps


def transitivity_witness(algebra: NilAlgebra, pointing: Pointing,
                         a: Sequence, mode: str,
                         grading: Optional[Grading] = None) -> TransitivityWitness:
    """Affine map g with g(a) = 0 and f o g = f, where f is the extended
    nil-polynomial of the pointed algebra.

    Modes: "socle3" (a in the third socle), "socle4" (fourth socle,
    chained through a socle3 step), "graded" (weight-raising induction;
    needs a verified grading compatible with the pointing).  The
    identity f o g = f is verified symbolically, g(a) = 0 exactly."""
    a = tuple(rat(x) for x in a)
    if not pointing.on_hypersurface(a):
        raise AlgebraError("point is not on the hypersurface")
    steps = []
    if mode == "socle3":
        if not algebra.socle(3).contains(a):
            raise AlgebraError("point is not in the third socle")
        steps = [_socle3_map(pointing, a)]
    elif mode == "socle4":
        if not algebra.socle(4).contains(a):
            raise AlgebraError("point is not in the fourth socle")
        push = _socle4_reduction(pointing, a)
        b = push.apply(a)
        if not algebra.socle(3).contains(b):
            raise AlgebraError("socle4 reduction missed the third socle")
        if not pointing.on_hypersurface(b):
            raise AlgebraError("socle4 reduction left the hypersurface")
        steps = [push, _socle3_map(pointing, b)]
    elif mode == "graded":
        if grading is None:
            raise AlgebraError("graded mode requires a grading")
        grading.verify()
        steps = _graded_steps(pointing, grading, a)
        if not steps:
            steps = [AffineMap.identity(algebra.dim)]
    else:
        raise ValueError("unknown mode %r" % mode)

    total = steps[0]
    for s in steps[1:]:
        total = s.compose(total)

    f = extended_nil_polynomial(algebra, pointing, adapted=False)
    composed = f.compose_affine(total.linear, total.translation)
    preserved = composed == f
    to_origin = not any(total.apply(a))
    if not preserved:
        raise AlgebraError("witness does not preserve the defining polynomial")
    if not to_origin:
        raise AlgebraError("witness does not move the point to the origin")
    return TransitivityWitness(mode=mode, map=total, steps=steps, point=a,
                               f_preserved=preserved,
                               maps_point_to_origin=to_origin)
