"""Nil-polynomials: extraction, reconstruction, families, invariants.

A nil-polynomial of a pointed admissible algebra is the composite of the
pointing with the twice-truncated exponential on a complement of the
annihilator: zero constant and linear part, nondegenerate quadratic
part, degree equal to the nil-index.  The quadratic and cubic parts
alone determine the algebra (and hence the whole polynomial): the
product on the complement solves the Gram system of the quadratic form
against slices of the trilinear form, and the higher symmetric forms
follow by contracting one slot at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .algebra import (AlgebraError, NilAlgebra, Pointing, Grading,
                      kernel_algebra, smash_product)
from .exactlin import (Matrix, QQ, rat, rref_solve, sparse_kernel, vec_add,
                       vec_scale, zero_vec)
from .mpoly import MPoly, parse, polarize, symmetric_form_value

__all__ = [
    "NilPolynomial", "NilPolyError", "nil_polynomial",
    "extended_nil_polynomial", "shift_pointing",
    "ReconstructionResult", "reconstruct_algebra", "regenerate_from_2_3",
    "hz_isomorphism_check", "family_degree3", "e6_family", "family_degree4",
    "binary_quartic_invariants", "leading_form_analysis", "LeadingFormReport",
    "EquivalenceWitness", "equivalence_witness_check",
    "nilpoly_to_json", "nilpoly_from_json",
]


class NilPolyError(ValueError):
    pass


class NilPolynomial:
    """A polynomial with vanishing constant/linear part and nondegenerate
    quadratic part, optionally carrying its provenance (algebra,
    pointing, basis)."""

    def __init__(self, poly: MPoly, provenance: Optional[dict] = None):
        self.poly = poly
        self.vars = poly.vars
        self.provenance = provenance or {}
        n = len(poly.vars)
        if poly.constant_term():
            raise NilPolyError("constant part does not vanish")
        if any(poly.homogeneous_part(1).terms):
            raise NilPolyError("linear part does not vanish")
        if n > 0:
            if rref_solve(self.gram).rank != n:
                raise NilPolyError("quadratic part is degenerate")

    @property
    def degree(self):
        return self.poly.degree()

    def part(self, k: int) -> MPoly:
        return self.poly.homogeneous_part(k)

    @property
    def quadratic(self) -> MPoly:
        return self.part(2)

    @property
    def cubic(self) -> MPoly:
        return self.part(3)

    @property
    def gram(self) -> Matrix:
        """Gram matrix of the polarized quadratic part."""
        return gram_of_quadratic(self.quadratic)

    def omega_k(self, k: int, vectors: Sequence[Sequence]) -> Fraction:
        return polarize(self.part(k), vectors)

    def __eq__(self, other):
        return isinstance(other, NilPolynomial) and self.poly == other.poly

    def __repr__(self):
        return "NilPolynomial(%r)" % (str(self.poly),)


def gram_of_quadratic(q: MPoly) -> Matrix:
    n = len(q.vars)
    rows = [{} for _ in range(n)]
    for mono, c in q.terms.items():
        support = [i for i, e in enumerate(mono) if e]
        if len(support) == 1:
            i = support[0]
            rows[i][i] = 2 * c
        else:
            i, j = support
            rows[i][j] = c
            rows[j][i] = c
    return Matrix(n, n, rows)


# ---------------------------------------------------------------------------
# extraction

def _generic_powers(A: NilAlgebra, W_rows: Sequence, var_names: Sequence[str]):
    """Vectors of polynomials for (sum x_i w_i)^k, k = 1, 2, ... until zero."""
    n = A.dim
    m = len(W_rows)
    gens = [MPoly.gen(var_names, i) for i in range(m)]
    zero = MPoly.zero(var_names)
    cur = [zero] * n
    for i, w in enumerate(W_rows):
        for c_idx, val in enumerate(w):
            if val:
                cur[c_idx] = cur[c_idx] + gens[i] * val
    first = list(cur)
    powers = [list(cur)]
    while True:
        nxt = [zero] * n
        nonzero = False
        for i in range(n):
            fi = first[i]
            if fi.is_zero():
                continue
            for j in range(n):
                pj = powers[-1][j]
                if pj.is_zero():
                    continue
                prod = A.product_basis(min(i, j), max(i, j))
                if not prod:
                    continue
                fp = fi * pj
                for k, v in prod.items():
                    nxt[k] = nxt[k] + fp * v
        for p in nxt:
            if not p.is_zero():
                nonzero = True
                break
        if not nonzero:
            return powers
        powers.append(nxt)
        if len(powers) > A.dim + 1:
            raise AlgebraError("generic element powers do not terminate")


def nil_polynomial(A: NilAlgebra, pointing: Optional[Pointing] = None,
                   var_prefix: str = "x") -> NilPolynomial:
    """Nil-polynomial of a pointed admissible algebra.

    With the default pointing the variables label the adapted basis of
    ker(omega); the result has degree equal to the nil-index and its
    quadratic part is nondegenerate (asserted at construction)."""
    if not A.is_admissible:
        raise NilPolyError("algebra is not admissible")
    if pointing is None:
        pointing = Pointing.default(A)
    basis = pointing.adapted_basis
    W_rows = basis[:-1]
    m = len(W_rows)
    names = ["%s%d" % (var_prefix, i + 1) for i in range(m)]
    powers = _generic_powers(A, W_rows, names)
    p = MPoly.zero(names)
    for k, vec in enumerate(powers, start=1):
        if k < 2:
            continue
        omega_of = MPoly.zero(names)
        for c_idx, w in enumerate(pointing.omega):
            if w and not vec[c_idx].is_zero():
                omega_of = omega_of + vec[c_idx] * w
        p = p + omega_of * Fraction(1, factorial(k))
    result = NilPolynomial(p, provenance={
        "algebra": A, "pointing": pointing, "basis": basis})
    if A.dim > 1 and result.degree != A.nil_index:
        raise NilPolyError("degree %s differs from nil-index %d"
                           % (result.degree, A.nil_index))
    return result


def extended_nil_polynomial(A: NilAlgebra, pointing: Optional[Pointing] = None,
                            adapted: bool = True,
                            var_prefix: str = "x") -> MPoly:
    """omega(exp_1(sum x_i b_i)): in the adapted basis this is the
    associated nil-polynomial plus the last coordinate; with
    adapted=False the b_i are the algebra's own basis vectors."""
    if pointing is None:
        pointing = Pointing.default(A)
    n = A.dim
    if adapted:
        rows = pointing.adapted_basis
    else:
        rows = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
                for i in range(n)]
    names = ["%s%d" % (var_prefix, i + 1) for i in range(n)]
    powers = _generic_powers(A, rows, names)
    f = MPoly.zero(names)
    for k, vec in enumerate(powers, start=1):
        omega_of = MPoly.zero(names)
        for c_idx, w in enumerate(pointing.omega):
            if w and not vec[c_idx].is_zero():
                omega_of = omega_of + vec[c_idx] * w
        f = f + omega_of * Fraction(1, factorial(k))
    return f


def shift_pointing(pointing: Pointing, s: Sequence) -> Pointing:
    """Pointing of the projection pi o M_(exp s) for a surface point s.

    Checks idempotence and range of the shifted projection, and spot
    checks the duality f_new(x) = f_old(x + s) on sample points."""
    A = pointing.algebra
    if not pointing.on_hypersurface(s):
        raise NilPolyError("shift point is not on the hypersurface")
    exp1s = A.exp1(s)
    new_omega = []
    for j in range(A.dim):
        ej = tuple(Fraction(1) if i == j else Fraction(0) for i in range(A.dim))
        val = pointing.value(ej) + pointing.value(A.mul(exp1s, ej))
        new_omega.append(val)
    rho = Pointing(A, new_omega)
    P = rho.projection_matrix()
    if P * P != P:
        raise NilPolyError("shifted projection is not idempotent")
    for col in range(A.dim):
        if not A.annihilator.contains(P.col(col)):
            raise NilPolyError("shifted projection range exceeds the annihilator")
    import random
    rng = random.Random(7)
    for _ in range(4):
        x = tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 3))
                  for _ in range(A.dim))
        lhs = rho.value(A.exp1(x))
        rhs = pointing.value(A.exp1(vec_add(x, tuple(rat(v) for v in s))))
        if lhs != rhs:
            raise NilPolyError("duality spot check failed")
    return rho


# ---------------------------------------------------------------------------
# reconstruction from quadratic + cubic data

@dataclass
class ReconstructionResult:
    accepted: bool
    algebra: Optional[NilAlgebra]
    pointing: Optional[Pointing]
    w_products: Optional[dict]      # {(i, j): tuple}, the product on W
    reason: str = ""
    witness_triple: Optional[tuple] = None  # 1-based failing triple


def _w_products(q: MPoly, c: MPoly):
    """Commutative product on W from  omega_2(x.y, z) = omega_3(x, y, z)."""
    n = len(q.vars)
    G = gram_of_quadratic(q)
    Ginv = G.inverse()
    products = {}
    for i in range(n):
        for j in range(i, n):
            rhs = [symmetric_form_value(c, (i, j, k)) for k in range(n)]
            if any(rhs):
                products[(i, j)] = Ginv.apply(rhs)
            else:
                products[(i, j)] = zero_vec(n)
    return products, G


def reconstruct_algebra(q: MPoly, c: MPoly) -> ReconstructionResult:
    """Candidate algebra on W + QQ from a nondegenerate quadratic q and a
    cubic c; accepted iff the induced product is associative and
    nilpotent, in which case the result is verified and admissible."""
    if not q.is_homogeneous(2) or q.is_zero():
        raise NilPolyError("quadratic part must be homogeneous of degree 2")
    if not (c.is_zero() or c.is_homogeneous(3)):
        raise NilPolyError("cubic part must be homogeneous of degree 3")
    if c.vars != q.vars:
        if c.is_zero():
            c = MPoly.zero(q.vars)
        else:
            raise NilPolyError("q and c must share one variable context")
    n = len(q.vars)
    G = gram_of_quadratic(q)
    if rref_solve(G).rank != n:
        raise NilPolyError("quadratic part is degenerate")
    wprod, G = _w_products(q, c)

    dim = n + 1
    products = {}
    for (i, j), vec in wprod.items():
        entry = {k: v for k, v in enumerate(vec) if v}
        g = G.entry(i, j)
        if g:
            entry[n] = g
        if entry:
            products[(i, j)] = entry
    labels = list(q.vars) + ["ann"]
    cand = NilAlgebra(dim, products, labels)
    report = cand.verify()
    if not report.associative:
        return ReconstructionResult(False, None, None, wprod,
                                    reason="product is not associative",
                                    witness_triple=report.failures[0])
    if not report.nilpotent:
        return ReconstructionResult(False, None, None, wprod,
                                    reason="product is not nilpotent")
    omega = [Fraction(0)] * dim
    omega[n] = Fraction(1)
    return ReconstructionResult(True, cand, Pointing(cand, omega), wprod)


def regenerate_from_2_3(q: MPoly, c: MPoly) -> NilPolynomial:
    """Rebuild the full nil-polynomial from its quadratic and cubic part.

    The k-linear forms for k >= 4 are generated by contracting two slots
    through the W-product; diagonal values assemble the homogeneous
    parts.  Raises NilPolyError when reconstruction rejects."""
    r = reconstruct_algebra(q, c)
    if not r.accepted:
        raise NilPolyError("reconstruction rejected: %s (witness %r)"
                           % (r.reason, r.witness_triple))
    n = len(q.vars)
    G = gram_of_quadratic(q)
    names = list(q.vars)
    gens = [MPoly.gen(names, i) for i in range(n)]
    lin = []
    for i in range(n):
        li = MPoly.zero(names)
        for k in range(n):
            g = G.entry(i, k)
            if g:
                li = li + gens[k] * g
        lin.append(li)

    cur = list(gens)        # x^(.1) coordinates as polynomials
    p = MPoly.zero(names)
    k = 2
    while True:
        diag = MPoly.zero(names)
        for i in range(n):
            if not cur[i].is_zero():
                diag = diag + cur[i] * lin[i]
        p = p + diag * Fraction(1, factorial(k))
        nxt = [MPoly.zero(names) for _ in range(n)]
        alive = False
        for i in range(n):
            ci = cur[i]
            if ci.is_zero():
                continue
            for j in range(n):
                vec = r.w_products[(min(i, j), max(i, j))]
                if not any(vec):
                    continue
                prod = ci * gens[j]
                for t, v in enumerate(vec):
                    if v:
                        nxt[t] = nxt[t] + prod * v
        for t in range(n):
            if not nxt[t].is_zero():
                alive = True
        if not alive:
            break
        cur = nxt
        k += 1
        if k > n + 2:
            raise NilPolyError("regeneration does not terminate")
    return NilPolynomial(p, provenance={"algebra": r.algebra,
                                        "pointing": r.pointing})


def hz_isomorphism_check(source: NilPolynomial, recon: ReconstructionResult) -> bool:
    """Verify that (x, s) -> phi(x) + psi(s) maps the reconstructed
    algebra isomorphically onto the provenance algebra of `source`."""
    prov = source.provenance
    if "algebra" not in prov or "pointing" not in prov:
        raise NilPolyError("source carries no provenance algebra")
    A = prov["algebra"]
    pointing = prov["pointing"]
    basis = pointing.adapted_basis
    B = recon.algebra
    n = B.dim
    images = list(basis[:-1]) + [pointing.ann_gen]
    if len(images) != n:
        return False
    for i in range(n):
        for j in range(i, n):
            prod = B.product_basis(i, j)
            lhs = zero_vec(A.dim)
            for k, v in prod.items():
                lhs = vec_add(lhs, vec_scale(v, images[k]))
            rhs = A.mul(images[i], images[j])
            if tuple(lhs) != tuple(rhs):
                return False
    return True


# ---------------------------------------------------------------------------
# parametric families

@dataclass
class FamilyInstance:
    nilpoly: NilPolynomial
    algebra: NilAlgebra
    pointing: Pointing
    grading: Grading
    reduced: Optional[bool] = None
    extras: dict = None


def family_degree3(c: MPoly, dual_prefix: str = "y") -> FamilyInstance:
    """Nil-polynomial q + c of degree <= 3: hyperbolic q pairing each
    variable of c with a fresh dual, c extended trivially.

    The instance ships its grading (weights 1 on W1, 2 on the duals,
    3 on the annihilator) and the reduced flag (radical of the cubic's
    trilinear form is zero)."""
    if not (c.is_zero() or c.is_homogeneous(3)):
        raise NilPolyError("family_degree3 needs a cubic form")
    m = len(c.vars)
    names = list(c.vars) + ["%s%d" % (dual_prefix, i + 1) for i in range(m)]
    q = MPoly.zero(names)
    for i in range(m):
        q = q + MPoly.gen(names, i) * MPoly.gen(names, m + i)
    c_ext = MPoly(names, {mono + (0,) * m: v for mono, v in c.terms.items()})
    p = q + c_ext
    recon = reconstruct_algebra(q, c_ext)
    if not recon.accepted:
        raise NilPolyError("degree-3 family reconstruction rejected: %s"
                           % recon.reason)
    P = NilPolynomial(p, provenance={"algebra": recon.algebra,
                                     "pointing": recon.pointing})
    A = recon.algebra
    eye = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(A.dim))
           for i in range(A.dim)]
    weights = [1] * m + [2] * m + [3]
    grading = Grading(A, eye, weights)
    grading.verify()
    # radical of the trilinear form of c on W1
    cols = []
    for i in range(m):
        col = {}
        for j in range(m):
            for k in range(j, m):
                v = symmetric_form_value(c, (i, j, k))
                if v:
                    col[(j, k)] = v
        cols.append(col)
    _, kern = sparse_kernel(cols)
    return FamilyInstance(nilpoly=P, algebra=A, pointing=recon.pointing,
                          grading=grading, reduced=(len(kern) == 0),
                          extras={"radical_dim": len(kern)})


def e6_family(t) -> FamilyInstance:
    """The elliptic-singularity flavored cubic family
    t(x1^3+x2^3+x3^3) - 18 x1 x2 x3 with hyperbolic pairing x_i x_(i+3)."""
    t = rat(t)
    names = ["x1", "x2", "x3"]
    x1, x2, x3 = (MPoly.gen(names, i) for i in range(3))
    c = (x1 ** 3 + x2 ** 3 + x3 ** 3) * t - x1 * x2 * x3 * 18
    inst = family_degree3(c, dual_prefix="d")
    # rename duals to x4, x5, x6
    names = ["x1", "x2", "x3", "x4", "x5", "x6"]
    poly = MPoly(names, inst.nilpoly.poly.terms)
    inst.nilpoly = NilPolynomial(poly, inst.nilpoly.provenance)
    inst.extras = dict(inst.extras or {}, t=t)
    return inst


def e6_to_yh_witness(t):
    """Explicit diagonal witness mapping the t-member of the family to the
    unit-cubic member with mixed coefficient s = -18/t (t nonzero)."""
    t = rat(t)
    if not t:
        raise NilPolyError("witness requires t nonzero")
    s = Fraction(-18) / t
    names = ["x1", "x2", "x3", "x4", "x5", "x6"]
    g = [MPoly.gen(names, i) for i in range(6)]
    target = (g[0] ** 3 + g[1] ** 3 + g[2] ** 3 + g[0] * g[1] * g[2] * s
              + g[0] * g[3] + g[1] * g[4] + g[2] * g[5])
    alpha = Matrix.diagonal([1, 1, 1, 1 / t, 1 / t, 1 / t])
    eps = 1 / t
    return NilPolynomial(target), EquivalenceWitness(alpha=alpha, epsilon=eps)


def family_degree4(t, eps) -> FamilyInstance:
    """Degree-4 family on 7 variables (x1, x2, y1, y2, y3, z1, z2).

    Builds the split quadratic with diagonal (1, 1, eps) on the y-block,
    the associated cubic, checks the Theta symmetry criterion, verifies
    the regenerated quartic against its closed form, and attaches the
    binary-quartic invariants of the quartic part."""
    t = rat(t)
    eps = rat(eps)
    if not eps:
        raise NilPolyError("eps must be nonzero")
    names = ["x1", "x2", "y1", "y2", "y3", "z1", "z2"]
    x1, x2, y1, y2, y3, z1, z2 = (MPoly.gen(names, i) for i in range(7))
    q = x1 * z1 + x2 * z2 + (y1 * y1) * Fraction(1, 2) \
        + (y2 * y2) * Fraction(1, 2) + (y3 * y3) * (eps / 2)
    c = (x1 * x1 + x2 * x2) * y1 * Fraction(1, 2) + x1 * x2 * y2 \
        + (x2 * x2) * y3 * (t / 2)

    # Theta symmetry: sum_k eps_k^-1 c_ijk c_rsk symmetric in (i, r)
    eps_diag = [Fraction(1), Fraction(1), eps]
    cc = {}
    for i in range(2):
        for j in range(2):
            for k in range(3):
                cc[(i, j, k)] = symmetric_form_value(c, (i, j, 2 + k))

    def theta(i, j, r, s_):
        return sum((cc[(i, j, k)] * cc[(r, s_, k)] / eps_diag[k]
                    for k in range(3)), Fraction(0))

    for i in range(2):
        for j in range(2):
            for r in range(2):
                for s_ in range(2):
                    if theta(i, j, r, s_) != theta(r, j, i, s_):
                        raise NilPolyError("Theta symmetry criterion failed; "
                                           "family construction is broken")

    P = regenerate_from_2_3(q, c)
    quartic = P.part(4)
    d_expected = (x1 ** 4) * Fraction(1, 24) \
        + (x1 * x1 * x2 * x2) * Fraction(1, 4) \
        + (x2 ** 4) * ((1 + t * t / eps) / 24)
    if quartic != d_expected:
        raise NilPolyError("regenerated quartic differs from the closed form")
    if P.poly != q + c + d_expected:
        raise NilPolyError("regenerated polynomial has unexpected support")

    A = P.provenance["algebra"]
    eye = [tuple(Fraction(1) if j == i else Fraction(0) for j in range(A.dim))
           for i in range(A.dim)]
    weights = [1, 1, 2, 2, 2, 3, 3, 4]
    grading = Grading(A, eye, weights)
    grading.verify()
    g2, g3, phi = binary_quartic_invariants(quartic)
    return FamilyInstance(nilpoly=P, algebra=A,
                          pointing=P.provenance["pointing"], grading=grading,
                          extras={"t": t, "eps": eps, "quartic": quartic,
                                  "g2": g2, "g3": g3, "phi": phi})


def binary_quartic_invariants(d: MPoly):
    """Classical invariants of a binary quartic a0 x^4 + 4 a1 x^3 y +
    6 a2 x^2 y^2 + 4 a3 x y^3 + a4 y^4:

        g2 = a0 a4 - 4 a1 a3 + 3 a2^2,
        g3 = det [[a0, a1, a2], [a1, a2, a3], [a2, a3, a4]],

    and phi = g2^3 / g3^2 when g3 is nonzero (None otherwise)."""
    if d.is_zero() or not d.is_homogeneous(4):
        raise NilPolyError("binary quartic must be homogeneous of degree 4")
    used = d.used_variables()
    if len(used) > 2:
        raise NilPolyError("more than two essential variables")
    n = len(d.vars)
    iu = used[0]
    if len(used) == 2:
        iv = used[1]
    else:
        iv = next((i for i in range(n) if i != iu), None)
    binom = [1, 4, 6, 4, 1]
    a = []
    for k in range(5):
        if iv is None and k > 0:
            a.append(Fraction(0))
            continue
        mono = [0] * n
        mono[iu] += 4 - k
        if k:
            mono[iv] += k
        a.append(d.coeff(tuple(mono)) / binom[k])
    a0, a1, a2, a3, a4 = a
    g2 = a0 * a4 - 4 * a1 * a3 + 3 * a2 * a2
    g3 = (a0 * (a2 * a4 - a3 * a3) - a1 * (a1 * a4 - a3 * a2)
          + a2 * (a1 * a3 - a2 * a2))
    phi = (g2 ** 3) / (g3 ** 2) if g3 else None
    return g2, g3, phi


# ---------------------------------------------------------------------------
# leading form invariants

@dataclass
class LeadingFormReport:
    leading_form: MPoly
    essential_variable_count: int
    binary_profile: Optional[tuple]   # canonical profile entries, or None

    def profile_key(self):
        return self.binary_profile


def _poly1_divmod(num, den):
    num = list(num)
    dn = len(den) - 1
    out = [Fraction(0)] * (len(num) - dn) if len(num) > dn else []
    while len(num) - 1 >= dn and any(num):
        if not num[0]:
            num.pop(0)
            continue
        k = len(num) - 1 - dn
        c = num[0] / den[0]
        out[len(out) - 1 - k] = c
        for i in range(dn + 1):
            num[i] -= c * den[i]
        num.pop(0)
    while num and not num[0]:
        num.pop(0)
    return out, num


def _poly1_gcd(a, b):
    a = [x for x in a]
    b = [x for x in b]
    while b and any(b):
        _, r = _poly1_divmod(a, b)
        a, b = b, r
    if a and a[0] != 1 and any(a):
        lead = a[0]
        a = [x / lead for x in a]
    return a


def _poly1_derivative(a):
    n = len(a) - 1
    return [c * (n - i) for i, c in enumerate(a[:-1])]


def _squarefree_decomposition(a):
    """Yun: list of (multiplicity, squarefree factor coefficients)."""
    out = []
    g = _poly1_gcd(a, _poly1_derivative(a))
    if len(g) <= 1:
        return [(1, a)]
    w, _ = _poly1_divmod(a, g)
    y, _ = _poly1_divmod(_poly1_derivative(a), g)
    i = 1
    z = [c1 - c2 for c1, c2 in _pad(y, _poly1_derivative(w))]
    while len(w) > 1:
        f = _poly1_gcd(w, z)
        if len(f) > 1:
            out.append((i, f))
        w, _ = _poly1_divmod(w, f)
        y, _ = _poly1_divmod(z, f)
        z = [c1 - c2 for c1, c2 in _pad(y, _poly1_derivative(w))]
        i += 1
    return out


def _pad(a, b):
    la, lb = len(a), len(b)
    n = max(la, lb)
    a = [Fraction(0)] * (n - la) + list(a)
    b = [Fraction(0)] * (n - lb) + list(b)
    return zip(a, b)


def _rational_roots(a):
    """All rational roots of a squarefree coefficient list (descending
    powers); returns (roots, residual coefficients after deflation)."""
    from math import gcd as _g
    from .exactlin import _divisors

    coeffs = [rat(c) for c in a]
    roots = []
    while len(coeffs) > 1 and coeffs[-1] == 0:
        roots.append(Fraction(0))
        coeffs.pop()
    while len(coeffs) > 1:
        den = 1
        for c in coeffs:
            den = den * c.denominator // _g(den, c.denominator)
        ints = [int(c * den) for c in coeffs]
        found = None
        for p in _divisors(ints[-1]):
            for qd in _divisors(ints[0]):
                for cand in (Fraction(p, qd), Fraction(-p, qd)):
                    acc = Fraction(0)
                    for c in ints:
                        acc = acc * cand + c
                    if acc == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        roots.append(found)
        out = []
        acc = Fraction(0)
        for c in coeffs[:-1]:
            acc = acc * found + c
            out.append(acc)
        coeffs = out
    return roots, coeffs


def factor_binary_form(g: MPoly, u: int, v: int) -> tuple:
    """Squarefree profile of a binary form in variables u, v.

    Entries: ("linear", multiplicity) per rational linear factor and the
    factor at infinity, ("quadratic", multiplicity, disc_sign) for
    irreducible quadratics, ("irreducible", degree, multiplicity) for
    anything of higher degree without rational roots."""
    d = g.degree()
    coeffs = []
    n = len(g.vars)
    for k in range(d + 1):
        mono = [0] * n
        mono[u] += d - k
        mono[v] += k
        coeffs.append(g.coeff(tuple(mono)))
    # multiplicity of the factor "v" = vanishing of top coefficients
    entries = []
    lead_zeros = 0
    while coeffs and not coeffs[0]:
        coeffs.pop(0)
        lead_zeros += 1
    if lead_zeros:
        entries.append(("linear", lead_zeros))
    # now factor the univariate polynomial in u/v
    for mult, sq in _squarefree_decomposition(coeffs):
        if len(sq) <= 1:
            continue
        roots, residual = _rational_roots(sq)
        for _ in roots:
            entries.append(("linear", mult))
        rdeg = len(residual) - 1
        if rdeg == 2:
            disc = residual[1] ** 2 - 4 * residual[0] * residual[2]
            sign = 1 if disc > 0 else (-1 if disc < 0 else 0)
            entries.append(("quadratic", mult, sign))
        elif rdeg > 0:
            entries.append(("irreducible", rdeg, mult))
    return tuple(sorted(entries, key=lambda e: (e[0], e[1:]), reverse=True))


def leading_form_analysis(P: NilPolynomial) -> LeadingFormReport:
    """Radical of the polarized top form, essential variable count, and
    (for at most two essential variables) the basis-independent binary
    factor profile."""
    if P.degree < 2:
        raise NilPolyError("leading form analysis needs degree >= 2")
    lead = P.part(P.degree)
    n = len(P.vars)
    cols = [dict(lead.derivative(i).terms) for i in range(n)]
    _, kern = sparse_kernel(cols)
    radical_dim = len(kern)
    essential = n - radical_dim
    profile = None
    if 1 <= essential <= 2:
        # complement directions for the radical
        from .algebra import Subspace
        rad = Subspace(n, kern)
        comp = []
        for i in range(n):
            e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
            trial = Subspace(n, list(rad.basis) + comp + [e])
            if trial.dim > rad.dim + len(comp):
                comp.append(e)
            if len(comp) == essential:
                break
        names = ["s", "t"]
        images = []
        for i in range(n):
            terms = {}
            for k, cvec in enumerate(comp):
                if cvec[i]:
                    mono = tuple(1 if j == k else 0 for j in range(2))
                    terms[mono] = cvec[i]
            images.append(MPoly(names, terms))
        binary = lead.substitute(images)
        profile = factor_binary_form(binary, 0, 1)
    return LeadingFormReport(leading_form=lead,
                             essential_variable_count=essential,
                             binary_profile=profile)


# ---------------------------------------------------------------------------
# equivalence witnesses

@dataclass(frozen=True)
class EquivalenceWitness:
    alpha: Matrix
    epsilon: Fraction

    def __post_init__(self):
        if not self.alpha.is_square:
            raise NilPolyError("witness matrix must be square")
        if not rat(self.epsilon):
            raise NilPolyError("witness scale must be nonzero")


def equivalence_witness_check(p: NilPolynomial, p_tilde: NilPolynomial,
                              w: EquivalenceWitness) -> bool:
    """Exact check of  p_tilde(x) = epsilon * p(alpha^{-1} x)."""
    if len(p.vars) != len(p_tilde.vars):
        raise NilPolyError("variable counts differ")
    try:
        inv = w.alpha.inverse()
    except ValueError:
        raise NilPolyError("witness matrix is singular")
    transformed = p.poly.substitute_linear(inv).scale(rat(w.epsilon))
    return transformed.terms == p_tilde.poly.terms


# ---------------------------------------------------------------------------
# smash products on the polynomial side

def smash_nil_polynomial(pa: Pointing, pb: Pointing):
    """Nil-polynomial of the smash product in its canonical basis; equals
    the direct sum of the factors' nil-polynomials after the canonical
    variable split."""
    N, pointing = smash_product(pa, pb)
    return nil_polynomial(N, pointing), N, pointing


# ---------------------------------------------------------------------------
# JSON interchange

def nilpoly_to_json(P: NilPolynomial) -> dict:
    return {"vars": list(P.vars), "poly": str(P.poly)}


def nilpoly_from_json(data: dict) -> NilPolynomial:
    poly = parse(data["poly"], data["vars"])
    return NilPolynomial(poly)


def load_nilpoly(path) -> NilPolynomial:
    with open(path, "r", encoding="utf-8") as fh:
        return nilpoly_from_json(json.load(fh))


def save_nilpoly(P: NilPolynomial, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(nilpoly_to_json(P), fh, indent=2, sort_keys=True)
        fh.write("\n")
