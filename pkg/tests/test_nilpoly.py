import random
from fractions import Fraction as F

import pytest

from nilforge.algebra import NilAlgebra, Pointing, smash_product
from nilforge.exactlin import Matrix, rref_solve
from nilforge.fixtures import fixture_nilpoly
from nilforge.mpoly import MPoly, parse
from nilforge.nilpoly import (EquivalenceWitness, NilPolyError, NilPolynomial,
                              binary_quartic_invariants, e6_family,
                              e6_to_yh_witness, equivalence_witness_check,
                              extended_nil_polynomial, family_degree3,
                              family_degree4, hz_isomorphism_check,
                              leading_form_analysis, nil_polynomial,
                              reconstruct_algebra, regenerate_from_2_3,
                              shift_pointing, smash_nil_polynomial)

NAMES2 = ["x1", "x2"]


def brute_force_associative(wprod, n):
    """Triple-check the W-product table directly (oracle for acceptance
    decisions of the reconstruction)."""
    def mul(u, v):
        out = [F(0)] * n
        for i in range(n):
            if not u[i]:
                continue
            for j in range(n):
                if not v[j]:
                    continue
                vec = wprod[(min(i, j), max(i, j))]
                for k in range(n):
                    out[k] += u[i] * v[j] * vec[k]
        return tuple(out)

    units = [tuple(F(1) if i == k else F(0) for i in range(n))
             for k in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ij = mul(units[i], units[j])
                jk = mul(units[j], units[k])
                if mul(ij, units[k]) != mul(units[i], jk):
                    return False, (i + 1, j + 1, k + 1)
    return True, None


def test_dim1_algebra_gives_zero_polynomial():
    one = NilAlgebra(1, {}, ["a"])
    P = nil_polynomial(one)
    assert P.poly.is_zero()
    assert P.degree == float("-inf")


def test_nil_index2_gives_quadratic_form():
    # W + QQ with a nondegenerate pairing: p equals the quadratic form
    A = NilAlgebra(3, {(0, 1): {2: F(1)}}, ["u", "v", "ann"])
    P = nil_polynomial(A)
    assert P.poly == parse("x1*x2", NAMES2)
    assert P.degree == 2 == A.nil_index


def test_extraction_invariants(milnor_cache, nilpoly_cache):
    for key in ("dim9", "dim8", "dim11", "e6_t1"):
        A = milnor_cache(key).algebra
        P = nilpoly_cache(key)
        assert P.degree == A.nil_index
        assert rref_solve(P.gram).rank == len(P.vars)
        assert P.part(0).is_zero() and P.part(1).is_zero()


def test_uv_fixture_matches_extraction_up_to_relabeling(nilpoly_cache):
    # the paper's basis (x, x^2, x^3, x^4, y, xy, y^2, y^3) is a permutation
    # of the extraction basis (x, y, x^2, xy, y^2, x^3, y^3, x^4)
    uv = fixture_nilpoly("uv")
    mine = nilpoly_cache("dim9")
    perm = [0, 2, 5, 7, 1, 3, 4, 6]  # uv slot i <- my variable perm[i]
    n = 8
    rows = [{} for _ in range(n)]
    for i, p in enumerate(perm):
        rows[p][i] = F(1)
    M = Matrix(n, n, rows)
    assert mine.poly.substitute_linear(M).terms == uv.poly.terms


def test_degenerate_quadratic_rejected():
    with pytest.raises(NilPolyError):
        NilPolynomial(parse("x1^2", NAMES2))


def test_reconstruct_roundtrip_dim8(nilpoly_cache):
    P = nilpoly_cache("dim8")
    res = reconstruct_algebra(P.quadratic, P.cubic)
    assert res.accepted
    assert res.algebra.verify().admissible
    assert hz_isomorphism_check(P, res)
    ok, _ = brute_force_associative(res.w_products, len(P.vars))
    assert ok


def test_reconstruct_zero_cubic():
    q = parse("x1*x2", NAMES2)
    res = reconstruct_algebra(q, MPoly.zero(NAMES2))
    assert res.accepted
    assert res.algebra.nil_index == 2


def test_reconstruct_rejects_random_perturbation(nilpoly_cache):
    rng = random.Random(71)
    P = nilpoly_cache("dim8")
    c = P.cubic
    names = list(P.vars)
    accepted_agree = 0
    for _ in range(4):
        mono = [0] * len(names)
        for _ in range(3):
            mono[rng.randrange(len(names))] += 1
        perturbed = c + MPoly(names, {tuple(mono): F(1)})
        res = reconstruct_algebra(P.quadratic, perturbed)
        ok, triple = brute_force_associative(
            _wprod_or_reconstructed(res, P.quadratic, perturbed),
            len(names))
        if res.accepted:
            assert ok
        else:
            assert res.reason
            if res.witness_triple is not None:
                assert not ok
        accepted_agree += 1
    assert accepted_agree == 4


def _wprod_or_reconstructed(res, q, c):
    if res.w_products is not None:
        return res.w_products
    from nilforge.nilpoly import _w_products
    return _w_products(q, c)[0]


def test_regenerate_uv_exact():
    uv = fixture_nilpoly("uv")
    reg = regenerate_from_2_3(uv.quadratic, uv.cubic)
    assert reg.poly == uv.poly
    for k in range(2, 6):
        assert reg.part(k) == uv.part(k)


def test_regenerate_sr_exact():
    sr = fixture_nilpoly("sr")
    reg = regenerate_from_2_3(sr.quadratic, sr.cubic)
    assert reg.poly == sr.poly


def test_regenerate_degree2():
    q = parse("x1*x2", NAMES2)
    reg = regenerate_from_2_3(q, MPoly.zero(NAMES2))
    assert reg.poly == q


def test_regenerate_matches_extraction(nilpoly_cache):
    for key in ("dim9", "dim8", "e6_t1"):
        P = nilpoly_cache(key)
        reg = regenerate_from_2_3(P.quadratic, P.cubic)
        assert reg.poly == P.poly


# -- pointings on the hypersurface ----------------------------------------------

def test_shift_pointing_identity_at_zero(milnor_cache):
    A = milnor_cache("dim9").algebra
    pointing = Pointing.default(A)
    rho = shift_pointing(pointing, tuple(F(0) for _ in range(A.dim)))
    assert rho.omega == pointing.omega


def test_shift_pointing_symbolic_duality(milnor_cache, cyclic3):
    rng = random.Random(29)
    fixtures = [cyclic3, milnor_cache("dim8").algebra,
                milnor_cache("dim9").algebra]
    for A in fixtures:
        pointing = Pointing.default(A)
        s = pointing.random_surface_point(rng, bound=2)
        rho = shift_pointing(pointing, s)
        f_pi = extended_nil_polynomial(A, pointing, adapted=False)
        f_rho = extended_nil_polynomial(A, rho, adapted=False)
        shifted = f_pi.compose_affine(Matrix.identity(A.dim), s)
        assert f_rho == shifted


def test_shift_composition_is_group_law(cyclic3):
    A = cyclic3
    pointing = Pointing.default(A)
    rng = random.Random(57)
    s1 = pointing.random_surface_point(rng, bound=2)
    rho = shift_pointing(pointing, s1)
    s2 = rho.random_surface_point(rng, bound=2)
    twice = shift_pointing(rho, s2)
    # group-law combination: exp(s1) exp(s2) = 1 + e1 + e2 + e1 e2
    e1, e2 = A.exp1(s1), A.exp1(s2)
    prod_minus_one = tuple(a + b + c for a, b, c in
                           zip(e1, e2, A.mul(e1, e2)))
    combined = A.log1(prod_minus_one)
    direct = shift_pointing(pointing, combined)
    assert twice.omega == direct.omega


def test_shift_rejects_off_surface_point(milnor_cache):
    A = milnor_cache("dim9").algebra
    pointing = Pointing.default(A)
    bad = tuple(F(1) if i == A.dim - 1 else F(0) for i in range(A.dim))
    with pytest.raises(NilPolyError):
        shift_pointing(pointing, bad)


# -- families ---------------------------------------------------------------------

def test_family_degree3_smash_power():
    fam = family_degree3(parse("x1^3 + x2^3 + x3^3", ["x1", "x2", "x3"]))
    assert fam.algebra.dim == 7
    assert fam.algebra.nil_index == 3
    assert fam.reduced


def test_family_degree3_zero_cubic_not_reduced():
    fam = family_degree3(MPoly.zero(["x1", "x2"]))
    assert not fam.reduced
    assert fam.nilpoly.degree == 2


def test_e6_family_accepted_for_various_t():
    for t in (F(0), F(1), F(-3), F(5, 2)):
        inst = e6_family(t)
        assert inst.algebra.nil_index <= 3
        assert inst.grading.verify()


def test_e6_to_yh_linear_equivalence():
    for t in (F(1), F(2), F(-3, 2)):
        inst = e6_family(t)
        target, witness = e6_to_yh_witness(t)
        assert equivalence_witness_check(inst.nilpoly, target, witness)


def test_family_degree4_quartic_closed_form():
    fam = family_degree4(F(1), F(1))
    d = fam.extras["quartic"]
    expected = parse("1/24*x1^4 + 1/4*x1^2*x2^2 + 1/12*x2^4",
                     list(fam.nilpoly.vars))
    assert d == expected


def test_family_degree4_phi_closed_form():
    for eps, t in ((F(1), F(1)), (F(1), F(2)), (F(-1), F(1))):
        fam = family_degree4(t, eps)
        phi = fam.extras["phi"]
        assert phi == eps ** 2 * t ** -4 * (4 + t ** 2 / eps) ** 3


def test_family_degree4_eps_minus1_is_27():
    fam = family_degree4(F(1), F(-1))
    assert fam.extras["phi"] == 27


# -- binary quartic invariants -----------------------------------------------------

def test_binary_quartic_diagonal():
    g2, g3, phi = binary_quartic_invariants(parse("x^4 + y^4", ["x", "y"]))
    assert g2 == 1 and g3 == 0 and phi is None


def test_binary_quartic_scaling_weights():
    d = parse("x^4 + x*y^3 + y^4", ["x", "y"])
    g2, g3, phi = binary_quartic_invariants(d)
    g2s, g3s, phis = binary_quartic_invariants(d.scale(3))
    assert g2s == 9 * g2 and g3s == 27 * g3
    assert phis == phi


# -- leading forms ------------------------------------------------------------------

def test_leading_profile_square_case():
    # x1^4 x2^2 embedded in 4 variables
    names = ["x1", "x2", "x3", "x4"]
    p = parse("x1^4*x2^2 + x1*x3 + x2*x4", names)
    rep = leading_form_analysis(NilPolynomial(p))
    assert rep.essential_variable_count == 2
    assert rep.binary_profile == (("linear", 4), ("linear", 2))


def test_leading_profile_irreducible_quadratic():
    names = ["x1", "x2", "x3", "x4"]
    p = parse("x1^4*x2^2", names)  # placeholder quadratic part below
    form = parse("19*x1^2 - 90*x1*x2 + 135*x2^2", names)
    lead = parse("x1^4", names) * form
    p = lead + parse("x1*x3 + x2*x4", names)
    rep = leading_form_analysis(NilPolynomial(p))
    assert rep.essential_variable_count == 2
    assert rep.binary_profile == (("quadratic", 1, -1), ("linear", 4))


def test_leading_quadratic_nondegenerate_case():
    P = NilPolynomial(parse("x1*x2", NAMES2))
    rep = leading_form_analysis(P)
    assert rep.essential_variable_count == 2


def test_dim20_pair_profiles_differ(milnor_cache, nilpoly_cache):
    pa = nilpoly_cache("dim20_a")
    pb = nilpoly_cache("dim20_b")
    ra = leading_form_analysis(pa)
    rb = leading_form_analysis(pb)
    assert ra.essential_variable_count == rb.essential_variable_count == 2
    assert ra.binary_profile == (("linear", 4), ("linear", 2))
    assert rb.binary_profile == (("quadratic", 1, -1), ("linear", 4))
    assert ra.binary_profile != rb.binary_profile  # not isomorphic


# -- equivalence witnesses ------------------------------------------------------------

def test_identity_witness(nilpoly_cache):
    P = nilpoly_cache("dim8")
    w = EquivalenceWitness(Matrix.identity(len(P.vars)), F(1))
    assert equivalence_witness_check(P, P, w)


def test_witness_construct_then_verify(nilpoly_cache):
    rng = random.Random(83)
    P = nilpoly_cache("dim8")
    n = len(P.vars)
    while True:
        rows = [[F(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        alpha = Matrix.from_rows(rows)
        if rref_solve(alpha).rank == n:
            break
    eps = F(rng.randint(1, 5), rng.randint(1, 3))
    transformed = NilPolynomial(P.poly.substitute_linear(alpha.inverse())
                                .scale(eps))
    w = EquivalenceWitness(alpha, eps)
    assert equivalence_witness_check(P, transformed, w)
    # corrupt one entry: verdict flips
    bad = NilPolynomial(transformed.poly + parse("x1*x2", list(P.vars)))
    assert not equivalence_witness_check(P, bad, w)


def test_leading_profile_invariant_under_witness(nilpoly_cache):
    rng = random.Random(97)
    P = nilpoly_cache("dim20_a")
    n = len(P.vars)
    rows = [[F(1) if i == j else F(0) for j in range(n)] for i in range(n)]
    # random unipotent change of variables keeps things exact and invertible
    for _ in range(6):
        i, j = rng.randrange(n), rng.randrange(n)
        if i < j:
            rows[i][j] = F(rng.randint(-2, 2))
    alpha = Matrix.from_rows(rows)
    eps = F(3, 2)
    Q = NilPolynomial(P.poly.substitute_linear(alpha.inverse()).scale(eps))
    assert equivalence_witness_check(P, Q, EquivalenceWitness(alpha, eps))
    ra = leading_form_analysis(P)
    rq = leading_form_analysis(Q)
    assert ra.essential_variable_count == rq.essential_variable_count
    assert ra.binary_profile == rq.binary_profile


# -- smash products on the polynomial level --------------------------------------------

def test_smash_polynomial_is_direct_sum(cyclic3_pointed, milnor_cache):
    cyc, pc = cyclic3_pointed
    B = milnor_cache("e6_t1").algebra
    pb = Pointing.default(B)
    P, N, pointing = smash_nil_polynomial(pc, pb)
    pa = nil_polynomial(cyc)
    pbb = nil_polynomial(B)
    na = len(pa.vars)
    nb = len(pbb.vars)
    names = list(P.vars)
    # embed the factors into the smash variable split and compare exactly
    left = MPoly(names, {m + (0,) * nb: c for m, c in pa.poly.terms.items()})
    right = MPoly(names, {(0,) * na + m: c for m, c in pbb.poly.terms.items()})
    assert P.poly == left + right
