from fractions import Fraction as F

import pytest

from nilforge.fixtures import GERMS, germ_poly
from nilforge.milnor import MilnorError, _TruncatedQuotient, milnor_algebra
from nilforge.mpoly import MPoly, parse


def test_dim9_basis_and_residue(milnor_cache):
    res = milnor_cache("dim9")
    A = res.algebra
    assert A.dim == 9 and A.nil_index == 5
    expected = {"X", "Y", "X^2", "X*Y", "Y^2", "X^3", "Y^3", "X^4", "X^5"}
    assert set(res.monomial_labels) == expected
    # annihilator spanned by the class of X^5 (the last basis monomial)
    gen = A.annihilator.basis[0]
    assert gen == tuple(F(1) if lab == "X^5" else F(0)
                        for lab in res.monomial_labels)
    # residue of the germ is -X^5/4; in particular F is not in J(F)
    idx = res.monomial_labels.index("X^5")
    assert res.residue_of_F[idx] == F(-1, 4)
    assert sum(1 for c in res.residue_of_F if c) == 1
    assert not res.F_in_jacobi


def test_dim8_hilbert(milnor_cache):
    res = milnor_cache("dim8")
    assert res.algebra.dim == 8
    assert res.algebra.nil_index == 4
    assert res.algebra.hilbert_function == (1, 3, 3, 1, 1)
    assert set(res.monomial_labels) == {
        "X", "Y", "Z", "X^2", "X^3", "Y*Z", "Z^2", "X^4"}


def test_dim23_table_entry(milnor_cache):
    res = milnor_cache("dim23")
    assert res.algebra.dim == 23
    assert res.algebra.nil_index == 5
    assert res.algebra.hilbert_function == (1, 4, 7, 7, 4, 1)
    assert res.algebra.is_admissible


def test_all_results_verify(milnor_cache):
    for key in ("dim9", "dim8", "dim11", "e6_t1"):
        rep = milnor_cache(key).algebra.verify()
        assert rep.associative and rep.nilpotent and rep.admissible


def test_certification_soundness(milnor_cache):
    # every monomial of degree exactly D reduces to zero in the quotient
    res = milnor_cache("dim8")
    q = _TruncatedQuotient(res.germ, res.truncation_degree)
    assert q.certified()
    from nilforge.milnor import _gen_degree
    for mono in _gen_degree(len(res.germ.vars), res.truncation_degree):
        nf = q.normal_form(MPoly(res.germ.vars, {mono: F(1)}))
        assert not nf


def test_truncation_stability(milnor_cache):
    for key in ("dim9", "dim8", "dim11"):
        base = milnor_cache(key)
        again = milnor_algebra(base.germ,
                               start_degree=base.truncation_degree + 2)
        assert again.algebra.dim == base.algebra.dim
        assert again.algebra.nil_index == base.algebra.nil_index
        assert again.algebra.hilbert_function == base.algebra.hilbert_function
        assert again.algebra._prod == base.algebra._prod


def test_quasihomogeneous_germ_in_jacobi(milnor_cache):
    # quasi-homogeneous germ: F lies in its Jacobi ideal (Euler relation)
    res = milnor_cache("e6_t1")
    assert res.F_in_jacobi
    assert not any(res.residue_of_F)


def test_rejects_bad_germs():
    with pytest.raises(MilnorError):
        milnor_algebra(parse("1 + X^2", ["X"]))
    with pytest.raises(MilnorError):
        milnor_algebra(parse("X + X^2", ["X"]))
    with pytest.raises(MilnorError):
        milnor_algebra(parse("X^2", ["X", "Y"]))   # unused variable
    with pytest.raises(MilnorError):
        # not an isolated singularity: X^2*Y^2 has non-finite quotient
        milnor_algebra(parse("X^2*Y^2", ["X", "Y"]), trunc_max=10)
