"""Milnor algebras of polynomial germs by truncated-ring elimination.

For a germ F with zero constant and linear part, the maximal ideal of
R/J(F) (R the local ring at the origin, J(F) the ideal of the first
partials) is computed inside the truncation m/m^(D+1): the span of all
truncated monomial multiples of the partials is echelonized, and D is
accepted once every monomial of degree exactly D lies in that span.
Nakayama's lemma then gives m^D inside J(F), so units of the local ring
act invertibly on the quotient and the polynomial-ring truncation is
already the Milnor algebra.

Pivoting uses the local order (degree ascending, lexicographically
larger first inside a degree), so low monomials are eliminated first and
the surviving quotient representatives match the usual standard-basis
style bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import NilAlgebra
from .exactlin import _IntEchelon, _int_row_from_qq
from .mpoly import MPoly

__all__ = ["MilnorResult", "MilnorError", "milnor_algebra"]


class MilnorError(ValueError):
    pass


def _local_key(mono: tuple):
    """Elimination order: degree ascending, lex-descending ties."""
    return (sum(mono), tuple(-e for e in mono))


def _monomials_up_to(nvars: int, D: int) -> list:
    out = []
    for d in range(1, D + 1):
        out.extend(_gen_degree(nvars, d))
    return sorted(out, key=_local_key)


def _gen_degree(nvars: int, d: int):
    if nvars == 1:
        yield (d,)
        return
    for e in range(d + 1):
        for rest in _gen_degree(nvars - 1, d - e):
            yield (e,) + rest


@dataclass
class MilnorResult:
    algebra: NilAlgebra
    monomial_basis: list          # exponent tuples, in basis order
    monomial_labels: list         # printed monomials, same order
    truncation_degree: int
    residue_of_F: tuple           # coordinates in the quotient basis
    F_in_jacobi: bool
    germ: MPoly


class _TruncatedQuotient:
    """Echelonized image of J(F) inside m/m^(D+1) plus normal forms."""

    def __init__(self, F: MPoly, D: int):
        self.F = F
        self.D = D
        self.nvars = len(F.vars)
        self.monomials = _monomials_up_to(self.nvars, D)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.ech = _IntEchelon()
        partials = [F.derivative(i) for i in range(self.nvars)]
        for g in partials:
            if g.is_zero():
                continue
            mindeg = g.min_degree()
            for mult in self._multipliers(D - mindeg):
                row = {}
                for mono, c in g.terms.items():
                    m = tuple(a + b for a, b in zip(mono, mult))
                    if sum(m) <= D:
                        row[self.index[m]] = row.get(self.index[m], Fraction(0)) + c
                self.ech.insert(_int_row_from_qq(row.items()))
        self._reduced = False

    def _multipliers(self, max_deg: int):
        yield (0,) * self.nvars
        for d in range(1, max_deg + 1):
            yield from _gen_degree(self.nvars, d)

    def certified(self) -> bool:
        """All monomials of degree exactly D are pivot columns."""
        for m in self.monomials:
            if sum(m) == self.D and self.index[m] not in self.ech.pivots:
                return False
        return True

    def quotient_monomials(self) -> list:
        return [m for m in self.monomials if self.index[m] not in self.ech.pivots]

    def normal_form(self, poly: MPoly) -> dict:
        """Coordinates of the residue class over the quotient monomials.

        After back-reduction every pivot row's tail touches only
        non-pivot columns, so one ascending pass over the pivot entries
        of the input is a complete reduction."""
        if not self._reduced:
            self.ech.back_reduce()
            self._reduced = True
        residual = {}
        for mono, c in poly.terms.items():
            d = sum(mono)
            if d == 0:
                raise MilnorError("normal form of a non-ideal constant")
            if d <= self.D:
                i = self.index[mono]
                v = residual.get(i, Fraction(0)) + c
                if v:
                    residual[i] = v
                else:
                    residual.pop(i, None)
        for lead in sorted(residual):
            piv = self.ech.pivots.get(lead)
            if piv is None or not residual.get(lead):
                continue
            factor = residual[lead] / piv[0][1]
            for i, c in piv:
                v = residual.get(i, Fraction(0)) - factor * c
                if v:
                    residual[i] = v
                else:
                    residual.pop(i, None)
        return residual


def milnor_algebra(F: MPoly, trunc_max: int = 30,
                   start_degree: Optional[int] = None) -> MilnorResult:
    """Maximal ideal of the Milnor algebra of F as a NilAlgebra.

    F must have zero constant and linear terms and use every variable of
    its context.  Raises MilnorError when no truncation degree up to
    trunc_max certifies (the Milnor number is not finite up to the bound).
    """
    if F.is_zero():
        raise MilnorError("zero germ")
    if F.constant_term():
        raise MilnorError("germ has a constant term")
    if F.min_degree() < 2:
        raise MilnorError("germ has linear terms")
    used = F.used_variables()
    if len(used) != len(F.vars):
        missing = [F.vars[i] for i in range(len(F.vars)) if i not in used]
        raise MilnorError("unused variables in germ context: %s"
                          % ", ".join(missing))

    D = start_degree if start_degree is not None else 2 * F.degree()
    quotient = None
    while D <= trunc_max:
        q = _TruncatedQuotient(F, D)
        if q.certified():
            quotient = q
            break
        D += 1
    if quotient is None:
        raise MilnorError("Milnor number not finite up to truncation bound %d"
                          % trunc_max)

    basis = quotient.quotient_monomials()
    n = len(basis)
    pos = {m: i for i, m in enumerate(basis)}
    zero_poly = MPoly.zero(F.vars)
    labels = [zero_poly._monomial_str(m) for m in basis]

    products = {}
    for i in range(n):
        for j in range(i, n):
            m = tuple(a + b for a, b in zip(basis[i], basis[j]))
            if sum(m) > D:
                continue  # certified: lies in J(F)
            nf = quotient.normal_form(MPoly(F.vars, {m: Fraction(1)}))
            vec = {}
            for col, v in nf.items():
                mono = quotient.monomials[col]
                vec[pos[mono]] = v
            if vec:
                products[(i, j)] = vec
    algebra = NilAlgebra(n, products, labels)

    nf_F = quotient.normal_form(F)
    residue = [Fraction(0)] * n
    for col, v in nf_F.items():
        residue[pos[quotient.monomials[col]]] = v
    return MilnorResult(algebra=algebra,
                        monomial_basis=basis,
                        monomial_labels=labels,
                        truncation_degree=D,
                        residue_of_F=tuple(residue),
                        F_in_jacobi=not any(residue),
                        germ=F)
