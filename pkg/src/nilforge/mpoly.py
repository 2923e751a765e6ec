"""Sparse multivariate polynomials over the rationals.

Terms are stored as {exponent tuple: Fraction}; zero coefficients are
never kept.  Monomials compare in graded lexicographic order (total
degree first, then the exponent tuple), and canonical printing lists
terms in descending graded-lex order, so printing then parsing is the
identity.

Grammar (whitespace ignored):

    poly  := ['-'] term (('+'|'-') term)*
    term  := coeff ['*' monom] | monom
    coeff := int | int '/' int
    monom := var ['^' nat] ('*' var ['^' nat])*
    var   := letter (letter | digit | '_')*
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Optional, Sequence

from .exactlin import Matrix, QQ, rat

__all__ = ["MPoly", "MPolyParseError", "parse", "polarize",
           "symmetric_form_value", "grlex_key"]

NEG_INF = float("-inf")


def grlex_key(mono: tuple):
    """Sort key for graded lexicographic order (ascending)."""
    return (sum(mono), mono)


class MPolyParseError(ValueError):
    """Syntax error in the polynomial grammar, with offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


class MPoly:
    """Immutable sparse polynomial over QQ in named variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, var_names: Sequence[str], terms: dict):
        self.vars = tuple(var_names)
        n = len(self.vars)
        clean = {}
        for mono, c in terms.items():
            if len(mono) != n:
                raise ValueError("exponent tuple %r has wrong length" % (mono,))
            c = rat(c)
            if c:
                clean[tuple(mono)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, var_names: Sequence[str]) -> "MPoly":
        return cls(var_names, {})

    @classmethod
    def constant(cls, value, var_names: Sequence[str]) -> "MPoly":
        value = rat(value)
        n = len(var_names)
        return cls(var_names, {(0,) * n: value} if value else {})

    @classmethod
    def gen(cls, var_names: Sequence[str], i: int) -> "MPoly":
        n = len(var_names)
        mono = tuple(1 if j == i else 0 for j in range(n))
        return cls(var_names, {mono: Fraction(1)})

    @classmethod
    def variable(cls, name: str, var_names: Sequence[str]) -> "MPoly":
        return cls.gen(var_names, list(var_names).index(name))

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """Total degree; -inf for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(sum(m) for m in self.terms)

    def min_degree(self):
        if not self.terms:
            return NEG_INF
        return min(sum(m) for m in self.terms)

    def is_homogeneous(self, k: Optional[int] = None) -> bool:
        degs = {sum(m) for m in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return k is None or degs == {k}

    def coeff(self, mono: tuple) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def used_variables(self) -> tuple:
        used = [False] * len(self.vars)
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(i for i, u in enumerate(used) if u)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.vars == self.vars:
                return other
            if not other.terms:
                return MPoly.zero(self.vars)
            if other.is_constant():
                return MPoly.constant(other.constant_term(), self.vars)
            if not self.terms or self.is_constant():
                raise _ContextSwap(other)
            raise ValueError("variable context mismatch: %r vs %r"
                             % (self.vars, other.vars))
        return MPoly.constant(other, self.vars)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except _ContextSwap as swap:
            return swap.poly + self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, Fraction(0)) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except _ContextSwap as swap:
            return -(swap.poly - self)
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except _ContextSwap as swap:
            return swap.poly * self
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m)
                if v is None:
                    out[m] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def scale(self, c) -> "MPoly":
        c = rat(c)
        if not c:
            return MPoly.zero(self.vars)
        return MPoly(self.vars, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, e: int) -> "MPoly":
        if not isinstance(e, int) or e < 0:
            raise ValueError("nonnegative integer power expected")
        result = MPoly.constant(1, self.vars)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, MPoly) and self.vars == other.vars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    # -- calculus ----------------------------------------------------------

    def derivative(self, i: int) -> "MPoly":
        if not 0 <= i < len(self.vars):
            raise IndexError("variable index %d out of range" % i)
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                m2 = m[:i] + (e - 1,) + m[i + 1:]
                out[m2] = out.get(m2, Fraction(0)) + c * e
        return MPoly(self.vars, out)

    def homogeneous_part(self, k: int) -> "MPoly":
        return MPoly(self.vars,
                     {m: c for m, c in self.terms.items() if sum(m) == k})

    def truncate_above(self, D: int) -> "MPoly":
        """Drop all terms of total degree > D."""
        return MPoly(self.vars,
                     {m: c for m, c in self.terms.items() if sum(m) <= D})

    def truncate_below(self, j: int) -> "MPoly":
        """Drop all terms of total degree < j."""
        return MPoly(self.vars,
                     {m: c for m, c in self.terms.items() if sum(m) >= j})

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != len(self.vars):
            raise ValueError("evaluation point length mismatch")
        pt = [rat(x) for x in point]
        acc = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for x, e in zip(pt, m):
                if e:
                    v *= x ** e
            acc += v
        return acc

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Substitute images[i] for the i-th variable."""
        if len(images) != len(self.vars):
            raise ValueError("one image per variable required")
        if not images:
            return self
        target_vars = images[0].vars
        caches = [{0: MPoly.constant(1, target_vars)} for _ in images]

        def power(i, e):
            cache = caches[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * images[i]
            return cache[e]

        acc = MPoly.zero(target_vars)
        for m, c in self.terms.items():
            term = MPoly.constant(c, target_vars)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        return acc

    def substitute_linear(self, M: Matrix) -> "MPoly":
        """p(M x), exact; M must be square of size len(vars)."""
        n = len(self.vars)
        if M.ncols != n:
            raise ValueError("matrix column count must equal variable count")
        if M.nrows != n:
            raise ValueError("matrix must be square for substitute_linear")
        images = []
        for i in range(n):
            row = M.rows[i]
            images.append(MPoly(self.vars, {
                tuple(1 if j == k else 0 for k in range(n)): v
                for j, v in row.items()}))
        return self.substitute(images)

    def compose_affine(self, M: Matrix, shift: Sequence) -> "MPoly":
        """p(M x + shift)."""
        n = len(self.vars)
        if M.ncols != n or M.nrows != n or len(shift) != n:
            raise ValueError("affine data shape mismatch")
        images = []
        for i in range(n):
            terms = {tuple(1 if j == k else 0 for k in range(n)): v
                     for j, v in M.rows[i].items()}
            s = rat(shift[i])
            if s:
                terms[(0,) * n] = s
            images.append(MPoly(self.vars, terms))
        return self.substitute(images)

    # -- printing / parsing ------------------------------------------------

    def _monomial_str(self, mono: tuple) -> str:
        parts = []
        for name, e in zip(self.vars, mono):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append("%s^%d" % (name, e))
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(),
                       key=lambda t: grlex_key(t[0]), reverse=True)
        chunks = []
        for idx, (mono, c) in enumerate(items):
            mono_s = self._monomial_str(mono)
            mag = abs(c)
            if not mono_s:
                body = str(mag)
            elif mag == 1:
                body = mono_s
            else:
                body = "%s*%s" % (mag, mono_s)
            if idx == 0:
                chunks.append(body if c > 0 else "-" + body)
            else:
                chunks.append((" + " if c > 0 else " - ") + body)
        return "".join(chunks)

    def __repr__(self):
        return "MPoly(%r)" % (str(self),)


class _ContextSwap(Exception):
    def __init__(self, poly):
        self.poly = poly


# ---------------------------------------------------------------------------
# parsing

class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise MPolyParseError("integer expected", start)
        return int(self.text[start:self.pos])

    def take_name(self) -> str:
        self.skip_ws()
        start = self.pos
        ch = self.peek()
        if not (ch.isalpha()):
            raise MPolyParseError("variable name expected", self.pos)
        while self.pos < len(self.text) and (
                self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]

    def expect(self, ch: str):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise MPolyParseError("expected %r" % ch, self.pos)
        self.pos += 1


def parse(text: str, var_names: Optional[Sequence[str]] = None) -> MPoly:
    """Parse the grammar above; with var_names fixed, unknown variables
    are rejected, otherwise variables are numbered by first appearance."""
    toks = _Tokens(text)
    fixed = var_names is not None
    names = list(var_names) if fixed else []
    raw_terms = []  # (coeff, {name: exp})

    def parse_var_power(powers):
        pos = toks.pos
        name = toks.take_name()
        if fixed and name not in names:
            raise MPolyParseError("unknown variable %r" % name, pos)
        if not fixed and name not in names:
            names.append(name)
        e = 1
        if toks.peek() == "^":
            toks.expect("^")
            e = toks.take_int()
        powers[name] = powers.get(name, 0) + e

    def parse_term(sign: int):
        ch = toks.peek()
        coeff = Fraction(sign)
        powers = {}
        if ch.isdigit():
            num = toks.take_int()
            if toks.peek() == "/":
                toks.expect("/")
                den = toks.take_int()
                if den == 0:
                    raise MPolyParseError("zero denominator", toks.pos)
                coeff *= Fraction(num, den)
            else:
                coeff *= num
            if toks.peek() == "*":
                toks.expect("*")
                parse_var_power(powers)
        elif ch.isalpha():
            parse_var_power(powers)
        else:
            raise MPolyParseError("term expected", toks.pos)
        while toks.peek() == "*":
            toks.expect("*")
            parse_var_power(powers)
        raw_terms.append((coeff, powers))

    sign = 1
    if toks.peek() == "-":
        toks.expect("-")
        sign = -1
    parse_term(sign)
    while True:
        ch = toks.peek()
        if ch == "":
            break
        if ch == "+":
            toks.expect("+")
            parse_term(1)
        elif ch == "-":
            toks.expect("-")
            parse_term(-1)
        else:
            raise MPolyParseError("unexpected input", toks.pos)

    terms = {}
    n = len(names)
    for coeff, powers in raw_terms:
        mono = tuple(powers.get(name, 0) for name in names)
        v = terms.get(mono, Fraction(0)) + coeff
        if v:
            terms[mono] = v
        else:
            terms.pop(mono, None)
    return MPoly(names, terms)


# ---------------------------------------------------------------------------
# polarization

def polarize(p_k: MPoly, vectors: Sequence[Sequence]) -> Fraction:
    """Symmetric k-linear form of a homogeneous degree-k polynomial.

    Computed by inclusion-exclusion over argument subsets:
        w_k(v_1,...,v_k) = sum_S (-1)^(k-|S|) p_k(sum_{i in S} v_i),
    so that w_k(x,...,x) = k! * p_k(x).
    """
    k = len(vectors)
    if p_k.is_zero():
        return Fraction(0)
    if not p_k.is_homogeneous(k):
        raise ValueError("polarize needs a homogeneous polynomial of degree %d" % k)
    n = len(p_k.vars)
    vecs = [[rat(x) for x in v] for v in vectors]
    for v in vecs:
        if len(v) != n:
            raise ValueError("vector length mismatch")
    total = Fraction(0)
    for mask in range(1, 1 << k):
        point = [Fraction(0)] * n
        bits = 0
        for i in range(k):
            if mask >> i & 1:
                bits += 1
                vi = vecs[i]
                for j in range(n):
                    point[j] += vi[j]
        sign = -1 if (k - bits) % 2 else 1
        total += sign * p_k.evaluate(point)
    return total


def symmetric_form_value(p_k: MPoly, slots: Sequence[int]) -> Fraction:
    """w_k on basis vectors, read off the coefficients directly.

    slots lists variable indices (with repetition); equals
    polarize(p_k, unit vectors) but costs one dictionary lookup:
    for exponent vector a,  w_k(slots) = coeff(a) * prod(a_i!).
    """
    k = len(slots)
    n = len(p_k.vars)
    mono = [0] * n
    for s in slots:
        mono[s] += 1
    c = p_k.coeff(tuple(mono))
    if not c:
        return Fraction(0)
    for e in mono:
        if e > 1:
            c *= factorial(e)
    return c
