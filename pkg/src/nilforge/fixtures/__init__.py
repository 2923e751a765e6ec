"""Shipped fixture corpus: the worked polynomials and germ table.

The two big transcribed nil-polynomials (dim 9 and dim 23) and the
parametric instances live as JSON files next to this module; the germ
table drives the Milnor reconstruction of every algebra used in the
acceptance runs.
"""

from __future__ import annotations

import json
from importlib import resources

from ..mpoly import MPoly, parse
from ..nilpoly import NilPolynomial, nilpoly_from_json

# germ -> (dim, nil_index, hilbert or None)
GERMS = {
    "dim9": ("X^5 + X^2*Y^2 + Y^4", 9, 5, (1, 2, 3, 2, 1, 1)),
    "dim8": ("X^4 + X*Y^2 + Y^3 + X*Z^2", 8, 4, (1, 3, 3, 1, 1)),
    "dim11": ("X^4 + X^2*Y^3 + Y^5", 11, 5, None),
    "dim17": ("X^6 + X^2*Y^3 + Y^5", 17, 7, None),
    "dim15_nu8": ("X^7 + X^2*Y^3 + X^3*Y^2 + Y^4", 15, 8, None),
    "dim15_nu6": ("X^5 + X^2*Y^2 + Y^4 + X*Z^2", 15, 6, None),
    "dim23": ("X^3 + X^2*Y^2 + Y^4 + X*Z^2 + Z*U^2", 23, 5, (1, 4, 7, 7, 4, 1)),
    "dim20_a": ("Z^3 + Y^4 + X^3*Z + X^3*Y^2 + X^5*Y*Z", 20, 6,
                (1, 3, 5, 5, 4, 2, 1)),
    "dim20_b": ("Z^3 + Y^4 + X^3*Z + X^2*Y*Z + X^3*Y^2", 20, 6,
                (1, 3, 5, 5, 4, 2, 1)),
    "e6_t1": ("X^3 + Y^3 + Z^3 + X*Y*Z", 7, 3, None),
}

# derivation algebra dimensions reported for the non-homogeneous germs
DERIVATION_DIMS = {
    "dim23": 42,
    "dim17": 25,
    "dim15_nu8": 20,
    "dim15_nu6": 23,
}

_POLY_FILES = ("uv", "sr", "gh", "gr")


def fixture_json(name: str) -> dict:
    if name not in _POLY_FILES:
        raise KeyError("unknown fixture %r" % name)
    text = resources.files(__package__).joinpath("%s.json" % name).read_text(
        encoding="utf-8")
    return json.loads(text)


def fixture_nilpoly(name: str) -> NilPolynomial:
    return nilpoly_from_json(fixture_json(name))


def fixture_path(name: str):
    """Filesystem path of a shipped fixture file (for CLI examples)."""
    return resources.files(__package__).joinpath("%s.json" % name)


def germ_poly(key: str) -> MPoly:
    return parse(GERMS[key][0])
