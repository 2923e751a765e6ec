import pytest

from nilforge.algebra import NilAlgebra, Pointing
from nilforge.exactlin import QQ
from nilforge.fixtures import GERMS, germ_poly
from nilforge.milnor import milnor_algebra
from nilforge.nilpoly import nil_polynomial


@pytest.fixture(scope="session")
def milnor_cache():
    """Milnor results per germ key, built once per session."""
    cache = {}

    def get(key):
        if key not in cache:
            cache[key] = milnor_algebra(germ_poly(key))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def nilpoly_cache(milnor_cache):
    cache = {}

    def get(key):
        if key not in cache:
            cache[key] = nil_polynomial(milnor_cache(key).algebra)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def cyclic3():
    """Maximal ideal of QQ[X]/(X^4): basis x, x^2, x^3."""
    return NilAlgebra(3, {(0, 0): {1: QQ(1)}, (0, 1): {2: QQ(1)}},
                      ["x", "x2", "x3"])


@pytest.fixture(scope="session")
def cyclic3_pointed(cyclic3):
    return cyclic3, Pointing.default(cyclic3)
