import random
from functools import lru_cache

import pytest
from gmpy2 import mpq

from hirzebruch.expand import expand_hfe, specialize
from hirzebruch.poly import VarContext, parse_poly

Q4 = VarContext(["q1", "q2", "q3", "q4"])


def rand_rat(rng, span=9, den=7):
    return mpq(rng.randint(-span, span), rng.randint(1, den))


@pytest.fixture
def rng():
    return random.Random(20240611)


@lru_cache(maxsize=None)
def relation_set(n, D=None, c_zero=False):
    """Cached relation sets shared by all test modules."""
    D = D or {3: 9, 4: 12, 5: 16, 6: 21}[n]
    rs = expand_hfe(n, D)
    return specialize(rs, {"c": 0}) if c_zero else rs


def poly(text, ctx):
    return parse_poly(text, ctx)
