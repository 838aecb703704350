import random

import pytest
from hypothesis import strategies as st

from nilideal.freealg import GF, QQ, ZZ, Poly

RINGS = [ZZ, QQ, GF(2), GF(3), GF(101)]


@st.composite
def polys(draw, ring=ZZ, max_terms=4, max_len=3, nvars=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        w = tuple(draw(st.lists(st.integers(1, nvars), min_size=0, max_size=max_len)))
        terms[w] = terms.get(w, 0) + draw(st.integers(-5, 5))
    return Poly(terms, ZZ).to_ring(ring)


@pytest.fixture
def rng():
    return random.Random(1234)
