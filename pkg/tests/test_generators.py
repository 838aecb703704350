import itertools
import random

import pytest

from nilideal.freealg import QQ, ZZ, MultiDegree, Poly, component, left_normed
from nilideal.generators import (LITERAL, VERBAL, builtin_specs, enumerate_component, family, family_poly,
                                 get_spec, words_of)
from nilideal.lattice import ComponentBasis, rank, vectorize

ARITY = {"F1": 5, "F2": 6, "F3": 7, "F4": 6, "F5": 7, "F6": 6, "F7": 7, "F8": 8}
SMALL_FAMILIES = ["T3A", "T3B", "T4A1", "T4A2", "T4A3", "T4B1", "T4B2", "T4B3", "T4B4", "T4B5"]


def xs(n, ring=ZZ):
    return [Poly.var(i, ring) for i in range(1, n + 1)]


def test_builtin_spec_sizes():
    specs = builtin_specs()
    assert len(specs["I5"].families) == 8
    assert len(specs["G4_5"].families) == 5
    assert len(specs["G4_3"].families) == 3
    assert len(specs["G3"].families) == 2
    assert specs["I5"].mode == LITERAL and specs["T5"].mode == VERBAL
    with pytest.raises(KeyError):
        get_spec("T9")


@pytest.mark.parametrize("fid", sorted(ARITY))
def test_family_arity_and_multilinearity(fid):
    assert family(fid).arity == ARITY[fid]
    p = family_poly(fid, xs(ARITY[fid]))
    assert p and p.is_homogeneous()
    for w in p.terms:
        assert sorted(w) == list(range(1, ARITY[fid] + 1))
    assert set(p.terms.values()) <= {1, -1}


@pytest.mark.parametrize("fid", SMALL_FAMILIES)
def test_small_families_multilinear(fid):
    k = family(fid).arity
    p = family_poly(fid, xs(k))
    assert p and all(sorted(w) == list(range(1, k + 1)) for w in p.terms)


def test_f1_is_left_normed():
    assert family_poly("F1", xs(5)) == left_normed(xs(5))
    v = xs(5)
    assert not family_poly("F1", [v[0], v[0], v[2], v[3], v[4]])


def test_f4_monomial_count():
    v = xs(6)
    direct = left_normed(v[:4]) * left_normed(v[4:6]) + left_normed(v[:3] + [v[4]]) * left_normed([v[3], v[5]])
    p = family_poly("F4", v)
    assert p == direct and len(p) == 32


def test_arity_mismatch():
    with pytest.raises(ValueError):
        family_poly("F2", xs(5))


def test_sign_symmetry():
    v = xs(7)
    f1 = family_poly("F1", v[:5])
    assert family_poly("F1", [v[1], v[0]] + v[2:5]) == -f1
    f2 = family_poly("F2", v[:6])
    assert family_poly("F2", [v[1], v[0]] + v[2:6]) == -f2
    assert family_poly("F2", v[:3] + [v[4], v[3], v[5]]) == -f2


def test_degree5_spans():
    d = MultiDegree.multilinear(5)
    t5 = enumerate_component(get_spec("T5"), d)
    i5 = enumerate_component(get_spec("I5"), d)
    assert len(t5) == 120 and len(i5) == 120
    brackets = {left_normed([Poly.var(i) for i in s]) for s in itertools.permutations(range(1, 6))}
    assert set(t5) == brackets
    b = ComponentBasis(d)
    assert rank([vectorize(p, b) for p in t5], QQ, len(b)) == 24


def test_t2_degree2():
    d = MultiDegree.multilinear(2)
    raw = enumerate_component(get_spec("T2"), d)
    assert len(raw) == 2
    b = ComponentBasis(d)
    assert rank([vectorize(p, b) for p in raw], QQ, len(b)) == 1


def test_enumeration_deterministic():
    d = MultiDegree({1: 2, 2: 1, 3: 1})
    a = enumerate_component(get_spec("T3"), d)
    b = enumerate_component(get_spec("T3"), d)
    assert a == b


def _random_poly(rng, letters, max_len, size=3):
    """A few random words in ``letters`` with random integer coefficients."""
    terms = {}
    for _ in range(size):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(1, max_len)))
        terms[w] = rng.randint(-3, 3)
    return Poly(terms, ZZ)


def _one_poly(rng, letters, max_len):
    return Poly.const(1) + _random_poly(rng, letters, max_len)


@pytest.mark.parametrize("n,d", [
    (2, MultiDegree({1: 1, 2: 1, 3: 1})),
    (2, MultiDegree({1: 2, 2: 1})),
    (2, MultiDegree({1: 2, 2: 2})),
    (3, MultiDegree({1: 1, 2: 1, 3: 1})),
    (3, MultiDegree({1: 2, 2: 1, 3: 1})),
    (3, MultiDegree({1: 1, 2: 1, 3: 1, 4: 1})),
])
def test_verbal_enumeration_against_polynomial_oracle(n, d):
    """Words as slot arguments give the same component as arbitrary polynomial arguments."""
    rng = random.Random(n * 100 + d.total)
    letters = sorted(dict(d))
    b = ComponentBasis(d)
    enum = [vectorize(p, b) for p in enumerate_component(get_spec(f"T{n}"), d)]
    oracle = []
    for _ in range(400):
        args = [_random_poly(rng, letters, d.total - n + 1) for _ in range(n)]
        u = _one_poly(rng, letters, 1)
        v = _one_poly(rng, letters, 1)
        part = component(u * left_normed(args) * v, d)
        if part:
            oracle.append(vectorize(part, b))
    r_enum = rank(enum, QQ, len(b))
    assert rank(oracle, QQ, len(b)) == r_enum
    assert rank(enum + oracle, QQ, len(b)) == r_enum


def test_words_of_counts():
    assert len(words_of(MultiDegree.multilinear(5))) == 120
    assert len(words_of(MultiDegree({1: 2, 2: 2, 3: 1}))) == 30
