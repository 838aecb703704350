import dataclasses
import random

import pytest

from nilideal import commcalc
from nilideal.commcalc import (D1_AS_PRINTED, ArityError, catalog, check_identity, expand, fresh_args,
                               generated_group_order, get_identity, run_derivation_suite)
from nilideal.freealg import GF, QQ, ZZ, Poly, bracket, left_normed

BASE = ["LEIBNIZ_RIGHT", "LEIBNIZ_LEFT", "EXPAND_3", "EXPAND_4", "JACOBI"]


def x(i, ring=ZZ):
    return Poly.var(i, ring)


def random_poly(rng, nvars=4, max_deg=3, max_terms=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        w = tuple(rng.randint(1, nvars) for _ in range(rng.randint(1, max_deg)))
        terms[w] = rng.randint(-3, 3)
    return Poly(terms, ZZ)


def test_catalog_contents():
    ids = [e.id for e in catalog()]
    assert ids[:5] == BASE
    for k in range(1, 9):
        assert f"D{k}" in ids
    assert len(ids) == len(set(ids))
    splits = [i for i in ids if i.startswith("D") and i[1:].isdigit() and int(i[1:]) >= 9]
    assert len(splits) >= 8


def test_expand_leibniz_right():
    assert expand("LEIBNIZ_RIGHT", [x(1), x(2), x(3)]) == x(2) * bracket(x(1), x(3)) + bracket(x(1), x(2)) * x(3)
    assert expand("LEIBNIZ_RIGHT", [x(1), x(2), x(3)]) == bracket(x(1), x(2) * x(3))


def test_expand_expand3():
    v = [x(i) for i in range(1, 5)]
    want = (v[0] * left_normed(v[1:4]) + bracket(v[0], v[3]) * bracket(v[1], v[2])
            + bracket(v[0], v[2]) * bracket(v[1], v[3]) + left_normed([v[0], v[2], v[3]]) * v[1])
    assert expand("EXPAND_3", v) == want


def test_jacobi_on_equal_arguments(rng):
    for _ in range(10):
        p = random_poly(rng)
        s = left_normed([p, p, p]) + left_normed([p, p, p]) + left_normed([p, p, p])
        assert not s
        assert not check_identity("JACOBI", [p, p, p])


def test_examples_vanish():
    assert not check_identity("EXPAND_4", [x(i) for i in range(1, 6)])
    assert not check_identity("JACOBI", [x(1), x(2), x(3)])


def test_arity_mismatch():
    with pytest.raises(ArityError):
        expand("EXPAND_3", [x(1), x(2)])
    with pytest.raises(KeyError):
        get_identity("NOPE")


def test_truncated_expand3_leaves_four_monomials():
    e = get_identity("EXPAND_3")
    rhs = e.rhs.rsplit(" + ", 1)[0]
    cut = dataclasses.replace(e, id="EXPAND_3_CUT", chain=(e.lhs, rhs))
    res = check_identity(cut, fresh_args(cut))
    assert len(res) == 4
    v = [x(i) for i in range(1, 5)]
    assert res == left_normed([v[0], v[2], v[3]]) * v[1]


@pytest.mark.parametrize("ring", [ZZ, GF(2), GF(3), QQ])
def test_full_suite_zero(ring):
    rep = run_derivation_suite(ring)
    assert len(rep) == len(catalog())
    assert [r["id"] for r in rep] == [e.id for e in catalog()]
    assert all(r["residual_term_count"] == 0 for r in rep), [r for r in rep if r["residual_term_count"]]


def test_sign_flip_gives_exactly_one_failure():
    entries = list(catalog())
    k = [e.id for e in entries].index("D2")
    e = entries[k]
    entries[k] = dataclasses.replace(e, chain=e.chain[:-1] + ("-(" + e.chain[-1] + ")",))
    rep = run_derivation_suite(ZZ, entries)
    bad = [r["id"] for r in rep if r["residual_term_count"]]
    assert bad == ["D2"]


def test_d1_as_printed_is_not_an_identity():
    res = check_identity(D1_AS_PRINTED, fresh_args(D1_AS_PRINTED))
    assert res
    assert not check_identity("D1", fresh_args(get_identity("D1")))


@pytest.mark.parametrize("iid", [e.id for e in catalog()])
def test_random_polynomial_arguments(iid):
    e = get_identity(iid)
    rng = random.Random(sum(map(ord, iid)))
    trials = 50 if e.arity <= 5 else 4
    for _ in range(trials):
        args = [random_poly(rng, max_deg=3 if e.arity <= 5 else 2, max_terms=4 if e.arity <= 5 else 2)
                for _ in range(e.arity)]
        assert not check_identity(e, args)


def test_expand_consistent_with_lhs(rng):
    for iid in BASE:
        e = get_identity(iid)
        args = [random_poly(rng) for _ in range(e.arity)]
        lhs = commcalc.evaluate(commcalc.parse_expr(e.lhs), {i + 1: a for i, a in enumerate(args)}, ZZ)
        assert expand(iid, args) == lhs


def test_transpositions_generate_s6():
    assert generated_group_order([(1, 2), (4, 5), (3, 6), (3, 4), (1, 6)], 6) == 720
    assert generated_group_order([(1, 2), (4, 5)], 6) == 4
