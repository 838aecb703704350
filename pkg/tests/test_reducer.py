import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilideal.freealg import ZZ, Poly, left_normed
from nilideal.generators import family_poly
from nilideal.reducer import (FORMS, Certificate, Reducer, ReductionError, expand_certificate, reduce,
                              reduce_t5_element, verify_certificate)
from nilideal.verify import random_reducer_instances

FAMILY_OF = {"COMM5": "F1", "P42": "F4", "P33": "F2", "C2211": "F6",
             "P43": "F3", "P2212": "F7", "P322": "F5", "P2222": "F8"}


def x(i):
    return Poly.var(i)


def singles(n):
    return [(i,) for i in range(1, n + 1)]


def test_form_table():
    arity = {"COMM5": 5, "P2222": 8, "P322": 7, "P2212": 7, "P43": 7, "C2211": 6, "P33": 6, "P42": 6}
    assert {f: FORMS[f][1] for f in FORMS} == arity
    assert {f: FORMS[f][0] for f in FORMS} == FAMILY_OF


@pytest.mark.parametrize("form", sorted(FORMS))
def test_base_case_is_the_family(form):
    n = FORMS[form][1]
    c = reduce(form, singles(n))
    assert c.terms == [(1, (), FAMILY_OF[form], tuple(range(1, n + 1)), ())]
    assert c.target == family_poly(FAMILY_OF[form], [x(i) for i in range(1, n + 1)])
    assert verify_certificate(c)


def test_comm5_last_argument_split():
    c = reduce("COMM5", [(1,), (2,), (3,), (4,), (5, 6)])
    assert sorted(c.terms) == sorted([(1, (5,), "F1", (1, 2, 3, 4, 6), ()), (1, (), "F1", (1, 2, 3, 4, 5), (6,))])
    assert verify_certificate(c)


def test_comm5_first_argument_split_uses_f2_and_f4():
    c = reduce("COMM5", [(1, 2), (3,), (4,), (5,), (6,)])
    assert verify_certificate(c)
    fams = {t[2] for t in c.terms}
    assert {"F2", "F4"} <= fams


def test_perturbed_coefficient_fails():
    c = reduce("COMM5", [(1, 2), (3,), (4,), (5,), (6,)])
    k, l, fam, vs, r = c.terms[0]
    bad = Certificate(c.target, [(k + 1, l, fam, vs, r)] + c.terms[1:])
    res = verify_certificate(bad)
    assert not res and res.residual
    assert res.residual == -Poly.word(l) * family_poly(fam, [x(v) for v in vs]) * Poly.word(r)


def test_arity_and_empty_word_errors():
    with pytest.raises(ValueError):
        reduce("COMM5", singles(4))
    with pytest.raises(ValueError):
        reduce("P42", [(1,), (2,), (), (4,), (5,), (6,)])
    with pytest.raises(ValueError):
        reduce("P99", singles(5))


def test_measure_violation_detected():
    r = Reducer()
    r._stack.append((5, 0))
    with pytest.raises(ReductionError):
        r.reduce_terms("COMM5", singles(5))


def test_certificates_are_literal():
    for form, args in random_reducer_instances(40, 11, 8):
        c = reduce(form, args)
        for coeff, left, fam, vs, right in c.terms:
            assert fam in FAMILY_OF.values()
            assert isinstance(coeff, int) and coeff
            assert all(isinstance(v, int) for v in vs)


def test_random_instances_verify():
    r = Reducer()
    insts = random_reducer_instances(120, 3, 9)
    assert {f for f, _ in insts} == set(FORMS)
    for form, args in insts:
        assert verify_certificate(r.reduce(form, args)), (form, args)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(FORMS)), st.randoms(use_true_random=False))
def test_json_round_trip(form, rnd):
    n = FORMS[form][1]
    lens = [1] * n
    for _ in range(rnd.randint(0, 2)):
        lens[rnd.randrange(n)] += 1
    letters = [rnd.randint(1, 9) for _ in range(sum(lens))]
    args, i = [], 0
    for L in lens:
        args.append(tuple(letters[i:i + L]))
        i += L
    c = reduce(form, args)
    back = Certificate.from_json(c.to_json())
    assert back.terms == c.terms and back.target == c.target
    assert back.to_json() == c.to_json()
    assert verify_certificate(back)


def test_polynomial_arguments_two_subcertificates():
    args = [x(1) + x(2), x(3), x(4), x(5), x(6)]
    c = reduce_t5_element(args)
    assert c.target == left_normed(args)
    assert verify_certificate(c)
    assert {t[3][0] for t in c.terms} == {1, 2}


def test_polynomial_arguments_random():
    rng = random.Random(99)
    for _ in range(25):
        args = []
        for _ in range(5):
            terms = {}
            for _ in range(rng.randint(1, 2)):
                w = tuple(rng.randint(1, 6) for _ in range(rng.randint(1, 2)))
                terms[w] = rng.randint(-3, 3) or 1
            args.append(Poly(terms, ZZ))
        c = reduce_t5_element(args)
        assert verify_certificate(c)
        assert expand_certificate(c) == left_normed(args)


def test_memo_does_not_change_results():
    insts = random_reducer_instances(30, 17, 8)
    shared = Reducer()
    for form, args in insts:
        assert shared.reduce(form, args).terms == Reducer().reduce(form, args).terms
