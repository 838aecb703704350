"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
Criterion 4 eliminates the degree-7 multilinear components over Z and takes
several minutes; set NILIDEAL_CACHE_DIR to reuse echelon forms between runs.
"""

import os
import random
import sys
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilideal.commcalc import run_derivation_suite
from nilideal.freealg import GF, QQ, ZZ, MultiDegree, Poly, bracket, left_normed, multidegree_of, \
    substitute
from nilideal.lattice import (EQUAL, MEMBER, NOT_MEMBER, TORSION, field_membership, hnf,
                              lattice_membership, rank, span_equal, vectorize, verify_combination)
from nilideal.reducer import FORMS, Certificate, reduce, verify_certificate
from nilideal.verify import (NON_MULTILINEAR, PASS, Session, check_equal_by_certificates, check_f8_substitution,
                             check_reducer, check_span_equal, family_instance, regression_records)

PRIMES = (2, 3, 5, 7, 11, 101)
SESSION = Session(cache_dir=os.environ.get("NILIDEAL_CACHE_DIR"))


def _x(i):
    return Poly.var(i)


def _fails(records):
    return [f"{r.id}: {r.detail}" for r in records if r.status != PASS]


# -- criteria -------------------------------------------------------------------

def criterion_1():
    out = {}
    for ring in (ZZ, GF(2), GF(3)):
        rep = run_derivation_suite(ring)
        out[ring.name] = [r["id"] for r in rep if r["residual_term_count"]]
    ok = not any(out.values())
    return ok, f"{len(rep)} identities, nonzero residuals: {out}"


def criterion_2():
    d = MultiDegree.multilinear(5)
    b = SESSION.basis(d)
    span = SESSION.span("T4", d, ZZ)
    t = vectorize(left_normed([_x(1), _x(2)]) * left_normed([_x(3), _x(4), _x(5)]), b)
    z = lattice_membership(span, t, len(b))
    verdicts = {"Z": str(z), "Q": str(field_membership(span, t, QQ, len(b)))}
    for p in PRIMES:
        verdicts[f"F{p}"] = str(field_membership(span, t, GF(p), len(b)))
    ok = (z.verdict == TORSION and z.k == 3 and verdicts["Q"] == MEMBER and verdicts["F3"] == NOT_MEMBER
          and all(verdicts[f"F{p}"] == MEMBER for p in PRIMES if p != 3)
          and verify_combination(span, z.coeffs, {i: 3 * c for i, c in t.items()}, ZZ))
    return ok, str(verdicts)


def criterion_3():
    verdicts = {}
    for fid in ("F1", "F2", "F3", "F4", "F5", "F6", "F7"):
        verdicts[fid] = str(SESSION.membership("T5", family_instance(fid), ZZ))
    f8 = check_f8_substitution(SESSION, [QQ] + [GF(p) for p in PRIMES])
    ok = all(v == MEMBER for v in verdicts.values()) and f8.status == PASS
    verdicts["F8"] = f"{f8.status} via F5 substitution over Z (rings {f8.detail.get('rings')})"
    return ok, str(verdicts)


def criterion_4():
    recs = []
    for n in (5, 6, 7):
        recs.append(check_span_equal(SESSION, "I5", "T5", MultiDegree.multilinear(n), ZZ))
    recs.append(check_equal_by_certificates(SESSION, 8))
    for d in NON_MULTILINEAR:
        recs.append(check_span_equal(SESSION, "I5", "T5", d, ZZ))
    bad = _fails(recs)
    timing = ", ".join(f"{r.id} {r.ms / 1000:.0f}s" for r in recs)
    return not bad, (f"failures: {bad}" if bad else timing)


def criterion_5():
    recs = regression_records(SESSION)
    bad = _fails(recs)
    return not bad, f"{len(recs)} checks" + (f", failures: {bad}" if bad else "")


def criterion_6():
    t = time.perf_counter()
    rec = check_reducer(SESSION, 200, seed=5, cross_max_degree=7)
    dt = time.perf_counter() - t
    return rec.status == PASS, f"{rec.detail} in {dt:.0f}s"


def criterion_7():
    d = MultiDegree.multilinear(5)
    n = len(SESSION.basis(d))
    t5, i5 = SESSION.span("T5", d, QQ), SESSION.span("I5", d, QQ)
    rt, ri = rank(t5, QQ, n), rank(i5, QQ, n)
    eq = span_equal(i5, t5, QQ, n).verdict
    return rt == 24 and ri == 24 and eq == EQUAL, f"rank T5 {rt}, rank I5 {ri}, {eq}"


# property suites; each runs >= 100 hypothesis examples

_TRIALS = settings(max_examples=100, deadline=None, database=None)


@st.composite
def _polys(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        w = tuple(draw(st.lists(st.integers(1, 4), max_size=3)))
        terms[w] = draw(st.integers(-4, 4))
    return Poly(terms, ZZ)


_mats = st.lists(st.dictionaries(st.integers(0, 5), st.integers(-5, 5), max_size=6), max_size=6)


@_TRIALS
@given(_polys(), _polys())
def _antisymmetry(a, b):
    assert bracket(a, b) == -bracket(b, a)


@_TRIALS
@given(st.lists(st.integers(1, 5), max_size=6), st.lists(st.integers(1, 5), max_size=6))
def _grading(u, v):
    assert multidegree_of(tuple(u) + tuple(v)) == multidegree_of(u) + multidegree_of(v)


@_TRIALS
@given(_polys(), _polys(), _polys(), _polys())
def _homomorphism(p, q, s1, s2):
    asg = {1: s1, 2: s2, 3: _x(3), 4: _x(1) * _x(2)}
    assert substitute(p * q, asg) == substitute(p, asg) * substitute(q, asg)
    assert substitute(p + q, asg) == substitute(p, asg) + substitute(q, asg)


@_TRIALS
@given(_mats)
def _hnf_idempotence(rows):
    rows = [{j: c for j, c in r.items() if c} for r in rows]
    h = hnf(rows, ZZ, 6)
    assert hnf([r for _, r in h], ZZ, 6) == h


@_TRIALS
@given(_mats, st.dictionaries(st.integers(0, 5), st.integers(-4, 4), max_size=6))
def _ring_consistency(rows, target):
    rows = [{j: c for j, c in r.items() if c} for r in rows]
    target = {j: c for j, c in target.items() if c}
    z = lattice_membership(rows, target, 6)
    q = field_membership(rows, target, QQ, 6).verdict
    mods = {p: field_membership(rows, target, GF(p), 6).verdict for p in (2, 3, 5)}
    if z.verdict == MEMBER:
        assert q == MEMBER and set(mods.values()) == {MEMBER}
    elif z.verdict == TORSION:
        assert q == MEMBER and all(v == MEMBER for p, v in mods.items() if z.k % p)
    else:
        assert q == NOT_MEMBER
    if NOT_MEMBER in mods.values():
        assert z.verdict != MEMBER


@_TRIALS
@given(st.sampled_from(sorted(FORMS)), st.randoms(use_true_random=False))
def _certificate_round_trip(form, rnd):
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
    assert back.to_json() == c.to_json() and verify_certificate(back)


def criterion_8():
    suites = [_antisymmetry, _grading, _homomorphism, _hnf_idempotence, _ring_consistency,
              _certificate_round_trip]
    failed = []
    for s in suites:
        try:
            s()
        except Exception as exc:  # report every suite, not just the first failure
            failed.append(f"{s.__name__}: {type(exc).__name__}")
    names = " ".join(s.__name__.lstrip("_") for s in suites)
    return not failed, (f"failures: {failed}" if failed else f"{len(suites)} suites x 100 trials: {names}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def _run(n):
    t = time.perf_counter()
    ok, detail = CRITERIA[n]()
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t:.1f}s) {detail}"
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line = _run(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    random.seed(0)
    results = [_run(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
