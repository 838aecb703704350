"""Theorem-verification checks: family inclusions, span comparisons, certificate runs.

Every check returns a :class:`Record`; :func:`verify_theorem` assembles them
into a :class:`Report` in a fixed order.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .commcalc import run_derivation_suite
from .freealg import GF, QQ, ZZ, MultiDegree, Poly, Ring, left_normed, multidegree_of
from .generators import get_spec, instance_terms, iter_component_terms, iter_raw
from .lattice import (EQUAL, MEMBER, ComponentBasis, Echelon, cache_path, dedup_span,
                      load_echelon, save_echelon, span_equal, unvectorize, vectorize, vectorize_terms)
from .reducer import FORMS, Certificate, Reducer, ReductionError, _add, _terms_list, verify_certificate
from .textfmt import format_poly

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"

FAMILY_ARITY = {fam: arity for fam, arity, _ in FORMS.values()}


@dataclass
class Record:
    id: str
    status: str
    detail: dict = field(default_factory=dict)
    ms: int = 0

    def to_dict(self) -> dict:
        return {"id": self.id, "status": self.status, "detail": self.detail, "ms": self.ms}


@dataclass
class Report:
    suite: str
    environment: dict
    records: List[Record] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status == PASS for r in self.records)

    @property
    def exit_code(self) -> int:
        if any(r.status == FAIL for r in self.records):
            return 1
        if any(r.status == SKIPPED for r in self.records):
            return 4
        return 0

    def to_json(self, timing: bool = True) -> str:
        recs = [r.to_dict() for r in self.records]
        if not timing:
            for r in recs:
                r.pop("ms")
        return json.dumps({"suite": self.suite, "environment": self.environment,
                           "passed": self.passed, "records": recs}, indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"{r.status:7s} {r.id}" + (f"  {r.detail.get('note', '')}" if r.detail.get("note") else "")
                 for r in self.records]
        n = {s: sum(r.status == s for r in self.records) for s in (PASS, FAIL, SKIPPED)}
        lines.append(f"{n[PASS]} passed, {n[FAIL]} failed, {n[SKIPPED]} skipped")
        return "\n".join(lines)


def _timed(rid: str, fn: Callable[[], Tuple[str, dict]]) -> Record:
    t = time.perf_counter()
    try:
        status, detail = fn()
    except MemoryError:
        status, detail = SKIPPED, {"note": "out of memory"}
    return Record(rid, status, detail, int((time.perf_counter() - t) * 1000))


# -- component spans ----------------------------------------------------------

class Session:
    """Caches bases, deduplicated spans and echelon forms per (spec, multidegree, ring)."""

    def __init__(self, engine: str = "auto", cache_dir: Optional[str] = None):
        self.engine = engine
        self.cache_dir = cache_dir
        self._bases: Dict[MultiDegree, ComponentBasis] = {}
        self._spans: Dict[tuple, list] = {}
        self._ech: Dict[tuple, Echelon] = {}
        self._lock = threading.RLock()
        self.notes: Dict[tuple, str] = {}

    def basis(self, d: MultiDegree) -> ComponentBasis:
        d = MultiDegree(d)
        if d not in self._bases:
            self._bases[d] = ComponentBasis(d)
        return self._bases[d]

    def span(self, spec: str, d: MultiDegree, ring: Ring) -> list:
        key = (spec, MultiDegree(d), ring.name)
        with self._lock:
            return self._span(key, spec, d, ring)

    def _span(self, key, spec, d, ring) -> list:
        if key not in self._spans:
            b = self.basis(d)
            raw = (vectorize_terms(t, b) for t in iter_component_terms(get_spec(spec), MultiDegree(d)))
            self._spans[key] = dedup_span(raw, ring)
        return self._spans[key]

    # Above this multilinear degree the T5 echelon is built from a smaller
    # generating set of the same lattice, see _generating_rows.
    BORDER_SWAP_DEGREE = 7
    BORDER_SWAP = {"T5": "I5"}

    def _rows(self, spec: str, d: MultiDegree, bordered: bool) -> list:
        """Spanning vectors with (bordered) or without a nonempty border, longest borders first."""
        b = self.basis(d)
        out = []
        for k, (fid, u, slots, v) in enumerate(iter_raw(get_spec(spec), d)):
            if bool(u or v) != bordered:
                continue
            t = instance_terms(fid, slots)
            if t:
                out.append((-(len(u) + len(v)), k, vectorize_terms({u + w + v: c for w, c in t.items()}, b)))
        out.sort(key=lambda r: r[:2])
        return [r[2] for r in out]

    def _generating_rows(self, spec: str, d: MultiDegree, ring: Ring) -> Tuple[list, Optional[str]]:
        """Rows whose span is the component of ``spec``; may use a partner ideal's bordered rows.

        The bordered rows of a multilinear component of degree n are x*r and r*x
        for r in the spanning sets of the degree n-1 components. Both ideals are
        stable under relabelling, so once their degree n-1 multilinear components
        are equal over ``ring`` the bordered rows of the partner span the same
        module as those of ``spec``.
        """
        if not d.is_multilinear or d.total < self.BORDER_SWAP_DEGREE:
            return self.span(spec, d, ring), None
        # longest borders first keeps integer entries small in the dense engine
        partner = self.BORDER_SWAP.get(spec)
        lower = MultiDegree.multilinear(d.total - 1)
        if partner is None or self.compare(partner, spec, lower, ring).verdict != EQUAL:
            return dedup_span(self._rows(spec, d, True) + self._rows(spec, d, False), ring), None
        rows = dedup_span(self._rows(partner, d, True) + self._rows(spec, d, False), ring)
        return rows, f"bordered rows from {partner} (equal in degree {d.total - 1})"

    def echelon(self, spec: str, d: MultiDegree, ring: Ring) -> Echelon:
        key = (spec, MultiDegree(d), ring.name)
        with self._lock:
            return self._echelon(key, spec, d, ring)

    def _echelon(self, key, spec, d, ring) -> Echelon:
        if key not in self._ech:
            path = cache_path(self.cache_dir, spec, d, ring) if self.cache_dir else None
            if path and os.path.exists(path):
                ech = load_echelon(path)
            else:
                rows, note = self._generating_rows(spec, MultiDegree(d), ring)
                if note:
                    self.notes[key] = note
                ech = Echelon(rows, ring, len(self.basis(d)), engine=self.engine)
                if path:
                    save_echelon(path, ech)
            self._ech[key] = ech
        return self._ech[key]

    def compare(self, a: str, b: str, d: MultiDegree, ring: Ring):
        n = len(self.basis(d))
        ea, eb = self.echelon(a, d, ring), self.echelon(b, d, ring)
        return span_equal(self.span(a, d, ring), self.span(b, d, ring), ring, n, echelons=(ea, eb))

    def membership(self, spec: str, target: Poly, ring: Ring):
        """Membership of a nonzero multihomogeneous ``target`` in the component of ``spec``."""
        md = multidegree_of(next(iter(target.terms)))
        return self.echelon(spec, md, ring).membership(vectorize(target.to_ring(ring), self.basis(md)))


def ring_list(rings: Sequence[str], primes: Sequence[int]) -> List[Ring]:
    out = [Ring.from_name(r) for r in rings]
    out += [GF(p) for p in primes]
    seen, uniq = set(), []
    for r in out:
        if r.name not in seen:
            seen.add(r.name)
            uniq.append(r)
    return uniq


# -- individual checks --------------------------------------------------------

def check_identities(rings: Sequence[Ring]) -> Record:
    def run():
        bad = {}
        count = 0
        for r in rings:
            rep = run_derivation_suite(r)
            count = len(rep)
            fails = [e["id"] for e in rep if e["residual_term_count"]]
            if fails:
                bad[r.name] = fails
        return (FAIL if bad else PASS), {"entries": count, "rings": [r.name for r in rings], "failures": bad}
    return _timed("identities", run)


def family_instance(fid: str) -> Poly:
    k = FAMILY_ARITY[fid]
    return Poly(instance_terms(fid, [(i,) for i in range(1, k + 1)]), ZZ)


def check_family_in_t5(sess: Session, fid: str, ring: Ring) -> Record:
    def run():
        res = sess.membership("T5", family_instance(fid), ring)
        return (PASS if res.verdict == MEMBER else FAIL), {"verdict": str(res)}
    return _timed(f"family {fid} in T5 over {ring.name}", run)


def f8_substitution_terms():
    """F8 as a signed sum of word * F5(polynomial slots) * word.

    With Q1 = Q(a1..a4), Q2 = Q(a5..a8) and the expansion of [a2*a3, a1, a4]:
    Q1*Q2 = a2*F5(a3,a1,a4,.) + F5(a2,a4,[a3,a1],.) + a3*F5(a2,a1,a4,.)
            + F5([a2,a1],a4,a3,.) - F5(a2*a3,a1,a4,.)   where . = a5..a8.
    """
    x = {i: Poly.var(i) for i in range(1, 9)}
    rest = [x[5], x[6], x[7], x[8]]
    br = lambda a, b: a * b - b * a  # noqa: E731
    return [
        (1, (2,), [x[3], x[1], x[4]] + rest),
        (1, (), [x[2], x[4], br(x[3], x[1])] + rest),
        (1, (3,), [x[2], x[1], x[4]] + rest),
        (1, (), [br(x[2], x[1]), x[4], x[3]] + rest),
        (-1, (), [x[2] * x[3], x[1], x[4]] + rest),
    ]


def f8_identity_residual() -> Poly:
    from .generators import family_poly
    total = Poly.zero(ZZ)
    for c, left, slots in f8_substitution_terms():
        total = total + Poly.const(c) * Poly.word(left) * family_poly("F5", slots)
    return family_instance("F8") - total


def check_f8_substitution(sess: Session, rings: Sequence[Ring]) -> Record:
    """F8 lies in T5: it is a combination of F5 substitution instances, and T5 is a T-ideal."""
    def run():
        res = f8_identity_residual()
        f5 = sess.membership("T5", family_instance("F5"), ZZ).verdict == MEMBER
        ok = not res and f5
        return (PASS if ok else FAIL), {
            "identity_residual_terms": len(res.terms), "f5_in_t5_over_Z": f5,
            "rings": [r.name for r in rings],
            "note": "F8 = sum of F5 substitution instances; holds over Z, hence over every listed ring",
        }
    return _timed("family F8 in T5 via F5 substitution", run)


def composition_certificates(n: int, reducer: Optional[Reducer] = None):
    """Certificates for u*[w1..w5]*v over all cuts of the word 1..n."""
    r = reducer or Reducer()
    w = tuple(range(1, n + 1))
    out = []
    for cuts in itertools.combinations(range(n + 1), 6):
        s, e = cuts[0], cuts[-1]
        parts = [w[cuts[i]:cuts[i + 1]] for i in range(5)]
        if any(not p for p in parts):
            continue
        u, v = w[:s], w[e:]
        terms: dict = {}
        _add(terms, r.reduce_terms("COMM5", parts), 1, u, v)
        target = Poly.word(u) * left_normed([Poly.word(p) for p in parts]) * Poly.word(v)
        out.append(Certificate(target, _terms_list(terms)))
    return out


def check_t5_in_i5_by_certificates(n: int) -> Record:
    """Every multilinear degree-n spanning vector of T5 is a relabelling of one of these cuts."""
    def run():
        certs = composition_certificates(n)
        bad = [k for k, c in enumerate(certs) if not verify_certificate(c)]
        return (FAIL if bad else PASS), {"certificates": len(certs), "failed": bad}
    return _timed(f"T5 in I5 deg{n} by certificates", run)


def check_equal_by_certificates(sess: Session, n: int) -> Record:
    """I5 = T5 in multilinear degree n without eliminating the degree-n component.

    T5 ⊆ I5: certificates for all cuts of x1...xn (other spanning vectors are
    relabellings).  I5 ⊆ T5: every family of arity <= n lies in T5 over Z.
    """
    def run():
        certs = composition_certificates(n)
        bad = [k for k, c in enumerate(certs) if not verify_certificate(c)]
        fams = {}
        for fid, k in sorted(FAMILY_ARITY.items()):
            if k > n:
                continue
            if fid == "F8":
                ok = not f8_identity_residual() and \
                    sess.membership("T5", family_instance("F5"), ZZ).verdict == MEMBER
            else:
                ok = sess.membership("T5", family_instance(fid), ZZ).verdict == MEMBER
            fams[fid] = ok
        ok = not bad and all(fams.values())
        return (PASS if ok else FAIL), {"certificates": len(certs), "failed": bad, "families_in_T5": fams,
                                        "verdict": EQUAL if ok else "UNDECIDED",
                                        "note": "over Z, hence over every ring"}
    return _timed(f"I5 vs T5 deg{n} by certificates", run)


def check_span_equal(sess: Session, a: str, b: str, d: MultiDegree, ring: Ring,
                     expect_equal: bool = True, expect_witness: Optional[Poly] = None) -> Record:
    rid = f"{a} vs {b} {_mdeg_text(d)} over {ring.name}"

    def run():
        cmp = sess.compare(a, b, d, ring)
        detail = {"verdict": cmp.verdict}
        for spec in (a, b):
            note = sess.notes.get((spec, MultiDegree(d), ring.name))
            if note:
                detail["note"] = f"{spec}: {note}"
        if cmp.witness is not None:
            detail["witness"] = format_poly(unvectorize(cmp.witness, sess.basis(d), ring))
        if expect_equal:
            return (PASS if cmp.verdict == EQUAL else FAIL), detail
        ok = cmp.verdict != EQUAL
        if ok and expect_witness is not None:
            ok = cmp.witness == vectorize(expect_witness.to_ring(ring), sess.basis(d))
        detail["expected"] = "strict inclusion"
        return (PASS if ok else FAIL), detail
    return _timed(rid, run)


def _mdeg_text(d: MultiDegree) -> str:
    d = MultiDegree(d)
    if d.is_multilinear:
        return f"deg{d.total}"
    return "{" + ",".join(f"x{k}:{m}" for k, m in d) + "}"


def random_reducer_instances(count: int, seed: int, max_degree: int = 9):
    rng = random.Random(seed)
    forms = sorted(FORMS)
    out = []
    for k in range(count):
        form = forms[k % len(forms)]
        arity = FORMS[form][1]
        total = rng.randint(arity, max(arity, max_degree))
        lens = [1] * arity
        for _ in range(total - arity):
            lens[rng.randrange(arity)] += 1
        if rng.random() < 0.5:
            letters = list(range(1, total + 1))
            rng.shuffle(letters)
        else:
            letters = [rng.randint(1, 4) for _ in range(total)]
        args, i = [], 0
        for L in lens:
            args.append(tuple(letters[i:i + L]))
            i += L
        out.append((form, tuple(args)))
    return out


def check_reducer(sess: Optional[Session], count: int = 200, seed: int = 5, cross_max_degree: int = 7,
                  max_degree: int = 9) -> Record:
    def run():
        r = Reducer()
        bad, cross, cross_bad = [], 0, []
        for form, args in random_reducer_instances(count, seed, max_degree):
            try:
                c = r.reduce(form, args)
            except ReductionError as exc:
                bad.append(f"{form}{args}: {exc}")
                continue
            if not verify_certificate(c):
                bad.append(f"{form}{args}")
                continue
            deg = sum(len(a) for a in args)
            letters = [l for a in args for l in a]
            if sess is not None and deg <= cross_max_degree and len(set(letters)) == deg and c.target:
                cross += 1
                if sess.membership("I5", c.target, ZZ).verdict != MEMBER:
                    cross_bad.append(f"{form}{args}")
        status = PASS if not bad and not cross_bad else FAIL
        return status, {"instances": count, "failed": bad, "lattice_cross_checks": cross,
                        "lattice_disagreements": cross_bad}
    return _timed(f"reducer {count} random instances", run)


# -- suites ---------------------------------------------------------------------

NON_MULTILINEAR = [
    MultiDegree({1: 2, 2: 1, 3: 1, 4: 1}),
    MultiDegree({1: 2, 2: 2, 3: 1}),
    MultiDegree({1: 2, 2: 1, 3: 1, 4: 1, 5: 1}),
    MultiDegree({1: 3, 2: 1, 3: 1, 4: 1}),
]


def regression_records(sess: Session) -> List[Record]:
    from .textfmt import parse_poly
    recs = []
    for n in (3, 4, 5):
        recs.append(check_span_equal(sess, "G3", "T3", MultiDegree.multilinear(n), ZZ))
    for n in (4, 5, 6):
        recs.append(check_span_equal(sess, "G4_5", "T4", MultiDegree.multilinear(n), ZZ))
    for ring in (QQ, GF(2), GF(5)):
        for n in (4, 5, 6):
            recs.append(check_span_equal(sess, "G4_3", "T4", MultiDegree.multilinear(n), ring))
    w = parse_poly("[x1,x2]*[x3,x4,x5]")
    recs.append(check_span_equal(sess, "G4_3", "T4", MultiDegree.multilinear(5), GF(3),
                                 expect_equal=False, expect_witness=w))
    return recs


def verify_theorem(max_degree: int = 7, rings: Sequence[str] = ("Z", "Q"),
                   primes: Sequence[int] = (2, 3, 5, 7, 11, 101), threads: int = 1,
                   field_degree: Optional[int] = None, cert_degree: Optional[int] = None,
                   reducer_instances: int = 200, engine: str = "auto",
                   cache_dir: Optional[str] = None) -> Report:
    """Run every suite; records come out in a fixed order whatever ``threads`` is.

    ``max_degree`` bounds elimination over Z, ``field_degree`` (default
    ``min(max_degree, 6)``) elimination over Q and F_p.  Multilinear degrees above
    ``max_degree`` up to ``cert_degree`` (default 8 when ``max_degree >= 7``) are
    decided by certificates plus the family inclusions.
    """
    if max_degree < 5:
        raise ValueError("max degree must be at least 5")
    field_degree = min(max_degree, 6) if field_degree is None else field_degree
    if cert_degree is None:
        cert_degree = 8 if max_degree >= 7 else max_degree
    rs = ring_list(rings, primes)
    has_z = any(r.tag == "Z" for r in rs)
    env = {"max_degree_Z": max_degree, "max_degree_fields": field_degree, "certificate_degree": cert_degree,
           "rings": [r.name for r in rs], "primes": list(primes), "engine": engine,
           "threads": threads, "reducer_instances": reducer_instances}
    sess = Session(engine, cache_dir)
    jobs: List[Callable[[], Record]] = []
    jobs.append(lambda: check_identities([ZZ] + [r for r in rs if r.tag == "F"]))

    for fid in ("F1", "F2", "F3", "F4", "F5", "F6", "F7"):
        deg = FAMILY_ARITY[fid]
        for r in ([ZZ] if not has_z else []) + rs:
            if (r.tag == "Z" and deg <= max_degree) or (r.is_field and deg <= field_degree):
                jobs.append(lambda fid=fid, r=r: check_family_in_t5(sess, fid, r))
    if max_degree >= 7:
        jobs.append(lambda: check_f8_substitution(sess, rs))

    for n in range(5, max_degree + 1):
        d = MultiDegree.multilinear(n)
        for r in ([ZZ] if not has_z else []) + rs:
            if r.tag == "Z" or n <= field_degree:
                jobs.append(lambda d=d, r=r: check_span_equal(sess, "I5", "T5", d, r))
    for d in NON_MULTILINEAR:
        if d.total <= min(max_degree, 6):
            jobs.append(lambda d=d: check_span_equal(sess, "I5", "T5", d, ZZ))
    for n in range(5, cert_degree + 1):
        if n <= max_degree:
            jobs.append(lambda n=n: check_t5_in_i5_by_certificates(n))
        elif max_degree >= 7:
            jobs.append(lambda n=n: check_equal_by_certificates(sess, n))

    jobs.append(lambda: regression_records(sess))
    jobs.append(lambda: check_reducer(sess, reducer_instances))

    rep = Report("verify-theorem", env)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for out in pool.map(lambda job: job(), jobs):
            rep.records.extend(out if isinstance(out, list) else [out])
    return rep
