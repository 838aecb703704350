"""Exact linear algebra on multidegree components.

Two elimination engines share one interface (:class:`Echelon`):

``ExactEchelon``
    sparse rows in Python integers / fractions; Z rows are combined with
    extended-gcd steps, so the row set stays a lattice basis (incremental
    Hermite reduction).  Optionally records how every row is built from the
    input span, which yields membership coefficients.

``DenseEchelon``
    numpy blocks for large components.  Over F_p it is ordinary Gauss-Jordan
    modulo p.  Over Z it only pivots on entries +-1, which keeps the basis
    unimodular in the pivot columns.  Rows that never expose a unit entry
    are kept in a small exact tail (they vanish on all pivot columns), so
    membership is "reduce by the unit rows, then decide in the tail".  With
    an empty tail the lattice is saturated.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .freealg import QQ, ZZ, MultiDegree, Poly, Ring, Word
from .generators import words_of

SparseVec = Dict[int, object]

MEMBER = "MEMBER"
NOT_MEMBER = "NOT_MEMBER"
TORSION = "TORSION"

EQUAL = "EQUAL"
A_NOT_IN_B = "A_NOT_IN_B"
B_NOT_IN_A = "B_NOT_IN_A"

# spans with more raw entries or columns than this go to the dense engine
DENSE_THRESHOLD = 2_000_000
DENSE_COLUMNS = 2048


class ComponentBasis:
    """Monomial basis of one multidegree component, lexicographically ordered."""

    def __init__(self, d: MultiDegree):
        d = MultiDegree(d)
        if d.total == 0:
            raise ValueError("empty multidegree has no component basis")
        self.multidegree = d
        self.monomials: List[Word] = words_of(d)
        self.index: Dict[Word, int] = {w: i for i, w in enumerate(self.monomials)}

    def __len__(self):
        return len(self.monomials)

    def __eq__(self, other):
        return isinstance(other, ComponentBasis) and other.multidegree == self.multidegree

    def __hash__(self):
        return hash(self.multidegree)


def component_basis(d: MultiDegree) -> ComponentBasis:
    return ComponentBasis(d)


def vectorize(p: Poly, b: ComponentBasis) -> SparseVec:
    out = {}
    for w, c in p.terms.items():
        i = b.index.get(w)
        if i is None:
            raise ValueError(f"word {w} lies outside component {b.multidegree}")
        out[i] = c
    return out


def vectorize_terms(terms: Dict[Word, int], b: ComponentBasis) -> SparseVec:
    idx = b.index
    return {idx[w]: c for w, c in terms.items()}


def unvectorize(v: SparseVec, b: ComponentBasis, ring: Ring = ZZ) -> Poly:
    return Poly({b.monomials[i]: c for i, c in v.items()}, ring)


def _coerce(v: SparseVec, ring: Ring) -> SparseVec:
    out = {}
    for i, c in v.items():
        c = ring(c)
        if c:
            out[i] = c
    return out


def dedup_span(span: Iterable[SparseVec], ring: Ring) -> List[SparseVec]:
    """Drop zeros and duplicates up to sign (Z) or up to a scalar (fields)."""
    seen = set()
    out = []
    for v in span:
        v = _coerce(v, ring)
        if not v:
            continue
        lead = v[min(v)]
        if ring.tag == "Z":
            key_v = v if lead > 0 else {i: -c for i, c in v.items()}
        else:
            inv = ring.inv(lead)
            key_v = {i: ring(c * inv) for i, c in v.items()}
        key = tuple(sorted(key_v.items()))
        if key not in seen:
            seen.add(key)
            out.append(key_v)
    return out


# -- results ---------------------------------------------------------------

@dataclass
class MembershipResult:
    verdict: str
    coeffs: Optional[Dict[int, object]] = None  # span index -> coefficient
    k: int = 1

    def __str__(self):
        return f"TORSION {self.k}" if self.verdict == TORSION else self.verdict


@dataclass
class SpanComparison:
    verdict: str
    witness: Optional[SparseVec] = None

    def __str__(self):
        return self.verdict


# -- exact engine ----------------------------------------------------------

def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _axpy(v: dict, a, r: dict, ring: Ring):
    """v += a*r in place, exact, dropping zeros."""
    p = ring.p
    for i, c in r.items():
        x = v.get(i, 0) + a * c
        if p:
            x %= p
        if x:
            v[i] = x
        else:
            v.pop(i, None)


class ExactEchelon:
    """Incremental echelon form; over Z the rows always form a basis of the lattice."""

    def __init__(self, ring: Ring, ncols: int, track: bool = False):
        self.ring = ring
        self.ncols = ncols
        self.track = track
        self.rows: Dict[int, dict] = {}
        self.trans: Dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, v: SparseVec, label: Optional[int] = None):
        ring = self.ring
        v = dict(v)
        t = {label: 1} if (self.track and label is not None) else {}
        while v:
            c = min(v)
            a = v[c]
            if c not in self.rows:
                if ring.tag == "Z":
                    if a < 0:
                        v = {i: -x for i, x in v.items()}
                        t = {i: -x for i, x in t.items()}
                else:
                    inv = ring.inv(a)
                    v = {i: ring(x * inv) for i, x in v.items()}
                    t = {i: ring(x * inv) for i, x in t.items()}
                self.rows[c] = v
                if self.track:
                    self.trans[c] = t
                return True
            r = self.rows[c]
            b = r[c]
            if ring.tag != "Z":
                _axpy(v, ring(-a), r, ring)
                if self.track:
                    _axpy(t, ring(-a), self.trans[c], ring)
                continue
            if a % b == 0:
                q = a // b
                _axpy(v, -q, r, ring)
                if self.track:
                    _axpy(t, -q, self.trans[c], ring)
                continue
            # replace the pivot by the gcd combination; keep the other unimodular partner
            g, x, y = _egcd(b, a)
            new = {}
            _axpy(new, x, r, ring)
            _axpy(new, y, v, ring)
            rest = {}
            _axpy(rest, a // g, r, ring)
            _axpy(rest, -(b // g), v, ring)
            if self.track:
                tr = self.trans[c]
                nt, rt = {}, {}
                _axpy(nt, x, tr, ring)
                _axpy(nt, y, t, ring)
                _axpy(rt, a // g, tr, ring)
                _axpy(rt, -(b // g), t, ring)
                self.trans[c] = nt
                t = rt
            if new[c] < 0:
                new = {i: -z for i, z in new.items()}
                if self.track:
                    self.trans[c] = {i: -z for i, z in self.trans[c].items()}
            self.rows[c] = new
            v = rest
        return False

    def reduce(self, target: SparseVec):
        """Reduce ``target``; return (remainder, integer or field coefficients over rows)."""
        ring = self.ring
        v = dict(target)
        coef: Dict[int, object] = {}
        done_below = -1
        while v:
            cands = [i for i in v if i > done_below]
            if not cands:
                break
            c = min(cands)
            if c not in self.rows:
                done_below = c
                continue
            a = v[c]
            b = self.rows[c][c]
            if ring.tag == "Z":
                if a % b:
                    done_below = c
                    continue
                q = a // b
            else:
                q = a
            coef[c] = coef.get(c, 0) + q
            _axpy(v, -q if ring.tag == "Z" else ring(-q), self.rows[c], ring)
        return v, coef

    def rational_coords(self, target: SparseVec):
        """Coordinates of ``target`` in the row basis over Q, or None if outside the Q-span."""
        v = {i: Fraction(x) for i, x in target.items()}
        coords: Dict[int, Fraction] = {}
        while v:
            c = min(v)
            if c not in self.rows:
                return None
            r = self.rows[c]
            lam = v[c] / r[c]
            coords[c] = lam
            for i, x in r.items():
                y = v.get(i, 0) - lam * x
                if y:
                    v[i] = y
                else:
                    v.pop(i, None)
        return coords

    def coeffs_from_row_coef(self, coef: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for c, q in coef.items():
            _axpy(out, q, self.trans[c], self.ring)
        return out

    def normal_form(self) -> List[Tuple[int, dict]]:
        """Canonical HNF (Z) or reduced row echelon form (fields), sorted by pivot."""
        ring = self.ring
        piv = sorted(self.rows)
        rows = {c: dict(self.rows[c]) for c in piv}
        # increasing pivot order: clearing column cj only touches columns >= cj
        for j in range(len(piv)):
            cj = piv[j]
            rj = rows[cj]
            bj = rj[cj]
            for i in range(j):
                ri = rows[piv[i]]
                a = ri.get(cj, 0)
                if not a:
                    continue
                q = a // bj if ring.tag == "Z" else a
                if q:
                    _axpy(ri, -q if ring.tag == "Z" else ring(-q), rj, ring)
        return [(c, rows[c]) for c in piv]

    def member(self, target: SparseVec) -> bool:
        rem, _ = self.reduce(target)
        return not rem


# -- dense engine ----------------------------------------------------------

class _Fallback(Exception):
    pass


_ZBOUND = 1 << 40


def _exact_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Integer product; float64 BLAS whenever every partial sum stays below 2**52."""
    ma = int(np.abs(A).max(initial=0))
    mb = int(np.abs(B).max(initial=0))
    bound = A.shape[1] * ma * mb
    if bound < (1 << 52):
        return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64)
    if p:
        return ((A.astype(object) @ B.astype(object)) % p).astype(np.int64)
    if bound < (1 << 62):
        return _limb_matmul(A, B, ma, mb)
    raise _Fallback("entry growth")


def _limb_matmul(A: np.ndarray, B: np.ndarray, ma: int, mb: int) -> np.ndarray:
    """Exact int64 product via float64 BLAS on limbs of the operand with larger entries.

    The caller guarantees the result fits in int64.
    """
    if ma > mb:
        return _limb_matmul(B.T, A.T, mb, ma).T
    k = A.shape[1]
    s = 52 - (k * max(ma, 1)).bit_length() - 1
    if s < 8:
        return A @ B
    base = 1 << s
    Af = A.astype(np.float64)
    sign = np.sign(B)
    rest = np.abs(B)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    shift = 0
    while np.any(rest):
        limb = (rest & (base - 1)) * sign
        out += np.rint(Af @ limb.astype(np.float64)).astype(np.int64) << shift
        rest >>= s
        shift += s
    return out


class DenseEchelon:
    """Blocked Gauss-Jordan in numpy; rows satisfy ``E[:, pivots] == I``."""

    def __init__(self, ring: Ring, ncols: int, prefer: Optional[Sequence[int]] = None):
        if ring.tag == "Q":
            raise ValueError("dense engine works over Z or F_p")
        self.ring = ring
        self.ncols = ncols
        self.E = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: List[int] = []
        # rows that never offered a unit pivot; they vanish on every pivot column
        self.tail: Optional[ExactEchelon] = None
        # columns tried first as pivots (e.g. those of a lattice expected to be equal)
        self.prefer = np.zeros(ncols, dtype=bool)
        if prefer:
            self.prefer[list(prefer)] = True

    @property
    def rank(self) -> int:
        return len(self.pivots) + (self.tail.rank if self.tail is not None else 0)

    def finish(self, leftover: np.ndarray):
        """Freeze the basis; leftover rows go to an exact tail echelon."""
        if leftover.shape[0] == 0:
            return
        self.tail = ExactEchelon(self.ring, self.ncols)
        for row in leftover:
            nz = np.flatnonzero(row)
            self.tail.insert({int(j): int(row[j]) for j in nz})

    def _split(self, t: np.ndarray) -> SparseVec:
        nz = np.flatnonzero(t)
        return {int(j): int(t[j]) for j in nz}

    def _reduce_block(self, C: np.ndarray) -> np.ndarray:
        if not self.pivots:
            return C
        A = C[:, self.pivots]
        p = self.ring.p
        if not np.any(A):
            return C
        out = C - _exact_matmul(A, self.E, p)
        if p:
            return out % p
        if np.abs(out).max(initial=0) > _ZBOUND:
            raise _Fallback("entry growth")
        return out

    def add_block(self, C: np.ndarray) -> np.ndarray:
        """Absorb a block; return the rows that found no unit pivot (Z only)."""
        p = self.ring.p
        C = self._reduce_block(C)
        C = C[np.any(C != 0, axis=1)]
        if C.shape[0] == 0:
            return C
        new_rows: List[np.ndarray] = []
        new_piv: List[int] = []
        while C.shape[0]:
            if p:
                nz = C != 0
            else:
                nz = np.abs(C) == 1
            cols = np.flatnonzero(nz.any(axis=0))
            if cols.size == 0:
                break
            hinted = cols[self.prefer[cols]]
            c = int(hinted[0]) if hinted.size else int(cols[0])
            i = int(np.flatnonzero(nz[:, c])[0])
            row = C[i].copy()
            if p:
                row = row * pow(int(row[c]), -1, p) % p
            elif row[c] < 0:
                row = -row
            C = np.delete(C, i, axis=0)
            f = C[:, c].copy()
            if np.any(f):
                C = C - np.outer(f, row)
                if p:
                    C %= p
                elif np.abs(C).max(initial=0) > _ZBOUND:
                    raise _Fallback("entry growth")
            for k, rr in enumerate(new_rows):
                a = rr[c]
                if a:
                    rr = rr - a * row
                    new_rows[k] = rr % p if p else rr
            new_rows.append(row)
            new_piv.append(c)
            C = C[np.any(C != 0, axis=1)]
        leftover = C
        if not new_rows:
            return leftover
        R = np.array(new_rows, dtype=np.int64)
        # leftover rows are already reduced by the new pivots
        if self.pivots:
            A = self.E[:, new_piv]
            if np.any(A):
                self.E = self.E - _exact_matmul(A, R, p)
                if p:
                    self.E %= p
                elif np.abs(self.E).max(initial=0) > _ZBOUND:
                    raise _Fallback("entry growth")
        self.E = np.vstack([self.E, R])
        self.pivots.extend(new_piv)
        return leftover

    def residual(self, T: np.ndarray) -> np.ndarray:
        return self._reduce_block(T)

    def _target(self, target: SparseVec) -> np.ndarray:
        t = np.zeros((1, self.ncols), dtype=np.int64)
        for i, c in target.items():
            t[0, i] = c % self.ring.p if self.ring.p else c
        return t

    def remainder(self, target: SparseVec) -> SparseVec:
        """``target`` minus its pivot-column combination of the unit rows."""
        return self._split(self.residual(self._target(target))[0])

    def member(self, target: SparseVec) -> bool:
        try:
            rem = self.remainder(target)
        except _Fallback:
            ex = ExactEchelon(self.ring, self.ncols)
            for _, row in self.rows_sparse():
                ex.insert(row)
            return ex.member(target)
        if not rem:
            return True
        return self.tail is not None and self.tail.member(rem)

    def rows_sparse(self) -> List[Tuple[int, dict]]:
        out = []
        for k, c in enumerate(self.pivots):
            row = self.E[k]
            nz = np.flatnonzero(row)
            out.append((c, {int(j): int(row[j]) for j in nz}))
        if self.tail is not None:
            out.extend(self.tail.normal_form())
        return sorted(out)


def _dense_block(vs: Sequence[SparseVec], n: int, p: int) -> np.ndarray:
    C = np.zeros((len(vs), n), dtype=np.int64)
    for r, v in enumerate(vs):
        for i, c in v.items():
            C[r, i] = c % p if p else c
    return C


def _dense_build(span, ring: Ring, ncols: int, block: int, prefer=None) -> DenseEchelon:
    de = DenseEchelon(ring, ncols, prefer)
    pending = np.zeros((0, ncols), dtype=np.int64)
    for s in range(0, len(span), block):
        C = _dense_block(span[s:s + block], ncols, ring.p)
        if pending.shape[0]:
            C = np.vstack([pending, C])
        pending = de.add_block(C)
        if pending.shape[0] > block:
            pending = _compact(pending, ring, ncols)
    if pending.shape[0]:
        try:
            pending = _compact(pending, ring, ncols)
        except _Fallback:
            # large entries are fine in the exact tail
            de.finish(pending)
            return de
    while pending.shape[0]:
        before = pending.shape[0], de.rank
        pending = de.add_block(pending)
        if (pending.shape[0], de.rank) == before:
            break
    de.finish(pending)
    return de


def _compact(rows: np.ndarray, ring: Ring, ncols: int) -> np.ndarray:
    """Replace rows without a unit entry by an echelon basis of their span.

    Over Z the gcd steps usually produce pivots equal to 1, which the dense
    engine can then absorb.
    """
    ex = ExactEchelon(ring, ncols)
    for row in rows:
        nz = np.flatnonzero(row)
        ex.insert({int(j): int(row[j]) for j in nz})
    out = [r for _, r in sorted(ex.rows.items())]
    if any(abs(x) > _ZBOUND for r in out for x in r.values()):
        raise _Fallback("entry growth")
    return _dense_block(out, ncols, ring.p)


def _lcm_den(coords) -> int:
    k = 1
    for lam in coords.values():
        k = k * lam.denominator // math.gcd(k, lam.denominator)
    return k


def _integral(v: SparseVec) -> SparseVec:
    """Clear denominators; Q-membership is unchanged by scaling."""
    k = 1
    for c in v.values():
        d = Fraction(c).denominator
        k = k * d // math.gcd(k, d)
    return {i: int(c * k) for i, c in v.items()}


class Echelon:
    """Echelonized span of a component; chooses the engine by size."""

    def __init__(self, span: Sequence[SparseVec], ring: Ring, ncols: int,
                 track: bool = False, engine: str = "auto", block: int = 384,
                 prefer: Optional[Sequence[int]] = None):
        self.ring = ring
        self.ncols = ncols
        self.span = list(span)
        self.track = track
        size = sum(len(v) for v in self.span)
        big = size > DENSE_THRESHOLD or ncols >= DENSE_COLUMNS
        use_dense = engine == "dense" or (engine == "auto" and not track and big)
        self.saturated = None
        self.engine = None
        if use_dense and ring.tag != "Q":
            try:
                self.engine = _dense_build(self.span, ring, ncols, block, prefer)
                self.saturated = ring.tag == "Z" and self.engine.tail is None
            except _Fallback:
                self.engine = None
        if use_dense and ring.tag == "Q" and self.engine is None:
            # the Q-span of an integer span equals the Q-span of its lattice
            try:
                self.engine = _dense_build([_integral(v) for v in self.span], ZZ, ncols, block, prefer)
            except _Fallback:
                self.engine = None
        if self.engine is None:
            ex = ExactEchelon(ring, ncols, track=track)
            for k, v in enumerate(self.span):
                ex.insert(_coerce(v, ring), k)
            self.engine = ex

    @property
    def rank(self) -> int:
        return self.engine.rank

    @property
    def is_exact(self) -> bool:
        return isinstance(self.engine, ExactEchelon)

    def normal_form(self) -> List[Tuple[int, dict]]:
        if self.is_exact:
            return self.engine.normal_form()
        return self.engine.rows_sparse()

    def membership(self, target: SparseVec) -> MembershipResult:
        ring = self.ring
        target = _coerce(target, ring)
        if not target:
            return MembershipResult(MEMBER, {})
        eng = self.engine
        if not self.is_exact:
            rem = eng.remainder(target) if ring.tag != "Q" else eng.remainder(_integral(target))
            if not rem:
                return MembershipResult(MEMBER)
            if eng.tail is None:
                # unit pivots only: the lattice is saturated, so no torsion is possible
                return MembershipResult(NOT_MEMBER)
            if ring.tag == "Q":
                return MembershipResult(MEMBER if eng.tail.rational_coords(rem) is not None else NOT_MEMBER)
            if eng.tail.member(rem):
                return MembershipResult(MEMBER)
            if ring.tag != "Z":
                return MembershipResult(NOT_MEMBER)
            coords = eng.tail.rational_coords(rem)
            if coords is None:
                return MembershipResult(NOT_MEMBER)
            return MembershipResult(TORSION, None, _lcm_den(coords))
        rem, coef = eng.reduce(target)
        if not rem:
            coeffs = eng.coeffs_from_row_coef(coef) if self.track else None
            return MembershipResult(MEMBER, coeffs)
        if ring.tag != "Z":
            return MembershipResult(NOT_MEMBER)
        coords = eng.rational_coords(target)
        if coords is None:
            return MembershipResult(NOT_MEMBER)
        k = _lcm_den(coords)
        scaled = {i: k * x for i, x in target.items()}
        rem, coef = eng.reduce(scaled)
        assert not rem
        coeffs = eng.coeffs_from_row_coef(coef) if self.track else None
        return MembershipResult(TORSION, coeffs, k)

    def _tail_has(self, rem: SparseVec) -> bool:
        tail = self.engine.tail
        if tail is None:
            return False
        if self.ring.tag == "Q":
            return tail.rational_coords(rem) is not None
        return tail.member(rem)

    def contains_all(self, vecs: Sequence[SparseVec]):
        """First vector of ``vecs`` not in the span, or None."""
        if not self.is_exact:
            eng = self.engine
            ring = self.ring
            p = ring.p
            for s in range(0, len(vecs), 512):
                chunk = [_coerce(v, ring) for v in vecs[s:s + 512]]
                ints = [_integral(v) for v in chunk] if ring.tag == "Q" else chunk
                try:
                    R = eng.residual(_dense_block(ints, self.ncols, p))
                except _Fallback:
                    for v in chunk:
                        if self.membership(v).verdict != MEMBER:
                            return v
                    continue
                for k in np.flatnonzero(np.any(R != 0, axis=1)):
                    if not self._tail_has(eng._split(R[k])):
                        return chunk[int(k)]
            return None
        for v in vecs:
            v = _coerce(v, self.ring)
            if not self.engine.member(v):
                return v
        return None


# -- public operations ------------------------------------------------------

def _ncols(span, target=None):
    m = -1
    for v in span:
        if v:
            m = max(m, max(v))
    if target:
        m = max(m, max(target))
    return m + 1


def field_membership(span: Sequence[SparseVec], target: SparseVec, ring: Ring = QQ,
                     ncols: Optional[int] = None) -> MembershipResult:
    if not ring.is_field:
        raise ValueError("field_membership needs Q or F_p; use lattice_membership over Z")
    n = ncols if ncols is not None else _ncols(span, target)
    return Echelon(span, ring, n, track=True).membership(target)


def lattice_membership(span: Sequence[SparseVec], target: SparseVec,
                       ncols: Optional[int] = None) -> MembershipResult:
    n = ncols if ncols is not None else _ncols(span, target)
    return Echelon(span, ZZ, n, track=True).membership(target)


def verify_combination(span: Sequence[SparseVec], coeffs: Dict[int, object],
                       target: SparseVec, ring: Ring) -> bool:
    acc: dict = {}
    for k, c in coeffs.items():
        _axpy(acc, c, _coerce(span[k], ring), ring)
    return acc == _coerce(target, ring)


def rank(span: Sequence[SparseVec], ring: Ring = QQ, ncols: Optional[int] = None) -> int:
    span = dedup_span(span, QQ if ring.tag == "Z" else ring)
    if not span:
        return 0
    n = ncols if ncols is not None else _ncols(span)
    return Echelon(span, QQ if ring.tag == "Z" else ring, n).rank


def hnf(span: Sequence[SparseVec], ring: Ring = ZZ, ncols: Optional[int] = None):
    """Canonical normal form rows (pivot column, row) over the given ring."""
    n = ncols if ncols is not None else _ncols(span)
    ex = ExactEchelon(ring, n)
    for v in span:
        ex.insert(_coerce(v, ring))
    return ex.normal_form()


def span_equal(a: Sequence[SparseVec], b: Sequence[SparseVec], ring: Ring,
               ncols: Optional[int] = None, echelons=None) -> SpanComparison:
    """Compare two spans; on inequality return a witness from the larger side."""
    n = ncols if ncols is not None else max(_ncols(a), _ncols(b))
    if echelons is None:
        ea = Echelon(dedup_span(a, ring), ring, n)
        eb = Echelon(dedup_span(b, ring), ring, n)
    else:
        ea, eb = echelons
    if ea.is_exact and eb.is_exact and ring.tag == "Z":
        if ea.normal_form() == eb.normal_form():
            return SpanComparison(EQUAL)
    w = eb.contains_all(a)
    if w is not None:
        return SpanComparison(A_NOT_IN_B, w)
    w = ea.contains_all(b)
    if w is not None:
        return SpanComparison(B_NOT_IN_A, w)
    return SpanComparison(EQUAL)


def smith_invariants(rows: Sequence[SparseVec], ncols: Optional[int] = None) -> List[int]:
    """Nonzero elementary divisors of an integer matrix (small matrices only)."""
    n = ncols if ncols is not None else _ncols(rows)
    M = [[int(r.get(j, 0)) for j in range(n)] for r in rows if r]
    out = []
    while M and any(any(r) for r in M):
        # move a smallest nonzero entry to (0, 0)
        best = min(((abs(x), i, j) for i, r in enumerate(M) for j, x in enumerate(r) if x))
        _, i, j = best
        M[0], M[i] = M[i], M[0]
        for r in M:
            r[0], r[j] = r[j], r[0]
        p = M[0][0]
        clean = True
        for i in range(1, len(M)):
            q = M[i][0] // p
            if q:
                M[i] = [x - q * y for x, y in zip(M[i], M[0])]
            if M[i][0]:
                clean = False
        for j in range(1, len(M[0])):
            q = M[0][j] // p
            if q:
                for r in M:
                    r[j] -= q * r[0]
            if M[0][j]:
                clean = False
        if not clean:
            continue
        if any(x % p for r in M[1:] for x in r[1:]):
            for j in range(1, len(M[0])):
                if any(r[j] % p for r in M[1:]):
                    bad = next(i for i in range(1, len(M)) if M[i][j] % p)
                    M[0] = [x + y for x, y in zip(M[0], M[bad])]
                    break
            continue
        out.append(abs(p))
        M = [r[1:] for r in M[1:]]
    return out


# -- disk cache --------------------------------------------------------------

def cache_path(cache_dir: str, spec: str, d: MultiDegree, ring: Ring) -> str:
    tag = "_".join(f"{k}-{m}" for k, m in MultiDegree(d))
    return os.path.join(cache_dir, f"{spec}__{tag}__{ring.name}.txt")


def save_echelon(path: str, ech: "Echelon"):
    """Store an echelon form: unit-pivot rows first (pivot list in the header), then the rest."""
    eng = ech.engine
    if isinstance(eng, DenseEchelon):
        units = [{int(j): int(eng.E[k, j]) for j in np.flatnonzero(eng.E[k])} for k in range(len(eng.pivots))]
        pivots = list(eng.pivots)
        rest = [r for _, r in sorted(eng.tail.rows.items())] if eng.tail is not None else []
        base = eng.ring
    else:
        units, pivots, base = [], [], eng.ring
        rest = [r for _, r in sorted(eng.rows.items())]
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"# ring={ech.ring.name} base={base.name} rows={len(units) + len(rest)} "
                 f"cols={ech.ncols} units={len(units)}\n")
        fh.write("# pivots=" + ",".join(map(str, pivots)) + "\n")
        for r, row in enumerate(units + rest):
            for j in sorted(row):
                fh.write(f"{r} {j} {row[j]}\n")
    os.replace(tmp, path)


def load_echelon(path: str) -> "Echelon":
    with open(path) as fh:
        meta = dict(kv.split("=") for kv in fh.readline().split()[1:])
        piv_line = fh.readline().strip()[len("# pivots="):]
        rows = [dict() for _ in range(int(meta["rows"]))]
        for line in fh:
            r, j, x = line.split()
            x = Fraction(x)
            rows[int(r)][int(j)] = x.numerator if x.denominator == 1 else x
    ring, base = Ring.from_name(meta["ring"]), Ring.from_name(meta["base"])
    ncols, nunits = int(meta["cols"]), int(meta["units"])
    ech = Echelon.__new__(Echelon)
    ech.ring, ech.ncols, ech.span, ech.track = ring, ncols, [], False
    if nunits or base.name != ring.name:
        de = DenseEchelon(base, ncols)
        de.pivots = [int(c) for c in piv_line.split(",")] if piv_line else []
        de.E = _dense_block(rows[:nunits], ncols, base.p) if nunits else np.zeros((0, ncols), dtype=np.int64)
        if len(rows) > nunits:
            de.tail = ExactEchelon(base, ncols)
            for r in rows[nunits:]:
                de.tail.rows[min(r)] = r
        ech.engine = de
        ech.saturated = base.tag == "Z" and de.tail is None
    else:
        ex = ExactEchelon(ring, ncols)
        for r in rows:
            ex.rows[min(r)] = r
        ech.engine = ex
        ech.saturated = None
    return ech
