"""Constructive reduction of the eight inductive forms to literal generators.

Every form instance with word arguments is rewritten, by splitting one
argument ``a = p*q`` (``q`` the last letter), into a sum of *pieces*.  A piece
is a coefficient times a product of factors:

``('w', word)``                 a word
``('c', (w1, ..., wk))``         left-normed commutator of words, k >= 2
``('l', tree)``                 Lie tree; nodes ``('n', A, B)``, leaves are words
``('q', (b1, b2, b3, b4))``      the block ``[b1,b2][b3,b4] + [b1,b3][b2,b4]``
``('f', form, args, tail)``      ``[form(args), t1, ..., tk]``

The split rules live in :data:`CASES`; each one is an exact identity, checked
at fresh variables by :func:`split_identity` / the identity catalog.  Pieces
are then certified by :meth:`Reducer.cert_piece`, which recognises form
instances and long Lie elements directly and handles products of two
commutators of length >= 3 by moving them together.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .freealg import ZZ, Poly, Word, left_normed
from .generators import family_poly, instance_terms
from .textfmt import format_poly, parse_poly

FORMS = {
    # name: (family, arity, rank); same-degree calls must strictly lower the rank
    "COMM5": ("F1", 5, 6),
    "P42": ("F4", 6, 5),
    "P33": ("F2", 6, 4),
    "C2211": ("F6", 6, 3),
    "P43": ("F3", 7, 2),
    "P2212": ("F7", 7, 2),
    "P322": ("F5", 7, 1),
    "P2222": ("F8", 8, 0),
}
FAMILY_FORM = {fam: name for name, (fam, _, _) in FORMS.items()}


class ReductionError(RuntimeError):
    pass


# -- factor and piece builders --------------------------------------------

def W(w: Word):
    return ("w", tuple(w))


def Cm(*ws):
    ws = tuple(tuple(w) for w in ws)
    return ("c", ws) if len(ws) > 1 else ("w", ws[0])


def Qf(*b):
    return ("q", tuple(tuple(x) for x in b))


def Fm(form, *args, tail=()):
    return ("f", form, tuple(tuple(a) for a in args), tuple(tuple(t) for t in tail))


def _tree(f):
    if f[0] == "w":
        return f[1]
    if f[0] == "c":
        t = f[1][0]
        for s in f[1][1:]:
            t = ("n", t, s)
        return t
    if f[0] == "l":
        return f[1]
    raise ValueError(f"factor {f[0]} is not a Lie element")


def Lie(a, b):
    """Bracket of two Lie factors (words, commutators or trees)."""
    if a[0] in ("w", "c") and b[0] == "w":
        seq = (a[1],) if a[0] == "w" else a[1]
        return ("c", seq + (b[1],))
    return ("l", ("n", _tree(a), _tree(b)))


def lie_leaves(t) -> int:
    if isinstance(t, tuple) and t and t[0] == "n":
        return lie_leaves(t[1]) + lie_leaves(t[2])
    return 1


def lnorm(t) -> List[Tuple[int, Tuple[Word, ...]]]:
    """Expand a Lie tree into left-normed commutators of its leaves."""
    if not (t and t[0] == "n"):
        return [(1, (t,))]
    a, b = t[1], t[2]
    if not (b and b[0] == "n"):
        return [(c, s + (b,)) for c, s in lnorm(a)]
    # [A,[B1,B2]] = [[A,B1],B2] - [[A,B2],B1]
    return lnorm(("n", ("n", a, b[1]), b[2])) + [(-c, s) for c, s in lnorm(("n", ("n", a, b[2]), b[1]))]


def P(c, *factors):
    return [(c, tuple(factors))]


def neg(pl):
    return [(-c, f) for c, f in pl]


def mul(*pls):
    out = [(1, ())]
    for pl in pls:
        out = [(c1 * c2, f1 + f2) for c1, f1 in out for c2, f2 in pl]
    return out


def qpieces(b):
    b1, b2, b3, b4 = b
    return P(1, Cm(b1, b2), Cm(b3, b4)) + P(1, Cm(b1, b3), Cm(b2, b4))


def bracket_product(factors, v):
    """[X1 ... Xk, v] by the Leibniz rule; Q blocks are expanded first."""
    for k, f in enumerate(factors):
        if f[0] == "q":
            out = []
            for c, fs in qpieces(f[1]):
                for c2, fs2 in bracket_product(factors[:k] + fs + factors[k + 1:], v):
                    out.append((c * c2, fs2))
            return out
    out = []
    for k, f in enumerate(factors):
        out.append((1, factors[:k] + (Lie(f, v),) + factors[k + 1:]))
    return out


def bracket_q(b, v):
    return bracket_product((Qf(*b),), v)


# -- values -----------------------------------------------------------------

@lru_cache(maxsize=200_000)
def factor_value(f) -> Poly:
    kind = f[0]
    if kind == "w":
        return Poly.word(f[1])
    if kind in ("c", "l"):
        return _tree_value(_tree(f))
    if kind == "q":
        b = [Poly.word(x) for x in f[1]]
        return family_poly("T3B", b)
    if kind == "f":
        fam = FORMS[f[1]][0]
        base = Poly(instance_terms(fam, f[2]), ZZ)
        return left_normed([base] + [Poly.word(t) for t in f[3]])
    raise ValueError(kind)


def _tree_value(t) -> Poly:
    if t and t[0] == "n":
        a, b = _tree_value(t[1]), _tree_value(t[2])
        return a * b - b * a
    return Poly.word(t)


def piece_value(piece) -> Poly:
    c, fs = piece
    acc = Poly.const(c)
    for f in fs:
        acc = acc * factor_value(f)
    return acc


def pieces_value(pl) -> Poly:
    acc: Dict[Word, int] = {}
    for pc in pl:
        for w, c in piece_value(pc).terms.items():
            acc[w] = acc.get(w, 0) + c
    return Poly(acc)


def form_value(form: str, args: Sequence[Word]) -> Poly:
    return Poly(instance_terms(FORMS[form][0], [tuple(a) for a in args]), ZZ)


# -- split rules ------------------------------------------------------------

def _pq(a):
    return a[:-1], a[-1:]


def _swap(args, i, j):
    a = list(args)
    a[i - 1], a[j - 1] = a[j - 1], a[i - 1]
    return tuple(a)


# COMM5 = [a1,a2,a3,a4,a5]

def _comm5_5(a):
    a1, a2, a3, a4, a5 = a
    p, q = _pq(a5)
    return P(1, W(p), Fm("COMM5", a1, a2, a3, a4, q)) + P(1, Fm("COMM5", a1, a2, a3, a4, p), W(q))


def _comm5_4(a):
    a1, a2, a3, a4, a5 = a
    p, q = _pq(a4)
    return (P(1, W(p), Fm("COMM5", a1, a2, a3, q, a5))
            + P(1, Fm("P42", a1, a2, a3, q, p, a5))
            + P(-1, Lie(Cm(a1, a2, a3, q), Cm(p, a5)))
            + P(1, Fm("COMM5", a1, a2, a3, p, a5), W(q)))


def _comm5_3(a):
    a1, a2, a3, a4, a5 = a
    p, q = _pq(a3)
    return (P(1, W(p), Fm("COMM5", a1, a2, q, a4, a5))
            + P(1, Fm("COMM5", a1, a2, p, a4, a5), W(q))
            + P(1, Fm("P33", p, a4, a5, a1, a2, q))
            + P(1, Fm("P33", a1, a2, p, q, a4, a5))
            + P(-1, Fm("P42", a1, a2, p, a4, a5, q))
            + P(-1, Fm("P42", a1, a2, q, a4, a5, p))
            + P(-1, Lie(Cm(a1, a2, q, a4), Cm(p, a5)))
            + P(-1, Lie(Cm(a1, a2, q, a5), Cm(p, a4))))


def _comm5_2(a):
    a1, a2, a3, a4, a5 = a
    p, q = _pq(a2)
    return (P(1, W(p), Fm("COMM5", a1, q, a3, a4, a5))
            + P(1, Fm("COMM5", a1, p, a3, a4, a5), W(q))
            + P(1, Fm("P33", p, a4, a5, a1, q, a3))
            + P(1, Fm("P33", a1, p, a3, q, a4, a5))
            + P(-1, Fm("P42", a1, p, a3, a4, a5, q))
            + P(-1, Fm("P42", a1, q, a3, a4, a5, p))
            + P(-1, Lie(Cm(a1, q, a3, a4), Cm(p, a5)))
            + P(-1, Lie(Cm(a1, q, a3, a5), Cm(p, a4)))
            + P(1, Fm("C2211", p, a3, a1, q, a4, a5)))


def _comm5_1(a):
    return neg(_comm5_2(_swap(a, 1, 2)))


# P42 = [a1,a2,a3,a4][a5,a6] + [a1,a2,a3,a5][a4,a6]

def _p42_6(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a6)
    return (P(1, W(p), Fm("P42", a1, a2, a3, a4, a5, q))
            + P(1, Fm("P42", a1, a2, a3, a4, a5, p), W(q))
            + P(1, Fm("COMM5", a1, a2, a3, a4, p), Cm(a5, q))
            + P(1, Fm("COMM5", a1, a2, a3, a5, p), Cm(a4, q)))


def _p42_5(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a5)
    return (P(1, W(p), Fm("P42", a1, a2, a3, a4, q, a6))
            + P(1, Fm("P42", a1, a2, a3, a4, p, a6), W(q))
            + P(1, Fm("COMM5", a1, a2, a3, a4, p), Cm(q, a6))
            + P(-1, Fm("P43", a1, a2, a3, p, a4, a6, q)))


def _p42_4(a):
    return _p42_5(_swap(a, 4, 5))


def _p42_3(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a3)
    return (P(1, W(p), Fm("P42", a1, a2, q, a4, a5, a6))
            + P(1, W(q), Fm("P42", a1, a2, p, a4, a5, a6))
            + P(1, Fm("P322", a1, a2, q, p, a4, a5, a6))
            + P(1, Fm("P322", a1, a2, p, q, a4, a5, a6))
            + P(1, Lie(Cm(p, a4), Cm(a1, a2, q)), Cm(a5, a6))
            + P(1, Lie(Cm(p, a5), Cm(a1, a2, q)), Cm(a4, a6))
            + P(1, Fm("COMM5", a1, a2, p, a4, q), Cm(a5, a6))
            + P(1, Fm("COMM5", a1, a2, p, a5, q), Cm(a4, a6)))


def _p42_2(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a2)
    return (P(1, W(p), Fm("P42", a1, q, a3, a4, a5, a6))
            + P(1, W(q), Fm("P42", a1, p, a3, a4, a5, a6))
            + P(1, Fm("COMM5", a1, p, a3, a4, q), Cm(a5, a6))
            + P(1, Fm("COMM5", a1, p, a3, a5, q), Cm(a4, a6))
            + P(1, Fm("P322", a1, q, a3, p, a4, a5, a6))
            + P(1, Fm("P322", a1, p, a3, q, a4, a5, a6))
            + P(1, Lie(Cm(p, a4), Cm(a1, q, a3)), Cm(a5, a6))
            + P(1, Lie(Cm(p, a5), Cm(a1, q, a3)), Cm(a4, a6))
            + P(1, Fm("P2212", p, a3, a1, q, a4, a5, a6)))


def _p42_1(a):
    return neg(_p42_2(_swap(a, 1, 2)))


# P33 = [a1,a2,a3][a4,a5,a6]

def _p33_6(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a6)
    return (P(1, W(p), Fm("P33", a1, a2, a3, a4, a5, q))
            + P(1, Fm("P33", a1, a2, a3, a4, a5, p), W(q))
            + P(1, Fm("P43", a1, a2, a3, p, a4, a5, q)))


def _p33_5(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a5)
    return (P(1, W(p), Fm("P33", a1, a2, a3, a4, q, a6))
            + P(1, Fm("P43", a1, a2, a3, p, a4, q, a6))
            + P(1, Fm("P33", a1, a2, a3, a4, p, a6), W(q))
            + P(1, Fm("P322", a1, a2, a3, p, a6, a4, q)))


def _p33_4(a):
    return neg(_p33_5(_swap(a, 4, 5)))


def _p33_block(a, i):
    a1, a2, a3, a4, a5, a6 = a
    b = (a4, a5, a6, a1, a2, a3)
    return _P33[i + 3](b) + P(1, Lie(Cm(a1, a2, a3), Cm(a4, a5, a6)))


# Q transports: move a composite slot of Q(b1..b4) to slot 4.
# Returns (new b, [(sign, Lie tree factor)]) with Q(b) = Q(new b) + sum sign*tree.

def _q_to_4(b, i):
    a, bb, c, d = b
    if i == 4:
        return b, []
    if i == 1:
        return (d, bb, c, a), [(1, Lie(Cm(a, bb), Cm(c, d))), (1, Lie(Cm(a, c), Cm(bb, d)))]
    if i == 2:
        return _q_to_4((a, c, bb, d), 3)
    # i == 3: Q(a,b,c,d) = Q(c,a,d,b) + [[a,b],[c,d]]
    nb, extra = _q_to_4((c, a, d, bb), 1)
    return nb, [(1, Lie(Cm(a, bb), Cm(c, d)))] + extra


# C2211 = [Q(a1..a4), a5, a6]

def _c2211_6(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a6)
    return P(1, W(p), Fm("C2211", a1, a2, a3, a4, a5, q)) + P(1, Fm("C2211", a1, a2, a3, a4, a5, p), W(q))


def _c2211_5(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a5)
    b = (a1, a2, a3, a4)
    return (P(1, W(p), Fm("C2211", *b, q, a6))
            + P(1, Fm("C2211", *b, p, a6), W(q))
            + P(1, Fm("P2212", *b, p, q, a6))
            # [[p,a6],[Q,q]] = -[[Q,q,p],a6] + [[Q,q,a6],p]
            + P(-1, Fm("C2211", *b, q, p, tail=(a6,)))
            + P(1, Fm("C2211", *b, q, a6, tail=(p,))))


def _c2211_4(a):
    a1, a2, a3, a4, a5, a6 = a
    p, q = _pq(a4)
    bq = (a1, a2, a3, q)
    bp = (a1, a2, a3, p)
    out = (P(1, W(p), Fm("C2211", *bq, a5, a6))
           + P(1, Fm("P322", p, a5, a6, *bq))
           + P(-1, Fm("P2212", *bq, a5, a6, p))
           + P(1, Fm("C2211", *bp, a5, a6), W(q))
           + P(-1, Fm("P2212", *bp, a5, a6, q))
           + P(1, Fm("P322", q, a5, a6, *bp))
           + bracket_q(bp, Cm(q, a5, a6)))
    # [[p,a6],[Q(q),a5]] + [[p,a5],[Q(q),a6]]
    for x, y in ((a6, a5), (a5, a6)):
        out += P(-1, Fm("C2211", *bq, y, p, tail=(x,))) + P(1, Fm("C2211", *bq, y, x, tail=(p,)))
    # [W, a5, a6] with W = [a1,a2,p][a3,q] + [a1,a3,p][a2,q]
    for u, v in (((a1, a2, p), (a3, q)), ((a1, a3, p), (a2, q))):
        for c, fs in bracket_product((Cm(*u), Cm(*v)), W(a5)):
            for c2, fs2 in bracket_product(fs, W(a6)):
                out.append((c * c2, fs2))
    return out


def _c2211_q(a, i):
    b, extra = _q_to_4(a[:4], i)
    out = _c2211_4(b + a[4:])
    for s, t in extra:
        out += P(s, Lie(Lie(t, W(a[4])), W(a[5])))
    return out


# P43 = [a1,a2,a3,a4][a5,a6,a7]

def _r4_times_q(r3, x, qb):
    """[r3..., x] * Q(qb) with r3 a 3-commutator argument list."""
    return (P(1, Fm("P322", *r3, *qb), W(x))
            + P(-1, W(x), Fm("P322", *r3, *qb))
            + neg(mul(P(1, Cm(*r3)), bracket_q(qb, W(x)))))


def _p43_7(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a7)
    return (P(1, W(p), Fm("P43", a1, a2, a3, a4, a5, a6, q))
            + P(1, Fm("P43", a1, a2, a3, a4, a5, a6, p), W(q))
            + P(1, Fm("COMM5", a1, a2, a3, a4, p), Cm(a5, a6, q)))


def _p43_6(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a6)
    return (P(1, W(p), Fm("P43", a1, a2, a3, a4, a5, q, a7))
            + P(1, Fm("COMM5", a1, a2, a3, a4, p), Cm(a5, q, a7))
            + P(1, Fm("P43", a1, a2, a3, a4, a5, p, a7), W(q))
            + _r4_times_q((a1, a2, a3), a4, (p, a7, a5, q)))


def _p43_5(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a5)
    return (P(1, W(p), Fm("P43", a1, a2, a3, a4, q, a6, a7))
            + P(1, Fm("COMM5", a1, a2, a3, a4, p), Cm(q, a6, a7))
            + neg(_r4_times_q((a1, a2, a3), a4, (p, a7, a6, q)))
            + P(1, Fm("P43", a1, a2, a3, a4, p, a6, a7), W(q)))


def _p43_4(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a4)
    return (P(1, W(p), Fm("P43", a1, a2, a3, q, a5, a6, a7))
            + P(1, Fm("P43", a1, a2, a3, p, a5, a6, a7), W(q))
            + P(-1, Cm(a1, a2, a3, p), Cm(a5, a6, a7, q)))


def _p43_left(a, i):
    """Composite argument inside the 4-commutator at position 2 or 3: Leibniz expansion."""
    a1, a2, a3, a4, a5, a6, a7 = a
    seq = (a1, a2, a3, a4)
    p, q = _pq(seq[i - 1])
    out = []
    for c, fs in split_comm(seq, i):
        out.append((c, fs + (Cm(a5, a6, a7),)))
    # split_comm yields p*[..q..] first and [..p..]*q last; rewrite them as form calls
    lead = [(c, fs) for c, fs in out if fs[0] == W(p) and len(fs) == 3 and fs[1][0] == "c" and len(fs[1][1]) == 4]
    tail = [(c, fs) for c, fs in out if len(fs) == 3 and fs[1] == W(q) and fs[0][0] == "c" and len(fs[0][1]) == 4]
    rest = [x for x in out if x not in lead and x not in tail]
    res = []
    for c, fs in lead:
        res += P(c, W(p), Fm("P43", *fs[1][1], a5, a6, a7))
    for c, fs in tail:
        # [..p..] q B = [..p..] B q - [..p..][B, q]
        res += P(c, Fm("P43", *fs[0][1], a5, a6, a7), W(q))
        res += P(-c, fs[0], Cm(a5, a6, a7, q))
    return res + rest


def _p43_1(a):
    return neg(_P43[2](_swap(a, 1, 2)))


# P2212 = [Q,a5][a6,a7] + [Q,a6][a5,a7], Q = Q(a1..a4)

def _p2212_7(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a7)
    b = (a1, a2, a3, a4)
    return (P(1, W(p), Fm("P2212", *b, a5, a6, q))
            + P(1, Fm("P2212", *b, a5, a6, p), W(q))
            + P(1, Fm("C2211", *b, a5, p), Cm(a6, q))
            + P(1, Fm("C2211", *b, a6, p), Cm(a5, q)))


def _p2212_5(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a5)
    b = (a1, a2, a3, a4)
    return (P(1, W(p), Fm("P2212", *b, q, a6, a7))
            + P(1, Fm("P2212", *b, p, a6, a7), W(q))
            + neg(mul(bracket_q(b, W(p)), P(1, Cm(a6, a7, q))))
            + P(1, Fm("C2211", *b, a6, p), Cm(q, a7)))


def _p2212_6(a):
    return _p2212_5(_swap(a, 5, 6))


def _p2212_4(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a4)
    bq = (a1, a2, a3, q)
    bp = (a1, a2, a3, p)
    out = (P(1, W(p), Fm("P2212", *bq, a5, a6, a7))
           + P(1, Fm("P2222", *bq, p, a5, a6, a7))
           + P(1, Fm("P2222", *bp, q, a5, a6, a7))
           + P(1, Fm("P2212", *bp, a5, a6, a7), W(q)))
    for x, y in ((a5, a6), (a6, a5)):
        # [[p,x],Q(q)] = -[Q(q),p,x] + [Q(q),x,p]
        out += P(-1, Fm("C2211", *bq, p, x), Cm(y, a7)) + P(1, Fm("C2211", *bq, x, p), Cm(y, a7))
        out += neg(mul(bracket_q(bp, W(x)), P(1, Cm(y, a7, q))))
    for u, v in (((a1, a2, p), (a3, q)), ((a1, a3, p), (a2, q))):
        # [[u][v], x][y,a7] = [u][v,x][y,a7] + [u,x][v][y,a7]
        for x, y in ((a5, a6), (a6, a5)):
            out += P(1, Cm(*u), Cm(*v, x), Cm(y, a7))
            # [u,x][v][y,a7] = [u,x][y,a7][v] + [u,x][[v],[y,a7]]
            out += P(1, Cm(*u, x), Lie(Cm(*v), Cm(y, a7)))
        out += P(1, Fm("P42", *u, a5, a6, a7), Cm(*v))
    return out


def _p2212_q(a, i):
    b, extra = _q_to_4(a[:4], i)
    a5, a6, a7 = a[4:]
    out = _p2212_4(b + a[4:])
    for s, t in extra:
        out += P(s, Lie(t, W(a5)), Cm(a6, a7)) + P(s, Lie(t, W(a6)), Cm(a5, a7))
    return out


# P322 = [a1,a2,a3] Q(a4..a7)

def _p322_1(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a1)
    b = (a4, a5, a6, a7)
    return (P(1, W(p), Fm("P322", q, a2, a3, *b))
            + P(-1, Fm("P2222", p, a3, a2, q, *b))
            + P(1, Fm("P322", p, a2, a3, *b), W(q))
            + neg(mul(P(1, Cm(p, a2, a3)), bracket_q(b, W(q)))))


def _p322_2(a):
    return neg(_p322_1(_swap(a, 1, 2)))


def _p322_3(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a3)
    b = (a4, a5, a6, a7)
    return (P(1, W(p), Fm("P322", a1, a2, q, *b))
            + P(1, Fm("P322", a1, a2, p, *b), W(q))
            + neg(mul(P(1, Cm(a1, a2, p)), bracket_q(b, W(q)))))


def _p322_7(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a7)
    r3 = Cm(a1, a2, a3)
    return (P(1, Fm("P322", a1, a2, a3, a4, a5, a6, q), W(p))
            + neg(mul(P(1, r3), bracket_q((a4, a5, a6, q), W(p))))
            + P(1, Fm("P322", a1, a2, a3, a4, a5, a6, p), W(q))
            + P(1, r3, Cm(a4, a5, p), Cm(a6, q))
            + P(1, r3, Cm(a4, a6, p), Cm(a5, q)))


def _p322_5(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a5)
    r3 = Cm(a1, a2, a3)
    return (P(1, Fm("P322", a1, a2, a3, a4, q, a6, a7), W(p))
            + neg(mul(P(1, r3), bracket_q((a4, q, a6, a7), W(p))))
            + P(1, Fm("P322", a1, a2, a3, a4, p, a6, a7), W(q))
            + P(-1, r3, Cm(a4, p), Cm(a6, a7, q))
            + P(1, r3, Cm(a4, a6, p), Cm(q, a7)))


def _p322_6(a):
    return _p322_5(_swap(a, 5, 6))


def _p322_4(a):
    a1, a2, a3, a4, a5, a6, a7 = a
    p, q = _pq(a4)
    r3 = Cm(a1, a2, a3)
    return (P(1, Fm("P322", a1, a2, a3, q, a5, a6, a7), W(p))
            + neg(mul(P(1, r3), bracket_q((q, a5, a6, a7), W(p))))
            + P(1, Fm("P322", a1, a2, a3, p, a5, a6, a7), W(q))
            + P(-1, r3, Cm(p, a5), Cm(a6, a7, q))
            + P(-1, r3, Cm(p, a6), Cm(a5, a7, q)))


# P2222 = Q(a1..a4) Q(a5..a8)

def _q_comm_bracket(b, k, l):
    """[Q(b), [k,l]] = [Q(b),k,l] - [Q(b),l,k]."""
    return P(1, Fm("C2211", *b, k, l)) + P(-1, Fm("C2211", *b, l, k))


def _qq_bracket(b1, b2):
    """[Q(b1), Q(b2)] through lower-degree C2211 instances."""
    a5, a6, a7, a8 = b2
    out = []
    for x, y in (((a5, a6), (a7, a8)), ((a5, a7), (a6, a8))):
        out += mul(P(1, Cm(*x)), _q_comm_bracket(b1, *y))
        out += mul(_q_comm_bracket(b1, *x), P(1, Cm(*y)))
    return out


def _move_front(before, c, after):
    """before * c * after = c * before * after + sum of bracket corrections."""
    out = P(1, c, *before, *after)
    for k in range(len(before)):
        for s, fs in bracket_product((before[k],), c):
            out.append((s, before[:k] + fs + before[k + 1:] + after))
    return out


def _p2222_8(a):
    b1 = a[:4]
    a5, a6, a7, a8 = a[4:]
    p, q = _pq(a8)
    out = (P(1, Fm("P2222", *b1, a5, a6, a7, p), W(q))
           + P(1, Fm("P2222", *b1, a5, a6, a7, q), W(p)))
    for x, y in (((a5, a6), (a7, q, p)), ((a5, a7), (a6, q, p))):
        out += neg(_cert_q_2_3(b1, x, y))
    return out


def _cert_q_2_3(b1, two, three):
    """Q(b1) [two] [three], moving the 3-commutator to the front."""
    out = []
    for s, fs in _move_front((Qf(*b1), Cm(*two)), Cm(*three), ()):
        if fs[0] == Cm(*three) and fs[1] == Qf(*b1):
            out += P(s, Fm("P322", *three, *b1), *fs[2:])
        else:
            out.append((s, fs))
    return out


def _cert_q_3_2(b1, three, two):
    out = []
    for s, fs in _move_front((Qf(*b1),), Cm(*three), (Cm(*two),)):
        if fs[0] == Cm(*three) and fs[1] == Qf(*b1):
            out += P(s, Fm("P322", *three, *b1), *fs[2:])
        else:
            out.append((s, fs))
    return out


def _c_2_q(three, two, b2):
    """[three] [two] Q(b2) = P322(three, b2) [two] - [three] [Q(b2), [two]]."""
    return P(1, Fm("P322", *three, *b2), Cm(*two)) + neg(mul(P(1, Cm(*three)), _q_comm_bracket(b2, *two)))


def _p2222_1(a):
    a1, a2, a3, a4 = a[:4]
    b2 = a[4:]
    p, q = _pq(a1)
    return (P(1, W(p), Fm("P2222", q, a2, a3, a4, *b2))
            + P(1, W(q), Fm("P2222", p, a2, a3, a4, *b2))
            + _c_2_q((p, a2, q), (a3, a4), b2)
            + _c_2_q((p, a3, q), (a2, a4), b2))


def _p2222_7(a):
    b1 = a[:4]
    a5, a6, a7, a8 = a[4:]
    p, q = _pq(a7)
    return (P(1, Fm("P2222", *b1, a5, a6, q, a8), W(p))
            + P(1, Fm("P2222", *b1, a5, a6, p, a8), W(q))
            + neg(_cert_q_2_3(b1, (a5, a6), (q, a8, p)))
            + neg(_cert_q_2_3(b1, (a5, q), (a6, a8, p)))
            + neg(_cert_q_2_3(b1, (a5, p), (a6, a8, q)))
            + neg(_cert_q_3_2(b1, (a5, q, p), (a6, a8))))


def _p2222_6(a):
    return _p2222_7(_swap(a, 6, 7))


def _p2222_block(a, i):
    b = a[4:] + a[:4]
    return _P2222[i + 4 if i <= 4 else i - 4](b) + _qq_bracket(a[:4], a[4:])


# -- generic Leibniz split of one commutator -------------------------------

def split_comm(seq, i):
    """Pieces of [s1..sk] with s_i = p*q, expanded into words and commutators."""
    seq = tuple(tuple(s) for s in seq)
    p, q = _pq(seq[i - 1])
    if i == 1:
        cur = [(1, (W(p), W(q)))]
    else:
        cur = [(1, (Cm(*seq[:i - 1]),))]
        cur = [(1, (W(p), Lie(cur[0][1][0], W(q))))] + [(1, (Lie(cur[0][1][0], W(p)), W(q)))]
    for s in seq[i:]:
        nxt = []
        for c, fs in cur:
            for c2, fs2 in bracket_product(fs, W(s)):
                nxt.append((c * c2, fs2))
        cur = nxt
    return cur


_COMM5 = {1: _comm5_1, 2: _comm5_2, 3: _comm5_3, 4: _comm5_4, 5: _comm5_5}
_P42 = {1: _p42_1, 2: _p42_2, 3: _p42_3, 4: _p42_4, 5: _p42_5, 6: _p42_6}
_P33 = {1: lambda a: _p33_block(a, 1), 2: lambda a: _p33_block(a, 2), 3: lambda a: _p33_block(a, 3),
        4: _p33_4, 5: _p33_5, 6: _p33_6}
_C2211 = {1: lambda a: _c2211_q(a, 1), 2: lambda a: _c2211_q(a, 2), 3: lambda a: _c2211_q(a, 3),
          4: _c2211_4, 5: _c2211_5, 6: _c2211_6}
_P43 = {1: _p43_1, 2: lambda a: _p43_left(a, 2), 3: lambda a: _p43_left(a, 3),
        4: _p43_4, 5: _p43_5, 6: _p43_6, 7: _p43_7}
_P2212 = {1: lambda a: _p2212_q(a, 1), 2: lambda a: _p2212_q(a, 2), 3: lambda a: _p2212_q(a, 3),
          4: _p2212_4, 5: _p2212_5, 6: _p2212_6, 7: _p2212_7}
_P322 = {1: _p322_1, 2: _p322_2, 3: _p322_3, 4: _p322_4, 5: _p322_5, 6: _p322_6, 7: _p322_7}
_P2222 = {1: _p2222_1, 2: lambda a: _p2222_block(a, 2), 3: lambda a: _p2222_block(a, 3),
          4: lambda a: _p2222_block(a, 4), 5: lambda a: _p2222_block(a, 5),
          6: _p2222_6, 7: _p2222_7, 8: _p2222_8}

CASES = {"COMM5": _COMM5, "P42": _P42, "P33": _P33, "C2211": _C2211,
         "P43": _P43, "P2212": _P2212, "P322": _P322, "P2222": _P2222}

SPLIT_ORDER = {
    "COMM5": (5, 4, 3, 2, 1),
    "P42": (6, 5, 4, 3, 2, 1),
    "P33": (6, 5, 4, 3, 2, 1),
    "C2211": (6, 5, 4, 3, 2, 1),
    "P43": (7, 6, 5, 4, 3, 2, 1),
    "P2212": (7, 5, 6, 4, 3, 2, 1),
    "P322": (7, 5, 6, 4, 3, 1, 2),
    "P2222": (8, 1, 7, 6, 2, 3, 4, 5),
}


def split_identity(form: str, pos: int):
    """The rule for splitting position ``pos`` at fresh variables: (args, pieces)."""
    k = FORMS[form][1]
    args = tuple((j,) if j != pos else (j, k + 1) for j in range(1, k + 1))
    return args, CASES[form][pos](args)


# -- certificates -----------------------------------------------------------

Term = Tuple[Word, str, Tuple[int, ...], Word]  # (left, family, vars, right)


@dataclass
class Certificate:
    target: Poly
    terms: List[Tuple[int, Word, str, Tuple[int, ...], Word]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "target": format_poly(self.target),
            "terms": [{"coeff": str(c), "left": ".".join(f"x{k}" for k in l), "family": fam,
                       "vars": [f"x{k}" for k in vs], "right": ".".join(f"x{k}" for k in r)}
                      for c, l, fam, vs, r in self.terms],
        }, indent=None, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)

        def word(s):
            return tuple(int(t[1:]) for t in s.split(".")) if s else ()

        terms = [(int(t["coeff"]), word(t["left"]), t["family"], tuple(int(v[1:]) for v in t["vars"]),
                  word(t["right"])) for t in data["terms"]]
        return cls(parse_poly(data["target"], ZZ), terms)


@dataclass
class VerifyResult:
    ok: bool
    residual: Poly

    def __bool__(self):
        return self.ok


def expand_certificate(c: Certificate) -> Poly:
    acc: Dict[Word, int] = {}
    for coeff, left, fam, vs, right in c.terms:
        for w, x in instance_terms(fam, [(v,) for v in vs]).items():
            key = left + w + right
            acc[key] = acc.get(key, 0) + coeff * x
    return Poly(acc, ZZ)


def verify_certificate(c: Certificate) -> VerifyResult:
    for _, _, fam, vs, _ in c.terms:
        if fam not in FAMILY_FORM:
            return VerifyResult(False, c.target)
    res = c.target - expand_certificate(c)
    return VerifyResult(not res, res)


def _add(acc: Dict[Term, int], terms: Dict[Term, int], c: int = 1, left: Word = (), right: Word = ()):
    for (l, fam, vs, r), x in terms.items():
        key = (left + l, fam, vs, r + right)
        y = acc.get(key, 0) + c * x
        if y:
            acc[key] = y
        else:
            acc.pop(key, None)


def _mul_poly(terms: Dict[Term, int], lp: Optional[Poly], rp: Optional[Poly], c: int = 1) -> Dict[Term, int]:
    out: Dict[Term, int] = {}
    lt = lp.terms.items() if lp is not None else [((), 1)]
    rt = list(rp.terms.items()) if rp is not None else [((), 1)]
    for lw, lc in lt:
        for rw, rc in rt:
            _add(out, terms, c * lc * rc, lw, rw)
    return out


def _product(fs) -> Optional[Poly]:
    if not fs:
        return None
    acc = factor_value(fs[0])
    for f in fs[1:]:
        acc = acc * factor_value(f)
    return acc


class Reducer:
    """Certifies form instances; results are memoized per (form, args)."""

    def __init__(self, check_measure: bool = True):
        self.memo: Dict[Tuple[str, Tuple[Word, ...]], Dict[Term, int]] = {}
        self.check_measure = check_measure
        self._stack: List[Tuple[int, int]] = []

    # forms
    def reduce_terms(self, form: str, args: Sequence[Word]) -> Dict[Term, int]:
        if form not in FORMS:
            raise ValueError(f"unknown form {form!r}")
        fam, arity, rank = FORMS[form]
        args = tuple(tuple(a) for a in args)
        if len(args) != arity:
            raise ValueError(f"{form} takes {arity} arguments, got {len(args)}")
        if any(len(a) == 0 for a in args):
            raise ValueError("form arguments must be non-empty words")
        key = (form, args)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        deg = sum(len(a) for a in args)
        if self.check_measure and self._stack:
            top = self._stack[-1]
            if not (deg, rank) < top:
                raise ReductionError(f"measure does not decrease: {form} degree {deg} rank {rank} under {top}")
        if all(len(x) == 1 for x in args):
            out = {((), fam, tuple(x[0] for x in args), ()): 1}
        else:
            pos = next(i for i in SPLIT_ORDER[form] if len(args[i - 1]) > 1)
            pieces = CASES[form][pos](args)
            self._stack.append((deg, rank))
            try:
                out: Dict[Term, int] = {}
                for c, fs in pieces:
                    _add(out, self.cert_piece(c, fs))
            finally:
                self._stack.pop()
        self.memo[key] = out
        return out

    def reduce(self, form: str, args: Sequence[Word]) -> Certificate:
        terms = self.reduce_terms(form, args)
        return Certificate(form_value(form, args), _terms_list(terms))

    # Lie elements of length >= 5
    def lie_terms(self, seq: Tuple[Word, ...]) -> Dict[Term, int]:
        out = self.reduce_terms("COMM5", seq[:5])
        for s in seq[5:]:
            sp = Poly.word(s)
            nxt = _mul_poly(out, None, sp)
            _add(nxt, _mul_poly(out, sp, None), -1)
            out = nxt
        return out

    def cert_factor(self, f) -> Dict[Term, int]:
        kind = f[0]
        if kind == "f":
            out = self.reduce_terms(f[1], f[2])
            for t in f[3]:
                tp = Poly.word(t)
                nxt = _mul_poly(out, None, tp)
                _add(nxt, _mul_poly(out, tp, None), -1)
                out = nxt
            return out
        if kind == "c":
            return self.lie_terms(f[1])
        if kind == "l":
            out: Dict[Term, int] = {}
            for c, seq in lnorm(f[1]):
                _add(out, self.lie_terms(seq), c)
            return out
        raise ReductionError(f"factor {kind} is not certifiable alone")

    @staticmethod
    def _standalone(f) -> bool:
        return (f[0] == "f" or (f[0] == "c" and len(f[1]) >= 5)
                or (f[0] == "l" and lie_leaves(f[1]) >= 5))

    def cert_piece(self, c: int, fs) -> Dict[Term, int]:
        for k, f in enumerate(fs):
            if self._standalone(f):
                core = self.cert_factor(f)
                return _mul_poly(core, _product(fs[:k]), _product(fs[k + 1:]), c)
        # short Lie trees become left-normed commutators
        for k, f in enumerate(fs):
            if f[0] == "l":
                out: Dict[Term, int] = {}
                for s, seq in lnorm(f[1]):
                    _add(out, self.cert_piece(c * s, fs[:k] + (Cm(*seq),) + fs[k + 1:]))
                return out
        big = [k for k, f in enumerate(fs) if f[0] == "c" and len(f[1]) >= 3]
        if len(big) < 2:
            raise ReductionError(f"cannot certify piece {fs}")
        i, j = big[0], big[1]
        out: Dict[Term, int] = {}
        if j > i + 1:
            m = fs[j - 1]
            b = fs[j]
            pre, post = fs[:j - 1], fs[j + 1:]
            if m[0] == "q":
                for s, qfs in qpieces(m[1]):
                    _add(out, self.cert_piece(c * s, pre + qfs + (b,) + post))
                return out
            # m * b = b * m - [b, m]
            _add(out, self.cert_piece(c, pre + (b, m) + post))
            _add(out, self.cert_piece(-c, pre + (Lie(b, m),) + post))
            return out
        a, b = fs[i][1], fs[j][1]
        pre, post = fs[:i], fs[j + 1:]
        la, lb = len(a), len(b)
        if la == 3 and lb == 3:
            return self.cert_piece(c, pre + (Fm("P33", *a, *b),) + post)
        if la == 4 and lb == 3:
            return self.cert_piece(c, pre + (Fm("P43", *a, *b),) + post)
        if la == 3 and lb == 4:
            _add(out, self.cert_piece(c, pre + (Fm("P43", *b, *a),) + post))
            _add(out, self.cert_piece(c, pre + (Lie(fs[i], fs[j]),) + post))
            return out
        # (4, 4): [A3, x] B = A3 x B - x A3 B
        a3, x = Cm(*a[:3]), W(a[3])
        _add(out, self.cert_piece(c, pre + (a3, x, fs[j]) + post))
        _add(out, self.cert_piece(-c, pre + (x, a3, fs[j]) + post))
        return out


def _terms_list(terms: Dict[Term, int]):
    return [(c, l, fam, vs, r) for (l, fam, vs, r), c in sorted(terms.items(), key=lambda t: (t[0][1], t[0][2], t[0][0], t[0][3]))]


_DEFAULT = Reducer()


def reduce(form: str, args: Sequence[Word], reducer: Optional[Reducer] = None) -> Certificate:
    return (reducer or _DEFAULT).reduce(form, args)


def reduce_t5_element(args: Sequence[Poly], reducer: Optional[Reducer] = None) -> Certificate:
    """Certificate for ``[b1,...,b5]`` with polynomial entries, by multilinearity."""
    if len(args) != 5:
        raise ValueError("a 5-fold commutator takes 5 arguments")
    r = reducer or _DEFAULT
    acc: Dict[Term, int] = {}
    for combo in itertools.product(*[sorted(a.terms.items()) for a in args]):
        words = [w for w, _ in combo]
        if any(len(w) == 0 for w in words):
            continue  # a scalar entry kills the commutator
        coeff = 1
        for _, c in combo:
            coeff *= c
        _add(acc, r.reduce_terms("COMM5", words), coeff)
    return Certificate(left_normed([a.to_ring(ZZ) for a in args]), _terms_list(acc))
