"""Commutator-expansion identities and a catalog of checked ring identities.

An identity is stored as a chain of expressions over formal slots ``x1..xk``;
consecutive members of the chain must be equal as polynomials for every
choice of the slot values.  ``check_identity`` substitutes arbitrary
polynomials, so the same entry serves fresh-variable checks and random
polynomial instances.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .freealg import ZZ, Poly, Ring
from .generators import template_text
from .reducer import CASES, FORMS, split_identity
from .textfmt import evaluate, parse_expr


@dataclass(frozen=True)
class Identity:
    id: str
    arity: int
    chain: Tuple[str, ...]
    note: str = ""

    @property
    def lhs(self) -> str:
        return self.chain[0]

    @property
    def rhs(self) -> str:
        return self.chain[-1]


class ArityError(ValueError):
    pass


_Q = "([{0},{1}]*[{2},{3}] + [{0},{2}]*[{1},{3}])"


def _q(a, b, c, d):
    return _Q.format(a, b, c, d)


# a2*a3 inserted into [ . , a1, a4] (shared by the degree-8 and 2211/2212 lines)
_M = f"(x2*[x3,x1,x4] - {_q('x1', 'x2', 'x3', 'x4')} + [[x2,x4],[x3,x1]] + [x2,x1,x4]*x3)"
_Q2 = _q("x5", "x6", "x7", "x8")

_BASE: List[Identity] = [
    Identity("LEIBNIZ_RIGHT", 3, ("[x1,x2*x3]", "x2*[x1,x3] + [x1,x2]*x3")),
    Identity("LEIBNIZ_LEFT", 3, ("[x1*x2,x3]", "x1*[x2,x3] + [x1,x3]*x2")),
    Identity("EXPAND_3", 4, ("[x1*x2,x3,x4]",
                             "x1*[x2,x3,x4] + [x1,x4]*[x2,x3] + [x1,x3]*[x2,x4] + [x1,x3,x4]*x2")),
    Identity("EXPAND_4", 5, ("[x1*x2,x3,x4,x5]",
                             "x1*[x2,x3,x4,x5] + [x1,x5]*[x2,x3,x4] + [x1,x4]*[x2,x3,x5]"
                             " + [x1,x4,x5]*[x2,x3] + [x1,x3]*[x2,x4,x5] + [x1,x3,x5]*[x2,x4]"
                             " + [x1,x3,x4]*[x2,x5] + [x1,x3,x4,x5]*x2")),
    Identity("JACOBI", 3, ("[x1,x2,x3]", "-[x2,x3,x1] - [x3,x1,x2]")),
]

_DERIVATIONS: List[Identity] = [
    Identity("D1", 6, (
        "[x1,x2,x3,x4*x5,x6]",
        "[(x4*[x1,x2,x3,x5] + [x1,x2,x3,x4]*x5),x6]",
        "x4*[x1,x2,x3,x5,x6] + [x4,x6]*[x1,x2,x3,x5] + [x1,x2,x3,x4]*[x5,x6] + [x1,x2,x3,x4,x6]*x5",
        "x4*[x1,x2,x3,x5,x6] + [x1,x2,x3,x5]*[x4,x6] + [x1,x2,x3,x4]*[x5,x6]"
        " - [[x1,x2,x3,x5],[x4,x6]] + [x1,x2,x3,x4,x6]*x5",
    ), "last line uses [[x1,x2,x3,x5],[x4,x6]]; see D1_AS_PRINTED"),
    Identity("D1b", 6, ("[[x1,x2,x3,x4],[x5,x6]]", "[x1,x2,x3,x4,x5,x6] - [x1,x2,x3,x4,x6,x5]")),
    Identity("D2", 4, (
        "[x1,x2*x3,x4]",
        "[(x2*[x1,x3] + [x1,x2]*x3),x4]",
        "x2*[x1,x3,x4] + [x2,x4]*[x1,x3] + [x1,x2]*[x3,x4] + [x1,x2,x4]*x3",
    ), "u1=x1, y1=x2, y2=x3, u2=x4"),
    Identity("D2b", 6, (
        "[x3,[x4,x5]]*[[x1,x2],x6] + [[x1,x2],x3]*[x6,[x4,x5]]",
        "[x3,[x4,x5]]*[x1,x2,x6] + [x1,x2,x3]*[x6,[x4,x5]]",
    ), "u1=[x1,x2], u2=[x4,x5], y1=x3, y2=x6"),
    Identity("D3", 6, (
        "[[x1,x2],x3*x4,x5,x6]",
        "[(x3*[[x1,x2],x4] + [[x1,x2],x3]*x4),x5,x6]",
        "x3*[[x1,x2],x4,x5,x6] + [x3,x6]*[[x1,x2],x4,x5] + [x3,x5]*[[x1,x2],x4,x6]"
        " + [x3,x5,x6]*[[x1,x2],x4] + [[x1,x2],x3]*[x4,x5,x6] + [[x1,x2],x3,x6]*[x4,x5]"
        " + [[x1,x2],x3,x5]*[x4,x6] + [[x1,x2],x3,x5,x6]*x4",
    )),
    Identity("D4", 6, ("([x1,x2,x3] + [x2,x3,x1] + [x3,x1,x2])*[x4,x5,x6]", "0")),
    Identity("D5", 7, (
        "[x5*x6,x4,x7]",
        "x5*[x6,x4,x7] + [x5,x4]*[x6,x7] + [x5,x7]*[x6,x4] + [x5,x4,x7]*x6",
        "[x6,x4,x7]*x5 - [x6,x4,x7,x5] - [x4,x5]*[x6,x7] - [x4,x6]*[x5,x7]"
        " + [[x5,x7],[x6,x4]] + [x5,x4,x7]*x6",
    ), "bracket read as [[x5,x7],[x6,x4]]"),
    Identity("D5b", 7, (
        "[x1,x2,x3]*[x5*x6,x4,x7]",
        "[x1,x2,x3]*[x6,x4,x7]*x5 - [x1,x2,x3]*[x6,x4,x7,x5]"
        " - [x1,x2,x3]*([x4,x5]*[x6,x7] + [x4,x6]*[x5,x7])"
        " + [x1,x2,x3]*[[x5,x7],[x6,x4]] + [x1,x2,x3]*[x5,x4,x7]*x6",
    )),
    Identity("D6", 8, (
        f"[x2*x3,x1,x4]*{_Q2}",
        f"x2*[x3,x1,x4]*{_Q2} - {_q('x1', 'x2', 'x3', 'x4')}*{_Q2}"
        f" + [[x2,x4],[x3,x1]]*{_Q2} + (x3*[x2,x1,x4] + [x2,x1,x4,x3])*{_Q2}",
    )),
    Identity("D7", 6, ("[x2*x3,x1,x4,x5,x6]", f"[{_M},x5,x6]")),
    Identity("D8", 7, (
        "[x2*x3,x1,x4,x5]*[x6,x7] + [x2*x3,x1,x4,x6]*[x5,x7]",
        f"[{_M},x5]*[x6,x7] + [{_M},x6]*[x5,x7]",
    )),
]


# -- split rules rendered as text ------------------------------------------

def _w(word) -> str:
    return "*".join(f"x{k}" for k in word)


def _lie_text(t) -> str:
    if t and t[0] == "n":
        return f"[{_lie_text(t[1])},{_lie_text(t[2])}]"
    return _w(t)


def _slot_sub(text: str, args) -> str:
    return re.sub(r"x(\d+)", lambda m: f"({_w(args[int(m.group(1)) - 1])})", text)


def factor_text(f) -> str:
    kind = f[0]
    if kind == "w":
        return _w(f[1])
    if kind == "c":
        return "[" + ",".join(_w(s) for s in f[1]) + "]"
    if kind == "l":
        return _lie_text(f[1])
    if kind == "q":
        return _q(*[f"({_w(b)})" for b in f[1]])
    if kind == "f":
        body = "(" + _slot_sub(template_text(FORMS[f[1]][0]), f[2]) + ")"
        if f[3]:
            return "[" + ",".join([body] + [_w(t) for t in f[3]]) + "]"
        return body
    raise ValueError(kind)


def pieces_text(pieces) -> str:
    parts = []
    for c, fs in pieces:
        body = "*".join(factor_text(f) for f in fs) if fs else "1"
        parts.append(f"{'-' if c < 0 else '+'} {abs(c)}*{body}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text or "0"


# The same last line with [[x1,x2,x3,x4],[x5,x6]]: not an identity (residual of 64 terms).
D1_AS_PRINTED = Identity("D1_AS_PRINTED", 6, (
    "x4*[x1,x2,x3,x5,x6] + [x4,x6]*[x1,x2,x3,x5] + [x1,x2,x3,x4]*[x5,x6] + [x1,x2,x3,x4,x6]*x5",
    "x4*[x1,x2,x3,x5,x6] + [x1,x2,x3,x5]*[x4,x6] + [x1,x2,x3,x4]*[x5,x6]"
    " - [[x1,x2,x3,x4],[x5,x6]] + [x1,x2,x3,x4,x6]*x5",
))


def _split_entries(start: int) -> List[Identity]:
    out = []
    n = start
    for form in CASES:
        k = FORMS[form][1]
        for pos in sorted(CASES[form]):
            args, pieces = split_identity(form, pos)
            lhs = _slot_sub(template_text(FORMS[form][0]), args)
            out.append(Identity(f"D{n}", k + 1, (lhs, pieces_text(pieces)), f"{form} split at a{pos}"))
            n += 1
    return out


@lru_cache(maxsize=1)
def catalog() -> Tuple[Identity, ...]:
    """All identities: base expansions, derivation lines, then one entry per split rule."""
    return tuple(_BASE + _DERIVATIONS + _split_entries(9))


def get_identity(iid: str) -> Identity:
    for e in catalog():
        if e.id == iid:
            return e
    raise KeyError(f"unknown identity {iid!r}")


@lru_cache(maxsize=None)
def _parsed(text: str):
    return parse_expr(text)


def _resolve(iid) -> Identity:
    return iid if isinstance(iid, Identity) else get_identity(iid)


def _assign(e: Identity, args: Sequence[Poly]) -> Dict[int, Poly]:
    if len(args) != e.arity:
        raise ArityError(f"{e.id} takes {e.arity} arguments, got {len(args)}")
    return {i + 1: a for i, a in enumerate(args)}


def expand(iid, args: Sequence[Poly]) -> Poly:
    """Right-hand side of the identity at ``args``."""
    e = _resolve(iid)
    ring = args[0].ring if args else ZZ
    return evaluate(_parsed(e.rhs), _assign(e, args), ring)


def check_identity(iid, args: Sequence[Poly]) -> Poly:
    """First nonzero ``chain[0] - chain[k]``, or zero when every link holds."""
    e = _resolve(iid)
    env = _assign(e, args)
    ring = args[0].ring if args else ZZ
    first = evaluate(_parsed(e.chain[0]), env, ring)
    for text in e.chain[1:]:
        res = first - evaluate(_parsed(text), env, ring)
        if res:
            return res
    return Poly.zero(ring)


def fresh_args(e: Identity, ring: Ring = ZZ) -> List[Poly]:
    return [Poly.var(i, ring) for i in range(1, e.arity + 1)]


def run_derivation_suite(ring: Ring = ZZ, entries: Optional[Sequence[Identity]] = None) -> List[dict]:
    """Check every entry at fresh distinct variables; one record per entry."""
    out = []
    for e in (catalog() if entries is None else entries):
        res = check_identity(e, fresh_args(e, ring))
        out.append({"id": e.id, "residual_term_count": len(res.terms)})
    return out


def generated_group_order(gens: Sequence[Tuple[int, int]], n: int) -> int:
    """Order of the subgroup of S_n generated by the given transpositions."""
    perms = []
    for i, j in gens:
        p = list(range(n))
        p[i - 1], p[j - 1] = j - 1, i - 1
        perms.append(tuple(p))
    seen = {tuple(range(n))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for s in perms:
                h = tuple(s[g[k]] for k in range(n))
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)
