"""Generator families of the Lie-nilpotency ideals and their component spans.

A family is a template over formal slots ``x1..xk``.  An :class:`IdealSpec`
groups families with an instantiation mode:

* ``LITERAL``: slots are filled by single variables (the ideal generated by
  the X-instances of the templates);
* ``VERBAL``: slots are filled by arbitrary elements; inside a multidegree
  component it suffices to use words, since the templates are multilinear.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Sequence, Tuple

from .freealg import ZZ, MultiDegree, Poly, Ring, Word, word_key
from .textfmt import evaluate, parse_expr

LITERAL = "LITERAL"
VERBAL = "VERBAL"

_Q = "([x{0},x{1}]*[x{2},x{3}] + [x{0},x{2}]*[x{1},x{3}])"


def _q(a, b, c, d):
    return _Q.format(a, b, c, d)


_TEMPLATES = {
    "F1": "[x1,x2,x3,x4,x5]",
    "F2": "[x1,x2,x3]*[x4,x5,x6]",
    "F3": "[x1,x2,x3,x4]*[x5,x6,x7]",
    "F4": "[x1,x2,x3,x4]*[x5,x6] + [x1,x2,x3,x5]*[x4,x6]",
    "F5": "[x1,x2,x3]*([x4,x5]*[x6,x7] + [x4,x6]*[x5,x7])",
    "F6": f"[{_q(1, 2, 3, 4)},x5,x6]",
    "F7": f"[{_q(1, 2, 3, 4)},x5]*[x6,x7] + [{_q(1, 2, 3, 4)},x6]*[x5,x7]",
    "F8": f"{_q(1, 2, 3, 4)}*{_q(5, 6, 7, 8)}",
    "T3A": "[x1,x2,x3]",
    "T3B": _q(1, 2, 3, 4),
    "T4A1": "[x1,x2,x3,x4]",
    "T4A2": "[x1,x2]*[x3,x4,x5]",
    "T4A3": f"{_q(1, 2, 3, 4)}*[x5,x6]",
    "T4B1": "[x1,x2,x3,x4]",
    "T4B2": "[x1,x2,x3]*[x4,x5,x6]",
    "T4B3": "[x1,x2,x3]*[x4,x5] + [x1,x2,x4]*[x3,x5]",
    "T4B4": "[x1,x2,x3]*[x4,x5] + [x1,x4,x3]*[x2,x5]",
    "T4B5": f"{_q(1, 2, 3, 4)}*[x5,x6]",
}


def template_text(fid: str) -> str:
    """Source text of a family template in slot variables x1..xk."""
    if fid.startswith("VERBAL"):
        n = int(fid[len("VERBAL"):])
        return "[" + ",".join(f"x{i}" for i in range(1, n + 1)) + "]"
    return _TEMPLATES[fid]


@dataclass(frozen=True)
class GeneratorFamily:
    id: str
    arity: int
    template: tuple = field(compare=False, repr=False)

    def __call__(self, args: Sequence[Poly]) -> Poly:
        return family_poly(self, args)


def _make(fid: str) -> GeneratorFamily:
    if fid.startswith("VERBAL"):
        n = int(fid[len("VERBAL"):])
        tree = parse_expr("[" + ",".join(f"x{i}" for i in range(1, n + 1)) + "]")
        return GeneratorFamily(fid, n, tree)
    tree = parse_expr(_TEMPLATES[fid])
    from .textfmt import tree_vars

    return GeneratorFamily(fid, len(tree_vars(tree)), tree)


@lru_cache(maxsize=None)
def family(fid: str) -> GeneratorFamily:
    """Look up a family by id (``F1``..``F8``, ``T3A``, ``T4B2``, ``VERBAL5`` ...)."""
    if fid not in _TEMPLATES and not (fid.startswith("VERBAL") and fid[6:].isdigit()):
        raise KeyError(f"unknown family {fid!r}")
    return _make(fid)


def family_poly(f, args: Sequence[Poly]) -> Poly:
    if isinstance(f, str):
        f = family(f)
    if len(args) != f.arity:
        raise ValueError(f"{f.id} takes {f.arity} arguments, got {len(args)}")
    ring = args[0].ring if args else ZZ
    return evaluate(f.template, {i + 1: a for i, a in enumerate(args)}, ring)


@lru_cache(maxsize=None)
def template_terms(fid: str) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    """Integer expansion of the template at distinct variables 1..k."""
    f = family(fid)
    p = family_poly(f, [Poly.var(i, ZZ) for i in range(1, f.arity + 1)])
    return tuple(sorted(p.terms.items(), key=lambda t: word_key(t[0])))


def instance_terms(fid: str, slots: Sequence[Word]) -> Dict[Word, int]:
    """Integer terms of the template with slot ``i`` replaced by the word ``slots[i]``."""
    out: Dict[Word, int] = {}
    for perm, c in template_terms(fid):
        w = tuple(itertools.chain.from_iterable(slots[k - 1] for k in perm))
        out[w] = out.get(w, 0) + c
    return {w: c for w, c in out.items() if c}


def instance(fid: str, slots: Sequence[Word], ring: Ring = ZZ) -> Poly:
    return Poly(instance_terms(fid, [tuple(s) for s in slots]), ring)


@dataclass(frozen=True)
class IdealSpec:
    name: str
    families: Tuple[GeneratorFamily, ...]
    mode: str


def builtin_specs() -> Dict[str, IdealSpec]:
    def lit(name, ids):
        return IdealSpec(name, tuple(family(i) for i in ids), LITERAL)

    specs = {f"T{n}": IdealSpec(f"T{n}", (family(f"VERBAL{n}"),), VERBAL) for n in (2, 3, 4, 5)}
    specs["I5"] = lit("I5", [f"F{i}" for i in range(1, 9)])
    specs["G3"] = lit("G3", ["T3A", "T3B"])
    specs["G4_3"] = lit("G4_3", ["T4A1", "T4A2", "T4A3"])
    specs["G4_5"] = lit("G4_5", ["T4B1", "T4B2", "T4B3", "T4B4", "T4B5"])
    return specs


def get_spec(name: str) -> IdealSpec:
    specs = builtin_specs()
    if name not in specs:
        raise KeyError(f"unknown spec {name!r}; expected one of {' '.join(specs)}")
    return specs[name]


# -- enumeration -----------------------------------------------------------

def words_of(d: MultiDegree) -> List[Word]:
    """All words of multidegree ``d`` in lexicographic order."""
    counts = dict(MultiDegree(d))
    letters = sorted(counts)
    n = sum(counts.values())
    out: List[Word] = []
    cur: List[int] = []

    def rec():
        if len(cur) == n:
            out.append(tuple(cur))
            return
        for k in letters:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                rec()
                cur.pop()
                counts[k] += 1

    rec()
    return out


def _slot_sequences(counts: Counter, k: int) -> Iterator[Tuple[int, ...]]:
    letters = sorted(c for c in counts if counts[c])
    cur: List[int] = []

    def rec():
        if len(cur) == k:
            yield tuple(cur)
            return
        for v in letters:
            if counts[v]:
                counts[v] -= 1
                cur.append(v)
                yield from rec()
                cur.pop()
                counts[v] += 1

    yield from rec()


def _borders(rest: MultiDegree) -> Iterator[Tuple[Word, Word]]:
    """All (u, v) with multidegree(u) + multidegree(v) = rest, ordered by (|u|, |v|)."""
    if rest.total == 0:
        yield (), ()
        return
    ws = words_of(rest)
    n = rest.total
    seen = set()
    for cut in range(n + 1):
        for w in ws:
            uv = (w[:cut], w[cut:])
            if uv not in seen:
                seen.add(uv)
                yield uv


def _compositions(w: Word, parts: int) -> Iterator[Tuple[Word, ...]]:
    """Cut ``w`` into ``u, w1..w(parts), v`` with every ``wi`` non-empty."""
    n = len(w)
    for start in range(n + 1):
        for end in range(start, n + 1):
            inner = end - start
            if inner < parts:
                continue
            for inner_cuts in itertools.combinations(range(start + 1, end), parts - 1):
                b = (start,) + inner_cuts + (end,)
                yield (w[:start],) + tuple(w[b[i]:b[i + 1]] for i in range(parts)) + (w[end:],)


def iter_raw(spec: IdealSpec, d: MultiDegree) -> Iterator[Tuple[str, Word, Tuple[Word, ...], Word]]:
    """Yield ``(family id, u, slots, v)`` for every spanning product u*g*v of component d."""
    d = MultiDegree(d)
    counts = Counter(dict(d))
    if spec.mode == LITERAL:
        for f in sorted(spec.families, key=lambda f: f.id):
            if f.arity > d.total:
                continue
            for slots in _slot_sequences(Counter(counts), f.arity):
                rest = d - MultiDegree(Counter(slots))
                for u, v in _borders(rest):
                    yield f.id, u, tuple((s,) for s in slots), v
    else:
        for f in spec.families:
            if f.arity > d.total:
                continue
            for w in words_of(d):
                for parts in _compositions(w, f.arity):
                    yield f.id, parts[0], parts[1:-1], parts[-1]


def iter_component_terms(spec: IdealSpec, d: MultiDegree) -> Iterator[Dict[Word, int]]:
    """Integer term maps of the spanning products, exact duplicates and zeros removed."""
    seen = set()
    for fid, u, slots, v in iter_raw(spec, d):
        t = instance_terms(fid, slots)
        if not t:
            continue
        if u or v:
            t = {u + w + v: c for w, c in t.items()}
        key = tuple(sorted(t.items()))
        if key in seen:
            continue
        seen.add(key)
        yield t


def enumerate_component(spec: IdealSpec, d: MultiDegree, ring: Ring = ZZ) -> List[Poly]:
    """Spanning set of the d-component of the ideal, deterministic order."""
    out = []
    seen = set()
    for t in iter_component_terms(spec, d):
        p = Poly(t, ring)
        if p and p not in seen:
            seen.add(p)
            out.append(p)
    return out
