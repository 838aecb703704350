"""Exact arithmetic in the free associative algebra K<X>.

Variables are the positive integers (``k`` stands for ``x_k``), words are
tuples of variables and a :class:`Poly` is an immutable sparse map from words
to coefficients of a :class:`Ring`.  Every polynomial is kept canonical: no
stored coefficient is zero.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Word = Tuple[int, ...]
EMPTY: Word = ()


class RingMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Ring:
    """Coefficient ring: ``Z``, ``Q`` or ``F_p`` for a prime ``p``."""

    __slots__ = ("tag", "p")

    def __init__(self, tag: str, p: int = 0):
        if tag not in ("Z", "Q", "F"):
            raise ValueError(f"unknown ring tag {tag!r}")
        if tag == "F":
            if not _is_prime(p):
                raise ValueError(f"modulus {p} is not prime")
        else:
            p = 0
        self.tag = tag
        self.p = p

    @classmethod
    def from_name(cls, name: str) -> "Ring":
        name = name.strip()
        if name in ("Z", "INT", "ZZ"):
            return ZZ
        if name in ("Q", "RAT", "QQ"):
            return QQ
        if name.startswith("F") and name[1:].isdigit():
            return cls("F", int(name[1:]))
        if name.startswith("GF") and name[2:].isdigit():
            return cls("F", int(name[2:]))
        raise ValueError(f"unknown ring {name!r}")

    @property
    def name(self) -> str:
        return f"F{self.p}" if self.tag == "F" else self.tag

    @property
    def is_field(self) -> bool:
        return self.tag != "Z"

    def __eq__(self, other):
        return isinstance(other, Ring) and self.tag == other.tag and self.p == other.p

    def __hash__(self):
        return hash((self.tag, self.p))

    def __repr__(self):
        return f"Ring({self.name})"

    def __call__(self, value) -> Union[int, Fraction]:
        """Coerce an int or Fraction into this ring."""
        if self.tag == "Z":
            if isinstance(value, Fraction):
                if value.denominator != 1:
                    raise ValueError(f"{value} is not an integer")
                return int(value.numerator)
            return int(value)
        if self.tag == "Q":
            value = Fraction(value)
            return value.numerator if value.denominator == 1 else value
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, value):
        if self.tag == "Z":
            if value in (1, -1):
                return value
            raise ZeroDivisionError(f"{value} is not a unit in Z")
        if self.tag == "Q":
            return self(Fraction(1) / Fraction(value))
        return pow(int(value), -1, self.p)


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    return Ring("F", p)


def word_key(w: Word):
    """Deterministic term order: degree first, then lexicographic on indices."""
    return (len(w), w)


class Poly:
    """An element of K<X>; immutable and canonical."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] = None, ring: Ring = ZZ, *, _trusted=False):
        self.ring = ring
        if _trusted:
            self.terms = terms
        else:
            acc: Dict[Word, object] = {}
            for w, c in (terms or {}).items():
                w = tuple(w)
                if any(not isinstance(v, int) or v < 1 for v in w):
                    raise ValueError(f"bad word {w!r}")
                acc[w] = acc.get(w, 0) + c
            self.terms = {w: c for w, c in ((w, ring(c)) for w, c in acc.items()) if c}
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring = ZZ) -> "Poly":
        return cls({}, ring, _trusted=True)

    @classmethod
    def one(cls, ring: Ring = ZZ) -> "Poly":
        return cls({EMPTY: ring(1)}, ring, _trusted=True)

    @classmethod
    def var(cls, k: int, ring: Ring = ZZ) -> "Poly":
        if k < 1:
            raise ValueError("variable index must be >= 1")
        return cls({(k,): ring(1)}, ring, _trusted=True)

    @classmethod
    def word(cls, w: Sequence[int], coeff=1, ring: Ring = ZZ) -> "Poly":
        return cls({tuple(w): coeff}, ring)

    @classmethod
    def const(cls, c, ring: Ring = ZZ) -> "Poly":
        return cls({EMPTY: c}, ring)

    # -- basic protocol ----------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda t: word_key(t[0])))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .textfmt import format_poly

        return f"Poly({format_poly(self)!r}, {self.ring.name})"

    def coeff(self, w: Sequence[int]):
        return self.terms.get(tuple(w), 0)

    def words(self):
        return sorted(self.terms, key=word_key)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def _check(self, other: "Poly"):
        if self.ring != other.ring:
            raise RingMismatch("ring mismatch")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.ring)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _combine(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _combine(self, other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        r = self.ring
        return Poly({w: r(-c) for w, c in self.terms.items()}, r, _trusted=True)

    def scale(self, c) -> "Poly":
        r = self.ring
        c = r(c)
        if not c:
            return Poly.zero(r)
        out = {}
        for w, v in self.terms.items():
            v = r(v * c)
            if v:
                out[w] = v
        return Poly(out, r, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return poly_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def lmul_word(self, w: Word) -> "Poly":
        if not w:
            return self
        return Poly({w + u: c for u, c in self.terms.items()}, self.ring, _trusted=True)

    def rmul_word(self, w: Word) -> "Poly":
        if not w:
            return self
        return Poly({u + w: c for u, c in self.terms.items()}, self.ring, _trusted=True)

    def to_ring(self, ring: Ring) -> "Poly":
        """Image under the canonical map Z -> ring (or identity)."""
        return Poly(dict(self.terms), ring)

    def variables(self):
        return sorted({v for w in self.terms for v in w})


def _combine(a: Poly, b: Poly, sign: int) -> Poly:
    r = a.ring
    out = dict(a.terms)
    for w, c in b.terms.items():
        v = out.get(w, 0) + (c if sign > 0 else -c)
        v = r(v) if r.tag != "Z" else v
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    return Poly(out, r, _trusted=True)


def poly_mul(p: Poly, q: Poly) -> Poly:
    """Bilinear extension of word concatenation."""
    p._check(q)
    r = p.ring
    out: Dict[Word, object] = {}
    for u, a in p.terms.items():
        for v, b in q.terms.items():
            w = u + v
            c = out.get(w, 0) + a * b
            out[w] = c
    if r.tag == "Z":
        out = {w: c for w, c in out.items() if c}
    else:
        out = {w: c for w, c in ((w, r(c)) for w, c in out.items()) if c}
    return Poly(out, r, _trusted=True)


def linear_combination(pairs: Iterable[Tuple[object, Poly]], ring: Ring) -> Poly:
    """Sum of ``c * p`` over the pairs, accumulated in one dictionary."""
    out: Dict[Word, object] = {}
    for c, p in pairs:
        if p.ring != ring:
            raise RingMismatch("ring mismatch")
        for w, v in p.terms.items():
            out[w] = out.get(w, 0) + c * v
    return Poly({w: c for w, c in ((w, ring(c)) for w, c in out.items()) if c}, ring, _trusted=True)


def bracket(p: Poly, q: Poly) -> Poly:
    """The commutator ``pq - qp``."""
    p._check(q)
    return poly_mul(p, q) - poly_mul(q, p)


def left_normed(args: Sequence[Poly]) -> Poly:
    """``[a1, ..., an] = [[a1, ..., a(n-1)], an]``; one argument is returned as is."""
    if not args:
        raise ValueError("left_normed needs at least one argument")
    acc = args[0]
    for a in args[1:]:
        acc = bracket(acc, a)
    return acc


def word_poly(w: Sequence[int], ring: Ring = ZZ) -> Poly:
    return Poly({tuple(w): ring(1)}, ring, _trusted=True)


def substitute(p: Poly, assignment: Mapping[int, Poly]) -> Poly:
    """Apply the algebra endomorphism determined by ``x_k -> assignment[k]``."""
    missing = sorted(set(p.variables()) - set(assignment))
    if missing:
        raise KeyError("unassigned variables: " + ", ".join(f"x{k}" for k in missing))
    r = p.ring
    for img in assignment.values():
        if img.ring != r:
            raise RingMismatch("ring mismatch")
    cache: Dict[Word, Poly] = {EMPTY: Poly.one(r)}

    def image(w: Word) -> Poly:
        if w in cache:
            return cache[w]
        res = poly_mul(image(w[:-1]), assignment[w[-1]])
        cache[w] = res
        return res

    return linear_combination(((c, image(w)) for w, c in p.terms.items()), r)


# -- grading ---------------------------------------------------------------

class MultiDegree(tuple):
    """Sorted tuple of ``(variable, multiplicity)`` pairs with positive multiplicities."""

    def __new__(cls, data=()):
        if isinstance(data, Mapping):
            items = data.items()
        else:
            items = data
        clean = Counter()
        for k, m in items:
            if k < 1 or m < 0:
                raise ValueError(f"bad multidegree entry {(k, m)}")
            clean[k] += m
        return super().__new__(cls, sorted((k, m) for k, m in clean.items() if m))

    @classmethod
    def multilinear(cls, n: int, start: int = 1) -> "MultiDegree":
        return cls({k: 1 for k in range(start, start + n)})

    def as_dict(self) -> Dict[int, int]:
        return dict(self)

    @property
    def total(self) -> int:
        return sum(m for _, m in self)

    @property
    def is_multilinear(self) -> bool:
        return all(m == 1 for _, m in self)

    def __add__(self, other):
        d = Counter(dict(self))
        d.update(dict(other))
        return MultiDegree(d)

    def __sub__(self, other):
        d = Counter(dict(self))
        d.subtract(dict(other))
        if any(m < 0 for m in d.values()):
            raise ValueError("negative multiplicity")
        return MultiDegree(d)

    def __le__(self, other):
        o = dict(other)
        return all(o.get(k, 0) >= m for k, m in self)

    def __str__(self):
        return ",".join(f"x{k}:{m}" for k, m in self)


def multidegree_of(w: Sequence[int]) -> MultiDegree:
    return MultiDegree(Counter(w))


def component(p: Poly, d: MultiDegree) -> Poly:
    d = MultiDegree(d)
    return Poly({w: c for w, c in p.terms.items() if multidegree_of(w) == d}, p.ring, _trusted=True)


def components(p: Poly) -> Dict[MultiDegree, Poly]:
    buckets: Dict[MultiDegree, Dict[Word, object]] = {}
    for w, c in p.terms.items():
        buckets.setdefault(multidegree_of(w), {})[w] = c
    return {d: Poly(t, p.ring, _trusted=True) for d, t in buckets.items()}
