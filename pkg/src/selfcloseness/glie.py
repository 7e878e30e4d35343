"""Free graded Lie algebras over Q.

Elements are stored in canonical coordinates with respect to a per-degree
basis.  The basis is chosen inside the tensor algebra: for every
multidegree ("content", the multiset of generators occurring in a word) the
right-normed brackets ``[x_a,[x_b,[...,x_z]]]`` span the Lie part, and a
greedy exact elimination in lexicographic word order picks an independent
subset.  Equality of Lie elements is therefore decided in the tensor algebra,
where the Koszul signs are just those of the graded commutator

    [a, b] = a b - (-1)^{|a||b|} b a.

Coefficients are ``Fraction`` by default but any commutative-ring element
with ``+``, ``*`` and truthiness-as-nonzero works (the self-map code feeds
sympy sparse polynomials through the same paths).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

try:  # fast exact rationals for basis elimination; results are stored as Fraction
    from gmpy2 import mpq as _fast_rational
except ImportError:  # pragma: no cover
    _fast_rational = Fraction

Word = tuple[int, ...]

DEFAULT_MAX_DEGREE = 24


class LieError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise LieError(f"generator {self.name} has degree {self.degree} < 1")


@dataclass(frozen=True, order=True)
class BracketMonomial:
    """Right-normed bracket ``[x_w0,[x_w1,[...,x_wk]]]`` of generator indices."""

    word: Word

    @property
    def length(self) -> int:
        return len(self.word)

    def tree(self):
        w = self.word
        t = w[-1]
        for i in reversed(w[:-1]):
            t = (i, t)
        return t


def _sign(p: int, q: int) -> int:
    return -1 if (p * q) % 2 else 1


def _is_zero(c) -> bool:
    return not c


def _as_fractions(vec: dict) -> dict:
    return {k: Fraction(int(c.numerator), int(c.denominator)) for k, c in vec.items()}


def _add_into(acc: dict, key, c) -> None:
    v = acc.get(key)
    v = c if v is None else v + c
    if _is_zero(v):
        acc.pop(key, None)
    else:
        acc[key] = v


class _Block:
    """Elimination data for one content (multiset of generators)."""

    __slots__ = ("basis", "rows")

    def __init__(self):
        self.basis: list[Word] = []
        # (pivot word, vector, combination over self.basis positions)
        self.rows: list[tuple[Word, dict, dict]] = []

    def reduce(self, vec: dict) -> tuple[dict, dict]:
        """Reduce ``vec`` by the rows; return (residual, coordinates)."""
        v = dict(vec)
        coords: dict = {}
        for pw, row, comb in self.rows:
            c = v.get(pw)
            if c is None:
                continue
            for w, x in row.items():
                _add_into(v, w, -(c * x))
            for j, y in comb.items():
                _add_into(coords, j, c * y)
        return v, coords


class FreeLieAlgebra:
    """The free graded Lie algebra on finitely many generators of degree >= 1."""

    def __init__(self, gens: Sequence[Generator], max_degree: int = DEFAULT_MAX_DEGREE):
        gens = tuple(gens)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise LieError("generator names must be unique")
        self.gens = gens
        self.max_degree = max_degree
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._degs = [g.degree for g in gens]
        self._blocks: dict[Word, _Block] = {}
        self._tensor_cache: dict[Word, dict[Word, int]] = {}
        self._rn_cache: dict[Word, LieElement] = {}
        self._bracket_cache: dict[tuple[Word, Word], LieElement] = {}
        self._lock = threading.RLock()

    # -- bookkeeping ---------------------------------------------------------
    def __repr__(self):
        inner = ", ".join(f"{g.name}:{g.degree}" for g in self.gens)
        return f"FreeLieAlgebra({inner})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise LieError(f"unknown generator {name!r}") from None

    def word_degree(self, word: Iterable[int]) -> int:
        return sum(self._degs[i] for i in word)

    def _check_degree(self, d: int) -> None:
        if d > self.max_degree:
            raise LieError(f"degree {d} exceeds the degree cap {self.max_degree}")

    # -- elements ------------------------------------------------------------
    def zero(self) -> "LieElement":
        return LieElement(self, {})

    def generator(self, g: str | int) -> "LieElement":
        i = self.index(g) if isinstance(g, str) else g
        return LieElement(self, {(i,): Fraction(1)})

    def gen_elements(self) -> list["LieElement"]:
        return [self.generator(i) for i in range(len(self.gens))]

    def element(self, terms: Mapping[Word, object]) -> "LieElement":
        """Build an element from canonical-basis coordinates."""
        out = {}
        for w, c in terms.items():
            if not _is_zero(c):
                out[tuple(w)] = c
        return LieElement(self, out)

    # -- tensor algebra ------------------------------------------------------
    def tensor_of_word(self, word: Word) -> dict[Word, int]:
        """Tensor image of the right-normed bracket on ``word``."""
        cached = self._tensor_cache.get(word)
        if cached is not None:
            return cached
        if len(word) == 1:
            out = {word: 1}
        else:
            head, rest = word[0], word[1:]
            inner = self.tensor_of_word(rest)
            s = _sign(self._degs[head], self.word_degree(rest))
            out: dict[Word, int] = {}
            for w, c in inner.items():
                _add_into(out, (head,) + w, c)
                _add_into(out, w + (head,), -s * c)
        self._tensor_cache[word] = out
        return out

    def to_tensor(self, e: "LieElement") -> dict[Word, object]:
        out: dict = {}
        for w, c in e.terms.items():
            for tw, tc in self.tensor_of_word(w).items():
                _add_into(out, tw, c * tc)
        return out

    def from_tensor(self, t: Mapping[Word, object]) -> "LieElement":
        """Canonical form of a tensor known to lie in the Lie subalgebra."""
        by_content: dict[Word, dict] = {}
        for w, c in t.items():
            if _is_zero(c):
                continue
            by_content.setdefault(tuple(sorted(w)), {})[w] = c
        out: dict = {}
        for content, vec in by_content.items():
            block = self._block(content)
            residual, coords = block.reduce(vec)
            if residual:
                raise LieError("tensor is not in the image of the free Lie algebra")
            for j, c in coords.items():
                _add_into(out, block.basis[j], c)
        return LieElement(self, out)

    # -- bases ---------------------------------------------------------------
    def _contents(self, d: int) -> Iterator[Word]:
        n = len(self._degs)

        def rec(i: int, left: int, acc: list[int]):
            if left == 0:
                yield tuple(acc)
                return
            if i == n:
                return
            deg = self._degs[i]
            k = 0
            while k * deg <= left:
                yield from rec(i + 1, left - k * deg, acc + [i] * k)
                k += 1

        yield from rec(0, d, [])

    def _block(self, content: Word) -> _Block:
        block = self._blocks.get(content)
        if block is not None:
            return block
        with self._lock:
            block = self._blocks.get(content)
            if block is not None:
                return block
            self._check_degree(self.word_degree(content))
            block = _Block()
            target = self.content_dimension(content)
            for word in _distinct_permutations(content):
                if len(block.basis) == target:
                    break
                vec = {w: _fast_rational(c) for w, c in self.tensor_of_word(word).items()}
                residual, coords = block.reduce(vec)
                if not residual:
                    continue
                j = len(block.basis)
                block.basis.append(word)
                pw = min(residual)
                inv = 1 / residual[pw]
                comb = {k: -c * inv for k, c in coords.items()}
                comb[j] = inv
                row = {w: c * inv for w, c in residual.items()}
                block.rows.append((pw, row, comb))
            if len(block.basis) != target:
                raise LieError(f"basis elimination found {len(block.basis)} brackets, expected {target}")
            block.rows = [(pw, _as_fractions(row), _as_fractions(comb)) for pw, row, comb in block.rows]
            self._blocks[content] = block
            return block

    def content_dimension(self, content: Word) -> int:
        """Dimension of the span of brackets with the given generator content.

        Inverts the graded Poincare-Birkhoff-Witt identity between the free
        Lie algebra and the tensor algebra, one multidegree at a time.
        """
        counts = [0] * len(self._degs)
        for i in content:
            counts[i] += 1
        return _multidegree_dimension(tuple(counts), tuple(d % 2 for d in self._degs))

    def basis(self, d: int) -> list[BracketMonomial]:
        """Canonical ordered basis of the degree ``d`` component."""
        if d < 1:
            return []
        self._check_degree(d)
        words = []
        for content in self._contents(d):
            words.extend(self._block(content).basis)
        words.sort(key=lambda w: (len(w), w))
        return [BracketMonomial(w) for w in words]

    def basis_words(self, d: int) -> list[Word]:
        return [m.word for m in self.basis(d)]

    def dimension(self, d: int) -> int:
        return len(self.basis(d))

    # -- Lie operations ------------------------------------------------------
    def right_normed(self, word: Word) -> "LieElement":
        """Canonical form of the right-normed bracket on an arbitrary word."""
        e = self._rn_cache.get(word)
        if e is None:
            e = self.from_tensor(self.tensor_of_word(word))
            self._rn_cache[word] = e
        return e

    def _bracket_words(self, w1: Word, w2: Word) -> "LieElement":
        key = (w1, w2)
        e = self._bracket_cache.get(key)
        if e is None:
            t1, t2 = self.tensor_of_word(w1), self.tensor_of_word(w2)
            s = _sign(self.word_degree(w1), self.word_degree(w2))
            out: dict = {}
            for a, ca in t1.items():
                for b, cb in t2.items():
                    _add_into(out, a + b, ca * cb)
                    _add_into(out, b + a, -s * ca * cb)
            e = self.from_tensor(out)
            self._bracket_cache[key] = e
        return e

    def bracket(self, a: "LieElement", b: "LieElement") -> "LieElement":
        if not a.is_homogeneous() or not b.is_homogeneous():
            raise LieError("inhomogeneous bracket")
        out: dict = {}
        for w1, c1 in a.terms.items():
            for w2, c2 in b.terms.items():
                c = c1 * c2
                for w, x in self._bracket_words(w1, w2).terms.items():
                    _add_into(out, w, c * x)
        return LieElement(self, out)

    # -- printing ------------------------------------------------------------
    def format_word(self, word: Word) -> str:
        names = [self.gens[i].name for i in word]
        s = names[-1]
        for n in reversed(names[:-1]):
            s = f"[{n},{s}]"
        return s

    def format(self, e: "LieElement") -> str:
        if not e.terms:
            return "0"
        parts = []
        for w in sorted(e.terms, key=lambda w: (self.word_degree(w), len(w), w)):
            c = e.terms[w]
            mono = self.format_word(w)
            parts.append(_format_term(c, mono))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _format_term(c, mono: str) -> str:
    if isinstance(c, (int, Fraction)):
        if c == 1:
            return mono
        if c == -1:
            return "-" + mono
        return f"{c}*{mono}"
    return f"({c})*{mono}"


@lru_cache(maxsize=None)
def _multidegree_dimension(counts: tuple[int, ...], parities: tuple[int, ...]) -> int:
    # log of the word series at multidegree g is multinomial(g)/|g|; a Lie
    # basis element of multidegree b contributes c/k at k*b, where c = 1 for
    # even b and (-1)^(k+1) for odd b.
    n = sum(counts)
    if n == 0:
        return 0
    words = math.factorial(n)
    for c in counts:
        words //= math.factorial(c)
    value = Fraction(words, n)
    g = 0
    for c in counts:
        g = math.gcd(g, c)
    for k in range(2, g + 1):
        if g % k:
            continue
        sub = tuple(c // k for c in counts)
        odd = sum(c * p for c, p in zip(sub, parities)) % 2
        sign = (-1) ** (k + 1) if odd else 1
        value -= Fraction(sign, k) * _multidegree_dimension(sub, parities)
    if value.denominator != 1 or value < 0:
        raise LieError(f"inconsistent dimension count {value} for multidegree {counts}")
    return int(value)


def _distinct_permutations(content: Word) -> Iterator[Word]:
    """Distinct permutations of a sorted tuple, in lexicographic order."""
    counts: dict[int, int] = {}
    for x in content:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    n = len(content)

    def rec(prefix: list[int]):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                prefix.append(k)
                yield from rec(prefix)
                prefix.pop()
                counts[k] += 1

    yield from rec([])


class LieElement:
    """A (possibly inhomogeneous) element in canonical coordinates."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeLieAlgebra, terms: dict):
        self.alg = alg
        self.terms = terms

    def degrees(self) -> set[int]:
        return {self.alg.word_degree(w) for w in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> int | None:
        ds = self.degrees()
        if len(ds) > 1:
            raise LieError("inhomogeneous element has no degree")
        return next(iter(ds)) if ds else None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, word: Word):
        return self.terms.get(tuple(word), 0)

    def map_coefficients(self, fn) -> "LieElement":
        out = {}
        for w, c in self.terms.items():
            v = fn(c)
            if not _is_zero(v):
                out[w] = v
        return LieElement(self.alg, out)

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, c)
        return LieElement(self.alg, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.alg, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __mul__(self, scalar) -> "LieElement":
        if isinstance(scalar, LieElement):
            return NotImplemented
        return self.map_coefficients(lambda c: c * scalar)

    def __rmul__(self, scalar) -> "LieElement":
        return self.map_coefficients(lambda c: scalar * c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.alg.gens == other.alg.gens and self.terms == other.terms

    def __hash__(self):
        return hash((self.alg.gens, frozenset(self.terms.items())))

    def __repr__(self):
        return f"LieElement({self.alg.format(self)})"

    def __str__(self):
        return self.alg.format(self)


def bracket(a: LieElement, b: LieElement) -> LieElement:
    return a.alg.bracket(a, b)


def to_tensor(e: LieElement) -> dict[Word, object]:
    return e.alg.to_tensor(e)


@lru_cache(maxsize=None)
def _algebra_for(gens: tuple[Generator, ...]) -> FreeLieAlgebra:
    return FreeLieAlgebra(gens)


def basis(gens: Sequence[Generator], degree: int) -> list[BracketMonomial]:
    return _algebra_for(tuple(gens)).basis(degree)


def dimension(gens: Sequence[Generator], degree: int) -> int:
    return len(basis(gens, degree))
