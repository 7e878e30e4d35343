"""Quillen models of cell complexes and their homology.

A space is a wedge of spheres with further cells attached along rational
combinations of iterated Whitehead products.  Its Quillen model is the free
graded Lie algebra on one generator per cell (sphere S^n gives degree n-1,
cell e^m gives degree m-1) with the attaching map read off as the
differential, Whitehead brackets becoming Lie brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from . import linalg
from .glie import FreeLieAlgebra, Generator, LieElement, LieError, Word


class ModelError(ValueError):
    """Ill-formed space description or model."""


# -- attaching expressions ---------------------------------------------------

@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Br:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Combo:
    terms: tuple[tuple[Fraction, "Expr"], ...]


Expr = Union[Name, Br, Combo]

TORSION = "torsion"


def combo(*terms) -> Combo:
    return Combo(tuple((Fraction(c), e) for c, e in terms))


def names_in(e: Expr) -> list[str]:
    if isinstance(e, Name):
        return [e.name]
    if isinstance(e, Br):
        return names_in(e.left) + names_in(e.right)
    out = []
    for _, t in e.terms:
        out.extend(names_in(t))
    return out


def format_expr(e: Expr) -> str:
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Br):
        return f"[{format_expr(e.left)},{format_expr(e.right)}]"
    if not e.terms:
        return "0"
    parts = []
    for c, t in e.terms:
        s = format_expr(t)
        if c == 1:
            parts.append(f"+ {s}")
        elif c == -1:
            parts.append(f"- {s}")
        elif c < 0:
            parts.append(f"- {-c}*{s}")
        else:
            parts.append(f"+ {c}*{s}")
    out = " ".join(parts)
    return out[2:] if out.startswith("+ ") else "-" + out[2:]


# -- space specifications ----------------------------------------------------

@dataclass(frozen=True)
class Cell:
    name: str
    dim: int
    attach: Expr | str | None = None  # None for spheres

    @property
    def is_sphere(self) -> bool:
        return self.attach is None


@dataclass(frozen=True)
class SpaceSpec:
    name: str
    cells: tuple[Cell, ...]

    def prefix(self, k: int) -> "SpaceSpec":
        return SpaceSpec(f"{self.name}[:{k}]", self.cells[:k])

    def format(self) -> str:
        lines = [f"space {self.name} {{"]
        for c in self.cells:
            if c.is_sphere:
                lines.append(f"  sphere {c.name}:{c.dim}")
            elif c.attach == TORSION:
                lines.append(f"  cell {c.name}:{c.dim} attach torsion")
            else:
                lines.append(f"  cell {c.name}:{c.dim} attach {format_expr(c.attach)}")
        lines.append("}")
        return "\n".join(lines)


def sphere(name: str, n: int) -> Cell:
    return Cell(name, n)


def cell(name: str, m: int, attach: Expr | str) -> Cell:
    """A cell e^m; ``attach`` is an expression, its text, or ``"torsion"``."""
    if isinstance(attach, str) and attach != TORSION:
        from .textparse import parse_bracket_text
        attach = parse_bracket_text(attach)[0]
    return Cell(name, m, attach)


def expr_degree(e: Expr, dims: Mapping[str, int]) -> int | None:
    """Homotopy degree of an attaching expression (None for the empty sum)."""
    if isinstance(e, Name):
        if e.name not in dims:
            raise ModelError(f"undeclared name {e.name}")
        return dims[e.name]
    if isinstance(e, Br):
        p, q = expr_degree(e.left, dims), expr_degree(e.right, dims)
        if p is None or q is None:
            return None
        return p + q - 1
    degs = {expr_degree(t, dims) for c, t in e.terms if c != 0} - {None}
    if len(degs) > 1:
        raise ModelError(f"degree mismatch: terms of degrees {sorted(degs)}")
    return degs.pop() if degs else None


def expr_to_lie(e: Expr, alg: FreeLieAlgebra) -> LieElement:
    if isinstance(e, Name):
        return alg.generator(e.name)
    if isinstance(e, Br):
        return alg.bracket(expr_to_lie(e.left, alg), expr_to_lie(e.right, alg))
    out = alg.zero()
    for c, t in e.terms:
        if c:
            out = out + expr_to_lie(t, alg) * c
    return out


# -- models ------------------------------------------------------------------

class DGLModel:
    """A free DGL (L(U), d) with d of degree -1 given on generators."""

    def __init__(self, algebra: FreeLieAlgebra, differential: Mapping[str, LieElement],
                 name: str = "", spec: SpaceSpec | None = None):
        self.algebra = algebra
        self.name = name
        self.spec = spec
        self._d = [algebra.zero() for _ in algebra.gens]
        for gname, e in differential.items():
            self._d[algebra.index(gname)] = e
        self._dword: dict[Word, LieElement] = {}
        self._bmat: dict[int, list[list[Fraction]]] = {}
        self._homology: dict[int, "HomologyDegree"] = {}

    @classmethod
    def from_differentials(cls, gens: Sequence[tuple[str, int]], diffs: Mapping[str, object],
                           name: str = "", max_degree: int | None = None) -> "DGLModel":
        """Build from generator (name, degree) pairs and differentials.

        Differentials are LieElements or callables ``alg -> LieElement``.
        """
        kw = {} if max_degree is None else {"max_degree": max_degree}
        alg = FreeLieAlgebra([Generator(n, d) for n, d in gens], **kw)
        d = {k: (v(alg) if callable(v) else v) for k, v in diffs.items()}
        model = cls(alg, d, name=name)
        model.check()
        return model

    @property
    def gens(self) -> tuple[Generator, ...]:
        return self.algebra.gens

    def degree_of(self, gname: str) -> int:
        return self.gens[self.algebra.index(gname)].degree

    def top_degree(self) -> int:
        return max((g.degree for g in self.gens), default=0)

    def d_gen(self, i: int | str) -> LieElement:
        if isinstance(i, str):
            i = self.algebra.index(i)
        return self._d[i]

    def d_word(self, word: Word) -> LieElement:
        """Differential of the right-normed bracket on ``word``."""
        e = self._dword.get(word)
        if e is not None:
            return e
        alg = self.algebra
        head = word[0]
        if len(word) == 1:
            e = self._d[head]
        else:
            rest = word[1:]
            x = alg.generator(head)
            e = alg.bracket(self._d[head], alg.right_normed(rest))
            tail = alg.bracket(x, self.d_word(rest))
            e = e - tail if alg.gens[head].degree % 2 else e + tail
        self._dword[word] = e
        return e

    def d(self, e: LieElement) -> LieElement:
        out = self.algebra.zero()
        for w, c in e.terms.items():
            out = out + self.d_word(w) * c
        return out

    # -- validation --------------------------------------------------------
    def problems(self) -> list[str]:
        out = []
        for g, de in zip(self.gens, self._d):
            if de.is_zero():
                continue
            if not de.is_homogeneous() or de.degree != g.degree - 1:
                out.append(f"degree mismatch at {g.name}: |d{g.name}| must be {g.degree - 1}")
                continue
            if any(len(w) == 1 for w in de.terms):
                out.append(f"not minimal at {g.name}: d{g.name} has a linear term")
            if not self.d(de).is_zero():
                out.append(f"invalid attachment at {g.name}: d^2 {g.name} != 0")
        return out

    def check(self) -> None:
        probs = self.problems()
        if probs:
            raise ModelError("; ".join(probs))

    def is_minimal(self) -> bool:
        return all(len(w) > 1 for de in self._d for w in de.terms)

    def distinct_degrees(self) -> bool:
        degs = [g.degree for g in self.gens]
        return len(set(degs)) == len(degs)

    # -- linear algebra ----------------------------------------------------
    def coords(self, e: LieElement, degree: int) -> list[Fraction]:
        words = self.algebra.basis_words(degree)
        pos = {w: i for i, w in enumerate(words)}
        v = [Fraction(0)] * len(words)
        for w, c in e.terms.items():
            v[pos[w]] = Fraction(c)
        return v

    def element(self, vec: Sequence[Fraction], degree: int) -> LieElement:
        words = self.algebra.basis_words(degree)
        return self.algebra.element({w: c for w, c in zip(words, vec) if c})

    def boundary_rows(self, degree: int) -> list[list[Fraction]]:
        """Row i = coordinates of d(basis_i) for the degree ``degree`` basis."""
        rows = self._bmat.get(degree)
        if rows is None:
            if degree <= 1:
                rows = [[] for _ in self.algebra.basis_words(degree)]
            else:
                rows = [self.coords(self.d_word(w), degree - 1)
                        for w in self.algebra.basis_words(degree)]
            self._bmat[degree] = rows
        return rows

    def homology_degree(self, degree: int) -> "HomologyDegree":
        h = self._homology.get(degree)
        if h is None:
            h = HomologyDegree.compute(self, degree)
            self._homology[degree] = h
        return h

    def format(self) -> str:
        lines = [f"model {self.name}".rstrip()]
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.gens)
        lines.append(f"  generators: {gens}")
        for g, de in zip(self.gens, self._d):
            lines.append(f"  d({g.name}) = {de}")
        return "\n".join(lines)


@dataclass
class HomologyDegree:
    degree: int
    dim_space: int
    boundaries: list[list[Fraction]]  # RREF basis of the boundaries
    reps: list[list[Fraction]]        # cycle representatives
    _solver: list | None = field(default=None, repr=False)

    @classmethod
    def compute(cls, model: DGLModel, d: int) -> "HomologyDegree":
        n = model.algebra.dimension(d)
        rows = model.boundary_rows(d)
        m = len(model.algebra.basis_words(d - 1)) if d > 1 else 0
        cycles = linalg.nullspace(linalg.transpose(rows, m), n) if m else \
            [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        upper = model.boundary_rows(d + 1)
        bnd, _ = linalg.rref(upper, n) if upper else ([], [])
        reps = []
        cur = list(bnd)
        r = len(cur)
        zr, _ = linalg.rref(cycles, n) if cycles else ([], [])
        for z in zr:
            if linalg.rank(cur + [z]) > r:
                cur.append(z)
                r += 1
                reps.append(z)
        return cls(d, n, bnd, reps)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def class_coords(self, cycle: Sequence[Fraction]) -> list[Fraction]:
        """Coordinates of a cycle's class in terms of the representatives."""
        nb, nr = len(self.boundaries), len(self.reps)
        cols = self.boundaries + self.reps
        sol = linalg.solve(linalg.transpose(cols, self.dim_space), list(cycle), nb + nr) \
            if cols else ([], [])
        if sol is None:
            raise ModelError("not a cycle")
        return sol[0][nb:]


@dataclass
class HomologyTable:
    dims: dict[int, int]
    reps: dict[int, list[LieElement]]

    def ranks(self) -> dict[int, int]:
        """Nonzero ranks of rational homotopy, keyed by homotopy degree."""
        return {d + 1: n for d, n in self.dims.items() if n}


def homology(model: DGLModel, max_degree: int) -> HomologyTable:
    if max_degree > model.algebra.max_degree - 1:
        raise LieError(f"degree {max_degree} exceeds the degree cap {model.algebra.max_degree - 1}")
    dims, reps = {}, {}
    for d in range(1, max_degree + 1):
        h = model.homology_degree(d)
        dims[d] = h.dim
        reps[d] = [model.element(v, d) for v in h.reps]
    return HomologyTable(dims, reps)


def validate(model: DGLModel) -> list[str]:
    """Empty list when the model is a valid minimal DGL; otherwise the problems."""
    return model.problems()


# -- from spaces ---------------------------------------------------------------

def from_space(spec: SpaceSpec, max_degree: int | None = None) -> DGLModel:
    dims: dict[str, int] = {}
    gens = []
    for c in spec.cells:
        if c.name in dims:
            raise ModelError(f"duplicate name {c.name}")
        if c.is_sphere:
            if c.dim < 2:
                raise ModelError(f"sphere {c.name} has dimension {c.dim} < 2")
        else:
            if c.dim < 3:
                raise ModelError(f"cell {c.name} has dimension {c.dim} < 3")
            if c.attach != TORSION:
                deg = expr_degree(c.attach, dims)
                if deg is not None and deg != c.dim - 1:
                    raise ModelError(
                        f"degree mismatch: cell {c.name}:{c.dim} needs an attaching class "
                        f"of degree {c.dim - 1}, got {deg}")
        dims[c.name] = c.dim
        gens.append(Generator(c.name, c.dim - 1))
    kw = {} if max_degree is None else {"max_degree": max_degree}
    alg = FreeLieAlgebra(gens, **kw)
    diff = {}
    for c in spec.cells:
        if not c.is_sphere and c.attach != TORSION:
            diff[c.name] = expr_to_lie(c.attach, alg)
    model = DGLModel(alg, diff, name=spec.name, spec=spec)
    probs = model.problems()
    if probs:
        raise ModelError("invalid attachment: " + "; ".join(probs))
    return model


def homology_dim_B(spec: SpaceSpec, k: int | None = None) -> int:
    """Largest cell dimension in the first ``k`` cells (rational homology dimension)."""
    cells = spec.cells if k is None else spec.cells[:k]
    return max((c.dim for c in cells), default=0)


def is_rationally_trivial(attach: Expr | LieElement, model: DGLModel) -> bool:
    """Whether the attaching class vanishes in H(L(B))."""
    e = attach if isinstance(attach, LieElement) else expr_to_lie(attach, model.algebra)
    if e.is_zero():
        return True
    if not e.is_homogeneous():
        raise ModelError("degree mismatch")
    if not model.d(e).is_zero():
        raise ModelError("not a cycle")
    d = e.degree
    h = model.homology_degree(d)
    v = model.coords(e, d)
    return not any(h.class_coords(v))
