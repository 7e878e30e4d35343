"""Sullivan models, cohomology algebras and their self-maps.

Elements of a free graded-commutative algebra are dicts from exponent tuples
to coefficients, monomials written in generator order.  Odd generators
square to zero and anticommute, so multiplying two monomials moves the odd
factors of the right one past the odd factors of the left one with higher
index, a sign per transposition.

Finite cohomology algebras are stored by basis and structure constants, which
keeps Poincare-duality pairings, endomorphisms and bijectivity pure linear
algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from . import constraints as C
from . import linalg
from .constraints import ConstraintSystem, Equation, GenInfo, NseReport, UnsupportedError, poly_terms
from .textparse import ParseError, PolySum, Power, parse_poly_text

Mono = tuple[int, ...]


class AlgebraError(ValueError):
    """Ill-formed algebra, model or map."""


# -- free graded-commutative algebras ---------------------------------------------

class FreeGC:
    """The free graded-commutative algebra on named generators of positive degree."""

    def __init__(self, gens: Sequence[tuple[str, int]]):
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate generator name")
        for n, d in gens:
            if d < 1:
                raise AlgebraError(f"generator {n} has degree {d} < 1")
        self.names = names
        self.degrees = [d for _, d in gens]
        self.odd = [d % 2 == 1 for d in self.degrees]
        self._index = {n: i for i, n in enumerate(names)}
        self._monos: dict[int, list[Mono]] = {}

    @property
    def ngens(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlgebraError(f"undeclared name {name}") from None

    def unit_mono(self) -> Mono:
        return (0,) * self.ngens

    def gen_mono(self, i: int) -> Mono:
        return tuple(int(j == i) for j in range(self.ngens))

    def mono_degree(self, m: Mono) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def monomials(self, k: int) -> list[Mono]:
        """Monomials of degree k, in lexicographic order of exponent tuples (descending)."""
        out = self._monos.get(k)
        if out is None:
            out = []

            def rec(i, left, cur):
                if i == self.ngens:
                    if left == 0:
                        out.append(tuple(cur))
                    return
                d = self.degrees[i]
                top = 1 if self.odd[i] else left // d
                for e in range(min(top, left // d), -1, -1):
                    cur.append(e)
                    rec(i + 1, left - e * d, cur)
                    cur.pop()

            if k >= 0:
                rec(0, k, [])
            self._monos[k] = out
        return out

    def mono_mul(self, a: Mono, b: Mono) -> tuple[int, Mono] | None:
        sign = 1
        for i in range(self.ngens):
            if not self.odd[i]:
                continue
            if a[i] and b[i]:
                return None
            if b[i]:
                # b's odd generator i moves past a's odd generators j > i
                for j in range(i + 1, self.ngens):
                    if self.odd[j] and a[j]:
                        sign = -sign
        return sign, tuple(x + y for x, y in zip(a, b))

    def mul(self, x: Mapping[Mono, object], y: Mapping[Mono, object]) -> dict[Mono, object]:
        out: dict[Mono, object] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                r = self.mono_mul(a, b)
                if r is None:
                    continue
                s, m = r
                v = ca * cb if s > 0 else -(ca * cb)
                if m in out:
                    v = out[m] + v
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    @staticmethod
    def add(x: Mapping[Mono, object], y: Mapping[Mono, object], scale=1) -> dict[Mono, object]:
        out = dict(x)
        for m, c in y.items():
            v = out[m] + c * scale if m in out else c * scale
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def power(self, x: Mapping[Mono, object], n: int) -> dict[Mono, object]:
        out = {self.unit_mono(): 1}
        for _ in range(n):
            out = self.mul(out, x)
        return out

    def element_degree(self, x: Mapping[Mono, object]) -> int | None:
        degs = {self.mono_degree(m) for m, c in x.items() if c}
        if len(degs) > 1:
            raise AlgebraError("inhomogeneous element")
        return degs.pop() if degs else None

    def format_mono(self, m: Mono) -> str:
        parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(self.names, m) if e]
        return "*".join(parts) or "1"

    def format(self, x: Mapping[Mono, object]) -> str:
        if not x:
            return "0"
        parts = []
        for m in sorted(x, key=lambda m: tuple(-e for e in m)):
            c = x[m]
            mono = self.format_mono(m)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def from_ast(self, p: PolySum, uses=()) -> dict[Mono, Fraction]:
        for name, tok in uses:
            if name not in self._index:
                raise ParseError(f"undeclared name {name}", tok.line, tok.col)
        return self._eval(p)

    def _eval(self, p: PolySum) -> dict[Mono, Fraction]:
        out: dict[Mono, Fraction] = {}
        for c, factors in p.terms:
            term: dict[Mono, Fraction] = {self.unit_mono(): Fraction(c)}
            for f in factors:
                if isinstance(f, Power):
                    g = {self.gen_mono(self.index(f.name)): Fraction(1)}
                    term = self.mul(term, self.power(g, f.exp))
                else:
                    term = self.mul(term, self._eval(f))
            out = self.add(out, term)
        return out

    def parse(self, text: str) -> dict[Mono, Fraction]:
        p, uses = parse_poly_text(text)
        return self.from_ast(p, uses)

    def vector(self, x: Mapping[Mono, object], k: int) -> list:
        monos = self.monomials(k)
        pos = {m: i for i, m in enumerate(monos)}
        v = [Fraction(0)] * len(monos)
        for m, c in x.items():
            if m not in pos:
                raise AlgebraError("element of the wrong degree")
            v[pos[m]] = c
        return v


# -- Sullivan models ------------------------------------------------------------

class SullivanModel:
    """A free graded-commutative dga (Lambda V, d) with d of degree +1."""

    def __init__(self, gens: Sequence[tuple[str, int]], differential: Mapping[str, object] | None = None,
                 name: str = "", max_degree: int = 40):
        for n, d in gens:
            if d < 2:
                raise AlgebraError(f"generator {n} has degree {d} < 2")
        self.free = FreeGC(gens)
        self.name = name
        self.max_degree = max_degree
        self._d: list[dict[Mono, Fraction]] = [{} for _ in gens]
        for gname, val in (differential or {}).items():
            i = self.free.index(gname)
            if isinstance(val, str):
                val = self.free.parse(val)
            self._d[i] = {m: Fraction(c) for m, c in val.items() if c}
        self._dmono: dict[Mono, dict] = {}
        self._dmat: dict[int, list[list[Fraction]]] = {}

    @property
    def names(self) -> list[str]:
        return self.free.names

    @property
    def degrees(self) -> list[int]:
        return self.free.degrees

    def d_gen(self, i: int | str) -> dict[Mono, Fraction]:
        if isinstance(i, str):
            i = self.free.index(i)
        return self._d[i]

    def d_mono(self, m: Mono) -> dict[Mono, Fraction]:
        out = self._dmono.get(m)
        if out is not None:
            return out
        F = self.free
        out = {}
        prefix_deg = 0
        for i, e in enumerate(m):
            if not e:
                continue
            prefix = tuple(m[j] if j < i else 0 for j in range(F.ngens))
            suffix = tuple(m[j] if j > i else 0 for j in range(F.ngens))
            lower = tuple(e - 1 if j == i else 0 for j in range(F.ngens))
            piece = F.mul({lower: Fraction(e)}, self._d[i])          # d(x^e) = e x^(e-1) dx
            piece = F.mul(F.mul({prefix: Fraction(1)}, piece), {suffix: Fraction(1)})
            out = F.add(out, piece, -1 if prefix_deg % 2 else 1)
            prefix_deg += e * F.degrees[i]
        self._dmono[m] = out
        return out

    def d(self, x: Mapping[Mono, object]) -> dict[Mono, object]:
        out: dict[Mono, object] = {}
        for m, c in x.items():
            out = self.free.add(out, self.d_mono(m), c)
        return out

    def problems(self) -> list[str]:
        out = []
        F = self.free
        for i, n in enumerate(self.names):
            de = self._d[i]
            if not de:
                continue
            try:
                deg = F.element_degree(de)
            except AlgebraError:
                deg = -1
            if deg != F.degrees[i] + 1:
                out.append(f"degree mismatch at {n}: |d{n}| must be {F.degrees[i] + 1}")
                continue
            if self.d(de):
                out.append(f"d^2 {n} != 0")
        return out

    def check(self) -> None:
        probs = self.problems()
        if probs:
            raise AlgebraError("; ".join(probs))

    def is_minimal(self) -> bool:
        return all(sum(m) > 1 for de in self._d for m in de)

    def distinct_degrees(self) -> bool:
        return len(set(self.degrees)) == len(self.degrees)

    def d_matrix(self, k: int) -> list[list[Fraction]]:
        """Row i = coordinates of d(monomial_i) for degree k monomials."""
        rows = self._dmat.get(k)
        if rows is None:
            rows = [self.free.vector(self.d_mono(m), k + 1) for m in self.free.monomials(k)]
            self._dmat[k] = rows
        return rows

    def cohomology(self, max_degree: int) -> list[int]:
        """dim H^k for k = 0..max_degree."""
        if max_degree > self.max_degree:
            raise AlgebraError(f"degree {max_degree} exceeds the degree cap {self.max_degree}")
        dims = []
        prev_rank = 0
        for k in range(max_degree + 1):
            n = len(self.free.monomials(k))
            rows = self.d_matrix(k)
            r = linalg.rank(rows) if rows and rows[0] else 0
            dims.append(n - r - prev_rank)
            prev_rank = r
        return dims

    def format(self) -> str:
        lines = [f"sullivan {self.name} {{"]
        for n, d in zip(self.names, self.degrees):
            lines.append(f"  gen {n}:{d}")
        for n, de in zip(self.names, self._d):
            if de:
                lines.append(f"  d {n} = {self.free.format(de)}")
        lines.append("}")
        return "\n".join(lines)


# -- finite graded-commutative algebras ---------------------------------------------

class GCAlgebra:
    """Finite graded-commutative algebra: basis with degrees and structure constants.

    Basis element 0 is the unit.  ``table[(i, j)]`` holds the nonzero product
    b_i * b_j as a sparse vector for i, j > 0.  Algebras built from generators
    remember each basis element as a monomial in ``gens`` (``monos``), which
    lets endomorphisms be given by generator images.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 table: Mapping[tuple[int, int], Mapping[int, Fraction]], name: str = "",
                 gens: Sequence[tuple[str, int]] | None = None, monos: Sequence[Mono] | None = None):
        if not names or degrees[0] != 0:
            raise AlgebraError("basis element 0 must be the unit")
        self.names = list(names)
        self.degrees = list(degrees)
        self.table = {k: {i: Fraction(c) for i, c in v.items() if c} for k, v in table.items()}
        self.table = {k: v for k, v in self.table.items() if v}
        self.name = name
        self.gens = list(gens or [])
        self.monos = list(monos) if monos is not None else None
        if self.monos is not None and self.gens:
            F = FreeGC(self.gens)
            self.names = [nm if nm == "Omega" else F.format_mono(m) for nm, m in zip(self.names, self.monos)]
        self.n = len(self.names)

    # -- structure -------------------------------------------------------------
    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    def basis_in(self, k: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == k]

    def dim(self, k: int) -> int:
        return len(self.basis_in(k))

    def dims(self, upto: int | None = None) -> list[int]:
        top = self.top_degree if upto is None else upto
        return [self.dim(k) for k in range(top + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.degrees)

    def zero(self) -> list:
        return [Fraction(0)] * self.n

    def unit(self) -> list:
        v = self.zero()
        v[0] = Fraction(1)
        return v

    def basis_vector(self, i: int) -> list:
        v = self.zero()
        v[i] = Fraction(1)
        return v

    def mul_basis(self, i: int, j: int) -> dict[int, Fraction]:
        if i == 0:
            return {j: Fraction(1)}
        if j == 0:
            return {i: Fraction(1)}
        return self.table.get((i, j), {})

    def mul(self, x: Sequence, y: Sequence) -> list:
        """Product of two vectors; coefficients may be any ring elements."""
        out = [0] * self.n
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.mul_basis(i, j).items():
                    out[k] = out[k] + a * b * c
        return out

    def check_axioms(self) -> list[str]:
        """Problems with graded commutativity, associativity or degrees (empty when fine)."""
        probs = []
        for (i, j), v in self.table.items():
            for k in v:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    probs.append(f"degree violation in {self.names[i]}*{self.names[j]}")
        for i in range(1, self.n):
            for j in range(1, self.n):
                s = -1 if self.degrees[i] % 2 and self.degrees[j] % 2 else 1
                ab = self.mul_basis(i, j)
                ba = self.mul_basis(j, i)
                if ab != {k: s * c for k, c in ba.items()}:
                    probs.append(f"graded commutativity fails for {self.names[i]}, {self.names[j]}")
        for i, j, k in itertools.product(range(1, self.n), repeat=3):
            left = self.mul(self.mul(self.basis_vector(i), self.basis_vector(j)), self.basis_vector(k))
            right = self.mul(self.basis_vector(i), self.mul(self.basis_vector(j), self.basis_vector(k)))
            if left != right:
                probs.append(f"associativity fails for {self.names[i]}, {self.names[j]}, {self.names[k]}")
        return probs

    def format_vector(self, v: Sequence) -> str:
        parts = []
        for c, nm in zip(v, self.names):
            if not c:
                continue
            if c == 1:
                parts.append(nm)
            elif c == -1:
                parts.append("-" + nm)
            else:
                parts.append(f"{c}*{nm}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def to_dict(self) -> dict:
        prods = []
        for (i, j), v in sorted(self.table.items()):
            if i <= j:
                prods.append(f"{self.names[i]}*{self.names[j]} = {self.format_vector(self._dense(v))}")
        return {"name": self.name, "basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
                "dims": self.dims(), "products": prods}

    def _dense(self, v: Mapping[int, Fraction]) -> list:
        out = self.zero()
        for k, c in v.items():
            out[k] = c
        return out

    # -- constructors ------------------------------------------------------------
    @classmethod
    def from_presentation(cls, gens: Sequence[tuple[str, int]], relations: Sequence[object],
                          truncate: int, name: str = "") -> "GCAlgebra":
        """Quotient of the free graded-commutative algebra by relations, zero above ``truncate``."""
        F = FreeGC(gens)
        rels = [F.parse(r) if isinstance(r, str) else dict(r) for r in relations]
        rels = [r for r in rels if r]
        rel_deg = [F.element_degree(r) for r in rels]
        std: dict[int, list[Mono]] = {}
        reducers: dict[int, tuple[list, list[int], list[Mono]]] = {}
        for k in range(truncate + 1):
            monos = F.monomials(k)
            rows = []
            for r, dr in zip(rels, rel_deg):
                for m in F.monomials(k - dr):
                    rows.append(F.vector(F.mul({m: Fraction(1)}, r), k))
            n = len(monos)
            cols = list(reversed(range(n)))
            R, piv = linalg.rref([[row[c] for c in cols] for row in rows], n) if rows else ([], [])
            pivots = {cols[p] for p in piv}
            std[k] = [m for i, m in enumerate(monos) if i not in pivots]
            reducers[k] = (R, [cols[p] for p in piv], monos)
        names, degrees, monos_out = ["1"], [0], [F.unit_mono()]
        index: dict[Mono, int] = {F.unit_mono(): 0}
        for k in range(1, truncate + 1):
            for m in std[k]:
                index[m] = len(names)
                names.append(F.format_mono(m))
                degrees.append(k)
                monos_out.append(m)

        def normal(x: Mapping[Mono, Fraction]) -> dict[int, Fraction]:
            deg = F.element_degree(x)
            if deg is None or deg > truncate:
                return {}
            R, pcols, monos = reducers[deg]
            v = F.vector(x, deg)
            n = len(monos)
            cols = list(reversed(range(n)))
            for row, pc in zip(R, pcols):
                c = v[pc]
                if c:
                    for j in range(n):
                        if row[j]:
                            v[cols[j]] -= c * row[j]
            return {index[monos[i]]: c for i, c in enumerate(v) if c}

        table = {}
        for i in range(1, len(names)):
            for j in range(1, len(names)):
                if degrees[i] + degrees[j] > truncate:
                    continue
                prod = F.mul({monos_out[i]: Fraction(1)}, {monos_out[j]: Fraction(1)})
                v = normal(prod)
                if v:
                    table[(i, j)] = v
        return cls(names, degrees, table, name=name, gens=list(gens), monos=monos_out)

    @classmethod
    def from_sullivan(cls, sm: SullivanModel, max_degree: int, name: str | None = None) -> "GCAlgebra":
        """Cohomology algebra H^{<=max_degree}(Lambda V, d) with chosen cocycle representatives."""
        F = sm.free
        reps: list[tuple[int, list]] = []   # (degree, vector) per basis element
        solvers = {}
        for k in range(max_degree + 1):
            n = len(F.monomials(k))
            if n == 0:
                solvers[k] = None
                continue
            rows = sm.d_matrix(k)
            m = len(F.monomials(k + 1))
            cycles = linalg.nullspace(linalg.transpose(rows, m), n) if m else \
                [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
            prev = sm.d_matrix(k - 1) if k > 0 else []
            bnd, _ = linalg.rref(prev, n) if prev else ([], [])
            bnd = [r for r in bnd if any(r)]
            cur, r = list(bnd), len(bnd)
            zr, _ = linalg.rref(cycles, n) if cycles else ([], [])
            mine = []
            for z in zr:
                if any(z) and linalg.rank(cur + [z]) > r:
                    cur.append(z)
                    r += 1
                    mine.append(z)
            solvers[k] = (bnd, mine, n)
            for z in mine:
                reps.append((k, z))
        names = []
        for idx, (k, z) in enumerate(reps):
            terms = {m: c for m, c in zip(F.monomials(k), z) if c}
            names.append("1" if k == 0 else f"[{F.format(terms)}]")
        degrees = [k for k, _ in reps]
        start = {}
        for idx, (k, _) in enumerate(reps):
            start.setdefault(k, idx)

        def classes(vec, k) -> dict[int, Fraction]:
            bnd, mine, n = solvers[k]
            cols = bnd + mine
            sol = linalg.solve(linalg.transpose(cols, n), list(vec), len(cols))
            if sol is None:
                raise C.InvariantError("product of cocycles is not a cocycle")
            coords = sol[0][len(bnd):]
            return {start[k] + i: c for i, c in enumerate(coords) if c}

        table = {}
        for i, (ki, zi) in enumerate(reps):
            for j, (kj, zj) in enumerate(reps):
                if ki == 0 or kj == 0 or ki + kj > max_degree or solvers.get(ki + kj) is None:
                    continue
                a = {m: c for m, c in zip(F.monomials(ki), zi) if c}
                b = {m: c for m, c in zip(F.monomials(kj), zj) if c}
                v = classes(F.vector(F.mul(a, b), ki + kj), ki + kj)
                if v:
                    table[(i, j)] = v
        return cls(names, degrees, table, name=name if name is not None else f"H({sm.name})")


def _embed_mono(m: Mono, gmap: Sequence[int], ngens: int) -> Mono:
    out = [0] * ngens
    for i, e in enumerate(m):
        out[gmap[i]] += e
    return tuple(out)


def _combine_gens(A: GCAlgebra, B: GCAlgebra):
    if A.monos is None or B.monos is None:
        return None, None, None
    names = [n for n, _ in A.gens]
    gens = list(A.gens)
    bmap = []
    for n, d in B.gens:
        nn = n if n not in names else f"{n}'"
        while nn in names:
            nn += "'"
        names.append(nn)
        gens.append((nn, d))
        bmap.append(len(gens) - 1)
    amap = list(range(len(A.gens)))
    return gens, amap, bmap


def wedge(A: GCAlgebra, B: GCAlgebra, name: str | None = None) -> GCAlgebra:
    """Cohomology of a one-point union: reduced parts side by side, cross products zero."""
    gens, amap, bmap = _combine_gens(A, B)
    names, degrees, monos = ["1"], [0], [(0,) * len(gens)] if gens is not None else None
    ia, ib = {0: 0}, {0: 0}
    for i in range(1, A.n):
        ia[i] = len(names)
        names.append(A.names[i])
        degrees.append(A.degrees[i])
        if gens is not None:
            monos.append(_embed_mono(A.monos[i], amap, len(gens)))
    for i in range(1, B.n):
        ib[i] = len(names)
        nm = B.names[i] if B.names[i] not in names else B.names[i] + "'"
        names.append(nm)
        degrees.append(B.degrees[i])
        if gens is not None:
            monos.append(_embed_mono(B.monos[i], bmap, len(gens)))
    table = {}
    for src, im in ((A, ia), (B, ib)):
        for (i, j), v in src.table.items():
            table[(im[i], im[j])] = {im[k]: c for k, c in v.items()}
    return GCAlgebra(names, degrees, table, name=name or f"{A.name} v {B.name}", gens=gens, monos=monos)


def connected_sum(A: GCAlgebra, B: GCAlgebra, name: str | None = None) -> GCAlgebra:
    """Cohomology of a connected sum of two Poincare-duality algebras of the same top degree."""
    pa, pb = pd_check(A), pd_check(B)
    if pa.n != pb.n:
        raise AlgebraError(f"top degrees differ: {pa.n} and {pb.n}")
    if not (pa.ok and pb.ok):
        raise AlgebraError("connected sum needs Poincare-duality algebras")
    n = pa.n
    gens, amap, bmap = _combine_gens(A, B)
    names, degrees = ["1"], [0]
    monos = [(0,) * len(gens)] if gens is not None else None
    ia, ib = {0: 0}, {0: 0}
    for src, im, gm in ((A, ia, amap), (B, ib, bmap)):
        for i in range(1, src.n):
            if src.degrees[i] == n:
                continue
            im[i] = len(names)
            nm = src.names[i] if src.names[i] not in names else src.names[i] + "'"
            names.append(nm)
            degrees.append(src.degrees[i])
            if gens is not None:
                monos.append(_embed_mono(src.monos[i], gm, len(gens)))
    omega = len(names)
    names.append("Omega")
    degrees.append(n)
    if gens is not None:
        monos.append(_embed_mono(A.monos[pa.omega], amap, len(gens)))
    ia[pa.omega] = omega
    ib[pb.omega] = omega
    table = {}
    for src, im in ((A, ia), (B, ib)):
        for (i, j), v in src.table.items():
            if i not in im or j not in im:
                continue
            out = {}
            for k, c in v.items():
                out[im[k]] = out.get(im[k], Fraction(0)) + c
            table[(im[i], im[j])] = out
    return GCAlgebra(names, degrees, table, name=name or f"{A.name} # {B.name}", gens=gens, monos=monos)


def tensor(A: GCAlgebra, B: GCAlgebra, name: str | None = None) -> GCAlgebra:
    """Cohomology of a product: (a x b)(a' x b') = (-1)^{|b||a'|} aa' x bb'."""
    gens, amap, bmap = _combine_gens(A, B)
    pairs = sorted(itertools.product(range(A.n), range(B.n)),
                   key=lambda p: (A.degrees[p[0]] + B.degrees[p[1]], p))
    pos = {p: i for i, p in enumerate(pairs)}
    names, degrees, monos = [], [], [] if gens is not None else None
    for i, j in pairs:
        if i == 0:
            names.append(B.names[j])
        elif j == 0:
            names.append(A.names[i])
        else:
            names.append(f"{A.names[i]}*{B.names[j]}")
        degrees.append(A.degrees[i] + B.degrees[j])
        if gens is not None:
            ma, mb = _embed_mono(A.monos[i], amap, len(gens)), _embed_mono(B.monos[j], bmap, len(gens))
            monos.append(tuple(x + y for x, y in zip(ma, mb)))
    table = {}
    for (a, b), (a2, b2) in itertools.product(pairs, repeat=2):
        if (a, b) == (0, 0) or (a2, b2) == (0, 0):
            continue
        pa, pb = A.mul_basis(a, a2), B.mul_basis(b, b2)
        if not pa or not pb:
            continue
        s = -1 if B.degrees[b] % 2 and A.degrees[a2] % 2 else 1
        out = {}
        for k, c in pa.items():
            for l, e in pb.items():
                out[pos[(k, l)]] = out.get(pos[(k, l)], Fraction(0)) + s * c * e
        table[(pos[(a, b)], pos[(a2, b2)])] = out
    return GCAlgebra(names, degrees, table, name=name or f"{A.name} x {B.name}", gens=gens, monos=monos)


# -- Poincare duality ------------------------------------------------------------

@dataclass
class PDResult:
    ok: bool
    n: int
    omega: int
    degenerate: list[int] = field(default_factory=list)

    def to_dict(self, A: GCAlgebra) -> dict:
        return {"poincare_duality": self.ok, "top_degree": self.n, "fundamental_class": A.names[self.omega],
                "degenerate_degrees": self.degenerate}


def pd_check(A: GCAlgebra, n: int | None = None) -> PDResult:
    n = A.top_degree if n is None else n
    top = A.basis_in(n)
    if len(top) != 1:
        raise AlgebraError("no fundamental class")
    omega = top[0]
    bad = []
    for k in range(n + 1):
        lo, hi = A.basis_in(k), A.basis_in(n - k)
        if len(lo) != len(hi):
            bad.append(k)
            continue
        if not lo:
            continue
        M = [[A.mul_basis(i, j).get(omega, Fraction(0)) for j in hi] for i in lo]
        if not linalg.is_invertible(M):
            bad.append(k)
    return PDResult(not bad, n, omega, bad)


# -- endomorphisms -------------------------------------------------------------

class AlgebraEndo:
    """A degree-preserving linear self-map of a GCAlgebra, by images of all basis elements."""

    def __init__(self, A: GCAlgebra, images: Sequence[Sequence[Fraction]]):
        self.A = A
        self.images = [list(v) for v in images]
        for i, v in enumerate(self.images):
            for k, c in enumerate(v):
                if c and A.degrees[k] != A.degrees[i]:
                    raise AlgebraError("map does not preserve degrees")

    @classmethod
    def from_generator_images(cls, A: GCAlgebra, images: Mapping[str, Sequence[Fraction] | Mapping[str, object]]):
        if A.monos is None:
            raise AlgebraError("algebra has no generator presentation")
        gvec = []
        for gname, _ in A.gens:
            img = images.get(gname)
            if img is None:
                gvec.append(A.zero())
            elif isinstance(img, Mapping):
                v = A.zero()
                for bname, c in img.items():
                    v[A.names.index(bname)] = Fraction(c)
                gvec.append(v)
            else:
                gvec.append([Fraction(c) for c in img])
        out = []
        for m in A.monos:
            v = A.unit()
            for gi, e in enumerate(m):
                for _ in range(e):
                    v = A.mul(v, gvec[gi])
            out.append(v)
        return cls(A, out)

    def __call__(self, v: Sequence) -> list:
        out = self.A.zero()
        for i, c in enumerate(v):
            if c:
                for k, x in enumerate(self.images[i]):
                    if x:
                        out[k] += c * x
        return out

    def is_multiplicative(self) -> bool:
        A = self.A
        if self.images[0] != A.unit():
            return False
        for i in range(1, A.n):
            for j in range(1, A.n):
                lhs = self(A._dense(A.mul_basis(i, j)))
                if lhs != A.mul(self.images[i], self.images[j]):
                    return False
        return True

    def is_bijective(self) -> bool:
        A = self.A
        for k in sorted(set(A.degrees)):
            idx = A.basis_in(k)
            M = [[self.images[i][j] for j in idx] for i in idx]
            if not linalg.is_invertible(M):
                return False
        return True

    def top_scalar(self, pd: PDResult) -> Fraction:
        return self.images[pd.omega][pd.omega]


def scaling_implies_iso(A: GCAlgebra, f: AlgebraEndo) -> bool:
    """Whether f is bijective (checked against the fundamental-class scalar by the tests)."""
    if not f.is_multiplicative():
        raise AlgebraError("not an algebra map")
    return f.is_bijective()


def enumerate_endomorphisms(A: GCAlgebra, box: int = 2, limit: int = 200_000) -> list[AlgebraEndo]:
    """All algebra maps whose generator images have integer coordinates in [-box, box]."""
    if A.monos is None:
        raise AlgebraError("algebra has no generator presentation")
    slots = []
    for gname, d in A.gens:
        slots.append(A.basis_in(d))
    total = sum(len(s) for s in slots)
    if (2 * box + 1) ** total > limit:
        raise UnsupportedError(f"unsupported: endomorphism box of size {(2 * box + 1) ** total} too large")
    out = []
    for coords in itertools.product(range(-box, box + 1), repeat=total):
        it = iter(coords)
        images = {}
        for (gname, _), idx in zip(A.gens, slots):
            v = A.zero()
            for j in idx:
                v[j] = Fraction(next(it))
            images[gname] = v
        f = AlgebraEndo.from_generator_images(A, images)
        if f.is_multiplicative():
            out.append(f)
    return out


def random_endomorphisms(A: GCAlgebra, count: int, seed: int = 0, box: int = 2) -> list[AlgebraEndo]:
    """``count`` seeded draws (with replacement) from the box enumeration."""
    pool = enumerate_endomorphisms(A, box)
    rng = random.Random(seed)
    return [rng.choice(pool) for _ in range(count)]


# -- c-symplectic ------------------------------------------------------------------

@dataclass
class CSymplectic:
    csymplectic: bool
    n: int
    polynomial: str
    witness: dict[str, int] | None
    verdict: str

    def to_dict(self) -> dict:
        return {"c_symplectic": self.csymplectic, "top_degree": self.n, "top_power": self.polynomial,
                "witness": self.witness, "verdict": self.verdict}


def csymplectic_check(A: GCAlgebra) -> CSymplectic:
    """Existence of omega in degree 2 whose m-th power spans the top degree 2m."""
    pd = pd_check(A)
    n = pd.n
    if n % 2:
        raise AlgebraError("not even-dimensional")
    m = n // 2
    h2 = A.basis_in(2)
    if not h2:
        return CSymplectic(False, n, "0", None, "not c-symplectic: no degree-2 classes")
    ts = sympy.symbols(f"t0:{len(h2)}")
    omega = [sympy.Integer(0)] * A.n
    for t, i in zip(ts, h2):
        omega[i] = t
    power = [sympy.Integer(0)] * A.n
    power[0] = sympy.Integer(1)
    for _ in range(m):
        power = A.mul(power, omega)
        power = [sympy.Rational(0) if not c else c for c in power]
    poly = sympy.expand(sympy.sympify(power[pd.omega]) if power[pd.omega] else 0)
    if poly == 0:
        return CSymplectic(False, n, "0", None, f"not c-symplectic: omega^{m} vanishes for every omega")
    side = m * len(h2) + 1
    points = sorted(itertools.product(range(side), repeat=len(h2)), key=lambda p: (sum(p), p))
    for p in points:
        val = poly.subs(dict(zip(ts, p)))
        if val != 0:
            wit = {A.names[i]: int(x) for i, x in zip(h2, p) if x}
            w = " + ".join(f"{x}*{nm}" if x != 1 else nm for nm, x in wit.items())
            return CSymplectic(True, n, str(poly).replace("t", "t_").replace("**", "^"), wit,
                               f"c-symplectic: omega = {w}, omega^{m} = {val}*{A.names[pd.omega]} != 0, "
                               "hence N𝓔(X₀)=2")
    raise C.InvariantError("nonzero polynomial vanished on the whole grid")


# -- self-maps of Sullivan models -------------------------------------------------------

@dataclass
class SullivanParamMap:
    model: SullivanModel
    names: list[str]
    own: dict[str, list[tuple[int, Mono]]]
    images: dict[str, dict[Mono, object]]

    def numeric(self, values: Mapping[int, Fraction]) -> dict[str, dict[Mono, Fraction]]:
        return {g: {m: values[v] for v, m in pairs if values.get(v)} for g, pairs in self.own.items()}


def sullivan_parametrize(sm: SullivanModel) -> SullivanParamMap:
    F = sm.free
    names, own = [], {}
    for i, g in enumerate(sm.names):
        words = [F.gen_mono(i)] + [m for m in F.monomials(F.degrees[i]) if m != F.gen_mono(i)]
        pairs = []
        for j, m in enumerate(words):
            pairs.append((len(names), m))
            names.append(f"l_{g}" if j == 0 else f"c_{g}_{j}")
        own[g] = pairs
    R, *vars_ = ConstraintSystem.make_ring(names)
    images = {g: {m: vars_[v] for v, m in pairs} for g, pairs in own.items()}
    return SullivanParamMap(sm, names, own, images)


def apply_map(sm: SullivanModel, images: Mapping[str, Mapping[Mono, object]], x: Mapping[Mono, object]):
    """Image of an element under the algebra map given by generator images."""
    F = sm.free
    gimg = [dict(images.get(g, {})) for g in sm.names]
    out: dict[Mono, object] = {}
    for m, c in x.items():
        term = {F.unit_mono(): c}
        for i, e in enumerate(m):
            for _ in range(e):
                term = F.mul(term, gimg[i])
        out = F.add(out, term)
    return out


def sullivan_constraints(sm: SullivanModel, pmap: SullivanParamMap | None = None) -> ConstraintSystem:
    pmap = pmap or sullivan_parametrize(sm)
    F = sm.free
    gens, eqs = [], []
    for i, g in enumerate(sm.names):
        pairs = pmap.own[g]
        linear = {}
        for v, m in pairs[1:]:
            if sum(m) == 1:
                linear[m.index(1)] = v
        gens.append(GenInfo(g, F.degrees[i], pairs[0][0], [v for v, _ in pairs],
                            [F.format_mono(m) for _, m in pairs], F.degrees[i], True, linear))
        diff = F.add(sm.d(pmap.images[g]), apply_map(sm, pmap.images, sm.d_gen(i)), -1)
        for m in sorted(diff, key=lambda m: tuple(-e for e in m)):
            c = diff[m]
            terms = poly_terms(c) if hasattr(c, "terms") else [((), Fraction(c))]
            eqs.append(Equation(i, F.format_mono(m), terms))
    cs = ConstraintSystem(pmap.names, gens, eqs)
    cs.pmap = pmap
    return cs


def _linear_blocks_singular_degree(sm: SullivanModel, images) -> int | None:
    F = sm.free
    for d in sorted(set(F.degrees)):
        idx = [i for i, x in enumerate(F.degrees) if x == d]
        M = [[images[sm.names[i]].get(F.gen_mono(j), Fraction(0)) for j in idx] for i in idx]
        if not linalg.is_invertible(M):
            return d
    return None


def is_sullivan_chain_map(sm: SullivanModel, images) -> bool:
    F = sm.free
    for i, g in enumerate(sm.names):
        if F.add(sm.d(images[g]), apply_map(sm, images, sm.d_gen(i)), -1):
            return False
    return True


def sullivan_witness_verify(sm: SullivanModel, images, k: int) -> bool:
    """Chain map, isomorphism on homotopy through degree k, not an equivalence."""
    if not is_sullivan_chain_map(sm, images):
        return False
    d = _linear_blocks_singular_degree(sm, images)
    return d is not None and d > k


def sullivan_diagonal_nse(sm: SullivanModel, allow_blocks: bool = False) -> NseReport:
    """Self-closeness number of a minimal Sullivan model (generator v seen in homotopy degree |v|)."""
    if not sm.names:
        return NseReport(0, 0, 0, C.CERTIFIED, [], 0, None, (0, 0), None, ["no generators"])
    if not allow_blocks and not sm.distinct_degrees():
        raise UnsupportedError("unsupported: same-degree generators")
    if not sm.is_minimal():
        raise UnsupportedError("unsupported: non-minimal model")
    sm.check()
    cs = sullivan_constraints(sm)
    pmap: SullivanParamMap = cs.pmap
    top = max(sm.degrees)
    blocky = not sm.distinct_degrees()
    F = sm.free

    def level_of(values):
        images = pmap.numeric(values)
        if not is_sullivan_chain_map(sm, images):
            return None
        d = _linear_blocks_singular_degree(sm, images)
        return None if d is None else d - 1

    def level_bound(nonzero):
        if blocky:
            return top
        zeros = [cs.gens[i].degree for i in range(len(cs.gens)) if i not in nonzero]
        return min(zeros) - 1 if zeros else -1

    def describe(values):
        return {g: F.format(v) for g, v in pmap.numeric(values).items()}

    blocks = {}
    for d in sorted(set(sm.degrees)):
        blocks[d] = C.det_terms(cs, [i for i, x in enumerate(sm.degrees) if x == d])

    def facts_at(k):
        return [t for d, t in blocks.items() if d <= k]

    return C.analyze(cs, level_of=level_of, level_bound=level_bound, describe=describe,
                     fallback_hi=top, top_cell=None, facts_at=facts_at)


# -- formality of two-stage complexes ----------------------------------------------------

@dataclass
class FormalityVerdict:
    hypotheses: list[tuple[str, bool]]
    nse: int | None
    n: int
    formal: bool | None
    split: bool | None
    reason: str

    def to_dict(self) -> dict:
        return {"hypotheses": [{"condition": c, "holds": ok} for c, ok in self.hypotheses],
                "nse": self.nse, "top_cell": self.n, "formal": self.formal, "split": self.split,
                "verdict": self.reason}


def formality_two_stage(spec, max_degree: int | None = None) -> FormalityVerdict:
    """Formality of B u_gamma e^n for a wedge of spheres B, read off from the self-closeness number."""
    from . import dgl, endo

    cells = spec.cells
    if not cells or cells[-1].is_sphere:
        raise UnsupportedError("hypotheses not satisfied: the last cell must be a top cell e^n")
    top = cells[-1]
    n = top.dim
    B = dgl.SpaceSpec(f"{spec.name}:B", cells[:-1])
    hyps: list[tuple[str, bool]] = []
    wedge_ok = all(c.is_sphere for c in B.cells)
    hyps.append(("B is a wedge of spheres", wedge_ok))
    h = dgl.homology_dim_B(B)
    if 2 * h < n:
        hyps.append((f"2H_*-dim(B)={2 * h}<{n}=n", True))
    elif 2 * h == n:
        hyps.append((f"2H_*-dim(B)={2 * h}=n", False))
    else:
        hyps.append((f"2H_*-dim(B)={2 * h}>{n}=n", False))
    hyps.append((f"H_*-dim(B)={h}<={n - 2}=n-2", h <= n - 2))
    failing = [c for c, ok in hyps if not ok]
    if failing:
        raise UnsupportedError("hypotheses not satisfied: " + "; ".join(failing))
    model = dgl.from_space(spec, max_degree)
    bmodel = dgl.from_space(B, max_degree)
    trivial = top.attach == dgl.TORSION or dgl.is_rationally_trivial(top.attach, bmodel)
    hyps.append(("attaching class is rationally nonzero", not trivial))
    report = endo.nse(model)
    value = report.value
    if trivial:
        reason = f"attaching class is rationally trivial: X_0 splits as (B v S^{n})_0, formal, nse = {value}"
        return FormalityVerdict(hyps, value, n, True, True, reason)
    formal = value == n
    reason = (f"nse = {value} {'=' if formal else '!='} n = {n}, hence "
              f"{'formal' if formal else 'not formal'}")
    return FormalityVerdict(hyps, value, n, formal, formal, reason)
