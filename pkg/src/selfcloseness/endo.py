"""Self-maps of Quillen models: constraints, self-closeness numbers, witnesses.

A DGL map out of a free Lie algebra is determined by the generator images,
so a general degree-preserving self-map is parametrized by a diagonal
parameter per generator plus one coefficient per other basis monomial of the
same degree.  Its homotopy action is read on H(L), which is the rational
homotopy of the space shifted down by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import constraints as C
from . import linalg
from .constraints import (ConstraintSystem, Equation, GenInfo, MonomialSystem, NseReport,
                          UnsupportedError, auto_group, diagonal_system, poly_terms)
from .dgl import DGLModel
from .glie import LieElement, Word
from .intmode import integer_monomial_analyze  # noqa: F401  (public re-export)


class LieMap:
    """A graded Lie algebra endomorphism given by generator images."""

    def __init__(self, model: DGLModel, images: Mapping[str, LieElement]):
        self.model = model
        alg = model.algebra
        self.images = [images.get(g.name, alg.zero()) for g in alg.gens]
        self._cache: dict[Word, LieElement] = {}

    def word(self, w: Word) -> LieElement:
        e = self._cache.get(w)
        if e is None:
            if len(w) == 1:
                e = self.images[w[0]]
            else:
                e = self.model.algebra.bracket(self.images[w[0]], self.word(w[1:]))
            self._cache[w] = e
        return e

    def __call__(self, e: LieElement) -> LieElement:
        out = self.model.algebra.zero()
        for w, c in e.terms.items():
            out = out + self.word(w) * c
        return out

    def is_chain_map(self) -> bool:
        m = self.model
        for i, g in enumerate(m.gens):
            if m.d(self.images[i]) != self(m.d_gen(i)):
                return False
        return True

    def homology_iso(self, degree: int) -> bool:
        h = self.model.homology_degree(degree)
        if h.dim == 0:
            return True
        rows = []
        for r in h.reps:
            img = self(self.model.element(r, degree))
            rows.append(h.class_coords(self.model.coords(img, degree)))
        return linalg.is_invertible(rows)


@dataclass
class ParamMap:
    model: DGLModel
    cs_names: list[str]
    ring: object
    own: dict[str, list[tuple[int, Word]]]   # generator -> [(variable, basis word)], diagonal first
    images: dict[str, LieElement]

    def format(self) -> dict[str, str]:
        return {k: str(v) for k, v in self.images.items()}

    def numeric(self, values: Mapping[int, Fraction]) -> dict[str, LieElement]:
        alg = self.model.algebra
        out = {}
        for gname, pairs in self.own.items():
            out[gname] = alg.element({w: values[v] for v, w in pairs if values.get(v)})
        return out


def parametrize(model: DGLModel) -> ParamMap:
    alg = model.algebra
    names: list[str] = []
    own: dict[str, list[tuple[int, Word]]] = {}
    for i, g in enumerate(alg.gens):
        words = [(i,)] + [w for w in alg.basis_words(g.degree) if w != (i,)]
        pairs = []
        for j, w in enumerate(words):
            pairs.append((len(names), w))
            names.append(f"l_{g.name}" if j == 0 else f"c_{g.name}_{j}")
        own[g.name] = pairs
    R, *gens = ConstraintSystem.make_ring(names) if names else (None,)
    images = {}
    for g in alg.gens:
        images[g.name] = alg.element({w: gens[v] for v, w in own[g.name]})
    return ParamMap(model, names, R, own, images)


def linear_cycle_generators(model: DGLModel) -> set[str]:
    """Generators u admitting a cycle with nonzero u-coordinate.

    For such u the class survives modulo decomposable classes, so an
    isomorphism on H_|u| forces the diagonal parameter to be nonzero.
    """
    out = set()
    alg = model.algebra
    for i, g in enumerate(alg.gens):
        if model.d_gen(i).is_zero():
            out.add(g.name)
            continue
        words = alg.basis_words(g.degree)
        rows = model.boundary_rows(g.degree)
        m = len(alg.basis_words(g.degree - 1))
        pos = words.index((i,))
        for z in linalg.nullspace(linalg.transpose(rows, m), len(words)):
            if z[pos]:
                out.add(g.name)
                break
    return out


def linear_homology(model: DGLModel, degree: int) -> list[list[Fraction]]:
    """Generator coordinates of degree-``degree`` cycles, as an RREF basis.

    Columns follow the generators of that degree in model order.  The span is
    the image of the cycles in the indecomposables, so a self-map inducing an
    isomorphism on H_degree restricts to an isomorphism of it.
    """
    alg = model.algebra
    gpos = [i for i, g in enumerate(alg.gens) if g.degree == degree]
    if not gpos:
        return []
    words = alg.basis_words(degree)
    cols = [words.index((i,)) for i in gpos]
    m = len(alg.basis_words(degree - 1)) if degree > 1 else 0
    if m:
        cycles = linalg.nullspace(linalg.transpose(model.boundary_rows(degree), m), len(words))
    else:
        cycles = [[Fraction(int(j == k)) for j in range(len(words))] for k in range(len(words))]
    proj = [[z[c] for c in cols] for z in cycles]
    proj = [r for r in proj if any(r)]
    if not proj:
        return []
    R, _ = linalg.rref(proj, len(cols))
    return [r for r in R if any(r)]


def _quillen_facts(model: DGLModel, cs: ConstraintSystem):
    """Nonzero polynomials forced by an isomorphism on homotopy up to degree k."""
    notes = []
    per_degree = {}
    for d in sorted({g.degree for g in cs.gens}):
        basis = linear_homology(model, d)
        if not basis:
            continue
        gpos = [i for i, g in enumerate(cs.gens) if g.degree == d]
        coordinate = all(sum(1 for x in r if x) == 1 for r in basis)
        if not coordinate:
            notes.append(f"degree {d}: linear homology is not spanned by generators; not used")
            continue
        support = [gpos[next(j for j, x in enumerate(r) if x)] for r in basis]
        per_degree[d] = C.det_terms(cs, support)

    def facts_at(k: int):
        return [t for d, t in per_degree.items() if d + 1 <= k]

    return facts_at, notes


def _coefficient_terms(c):
    if hasattr(c, "terms"):
        return poly_terms(c)
    return [((), Fraction(c))]


def derive_constraints(model: DGLModel, pmap: ParamMap | None = None) -> ConstraintSystem:
    pmap = pmap or parametrize(model)
    alg = model.algebra
    f = LieMap(model, pmap.images)
    cycles = linear_cycle_generators(model)
    gens, eqs = [], []
    for i, g in enumerate(alg.gens):
        pairs = pmap.own[g.name]
        linear = {j: v for v, w in pairs[1:] if len(w) == 1 for j in w}
        gens.append(GenInfo(g.name, g.degree, pairs[0][0], [v for v, _ in pairs],
                            [alg.format_word(w) for _, w in pairs], g.degree + 1, g.name in cycles,
                            linear))
        diff = model.d(pmap.images[g.name]) - f(model.d_gen(i))
        for w in sorted(diff.terms, key=lambda w: (len(w), w)):
            eqs.append(Equation(i, alg.format_word(w), _coefficient_terms(diff.terms[w])))
    cs = ConstraintSystem(pmap.cs_names, gens, eqs)
    cs.pmap = pmap
    return cs


def _check_supported(model: DGLModel, allow_blocks: bool = False) -> None:
    if not allow_blocks and not model.distinct_degrees():
        raise UnsupportedError("unsupported: same-degree generators")
    if not model.is_minimal():
        raise UnsupportedError("unsupported: non-minimal model")


def linear_part_invertible(model: DGLModel, f: LieMap) -> bool:
    """The linear part is invertible on every degree, i.e. f is an equivalence."""
    alg = model.algebra
    for d in sorted({g.degree for g in alg.gens}):
        gpos = [i for i, g in enumerate(alg.gens) if g.degree == d]
        rows = [[f.images[i].coefficient((j,)) for j in gpos] for i in gpos]
        if not linalg.is_invertible(rows):
            return False
    return True


def witness_level(model: DGLModel, images: Mapping[str, LieElement]) -> int | None:
    """Largest k for which the map certifies N > k, or None if it certifies nothing."""
    f = LieMap(model, images)
    if not f.is_chain_map():
        return None
    if linear_part_invertible(model, f):
        return None
    for d in range(1, model.top_degree() + 1):
        if not f.homology_iso(d):
            return d
    raise C.InvariantError("map with a vanishing linear part is a quasi-isomorphism")


def witness_verify(model: DGLModel, images: Mapping[str, LieElement], k: int) -> bool:
    """Chain map, iso on H_d for d <= k-1, and not an equivalence."""
    f = LieMap(model, images)
    if not f.is_chain_map():
        return False
    if linear_part_invertible(model, f):
        return False
    return all(f.homology_iso(d) for d in range(1, k))


def _analysis_hooks(model: DGLModel, cs: ConstraintSystem):
    pmap: ParamMap = cs.pmap
    top = model.top_degree()
    pos = {g.name: i for i, g in enumerate(cs.gens)}

    def numeric(values):
        return pmap.numeric(values)

    def level_of(values):
        return witness_level(model, numeric(values))

    blocky = not model.distinct_degrees()

    def level_bound(nonzero):
        b = top
        if blocky:
            return b
        for g in cs.gens:
            if pos[g.name] not in nonzero and g.forced:
                b = min(b, g.degree)
        return b

    def describe(values):
        return {k: str(v) for k, v in numeric(values).items()}

    return level_of, level_bound, describe


def nse(model: DGLModel, cs: ConstraintSystem | None = None, allow_blocks: bool = False) -> NseReport:
    """Self-closeness number of a minimal model.

    Same-degree generators are refused unless ``allow_blocks``; then only the
    sound rational bounds are reported (degree blocks replace diagonal entries).
    """
    if not model.gens:
        return NseReport(0, 0, 0, C.CERTIFIED, [], 0, None, (0, 0), None, ["no generators"])
    _check_supported(model, allow_blocks)
    cs = cs or derive_constraints(model)
    level_of, level_bound, describe = _analysis_hooks(model, cs)
    facts_at, notes = _quillen_facts(model, cs)
    top = model.top_degree()
    report = C.analyze(cs, level_of=level_of, level_bound=level_bound, describe=describe,
                       fallback_hi=top + 1, top_cell=top + 1, facts_at=facts_at)
    report.notes.extend(notes)
    return report


def group(model: DGLModel, cs: ConstraintSystem | None = None) -> C.GroupReport:
    _check_supported(model)
    cs = cs or derive_constraints(model)
    ms = diagonal_system(cs)
    order = sorted(range(len(cs.gens)), key=lambda i: (cs.gens[i].degree, i))
    return auto_group(ms, order)


__all__ = [
    "LieMap", "ParamMap", "parametrize", "derive_constraints", "diagonal_system", "auto_group",
    "nse", "group", "witness_verify", "witness_level", "linear_cycle_generators",
    "integer_monomial_analyze", "MonomialSystem",
]
