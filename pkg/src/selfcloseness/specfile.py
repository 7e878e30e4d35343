"""Spec files: ``space``, ``algebra`` and ``sullivan`` blocks.

    space X { sphere a:3  sphere b:5  cell w:12 attach [a,[a,[a,b]]] + [b,[a,b]] }
    algebra CP2 { gen x:2  relation x^3  truncate 4 }
    sullivan CP2 { gen x:2  gen y:5  d y = x^3 }

Printing a parsed file gives its canonical form; parsing that again yields
the same objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from . import dgl
from .dgl import Cell, ModelError, SpaceSpec, TORSION
from .sul import AlgebraError, FreeGC, GCAlgebra, SullivanModel
from .textparse import ParseError, Stream, parse_bracket_sum, parse_poly, tokenize


@dataclass(frozen=True)
class AlgebraPresentation:
    name: str
    gens: tuple[tuple[str, int], ...]
    relations: tuple[str, ...]          # canonical polynomial text
    truncate: int

    def build(self) -> GCAlgebra:
        return GCAlgebra.from_presentation(list(self.gens), list(self.relations), self.truncate, self.name)

    def format(self) -> str:
        lines = [f"algebra {self.name} {{"]
        lines += [f"  gen {n}:{d}" for n, d in self.gens]
        lines += [f"  relation {r}" for r in self.relations]
        lines.append(f"  truncate {self.truncate}")
        lines.append("}")
        return "\n".join(lines)


Block = Union[SpaceSpec, AlgebraPresentation, SullivanModel]


@dataclass
class SpecFile:
    blocks: list[Block] = field(default_factory=list)

    def names(self) -> list[str]:
        return [b.name for b in self.blocks]

    def get(self, name: str | None = None) -> Block:
        if name is None:
            if not self.blocks:
                raise ParseError("empty spec file")
            return self.blocks[0]
        for b in self.blocks:
            if b.name == name:
                return b
        raise ParseError(f"no block named {name}")

    def format(self) -> str:
        return "\n\n".join(format_block(b) for b in self.blocks) + "\n"


def format_block(b: Block) -> str:
    return b.format()


def parse(text: str) -> SpecFile:
    s = Stream(tokenize(text))
    out = SpecFile()
    seen = set()
    while s.peek.kind != "end":
        kw = s.expect_name("'space', 'algebra' or 'sullivan'")
        name_tok = s.expect_name("block name")
        if name_tok.text in seen:
            raise s.error(f"duplicate block name {name_tok.text}", name_tok)
        seen.add(name_tok.text)
        s.expect("{")
        if kw.text == "space":
            out.blocks.append(_space(s, name_tok.text))
        elif kw.text == "algebra":
            out.blocks.append(_algebra(s, name_tok.text))
        elif kw.text == "sullivan":
            out.blocks.append(_sullivan(s, name_tok.text))
        else:
            raise s.error(f"unknown block kind {kw.text!r}", kw)
        s.expect("}")
    return out


def _decl(s: Stream) -> tuple[str, int, object]:
    tok = s.expect_name("generator name")
    s.expect(":")
    return tok.text, s.expect_int(), tok


def _scan_declared(s: Stream, keywords: tuple[str, ...]) -> dict[str, int]:
    """Names declared anywhere in the current block, with token positions (for cycle detection)."""
    out = {}
    depth = 0
    i = s.i
    toks = s.tokens
    while i < len(toks) and toks[i].kind != "end":
        t = toks[i]
        if t.text == "{":
            depth += 1
        elif t.text == "}":
            if depth == 0:
                break
            depth -= 1
        elif t.kind == "name" and t.text in keywords and i + 2 < len(toks) and toks[i + 2].text == ":":
            out.setdefault(toks[i + 1].text, i + 1)
        i += 1
    return out


def _space(s: Stream, name: str) -> SpaceSpec:
    declared_later = _scan_declared(s, ("sphere", "cell"))
    cells: list[Cell] = []
    dims: dict[str, int] = {}
    while not s.at("}"):
        kw = s.expect_name("'sphere' or 'cell'")
        if kw.text not in ("sphere", "cell"):
            raise s.error(f"expected 'sphere' or 'cell', found {kw.text!r}", kw)
        cname, dim, tok = _decl(s)
        if cname in dims:
            raise s.error(f"duplicate name {cname}", tok)
        if kw.text == "sphere":
            if dim < 2:
                raise s.error(f"sphere {cname} has dimension {dim} < 2", tok)
            cells.append(dgl.sphere(cname, dim))
        else:
            if dim < 3:
                raise s.error(f"cell {cname} has dimension {dim} < 3", tok)
            s.expect("attach")
            start = s.peek
            if s.at("torsion"):
                s.next()
                attach = TORSION
            else:
                attach, uses = parse_bracket_sum(s)
                for used, utok in uses:
                    if used in dims:
                        continue
                    if used == cname or used in declared_later:
                        raise s.error(f"cycle in declarations: {cname} refers to {used}", utok)
                    raise s.error(f"undeclared name {used}", utok)
                try:
                    deg = dgl.expr_degree(attach, dims)
                except ModelError as e:
                    raise s.error(str(e), start) from None
                if deg is not None and deg != dim - 1:
                    raise s.error(f"degree mismatch: cell {cname}:{dim} needs an attaching class "
                                  f"of degree {dim - 1}, got {deg}", start)
            cells.append(dgl.cell(cname, dim, attach))
        dims[cname] = dim
    return SpaceSpec(name, tuple(cells))


def _check_uses(s: Stream, uses, names) -> None:
    for used, utok in uses:
        if used not in names:
            raise s.error(f"undeclared name {used}", utok)


def _algebra(s: Stream, name: str) -> AlgebraPresentation:
    gens: list[tuple[str, int]] = []
    rels = []
    truncate = None
    while not s.at("}"):
        kw = s.expect_name("'gen', 'relation' or 'truncate'")
        if kw.text == "gen":
            g, d, tok = _decl(s)
            if any(g == n for n, _ in gens):
                raise s.error(f"duplicate name {g}", tok)
            if d < 1:
                raise s.error(f"generator {g} has degree {d} < 1", tok)
            gens.append((g, d))
        elif kw.text == "relation":
            start = s.peek
            p, uses = parse_poly(s)
            _check_uses(s, uses, {n for n, _ in gens})
            rels.append((p, start))
        elif kw.text == "truncate":
            truncate = s.expect_int()
        else:
            raise s.error(f"expected 'gen', 'relation' or 'truncate', found {kw.text!r}", kw)
    if truncate is None:
        raise s.error("algebra block needs 'truncate N'")
    F = FreeGC(gens)
    canon = []
    for p, tok in rels:
        val = F.from_ast(p)
        try:
            F.element_degree(val)
        except AlgebraError as e:
            raise s.error(str(e), tok) from None
        canon.append(F.format(val))
    return AlgebraPresentation(name, tuple(gens), tuple(canon), truncate)


def _sullivan(s: Stream, name: str) -> SullivanModel:
    gens: list[tuple[str, int]] = []
    diffs = []
    while not s.at("}"):
        kw = s.expect_name("'gen' or 'd'")
        if kw.text == "gen":
            g, d, tok = _decl(s)
            if any(g == n for n, _ in gens):
                raise s.error(f"duplicate name {g}", tok)
            if d < 2:
                raise s.error(f"generator {g} has degree {d} < 2", tok)
            gens.append((g, d))
        elif kw.text == "d":
            tok = s.expect_name("generator name")
            s.expect("=")
            start = s.peek
            p, uses = parse_poly(s)
            diffs.append((tok, p, uses, start))
        else:
            raise s.error(f"expected 'gen' or 'd', found {kw.text!r}", kw)
    F = FreeGC(gens)
    names = {n for n, _ in gens}
    dmap = {}
    for tok, p, uses, start in diffs:
        if tok.text not in names:
            raise s.error(f"undeclared name {tok.text}", tok)
        if tok.text in dmap:
            raise s.error(f"duplicate differential for {tok.text}", tok)
        _check_uses(s, uses, names)
        val = F.from_ast(p)
        try:
            deg = F.element_degree(val)
        except AlgebraError as e:
            raise s.error(str(e), start) from None
        want = F.degrees[F.index(tok.text)] + 1
        if deg is not None and deg != want:
            raise s.error(f"degree mismatch: d {tok.text} must have degree {want}, got {deg}", start)
        dmap[tok.text] = val
    sm = SullivanModel(gens, dmap, name)
    probs = sm.problems()
    if probs:
        raise ParseError("invalid differential: " + "; ".join(probs))
    return sm


def canonical(text: str) -> str:
    return parse(text).format()


def same_block(a: Block, b: Block) -> bool:
    """Structural equality of parsed blocks (used for round-trip checks)."""
    if type(a) is not type(b):
        return False
    if isinstance(a, SullivanModel):
        return (a.name, a.names, a.degrees) == (b.name, b.names, b.degrees) and \
            all(a.d_gen(i) == b.d_gen(i) for i in range(len(a.names)))
    return a == b


__all__ = ["parse", "SpecFile", "AlgebraPresentation", "ParseError", "canonical", "same_block"]
