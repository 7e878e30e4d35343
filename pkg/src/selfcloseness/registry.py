"""Built-in examples: spaces, Sullivan models and cohomology algebras.

Names:

* spaces: ``S^n``, ``CP^n``, ``HP^2``, ``three-cell(a=,b=)``, ``four-cell(a=,b=,c=)``,
  ``four-attach(a=,b=)``, ``mimura-toda(a=,b=,c=)``, wedges such as ``S^3vS^5vS^12``;
* Sullivan models: ``M(...)``, e.g. ``M(CP^2)``, ``M(connsum(k=5,m=3,x=2,y=4))``;
* cohomology algebras: ``H(...)``, e.g. ``H(CP^4#HP^2)``.

Spaces are written in the spec-file language and parsed, so every built-in
doubles as a parser test.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import specfile
from .dgl import ModelError, SpaceSpec
from .sul import GCAlgebra, SullivanModel, connected_sum, tensor, wedge

SPACE, SULLIVAN, ALGEBRA = "space", "sullivan", "algebra"

# Differentials of the Quillen model of CP^n, generators u1, u3, ..., u_{2n-1}.
CP_ATTACH = {
    "u3": "[u1,u1]",
    "u5": "3*[u1,u3]",
    "u7": "4*[u1,u5] + 3*[u3,u3]",
    "u9": "5*[u1,u7] + 10*[u3,u5]",
}


@dataclass(frozen=True)
class Example:
    name: str
    kind: str
    build: Callable[[], object]
    description: str


def _lin(*terms: tuple[Fraction | int, str]) -> str:
    parts = [f"{Fraction(c)}*{e}" for c, e in terms if c]
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def _space(text: str) -> SpaceSpec:
    return specfile.parse(text).get()


def _ident(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", name).strip("_") or "X"


def sphere_text(n: int, gen: str = "s", name: str | None = None) -> str:
    return f"space {_ident(name or f'S{n}')} {{ sphere {gen}:{n} }}"


def cp_cells(n: int, prefix: str = "u") -> list[str]:
    cells = [f"sphere {prefix}1:2"]
    for k in range(2, n + 1):
        g = f"u{2 * k - 1}"
        attach = CP_ATTACH[g].replace("u", prefix)
        cells.append(f"cell {prefix}{2 * k - 1}:{2 * k} attach {attach}")
    return cells


def hp2_cells(prefix: str = "v") -> list[str]:
    return [f"sphere {prefix}3:4", f"cell {prefix}7:8 attach [{prefix}3,{prefix}3]"]


def space_text(name: str, cells: list[str]) -> str:
    return f"space {_ident(name)} {{\n  " + "\n  ".join(cells) + "\n}"


def cp_space(n: int) -> SpaceSpec:
    if not 1 <= n <= 5:
        raise ModelError("CP^n is built in for 1 <= n <= 5")
    return _space(space_text(f"CP{n}", cp_cells(n)))


def three_cell(a, b) -> SpaceSpec:
    attach = _lin((a, "[x,[x,[x,y]]]"), (b, "[y,[x,y]]"))
    return _space(space_text(f"three_cell_{a}_{b}",
                             ["sphere x:3", "sphere y:5", f"cell w:12 attach {attach}"]))


def four_cell(a, b, c) -> SpaceSpec:
    if c and a != 1:
        raise ModelError("four-cell family: c must be 0 unless a = 1")
    return _space(space_text(f"four_cell_{a}_{b}_{c}", [
        "sphere u1:2", "sphere u2:3",
        f"cell u3:4 attach {_lin((a, '[u1,u1]'))}",
        f"cell u5:6 attach {_lin((b, '[[u1,u2],u1]'), (c, '[u1,u3]'))}",
    ]))


def four_attach(a, b) -> SpaceSpec:
    attach = _lin((a, "[[[u1,u2],u2],[u1,u2]]"), (5 * Fraction(b), "[u1,u7]"), (10 * Fraction(b), "[u3,u5]"))
    cells = cp_cells(4)
    cells.insert(1, "sphere u2:3")
    return _space(space_text(f"four_attach_{a}_{b}", cells + [f"cell u9:10 attach {attach}"]))


def mimura_toda(a, b, c) -> SpaceSpec:
    """(S^3 v CP^2) with a 12-cell on a*[[[w,i3],w],i3] + b*[[i3,h],h] + c*[[w,h],w].

    i2 = u1, i3 = u2, w = [i3,i2] = [u2,u1] and the Hopf class h = [u1,u3].
    """
    w, h = "[u2,u1]", "[u1,u3]"
    attach = _lin((a, f"[[[{w},u2],{w}],u2]"), (b, f"[[u2,{h}],{h}]"), (c, f"[[{w},{h}],{w}]"))
    return _space(space_text(f"mimura_toda_{a}_{b}_{c}", [
        "sphere u1:2", "sphere u2:3", "cell u3:4 attach [u1,u1]", f"cell u11:12 attach {attach}"]))


def wedge_spheres(*dims: int) -> SpaceSpec:
    names = "abcdefgh"
    return _space(space_text("wedge_" + "_".join(map(str, dims)),
                             [f"sphere {names[i]}:{d}" for i, d in enumerate(dims)]))


def wedge_spaces(name: str, *parts: list[str]) -> SpaceSpec:
    return _space(space_text(name, [c for p in parts for c in p]))


# -- Sullivan models --------------------------------------------------------------

def cp_sullivan(n: int) -> SullivanModel:
    return SullivanModel([("x", 2), ("y", 2 * n + 1)], {"y": f"x^{n + 1}"}, f"M_CP{n}")


def hp_sullivan(n: int) -> SullivanModel:
    return SullivanModel([("x", 4), ("y", 4 * n + 3)], {"y": f"x^{n + 1}"}, f"M_HP{n}")


def sphere_sullivan(n: int) -> SullivanModel:
    if n % 2:
        return SullivanModel([("x", n)], {}, f"M_S{n}")
    return SullivanModel([("x", n), ("y", 2 * n - 1)], {"y": "x^2"}, f"M_S{n}")


def connsum_sullivan(k: int, m: int, dx: int, dy: int) -> SullivanModel:
    """Lambda(x,y,u,v), du = xy, dv = x^(k-1) - y^(m-1): model of X#Y for truncated-polynomial X, Y."""
    n = (k - 1) * dx
    if (m - 1) * dy != n:
        raise ModelError(f"connected sum needs (k-1)|x| = (m-1)|y|, got {n} and {(m - 1) * dy}")
    return SullivanModel([("x", dx), ("y", dy), ("u", dx + dy - 1), ("v", n - 1)],
                         {"u": "x*y", "v": f"x^{k - 1} - y^{m - 1}"},
                         f"M_connsum_k{k}_m{m}_x{dx}_y{dy}")


def zero_sullivan(*dims: int) -> SullivanModel:
    names = "xyzwabcd"
    return SullivanModel([(names[i], d) for i, d in enumerate(dims)], {},
                         "M_" + "v".join(f"S{d}" for d in dims))


# -- cohomology algebras ---------------------------------------------------------------

def cp_algebra(n: int) -> GCAlgebra:
    return GCAlgebra.from_presentation([("x", 2)], [f"x^{n + 1}"], 2 * n, f"H(CP^{n})")


def hp_algebra(n: int) -> GCAlgebra:
    return GCAlgebra.from_presentation([("y", 4)], [f"y^{n + 1}"], 4 * n, f"H(HP^{n})")


def sphere_algebra(n: int, gen: str = "s") -> GCAlgebra:
    rels = [] if n % 2 else [f"{gen}^2"]
    return GCAlgebra.from_presentation([(gen, n)], rels, n, f"H(S^{n})")


def s2xs4_algebra() -> GCAlgebra:
    return GCAlgebra.from_presentation([("a", 2), ("b", 4)], ["a^2", "b^2"], 6, "H(S^2xS^4)")


# -- the registry ------------------------------------------------------------------------

def _families() -> dict[str, tuple[str, tuple[str, ...], Callable, str]]:
    return {
        "three-cell": (SPACE, ("a", "b"), three_cell,
                       "(S^3 v S^5) u e^12 on a[x,[x,[x,y]]] + b[y,[x,y]]"),
        "four-cell": (SPACE, ("a", "b", "c"), four_cell,
                      "(S^3 v S^2) u e^4 u e^6; c must be 0 unless a = 1"),
        "four-attach": (SPACE, ("a", "b"), four_attach,
                        "(S^3 v CP^4) u e^10 on a[[[i2,i3],i3],[i2,i3]] + b h9"),
        "mimura-toda": (SPACE, ("a", "b", "c"), mimura_toda,
                        "(S^3 v CP^2) u e^12 on a[[[w,i3],w],i3] + b[[i3,h],h] + c[[w,h],w]"),
        "connsum": (SULLIVAN, ("k", "m", "x", "y"), connsum_sullivan,
                    "Lambda(x,y,u,v), du = xy, dv = x^(k-1) - y^(m-1)"),
    }


def _fixed() -> dict[str, Example]:
    ex: dict[str, Example] = {}

    def add(name, kind, build, desc):
        ex[name] = Example(name, kind, build, desc)

    for n in range(2, 13):
        add(f"S^{n}", SPACE, lambda n=n: _space(sphere_text(n)), f"{n}-sphere")
        add(f"M(S^{n})", SULLIVAN, lambda n=n: sphere_sullivan(n), f"minimal Sullivan model of S^{n}")
        add(f"H(S^{n})", ALGEBRA, lambda n=n: sphere_algebra(n), f"cohomology of S^{n}")
    for n in range(1, 6):
        add(f"CP^{n}", SPACE, lambda n=n: cp_space(n), f"complex projective {n}-space")
        add(f"M(CP^{n})", SULLIVAN, lambda n=n: cp_sullivan(n), f"minimal Sullivan model of CP^{n}")
        add(f"H(CP^{n})", ALGEBRA, lambda n=n: cp_algebra(n), f"cohomology of CP^{n}")
    add("HP^2", SPACE, lambda: _space(space_text("HP2", hp2_cells())), "quaternionic projective plane")
    add("M(HP^2)", SULLIVAN, lambda: hp_sullivan(2), "minimal Sullivan model of HP^2")
    add("H(HP^2)", ALGEBRA, lambda: hp_algebra(2), "cohomology of HP^2")
    add("S^3vS^5vS^12", SPACE, lambda: wedge_spheres(3, 5, 12), "wedge of three spheres")
    add("S^3vS^5", SPACE, lambda: wedge_spheres(3, 5), "wedge of two spheres")
    add("M(S^3vS^5vS^12)", SULLIVAN, lambda: zero_sullivan(3, 5, 12),
        "Lambda(x3,y5,z12) with zero differential")
    add("S^2vS^3", SPACE, lambda: wedge_spheres(2, 3), "wedge S^2 v S^3")
    add("S^3vCP^2", SPACE, lambda: wedge_spaces("S3vCP2", cp_cells(2), ["sphere u2:3"]),
        "wedge S^3 v CP^2")
    add("S^2vS^3vS^4", SPACE, lambda: wedge_spheres(2, 3, 4), "wedge S^2 v S^3 v S^4")
    add("S^3vCP^4", SPACE, lambda: wedge_spaces("S3vCP4", cp_cells(4), ["sphere u2:3"]),
        "wedge S^3 v CP^4")
    add("CP^4vHP^2", SPACE, lambda: wedge_spaces("CP4vHP2", cp_cells(4), hp2_cells()), "wedge CP^4 v HP^2")
    add("CP^2vS^4", SPACE, lambda: wedge_spaces("CP2vS4", cp_cells(2), ["sphere s:4"]), "wedge CP^2 v S^4")
    add("CP^3vS^6", SPACE, lambda: wedge_spaces("CP3vS6", cp_cells(3), ["sphere s:6"]), "wedge CP^3 v S^6")
    add("CP^2vCP^2", SPACE, lambda: wedge_spaces("CP2vCP2", cp_cells(2), cp_cells(2, "w")),
        "wedge CP^2 v CP^2")
    add("H(S^2xS^4)", ALGEBRA, s2xs4_algebra, "cohomology of S^2 x S^4")
    add("H(CP^1xCP^1)", ALGEBRA, lambda: tensor(cp_algebra(1), cp_algebra(1), "H(CP^1xCP^1)"),
        "cohomology of CP^1 x CP^1")
    add("H(CP^2#CP^2)", ALGEBRA, lambda: connected_sum(cp_algebra(2), cp_algebra(2), "H(CP^2#CP^2)"),
        "cohomology of CP^2 # CP^2")
    add("H(CP^4#HP^2)", ALGEBRA, lambda: connected_sum(cp_algebra(4), hp_algebra(2), "H(CP^4#HP^2)"),
        "cohomology of CP^4 # HP^2")
    add("H(CP^2vS^4)", ALGEBRA, lambda: wedge(cp_algebra(2), sphere_algebra(4), "H(CP^2vS^4)"),
        "cohomology of CP^2 v S^4")
    add("H(S^3vS^5vS^12)", ALGEBRA,
        lambda: wedge(wedge(sphere_algebra(3, "a"), sphere_algebra(5, "b")), sphere_algebra(12, "c"),
                      "H(S^3vS^5vS^12)"),
        "cohomology of S^3 v S^5 v S^12")
    return ex


FIXED = _fixed()
FAMILIES = _families()

# Instances listed by ``examples`` and exercised by the golden files.
FAMILY_INSTANCES = [
    "three-cell(a=1,b=1)", "three-cell(a=1,b=0)", "three-cell(a=0,b=1)", "three-cell(a=0,b=0)",
    "four-cell(a=1,b=1,c=1)", "four-cell(a=1,b=0,c=1)", "four-cell(a=0,b=1,c=0)", "four-cell(a=0,b=0,c=0)",
    "four-attach(a=1,b=1)", "four-attach(a=1,b=0)", "four-attach(a=0,b=1)", "four-attach(a=0,b=0)",
    "mimura-toda(a=1,b=1,c=1)", "mimura-toda(a=1,b=0,c=0)", "mimura-toda(a=0,b=0,c=0)",
    "M(connsum(k=5,m=3,x=2,y=4))",
]

# (B, B u e^n) with a nonzero attaching class and H_*-dim(B) <= n - 2.
MONOTONE_PAIRS = [
    ("S^3vS^5", "three-cell(a=1,b=1)"),
    ("S^3vS^5", "three-cell(a=1,b=0)"),
    ("S^3vS^5", "three-cell(a=0,b=1)"),
    ("S^2", "CP^2"),
    ("CP^2", "CP^3"),
    ("CP^3", "CP^4"),
    ("CP^4", "CP^5"),
    ("S^3vCP^2", "four-cell(a=1,b=1,c=1)"),
    ("S^3vCP^2", "four-cell(a=1,b=0,c=1)"),
    ("S^2vS^3vS^4", "four-cell(a=0,b=1,c=0)"),
    ("S^3vCP^4", "four-attach(a=1,b=1)"),
    ("S^3vCP^4", "four-attach(a=1,b=0)"),
    ("S^3vCP^4", "four-attach(a=0,b=1)"),
    ("S^3vCP^2", "mimura-toda(a=1,b=1,c=1)"),
]

# (Sullivan model of X#Y, Quillen model of X v Y).  X#S^n = X, so M(CP^n) models CP^n#S^2n.
CONNSUM_PAIRS = [
    ("M(connsum(k=5,m=3,x=2,y=4))", "CP^4vHP^2"),
    ("M(CP^2)", "CP^2vS^4"),
    ("M(CP^3)", "CP^3vS^6"),
]

PD_ALGEBRAS = ["H(CP^1)", "H(CP^2)", "H(CP^3)", "H(CP^4)", "H(CP^5)", "H(S^2xS^4)", "H(CP^2#CP^2)",
               "H(CP^4#HP^2)"]


_CALL = re.compile(r"^(?P<fam>[a-z-]+)\((?P<args>[^()]*)\)$")


def parse_call(name: str) -> tuple[str, list]:
    """Split ``family(k=v,...)`` into the family name and its arguments in declared order."""
    m = _CALL.match(name.strip())
    if not m or m.group("fam") not in FAMILIES:
        raise KeyError(f"unknown example {name!r}")
    fam = m.group("fam")
    params = FAMILIES[fam][1]
    values = {}
    for part in filter(None, (p.strip() for p in m.group("args").split(","))):
        if "=" not in part:
            raise KeyError(f"bad parameter {part!r} in {name!r}")
        k, v = (t.strip() for t in part.split("=", 1))
        if k not in params:
            raise KeyError(f"unknown parameter {k!r} for {fam}")
        try:
            values[k] = Fraction(v)
        except ValueError:
            raise KeyError(f"bad value {v!r} for {k} in {name!r}") from None
    missing = [p for p in params if p not in values]
    if missing:
        raise KeyError(f"missing parameters {missing} for {fam}")
    return fam, [int(values[p]) if values[p].denominator == 1 else values[p] for p in params]


def resolve(name: str) -> Example:
    """Look up a built-in by name, instantiating parametrized families."""
    name = name.strip()
    if name in FIXED:
        return FIXED[name]
    inner = name
    wrapped = False
    if name.startswith("M(") and name.endswith(")"):
        inner, wrapped = name[2:-1], True
    fam, args = parse_call(inner)
    kind, _, fn, desc = FAMILIES[fam]
    if (kind == SULLIVAN) != wrapped:
        raise KeyError(f"unknown example {name!r}")
    return Example(name, kind, lambda: fn(*args), desc)


def build(name: str):
    return resolve(name).build()


def listing() -> list[dict]:
    out = [{"name": e.name, "kind": e.kind, "description": e.description} for e in FIXED.values()]
    for fam, (kind, params, _, desc) in FAMILIES.items():
        call = f"{fam}({','.join(p + '=' for p in params)})"
        out.append({"name": f"M({call})" if kind == SULLIVAN else call, "kind": kind, "description": desc})
    return out
