from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfcloseness import dgl, registry, specfile
from selfcloseness.dgl import Br, Combo, Name, SpaceSpec
from selfcloseness.specfile import AlgebraPresentation, ParseError, parse, same_block
from selfcloseness.sul import SullivanModel


def only(text):
    sf = parse(text)
    assert len(sf.blocks) == 1
    return sf.blocks[0]


def test_three_cell_space():
    X = only("space X { sphere a:3  sphere b:5  cell w:12 attach [a,[a,[a,b]]] + [b,[a,b]] }")
    assert isinstance(X, SpaceSpec)
    assert [(c.name, c.dim) for c in X.cells] == [("a", 3), ("b", 5), ("w", 12)]
    a, b = Name("a"), Name("b")
    assert X.cells[2].attach == Combo(((F(1), Br(a, Br(a, Br(a, b)))), (F(1), Br(b, Br(a, b)))))
    assert dgl.validate(dgl.from_space(X)) == []


def test_cp2_space():
    X = only("space X { sphere a:2  cell w:4 attach 1*[a,a] }")
    assert dgl.homology(dgl.from_space(X), 11).ranks() == {2: 1, 5: 1}


def test_undeclared_name_has_position():
    with pytest.raises(ParseError, match="undeclared name a") as exc:
        parse("space X { cell w:4 attach [a,a] }")
    assert (exc.value.line, exc.value.col) == (1, 28)


def test_degree_mismatch():
    with pytest.raises(ParseError, match="degree mismatch"):
        parse("space X { sphere a:2  cell w:5 attach [a,a] }")


def test_cycle_in_declarations():
    with pytest.raises(ParseError, match="cycle"):
        parse("space X { sphere a:2  cell w:4 attach [a,v]  cell v:3 attach [a,a] }")
    with pytest.raises(ParseError, match="cycle"):
        parse("space X { sphere a:2  cell w:4 attach [w,a] }")


def test_error_position_on_later_line():
    with pytest.raises(ParseError) as exc:
        parse("algebra A {\n  gen x:2\n  relation x^3 + y\n  truncate 4\n}")
    assert (exc.value.line, exc.value.message) == (3, "undeclared name y")


def test_rational_coefficients_and_whitespace():
    X = only("space X{sphere a:3 sphere b:5 cell w:12 attach -3/2 * [ a , [a,[a,b]] ] - [b,[a,b]]}")
    Y = only("space X { sphere a:3 sphere b:5 cell w:12 attach -3/2[a,[a,[a,b]]] - 1*[b,[a,b]] }")
    assert X == Y


def test_torsion_cell():
    X = only("space X { sphere a:3  cell w:4 attach torsion }")
    assert X.cells[1].attach == dgl.TORSION


def test_algebra_and_sullivan_blocks():
    sf = parse("algebra CP2 { gen x:2  relation x^3  truncate 4 }\n"
               "sullivan M { gen x:2  gen y:5  d y = x^3 }")
    A, M = sf.blocks
    assert isinstance(A, AlgebraPresentation) and A.build().dims() == [1, 0, 1, 0, 1]
    assert isinstance(M, SullivanModel) and M.cohomology(6)[:5] == [1, 0, 1, 0, 1]
    assert sf.names() == ["CP2", "M"]


@pytest.mark.parametrize("text,msg", [
    ("sullivan M { gen x:2  gen y:4  d y = x^3 }", "degree mismatch"),
    ("sullivan M { gen x:2  gen y:3  gen z:4  d y = x^2  d z = x*y }", "invalid differential"),
    ("algebra A { gen x:2 }", "truncate"),
    ("space X { sphere a:1 }", "dimension 1 < 2"),
    ("space X { sphere a:2  sphere a:3 }", "duplicate name a"),
    ("space X { } space X { }", "duplicate block name X"),
    ("shape X { }", "unknown block kind"),
    ("space X { sphere a:2 $ }", "unexpected character"),
])
def test_errors(text, msg):
    with pytest.raises(ParseError, match=msg.replace("(", r"\(")):
        parse(text)


def roundtrip(block):
    text = block.format()
    again = only(text)
    assert same_block(block, again)
    assert again.format() == text


@pytest.mark.parametrize("name", sorted(n for n, e in registry.FIXED.items() if e.kind != registry.ALGEBRA)
                         + registry.FAMILY_INSTANCES)
def test_registry_roundtrip(name):
    roundtrip(registry.build(name))


def test_algebra_roundtrip():
    roundtrip(only("algebra T { gen a:2  gen b:3  gen c:4  relation a^2 - c  relation a*b*c  truncate 9 }"))


@st.composite
def random_space(draw):
    n = draw(st.integers(1, 3))
    dims = {f"s{i}": draw(st.integers(2, 5)) for i in range(n)}
    cells = [dgl.sphere(k, d) for k, d in dims.items()]
    names = list(dims)
    a, b = draw(st.sampled_from(names)), draw(st.sampled_from(names))
    c = draw(st.integers(-5, 5).filter(bool))
    bracket = Br(Name(a), Name(b))
    attach = bracket if c == 1 else Combo(((F(c), bracket),))
    cells.append(dgl.cell("w", dims[a] + dims[b], attach))
    return SpaceSpec("R", tuple(cells))


@settings(max_examples=60, deadline=None)
@given(random_space())
def test_random_space_roundtrip(X):
    roundtrip(X)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=3), st.data())
def test_random_algebra_roundtrip(degs, data):
    gens = [(f"g{i}", d) for i, d in enumerate(degs)]
    g, d = data.draw(st.sampled_from(gens))
    power = data.draw(st.integers(2, 4))
    text = f"algebra R {{ {' '.join(f'gen {n}:{k}' for n, k in gens)}  relation {g}^{power}  truncate 10 }}"
    roundtrip(only(text))
