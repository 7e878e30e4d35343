import pytest

from selfcloseness import dgl, registry
from selfcloseness.dgl import ModelError
from selfcloseness.glie import Generator


def quillen(name):
    return dgl.from_space(registry.build(name))


def ranks(model, top=12):
    return dgl.homology(model, top - 1).ranks()


def test_cp2_model():
    m = quillen("CP^2")
    assert [(g.name, g.degree) for g in m.gens] == [("u1", 1), ("u3", 3)]
    assert m.algebra.format(m.d_gen("u3")) == "[u1,u1]"
    assert dgl.validate(m) == []


def test_cp4_differentials_carry_the_known_coefficients():
    m = quillen("CP^4")
    d = {g.name: m.algebra.format(m.d_gen(g.name)) for g in m.gens}
    A = m.algebra
    u = {n: A.generator(n) for n in ("u1", "u3", "u5", "u7")}
    assert m.d_gen("u5") == A.bracket(u["u1"], u["u3"]) * 3
    assert m.d_gen("u7") == A.bracket(u["u1"], u["u5"]) * 4 + A.bracket(u["u3"], u["u3"]) * 3
    assert d["u1"] == "0"


def test_three_cell_model():
    m = quillen("three-cell(a=1,b=1)")
    assert [(g.name, g.degree) for g in m.gens] == [("x", 2), ("y", 4), ("w", 11)]
    A = m.algebra
    x, y = A.generator("x"), A.generator("y")
    expected = A.bracket(x, A.bracket(x, A.bracket(x, y))) + A.bracket(y, A.bracket(x, y))
    assert m.d_gen("w") == expected


@pytest.mark.parametrize("n", range(2, 13))
def test_sphere_ranks(n):
    expected = {n: 1, 2 * n - 1: 1} if n % 2 == 0 else {n: 1}
    expected = {k: v for k, v in expected.items() if k <= 12}
    assert ranks(quillen(f"S^{n}")) == expected


def test_s2_homology_dims():
    t = dgl.homology(quillen("S^2"), 3)
    assert (t.dims[1], t.dims[2], t.dims[3]) == (1, 1, 0)


def test_cp2_ranks():
    assert ranks(quillen("CP^2")) == {2: 1, 5: 1}


def test_wedge_homology_is_free_lie_dimension():
    m = quillen("S^2vS^3vS^4")
    t = dgl.homology(m, 8)
    assert all(t.dims[d] == m.algebra.dimension(d) for d in range(1, 9))


def test_homology_invariant_under_renaming():
    a = dgl.from_space(registry._space("space A { sphere a:3 sphere b:5 cell w:12 attach [a,[a,[a,b]]] }"))
    b = dgl.from_space(registry._space("space B { sphere p:3 sphere q:5 cell r:12 attach [p,[p,[p,q]]] }"))
    assert dgl.homology(a, 11).dims == dgl.homology(b, 11).dims


def test_validate_degree_mismatch():
    with pytest.raises(ModelError, match="degree mismatch"):
        dgl.DGLModel.from_differentials([("u1", 1), ("u2", 2)],
                                        {"u2": lambda A: A.bracket(A.generator("u1"), A.generator("u1"))})


def test_validate_d_squared_on_hand_built_model():
    m = dgl.DGLModel.from_differentials(
        [("u1", 1), ("u3", 3), ("u5", 5)],
        {"u3": lambda A: A.bracket(A.generator("u1"), A.generator("u1")),
         "u5": lambda A: A.bracket(A.generator("u1"), A.generator("u3"))})
    assert dgl.validate(m) == []


def test_invalid_attachment_rejected():
    with pytest.raises(ModelError):
        dgl.DGLModel.from_differentials(
            [("a", 2), ("b", 2), ("c", 3), ("w", 5)],
            {"c": lambda A: A.bracket(A.generator("a"), A.generator("b")),
             "w": lambda A: A.bracket(A.generator("a"), A.generator("c"))})


def test_from_space_degree_mismatch():
    spec = dgl.SpaceSpec("X", (dgl.sphere("a", 2), dgl.cell("w", 5, "[a,a]")))
    with pytest.raises(ModelError, match="degree mismatch"):
        dgl.from_space(spec)


def test_homology_dim_B():
    assert dgl.homology_dim_B(registry.build("S^3vS^5")) == 5
    assert dgl.homology_dim_B(registry.build("S^3vCP^2")) == 4
    assert dgl.homology_dim_B(registry.build("S^3vCP^4")) == 8


def test_is_rationally_trivial():
    s2 = quillen("S^2")
    A = s2.algebra
    u = A.generator(A.gens[0].name)
    assert dgl.is_rationally_trivial(A.zero(), s2)
    assert not dgl.is_rationally_trivial(A.bracket(u, u), s2)
    cp2 = quillen("CP^2")
    u1 = cp2.algebra.generator("u1")
    assert dgl.is_rationally_trivial(cp2.algebra.bracket(u1, u1), cp2)
    with pytest.raises(ModelError, match="not a cycle"):
        dgl.is_rationally_trivial(cp2.algebra.generator("u3"), cp2)


def test_torsion_cell_splits_off():
    spec = registry._space("space T { sphere a:3 cell w:6 attach torsion }")
    m = dgl.from_space(spec)
    assert m.d_gen("w").is_zero()


def test_all_builtin_spaces_validate():
    for name in list(registry.FIXED) + registry.FAMILY_INSTANCES:
        ex = registry.resolve(name)
        if ex.kind == registry.SPACE:
            assert dgl.validate(dgl.from_space(ex.build())) == [], name


def test_generator_degree_rule():
    m = quillen("S^3vS^5vS^12")
    assert [g.degree for g in m.gens] == [2, 4, 11]
    assert all(isinstance(g, Generator) for g in m.gens)
