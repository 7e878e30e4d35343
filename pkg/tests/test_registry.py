import pytest

from selfcloseness import dgl, registry
from selfcloseness.dgl import ModelError, SpaceSpec
from selfcloseness.sul import GCAlgebra, SullivanModel

KINDS = {registry.SPACE: SpaceSpec, registry.SULLIVAN: SullivanModel, registry.ALGEBRA: GCAlgebra}


@pytest.mark.parametrize("name", sorted(registry.FIXED) + registry.FAMILY_INSTANCES)
def test_builds_declared_kind(name):
    ex = registry.resolve(name)
    assert isinstance(ex.build(), KINDS[ex.kind])


def test_listing_covers_required_examples():
    names = {e["name"] for e in registry.listing()}
    assert {f"S^{n}" for n in range(2, 13)} <= names
    assert {f"CP^{n}" for n in range(1, 6)} <= names
    for fam in ("three-cell(a=,b=)", "four-cell(a=,b=,c=)", "four-attach(a=,b=)",
                "mimura-toda(a=,b=,c=)", "M(connsum(k=,m=,x=,y=))"):
        assert fam in names


def test_parse_call():
    assert registry.parse_call("four-cell(a=1, b=0, c=1)") == ("four-cell", [1, 0, 1])
    assert registry.parse_call("three-cell(b=2,a=1/2)")[1][0].denominator == 2


@pytest.mark.parametrize("bad", ["nope", "three-cell(a=1)", "three-cell(a=1,b=1,z=3)", "three-cell(a=x,b=1)",
                                 "M(three-cell(a=1,b=1))", "connsum(k=5,m=3,x=2,y=4)", "four-cell(1,1,1)"])
def test_bad_names(bad):
    with pytest.raises(KeyError):
        registry.resolve(bad)


def test_four_cell_rule():
    with pytest.raises(ModelError, match="c must be 0"):
        registry.build("four-cell(a=0,b=1,c=1)")


def test_connsum_degree_condition():
    with pytest.raises(ModelError, match="connected sum needs"):
        registry.build("M(connsum(k=5,m=3,x=2,y=2))")


@pytest.mark.parametrize("n", range(1, 6))
def test_cp_attaching_maps_from_table(n):
    # the built-in CP^n Quillen model is a valid dgl with the cohomology of CP^n
    model = dgl.from_space(registry.build(f"CP^{n}"))
    assert dgl.validate(model) == []
    assert [g.degree for g in model.gens] == list(range(1, 2 * n, 2))


def test_named_pairs_resolve():
    for a, b in registry.MONOTONE_PAIRS + registry.CONNSUM_PAIRS:
        registry.resolve(a), registry.resolve(b)
    for name in registry.PD_ALGEBRAS:
        assert registry.resolve(name).kind == registry.ALGEBRA
