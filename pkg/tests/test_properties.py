"""Seeded axiom suites over every built-in algebra (smaller draw than the acceptance run)."""

from fractions import Fraction as F

import pytest

import properties as P
from selfcloseness import dgl, registry
from selfcloseness.glie import FreeLieAlgebra, Generator
from selfcloseness.sul import GCAlgebra, SullivanModel, pd_check, random_endomorphisms

COUNT = 200
LIE = P.builtin_lie_models()
GC = P.builtin_gc_algebras()
SUL = P.builtin_sullivan_models()


@pytest.mark.parametrize("name", sorted(LIE))
def test_lie_axioms(name):
    assert P.lie_failures(LIE[name], COUNT, seed=1) == []


@pytest.mark.parametrize("name", sorted(GC))
def test_gc_axioms(name):
    assert P.gc_failures(GC[name], COUNT, seed=1) == []


@pytest.mark.parametrize("name", sorted(SUL))
def test_sullivan_axioms(name):
    assert P.sullivan_failures(SUL[name], COUNT, seed=1) == []


def test_gc_checker_catches_wrong_koszul_sign():
    # two odd classes whose products commute instead of anticommuting
    table = {(1, 2): {3: 1}, (2, 1): {3: 1}}
    broken = GCAlgebra(["1", "a", "b", "ab"], [0, 3, 3, 6], table, name="broken")
    assert any("koszul" in f for f in P.gc_failures(broken, 300, seed=0))


def test_gc_checker_catches_non_associativity():
    # x*x = y, x*y = 0 but y*x = z: (x*x)*x != x*(x*x)
    table = {(1, 1): {2: 1}, (2, 1): {3: 1}}
    broken = GCAlgebra(["1", "x", "y", "z"], [0, 2, 4, 6], table, name="broken")
    assert any("associativity" in f or "koszul" in f for f in P.gc_failures(broken, 300, seed=0))


def test_sullivan_checker_catches_d_squared():
    sm = SullivanModel([("x", 2), ("y", 3), ("z", 4)], {"y": "x^2", "z": "x*y"}, "bad")
    assert any(f.startswith("d^2") for f in P.sullivan_failures(sm, 300, seed=0))


def test_lie_checker_catches_d_squared():
    alg = FreeLieAlgebra([Generator("a", 1), Generator("b", 2), Generator("c", 3)], max_degree=9)
    a, b = alg.generator("a"), alg.generator("b")
    bad = dgl.DGLModel(alg, {"b": alg.bracket(a, a), "c": b})
    assert any(f.startswith("d^2") for f in P.lie_failures(bad, 300, seed=0, budget=3))


def test_draws_are_seeded():
    m = LIE["CP^3"]
    assert P.lie_failures(m, 50, seed=4) == P.lie_failures(m, 50, seed=4)
    assert random_endomorphisms(GC["H(CP^2)"], 5, seed=3)[0].images == \
        random_endomorphisms(GC["H(CP^2)"], 5, seed=3)[0].images


@pytest.mark.parametrize("name", registry.PD_ALGEBRAS)
def test_pd_lemma_suite(name):
    A = GC[name]
    pd = pd_check(A)
    assert pd.ok
    bad = [f for f in random_endomorphisms(A, 200, seed=0) if (f.top_scalar(pd) != 0) != f.is_bijective()]
    assert bad == []


def test_pd_lemma_scalar_is_top_degree_action():
    A = GC["H(CP^4#HP^2)"]
    pd = pd_check(A)
    for f in random_endomorphisms(A, 50, seed=2):
        image = f(A.basis_vector(pd.omega))
        assert image == [f.top_scalar(pd) * c for c in A.basis_vector(pd.omega)]
        assert isinstance(f.top_scalar(pd), (int, F))
