from fractions import Fraction as F

import pytest

from selfcloseness import registry
from selfcloseness.constraints import CERTIFIED, UnsupportedError
from selfcloseness.sul import (AlgebraEndo, AlgebraError, FreeGC, GCAlgebra, SullivanModel, connected_sum,
                               csymplectic_check, formality_two_stage, pd_check, random_endomorphisms,
                               scaling_implies_iso, sullivan_diagonal_nse, sullivan_parametrize,
                               sullivan_witness_verify, tensor, wedge)


def alg(name):
    return registry.build(name)


# -- free graded-commutative algebra -------------------------------------------------------

def test_odd_generators_square_to_zero():
    Fr = FreeGC([("a", 3), ("b", 5)])
    a = Fr.parse("a")
    assert Fr.mul(a, a) == {}


def test_koszul_sign_on_odd_transposition():
    Fr = FreeGC([("a", 3), ("b", 5), ("c", 2)])
    a, b, c = Fr.parse("a"), Fr.parse("b"), Fr.parse("c")
    ab, ba = Fr.mul(a, b), Fr.mul(b, a)
    assert ab == {m: -v for m, v in ba.items()}
    assert Fr.mul(a, c) == Fr.mul(c, a)


def test_derivation_sign():
    # d(a*b) = d(a)*b + (-1)^|a| a*d(b)
    sm = SullivanModel([("x", 2), ("a", 3), ("b", 3)], {"a": "x^2", "b": "x^2"}, "T")
    Fr = sm.free
    ab = Fr.mul(Fr.parse("a"), Fr.parse("b"))
    expected = Fr.add(Fr.mul(Fr.parse("x^2"), Fr.parse("b")), Fr.mul(Fr.parse("a"), Fr.parse("x^2")), -1)
    assert sm.d(ab) == expected


# -- Sullivan cohomology ---------------------------------------------------------------

def test_cp2_sullivan_cohomology():
    assert alg("M(CP^2)").cohomology(8) == [1, 0, 1, 0, 1, 0, 0, 0, 0]


def test_connsum_sullivan_cohomology():
    dims = alg("M(connsum(k=5,m=3,x=2,y=4))").cohomology(8)
    assert (dims[2], dims[4], dims[8]) == (1, 2, 1)


def test_zero_differential_polynomial_algebra():
    sm = SullivanModel([("x", 2)], {}, "P")
    assert sm.cohomology(6) == [1, 0, 1, 0, 1, 0, 1]


def test_invalid_differential_detected():
    sm = SullivanModel([("x", 2), ("y", 3), ("z", 4)], {"y": "x^2", "z": "x*y"}, "Bad")
    assert any("d^2" in p for p in sm.problems())
    wrong = SullivanModel([("x", 2), ("z", 5)], {"z": "x^2"}, "Bad")
    assert any("degree mismatch" in p for p in wrong.problems())


def test_connsum_model_matches_algebra():
    sm = alg("M(connsum(k=5,m=3,x=2,y=4))")
    A = connected_sum(alg("H(CP^4)"), alg("H(HP^2)"))
    assert sm.cohomology(8) == A.dims()
    assert GCAlgebra.from_sullivan(sm, 8).dims() == A.dims()


# -- Poincare duality --------------------------------------------------------------------

def test_pd_examples():
    r = pd_check(alg("H(CP^2)"))
    assert r.ok and alg("H(CP^2)").names[r.omega] == "x^2"
    assert pd_check(alg("H(S^2xS^4)")).ok
    assert not pd_check(alg("H(S^3vS^5vS^12)")).ok


def test_no_fundamental_class():
    with pytest.raises(AlgebraError, match="no fundamental class"):
        pd_check(alg("H(CP^2vS^4)"))


# -- endomorphisms -------------------------------------------------------------------------

def test_scaling_examples():
    A = alg("H(CP^2)")
    f = AlgebraEndo.from_generator_images(A, {"x": {"x": 2}})
    pd = pd_check(A)
    assert f.top_scalar(pd) == 4 and scaling_implies_iso(A, f)
    z = AlgebraEndo.from_generator_images(A, {})
    assert z.top_scalar(pd) == 0 and not scaling_implies_iso(A, z)


@pytest.mark.parametrize("t", [F(0), F(1), F(-7, 3)])
def test_unipotent_on_s2xs4(t):
    A = alg("H(S^2xS^4)")
    a = A.basis_vector(A.names.index("a"))
    b = A.basis_vector(A.names.index("b"))
    fb = [x + t * y for x, y in zip(b, A.mul(a, a))]
    f = AlgebraEndo.from_generator_images(A, {"a": a, "b": fb})
    assert f.top_scalar(pd_check(A)) == 1
    assert scaling_implies_iso(A, f)


def test_not_an_algebra_map():
    A = alg("H(CP^2)")
    images = [A.unit(), A.basis_vector(1), A.zero()]
    with pytest.raises(AlgebraError, match="not an algebra map"):
        scaling_implies_iso(A, AlgebraEndo(A, images))


@pytest.mark.parametrize("name", registry.PD_ALGEBRAS)
def test_pd_lemma_on_random_endomorphisms(name):
    A = alg(name)
    pd = pd_check(A)
    for f in random_endomorphisms(A, 50, seed=7):
        lam = f.top_scalar(pd)
        assert (lam != 0) == f.is_bijective()


# -- constructions -----------------------------------------------------------------------

def test_connected_sum_cp2_cp2():
    A = alg("H(CP^2#CP^2)")
    assert A.dim(2) == 2 and pd_check(A).ok
    x1, x2 = A.basis_in(2)
    assert not any(A.mul_basis(x1, x2).values())


def test_connected_sum_with_sphere_is_identity():
    A = connected_sum(alg("H(CP^2)"), alg("H(S^4)"))
    assert A.dims() == alg("H(CP^2)").dims()


def test_connected_sum_needs_same_top_degree():
    with pytest.raises(AlgebraError, match="top degrees differ"):
        connected_sum(alg("H(CP^2)"), alg("H(CP^3)"))


def test_euler_characteristics():
    A, B = alg("H(CP^4)"), alg("H(HP^2)")
    assert connected_sum(A, B).euler_characteristic() == A.euler_characteristic() + B.euler_characteristic() - 2
    assert wedge(A, B).euler_characteristic() == A.euler_characteristic() + B.euler_characteristic() - 1


def test_wedge_examples():
    W = wedge(alg("H(S^3)"), alg("H(S^5)"))
    assert W.dims() == [1, 0, 0, 1, 0, 1]
    assert all(not W.mul_basis(i, j) for i in range(1, W.n) for j in range(1, W.n))
    assert alg("H(CP^2vS^4)").dim(4) == 2


def test_wedge_associative_up_to_iso():
    a, b, c = alg("H(S^3)"), alg("H(CP^2)"), alg("H(S^6)")
    left, right = wedge(wedge(a, b), c), wedge(a, wedge(b, c))
    assert left.dims() == right.dims()
    prods = lambda A: sorted(len(A.mul_basis(i, j)) for i in range(A.n) for j in range(A.n))  # noqa: E731
    assert prods(left) == prods(right)


@pytest.mark.parametrize("name", sorted(n for n, e in registry.FIXED.items() if e.kind == registry.ALGEBRA))
def test_axioms_hold_for_builtin_algebras(name):
    assert alg(name).check_axioms() == []


# -- c-symplectic ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 6))
def test_cpn_c_symplectic(n):
    r = csymplectic_check(alg(f"H(CP^{n})"))
    assert r.csymplectic and r.witness == {"x": 1}
    assert r.verdict.endswith("hence N𝓔(X₀)=2")


def test_not_c_symplectic():
    assert not csymplectic_check(alg("H(S^2xS^4)")).csymplectic
    assert not csymplectic_check(alg("H(S^6)")).csymplectic
    assert csymplectic_check(alg("H(CP^1xCP^1)")).csymplectic


def test_odd_top_degree_rejected():
    with pytest.raises(AlgebraError, match="not even-dimensional"):
        csymplectic_check(alg("H(S^5)"))


def test_product_of_c_symplectic_is_c_symplectic():
    assert csymplectic_check(tensor(alg("H(CP^2)"), alg("H(CP^1)"))).csymplectic


# -- Sullivan self-maps ----------------------------------------------------------------------

def test_sullivan_nse_examples():
    for name, value in [("M(connsum(k=5,m=3,x=2,y=4))", 2), ("M(CP^2)", 2), ("M(S^3vS^5vS^12)", 12)]:
        r = sullivan_diagonal_nse(alg(name))
        assert (r.lo, r.hi) == (value, value), name


def test_sullivan_cp2_certified():
    r = sullivan_diagonal_nse(alg("M(CP^2)"))
    assert (r.value, r.status) == (2, CERTIFIED)


@pytest.mark.parametrize("name", [n for n, e in registry.FIXED.items() if e.kind == registry.SULLIVAN]
                         + ["M(connsum(k=5,m=3,x=2,y=4))"])
def test_sullivan_witnesses_verify(name):
    sm = alg(name)
    r = sullivan_diagonal_nse(sm)
    pmap = sullivan_parametrize(sm)
    idx = {n: i for i, n in enumerate(pmap.names)}
    for w in r.witnesses:
        images = pmap.numeric({idx[k]: F(v) for k, v in w.values.items()})
        assert sullivan_witness_verify(sm, images, w.level), (name, w)


def test_sullivan_same_degree_refused():
    with pytest.raises(UnsupportedError):
        sullivan_diagonal_nse(registry.connsum_sullivan(3, 3, 2, 2))


# -- formality ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,formal,nse", [
    ("three-cell(a=1,b=1)", False, 5), ("three-cell(a=1,b=0)", False, 5), ("three-cell(a=0,b=0)", True, 12)])
def test_formality(name, formal, nse):
    v = formality_two_stage(alg(name))
    assert (v.formal, v.nse) == (formal, nse)


def test_formality_rejects_cp2():
    with pytest.raises(UnsupportedError, match=r"2H_\*-dim\(B\)=4=n"):
        formality_two_stage(alg("CP^2"))
