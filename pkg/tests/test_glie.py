import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from selfcloseness.glie import FreeLieAlgebra, Generator, LieError, basis, bracket, dimension, to_tensor


def alg(*spec, max_degree=24):
    return FreeLieAlgebra([Generator(n, d) for n, d in spec], max_degree=max_degree)


def sign(p, q):
    return -1 if (p * q) % 2 else 1


# -- independent dimension oracle ---------------------------------------------------------
#
# The universal enveloping algebra of the free graded Lie algebra L(V) is the
# tensor algebra T(V).  Graded PBW gives
#     sum_n dim T_n t^n = prod_d (1 + t^d)^{L_d} (d odd) * (1 - t^d)^{-L_d} (d even),
# which determines every L_n from the word counts of T(V).

def _series_mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def _factor(d, mult, n):
    s = [1] + [0] * n
    if d % 2:
        base = [0] * (n + 1)
        base[0] = 1
        if d <= n:
            base[d] = 1
    else:
        base = [1 if k % d == 0 else 0 for k in range(n + 1)]
    for _ in range(mult):
        s = _series_mul(s, base, n)
    return s


def pbw_dims(degrees, n):
    words = [0] * (n + 1)
    words[0] = 1
    for k in range(1, n + 1):
        words[k] = sum(words[k - d] for d in degrees if d <= k)
    L = {}
    for m in range(1, n + 1):
        prod = [1] + [0] * n
        for d in range(1, m):
            prod = _series_mul(prod, _factor(d, L[d], n), n)
        L[m] = words[m] - prod[m]
    return L


@pytest.mark.parametrize("degrees", [(1,), (2,), (1, 2), (2, 4), (1, 1), (1, 3, 5), (2, 3)])
def test_dimensions_match_pbw_oracle(degrees):
    names = [f"g{i}" for i in range(len(degrees))]
    A = alg(*zip(names, degrees))
    oracle = pbw_dims(degrees, 10)
    assert [A.dimension(d) for d in range(1, 11)] == [oracle[d] for d in range(1, 11)]


def test_single_generator_dimensions():
    odd = alg(("x", 1))
    even = alg(("x", 2))
    assert [odd.dimension(d) for d in range(1, 6)] == [1, 1, 0, 0, 0]
    assert [even.dimension(d) for d in range(2, 9)] == [1, 0, 0, 0, 0, 0, 0]


def test_basis_examples():
    assert [m.word for m in basis([Generator("u1", 1)], 2)] == [(0, 0)]
    assert basis([Generator("u1", 1)], 3) == []
    assert [m.word for m in basis([Generator("u", 2), Generator("v", 4)], 4)] == [(1,)]
    assert dimension([Generator("u1", 1), Generator("u2", 2)], 3) == 1


def test_even_square_vanishes():
    A = alg(("x", 2))
    x = A.generator("x")
    assert bracket(x, x).is_zero()


def test_odd_square_nonzero_and_cube_vanishes():
    A = alg(("u1", 1), ("u2", 2))
    u1 = A.generator("u1")
    sq = bracket(u1, u1)
    assert not sq.is_zero()
    assert bracket(u1, sq).is_zero()


def test_antisymmetry_instance():
    A = alg(("u1", 1), ("u2", 2))
    u1, u2 = A.generator("u1"), A.generator("u2")
    assert bracket(u1, u2) == bracket(u2, u1) * sign(1, 2) * -1


def test_to_tensor_examples():
    A = alg(("x", 1), ("y", 2))
    x, y = A.generator("x"), A.generator("y")
    assert to_tensor(x) == {(0,): 1}
    assert to_tensor(bracket(x, y)) == {(0, 1): 1, (1, 0): -1}
    assert not to_tensor(bracket(x, bracket(x, x)))


def test_inhomogeneous_bracket_rejected():
    A = alg(("x", 1), ("y", 2))
    x, y = A.generator("x"), A.generator("y")
    with pytest.raises(LieError, match="inhomogeneous bracket"):
        bracket(x + y, x)


def test_generator_validation():
    with pytest.raises(LieError):
        Generator("x", 0)
    with pytest.raises(LieError):
        alg(("x", 1), ("x", 2))


def test_renaming_does_not_change_dimensions():
    a = alg(("a", 1), ("b", 2), ("c", 3))
    b = alg(("zz", 3), ("yy", 1), ("xx", 2))
    assert [a.dimension(d) for d in range(1, 9)] == [b.dimension(d) for d in range(1, 9)]


# -- random elements and axioms ---------------------------------------------------------

GEN_SETS = [(("a", 1), ("b", 2)), (("a", 1), ("b", 1)), (("u", 2), ("v", 4)), (("p", 1), ("q", 2), ("r", 3))]


def random_element(A, degree, rng):
    words = A.basis_words(degree)
    if not words:
        return A.zero()
    return A.element({w: F(rng.randint(-3, 3), rng.randint(1, 2)) for w in words})


def _jacobi(A, x, y, z):
    dx, dy, dz = x.degree, y.degree, z.degree
    return (bracket(x, bracket(y, z)) * sign(dx, dz)
            + bracket(y, bracket(z, x)) * sign(dy, dx)
            + bracket(z, bracket(x, y)) * sign(dz, dy))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, len(GEN_SETS) - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 2**32 - 1))
def test_antisymmetry_and_jacobi(gi, p, q, r, seed):
    A = alg(*GEN_SETS[gi])
    rng = random.Random(seed)
    x, y, z = (random_element(A, d, rng) for d in (p, q, r))
    if x.is_zero() or y.is_zero() or z.is_zero():
        return
    assert bracket(x, y) == bracket(y, x) * (-sign(p, q))
    assert _jacobi(A, x, y, z).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, len(GEN_SETS) - 1), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_tensor_embedding_injective_and_multiplicative(gi, d, seed):
    A = alg(*GEN_SETS[gi])
    rng = random.Random(seed)
    e1, e2 = random_element(A, d, rng), random_element(A, d, rng)
    assert (to_tensor(e1) == to_tensor(e2)) == (e1 == e2)
    x = random_element(A, 1 if A.basis_words(1) else 2, rng)
    if x.is_zero() or e1.is_zero():
        return
    tx, te = to_tensor(x), to_tensor(e1)
    prod = {}
    for (u, a), (v, b) in itertools.product(tx.items(), te.items()):
        prod[u + v] = prod.get(u + v, 0) + a * b
    for (u, a), (v, b) in itertools.product(te.items(), tx.items()):
        prod[u + v] = prod.get(u + v, 0) - sign(x.degree, d) * a * b
    assert to_tensor(bracket(x, e1)) == {w: c for w, c in prod.items() if c}


def test_basis_is_deterministic():
    a = alg(("a", 1), ("b", 2))
    b = alg(("a", 1), ("b", 2))
    assert [a.basis_words(d) for d in range(1, 8)] == [b.basis_words(d) for d in range(1, 8)]
