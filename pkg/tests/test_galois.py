import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint

from fdsrank.errors import InputError
from fdsrank.galois import (
    PRIMITIVE_MODULI,
    Gf2mField,
    all_ones_minus_identity,
    derangement_parity,
    gf2_determinant,
    gf2_rank,
    gf2m_matmul,
    gf2m_matrix_det,
)


def clmul_then_divide(a, b, modulus):
    """Oracle: full carry-less product, then polynomial long division."""
    prod = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            prod ^= a << i
    deg = modulus.bit_length() - 1
    while prod.bit_length() - 1 >= deg:
        prod ^= modulus << (prod.bit_length() - 1 - deg)
    return prod


def leibniz_det_mod2(M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i in range(n):
            term &= int(M[i][perm[i]])
        total ^= term
    return total


def test_gf2_determinant_examples():
    assert gf2_determinant(all_ones_minus_identity(2)) == 1
    assert gf2_determinant(all_ones_minus_identity(3)) == 0
    assert gf2_determinant(all_ones_minus_identity(4)) == 1
    assert leibniz_det_mod2(all_ones_minus_identity(3)) == 0
    assert leibniz_det_mod2(all_ones_minus_identity(4)) == 1
    with pytest.raises(InputError):
        gf2_determinant(np.zeros((2, 3), dtype=int))


@settings(max_examples=100)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_gf2_determinant_matches_leibniz(M):
    assert gf2_determinant(M) == leibniz_det_mod2(M)
    assert (gf2_rank(M) == len(M)) == bool(gf2_determinant(M))


def test_derangement_parity_examples():
    assert [derangement_parity(n) for n in (2, 3, 4)] == [1, 0, 1]
    assert [derangement_parity(n, "enumerate") for n in (2, 3, 4)] == [1, 0, 1]
    with pytest.raises(InputError):
        derangement_parity(0)


@pytest.mark.parametrize("n", range(1, 10))
def test_derangement_parity_recurrence_matches_enumeration(n):
    assert derangement_parity(n) == derangement_parity(n, "enumerate")
    assert derangement_parity(n) == (1 if n % 2 == 0 else 0)


@pytest.mark.parametrize("n", range(2, 9))
def test_all_ones_minus_identity_det_is_derangement_parity(n):
    assert gf2_determinant(all_ones_minus_identity(n)) == derangement_parity(n)


def test_gf2m_examples():
    F = Gf2mField(3)
    assert F.modulus == 0b1011
    assert F.mul(0b010, 0b100) == 0b011
    assert F.pow(0b010, 7) == 1
    assert all(F.add(a, a) == 0 for a in range(8))
    with pytest.raises(ZeroDivisionError):
        F.inv(0)
    with pytest.raises(InputError):
        F.mul(8, 1)
    with pytest.raises(InputError):
        Gf2mField(17)


@pytest.mark.parametrize("m", sorted(PRIMITIVE_MODULI))
def test_moduli_are_primitive(m):
    F = Gf2mField(m)
    order = F.order - 1
    assert F.pow(F.generator, order) == 1
    for prime in factorint(order) if order > 1 else []:
        assert F.pow(F.generator, order // prime) != 1


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_field_axioms_exhaustive(m):
    F = Gf2mField(m)
    elems = range(F.order)
    for a in elems:
        assert F.mul(a, 1) == a and F.add(a, 0) == a
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in elems:
            assert F.mul(a, b) == F.mul(b, a) == clmul_then_divide(a, b, F.modulus)
            for c in elems:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@settings(max_examples=300)
@given(st.integers(1, 16), st.data())
def test_field_axioms_random(m, data):
    F = Gf2mField(m)
    a, b, c = (data.draw(st.integers(0, F.order - 1)) for _ in range(3))
    assert F.mul(a, b) == clmul_then_divide(a, b, F.modulus)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
    if a:
        assert F.mul(a, F.inv(a)) == 1
    assert int(F.mul_array(a, b)) == F.mul(a, b)


def test_matrix_det_examples():
    F = Gf2mField(2)
    assert gf2m_matrix_det(F, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1
    for a in range(1, 4):
        for b in range(1, 4):
            assert gf2m_matrix_det(F, [[0, a], [b, 0]]) == F.mul(a, b)
    assert gf2m_matrix_det(F, [[2, 3], [2, 3]]) == 0
    with pytest.raises(InputError):
        gf2m_matrix_det(F, [[1, 2]])


@pytest.mark.parametrize("m", [2, 3, 8, 16])
def test_matrix_det_multiplicative(m):
    F = Gf2mField(m)
    rng = random.Random(m)
    for _ in range(30):
        A = [[rng.randrange(F.order) for _ in range(3)] for _ in range(3)]
        B = [[rng.randrange(F.order) for _ in range(3)] for _ in range(3)]
        lhs = gf2m_matrix_det(F, gf2m_matmul(F, A, B))
        assert lhs == F.mul(gf2m_matrix_det(F, A), gf2m_matrix_det(F, B))
