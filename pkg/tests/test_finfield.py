import itertools

import pytest
from hypothesis import given, settings, strategies as st

from isospec.errors import CapExceeded, FieldMismatch
from isospec.finfield import (AdditiveMap, enumerate_additive_maps, field_of_order, fq_arith,
                              is_irreducible, make_field)


def _has_proper_factor(f, p):
    """Trial division by every monic polynomial of degree 1..deg/2 (oracle)."""
    n = len(f) - 1
    for k in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            g = list(tail) + [1]
            r = list(f)
            for shift in range(n - k, -1, -1):
                c = r[shift + k]
                for i, gi in enumerate(g):
                    r[shift + i] = (r[shift + i] - c * gi) % p
            if not any(r):
                return True
    return False


def _oracle_smallest(p, n):
    for tail in itertools.product(range(p), repeat=n):
        f = list(tail) + [1]
        if not _has_proper_factor(f, p):
            return tuple(f)


def test_prime_field_modulus():
    F = make_field(2, 1)
    assert F.modulus == (0, 1)
    assert F.q == 2


def test_f4_modulus():
    assert make_field(2, 2).modulus == (1, 1, 1)


def test_f9_modulus():
    assert make_field(3, 2).modulus == (1, 0, 1)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2), (2, 5)])
def test_modulus_matches_trial_division_scan(p, n):
    F = make_field(p, n)
    assert F.modulus == _oracle_smallest(p, n)
    assert is_irreducible(F.modulus, p)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2)])
def test_irreducibility_agrees_with_trial_division(p, n):
    for tail in itertools.product(range(p), repeat=n):
        f = list(tail) + [1]
        assert is_irreducible(f, p) == (not _has_proper_factor(f, p))


def test_make_field_is_deterministic():
    assert make_field(5, 3).modulus == make_field(5, 3).modulus


@pytest.mark.parametrize("p,n", [(4, 1), (2, 0), (1, 1)])
def test_make_field_rejects(p, n):
    with pytest.raises(ValueError):
        make_field(p, n)


def test_cap():
    with pytest.raises(CapExceeded):
        make_field(2, 20)
    with pytest.raises(CapExceeded):
        make_field(3, 3, cap=26)


def test_field_of_order():
    assert field_of_order(8).n == 3
    with pytest.raises(ValueError):
        field_of_order(6)


def test_f4_x_squared(F4):
    x = F4.gen
    assert x * x == F4([1, 1])
    assert fq_arith(F4, "mul", x, x) == x + 1


def test_f7_inverse():
    F7 = make_field(7)
    assert fq_arith(F7, "inv", 3) == F7(5)
    assert F7(3).inverse() == 5


def test_mul_by_one():
    F = make_field(3, 3)
    for a in F.elements():
        assert a * F.one == a


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        make_field(5).zero.inverse()


def test_mismatched_fields():
    with pytest.raises(FieldMismatch):
        make_field(5)(1) + make_field(7)(1)


def test_pow_matches_repeated_multiplication():
    F = make_field(3, 2)
    for a in F.elements():
        acc = F.one
        for e in range(12):
            assert fq_arith(F, "pow", a, e) == acc
            acc = acc * a


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    els = F.elements()
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els:
        assert a + (-a) == F.zero
        if a:
            assert a * a.inverse() == F.one


@pytest.mark.parametrize("q", [4, 8, 9])
def test_tables_match_element_arithmetic(q):
    F = field_of_order(q)
    add, mul, neg, inv = F.tables()
    for a, b in itertools.product(F.elements(), repeat=2):
        assert add[a.code, b.code] == (a + b).code
        assert mul[a.code, b.code] == (a * b).code


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([11, 13, 16, 25, 27, 32, 49]), st.data())
def test_field_axioms_sampled(q, data):
    F = field_of_order(q)
    a, b, c = (F.from_code(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a:
        assert a / a == F.one
    assert a ** q == a


def test_additive_map_counts():
    assert len(enumerate_additive_maps(make_field(2, 2), True)) == 4
    assert len(enumerate_additive_maps(make_field(5), True)) == 1
    assert enumerate_additive_maps(make_field(5), True)[0] == AdditiveMap.zero(make_field(5))
    assert len(enumerate_additive_maps(make_field(3, 2), False)) == 81


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25])
def test_additive_maps_are_fp_linear(q):
    F = field_of_order(q)
    els = F.elements()
    lam = [F(k) for k in range(F.p)]
    for T in enumerate_additive_maps(F, True)[:16]:
        table = T.table()
        for a, b in itertools.product(els, repeat=2):
            assert T(a + b) == T(a) + T(b)
        for x in els:
            assert table[x.code] == T(x).code
            for l in lam:
                assert T(l * x) == l * T(x)


def test_multiplication_maps():
    F = make_field(3, 2)
    for c in F.elements():
        M = AdditiveMap.multiplication(F, c)
        assert M.is_multiplication()
        assert all(M(x) == c * x for x in F.elements())
    assert not AdditiveMap.frobenius(F).is_multiplication()


@pytest.mark.parametrize("q", [4, 8, 9])
def test_a0_zero_maps_partition_all_maps(q):
    F = field_of_order(q)
    fixed = enumerate_additive_maps(F, True)
    cosets = [{T + AdditiveMap.multiplication(F, c) for c in F.elements()} for T in fixed]
    assert all(len(c) == q for c in cosets)
    union = set().union(*cosets)
    assert sum(len(c) for c in cosets) == len(union)
    assert union == set(enumerate_additive_maps(F, False))
