import math

import numpy as np
import pytest
import sympy

from isospec.errors import CapExceeded, IsospecError
from isospec.finfield import field_of_order, make_field
from isospec.lietype import (A2_PAIR, B2_PAIR, MatrixGroupElem, chevalley_order, embedding_certificate,
                             exponents, generate_closure, heisenberg_iso_check, heisenberg_map,
                             root_element, sl3_root_generators, sp4_root_generators, structure_constant)

J = np.array([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])


def _int(M):
    """Integer matrix of a prime-field MatrixGroupElem (oracle arithmetic is mod p)."""
    return M.array()


def _unit(d, i, j):
    E = np.zeros((d, d), dtype=int)
    E[i - 1, j - 1] = 1
    return E


def _comm_mod(a, b, ainv, binv, p):
    return (a @ b @ ainv @ binv) % p


def test_sl3_generators_f5():
    F = make_field(5)
    gens = sl3_root_generators(F)
    assert len(gens) == 10
    identity = MatrixGroupElem.from_entries(F, np.eye(3, dtype=int).tolist())
    assert sum(g != identity for g in gens) == 8
    assert all(g.determinant() == F.one for g in gens)
    assert root_element(F, A2_PAIR, "first", 0) == identity
    assert root_element(F, A2_PAIR, "second", 0) == identity


def test_sl3_commutator():
    p = 7
    I = np.eye(3, dtype=int)
    a, b = I + _unit(3, 1, 2), I + _unit(3, 2, 3)
    ainv, binv = I - _unit(3, 1, 2), I - _unit(3, 2, 3)
    assert (_comm_mod(a, b, ainv, binv, p) == (I + _unit(3, 1, 3)) % p).all()
    F = make_field(p)
    x, y = root_element(F, A2_PAIR, "first", 1), root_element(F, A2_PAIR, "second", 1)
    xi, yi = root_element(F, A2_PAIR, "first", -1), root_element(F, A2_PAIR, "second", -1)
    assert ((x * y * xi * yi).array() == I + _unit(3, 1, 3)).all()
    assert structure_constant(F, A2_PAIR) == 1


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_sp4_generators_symplectic(q):
    F = field_of_order(q)
    gens = sp4_root_generators(F)
    assert len(gens) == 2 * q
    for g in gens:
        assert g.is_symplectic() and g.determinant() == F.one
    if F.n == 1:
        for g in gens:
            M = _int(g)
            assert ((M.T @ J @ M - J) % q == 0).all()


def test_sp4_identity_and_commutator():
    F = make_field(5)
    I4 = MatrixGroupElem.from_entries(F, np.eye(4, dtype=int).tolist(), B2_PAIR.tag)
    assert root_element(F, B2_PAIR, "first", 0) == I4
    assert root_element(F, B2_PAIR, "second", 0) == I4
    a, b = root_element(F, B2_PAIR, "first", 1), root_element(F, B2_PAIR, "second", 1)
    ai, bi = root_element(F, B2_PAIR, "first", -1), root_element(F, B2_PAIR, "second", -1)
    comm = (a * b * ai * bi).array()
    # oracle: the same product in integers, reduced mod 5
    Ia = np.eye(4, dtype=int)
    ea, eb = _unit(4, 1, 2) - _unit(4, 3, 4), _unit(4, 1, 3) + _unit(4, 2, 4)
    expect = ((Ia + ea) @ (Ia + eb) @ (Ia - ea) @ (Ia - eb)) % 5
    assert (comm == expect).all()
    kappa = structure_constant(F, B2_PAIR)
    assert kappa in (2, 5 - 2)
    assert (comm == (Ia + kappa * _unit(4, 1, 4)) % 5).all()


def test_sp4_rejects_char2():
    with pytest.raises(IsospecError):
        sp4_root_generators(make_field(2, 2))


def _bfs_closure(gens):
    seen = set(gens)
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = a * g
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


@pytest.mark.parametrize("q,order", [(2, 8), (3, 27), (5, 125)])
def test_closure_orders(q, order):
    gens = sl3_root_generators(field_of_order(q))
    U = generate_closure(gens)
    assert len(U) == order
    if q <= 3:
        assert set(U) == _bfs_closure(gens)


def test_closure_of_one_family():
    F = make_field(5)
    X = [root_element(F, A2_PAIR, "first", t) for t in F.elements()]
    assert len(generate_closure(X)) == 5


def test_closure_cap():
    with pytest.raises(CapExceeded):
        generate_closure(sl3_root_generators(make_field(5)), cap=50)


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_a2_embedding(q):
    cert = embedding_certificate("A2", field_of_order(q))
    assert cert.generated_order == q**3 and cert.isomorphism and cert.center_ok
    assert cert.structure_constant == 1


@pytest.mark.parametrize("q", [3, 5, 7])
def test_b2_embedding(q):
    cert = embedding_certificate("B2", field_of_order(q))
    assert cert.generated_order == q**3 and cert.isomorphism and cert.center_ok


def test_a2_embedding_f2_exhaustive():
    cert = embedding_certificate("A2", make_field(2))
    assert cert.exhaustive and cert.pairs_checked == 64


def test_embedding_map_is_homomorphism_oracle():
    # element-level recomputation over F3 with integer matrices
    F = make_field(3)
    kappa, G, phi = heisenberg_map(F, A2_PAIR)
    for g in range(G.order):
        for h in range(0, G.order, 5):
            assert (((phi[g] @ phi[h]) % 3) == phi[G.mul(g, h)]).all()


def test_corrupted_u_fails():
    F = make_field(3)
    U = generate_closure(sl3_root_generators(F))
    bad = MatrixGroupElem.from_entries(F, [[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    assert bad not in U
    corrupted = U[:-1] + [bad]
    cert = heisenberg_iso_check(corrupted, F)
    assert not cert.isomorphism and cert.counterexample is not None


def test_iso_check_order_mismatch():
    F = make_field(3)
    U = generate_closure(sl3_root_generators(F))
    with pytest.raises(IsospecError):
        heisenberg_iso_check(U[:-1], F)


@pytest.mark.parametrize("type_,rank,q,order", [("A", 2, 2, 168), ("A", 2, 3, 5616), ("C", 2, 3, 51840),
                                                ("B", 2, 3, 51840), ("G2", 2, 2, 12096)])
def test_chevalley_order_examples(type_, rank, q, order):
    assert chevalley_order(type_, rank, q) == order


def test_chevalley_order_matches_sl_count():
    # |SL_n(F_p)| = prod_{k<n}(p^n - p^k) / (p - 1)
    for n, p in [(3, 5), (4, 3), (5, 2)]:
        gl = math.prod(p**n - p**k for k in range(n))
        assert chevalley_order("A", n - 1, p) == gl // (p - 1)


def test_chevalley_order_matches_sp4_count():
    # |Sp_4(F_q)| = q^4 (q^2 - 1)(q^4 - 1)
    for q in (3, 5, 7, 9):
        assert chevalley_order("C", 2, q) == q**4 * (q**2 - 1) * (q**4 - 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 25])
def test_a2_order_divisible_by_q_cubed(q):
    p = sympy.factorint(q).popitem()[0]
    n = chevalley_order("A", 2, q)
    assert n % q**3 == 0 and math.gcd(n // q**3, p) == 1


@pytest.mark.parametrize("label,rank,dim", [("A", 2, 8), ("B", 3, 21), ("C", 4, 36), ("D", 4, 28),
                                            ("E6", 6, 78), ("E7", 7, 133), ("E8", 8, 248),
                                            ("F4", 4, 52), ("G2", 2, 14)])
def test_order_degree_is_dimension(label, rank, dim):
    t = sympy.symbols("t")
    exps = exponents(label, rank)
    poly = t ** sum(exps) * sympy.prod([t ** (m + 1) - 1 for m in exps])
    assert sympy.degree(poly, t) == dim
    assert chevalley_order(label, rank, 2) == poly.subs(t, 2)


def test_unsupported_types():
    with pytest.raises(IsospecError):
        exponents("D", 3)
    with pytest.raises(IsospecError):
        exponents("Z", 2)
    with pytest.raises(IsospecError):
        embedding_certificate("G2", make_field(5))
