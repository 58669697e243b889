import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from isospec.bounds import (BoundParams, compute_c1, compute_c3, compute_c5, covolume_log_bound, default_params,
                            growth_table, isospectral_log_count, lie_data, positivity_threshold,
                            prop41_index_bound, with_pprime)
from isospec.errors import IsospecError
from isospec.lietype import chevalley_order

mpmath.mp.dps = 40


def _c1_direct(exps, dim, r, c0=1, c0p=1, s=0, p0=13):
    """c1 evaluated as the literal product, at 40 digits."""
    two_pi = 2 * mpmath.pi
    val = mpmath.mpf(c0) ** (mpmath.mpf(dim) / 2) * mpmath.mpf(c0p) ** (mpmath.mpf(s) / 2)
    for m in exps:
        val *= mpmath.factorial(m) / two_pi ** (m + 1)
    return val * mpmath.mpf(p0) ** dim * (mpmath.pi**2 / 6) ** r


@pytest.fixture
def A2():
    return default_params("A2")


def test_lie_data_examples():
    a = lie_data("A", 2)
    assert (a.dim, a.rank, a.exponents, a.positive_roots) == (8, 2, (1, 2), 3)
    g = lie_data("G2", 2)
    assert (g.dim, g.rank, g.exponents, g.positive_roots) == (14, 2, (1, 5), 6)
    with pytest.raises(IsospecError):
        lie_data("A", 1)
    with pytest.raises(IsospecError):
        lie_data("Q", 3)


@pytest.mark.parametrize("label,rank", [("A", 3), ("B", 2), ("C", 3), ("D", 5), ("E6", 6), ("E8", 8),
                                        ("F4", 4), ("G2", 2)])
def test_lie_data_dim_is_order_degree(label, rank):
    g = lie_data(label, rank)
    assert g.dim == g.rank + 2 * g.positive_roots and g.positive_roots == sum(g.exponents)
    # leading degree of q -> #G(F_q): log_q #G -> dim as q grows
    q = 2**61 - 1
    assert round(math.log(chevalley_order(label, rank, q), q)) == g.dim


def test_c1_example(A2):
    log_c1 = compute_c1(A2)
    assert log_c1 == pytest.approx(13.02, abs=5e-3)
    assert math.exp(log_c1) == pytest.approx(4.51e5, rel=1e-3)
    assert log_c1 == pytest.approx(float(mpmath.log(_c1_direct((1, 2), 8, 2))), rel=1e-12)


def test_c1_p0_contribution():
    with_13 = compute_c1(default_params("A2", p0=13))
    with_17 = compute_c1(default_params("A2", p0=17))
    assert with_17 - with_13 == pytest.approx(8 * (math.log(17) - math.log(13)), rel=1e-12)
    # the factorial part alone: prod m!/(2 pi)^(m+1) = 2/(2 pi)^5 for A2
    rest = with_13 - 8 * math.log(13) - 2 * math.log(math.pi**2 / 6)
    assert rest == pytest.approx(math.log(2 / (2 * math.pi) ** 5), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["A2", "A4", "B3", "C2", "D4", "G2", "F4", "E6"]),
       st.floats(0.1, 20), st.floats(0.1, 20), st.integers(0, 6), st.sampled_from([13, 17, 101]))
def test_c1_matches_direct_product(label, c0, c0p, s, p0):
    P = default_params(label, c0=c0, c0_prime=c0p, s=s, p0=p0)
    g = P.group
    direct = mpmath.log(_c1_direct(g.exponents, g.dim, g.rank, c0, c0p, s, p0))
    assert compute_c1(P) == pytest.approx(float(direct), rel=1e-9, abs=1e-9)


def test_c3_c5_gamma(A2):
    assert compute_c3(A2) == pytest.approx(7.5 * math.log(5), rel=1e-12)
    assert compute_c5(A2) == pytest.approx(37.96, abs=1e-2)
    assert compute_c5(A2) == pytest.approx(compute_c3(A2) + compute_c1(A2) + 8 * math.log(5), rel=1e-12)
    assert A2.gamma == 4
    assert default_params("G2", s=2).gamma == 8


def test_covolume_examples(A2):
    b = covolume_log_bound(A2, 10)
    expect = 10 * (compute_c1(A2) + 7.5 * math.log(5) + 4 * math.log(10))
    assert b.log_x == pytest.approx(expect, rel=1e-12)
    assert b.log_x == pytest.approx(343, abs=1)
    assert covolume_log_bound(A2, 3).holds
    assert covolume_log_bound(A2, 2).log_x > 0
    with pytest.raises(IsospecError):
        covolume_log_bound(A2, 1)


def test_torsion_free_inflates_covolume():
    plain = covolume_log_bound(default_params("A2"), 50).log_x
    tf = covolume_log_bound(default_params("A2", torsion_free=True, c_tf=3.0), 50).log_x
    assert tf - plain == pytest.approx(50 * math.log(3.0), rel=1e-12)
    assert isospectral_log_count(default_params("A2", torsion_free=True), 50) == \
        isospectral_log_count(default_params("A2"), 50)


def test_count_examples(A2):
    c200 = isospectral_log_count(A2, 200)
    manual = 9900 * math.log(5) - 200 * (compute_c5(A2) + 4 * math.log(200))
    assert c200.log_nonconjugate_count == pytest.approx(manual, rel=1e-12)
    assert c200.log_nonconjugate_count == pytest.approx(4.1e3, rel=0.02)
    c100 = isospectral_log_count(A2, 100)
    assert c100.log_nonconjugate_count == 0 and c100.difference < 0
    ratio = isospectral_log_count(A2, 2000).log_subgroup_count / isospectral_log_count(A2, 1000).log_subgroup_count
    assert ratio == pytest.approx(4, rel=2e-3)


def test_paper_literal_variant(A2):
    lit = isospectral_log_count(BoundParams(A2.group, paper_literal=True), 200)
    assert lit.difference == pytest.approx(200**2 * compute_c3(A2) - lit.log_class_cap, rel=1e-12)
    assert lit.log_nonconjugate_count > isospectral_log_count(A2, 200).log_nonconjugate_count


@pytest.mark.parametrize("d", [3, 4, 10, 57, 500, 10**4])
def test_covolume_inequality(A2, d):
    b = covolume_log_bound(A2, d)
    assert b.log_x >= b.check * (1 - 1e-9)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.01])
def test_subgroup_inequality_iff_threshold(eps):
    P = default_params("A2", eps=eps)
    for d in range(2, 400, 2):
        lhs = isospectral_log_count(P, d).log_subgroup_count
        rhs = (0.25 - eps) * d * d * math.log(P.pprime)
        exact = Fraction(d, 2) * (Fraction(d, 2) - 1) >= (Fraction(1, 4) - Fraction(eps)) * d * d
        assert exact == (d >= 1 / (2 * eps) - 1e-12)
        assert (lhs >= rhs * (1 - 1e-12)) == exact


def test_params_validation():
    g = lie_data("A", 2)
    for bad in (dict(p0=11), dict(p0=15), dict(pprime=3), dict(pprime=13), dict(eps=0.25), dict(eps=0),
                dict(C=0), dict(c0=-1)):
        with pytest.raises(IsospecError):
            BoundParams(g, **bad)


def test_prop41_examples():
    # |SL3(F5)| = 125 * 24 * 124 = 372000, so the quotient by 5 is 74400
    assert chevalley_order("A", 2, 5) == 372000
    assert prop41_index_bound("A", 2, 5, [1]) == 372000 // 5 == 74400
    assert prop41_index_bound("A", 2, 2, [1, 1]) == 168**2 // 4 == 7056
    assert prop41_index_bound("A", 2, 5, [2]) == chevalley_order("A", 2, 25) // 25
    with pytest.raises(IsospecError):
        prop41_index_bound("A", 1, 5, [1])
    with pytest.raises(IsospecError):
        prop41_index_bound("A", 2, 6, [1])


@pytest.mark.parametrize("label,rank", [("A", 2), ("A", 3), ("B", 2), ("C", 3), ("D", 4), ("G2", 2), ("E6", 6)])
@pytest.mark.parametrize("p,degrees", [(2, [1]), (3, [1, 2]), (5, [3]), (7, [1, 1, 1]), (13, [2, 1])])
def test_prop41_divisibility(label, rank, p, degrees):
    num = math.prod(chevalley_order(label, rank, p**n) for n in degrees)
    assert num % p ** sum(degrees) == 0
    assert prop41_index_bound(label, rank, p, degrees) * p ** sum(degrees) == num


def test_growth_all_zero_means_a_undefined(A2):
    t = growth_table(A2, range(10, 60))
    assert not t.a_defined and t.a is None and t.threshold is None


def test_growth_table_a2(A2):
    t = growth_table(A2, range(150, 401))
    assert t.a_defined and t.a > 0
    assert t.monotone_after_threshold and t.c6 > 0
    assert positivity_threshold(A2) in range(101, 201)
    # a is the largest constant valid on every positive entry
    for r in t.reports:
        if r.log_nonconjugate_count > 0:
            lx = r.log_x
            assert r.log_nonconjugate_count >= t.a * lx * lx / math.log(lx) ** 2 * (1 - 1e-12)


def test_a_increases_with_pprime(A2):
    a = [growth_table(with_pprime(A2, p), range(150, 401)).a for p in (5, 7, 11)]
    assert a[0] < a[1] < a[2]


def test_threshold_matches_brute_scan(A2):
    first = positivity_threshold(A2, 1000)
    assert all(isospectral_log_count(A2, d).difference > 0 for d in range(first, 1001))
    assert isospectral_log_count(A2, first - 1).difference <= 0


def test_growth_csv_and_dict(A2):
    t = growth_table(A2, range(140, 160))
    lines = t.to_csv().splitlines()
    assert lines[0] == "d,log_x,log_subgroup_count,log_class_cap,log_nonconjugate_count,a_running"
    assert len(lines) == 21
    d = t.to_dict()
    assert d["params"]["group"]["label"] == "A2" and len(d["reports"]) == 20


def test_no_overflow_large_d(A2):
    t = growth_table(A2, [10**4])
    r = t.reports[0]
    assert all(math.isfinite(v) for v in (r.log_x, r.log_class_cap, r.log_nonconjugate_count))
