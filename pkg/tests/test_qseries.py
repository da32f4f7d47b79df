"""Exactness and window bookkeeping of the truncated Laurent arithmetic.

The randomized suites (ring laws, truncation soundness) run 1000 cases each;
the independent oracle for products is a plain double loop written here, not
the library path under test.
"""

from fractions import Fraction
from math import lcm

import pytest
from hypothesis import given, settings, strategies as st

from x0curves import qseries
from x0curves.qseries import (
    AllZeroWindowError,
    NotInvertibleError,
    PrecisionError,
    QExp,
)


def q(coeffs, trunc, denom=1):
    return QExp(coeffs, trunc, denom)


def assert_same_series(a: QExp, b: QExp):
    """Equal on the common certified window (the only comparable claim)."""
    d = lcm(a.denom, b.denom)
    diff = a.with_denom(d).sub(b.with_denom(d))
    assert not diff.coeffs, f"series differ at scaled exponents {sorted(diff.coeffs)}"


# -- fixed examples ------------------------------------------------------------


def test_add_cancellation():
    one_plus = q({0: 1, 1: 1}, 10)
    one_minus = q({0: 1, 1: -1}, 10)
    total = one_plus.add(one_minus)
    assert total.coeffs == {0: 2} and total.trunc == 10


def test_add_identity():
    f = q({-2: 3, 5: Fraction(1, 2)}, 9)
    assert f.add(QExp.zero(trunc=50)) == f


def test_add_forces_denominator_unification():
    a = q({1: 1}, 16, denom=8)    # q^(1/8)
    b = q({1: 1}, 48, denom=24)   # q^(1/24)
    total = a.add(b)
    assert total.denom == 24
    assert total.coeffs == {1: 1, 3: 1}
    assert total.trunc == 48


def test_mul_basic_and_laurent():
    f = q({0: 1, 1: 1}, 10)
    g = q({0: 1, 1: -1}, 10)
    assert f.mul(g).coeffs == {0: 1, 2: -1}
    qinv = q({-1: 1}, 5)
    qq = q({1: 1}, 5)
    assert qinv.mul(qq).coeffs == {0: 1}


def test_mul_window_formula():
    # ord(f)=2 trunc 10, ord(g)=-1 trunc 6: window = min(2+6, -1+10) = 8
    f = q({2: 1, 9: 4}, 10)
    g = q({-1: 2}, 6)
    assert f.mul(g).trunc == 8


def test_invert_geometric():
    f = q({0: 1, 1: -1}, 12)  # 1 - q
    inv = f.invert()
    assert inv.coeffs == {s: 1 for s in range(12)}


def test_invert_monomial():
    f = q({1: 2}, 40, denom=8)  # 2 q^(1/8)
    inv = f.invert()
    assert inv.coeffs == {-1: Fraction(1, 2)}
    assert inv.denom == 8 and inv.trunc == 38


def test_invert_errors():
    with pytest.raises(NotInvertibleError):
        QExp.zero(trunc=10).invert()


def test_pow():
    f = q({0: 1, 1: 1}, 10)
    assert f.pow(0).coeffs == {0: 1}
    assert f.pow(2).coeffs == {0: 1, 1: 2, 2: 1}
    mono = q({1: 1}, 100, denom=24)
    assert mono.pow(24).coeffs == {24: 1}
    # negative power via inversion
    assert f.pow(-1).coeffs[1] == -1


def test_rescale():
    f = q({1: 1}, 9, denom=8)
    assert f.rescale(8).coeffs == {8: 1}
    g = q({0: 1, 1: 1}, 12)
    assert g.rescale(4).coeffs == {0: 1, 4: 1}
    assert g.rescale(4).trunc == 48


def test_leading_exponent():
    f = q({-4: 1, 0: 1}, 10)
    assert f.leading_exponent() == -4
    with pytest.raises(AllZeroWindowError):
        QExp.zero(trunc=10).leading_exponent()


def test_is_zero_through():
    z = QExp.zero(trunc=100)
    assert z.is_zero_through(50)
    f = q({5: 1}, 10)
    assert f.is_zero_through(4)
    assert not f.is_zero_through(5)
    with pytest.raises(PrecisionError):
        f.is_zero_through(10)  # boundary is outside the certified window


def test_coefficient_queries():
    f = q({3: Fraction(1, 2)}, 24, denom=24)
    assert f.coefficient(Fraction(1, 8)) == Fraction(1, 2)
    assert f.coefficient(Fraction(1, 48)) == 0  # off-lattice but inside window
    with pytest.raises(PrecisionError):
        f.coefficient(2)


def test_constructor_drops_zero_and_beyond_window():
    f = q({0: 0, 1: 2, 7: 9}, 5)
    assert f.coeffs == {1: 2}


def test_serialization_round_trip():
    f = q({-3: Fraction(-7, 2), 11: 5}, 30, denom=24)
    data = f.to_json_dict()
    assert data["terms"] == [[-3, "-7/2"], [11, "5/1"]]
    assert QExp.from_json_dict(data) == f


# -- derived oracles -------------------------------------------------------------


def brute_product(dicts, trunc):
    """Plain truncated polynomial product, the independent oracle."""
    acc = {0: 1}
    for d in dicts:
        new = {}
        for s1, c1 in acc.items():
            for s2, c2 in d.items():
                s = s1 + s2
                if s < trunc:
                    new[s] = new.get(s, 0) + c1 * c2
        acc = {s: c for s, c in new.items() if c}
    return acc


def test_eta_prefix_square_matches_brute_force():
    # product of the first 10 factors (1 - q^n), squared, on integer exponents
    T = 11
    factors = [{0: 1, n: -1} for n in range(1, 11)]
    oracle = brute_product(factors + factors, T)
    f = QExp(brute_product(factors, T), T)
    assert f.mul(f).coeffs == oracle


def test_invert_round_trip_theta_like():
    f = q({1: 2, 9: 2, 25: 2, 49: 2}, 60, denom=8)
    p = f.mul(f.invert())
    assert p.coeffs == {0: 1}
    assert p.trunc == 59  # min(ord f + trunc inv, ord inv + trunc f)


# -- property suites ---------------------------------------------------------------


small_coeffs = st.one_of(
    st.integers(min_value=-9, max_value=9),
    st.fractions(min_value=-4, max_value=4, max_denominator=6),
)


@st.composite
def qexp_values(draw, invertible=False, int_only=False):
    denom = draw(st.sampled_from((1, 2, 3, 4, 6, 8, 12, 24)))
    trunc = draw(st.integers(min_value=-6, max_value=36))
    n = draw(st.integers(min_value=1 if invertible else 0, max_value=6))
    coeffs = {}
    for _ in range(n):
        s = draw(st.integers(min_value=-18, max_value=35))
        c = draw(st.integers(min_value=-9, max_value=9) if int_only else small_coeffs)
        coeffs[s] = c
    if invertible:
        lead = draw(st.integers(min_value=-18, max_value=min(trunc - 1, 35)))
        coeffs[lead] = draw(st.sampled_from((1, -1, 2, 3, Fraction(1, 2))))
        if trunc <= lead:
            trunc = lead + draw(st.integers(min_value=1, max_value=20))
    return QExp(coeffs, trunc, denom)


@given(qexp_values(), qexp_values(), qexp_values())
@settings(max_examples=1000, deadline=None)
def test_ring_laws(f, g, h):
    assert f.add(g) == g.add(f)
    assert f.add(g).add(h) == f.add(g.add(h))
    assert f.mul(g) == g.mul(f)
    assert_same_series(f.mul(g).mul(h), f.mul(g.mul(h)))
    assert_same_series(f.mul(g.add(h)), f.mul(g).add(f.mul(h)))


@given(qexp_values(int_only=True), qexp_values(int_only=True))
@settings(max_examples=1000, deadline=None)
def test_mul_truncation_soundness(f, g):
    """The truncated product agrees with the truncation of the full product
    everywhere inside its certified window."""
    product = f.mul(g)
    d = lcm(f.denom, g.denom)
    fu, gu = f.with_denom(d), g.with_denom(d)
    full = {}
    for s1, c1 in fu.coeffs.items():
        for s2, c2 in gu.coeffs.items():
            full[s1 + s2] = full.get(s1 + s2, 0) + c1 * c2
    assert product.denom == d
    for s in range(min(list(product.coeffs) + [product.trunc]) - 1, product.trunc):
        assert product.coeffs.get(s, 0) == full.get(s, 0)


@given(qexp_values(invertible=True))
@settings(max_examples=300, deadline=None)
def test_invert_round_trip(f):
    p = f.mul(f.invert())
    assert set(p.coeffs) <= {0}
    if p.trunc > 0:
        assert p.coeffs.get(0, 0) == 1


@given(qexp_values(), qexp_values(), st.integers(min_value=1, max_value=5))
@settings(max_examples=1000, deadline=None)
def test_rescale_is_ring_homomorphism(f, g, m):
    assert f.mul(g).rescale(m) == f.rescale(m).mul(g.rescale(m))
    assert f.add(g).rescale(m) == f.rescale(m).add(g.rescale(m))


@given(qexp_values(), st.integers(min_value=1, max_value=4))
@settings(max_examples=300, deadline=None)
def test_denominator_renormalization_preserves_values(f, k):
    g = f.with_denom(f.denom * k)
    assert g == f
    for s in f.coeffs:
        e = Fraction(s, f.denom)
        assert g.coefficient(e) == f.coefficient(e)
    assert g.reduced() == f


def test_kronecker_path_matches_dict_path():
    import random

    rng = random.Random(7)
    fc = {rng.randrange(-40, 400): rng.randrange(-10**9, 10**9) for _ in range(90)}
    gc = {rng.randrange(-40, 400): rng.randrange(-10**9, 10**9) for _ in range(80)}
    f = QExp(fc, 500)
    g = QExp(gc, 500)
    old = qseries._KRONECKER_CUTOFF
    try:
        qseries._KRONECKER_CUTOFF = 1 << 60  # force dict path
        slow = f.mul(g)
        qseries._KRONECKER_CUTOFF = 0  # force packed path
        fast = f.mul(g)
    finally:
        qseries._KRONECKER_CUTOFF = old
    assert slow == fast
