"""Eta/theta builders against brute-force oracles, Newman fixtures, and the
cusp geometry of Gamma_0(2^n) against an independent orbit enumeration."""

from fractions import Fraction
from math import gcd

import pytest

from x0curves import modforms as mf
from x0curves.qseries import QExp


# -- independent oracles ------------------------------------------------------


def brute_eta_product(nfactors: int, trunc: int) -> dict[int, int]:
    """prod_{n=1}^{nfactors} (1 - q^n) by plain truncated multiplication."""
    acc = {0: 1}
    for n in range(1, nfactors + 1):
        new = {}
        for s, c in acc.items():
            if s < trunc:
                new[s] = new.get(s, 0) + c
            if s + n < trunc:
                new[s + n] = new.get(s + n, 0) - c
        acc = {s: c for s, c in new.items() if c}
    return acc


def naive_theta(which: int, trunc_eighths: int) -> dict[int, int]:
    """Direct sum over n in Z, exponents in eighths, the oracle path."""
    out: dict[int, int] = {}
    for n in range(-200, 201):
        if which == 2:
            s = (2 * n + 1) ** 2
            c = 1
        else:
            s = 4 * n * n
            c = (-1) ** n if which == 4 else 1
        if s < trunc_eighths:
            out[s] = out.get(s, 0) + c
    return {s: c for s, c in out.items() if c}


class ProjectiveLine:
    """P^1(Z/NZ) with unit-scaling normalization, for the orbit oracle."""

    def __init__(self, N: int):
        self.N = N
        units = [u for u in range(1, N) if gcd(u, N) == 1]
        reps = set()
        for c in range(N):
            for d in range(N):
                if gcd(gcd(c, d), N) == 1:
                    reps.add(min(((u * c) % N, (u * d) % N) for u in units))
        self.units = units
        self.reps = reps

    def normalize(self, c: int, d: int) -> tuple[int, int]:
        N = self.N
        return min(((u * c) % N, (u * d) % N) for u in self.units)

    def translation_orbit_sizes(self) -> list[int]:
        """Sizes of the orbits of (c:d) -> (c:c+d); these are the cusp widths."""
        seen = set()
        sizes = []
        for rep in sorted(self.reps):
            if rep in seen:
                continue
            size = 0
            cur = rep
            while True:
                seen.add(cur)
                size += 1
                cur = self.normalize(cur[0], (cur[0] + cur[1]) % self.N)
                if cur == rep:
                    break
            sizes.append(size)
        return sizes


# -- eta ------------------------------------------------------------------------


def test_eta_series_matches_brute_force_product():
    T = 51  # integer exponents; first 50 factors already exact there
    oracle = brute_eta_product(50, T)
    e = mf.eta_series(1, 1 + 24 * (T - 1))
    assert e.denom == 24
    got = {(s - 1) // 24: c for s, c in e.coeffs.items()}
    assert got == oracle


def test_eta_coefficient_at_offset_12_is_minus_one():
    # generalized pentagonal number 12 = k(3k-1)/2 at k = 3, sign (-1)^3
    oracle = brute_eta_product(50, 14)
    assert oracle[12] == -1
    e = mf.eta_series(1, 1 + 24 * 13)
    assert e.coefficient(Fraction(1 + 24 * 12, 24)) == -1


def test_eta_series_leading_pattern():
    e = mf.eta_series(1, 1 + 24 * 8)
    assert e.leading_exponent() == Fraction(1, 24)
    offsets = {(s - 1) // 24: c for s, c in e.coeffs.items()}
    assert offsets == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1}


def test_eta_scaling_is_rescale():
    assert mf.eta_series(2, 120) == mf.eta_series(1, 60).rescale(2)
    assert mf.eta_series(6, 600) == mf.eta_series(1, 100).rescale(6)


def test_eta_fractional_scale_lattice():
    eh = mf.eta_series_scaled(1, 2, 100)
    assert eh.denom == 48
    assert eh.leading_exponent() == Fraction(1, 48)
    # eta(tau/2) rescaled by 2 is eta(tau); windows differ, content must not
    diff = eh.rescale(2).sub(mf.eta_series(1, 50).with_denom(48))
    assert not diff.coeffs


# -- theta -----------------------------------------------------------------------


@pytest.mark.parametrize("which", [2, 3, 4])
def test_theta_matches_naive_sum(which):
    T = 900
    th = mf.theta_series(which, 1, T)
    assert th.denom == 8
    assert th.coeffs == naive_theta(which, T)


def test_theta_leading_terms():
    th2 = mf.theta_series(2, 1, 80)
    assert th2.leading_exponent() == Fraction(1, 8)
    assert th2.nonzero_terms()[:3] == [
        (Fraction(1, 8), 2), (Fraction(9, 8), 2), (Fraction(25, 8), 2)]
    th3 = mf.theta_series(3, 1, 80)
    assert th3.nonzero_terms()[:3] == [
        (Fraction(0), 1), (Fraction(1, 2), 2), (Fraction(2), 2)]
    th4 = mf.theta_series(4, 1, 80)
    assert th4.nonzero_terms()[:3] == [
        (Fraction(0), 1), (Fraction(1, 2), -2), (Fraction(2), 2)]


def test_theta_scale_argument():
    assert mf.theta_series(2, 4, 400) == mf.theta_series(2, 1, 100).rescale(4)


# -- eta quotients ------------------------------------------------------------------


def test_quotient_merges_and_drops_zeros():
    assert mf.EtaQuotient(6, {2: 0, 3: 5}).exps == {3: 5}
    # colliding eta arguments accumulate in the generator constructors
    assert mf.EtaQuotient.y_generator(5).exps == {3: -1, 4: 3, 5: -2}
    assert mf.EtaQuotient.y_generator(4).exps == {}  # everything cancels: constant 1


def test_quotient_out_of_level_rejected():
    with pytest.raises(ValueError):
        mf.EtaQuotient(3, {4: 1})


def test_empty_quotient_is_one():
    s = mf.eta_quotient_series(mf.EtaQuotient(6, {}), 240)
    assert s.coeffs == {0: 1}


def test_half_theta2_quotient():
    # eta(2t)^2/eta(t) is theta2/2
    q = mf.EtaQuotient(1, {1: 2, 0: -1})
    s = mf.eta_quotient_series(q, 24 * 40)
    th2 = mf.theta_series(2, 1, 8 * 40)
    diff = s.scale(2).sub(th2)
    assert not diff.coeffs
    assert diff.is_zero_through(38)


def test_x_generator_series_leading():
    xq = mf.EtaQuotient.x_generator(6)
    assert xq.exps == {4: -2, 5: 6, 6: -4}
    s = mf.eta_quotient_series(xq, 24 * 20)
    assert s.leading_exponent() == -4


def test_generator_series_match_quotients():
    for n in (4, 5, 6, 7, 8):
        T = 40
        xs = mf.x_series(n, T).with_denom(24)
        xqs = mf.eta_quotient_series(mf.EtaQuotient.x_generator(n), 24 * T)
        assert not xs.sub(xqs).coeffs
        ys = mf.y_series(n, T).with_denom(24)
        yqs = mf.eta_quotient_series(mf.EtaQuotient.y_generator(n), 24 * T)
        assert not ys.sub(yqs).coeffs


def test_quotient_json_round_trip():
    eq = mf.EtaQuotient.y_generator(8)
    data = eq.to_json_dict()
    assert data == {"n": 8, "exps": {"3": -1, "4": 2, "7": 1, "8": -2}}
    assert mf.EtaQuotient.from_json_dict(data) == eq


# -- Newman conditions ----------------------------------------------------------------


def test_newman_x6_sums():
    v = mf.newman_conditions(mf.EtaQuotient.x_generator(6))
    assert v.sums == (0, -2, -96, 0)
    assert v.all_hold


def test_newman_y7_fails_exactly_condition_two():
    v = mf.newman_conditions(mf.EtaQuotient.y_generator(7))
    assert v.sums[1] == -3
    assert v.holds == (True, False, True, True)
    assert not v.all_hold


def test_newman_empty_quotient_all_hold():
    assert mf.newman_conditions(mf.EtaQuotient(6, {})).all_hold


def test_newman_family_parity():
    for n in range(4, 15):
        vx = mf.newman_conditions(mf.EtaQuotient.x_generator(n))
        vy = mf.newman_conditions(mf.EtaQuotient.y_generator(n))
        assert vx.all_hold
        if n % 2 == 0:
            assert vy.all_hold
        else:
            assert vy.holds == (True, False, True, True)


# -- cusps ------------------------------------------------------------------------------


def test_cusp_width_fixtures():
    assert mf.cusp_width(6, 3) == 1
    assert mf.cusp_width(6, 2) == 4
    assert mf.cusp_width(8, 0) == 256
    assert mf.cusp_width(6, 6) == 1  # infinity
    with pytest.raises(ValueError):
        mf.cusp_width(6, 7)
    with pytest.raises(ValueError):
        mf.cusp_width(6, -1)


def test_cusp_count_n1():
    assert len(mf.cusps_of(1)) == 2  # 0 and infinity


def test_cusp_counts_match_phi_formula():
    def phi(m):
        return mf._euler_phi(m)

    for n in range(1, 13):
        expected = sum(phi(gcd(1 << k, 1 << (n - k))) for k in range(n + 1))
        assert len(mf.cusps_of(n)) == expected


def test_widths_sum_to_index():
    for n in range(1, 13):
        assert sum(c.width for c in mf.cusps_of(n)) == 3 * (1 << (n - 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_cusps_match_orbit_enumeration(n):
    """Cusps of Gamma_0(N) are the orbits of (c:d) -> (c:c+d) on P^1(Z/N),
    and the orbit sizes are the widths."""
    p1 = ProjectiveLine(1 << n)
    orbit_sizes = sorted(p1.translation_orbit_sizes())
    widths = sorted(c.width for c in mf.cusps_of(n))
    assert orbit_sizes == widths


def test_cusps_are_duplicate_free():
    for n in range(1, 10):
        cs = mf.cusps_of(n)
        assert len({(c.a, c.k) for c in cs}) == len(cs)
        for c in cs:
            assert c.width == mf.cusp_width(n, c.k)
            assert c.a % 2 == 1


# -- orders at cusps -----------------------------------------------------------------


def test_order_fixtures_level_64():
    xq = mf.EtaQuotient.x_generator(6)
    yq = mf.EtaQuotient.y_generator(6)
    inf = mf.Cusp(1, 6, 1)
    assert mf.order_at_cusp(xq, inf) == -4
    assert mf.order_at_cusp(yq, inf) == -3
    at5 = mf.Cusp(1, 5, 1)
    assert mf.order_at_cusp(xq, at5) == 4
    assert mf.order_at_cusp(yq, at5) == 1
    for k in range(4):
        c = mf.Cusp(1, k, mf.cusp_width(6, k))
        assert mf.order_at_cusp(xq, c) == 0
        assert mf.order_at_cusp(yq, c) == 0


def test_y_orders_match_widths_mid_range():
    # the second generator vanishes to exactly the width at a/2^k, k=4..n-2
    for n in (8, 10, 12):
        yq = mf.EtaQuotient.y_generator(n)
        for k in range(4, n - 1):
            c = mf.Cusp(1, k, mf.cusp_width(n, k))
            expected = mf.cusp_width(n, k) if k <= n - 2 else 1
            assert mf.order_at_cusp(yq, c) == expected


def test_order_agrees_with_series_leading_exponent():
    for n in (6, 8, 10):
        inf = mf.Cusp(1, n, 1)
        xq = mf.EtaQuotient.x_generator(n)
        yq = mf.EtaQuotient.y_generator(n)
        a = 1 << (n - 4)
        assert mf.order_at_cusp(xq, inf) == mf.x_series(n, 2 - a).leading_exponent()
        assert mf.order_at_cusp(yq, inf) == mf.y_series(n, 3 - a).leading_exponent()


def test_valence_sum_vanishes_for_modular_quotients():
    for n in range(4, 13):
        xq = mf.EtaQuotient.x_generator(n)
        assert mf.valence_sum(xq) == 0
        if n % 2 == 0:
            assert mf.valence_sum(mf.EtaQuotient.y_generator(n)) == 0
    # a handful of other Newman-passing quotients
    others = [
        mf.EtaQuotient(6, {4: -2, 5: 6, 6: -4}),
        mf.EtaQuotient(8, {0: 2, 2: -2, 6: 2, 8: -2}),
    ]
    for eq in others:
        if mf.newman_conditions(eq).all_hold:
            assert mf.valence_sum(eq) == 0


def test_generator_pole_orders_coprime():
    for n in range(6, 15):
        a = 1 << (n - 4)
        assert gcd(a, a - 1) == 1


# -- genus -------------------------------------------------------------------------


def test_genus_fixtures():
    assert mf.genus_X0(1) == 0
    assert mf.genus_X0(2) == 0
    assert mf.genus_X0(11) == 1
    assert mf.genus_X0(37) == 2
    assert mf.genus_X0(64) == 3
    assert mf.genus_X0(256) == 21
    assert mf.genus_fermat(2) == 0
    assert mf.genus_fermat(4) == 3
    assert mf.genus_fermat(8) == 21


def test_genus_coincidence_family():
    for n in range(1, 6):
        assert mf.genus_X0(1 << (2 * n + 2)) == mf.genus_fermat(1 << n)


# -- generator series --------------------------------------------------------------


def test_x_series_leading():
    for n in (4, 5, 6, 8, 10):
        a = 1 << (n - 4)
        s = mf.x_series(n, 2 - a)
        assert s.leading_exponent() == -a
        assert s.leading_coefficient() == 1


def test_y_series_leading():
    for n in (5, 6, 8, 10):
        a = 1 << (n - 4)
        s = mf.y_series(n, 3 - a)
        assert s.leading_exponent() == -(a - 1)
        assert s.leading_coefficient() == 1
    assert mf.y_series(4, 10).coeffs == {0: 1}


def test_series_integer_exponents():
    for n in (6, 7, 8):
        assert mf.x_series(n, 20).denom == 1
        assert mf.y_series(n, 20).denom == 1
