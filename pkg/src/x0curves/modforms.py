"""Eta and theta expansions and the cusp geometry of Gamma_0(2^n).

Covers four concerns:

* q-expansions of eta(m*tau) (pentagonal-number sums) and of the classical
  theta nullwerte theta2/theta3/theta4 (direct lattice sums), as exact QExp
  values;
* eta quotients on the dyadic tower, with Newman's four congruence
  conditions for modularity on Gamma_0(2^n);
* cusps a/2^k of Gamma_0(2^n): representatives, widths, and exact vanishing
  orders of eta quotients there (Ligozat-style valuation);
* genus of X_0(N) and of the Fermat curves, used for the genus-coincidence
  check.

The theta builders sum lattices directly and never go through eta products,
so the classical theta/eta identities act as cross-checks between genuinely
independent code paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .qseries import QExp

# -- eta ---------------------------------------------------------------------


def eta_series_scaled(num: int, den: int, trunc: int) -> QExp:
    """Expansion of eta((num/den)*tau) on the (1/(24*den)) lattice.

    Uses the pentagonal number theorem: the product over (1 - q^(m*k)) has
    support on generalized pentagonal numbers with signs in {-1, +1}, so the
    scaled exponents are num*(1 + 24*g) for g = k(3k-1)/2, k in Z.
    ``trunc`` is in scaled units of the returned series (denom = 24*den).
    """
    if num < 1 or den < 1:
        raise ValueError("eta scale must be a positive rational num/den")
    if trunc <= 0:
        raise ValueError("trunc must be positive")
    coeffs: dict[int, int] = {}
    k = 0
    while True:
        sign = -1 if k & 1 else 1
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        s1 = num * (1 + 24 * g1)
        s2 = num * (1 + 24 * g2)
        if s1 >= trunc and s2 >= trunc:
            break
        if s1 < trunc:
            coeffs[s1] = sign
        if k and s2 < trunc:
            coeffs[s2] = sign
        k += 1
    return QExp(coeffs, trunc, 24 * den)


def eta_series(scale: int, trunc: int) -> QExp:
    """Expansion of eta(scale*tau), certified through scaled exponent trunc
    on the (1/24) lattice."""
    return eta_series_scaled(scale, 1, trunc)


# -- theta --------------------------------------------------------------------


def theta_series(which: int, scale: int = 1, trunc: int = 800) -> QExp:
    """Direct lattice-sum expansion of theta_j(scale*tau), j in {2, 3, 4}.

    theta2 sums q^((2k+1)^2/8), theta3 sums q^(k^2/2), theta4 the same with
    alternating signs. Returned on the (1/8) lattice; ``trunc`` is scaled.
    """
    if which not in (2, 3, 4):
        raise ValueError(f"theta index must be 2, 3 or 4, got {which}")
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    if trunc <= 0:
        raise ValueError("trunc must be positive")
    coeffs: dict[int, int] = {}
    if which == 2:
        k = 0
        while True:
            s = scale * (2 * k + 1) ** 2
            if s >= trunc:
                break
            coeffs[s] = 2  # n and -(n+1) pair up
            k += 1
    else:
        coeffs[0] = 1
        k = 1
        while True:
            s = 4 * scale * k * k
            if s >= trunc:
                break
            coeffs[s] = 2 if which == 3 else (2 if k % 2 == 0 else -2)
            k += 1
    return QExp(coeffs, trunc, 8)


# -- eta quotients -------------------------------------------------------------


class EtaQuotient:
    """Product of eta(2^k * tau)^e_k living at level 2^n.

    Exponent maps are merged additively and zero entries dropped, so the
    object is always in canonical sparse form.
    """

    __slots__ = ("level_exp", "exps")

    def __init__(self, level_exp: int, exps: dict[int, int]):
        if level_exp < 0:
            raise ValueError("level exponent must be nonnegative")
        merged: dict[int, int] = {}
        for k, e in exps.items():
            if not 0 <= k <= level_exp:
                raise ValueError(f"eta argument 2^{k} outside level 2^{level_exp}")
            if e:
                merged[k] = merged.get(k, 0) + e
        self.level_exp = level_exp
        self.exps = {k: e for k, e in merged.items() if e}

    @classmethod
    def x_generator(cls, n: int) -> "EtaQuotient":
        """eta(2^(n-1))^6 / (eta(2^(n-2))^2 eta(2^n)^4), the degree-2^(n-4)
        generator."""
        if n < 2:
            raise ValueError("x generator needs n >= 2")
        return cls(n, {n - 2: -2, n - 1: 6, n: -4})

    @classmethod
    def y_generator(cls, n: int) -> "EtaQuotient":
        """eta(16)^2 eta(2^(n-1)) / (eta(8) eta(2^n)^2), the companion
        generator of degree 2^(n-4)-1. Colliding arguments (n = 4, 5)
        accumulate."""
        if n < 4:
            raise ValueError("y generator needs n >= 4")
        exps: dict[int, int] = {}
        for k, e in ((3, -1), (4, 2), (n - 1, 1), (n, -2)):
            exps[k] = exps.get(k, 0) + e
        return cls(n, exps)

    def order_at_infinity_scaled(self) -> int:
        """Scaled (denom 24) leading exponent of the product."""
        return sum(e * (1 << k) for k, e in self.exps.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, EtaQuotient):
            return NotImplemented
        return self.level_exp == other.level_exp and self.exps == other.exps

    def __repr__(self) -> str:
        parts = " ".join(f"eta(2^{k})^{e}" for k, e in sorted(self.exps.items()))
        return f"EtaQuotient(2^{self.level_exp}: {parts or '1'})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.level_exp,
            "exps": {str(k): e for k, e in sorted(self.exps.items())},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EtaQuotient":
        return cls(int(data["n"]), {int(k): int(e) for k, e in data["exps"].items()})


def eta_quotient_series(eq: EtaQuotient, trunc: int) -> QExp:
    """Expand an eta quotient, certified through scaled exponent ``trunc``
    on the (1/24) lattice.

    Every factor is built with the same relative width, which mul/invert/pow
    preserve, so the product window lands exactly on the requested boundary.
    """
    if trunc <= 0:
        raise ValueError("trunc must be positive")
    if not eq.exps:
        return QExp({0: 1}, trunc, 24)
    width = trunc - eq.order_at_infinity_scaled()
    result = None
    for k in sorted(eq.exps):
        factor = eta_series(1 << k, (1 << k) + width).pow(eq.exps[k])
        result = factor if result is None else result.mul(factor)
    return result


# -- Newman's modularity conditions ---------------------------------------------


@dataclass(frozen=True)
class NewmanVerdict:
    """The four congruence sums and whether each holds."""

    sums: tuple[int, int, int, int]
    holds: tuple[bool, bool, bool, bool]

    @property
    def all_hold(self) -> bool:
        return all(self.holds)


def newman_conditions(eq: EtaQuotient) -> NewmanVerdict:
    """Evaluate the four congruence conditions under which an eta product on
    the dyadic tower is a modular function on Gamma_0(2^n):
    sum e_k = 0;  sum k*e_k even;  sum e_k*2^k and sum e_k*2^(n-k) = 0 mod 24.
    """
    n = eq.level_exp
    s1 = sum(eq.exps.values())
    s2 = sum(k * e for k, e in eq.exps.items())
    s3 = sum(e * (1 << k) for k, e in eq.exps.items())
    s4 = sum(e * (1 << (n - k)) for k, e in eq.exps.items())
    return NewmanVerdict(
        sums=(s1, s2, s3, s4),
        holds=(s1 == 0, s2 % 2 == 0, s3 % 24 == 0, s4 % 24 == 0),
    )


# -- cusps of Gamma_0(2^n) -------------------------------------------------------


@dataclass(frozen=True)
class Cusp:
    """Cusp representative a/2^k of Gamma_0(2^n), with its width.

    ``k == n`` denotes the distinguished representative 1/2^n of infinity.
    """

    a: int
    k: int
    width: int


def cusp_width(n: int, k: int) -> int:
    """Width of the cusp a/2^k on Gamma_0(2^n): 1 when k >= n/2, else
    2^(n-2k). k = n is the representative of infinity (width 1)."""
    if not 0 <= k <= n:
        raise ValueError(f"cusp denominator exponent {k} out of range 0..{n}")
    if 2 * k >= n:
        return 1
    return 1 << (n - 2 * k)


def cusps_of(n: int) -> list[Cusp]:
    """Complete duplicate-free cusp representatives of Gamma_0(2^n).

    For k < n the classes a/2^k are indexed by odd a modulo
    2^min(k, n-k); infinity appears once as 1/2^n. The widths sum to the
    index 3*2^(n-1) of the group in the modular group.
    """
    if n < 1:
        raise ValueError("level exponent must be >= 1")
    cusps = []
    for k in range(n):
        m = min(k, n - k)
        count = 1 if m == 0 else 1 << (m - 1)  # odd residues modulo 2^m
        w = cusp_width(n, k)
        for idx in range(count):
            cusps.append(Cusp(2 * idx + 1, k, w))
    cusps.append(Cusp(1, n, 1))
    return cusps


def order_at_cusp(eq: EtaQuotient, cusp: Cusp) -> Fraction:
    """Exact vanishing order of an eta quotient at a cusp, in local-parameter
    units (negative = pole).

    Valuation formula for eta(2^k tau) at a/2^j on Gamma_0(2^n), already
    multiplied by the cusp width: 2^(n + 2*min(j,k) - min(j,n-j) - j - k)/24,
    summed against the exponents. Independent of the numerator a.
    """
    n = eq.level_exp
    j = cusp.k
    total = 0
    for k, e in eq.exps.items():
        total += e * (1 << (n + 2 * min(j, k) - min(j, n - j) - j - k))
    return Fraction(total, 24)


def valence_sum(eq: EtaQuotient) -> Fraction:
    """Degree of the cusp divisor: sum of local orders over all cusp classes.
    Zero for anything that is an honest modular function."""
    return sum((order_at_cusp(eq, c) for c in cusps_of(eq.level_exp)), Fraction(0))


# -- genus ---------------------------------------------------------------------


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _euler_phi(n: int) -> int:
    phi = 1
    for p, a in _factorize(n).items():
        phi *= (p - 1) * p ** (a - 1)
    return phi


def genus_X0(N: int) -> int:
    """Genus of the modular curve X_0(N), via the index, the counts of
    elliptic points of orders 2 and 3, and the cusp count."""
    if N < 1:
        raise ValueError("level must be positive")
    primes = _factorize(N)
    index = N
    for p in primes:
        index = index * (p + 1) // p
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in primes:
            if p == 2:
                continue
            nu2 *= 1 + (1 if p % 4 == 1 else -1)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in primes:
            if p == 3:
                continue
            nu3 *= 1 + (1 if p % 3 == 1 else -1)
    ncusps = 0
    d = 1
    while d * d <= N:
        if N % d == 0:
            ncusps += _euler_phi(gcd(d, N // d))
            if d != N // d:
                ncusps += _euler_phi(gcd(N // d, d))
        d += 1
    g = Fraction(index, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(ncusps, 2) + 1
    assert g.denominator == 1 and g >= 0
    return int(g)


def genus_fermat(d: int) -> int:
    """Genus (d-1)(d-2)/2 of the smooth plane curve x^d + y^d = 1."""
    if d < 1:
        raise ValueError("degree must be positive")
    return (d - 1) * (d - 2) // 2


# -- the generator series x_n, y_n ----------------------------------------------


@lru_cache(maxsize=None)
def x_series(n: int, trunc: int) -> QExp:
    """q-expansion of 2*theta3(2^(n-1) tau)/theta2(2^(n-1) tau): integer
    exponents for n >= 4, leading term q^(-2^(n-4)) with coefficient 1.
    ``trunc`` is in integer q-power units of the returned series."""
    if n < 4:
        raise ValueError("generator series need n >= 4")
    if trunc <= -(1 << (n - 4)):
        raise ValueError("window ends before the leading term")
    m = 1 << (n - 1)
    width = 8 * trunc + m  # relative width preserved down the mul chain
    th3 = theta_series(3, m, width)
    th2 = theta_series(2, m, m + width)
    out = th3.scale(2).mul(th2.invert()).reduced()
    assert out.denom == 1
    return out


@lru_cache(maxsize=None)
def y_series(n: int, trunc: int) -> QExp:
    """q-expansion of theta2(8 tau)/theta2(2^(n-1) tau): integer exponents,
    leading term q^(-(2^(n-4)-1)) with coefficient 1 (constant 1 when n=4).
    ``trunc`` is in integer q-power units of the returned series."""
    if n < 4:
        raise ValueError("generator series need n >= 4")
    m = 1 << (n - 1)
    if trunc <= -(m - 8) // 8:
        raise ValueError("window ends before the leading term")
    width = 8 * trunc + m - 8
    num = theta_series(2, 8, 8 + width)
    den = theta_series(2, m, m + width)
    out = num.mul(den.invert()).reduced()
    assert out.denom == 1
    return out
