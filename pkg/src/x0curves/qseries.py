"""Exact truncated Laurent series in q with fractional exponents.

A series lives on the lattice (1/denom)Z: ``coeffs`` maps the scaled exponent
s (standing for the term q^(s/denom)) to a nonzero exact coefficient (int or
Fraction). ``trunc`` is the certification boundary, also scaled: coefficients
are guaranteed correct for every s < trunc and unknown from trunc on.

Operations are pure, never mutate their inputs, and shrink the certified
window pessimistically, so a coefficient can only be read where it is
actually known; asking beyond the window raises PrecisionError rather than
returning a silent zero. Denominators of 24 (eta) and 8 (theta) cover every
series used here; mixed-lattice operands are unified on the lcm lattice.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

from .kronecker import convolve

Coeff = Union[int, Fraction]

# Sentinel truncation for exactly-known series (constants). Large enough to
# dominate any realistic window, small enough to stay printable.
EXACT_TRUNC = 1 << 62

# Above this many coefficient pairs, integer multiplications go through the
# packed big-integer convolution instead of the dict double loop.
_KRONECKER_CUTOFF = 4096


class PrecisionError(Exception):
    """A query reached past the certified window of a series."""


class AllZeroWindowError(PrecisionError):
    """Every known coefficient vanishes, so the order is not yet determined."""


class NotInvertibleError(ValueError):
    """Series has no known nonzero leading term to invert against."""


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


class QExp:
    """Truncated Laurent q-expansion with exact rational coefficients."""

    __slots__ = ("denom", "coeffs", "trunc")

    def __init__(self, coeffs: Mapping[int, Coeff], trunc: int, denom: int = 1):
        if denom < 1:
            raise ValueError(f"denom must be >= 1, got {denom}")
        clean: dict[int, Coeff] = {}
        for s, c in coeffs.items():
            if s >= trunc:
                continue  # beyond the window nothing is claimed
            c = _norm_coeff(c)
            if c:
                clean[s] = c
        self.denom = denom
        self.coeffs = clean
        self.trunc = trunc

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, trunc: int = EXACT_TRUNC, denom: int = 1) -> "QExp":
        return cls({}, trunc, denom)

    @classmethod
    def constant(cls, c: Coeff, trunc: int = EXACT_TRUNC) -> "QExp":
        return cls({0: c}, trunc, 1)

    @classmethod
    def monomial(cls, c: Coeff, s: int, trunc: int = EXACT_TRUNC, denom: int = 1) -> "QExp":
        return cls({s: c}, trunc, denom)

    # -- bookkeeping helpers ----------------------------------------------

    def order_scaled(self) -> int:
        """Least scaled exponent with nonzero coefficient; pessimistically the
        truncation boundary when the whole window vanishes."""
        return min(self.coeffs) if self.coeffs else self.trunc

    def leading_exponent(self) -> Fraction:
        """Least exponent carrying a nonzero coefficient, as an exact rational."""
        if not self.coeffs:
            raise AllZeroWindowError(
                f"series vanishes through q^({self.trunc}/{self.denom}); "
                "order not determined by this window"
            )
        return Fraction(min(self.coeffs), self.denom)

    def leading_coefficient(self) -> Coeff:
        if not self.coeffs:
            raise AllZeroWindowError("series vanishes through its window")
        return self.coeffs[min(self.coeffs)]

    def coefficient(self, exponent) -> Coeff:
        """Exact coefficient of q^exponent; PrecisionError beyond the window."""
        e = Fraction(exponent) * self.denom
        if e >= self.trunc:
            raise PrecisionError(
                f"coefficient of q^{exponent} not certified "
                f"(window ends at {self.trunc}/{self.denom})"
            )
        if e.denominator != 1:
            return 0  # off-lattice exponents inside the window are exact zeros
        return self.coeffs.get(int(e), 0)

    def is_zero_through(self, bound) -> bool:
        """True iff every coefficient with exponent <= bound vanishes.

        ``bound`` must lie strictly inside the certified window; otherwise a
        PrecisionError is raised so a shortfall can never masquerade as zero.
        """
        b = Fraction(bound) * self.denom
        if b >= self.trunc:
            raise PrecisionError(
                f"window certified only for exponents < {self.trunc}/{self.denom}, "
                f"cannot decide vanishing through {bound}"
            )
        return all(s > b for s in self.coeffs)

    def nonzero_terms(self) -> list[tuple[Fraction, Coeff]]:
        """Known terms as (exponent, coefficient), ascending."""
        return [(Fraction(s, self.denom), self.coeffs[s]) for s in sorted(self.coeffs)]

    # -- lattice management -------------------------------------------------

    def with_denom(self, new_denom: int) -> "QExp":
        """Re-express on a finer lattice; new_denom must be a multiple of denom."""
        if new_denom == self.denom:
            return self
        if new_denom % self.denom:
            raise ValueError(f"{new_denom} is not a multiple of denom {self.denom}")
        m = new_denom // self.denom
        return QExp({s * m: c for s, c in self.coeffs.items()}, self.trunc * m, new_denom)

    def reduced(self) -> "QExp":
        """Coarsest-lattice form making exactly the same claims. The stride
        must divide the truncation boundary too, otherwise reduction would
        silently extend the certified window."""
        g = gcd(self.denom, self.trunc)
        for s in self.coeffs:
            g = gcd(g, s)
            if g == 1:
                return self
        if g == 1:
            return self
        return QExp({s // g: c for s, c in self.coeffs.items()},
                    self.trunc // g, self.denom // g)

    def _unify(self, other: "QExp") -> tuple["QExp", "QExp"]:
        if self.denom == other.denom:
            return self, other
        d = lcm(self.denom, other.denom)
        return self.with_denom(d), other.with_denom(d)

    # -- arithmetic ---------------------------------------------------------

    def add(self, other: "QExp") -> "QExp":
        f, g = self._unify(other)
        trunc = min(f.trunc, g.trunc)
        out = dict(f.coeffs)
        for s, c in g.coeffs.items():
            v = out.get(s, 0) + c
            if v:
                out[s] = v
            else:
                out.pop(s, None)
        return QExp(out, trunc, f.denom)

    def neg(self) -> "QExp":
        return QExp({s: -c for s, c in self.coeffs.items()}, self.trunc, self.denom)

    def sub(self, other: "QExp") -> "QExp":
        return self.add(other.neg())

    def scale(self, c: Coeff) -> "QExp":
        """Multiply by an exact scalar; the window is unchanged."""
        c = _norm_coeff(Fraction(c) if not isinstance(c, int) else c)
        if not c:
            return QExp({}, self.trunc, self.denom)
        return QExp({s: _norm_coeff(v * c) for s, v in self.coeffs.items()},
                    self.trunc, self.denom)

    def mul(self, other: "QExp") -> "QExp":
        """Cauchy product, certified on the largest provably-correct window:
        min(ord(f)+trunc(g), ord(g)+trunc(f))."""
        f, g = self._unify(other)
        of, og = f.order_scaled(), g.order_scaled()
        trunc = min(of + g.trunc, og + f.trunc)
        if not f.coeffs or not g.coeffs:
            return QExp({}, trunc, f.denom)
        if (
            len(f.coeffs) * len(g.coeffs) > _KRONECKER_CUTOFF
            and all(type(c) is int for c in f.coeffs.values())
            and all(type(c) is int for c in g.coeffs.values())
        ):
            out = _mul_packed(f.coeffs, g.coeffs, of, og, trunc)
        else:
            out = _mul_dict(f.coeffs, g.coeffs, trunc)
        return QExp(out, trunc, f.denom)

    def invert(self) -> "QExp":
        """Multiplicative inverse. mul(f, f.invert()) is 1 through the
        window both sides certify, which is trunc - 2*ord in scaled units."""
        if not self.coeffs:
            raise NotInvertibleError(
                "series vanishes through its certified window; nothing to invert"
            )
        m = self.order_scaled()
        c0 = self.coeffs[m]
        width = self.trunc - m  # relative coefficients of f known below this
        inv0 = _norm_coeff(Fraction(1, 1) / c0)
        rel = {i - m: c for i, c in self.coeffs.items() if i != m}
        if not rel:
            # monomial: the inverse is exact, no recurrence needed
            return QExp({-m: inv0}, self.trunc - 2 * m, self.denom)
        if width > 10**7:
            raise ValueError(
                "inverse of a non-monomial series is an infinite expansion; "
                "give the input a finite certified window first"
            )
        # b_t = -(1/c0) * sum_{0<i<=t} a_i b_{t-i}, with a_i = coeff at m+i
        b: dict[int, Coeff] = {0: inv0}
        for t in range(1, width):
            acc: Coeff = 0
            for i, a in rel.items():
                if i <= t:
                    bt = b.get(t - i)
                    if bt:
                        acc += a * bt
            if acc:
                b[t] = _norm_coeff(-acc * inv0)
        return QExp({t - m: c for t, c in b.items()}, self.trunc - 2 * m, self.denom)

    def pow(self, k: int) -> "QExp":
        """Integer power by repeated squaring; negative k inverts first."""
        if k < 0:
            return self.invert().pow(-k)
        if k == 0:
            # window consistent with the k>=1 chain: (k-1)*ord + trunc
            return QExp({0: 1}, self.trunc - self.order_scaled(), self.denom)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result.mul(base)
            k >>= 1
            if not k:
                return result
            base = base.mul(base)

    def rescale(self, m: int) -> "QExp":
        """Substitute q -> q^m (tau -> m*tau): exponents and window scale by m."""
        if m < 1:
            raise ValueError(f"rescale factor must be a positive integer, got {m}")
        return QExp({s * m: c for s, c in self.coeffs.items()}, self.trunc * m, self.denom)

    # -- operators ----------------------------------------------------------

    def __add__(self, other):
        return self.add(self._coerce(other))

    def __radd__(self, other):
        return self.add(self._coerce(other))

    def __sub__(self, other):
        return self.sub(self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other).sub(self)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self.mul(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        return self.pow(k)

    @staticmethod
    def _coerce(value) -> "QExp":
        if isinstance(value, QExp):
            return value
        if isinstance(value, (int, Fraction)):
            return QExp.constant(value)
        raise TypeError(f"cannot combine QExp with {type(value).__name__}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExp):
            return NotImplemented
        f, g = self._unify(other)
        return f.trunc == g.trunc and f.coeffs == g.coeffs

    __hash__ = None  # mutable mapping inside

    def __repr__(self) -> str:
        terms = self.nonzero_terms()
        shown = ", ".join(f"q^{e}:{c}" for e, c in terms[:6])
        if len(terms) > 6:
            shown += ", ..."
        return f"QExp({shown} | trunc {self.trunc}/{self.denom})"

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = [
            [s, f"{Fraction(self.coeffs[s]).numerator}/{Fraction(self.coeffs[s]).denominator}"]
            for s in sorted(self.coeffs)
        ]
        return {"denom": self.denom, "trunc": self.trunc, "terms": terms}

    @classmethod
    def from_json_dict(cls, data: dict) -> "QExp":
        coeffs = {int(s): Fraction(c) for s, c in data["terms"]}
        return cls(coeffs, int(data["trunc"]), int(data["denom"]))


def _mul_dict(fc: dict, gc: dict, trunc: int) -> dict:
    out: dict[int, Coeff] = {}
    fitems = sorted(fc.items())
    gitems = sorted(gc.items())
    if len(fitems) > len(gitems):
        fitems, gitems = gitems, fitems
    for s1, c1 in fitems:
        for s2, c2 in gitems:
            s = s1 + s2
            if s >= trunc:
                break
            out[s] = out.get(s, 0) + c1 * c2
    return {s: _norm_coeff(c) for s, c in out.items() if c}


def _mul_packed(fc: dict, gc: dict, of: int, og: int, trunc: int) -> dict:
    """Integer-only product through the packed convolution kernel."""
    stride = 0
    for s in fc:
        stride = gcd(stride, s - of)
    for s in gc:
        stride = gcd(stride, s - og)
    stride = stride or 1
    limit = trunc - of - og  # offsets at or above this are discarded anyway
    nslots = (limit - 1) // stride + 1 if limit > 0 else 0
    if nslots <= 0:
        return {}

    def dense(coeffs: dict, base: int) -> list[int]:
        arr = [0] * min(nslots, (max(coeffs) - base) // stride + 1)
        for s, c in coeffs.items():
            i = (s - base) // stride
            if i < len(arr):
                arr[i] = c
        return arr

    conv = convolve(dense(fc, of), dense(gc, og))
    out = {}
    base = of + og
    for i, c in enumerate(conv):
        if c:
            s = base + i * stride
            if s < trunc:
                out[s] = c
    return out


def prune_window(f: QExp, new_trunc_scaled: int) -> QExp:
    """Forget certification beyond a smaller scaled boundary."""
    if new_trunc_scaled >= f.trunc:
        return f
    return QExp(f.coeffs, new_trunc_scaled, f.denom)
