"""Sparse bivariate polynomials over Z and the parity-split doubling recursion.

The recursion sends the curve polynomial at level 2^(n-1) to the one at
level 2^n: split into even/odd parts in x, substitute
x -> sqrt(x^2+4)/sqrt(x), y -> y/sqrt(x), square the parts, subtract, and
clear denominators with the factor x^(2^(n-5)). No radical ever needs to be
materialized: evenness of Q and oddness of R in their first argument mean
only integer powers of u = (x^2+4)/x = x + 4/x occur, and the single
remaining half-integral contribution y^j * x^(-j/2) is tracked on a doubled
exponent lattice (HalfExpPoly) until the final factor clears it.

Coefficients are plain Python ints throughout; any fractional or negative
exponent surviving to the end is a hard error, never silently rounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .kronecker import convolve
from .qseries import QExp

DEFAULT_CAP = 16

# Above this many term pairs, grid products are packed through the
# big-integer convolution.
_KRONECKER_CUTOFF = 4096


class ResourceCapError(RuntimeError):
    """A computation refused to start or continue past its configured cap."""


# -- generic sparse grid product ------------------------------------------------


def _mul_grid(A: dict, B: dict) -> dict:
    """Product of two sparse integer grids keyed by (i, j) exponent pairs.

    Works for any integer exponents (negative included). Large products are
    mapped onto a dense rectangle with per-axis strides and multiplied as one
    packed convolution.
    """
    if not A or not B:
        return {}
    if len(A) * len(B) <= _KRONECKER_CUTOFF:
        out: dict[tuple[int, int], int] = {}
        if len(A) > len(B):
            A, B = B, A
        for (ia, ja), ca in A.items():
            for (ib, jb), cb in B.items():
                key = (ia + ib, ja + jb)
                v = out.get(key, 0) + ca * cb
                if v:
                    out[key] = v
                else:
                    del out[key]
        return out

    ia0 = min(i for i, _ in A)
    ja0 = min(j for _, j in A)
    ib0 = min(i for i, _ in B)
    jb0 = min(j for _, j in B)
    gx = 0
    gy = 0
    for i, j in A:
        gx = gcd(gx, i - ia0)
        gy = gcd(gy, j - ja0)
    for i, j in B:
        gx = gcd(gx, i - ib0)
        gy = gcd(gy, j - jb0)
    gx = gx or 1
    gy = gy or 1
    nxa = (max(i for i, _ in A) - ia0) // gx + 1
    nxb = (max(i for i, _ in B) - ib0) // gx + 1
    nx = nxa + nxb - 1  # row stride wide enough that x-slots never carry

    def dense(P: dict, i0: int, j0: int) -> list[int]:
        ny = (max(j for _, j in P) - j0) // gy + 1
        arr = [0] * ((ny - 1) * nx + nxa + nxb)
        for (i, j), c in P.items():
            arr[(i - i0) // gx + (j - j0) // gy * nx] = c
        return arr

    conv = convolve(dense(A, ia0, ja0), dense(B, ib0, jb0))
    out = {}
    i_base = ia0 + ib0
    j_base = ja0 + jb0
    for k, c in enumerate(conv):
        if c:
            out[(i_base + (k % nx) * gx, j_base + (k // nx) * gy)] = c
    return out


# -- BiPoly ----------------------------------------------------------------------


def _term_sort_key(key: tuple[int, int]):
    i, j = key
    return (-(i + j), -j, -i)  # graded, y before x, descending


class BiPoly:
    """Bivariate polynomial over Z in canonical sparse form (no zero terms)."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: dict[tuple[int, int], int] | None = None):
        clean: dict[tuple[int, int], int] = {}
        if monomials:
            for (i, j), c in monomials.items():
                if c:
                    if i < 0 or j < 0:
                        raise ValueError(f"negative exponent ({i},{j}) in BiPoly")
                    clean[(i, j)] = c
        self.monomials = clean

    # construction helpers

    @classmethod
    def constant(cls, c: int) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    # queries

    def is_zero(self) -> bool:
        return not self.monomials

    def degree_x(self) -> int:
        return max((i for i, _ in self.monomials), default=0)

    def degree_y(self) -> int:
        return max((j for _, j in self.monomials), default=0)

    def total_degree(self) -> int:
        return max((i + j for i, j in self.monomials), default=0)

    def coefficient(self, i: int, j: int) -> int:
        return self.monomials.get((i, j), 0)

    def is_monic_in_y(self) -> bool:
        d = self.degree_y()
        top = {i: c for (i, j), c in self.monomials.items() if j == d}
        return top == {0: 1}

    def y_groups(self) -> dict[int, dict[int, int]]:
        """Group monomials by y-degree: {j: {i: coeff}}."""
        out: dict[int, dict[int, int]] = {}
        for (i, j), c in self.monomials.items():
            out.setdefault(j, {})[i] = c
        return out

    # arithmetic

    def add(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.monomials)
        for k, c in other.monomials.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return BiPoly(out)

    def neg(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.monomials.items()})

    def sub(self, other: "BiPoly") -> "BiPoly":
        return self.add(other.neg())

    def mul(self, other: "BiPoly") -> "BiPoly":
        return BiPoly(_mul_grid(self.monomials, other.monomials))

    def pow(self, k: int) -> "BiPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = BiPoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            k >>= 1
            if k:
                base = base.mul(base)
        return result

    @staticmethod
    def _coerce(v) -> "BiPoly":
        if isinstance(v, BiPoly):
            return v
        if isinstance(v, int):
            return BiPoly.constant(v)
        raise TypeError(f"cannot combine BiPoly with {type(v).__name__}")

    def __add__(self, other):
        return self.add(self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.sub(self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other).sub(self)

    def __neg__(self):
        return self.neg()

    def __mul__(self, other):
        return self.mul(self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return self.pow(k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.monomials == other.monomials

    __hash__ = None

    def __repr__(self) -> str:
        return f"BiPoly({render_text(self)})"

    # serialization

    def to_json_dict(self, n: int | None = None) -> dict:
        data = {
            "monomials": [
                [i, j, str(self.monomials[(i, j)])]
                for i, j in sorted(self.monomials, key=_term_sort_key)
            ]
        }
        if n is not None:
            data["n"] = n
        return data

    @classmethod
    def from_json_dict(cls, data: dict) -> "BiPoly":
        return cls({(int(i), int(j)): int(c) for i, j, c in data["monomials"]})


# -- parity split and the doubling recursion ---------------------------------------


def parity_split(P: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Even/odd decomposition in x: Q(x,y) = (P(x,y)+P(-x,y))/2 collects the
    even x-degrees, R = P - Q the odd ones. Exact by construction."""
    q: dict[tuple[int, int], int] = {}
    r: dict[tuple[int, int], int] = {}
    for key, c in P.monomials.items():
        (q if key[0] % 2 == 0 else r)[key] = c
    return BiPoly(q), BiPoly(r)


class HalfExpPoly:
    """Laurent grid on the doubled x lattice: keys (i2, j) represent
    x^(i2/2) * y^j with i2 any integer. Lives only inside recursion_step;
    conversion back to BiPoly asserts every i2 is even and nonnegative."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: dict[tuple[int, int], int]):
        self.monomials = {k: c for k, c in monomials.items() if c}

    def mul(self, other: "HalfExpPoly") -> "HalfExpPoly":
        return HalfExpPoly(_mul_grid(self.monomials, other.monomials))

    def sub(self, other: "HalfExpPoly") -> "HalfExpPoly":
        out = dict(self.monomials)
        for k, c in other.monomials.items():
            v = out.get(k, 0) - c
            if v:
                out[k] = v
            else:
                del out[k]
        return HalfExpPoly(out)

    def shift_x2(self, delta_i2: int) -> "HalfExpPoly":
        return HalfExpPoly({(i2 + delta_i2, j): c for (i2, j), c in self.monomials.items()})

    def to_bipoly(self) -> BiPoly:
        out = {}
        for (i2, j), c in self.monomials.items():
            if i2 < 0 or i2 % 2:
                raise ArithmeticError(
                    f"non-polynomial exponent x^({i2}/2) survived the recursion; "
                    "this indicates an implementation bug"
                )
            out[(i2 // 2, j)] = c
        return BiPoly(out)


def _substitute_half(poly_aj: dict[tuple[int, int], int]) -> HalfExpPoly:
    """Map sum c * u^a * Y^j to the half-exponent grid with u = x + 4/x and
    Y = y * x^(-1/2), by a per-j Horner pass in u (a linear sweep, since
    multiplying by u only shifts the lattice by +-2 and scales by 4)."""
    by_j: dict[int, dict[int, int]] = {}
    for (a, j), c in poly_aj.items():
        by_j.setdefault(j, {})[a] = c
    out: dict[tuple[int, int], int] = {}
    for j, adict in by_j.items():
        acc: dict[int, int] = {}
        for a in range(max(adict), -1, -1):
            new: dict[int, int] = {}
            for i2, v in acc.items():
                new[i2 + 2] = new.get(i2 + 2, 0) + v
                new[i2 - 2] = new.get(i2 - 2, 0) + 4 * v
            c = adict.get(a)
            if c:
                new[0] = new.get(0, 0) + c
            acc = {k: v for k, v in new.items() if v}
        for i2, v in acc.items():
            out[(i2 - j, j)] = v
    return HalfExpPoly(out)


def recursion_step(P_prev: BiPoly, n: int) -> BiPoly:
    """One doubling step: from the level-2^(n-1) polynomial to level 2^n.

    Writes the even part as q(x^2, y) and the odd part as x*r(x^2, y), so the
    substituted difference of squares becomes q(u,Y)^2 - u*r(u,Y)^2 with
    u = (x^2+4)/x, Y = y/sqrt(x), and multiplies by x^(2^(n-5)). The result
    must come out integral and polynomial; anything else raises.
    """
    if n < 7:
        raise ValueError("recursion starts at n = 7")
    Q, R = parity_split(P_prev)
    q = {(i // 2, j): c for (i, j), c in Q.monomials.items()}
    r = {((i - 1) // 2, j): c for (i, j), c in R.monomials.items()}
    qh = _substitute_half(q)
    rh = _substitute_half(r)
    u_half = HalfExpPoly({(2, 0): 1, (-2, 0): 4})
    diff = qh.mul(qh).sub(u_half.mul(rh.mul(rh)))
    return diff.shift_x2(1 << (n - 4)).to_bipoly()  # times x^(2^(n-5))


_P6 = BiPoly({(0, 4): 1, (3, 0): -1, (1, 0): -4})

_chain_cache: dict[int, BiPoly] = {6: _P6}


def p_poly(n: int, cap: int = DEFAULT_CAP) -> BiPoly:
    """Defining polynomial of the level-2^n tower member, built by iterating
    the doubling recursion from the quartic base case y^4 - x^3 - 4x.

    For even n this is a defining equation of X_0(2^n); for odd n the
    polynomial still satisfies the recursion but its second generator is not
    modular. Sizes grow geometrically: n above ``cap`` raises
    ResourceCapError instead of grinding.
    """
    if n < 6:
        raise ValueError("tower starts at n = 6")
    if n > cap:
        raise ResourceCapError(
            f"p_poly({n}) exceeds the configured cap {cap}; raise it explicitly"
        )
    top = max(_chain_cache)
    while top < n:
        top += 1
        P = recursion_step(_chain_cache[top - 1], top)
        assert P.degree_y() == 1 << (top - 4) and P.is_monic_in_y()
        _chain_cache[top] = P
    return _chain_cache[n]


# -- evaluation at series -------------------------------------------------------


def _check_deadline(deadline) -> None:
    if deadline is not None:
        import time

        if time.monotonic() > deadline:
            raise ResourceCapError("evaluation exceeded its time budget")


def _eval_x_poly(coeffs: dict[int, int], xs: QExp, xpow_cache: dict, deadline) -> QExp:
    """Horner evaluation of sum c_i * xs^i over the distinct x-exponents."""

    def xpow(k: int) -> QExp:
        if k not in xpow_cache:
            xpow_cache[k] = xs.pow(k)
        return xpow_cache[k]

    acc = None
    prev = None
    for i in sorted(coeffs, reverse=True):
        _check_deadline(deadline)
        term = QExp.constant(coeffs[i])
        if acc is None:
            acc = term
        else:
            acc = acc.mul(xpow(prev - i)).add(term)
        prev = i
    if acc is None:
        return QExp.zero()
    if prev:
        acc = acc.mul(xpow(prev))
    return acc


def evaluate_at_series(P: BiPoly, xs: QExp, ys: QExp, deadline: float | None = None) -> QExp:
    """Exact evaluation of P at two q-series, Horner-style in y with inner
    Horner passes in x. Truncation windows propagate through the arithmetic,
    so the result's certified window is exactly what the inputs support;
    a shortfall surfaces as a PrecisionError at query time, never as a
    silently truncated answer.
    """
    groups = P.y_groups()
    ypow_cache: dict[int, QExp] = {}
    xpow_cache: dict[int, QExp] = {}

    def ypow(k: int) -> QExp:
        if k not in ypow_cache:
            ypow_cache[k] = ys.pow(k)
        return ypow_cache[k]

    acc = None
    prev = None
    for j in sorted(groups, reverse=True):
        _check_deadline(deadline)
        cj = _eval_x_poly(groups[j], xs, xpow_cache, deadline)
        if acc is None:
            acc = cj
        else:
            acc = acc.mul(ypow(prev - j)).add(cj)
        prev = j
    if acc is None:
        return QExp.zero()
    if prev:
        acc = acc.mul(ypow(prev))
    return acc


# -- structural report ------------------------------------------------------------


@dataclass(frozen=True)
class StructureReport:
    """Shape data for a tower polynomial: degrees, monicity, and the exponent
    residue patterns the doubling recursion is expected to preserve."""

    deg_x: int
    deg_y: int
    monic_in_y: bool
    y_exponents_mod4: tuple[int, ...]
    y_exponents_mod8: tuple[int, ...]
    x_parities: tuple[int, ...]
    term_count: int

    def to_json_dict(self) -> dict:
        return {
            "deg_x": self.deg_x,
            "deg_y": self.deg_y,
            "monic_in_y": self.monic_in_y,
            "y_exponents_mod4": list(self.y_exponents_mod4),
            "y_exponents_mod8": list(self.y_exponents_mod8),
            "x_parities": list(self.x_parities),
            "term_count": self.term_count,
        }


def structure_report(P: BiPoly) -> StructureReport:
    ys = {j for _, j in P.monomials}
    xs = {i for i, _ in P.monomials}
    return StructureReport(
        deg_x=P.degree_x(),
        deg_y=P.degree_y(),
        monic_in_y=P.is_monic_in_y(),
        y_exponents_mod4=tuple(sorted({j % 4 for j in ys})),
        y_exponents_mod8=tuple(sorted({j % 8 for j in ys})),
        x_parities=tuple(sorted({i % 2 for i in xs})),
        term_count=len(P.monomials),
    )


# -- division ---------------------------------------------------------------------


def divmod_y(A: BiPoly, D: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Division with remainder in y over Z[x]; D must be monic in y."""
    if not D.is_monic_in_y():
        raise ValueError("divisor must be monic in y")
    dd = D.degree_y()
    quot = BiPoly()
    rem = A
    while not rem.is_zero() and rem.degree_y() >= dd:
        jr = rem.degree_y()
        lead = BiPoly({(i, jr - dd): c for (i, j), c in rem.monomials.items() if j == jr})
        quot = quot.add(lead)
        rem = rem.sub(lead.mul(D))
    return quot, rem


# -- rendering ---------------------------------------------------------------------


def _monomial_text(i: int, j: int) -> str:
    parts = []
    if i == 1:
        parts.append("x")
    elif i > 1:
        parts.append(f"x^{i}")
    if j == 1:
        parts.append("y")
    elif j > 1:
        parts.append(f"y^{j}")
    return "*".join(parts)


def render_text(P: BiPoly) -> str:
    """Plain expanded form, e.g. ``y^4 - x^3 - 4*x``."""
    if P.is_zero():
        return "0"
    pieces = []
    for key in sorted(P.monomials, key=_term_sort_key):
        c = P.monomials[key]
        mono = _monomial_text(*key)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(pieces)


_UV_U = (BiPoly.x() - 2) ** 8
_UV_V = BiPoly.x() * (BiPoly.x() + 2) ** 4 * (BiPoly.x() ** 2 + 4)


def uv_decompose(cj: BiPoly, D: int) -> dict[int, int] | None:
    """Write an x-polynomial as a homogeneous degree-D form in
    u = (x-2)^8 and v = x(x+2)^4(x^2+4), if possible.

    The x-degrees 8a + 7(D-a) of the candidate monomials u^a v^(D-a) are
    pairwise distinct and both u and v are monic, so the decomposition is
    unique and found by peeling leading terms. Returns {a: coefficient} or
    None when cj is not such a form.
    """
    res: dict[int, int] = {}
    work = cj
    while not work.is_zero():
        d = work.degree_x()
        a = d - 7 * D
        if not 0 <= a <= D or a in res:
            return None
        m = work.coefficient(d, 0)
        if work.degree_y() != 0:
            return None
        res[a] = m
        work = work.sub(_UV_U.pow(a).mul(_UV_V.pow(D - a)) * m)
        if not work.is_zero() and work.degree_x() >= d:
            return None
    return res


def _poly_latex_x(coeffs: dict[int, int]) -> str:
    pieces = []
    for i in sorted(coeffs, reverse=True):
        c = coeffs[i]
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            xs = "x" if i == 1 else f"x^{{{i}}}"
            body = xs if mag == 1 else f"{mag}{xs}"
        if not pieces:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f"+{body}" if c > 0 else f"-{body}")
    return "".join(pieces) or "0"


def _uv_group_latex(dec: dict[int, int], D: int) -> str:
    """Render a homogeneous u,v form, factoring out common content the way
    the grouped displays do."""

    def uv_mono(a: int, b: int) -> str:
        s = ""
        if a == 1:
            s += "u"
        elif a > 1:
            s += f"u^{{{a}}}"
        if b == 1:
            s += "v"
        elif b > 1:
            s += f"v^{{{b}}}"
        return s

    if len(dec) == 1:
        (a, m), = dec.items()
        mono = uv_mono(a, D - a)
        mag = abs(m)
        body = mono if mag == 1 and mono else f"{mag}{mono}" if mono else str(mag)
        return body if m > 0 else f"-{body}"
    a_min = min(dec)
    b_min = min(D - a for a in dec)
    g = 0
    for m in dec.values():
        g = gcd(g, m)
    top = dec[max(dec)]
    if top < 0:
        g = -g
    inner = []
    for a in sorted(dec, reverse=True):
        m = dec[a] // g
        mono = uv_mono(a - a_min, D - a - b_min)
        mag = abs(m)
        body = mono if mag == 1 and mono else f"{mag}{mono}" if mono else str(mag)
        if not inner:
            inner.append(body if m > 0 else f"-{body}")
        else:
            inner.append(f"+{body}" if m > 0 else f"-{body}")
    outer = uv_mono(a_min, b_min)
    mag = abs(g)
    prefix = outer if mag == 1 else f"{mag}{outer}"
    return ("" if g > 0 else "-") + f"{prefix}\\left({''.join(inner)}\\right)"


def render_latex(P: BiPoly, uv: bool = False) -> str:
    """Grouped-by-y LaTeX, optionally abbreviating the x-coefficients as
    homogeneous forms in u = (x-2)^8, v = x(x+2)^4(x^2+4) when every group
    admits that shape (falls back to the expanded form when one does not).
    """
    groups = P.y_groups()
    deg_y = P.degree_y()
    use_uv = uv and deg_y > 0 and deg_y % 8 == 0
    decs: dict[int, dict[int, int]] = {}
    if use_uv:
        for j, cj in groups.items():
            if j % 8:
                use_uv = False
                break
            dec = uv_decompose(BiPoly({(i, 0): c for i, c in cj.items()}), (deg_y - j) // 8)
            if dec is None:
                use_uv = False
                break
            decs[j] = dec
    pieces = []
    for j in sorted(groups, reverse=True):
        if use_uv:
            body = _uv_group_latex(decs[j], (deg_y - j) // 8)
        else:
            body = _poly_latex_x(groups[j])
        if j == 0:
            term = body  # free-standing additive tail, signs are already inline
        else:
            ys = "y" if j == 1 else f"y^{{{j}}}"
            if body == "1":
                term = ys
            elif body == "-1":
                term = f"-{ys}"
            else:
                stripped = body[1:] if body.startswith("-") else body
                multi = ("+" in stripped or "-" in stripped) and "\\left(" not in body
                term = f"\\left({body}\\right){ys}" if multi else f"{body}{ys}"
        pieces.append(term)
    out = pieces[0]
    for term in pieces[1:]:
        out += term if term.startswith("-") else f"+{term}"
    return out + "=0"
