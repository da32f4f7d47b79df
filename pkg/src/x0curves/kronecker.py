"""Exact integer convolution via Kronecker substitution.

Dense integer coefficient vectors are packed into single big integers with a
fixed signed digit width, multiplied once, and the product digits read back.
This turns an O(n^2) coefficient convolution into one big-integer multiply,
which GMP (through gmpy2, when importable) performs in softly linear time.
Everything stays exact; no modular reduction, no floating point.
"""

from __future__ import annotations

try:
    from gmpy2 import mpz as _mpz

    def _bigmul(a: int, b: int) -> int:
        return int(_mpz(a) * _mpz(b))

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def _bigmul(a: int, b: int) -> int:
        return a * b


# Below this many coefficient products the packing overhead loses to the
# plain double loop.
SCHOOLBOOK_CUTOFF = 4096


def _schoolbook(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    if len(a) > len(b):
        a, b = b, a
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def _pack(coeffs: list[int], wbytes: int) -> int:
    """Encode coeffs as sum(c_i * 2**(8*wbytes*i)) with signed c_i."""
    pos = bytearray(len(coeffs) * wbytes)
    neg = bytearray(len(coeffs) * wbytes)
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * wbytes:(i + 1) * wbytes] = c.to_bytes(wbytes, "little")
        elif c < 0:
            neg[i * wbytes:(i + 1) * wbytes] = (-c).to_bytes(wbytes, "little")
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(packed: int, wbytes: int, nout: int) -> list[int]:
    """Recover nout signed digits; every digit must fit in wbytes signed."""
    half = 1 << (8 * wbytes - 1)
    # Adding half to every digit makes all of them nonnegative, turning the
    # signed-digit number into the ordinary base-2^(8w) representation.
    bias = int.from_bytes(half.to_bytes(wbytes, "little") * nout, "little")
    raw = (packed + bias).to_bytes(nout * wbytes, "little")
    return [
        int.from_bytes(raw[i * wbytes:(i + 1) * wbytes], "little") - half
        for i in range(nout)
    ]


def convolve(a: list[int], b: list[int]) -> list[int]:
    """Full convolution out[k] = sum_i a[i]*b[k-i], exactly.

    Chooses between the double loop and the packed big-integer product based
    on size. Inputs may contain zeros and arbitrarily large (signed) entries.
    """
    if not a or not b:
        return []
    if len(a) * len(b) <= SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b)
    amax = max(max(a), -min(a))
    bmax = max(max(b), -min(b))
    if amax == 0 or bmax == 0:
        return [0] * (len(a) + len(b) - 1)
    # Any product digit is bounded by amax*bmax*min(len(a), len(b)); two
    # guard bits keep it strictly inside the signed digit range.
    bits = (
        amax.bit_length()
        + bmax.bit_length()
        + min(len(a), len(b)).bit_length()
        + 2
    )
    wbytes = (bits + 7) // 8
    packed = _bigmul(_pack(a, wbytes), _pack(b, wbytes))
    return _unpack(packed, wbytes, len(a) + len(b) - 1)
