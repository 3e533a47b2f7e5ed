"""Truncated formal power series over GF(2).

A :class:`BitSeries` holds the first ``trunc`` coefficients of a series in
``GF(2)[[q]]``, packed little-endian into 64-bit words: bit ``i`` of the
stream is the coefficient of ``q**i``.  Values are immutable.

Multiplication is carryless convolution.  Three kernels are available:

``schoolbook``
    4-bit windowed shift-and-xor, used for operands up to
    :data:`KARATSUBA_THRESHOLD` bits.
``karatsuba``
    recursive three-multiplication split over the schoolbook base case.
``kronecker``
    spreads each bit into a byte-aligned slot wide enough to hold any
    convolution count, multiplies the resulting integers with GMP, and keeps
    the low bit of every slot.

``auto`` (the default) uses Karatsuba below :data:`KRONECKER_THRESHOLD` bits
and Kronecker above.  All kernels are bit-identical; the test suite checks
that.
"""

from __future__ import annotations

import numpy as np
import gmpy2

__all__ = [
    "BitSeries",
    "TruncationMismatch",
    "NotInvertible",
    "one",
    "zero",
    "monomial",
    "from_exponents",
    "from_bits",
    "from_int",
    "add",
    "mul",
    "square",
    "inv",
    "pow",
    "subst",
    "coeff",
    "truncate",
    "shift",
    "KARATSUBA_THRESHOLD",
    "KRONECKER_THRESHOLD",
    "KERNELS",
]

KARATSUBA_THRESHOLD = 4096
KRONECKER_THRESHOLD = 1 << 16
KERNELS = ("auto", "schoolbook", "karatsuba", "kronecker")

WORD = 64


class TruncationMismatch(ValueError):
    """Two series with different truncation were combined."""


class NotInvertible(ArithmeticError):
    """The series has constant term 0."""


def _nwords(n):
    return (n + WORD - 1) // WORD


def _mask(n):
    return (1 << n) - 1


class BitSeries:
    """Series known modulo ``q**trunc`` with coefficients in GF(2)."""

    __slots__ = ("trunc", "_words", "_int")

    def __init__(self, trunc, words):
        if trunc < 1:
            raise ValueError(f"truncation must be positive, got {trunc}")
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (_nwords(trunc),):
            raise ValueError("word array does not match truncation")
        tail = trunc % WORD
        if tail and int(words[-1]) >> tail:
            raise ValueError("bits set beyond truncation")
        words = words.copy()
        words.flags.writeable = False
        self.trunc = trunc
        self._words = words
        self._int = None

    @classmethod
    def _from_int(cls, trunc, value):
        value &= _mask(trunc)
        raw = value.to_bytes(_nwords(trunc) * 8, "little")
        obj = cls(trunc, np.frombuffer(raw, dtype="<u8"))
        obj._int = value
        return obj

    def to_int(self):
        """The coefficient stream as a nonnegative integer (bit i = coeff i)."""
        if self._int is None:
            self._int = int.from_bytes(self._words.astype("<u8").tobytes(), "little")
        return self._int

    @property
    def words(self):
        return self._words

    def bits(self):
        """Unpacked coefficients as a read-only ``uint8`` array of length trunc."""
        raw = self._words.astype("<u8").view(np.uint8)
        out = np.unpackbits(raw, bitorder="little")[: self.trunc]
        out.flags.writeable = False
        return out

    def support(self):
        """Sorted exponents with coefficient 1."""
        return np.flatnonzero(self.bits())

    def popcount(self):
        return int(np.bitwise_count(self._words).sum())

    def is_unit(self):
        return bool(int(self._words[0]) & 1)

    def __len__(self):
        return self.trunc

    def __getitem__(self, n):
        return coeff(self, n)

    def __eq__(self, other):
        if not isinstance(other, BitSeries):
            return NotImplemented
        return self.trunc == other.trunc and np.array_equal(self._words, other._words)

    def __hash__(self):
        return hash((self.trunc, self._words.tobytes()))

    def __add__(self, other):
        return add(self, other)

    __sub__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    def __pow__(self, e):
        return pow(self, e)

    def __repr__(self):
        shown = self.support()[:12].tolist()
        more = ", ..." if self.popcount() > 12 else ""
        return f"BitSeries(trunc={self.trunc}, support=[{', '.join(map(str, shown))}{more}])"


# -- constructors ------------------------------------------------------------

def zero(N):
    return BitSeries._from_int(N, 0)


def one(N):
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    return BitSeries._from_int(N, 1)


def monomial(k, N):
    """``q**k`` truncated at N (zero when k >= N)."""
    if k < 0:
        raise ValueError("negative exponent")
    return BitSeries._from_int(N, (1 << k) if k < N else 0)


def from_exponents(exponents, N):
    """Series whose support is the given exponents (each taken mod 2)."""
    bits = np.zeros(N, dtype=np.uint8)
    for e in exponents:
        if 0 <= e < N:
            bits[e] ^= 1
    return from_bits(bits)


def from_int(N, value):
    """Series whose bit i is bit i of ``value`` (bits at or above N dropped)."""
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    return BitSeries._from_int(N, value)


def from_bits(bits):
    bits = np.asarray(bits, dtype=np.uint8) & 1
    N = len(bits)
    packed = np.packbits(bits, bitorder="little")
    packed = np.pad(packed, (0, _nwords(N) * 8 - len(packed)))
    return BitSeries(N, packed.view("<u8"))


def _check(a, b):
    if a.trunc != b.trunc:
        raise TruncationMismatch(f"truncations differ: {a.trunc} != {b.trunc}")


# -- ring operations ---------------------------------------------------------

def add(a, b):
    _check(a, b)
    return BitSeries(a.trunc, a._words ^ b._words)


def _base_mul(a, b):
    if a.bit_length() < b.bit_length():
        a, b = b, a
    table = [0] * 16
    for x in range(1, 16):
        low = x & -x
        table[x] = table[x ^ low] ^ (a << (low.bit_length() - 1))
    r = 0
    i = 0
    while b:
        r ^= table[b & 15] << i
        b >>= 4
        i += 4
    return r


def _karatsuba(a, b, n):
    # n bounds the bit length of both operands
    if n <= KARATSUBA_THRESHOLD or not a or not b:
        return _base_mul(a, b)
    h = n // 2
    m = _mask(h)
    a0, a1 = a & m, a >> h
    b0, b1 = b & m, b >> h
    z0 = _karatsuba(a0, b0, h)
    z2 = _karatsuba(a1, b1, n - h)
    z1 = _karatsuba(a0 ^ a1, b0 ^ b1, n - h) ^ z0 ^ z2
    return z0 ^ (z1 << h) ^ (z2 << (2 * h))


def _slot_bytes(n):
    # a convolution count is at most n, it must not spill into the next slot
    return max(1, (n.bit_length() + 7) // 8)


def _spread_slots(value, n, width):
    raw = value.to_bytes((n + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]
    buf = np.zeros((n, width), dtype=np.uint8)
    buf[:, 0] = bits
    return gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))


def _kronecker(a, b, n):
    width = _slot_bytes(n)
    prod = _spread_slots(a, n, width) * _spread_slots(b, n, width)
    raw = int(prod).to_bytes(2 * n * width, "little")
    low = np.frombuffer(raw, dtype=np.uint8)[::width][:n] & 1
    packed = np.packbits(low, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _mul_int(a, b, n, kernel="auto"):
    """Low n bits of the carryless product of two n-bit integers."""
    if kernel == "auto":
        kernel = "kronecker" if n > KRONECKER_THRESHOLD else "karatsuba"
    if kernel == "schoolbook":
        r = _base_mul(a, b)
    elif kernel == "karatsuba":
        r = _karatsuba(a, b, n)
    elif kernel == "kronecker":
        r = _kronecker(a, b, n)
    else:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    return r & _mask(n)


def mul(a, b, kernel="auto"):
    _check(a, b)
    N = a.trunc
    return BitSeries._from_int(N, _mul_int(a.to_int(), b.to_int(), N, kernel))


_SPREAD_TABLE = np.array(
    [sum(((x >> k) & 1) << (2 * k) for k in range(8)) for x in range(256)],
    dtype="<u2",
)


def _spread_int(value, nbits):
    """Map bit i to bit 2i."""
    raw = np.frombuffer(value.to_bytes((nbits + 7) // 8 or 1, "little"), dtype=np.uint8)
    return int.from_bytes(_SPREAD_TABLE[raw].tobytes(), "little")


def square(a):
    """Frobenius squaring: bit i moves to bit 2i."""
    N = a.trunc
    half = (N + 1) // 2
    low = a.to_int() & _mask(half)
    return BitSeries._from_int(N, _spread_int(low, half))


def inv(a, kernel="auto"):
    """Multiplicative inverse by Newton iteration with doubling precision."""
    if not a.is_unit():
        raise NotInvertible("constant term is 0; series is not a unit")
    N = a.trunc
    av = a.to_int()
    x = 1
    p = 1
    while p < N:
        p2 = min(2 * p, N)
        # e = a*x - 1 vanishes below q**p
        e = _mul_int(av & _mask(p2), x, p2, kernel) ^ 1
        e >>= p
        corr = _mul_int(e, x & _mask(p2 - p), p2 - p, kernel)
        x ^= corr << p
        p = p2
    return BitSeries._from_int(N, x)


def pow(a, e, kernel="auto"):
    """``a**e`` for any integer e; negative powers invert first."""
    if e < 0:
        return pow(inv(a, kernel), -e, kernel)
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else mul(result, base, kernel)
        e >>= 1
        if e:
            base = square(base)
    return one(a.trunc) if result is None else result


def subst(a, t):
    """Substitute ``q -> q**t`` keeping truncation."""
    if t < 1:
        raise ValueError(f"substitution power must be >= 1, got {t}")
    if t == 1:
        return a
    N = a.trunc
    src = a.support()
    dst = src * t
    bits = np.zeros(N, dtype=np.uint8)
    bits[dst[dst < N]] = 1
    return from_bits(bits)


def coeff(a, n):
    if not 0 <= n < a.trunc:
        raise IndexError(f"coefficient {n} outside truncation {a.trunc}")
    return (int(a._words[n // WORD]) >> (n % WORD)) & 1


def truncate(a, N):
    """Restrict to a smaller truncation ``N <= a.trunc``."""
    if not 1 <= N <= a.trunc:
        raise ValueError(f"cannot truncate series of length {a.trunc} to {N}")
    return BitSeries._from_int(N, a.to_int())


def shift(a, k=1):
    """Multiply by ``q**k``; the top k bits drop off."""
    if k < 0:
        raise ValueError("negative shift")
    return BitSeries._from_int(a.trunc, a.to_int() << k)
