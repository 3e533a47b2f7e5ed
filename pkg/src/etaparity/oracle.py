"""Exact-integer ground truth at small scale.

Everything here uses Python integers, so nothing wraps.  The partition
counters are the usual add-one-part-size-at-a-time dynamic programs and
share no code with the GF(2) path.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf2series as gs
from .etaq import parse_eta

__all__ = [
    "ORACLE_CAP",
    "DOUBLE_DEFINITION_CAP",
    "OracleCapExceeded",
    "IntSeries",
    "count_a_no3mod6",
    "count_a_oddmult",
    "count_regular",
    "euler_exact",
    "eval_eta_exact",
]

ORACLE_CAP = 5000
DOUBLE_DEFINITION_CAP = 500


class OracleCapExceeded(ValueError):
    pass


def _check_cap(N):
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    if N > ORACLE_CAP:
        raise OracleCapExceeded(f"N={N} exceeds the exact oracle cap {ORACLE_CAP}")


@dataclass(frozen=True)
class IntSeries:
    trunc: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.trunc:
            raise ValueError("coefficient count does not match truncation")

    def __getitem__(self, n):
        if not 0 <= n < self.trunc:
            raise IndexError(f"coefficient {n} outside truncation {self.trunc}")
        return self.coeffs[n]

    def __len__(self):
        return self.trunc

    def __mul__(self, other):
        if self.trunc != other.trunc:
            raise gs.TruncationMismatch(f"truncations differ: {self.trunc} != {other.trunc}")
        N = self.trunc
        a, b = self.coeffs, other.coeffs
        out = [0] * N
        for i, ai in enumerate(a):
            if ai:
                for j in range(N - i):
                    out[i + j] += ai * b[j]
        return IntSeries(N, tuple(out))

    def inverse(self):
        """Power-series inverse via b_n = -sum_{k=1..n} a_k b_{n-k} (needs a_0 = 1)."""
        a = self.coeffs
        if a[0] != 1:
            raise gs.NotInvertible("exact inversion needs constant term 1")
        N = self.trunc
        nz = [(k, ak) for k, ak in enumerate(a) if k and ak]
        b = [0] * N
        b[0] = 1
        for n in range(1, N):
            s = 0
            for k, ak in nz:
                if k > n:
                    break
                s += ak * b[n - k]
            b[n] = -s
        return IntSeries(N, tuple(b))

    def mod2(self):
        return gs.from_bits([c & 1 for c in self.coeffs])


def _count(N, parts):
    """Partitions counted by (part, max multiplicity or None) pairs."""
    c = [0] * N
    c[0] = 1
    for p, cap in parts:
        if p >= N:
            continue
        if cap is None:
            for k in range(p, N):
                c[k] += c[k - p]
        else:
            # bounded multiplicity: descending so each update sees old values
            for k in range(N - 1, p - 1, -1):
                s = 0
                for j in range(1, cap + 1):
                    if k - j * p < 0:
                        break
                    s += c[k - j * p]
                c[k] += s
    return IntSeries(N, tuple(c))


def count_a_no3mod6(N):
    """Partitions of n with no part congruent to 3 mod 6, for n < N."""
    _check_cap(N)
    return _count(N, [(p, None) for p in range(1, N) if p % 6 != 3])


def count_a_oddmult(N):
    """Partitions of n in which every odd part occurs at most twice."""
    _check_cap(N)
    return _count(N, [(p, 2 if p % 2 else None) for p in range(1, N)])


def count_regular(b, N):
    """b-regular partitions: no part divisible by b."""
    if b < 2:
        raise ValueError(f"regularity modulus must be >= 2, got {b}")
    _check_cap(N)
    return _count(N, [(p, None) for p in range(1, N) if p % b])


def euler_exact(t, N):
    _check_cap(N)
    c = [0] * N
    c[0] = 1
    for k in range(t, N, t):
        for n in range(N - 1, k - 1, -1):
            c[n] -= c[n - k]
    return IntSeries(N, tuple(c))


def eval_eta_exact(expr, N):
    """Integer q-expansion of an eta-quotient.

    Positive powers are multiplied out; the denominator is inverted once with
    the integer recurrence, which needs no fractions since every ``f_t``
    starts with 1.
    """
    expr = parse_eta(expr)
    _check_cap(N)
    unit = IntSeries(N, (1,) + (0,) * (N - 1))
    num = unit
    den = unit
    for t, e in expr.factors:
        f = euler_exact(t, N)
        for _ in range(abs(e)):
            if e > 0:
                num = num * f
            else:
                den = den * f
    if den == unit:
        return num
    return num * den.inverse()
