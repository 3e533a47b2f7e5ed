"""Euler products, theta-type supports and eta-quotient expressions mod 2.

``f_t`` denotes the Euler product ``prod_{i>=1} (1 - q**(t*i))``.  An
eta-quotient is a finite product of such factors with integer exponents,
written in a small ASCII grammar::

    expr   := term ('/' term)?
    term   := factor ('*' factor)*
    factor := 'f' INT ('^' SIGNED_INT)? | '(' term ')' | '1'

so ``"f3/(f1*f6)"``, ``"f8/f12"`` and ``"f1^12"`` are all valid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2series as gs
from .gf2series import BitSeries

__all__ = [
    "EtaExpr",
    "EtaSyntaxError",
    "SparseSupport",
    "SPARSE_KINDS",
    "DIRECT_LIMIT",
    "euler",
    "sparse",
    "residues_mod4",
    "parse_eta",
    "eval_eta",
]

# above this many coefficients f_1 comes from the pentagonal support instead
# of the quadratic direct product
DIRECT_LIMIT = 1 << 17

SPARSE_KINDS = ("pentagonal", "triangular", "n3nm2", "shifted_square")


# -- Euler products ----------------------------------------------------------

@lru_cache(maxsize=32)
def _direct_product(t, N):
    r = 1
    mask = (1 << N) - 1
    for k in range(t, N, t):
        r ^= (r << k) & mask
    return BitSeries._from_int(N, r)


def euler(t, N, method="auto"):
    """``f_t`` modulo 2, truncated at N.

    ``method`` picks the construction:

    * ``"product"``: multiply out every factor ``1 + q**(t*i)`` at truncation N;
    * ``"subst"``: direct product for ``f_1`` at ``ceil(N/t)`` terms, then ``q -> q**t``;
    * ``"pentagonal"``: ``f_1`` from generalized pentagonal exponents, then ``q -> q**t``;
    * ``"auto"``: ``"subst"`` while ``ceil(N/t) <= DIRECT_LIMIT``, otherwise ``"pentagonal"``.
    """
    if t < 1:
        raise ValueError(f"f_t needs t >= 1, got {t}")
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    base = -(-N // t)
    if method == "auto":
        method = "subst" if base <= DIRECT_LIMIT else "pentagonal"
    if method == "product":
        return _direct_product(t, N)
    if method == "subst":
        f1 = _direct_product(1, base)
    elif method == "pentagonal":
        f1 = sparse("pentagonal", base).to_series()
    else:
        raise ValueError(f"unknown method {method!r}")
    return _stretch(f1, t, N)


def _stretch(a, t, N):
    bits = np.zeros(N, dtype=np.uint8)
    pos = a.support() * t
    bits[pos[pos < N]] = 1
    return gs.from_bits(bits)


# -- sparse supports ---------------------------------------------------------

@dataclass(frozen=True)
class SparseSupport:
    """Exponents of a 0/1 theta-type series below ``bound``."""

    kind: str
    bound: int
    exponents: tuple

    def to_series(self, N=None):
        return gs.from_exponents(self.exponents, self.bound if N is None else N)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)


_EXPONENT = {
    "pentagonal": lambda n: n * (3 * n - 1) // 2,
    "triangular": lambda n: n * (n + 1) // 2,
    "n3nm2": lambda n: n * (3 * n - 2),
    "shifted_square": lambda n: (3 * n - 1) ** 2,
}


def sparse(kind, N):
    """Enumerate the exponent set of ``kind`` below N.

    Integers n are walked outward in both signs (only n >= 0 for triangular)
    until every exponent exceeds N; each exponent function is a convex
    quadratic so this terminates after O(sqrt(N)) steps.
    """
    if kind not in _EXPONENT:
        raise ValueError(f"unknown sparse kind {kind!r}; expected one of {SPARSE_KINDS}")
    if N < 1:
        raise ValueError(f"bound must be positive, got {N}")
    fn = _EXPONENT[kind]
    signs = (1,) if kind == "triangular" else (1, -1)
    found = set()
    for sign in signs:
        n = 0
        while True:
            e = fn(sign * n)
            # exponents are increasing in |n| once past the vertex
            if e >= N and n > 1:
                break
            if 0 <= e < N:
                found.add(e)
            n += 1
    return SparseSupport(kind, N, tuple(sorted(found)))


def residues_mod4(s):
    return {e % 4 for e in s.exponents}


# -- eta-quotient expressions --------------------------------------------------

class EtaSyntaxError(ValueError):
    def __init__(self, msg, offset):
        super().__init__(f"{msg} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class EtaExpr:
    """``prod f_t**e`` as sorted ``(t, e)`` pairs, distinct t, nonzero e."""

    factors: tuple = ()

    @classmethod
    def of(cls, pairs):
        merged = {}
        for t, e in pairs:
            if t < 1:
                raise ValueError(f"f_t needs t >= 1, got {t}")
            merged[t] = merged.get(t, 0) + e
        return cls(tuple(sorted((t, e) for t, e in merged.items() if e)))

    def __mul__(self, other):
        return EtaExpr.of(self.factors + other.factors)

    def __truediv__(self, other):
        return self * other.inverse()

    def inverse(self):
        return EtaExpr(tuple((t, -e) for t, e in self.factors))

    def is_one(self):
        return not self.factors

    def __str__(self):
        if not self.factors:
            return "1"

        def fmt(t, e):
            return f"f{t}" if e == 1 else f"f{t}^{e}"

        num = [fmt(t, e) for t, e in self.factors if e > 0]
        den = [fmt(t, -e) for t, e in self.factors if e < 0]
        if not num:
            return "*".join(fmt(t, e) for t, e in self.factors)
        top = "*".join(num)
        if not den:
            return top
        bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        return f"{top}/{bottom}"


_TOKEN = re.compile(r"\s*(?:(f)|(\d+)|(\^)|(\*)|(/)|(\()|(\))|(-|\+))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise EtaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastindex
        start = m.start(kind)
        value = m.group(kind)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append((0, "", len(text)))
    return tokens


class _Parser:
    F, INT, CARET, STAR, SLASH, LPAR, RPAR, SIGN = range(1, 9)

    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind, what):
        tok = self.toks[self.i]
        if tok[0] != kind:
            found = repr(tok[1]) if tok[0] else "end of input"
            raise EtaSyntaxError(f"expected {what}, found {found}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        if self.peek()[0] == 0:
            raise EtaSyntaxError("empty expression", 0)
        pairs = self.term()
        if self.peek()[0] == self.SLASH:
            self.i += 1
            pairs += [(t, -e) for t, e in self.term()]
        self.take(0, "end of input")
        return pairs

    def term(self):
        pairs = self.factor()
        while self.peek()[0] == self.STAR:
            self.i += 1
            pairs += self.factor()
        return pairs

    def factor(self):
        tok = self.peek()
        if tok[0] == self.LPAR:
            self.i += 1
            pairs = self.term()
            self.take(self.RPAR, "')'")
            return pairs
        if tok[0] == self.INT and tok[1] == "1":
            # the unit, so that "1/(f1*f3)" reads naturally
            self.i += 1
            return []
        self.take(self.F, "'f' or '('")
        _, digits, off = self.take(self.INT, "integer after 'f'")
        t = int(digits)
        if t == 0:
            raise EtaSyntaxError("f0 is not an Euler product", off)
        e = 1
        if self.peek()[0] == self.CARET:
            self.i += 1
            sign = 1
            if self.peek()[0] == self.SIGN:
                sign = -1 if self.peek()[1] == "-" else 1
                self.i += 1
            e = sign * int(self.take(self.INT, "exponent")[1])
        return [(t, e)]


def parse_eta(text):
    """Parse an eta-quotient; duplicate factors merge and zero exponents drop."""
    if isinstance(text, EtaExpr):
        return text
    return EtaExpr.of(_Parser(text).expr())


def eval_eta(expr, N, method="auto"):
    """Evaluate an eta-quotient modulo 2 at truncation N.

    The numerator and the denominator are each multiplied out, and the
    denominator is inverted once.
    """
    expr = parse_eta(expr)
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    num = gs.one(N)
    den = gs.one(N)
    for t, e in expr.factors:
        part = gs.pow(euler(t, N, method), abs(e))
        if e > 0:
            num = gs.mul(num, part)
        else:
            den = gs.mul(den, part)
    if den == gs.one(N):
        return num
    return gs.mul(num, gs.inv(den))

