"""Large-N parity probes of the partition function a(n).

All scans read a single parity stream (the eta-quotient reduced mod 2) and
tally it over residue classes.  Tallies are split over worker threads by
disjoint index ranges and merged by integer addition, so results never
depend on the worker count.

Density and equidistribution numbers are descriptive only; nothing here
asserts the conjectured limits.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .etaq import eval_eta, parse_eta

A_EXPR = "f3/(f1*f6)"
REGULAR6_EXPR = "f6/f1"
COMPANION_EXPR = "f2/f3"
DEFAULT_TRUNC = 10**6
STRETCH_TRUNC = 10**7
MIN_CLASS_SAMPLES = 10
CHECKPOINTS = 10

__all__ = [
    "A_EXPR",
    "REGULAR6_EXPR",
    "COMPANION_EXPR",
    "DensityReport",
    "ClassTally",
    "APWitness",
    "EquidistributionReport",
    "TheoremReport",
    "LinkReport",
    "IdenticallyEvenClass",
    "default_workers",
    "parity_stream",
    "verify_theorem",
    "density",
    "ap_scan",
    "is_subsumed",
    "equidistribution",
    "check_remark1_link",
]


class IdenticallyEvenClass(ValueError):
    """Equidistribution was requested on a class with no odd coefficient."""


def default_workers():
    env = os.environ.get("ETAQ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@lru_cache(maxsize=16)
def _stream(expr, N):
    return eval_eta(expr, N)


def parity_stream(expr=A_EXPR, N=DEFAULT_TRUNC):
    """Coefficients of ``expr`` mod 2 below N, cached per (expr, N)."""
    if N < 1:
        raise ValueError(f"truncation must be positive, got {N}")
    return _stream(parse_eta(expr), N)


def _bits(expr, N):
    return parity_stream(expr, N).bits()


def _chunks(N, m, workers):
    """Split [0, N) into ranges whose starts are multiples of m."""
    workers = max(1, workers)
    step = max(m, -(-N // workers))
    step = -(-step // m) * m
    return [(lo, min(lo + step, N)) for lo in range(0, N, step)]


def _class_counts(bits, m, lo, hi):
    seg = bits[lo:hi].astype(np.int64)
    pad = (-len(seg)) % m
    odd = np.pad(seg, (0, pad)).reshape(-1, m).sum(axis=0)
    size = np.bincount(np.arange(lo, hi) % m, minlength=m)
    return odd, size


def _tally(bits, m, workers):
    N = len(bits)
    jobs = _chunks(N, m, workers)
    if len(jobs) == 1:
        parts = [_class_counts(bits, m, *jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _class_counts(bits, m, *j), jobs))
    odd = sum(p[0] for p in parts)
    size = sum(p[1] for p in parts)
    return [int(x) for x in odd], [int(x) for x in size]


# -- theorem -----------------------------------------------------------------

@dataclass
class TheoremReport:
    expr: str
    trunc: int
    passed: bool
    first_violation: int | None = None
    checked: int = 0


def verify_theorem(N=DEFAULT_TRUNC, expr=A_EXPR):
    """Every coefficient at n = 2, 3 mod 4 below N must be even."""
    if N < 4:
        raise ValueError("theorem scan needs N >= 4")
    bits = _bits(expr, N)
    idx = np.arange(N)
    bad = np.flatnonzero(bits.astype(bool) & (idx % 4 >= 2))
    checked = int(np.count_nonzero(idx % 4 >= 2))
    if len(bad):
        return TheoremReport(str(parse_eta(expr)), N, False, int(bad[0]), checked)
    return TheoremReport(str(parse_eta(expr)), N, True, None, checked)


# -- density -----------------------------------------------------------------

@dataclass
class ClassTally:
    residue: int
    class_size: int
    odd_count: int
    odd_fraction: float


@dataclass
class Checkpoint:
    n: int
    odd_count: int
    odd_fraction: float


@dataclass
class DensityReport:
    expr: str
    trunc: int
    modulus: int
    odd_total: int
    odd_fraction: float
    classes: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def density(expr=A_EXPR, N=DEFAULT_TRUNC, m=4, workers=None):
    """Odd counts per residue class mod m, plus a running overall fraction."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if N < m:
        raise ValueError("need N >= m")
    workers = workers or default_workers()
    bits = _bits(expr, N)
    odd, size = _tally(bits, m, workers)
    classes = [
        ClassTally(r, size[r], odd[r], odd[r] / size[r] if size[r] else 0.0)
        for r in range(m)
    ]
    cum = np.cumsum(bits, dtype=np.int64)
    marks = sorted({max(1, (k * N) // CHECKPOINTS) for k in range(1, CHECKPOINTS + 1)})
    checkpoints = [Checkpoint(n, int(cum[n - 1]), int(cum[n - 1]) / n) for n in marks]
    total = sum(odd)
    return DensityReport(str(parse_eta(expr)), N, m, total, total / N, classes, checkpoints)


# -- arithmetic progressions ---------------------------------------------------

def is_subsumed(m, r):
    """True iff every n = r (mod m) lies in the classes 2, 3 mod 4."""
    return m % 4 == 0 and r % 4 in (2, 3)


@dataclass
class APWitness:
    modulus: int
    residue: int
    status: str  # "odd-witness", "even-up-to-N" or "insufficient-data"
    witness: int | None
    subsumed: bool
    class_size: int

    def __post_init__(self):
        if self.witness is not None and self.witness % self.modulus != self.residue:
            raise ValueError("witness not in its residue class")


def _scan_modulus(odd_positions, N, m):
    res = odd_positions % m
    first = {}
    if len(res):
        values, idx = np.unique(res, return_index=True)
        first = {int(v): int(odd_positions[i]) for v, i in zip(values, idx)}
    out = []
    for r in range(m):
        size = len(range(r, N, m))
        if r in first:
            status, wit = "odd-witness", first[r]
        elif size < MIN_CLASS_SAMPLES:
            status, wit = "insufficient-data", None
        else:
            status, wit = "even-up-to-N", None
        out.append(APWitness(m, r, status, wit, is_subsumed(m, r), size))
    return out


def ap_scan(expr=A_EXPR, N=10**5, max_modulus=64, workers=None):
    """Smallest odd witness, or an even verdict, for every class r mod m, m <= M."""
    if max_modulus < 1:
        raise ValueError("max modulus must be >= 1")
    if N < MIN_CLASS_SAMPLES * max_modulus:
        raise ValueError(f"need N >= {MIN_CLASS_SAMPLES} * max_modulus")
    workers = workers or default_workers()
    odd_positions = parity_stream(expr, N).support()
    moduli = range(1, max_modulus + 1)
    if workers == 1:
        groups = [_scan_modulus(odd_positions, N, m) for m in moduli]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(lambda m: _scan_modulus(odd_positions, N, m), moduli))
    return [w for g in groups for w in g]


# -- equidistribution ---------------------------------------------------------

@dataclass
class EquidistributionReport:
    expr: str
    modulus: int
    residue: int
    trunc: int
    class_size: int
    odd_count: int
    odd_fraction: float
    max_deviation: float
    trace: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)


def equidistribution(expr=A_EXPR, m=1, r=0, N=DEFAULT_TRUNC, checkpoints=CHECKPOINTS):
    """Running odd fraction along n = r (mod m), and its distance from 1/2."""
    if m < 1 or not 0 <= r < m:
        raise ValueError("need 0 <= r < m")
    bits = _bits(expr, N)[r::m].astype(np.int64)
    s = len(bits)
    if s == 0:
        raise ValueError(f"class {r} mod {m} is empty below {N}")
    cum = np.cumsum(bits)
    k = int(cum[-1])
    if k == 0:
        raise IdenticallyEvenClass(f"{r} mod {m} is identically even below {N}")
    marks = sorted({max(1, (j * s) // checkpoints) for j in range(1, checkpoints + 1)})
    trace = []
    for t in marks:
        frac = int(cum[t - 1]) / t
        trace.append({"samples": t, "odd_count": int(cum[t - 1]), "odd_fraction": frac,
                      "deviation": abs(frac - 0.5)})
    return EquidistributionReport(
        str(parse_eta(expr)), m, r, N, s, k, k / s,
        max(p["deviation"] for p in trace), trace,
    )


# -- the 4m / 4m+1 decomposition -----------------------------------------------

@dataclass
class LinkReport:
    trunc: int
    passed: bool
    stream: str | None = None
    first_mismatch: int | None = None
    checked_1mod4: int = 0
    checked_0mod4: int = 0


def check_remark1_link(N=DEFAULT_TRUNC):
    """a(4m+1) matches the 6-regular parity at m, a(4m) matches f2/f3 at m.

    ``first_mismatch`` is the index m in the smaller stream.
    """
    if N < 8:
        raise ValueError("link check needs N >= 8")
    a = _bits(A_EXPR, N)
    M = (N + 3) // 4
    reg = _bits(REGULAR6_EXPR, M)
    comp = _bits(COMPANION_EXPR, M)
    odd_side = a[1::4]
    even_side = a[0::4]
    for name, mine, other in (
        (REGULAR6_EXPR, odd_side, reg[: len(odd_side)]),
        (COMPANION_EXPR, even_side, comp[: len(even_side)]),
    ):
        diff = np.flatnonzero(mine != other)
        if len(diff):
            return LinkReport(N, False, name, int(diff[0]), len(odd_side), len(even_side))
    return LinkReport(N, True, None, None, len(odd_side), len(even_side))

