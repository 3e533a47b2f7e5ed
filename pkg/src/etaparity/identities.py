"""Registry of the mod-2 congruences behind the parity theorem for a(n).

Each identity is checked coefficient by coefficient up to a truncation
bound; a failing check reports the smallest index where the two sides
disagree.  The three proofs are also available as chains of intermediate
congruences, one report per link.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import gf2series as gs
from . import oracle
from .etaq import euler, eval_eta, residues_mod4, sparse

__all__ = [
    "Tag",
    "IdentityId",
    "VerifyReport",
    "UnknownIdentity",
    "PROOFS",
    "parse_identity",
    "all_identities",
    "build_sides",
    "verify",
    "verify_pair",
    "derivation_chain",
    "negative_controls",
    "mask_residues",
]


class UnknownIdentity(KeyError):
    pass


class Tag(enum.Enum):
    GEN_FN = "gen-fn"
    F6_EQ_F3SQ = "f6-eq-f3sq"
    PENTAGONAL = "pentagonal"
    TRIANGULAR = "triangular"
    EQ99 = "eq99"
    EQ33 = "eq33"
    EQ12 = "eq12"
    EQ44 = "eq44"
    F1P4_EQ_F4 = "f1p4-eq-f4"
    F3P4_EQ_F12 = "f3p4-eq-f12"
    FROBENIUS_T = "frobenius"
    A_EQ_INV_F1F3 = "a-eq-inv-f1f3"


@dataclass(frozen=True)
class IdentityId:
    tag: Tag
    t: int | None = None

    def __post_init__(self):
        if self.tag is Tag.FROBENIUS_T:
            if self.t is None or self.t < 1:
                raise ValueError("FROBENIUS_T needs a parameter t >= 1")
        elif self.t is not None:
            raise ValueError(f"{self.tag.name} takes no parameter")

    def __str__(self):
        if self.tag is Tag.FROBENIUS_T:
            return f"frobenius-{self.t}"
        return self.tag.value


@dataclass
class VerifyReport:
    identity: str
    trunc: int
    passed: bool
    first_mismatch: int | None = None
    lhs: int | None = None
    rhs: int | None = None
    detail: str = ""

    def __post_init__(self):
        if not self.passed and (self.first_mismatch is None or self.first_mismatch >= self.trunc):
            raise ValueError("a failing report needs a mismatch index below trunc")

    @property
    def outcome(self):
        return "pass" if self.passed else "fail"

    def as_dict(self):
        return {
            "identity": self.identity,
            "trunc": self.trunc,
            "outcome": self.outcome,
            "first_mismatch": self.first_mismatch,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "detail": self.detail,
        }


def parse_identity(text):
    """``"eq44"``, ``"EQ44"``, ``"frobenius-5"`` or ``"FROBENIUS_T:5"`` -> IdentityId."""
    key = text.strip().lower().replace("_", "-")
    for sep in (":", "-"):
        head, _, tail = key.rpartition(sep)
        if head in ("frobenius", "frobenius-t") and tail.isdigit():
            return IdentityId(Tag.FROBENIUS_T, int(tail))
    for tag in Tag:
        if tag is not Tag.FROBENIUS_T and key in (tag.value, tag.name.lower().replace("_", "-")):
            return IdentityId(tag)
    raise UnknownIdentity(text)


def all_identities(max_t=24):
    """Every registered identity, Frobenius instances for t = 1..max_t."""
    ids = [IdentityId(tag) for tag in Tag if tag is not Tag.FROBENIUS_T]
    ids += [IdentityId(Tag.FROBENIUS_T, t) for t in range(1, max_t + 1)]
    return ids


def _q(a):
    return gs.shift(a, 1)


def _sparse(kind, N):
    return sparse(kind, N).to_series()


def build_sides(ident, N):
    """Left and right series of an identity at truncation N."""
    if isinstance(ident, str):
        ident = parse_identity(ident)
    if N < 2:
        raise ValueError("identities need truncation N >= 2")
    tag = ident.tag
    if tag is Tag.GEN_FN:
        exact = oracle.count_a_no3mod6(N)
        return eval_eta("f3/(f1*f6)", N), exact.mod2()
    if tag is Tag.F6_EQ_F3SQ:
        return euler(6, N), gs.mul(euler(3, N), euler(3, N))
    if tag is Tag.PENTAGONAL:
        return euler(1, N, "product"), _sparse("pentagonal", N)
    if tag is Tag.TRIANGULAR:
        f1 = euler(1, N, "product")
        return gs.mul(gs.mul(f1, f1), f1), _sparse("triangular", N)
    if tag is Tag.EQ99:
        return eval_eta("f1^3", N), gs.add(euler(3, N), _q(eval_eta("f9^3", N)))
    if tag is Tag.EQ33:
        return eval_eta("f3^3/f1", N), _sparse("n3nm2", N)
    if tag is Tag.EQ12:
        rhs = gs.add(eval_eta("f1^12", N), _q(eval_eta("f3^12", N)))
        return eval_eta("f1^3*f3^3", N), rhs
    if tag is Tag.EQ44:
        rhs = gs.add(eval_eta("f8/f12", N), _q(eval_eta("f24/f4", N)))
        return eval_eta("1/(f1*f3)", N), rhs
    if tag is Tag.F1P4_EQ_F4:
        return eval_eta("f1^4", N), euler(4, N)
    if tag is Tag.F3P4_EQ_F12:
        return eval_eta("f3^4", N), euler(12, N)
    if tag is Tag.FROBENIUS_T:
        # generic product, not the squaring shortcut, so the check is not circular
        ft = euler(ident.t, N)
        return gs.mul(ft, ft, kernel="karatsuba"), euler(2 * ident.t, N)
    if tag is Tag.A_EQ_INV_F1F3:
        return eval_eta("f3/(f1*f6)", N), eval_eta("1/(f1*f3)", N)
    raise UnknownIdentity(str(ident))


def verify_pair(label, lhs, rhs):
    """Compare two series; the report names the first differing coefficient."""
    gs._check(lhs, rhs)
    diff = gs.add(lhs, rhs)
    if not diff.popcount():
        return VerifyReport(label, lhs.trunc, True)
    n = int(diff.support()[0])
    return VerifyReport(label, lhs.trunc, False, n, gs.coeff(lhs, n), gs.coeff(rhs, n))


def _verify_gen_fn_exact(N):
    exact = oracle.eval_eta_exact("f3/(f1*f6)", N).coeffs
    counts = oracle.count_a_no3mod6(N).coeffs
    for n, (x, y) in enumerate(zip(exact, counts)):
        if x != y:
            return VerifyReport(str(IdentityId(Tag.GEN_FN)), N, False, n, x, y, "exact integer mismatch")
    return VerifyReport(str(IdentityId(Tag.GEN_FN)), N, True, detail="exact over Z and mod 2")


def verify(ident, N):
    """Check an identity on all N coefficients.

    ``GEN_FN`` is checked over the integers (eta-quotient expansion against
    the partition count) as well as mod 2, so N is limited by the oracle cap.
    """
    if isinstance(ident, str):
        ident = parse_identity(ident)
    if N < 2:
        raise ValueError("identities need truncation N >= 2")
    if ident.tag is Tag.GEN_FN:
        report = _verify_gen_fn_exact(N)
        if not report.passed:
            return report
    lhs, rhs = build_sides(ident, N)
    report = verify_pair(str(ident), lhs, rhs)
    if ident.tag is Tag.GEN_FN and report.passed:
        report.detail = "exact over Z and mod 2"
    return report


def mask_residues(a, m, residues):
    """Keep only the coefficients whose index lies in the given classes mod m."""
    bits = np.array(a.bits())
    keep = np.isin(np.arange(a.trunc) % m, list(residues))
    bits[~keep] = 0
    return gs.from_bits(bits)


def _residue_link(label, s, allowed):
    """A sparse support whose exponents stay inside ``allowed`` mod 4."""
    series = s.to_series()
    outside = mask_residues(series, 4, set(range(4)) - set(allowed))
    report = verify_pair(label, outside, gs.zero(s.bound))
    report.detail = f"residues mod 4 = {sorted(residues_mod4(s))}"
    return report


def _theorem_link(N):
    stream = eval_eta("1/(f1*f3)", N)
    return verify_pair("1/(f1*f3) vanishes on 2,3 mod 4", mask_residues(stream, 4, {2, 3}), gs.zero(N))


def _first_proof(N):
    f1 = euler(1, N)
    inv_f1p4 = gs.inv(gs.pow(f1, 4))
    f9c_over_f3 = eval_eta("f9^3/f3", N)
    theta3 = gs.subst(_sparse("n3nm2", N), 3)
    sq = _sparse("shifted_square", N)
    f4 = euler(4, N)
    target = eval_eta("1/(f1*f3)", N)
    return [
        verify(IdentityId(Tag.EQ99), N),
        verify_pair(
            "1/(f1*f3) = 1/f1^4 + q*(f9^3/f3)/f1^4",
            target,
            gs.add(inv_f1p4, _q(gs.mul(f9c_over_f3, inv_f1p4))),
        ),
        verify_pair("f9^3/f3 = sum q^(3n(3n-2))", f9c_over_f3, theta3),
        verify_pair("q*sum q^(3n(3n-2)) = sum q^((3n-1)^2)", _q(theta3), sq),
        verify(IdentityId(Tag.F1P4_EQ_F4), N),
        verify_pair(
            "1/(f1*f3) = (1 + sum q^((3n-1)^2))/f4",
            target,
            gs.mul(gs.add(gs.one(N), sq), gs.inv(f4)),
        ),
        _residue_link("(3n-1)^2 mod 4 in {0,1}", sparse("shifted_square", N), {0, 1}),
        _theorem_link(N),
    ]


def _second_proof(N):
    f3p4 = eval_eta("f3^4", N)
    inv_f3p4 = gs.inv(f3p4)
    theta = _sparse("n3nm2", N)
    target = eval_eta("1/(f1*f3)", N)
    return [
        verify(IdentityId(Tag.EQ33), N),
        verify_pair("1/(f1*f3) = (f3^3/f1)/f3^4", target, gs.mul(inv_f3p4, eval_eta("f3^3/f1", N))),
        verify_pair("1/(f1*f3) = sum q^(n(3n-2))/f3^4", target, gs.mul(inv_f3p4, theta)),
        verify(IdentityId(Tag.F3P4_EQ_F12), N),
        verify_pair("1/(f1*f3) = sum q^(n(3n-2))/f12", target, gs.mul(gs.inv(euler(12, N)), theta)),
        _residue_link("n(3n-2) mod 4 in {0,1}", sparse("n3nm2", N), {0, 1}),
        _theorem_link(N),
    ]


def _third_proof(N):
    target = eval_eta("1/(f1*f3)", N)
    return [
        verify(IdentityId(Tag.EQ12), N),
        verify_pair(
            "1/(f1*f3) = f1^8/f3^4 + q*f3^8/f1^4",
            target,
            gs.add(eval_eta("f1^8/f3^4", N), _q(eval_eta("f3^8/f1^4", N))),
        ),
        verify_pair("f1^8 = f8", eval_eta("f1^8", N), euler(8, N)),
        verify(IdentityId(Tag.F3P4_EQ_F12), N),
        verify_pair("f3^8 = f24", eval_eta("f3^8", N), euler(24, N)),
        verify(IdentityId(Tag.F1P4_EQ_F4), N),
        _theorem_link(N),
        verify(IdentityId(Tag.EQ44), N),
    ]


PROOFS = {"first": _first_proof, "second": _second_proof, "third": _third_proof}


def derivation_chain(proof, N):
    """Reports for every displayed step of one of the three proofs."""
    key = proof.lower().removeprefix("proof-")
    if key not in PROOFS:
        raise UnknownIdentity(f"unknown proof {proof!r}; expected one of {sorted(PROOFS)}")
    if N < 16:
        raise ValueError("derivation chains need truncation N >= 16")
    return PROOFS[key](N)


@dataclass
class _Control:
    label: str
    build: object = field(repr=False)


def _controls():
    return [
        _Control(
            "eq33 with n(3n-1) exponents",
            # n(3n-1) is twice a generalized pentagonal number
            lambda N: (eval_eta("f3^3/f1", N), gs.from_exponents(
                [2 * e for e in sparse("pentagonal", N // 2 + 1)], N)),
        ),
        _Control(
            "eq99 without the q shift",
            lambda N: (eval_eta("f1^3", N), gs.add(euler(3, N), eval_eta("f9^3", N))),
        ),
        _Control(
            "eq44 with f24/f4 unshifted",
            lambda N: (eval_eta("1/(f1*f3)", N), gs.add(eval_eta("f8/f12", N), eval_eta("f24/f4", N))),
        ),
        _Control(
            "eq12 with f3^12 replaced by f3^11",
            lambda N: (eval_eta("f1^3*f3^3", N), gs.add(eval_eta("f1^12", N), _q(eval_eta("f3^11", N)))),
        ),
    ]


def negative_controls(N):
    """Deliberately corrupted identities; each must fail."""
    return [verify_pair(c.label, *c.build(N)) for c in _controls()]
