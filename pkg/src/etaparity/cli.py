"""Command line front end.

    etaparity coeffs "f3/(f1*f6)" 0..8 --exact
    etaparity verify eq44 --trunc 100000
    etaparity verify proof-second
    etaparity scan density --mod 4 --format csv

Every run writes one report envelope.  Exit status: 0 on success or pass,
1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict

from . import __version__
from . import gf2series as gs
from . import identities as ids
from . import oracle, scanners
from .etaq import EtaSyntaxError, eval_eta, parse_eta

VERIFY_DEFAULT_TRUNC = 10**5
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_range(text):
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return int(lo), int(lo)
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A..B") from None


# -- commands ----------------------------------------------------------------
# each returns (params, payload, rows, ok)

def cmd_coeffs(args):
    try:
        expr = parse_eta(args.expr)
    except EtaSyntaxError as exc:
        raise UsageError(str(exc)) from None
    lo, hi = _parse_range(args.range)
    N = args.trunc if args.trunc is not None else hi + 1
    if not 0 <= lo <= hi < N:
        raise UsageError(f"range {lo}..{hi} is not inside [0, {N})")
    if args.exact:
        if N > oracle.ORACLE_CAP:
            raise UsageError(f"--exact is limited to N <= {oracle.ORACLE_CAP}")
        series = oracle.eval_eta_exact(expr, N)
        values = [series[n] for n in range(lo, hi + 1)]
    else:
        series = eval_eta(expr, N)
        values = [gs.coeff(series, n) for n in range(lo, hi + 1)]
    rows = [{"n": n, "coeff": v} for n, v in zip(range(lo, hi + 1), values)]
    params = {"expr": str(expr), "trunc": N, "range": [lo, hi], "exact": args.exact}
    return params, {"coefficients": rows}, rows, True


def _verify_targets(tag):
    key = tag.strip().lower()
    if key == "theorem":
        return "theorem", None
    if key.startswith("proof-") or key in ids.PROOFS:
        proof = key.removeprefix("proof-")
        if proof not in ids.PROOFS:
            raise UsageError(_unknown_tag(tag))
        return "proof", proof
    if key == "all":
        return "all", None
    try:
        return "identity", ids.parse_identity(tag)
    except ids.UnknownIdentity:
        raise UsageError(_unknown_tag(tag)) from None


def _unknown_tag(tag):
    names = [t.value for t in ids.Tag if t is not ids.Tag.FROBENIUS_T]
    names += ["frobenius-<t>", "all", "theorem"] + [f"proof-{p}" for p in ids.PROOFS]
    return f"unknown tag {tag!r}; available: {', '.join(names)}"


def cmd_verify(args):
    kind, target = _verify_targets(args.tag)
    if kind == "theorem":
        N = args.trunc or scanners.DEFAULT_TRUNC
        if N < 4:
            raise UsageError("theorem scan needs --trunc >= 4")
        try:
            rep = scanners.verify_theorem(N, args.expr)
        except EtaSyntaxError as exc:
            raise UsageError(str(exc)) from None
        row = {"identity": f"theorem [{rep.expr}]", "trunc": N, "outcome": "pass" if rep.passed else "fail",
               "first_mismatch": rep.first_violation, "lhs": None, "rhs": None, "detail": ""}
        return {"tag": "theorem", "trunc": N, "expr": rep.expr}, {"reports": [row]}, [row], rep.passed
    N = args.trunc or VERIFY_DEFAULT_TRUNC
    if kind == "proof":
        if N < 16:
            raise UsageError("proof chains need --trunc >= 16")
        reports = ids.derivation_chain(target, N)
    elif kind == "all":
        reports = []
        for ident in ids.all_identities():
            n = min(N, 2000) if ident.tag is ids.Tag.GEN_FN else N
            reports.append(ids.verify(ident, n))
    else:
        if target.tag is ids.Tag.GEN_FN and N > oracle.ORACLE_CAP:
            raise UsageError(f"gen-fn is checked exactly; --trunc must be <= {oracle.ORACLE_CAP}")
        if N < 2:
            raise UsageError("--trunc must be >= 2")
        reports = [ids.verify(target, N)]
    rows = [r.as_dict() for r in reports]
    ok = all(r.passed for r in reports)
    return {"tag": args.tag, "trunc": N}, {"reports": rows}, rows, ok


def _scan_trunc(args, default):
    if args.trunc:
        return args.trunc
    return scanners.STRETCH_TRUNC if args.stretch else default


def cmd_scan(args):
    workers = args.threads or scanners.default_workers()
    expr = args.expr
    try:
        parse_eta(expr)
    except EtaSyntaxError as exc:
        raise UsageError(str(exc)) from None
    kind = args.kind
    if kind == "density":
        N = _scan_trunc(args, scanners.DEFAULT_TRUNC)
        m = args.mod or 4
        if m < 1 or N < m:
            raise UsageError("density needs --mod >= 1 and --trunc >= --mod")
        rep = scanners.density(expr, N, m, workers)
        rows = [asdict(c) for c in rep.classes]
        params = {"expr": rep.expr, "trunc": N, "mod": m}
        return params, rep.as_dict(), rows, True
    if kind == "ap":
        N = _scan_trunc(args, 10**5)
        M = args.max_mod
        if M < 1 or N < scanners.MIN_CLASS_SAMPLES * M:
            raise UsageError(f"ap needs --max-mod >= 1 and --trunc >= {scanners.MIN_CLASS_SAMPLES} * --max-mod")
        wits = scanners.ap_scan(expr, N, M, workers)
        rows = [asdict(w) for w in wits]
        even = [r for r in rows if r["status"] == "even-up-to-N"]
        payload = {
            "witnesses": rows,
            "even_classes": [[r["modulus"], r["residue"]] for r in even],
            "all_even_subsumed": all(r["subsumed"] for r in even),
        }
        return {"expr": str(parse_eta(expr)), "trunc": N, "max_mod": M}, payload, rows, True
    if kind == "equi":
        N = _scan_trunc(args, scanners.DEFAULT_TRUNC)
        m = args.mod or 1
        r = args.residue
        if not 0 <= r < m:
            raise UsageError("equi needs 0 <= --residue < --mod")
        try:
            rep = scanners.equidistribution(expr, m, r, N)
        except scanners.IdenticallyEvenClass as exc:
            raise UsageError(str(exc)) from None
        params = {"expr": rep.expr, "trunc": N, "mod": m, "residue": r}
        return params, rep.as_dict(), rep.trace, True
    if kind == "link":
        N = _scan_trunc(args, scanners.DEFAULT_TRUNC)
        if N < 8:
            raise UsageError("link needs --trunc >= 8")
        rep = scanners.check_remark1_link(N)
        row = asdict(rep)
        return {"trunc": N}, row, [row], rep.passed
    raise UsageError(f"unknown scan kind {kind!r}")


# -- output ------------------------------------------------------------------

def _render(fmt, envelope, rows):
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if not rows:
        return ""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
        return buf.getvalue()
    keys = list(rows[0])
    lines = ["  ".join(keys)]
    for row in rows:
        lines.append("  ".join("" if row[k] is None else str(row[k]) for k in keys))
    return "\n".join(lines) + "\n"


def _common_flags(suppress):
    # flags are accepted before or after the subcommand; the copy on each
    # subparser must not overwrite a value given at the top level
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, default=d(None), help="truncation N")
    common.add_argument("--threads", type=int, default=d(None),
                        help="worker count (default: $ETAQ_THREADS or CPU count)")
    common.add_argument("--format", choices=("json", "csv", "plain"), default=d("json"))
    common.add_argument("--out", default=d(None), help="write the report here instead of stdout")
    return common


def build_parser():
    parser = argparse.ArgumentParser(prog="etaparity", description=__doc__.split("\n")[0],
                                     parents=[_common_flags(False)])
    common = _common_flags(True)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="print coefficients of an eta-quotient")
    p.add_argument("expr", help='e.g. "f3/(f1*f6)"')
    p.add_argument("range", nargs="?", default="0..9", help="inclusive index range A..B")
    p.add_argument("--exact", action="store_true", help="exact integers instead of parities")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("verify", parents=[common], help="verify an identity, a proof chain, or the theorem")
    p.add_argument("tag", help="identity tag, frobenius-<t>, proof-first|second|third, theorem, all")
    p.add_argument("--expr", default=scanners.A_EXPR, help="stream scanned by 'theorem'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="run a parity scan")
    p.add_argument("kind", choices=("density", "ap", "equi", "link"))
    p.add_argument("--expr", default=scanners.A_EXPR)
    p.add_argument("--mod", type=int, default=None)
    p.add_argument("--residue", type=int, default=0)
    p.add_argument("--max-mod", type=int, default=64)
    p.add_argument("--stretch", action="store_true", help=f"default truncation {scanners.STRETCH_TRUNC}")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.trunc is not None and args.trunc < 1:
        parser.error("--trunc must be >= 1")
    start = time.perf_counter()
    try:
        params, payload, rows, ok = args.func(args)
    except UsageError as exc:
        print(f"etaparity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    envelope = {
        "command": args.command if args.command != "scan" else f"scan {args.kind}",
        "params": params,
        "result": payload,
        "ok": ok,
        "wall_time_ms": round((time.perf_counter() - start) * 1000, 3),
        "version": __version__,
    }
    text = _render(args.format, envelope, rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
