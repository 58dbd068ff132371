"""Command-line interface: ``apxgrp <command> ...``.

Exit status is 0 on success (or a verified cover), 1 when a cover is
falsified (the witness is printed) and 2 for every kind of error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .certificate import CertificateFormatError, CoverCertificate, certify
from .cover import build_cover, plan_cover
from .errors import ApxError
from .group import PointSet
from .khovanskii import khovanskii_c
from .sumset import dilate, h_fold, h_fold_scan
from .verifier import lower_bound, minimal_cover, scan_h0

EXIT_OK, EXIT_FALSIFIED, EXIT_ERROR = 0, 1, 2

SCAN_COLUMNS = ["h", "greedy_size", "minimal_size", "lower_bound", "paper_bound"]


class InputError(Exception):
    pass


def load_set(path: str) -> PointSet:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        A = PointSet.from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a set file ({exc})") from exc
    if not len(A):
        raise InputError(f"{path}: the set is empty")
    return A


def _echo(args: argparse.Namespace, A: PointSet | None = None) -> dict:
    keys = ["command", "set", "certificate", "r", "h", "method", "ell", "h_max", "exact", "budget", "count_only"]
    out = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    if A is not None:
        out["points"] = A.to_json()
    return out


def _emit(doc: dict, out: str | None = None) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(args, A, **fields) -> dict:
    return {"version": __version__, "input": _echo(args, A), **fields}


def cmd_sumset(args) -> int:
    A = load_set(args.set)
    if args.count_only:
        counts = [{"h": i + 1, "count": len(S)} for i, S in enumerate(h_fold_scan(A, args.h))]
        _emit(_report(args, A, counts=counts), args.out)
        return EXIT_OK
    S = h_fold(A, args.h)
    _emit(_report(args, A, count=len(S), sumset=S.to_json()), args.out)
    return EXIT_OK


def cmd_cover(args) -> int:
    A = load_set(args.set)
    X, plan = build_cover(A, args.r, args.h, args.method)
    target = A
    if plan.method == "simplex":
        # the simplex cover lives on (k-1) * A
        target = dilate(A, plan.k - 1)
    cert, witness = certify(target, args.r, args.h, X, plan.method, plan.paper_bound, plan.c)
    if not cert.verified:
        print(f"falsified: {witness} is in rhA but not in X + hA", file=sys.stderr)
        print(json.dumps({"version": __version__, "input": _echo(args, A), "witness": list(witness.coords)}))
        return EXIT_FALSIFIED
    text = cert.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.certificate) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{args.certificate}: {exc.strerror}") from exc
    cert, witness = CoverCertificate.loads(text).recheck()
    doc = {"version": __version__, "input": _echo(args), "verified": cert.verified, "claimed": cert.claimed}
    if witness is not None:
        doc["witness"] = list(witness.coords)
        print(f"falsified: witness {witness}", file=sys.stderr)
    _emit(doc)
    return EXIT_OK if cert.verified else EXIT_FALSIFIED


def cmd_minimal(args) -> int:
    A = load_set(args.set)
    res = minimal_cover(A, args.r, args.h, args.budget)
    _emit(
        _report(
            args, A,
            size=len(res.cover),
            optimal=res.optimal,
            lower_bound=lower_bound(A, args.r, args.h),
            cover=res.cover.to_json(),
        ),
        args.out,
    )
    return EXIT_OK


def scan_csv(result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for row in result.rows:
        w.writerow([
            row.h,
            row.greedy_size,
            "" if row.minimal_size is None else row.minimal_size,
            row.lower_bound,
            "" if row.paper_bound is None else row.paper_bound,
        ])
    return buf.getvalue()


def cmd_scan(args) -> int:
    A = load_set(args.set)
    try:
        bound = plan_cover(A, args.r).paper_bound
    except ApxError:
        bound = None
    res = scan_h0(A, args.r, args.ell, args.h_max, exact=args.exact, budget=args.budget, paper_bound=bound)
    _emit(_report(args, A, **res.to_json()))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(f"# apxgrp {__version__}; input {json.dumps(_echo(args), sort_keys=True)}\n")
            fh.write(scan_csv(res))
    return EXIT_OK


def cmd_khovanskii(args) -> int:
    A = load_set(args.set)
    _emit(_report(args, A, **khovanskii_c(A).to_json()), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apxgrp", description="Covers of iterated sumsets in finitely generated abelian groups.")
    p.add_argument("--version", action="version", version=f"apxgrp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, r=True, h=True):
        sp.add_argument("--set", required=True, metavar="FILE", help="JSON set file")
        if r:
            sp.add_argument("-r", type=int, required=True)
        if h:
            sp.add_argument("--h", type=int, required=True)
        sp.add_argument("--out", metavar="FILE")

    sp = sub.add_parser("sumset", help="print hA")
    common(sp, r=False)
    sp.add_argument("--count-only", action="store_true", help="print |iA| for i = 1..h")
    sp.set_defaults(func=cmd_sumset)

    sp = sub.add_parser("cover", help="build a cover and write a certificate")
    common(sp)
    sp.add_argument("--method", default="auto", choices=["auto", "simplex", "main-zn", "abelian"])
    sp.set_defaults(func=cmd_cover)

    sp = sub.add_parser("verify", help="re-check a certificate")
    sp.add_argument("certificate", metavar="FILE")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("minimal", help="exact minimum cover")
    common(sp)
    sp.add_argument("--budget", type=int, default=200_000)
    sp.set_defaults(func=cmd_minimal)

    sp = sub.add_parser("scan", help="empirical threshold h0 for a cover size ell")
    common(sp, h=False)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--h-max", type=int, required=True)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--budget", type=int, default=200_000)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("khovanskii", help="rewrite constant c(A)")
    common(sp, r=False, h=False)
    sp.set_defaults(func=cmd_khovanskii)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CertificateFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ApxError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (ValueError, OSError, OverflowError, MemoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
