"""Command line entry point.

Exit codes: 0 closed / ok, 2 a branch or check stays open, 1 operational error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .certificate import CertificateParseError, flatten, serialize
from .certify import THEOREMS, WITNESS_PLANS, ProveConfig, prove_theorem, verify_certificate
from .diophantine import ConicParams, InvalidParams, conic_cover_check, conic_point, mordell_search
from .eliminator import CONVENTIONS, default_witnesses, refine_report, sieve_form
from .ellcurve import BadReduction, SingularCurve, WeierstrassCurve, ap_trace
from .frey import N_FLOOR
from .newforms import (
    CacheCorrupt,
    LevelNotAvailable,
    RemoteSchemaMismatch,
    RemoteUnavailable,
    ValidationFailed,
    fetch_and_cache,
    load_level_data,
)
from .newforms.store import CACHE_ENV

EXIT_OK, EXIT_ERROR, EXIT_OPEN = 0, 1, 2
SIGNATURES = {"ppp2": 2, "ppp3": 3}


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(tree: dict) -> None:
    sys.stdout.write(serialize(flatten(tree)))


def _source(args) -> str:
    return getattr(args, "source", None) or args.global_source


def cmd_prove(args) -> int:
    cfg = ProveConfig(
        convention=args.convention,
        mordell_bound=args.mordell_bound,
        source=_source(args),
        witness_plan=args.witness_plan,
        beta=args.beta,
        cache_dir=args.cache_dir,
        workers=args.workers,
    )
    cert = prove_theorem(args.theorem, cfg)
    if args.out:
        cert.write(args.out)
        print(f"theorem {args.theorem}: {cert.status}; certificate written to {args.out}")
        for branch, form, n in cert.open_items:
            print(f"open: {branch} {form} n={n}")
    else:
        sys.stdout.write(cert.text())
    return EXIT_OK if cert.status == "closed" else EXIT_OPEN


def cmd_verify(args) -> int:
    verdict = verify_certificate(args.cert)
    print(verdict)
    if not verdict.ok:
        return EXIT_ERROR
    print(f"conclusion: {verdict.status}")
    return EXIT_OK if verdict.status == "closed" else EXIT_OPEN


def cmd_eliminate(args) -> int:
    m = SIGNATURES[args.signature]
    n_floor = args.n_floor or N_FLOOR[m]
    data = load_level_data(args.level, _source(args), args.cache_dir)
    tree: dict = {"level": args.level, "signature": args.signature, "n_floor": n_floor, "excluded": args.exclude}
    all_closed = True
    forms = {}
    for f in data.forms:
        ws = args.witnesses or default_witnesses(f, n_floor)
        rep = sieve_form(f, ws, n_floor, args.exclude, args.convention, m=m)
        rep = refine_report(rep, f, args.refine if args.refine is not None else ws)
        entry: dict = {"witnesses": list(ws)}
        for p, w in rep.witnesses.items():
            entry[str(p)] = {
                "norms": [[a, v] for a, v in w.norms.items()],
                "allowed": "all" if w.allowed is None else sorted(w.allowed),
            }
        for i, r in enumerate(rep.refinements):
            entry[f"refine_{i}"] = {"n": r.n, "q": r.q, "outcome": r.outcome, "c_residues": list(r.c_residues),
                                    "admissible_residues": list(r.admissible_residues)}
        entry["status"] = rep.status
        all_closed &= rep.eliminated
        forms[f.label] = entry
    tree["forms"] = [f.label for f in data.forms]
    if forms:
        tree["form"] = forms
    _emit(tree)
    return EXIT_OK if all_closed else EXIT_OPEN


def cmd_mordell(args) -> int:
    sols = mordell_search(args.k, args.bound, workers=args.workers)
    _emit({"k": args.k, "bound": args.bound, "solutions": [list(s) for s in sols.solutions], "caveat": sols.caveat})
    return EXIT_OK


def cmd_conic(args) -> int:
    x, y, z = conic_point(ConicParams(args.p, args.family, args.s, args.t, args.sign_x, args.sign_z))
    _emit({"p": args.p, "family": args.family, "point": [x, y, z], "identity": x * x + args.p * y * y == z * z})
    return EXIT_OK


def cmd_conic_cover(args) -> int:
    rep = conic_cover_check(args.p, args.bound)
    _emit({
        "p": rep.p,
        "bound": rep.bound,
        "solutions": rep.solutions,
        "uncovered": [list(t) for t in rep.uncovered],
        "in_both_families": [list(t) for t in rep.in_both],
        "not_solutions": [list(t) for t in rep.bogus],
        "ok": rep.ok,
    })
    return EXIT_OK if rep.ok else EXIT_OPEN


def cmd_ap(args) -> int:
    if len(args.curve) != 5:
        raise ValueError("--curve needs five a-invariants")
    E = WeierstrassCurve.from_ainvs(args.curve)
    print(ap_trace(E, args.p))
    return EXIT_OK


def cmd_newforms(args) -> int:
    if args.fetch:
        rep = fetch_and_cache(args.level, args.endpoint, args.cache_dir)
        print(f"cached level {rep.level} at {rep.path}: {', '.join(rep.labels) or 'no forms'}")
        data = load_level_data(args.level, "remote", args.cache_dir, args.endpoint)
    else:
        data = load_level_data(args.level, _source(args), args.cache_dir, args.endpoint)
    tree: dict = {"level": data.level, "source": data.source.split(":")[0], "forms": [f.label for f in data.forms]}
    for f in data.forms:
        tree[f.label] = {
            "degree": f.degree,
            "field_poly": list(f.field_poly.coeffs),
            "c": {str(q): [list(v), d] for q, (v, d) in sorted(f.eigenvalues.items()) if q <= args.qmax},
            "fingerprint": f.fingerprint(),
        }
    for c in data.curves:
        tree[f"curve_{c.form_label}"] = [c.label, list(c.curve.ainvs)]
    _emit(tree)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="modmethod", description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV), help="newform cache directory")
    ap.add_argument("--newform-source", dest="global_source", choices=("bundled", "remote"), default="bundled")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="prove a theorem and emit its certificate")
    p.add_argument("--theorem", type=int, choices=sorted(THEOREMS), required=True)
    p.add_argument("--convention", choices=CONVENTIONS, default="always")
    p.add_argument("--mordell-bound", type=int, default=10**6)
    p.add_argument("--newform-source", dest="source", choices=("bundled", "remote"))
    p.add_argument("--witness-plan", choices=WITNESS_PLANS, default="quoted")
    p.add_argument("--beta", type=int, choices=(1, 2), default=1, help="use C^beta in theorems 2 and 3")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="replay a certificate")
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eliminate", help="run the trace sieve on every form of a level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--witnesses", type=_int_list)
    p.add_argument("--signature", choices=sorted(SIGNATURES), required=True)
    p.add_argument("--n-floor", type=int)
    p.add_argument("--exclude", type=_int_list, default=[])
    p.add_argument("--convention", choices=CONVENTIONS, default="always")
    p.add_argument("--refine", type=_int_list, help="primes q for the residue refinement (default: the witnesses)")
    p.add_argument("--newform-source", dest="source", choices=("bundled", "remote"))
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("mordell", help="integral points on Y^2 = X^3 + k with |X| <= bound")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_mordell)

    p = sub.add_parser("conic", help="a point of x^2 + p y^2 = z^2 from one of the two families")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--family", type=int, choices=(1, 2), required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--sign-x", type=int, choices=(1, -1), default=1)
    p.add_argument("--sign-z", type=int, choices=(1, -1), default=1)
    p.set_defaults(func=cmd_conic)

    p = sub.add_parser("conic-cover", help="check the two families against brute force")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_conic_cover)

    p = sub.add_parser("ap", help="trace of Frobenius of a curve at a good prime")
    p.add_argument("--curve", type=_int_list, required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_ap)

    p = sub.add_parser("newforms", help="list the newforms at a level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--fetch", action="store_true", help="download from the remote database into the cache")
    p.add_argument("--endpoint")
    p.add_argument("--qmax", type=int, default=13)
    p.add_argument("--newform-source", dest="source", choices=("bundled", "remote"))
    p.set_defaults(func=cmd_newforms)
    return ap


OPERATIONAL = (
    ValueError,
    OSError,
    LevelNotAvailable,
    RemoteSchemaMismatch,
    RemoteUnavailable,
    CacheCorrupt,
    ValidationFailed,
    CertificateParseError,
    InvalidParams,
    BadReduction,
    SingularCurve,
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except OPERATIONAL as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
