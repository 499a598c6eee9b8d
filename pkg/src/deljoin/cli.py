"""Command-line interface.

Exit codes: 0 when every check passes, 1 on a failed check, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys

from .delta import (ShapeSpec, build_delta_n, build_delta_oet, split_by_j, verify_dnt,
                    verify_main_theorem_internal)
from .homology import homology
from .nakaoka import enumerate_qp, predicted_homology, table_rows
from .poset import Poset
from .shelling import el_label_bnkt, falling_chains, verify_el
from .verify import (CONSTRUCTIONS, DEFAULT_MAX_FACES, Cache, ResourceLimit, VerificationReport,
                     cached_poset_homology, cmd_verify_all, cmd_verify_pmain, cmd_verify_stability,
                     construct, face_count, guarded_homology, select_part)


class UsageError(Exception):
    pass


def _ring(args) -> int | None:
    if args.ring == "z":
        return None
    if args.p is None:
        raise UsageError("--ring fp needs --p")
    return args.p


def _cache(args) -> Cache | None:
    root = args.cache_dir or Cache.default_dir()
    return Cache(root) if root else None


def _emit(args, report: VerificationReport) -> int:
    if args.json:
        print(report.to_json())
    elif args.tsv:
        print(report.to_tsv())
    else:
        print(report.to_table())
    return 0 if report.ok else 1


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {' '.join(missing)}")


# -- subcommands ---------------------------------------------------------------------

def cmd_poset(args) -> int:
    if args.file:
        with open(args.file) as fh:
            P = Poset.from_json(fh.read())
    else:
        _need(args, "n")
        P = construct(args.construction, args.n, args.k, args.t)
    P = select_part(P, args.part)
    if args.json:
        print(P.to_json())
        return 0
    print(f"elements\t{len(P)}")
    print(f"covers\t{len(P.covers)}")
    print(f"f-vector\t{' '.join(map(str, P.chain_counts()))}")
    if args.list:
        for x in P.elements:
            print(str(x))
    return 0


def cmd_homology(args) -> int:
    ring = _ring(args)
    if args.file:
        with open(args.file) as fh:
            P = select_part(Poset.from_json(fh.read()), args.part)
        h = guarded_homology(P, ring, args.max_faces)
    else:
        _need(args, "n")
        h = cached_poset_homology(_cache(args), args.construction, args.n, args.k, args.t,
                                  ring, args.part, args.max_faces)
    if args.json:
        print(h.to_json())
    elif args.tsv:
        print("degree\tbetti\ttorsion")
        for q in sorted(h.concentrated_in()):
            print(f"{q}\t{h.rank(q)}\t{','.join(map(str, h.torsion_at(q)))}")
    else:
        print(h.describe())
    return 0


def cmd_bnk(args) -> int:
    _need(args, "n", "k")
    if args.p is None:
        raise UsageError("bnk needs --p")
    P = select_part(construct("bnkt" if args.t else "bnk", args.n, args.k, args.t), "nobottom")
    h = cached_poset_homology(_cache(args), "bnkt" if args.t else "bnk", args.n, args.k, args.t,
                              args.p, "nobottom", args.max_faces)
    rows = [(q, h.rank(q), predicted_homology(args.p, args.k, q) if q <= args.n - 2 else None)
            for q in range(0, args.n)]
    if args.json:
        print(json.dumps({"elements": len(P), "faces": face_count(P),
                          "rows": [{"q": q, "computed": c, "predicted": e} for q, c, e in rows]}))
    else:
        sep = "\t" if args.tsv else "  "
        print(sep.join(["q", "computed", "predicted"]))
        for q, c, e in rows:
            print(sep.join([str(q), str(c), "-" if e is None else str(e)]))
    return 0 if all(e is None or c == e for _, c, e in rows) else 1


def cmd_delta(args) -> int:
    if args.action == "build":
        _need(args, "p", "n", "qmax")
        C = build_delta_n(args.p, args.n, args.qmax)
        h = homology(C)
        if args.json:
            dump = {"p": args.p, "n": args.n, "qmax": args.qmax,
                    "basis": {str(q): [list(map(list, b)) for b in C.bases[q]] for q in C.degrees()},
                    "boundaries": {str(q): m.to_dense() for q, m in C.boundaries.items()},
                    "homology": h.to_dict()}
            print(json.dumps(dump))
            return 0
        print(f"parts\t{len(split_by_j(C))}")
        for q in range(0, args.qmax + 1):
            print(f"H_{q}\t{h.rank(q)}")
        return 0
    if args.action == "shape":
        _need(args, "n", "t")
        spec = ShapeSpec.make(args.n, json.loads(args.O), json.loads(args.E), args.t)
        h = homology(build_delta_oet(spec, _ring(args)))
        print(h.to_json() if args.json else f"{spec}: {h.describe()}")
        return 0
    if args.action == "verify-dnt":
        _need(args, "nmax")
        rep = VerificationReport("dnt", {"n_max": args.nmax})
        for c in verify_dnt(args.nmax, _ring(args)):
            rep.add(str(c.spec), c.expected.describe(), c.result.describe())
        return _emit(args, rep)
    _need(args, "p", "n", "qmax")
    rep = VerificationReport("main-internal", {"p": args.p, "n": args.n, "qmax": args.qmax})
    for c in verify_main_theorem_internal(args.p, args.n, args.qmax):
        rep.add(f"H_{c.q}", c.predicted, c.computed)
    return _emit(args, rep)


def cmd_nakaoka(args) -> int:
    _need(args, "p", "dmax")
    if args.action == "qp":
        seqs = enumerate_qp(args.p, args.dmax)
        if args.json:
            print(json.dumps([list(J) for J in seqs]))
        else:
            for J in seqs:
                print(f"{sum(J)}\t{' '.join(map(str, J))}")
        return 0
    _need(args, "rmax")
    rows = table_rows(args.p, args.rmax, args.dmax)
    if args.json:
        print(json.dumps([{"r": r, "d": d, "U": u, "U_tilde": ut} for r, d, u, ut in rows]))
    else:
        print("r\td\tU\tU_tilde")
        for row in rows:
            print("\t".join(map(str, row)))
    return 0


def cmd_shelling(args) -> int:
    _need(args, "n", "k", "t")
    lab = el_label_bnkt(args.n, args.k, args.t)
    r = verify_el(lab)
    falls = falling_chains(lab)
    if args.json:
        print(json.dumps({"ok": r.ok, "intervals": r.intervals,
                          "violations": [list(map(str, v)) for v in r.violations],
                          "falling_chains": {str(k): v for k, v in falls.items()}}))
    else:
        print(f"EL\t{'pass' if r.ok else 'fail'}\t{r.intervals} intervals")
        print("length\tfalling")
        for length, count in falls.items():
            print(f"{length}\t{count}")
    return 0 if r.ok else 1


def cmd_verify(args) -> int:
    cache = _cache(args)
    if args.suite == "pmain":
        _need(args, "p", "k", "n")
        rep = cmd_verify_pmain(args.p, args.k, args.n, cache, args.max_faces)
    elif args.suite == "stability":
        _need(args, "k", "n")
        rep = cmd_verify_stability(args.k, args.n, cache, args.max_faces)
    else:
        rep = cmd_verify_all(args.budget_sec, args.threads, args.inject_fault)
    return _emit(args, rep)


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--qmax", type=int)
    common.add_argument("--ring", choices=["z", "fp"], default="z")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--tsv", action="store_true")
    common.add_argument("--cache-dir")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget-sec", type=float)
    common.add_argument("--max-faces", type=int, default=DEFAULT_MAX_FACES)

    parser = argparse.ArgumentParser(prog="deljoin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    constructions = sorted(CONSTRUCTIONS)
    sp = sub.add_parser("poset", parents=[common], help="build a poset and print it")
    sp.add_argument("construction", choices=constructions, nargs="?", default="bnk")
    sp.add_argument("--file", help="read a poset in JSON form instead")
    sp.add_argument("--part", choices=["whole", "nobottom", "proper"], default="whole")
    sp.add_argument("--list", action="store_true", help="list the elements")
    sp.set_defaults(func=cmd_poset)

    sh = sub.add_parser("homology", parents=[common], help="reduced homology of an order complex")
    sh.add_argument("construction", choices=constructions, nargs="?", default="bnk")
    sh.add_argument("--file")
    sh.add_argument("--part", choices=["whole", "nobottom", "proper"], default="nobottom")
    sh.set_defaults(func=cmd_homology)

    sb = sub.add_parser("bnk", parents=[common], help="compare B_{n,k} with the predicted homology")
    sb.set_defaults(func=cmd_bnk)

    sd = sub.add_parser("delta", parents=[common], help="the complexes Delta_n and Delta_n(O,E,t)")
    sd.add_argument("action", choices=["build", "shape", "verify-dnt", "verify-main"])
    sd.add_argument("--nmax", type=int)
    sd.add_argument("--O", default="[]", help="strict groups as JSON, e.g. [[1,2]]")
    sd.add_argument("--E", default="[]", help="weak groups as JSON")
    sd.set_defaults(func=cmd_delta)

    sn = sub.add_parser("nakaoka", parents=[common], help="admissible sequences and U counts")
    sn.add_argument("action", choices=["table", "qp"])
    sn.add_argument("--dmax", type=int)
    sn.add_argument("--rmax", type=int)
    sn.set_defaults(func=cmd_nakaoka)

    ss = sub.add_parser("shelling", parents=[common], help="EL-labeling of B_{n,k,t}")
    ss.add_argument("action", choices=["verify"])
    ss.set_defaults(func=cmd_shelling)

    sv = sub.add_parser("verify", parents=[common], help="verification suites")
    sv.add_argument("suite", choices=["pmain", "stability", "all"])
    sv.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    sv.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"deljoin: error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimit as exc:
        print(f"deljoin: skipped: {exc}", file=sys.stderr)
        return 0


if __name__ == "__main__":
    sys.exit(main())
