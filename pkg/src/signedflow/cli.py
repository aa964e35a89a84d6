"""Command-line interface.

Exit codes: 0 success, 1 negative result, 2 input error, 3 budget exhausted,
4 internal invariant failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import certificates as certs
from .construct import build_11flow
from .core import (
    bridges,
    format_graph,
    is_balanced,
    is_connected,
    negativeness,
    read_graph,
)
from .errors import (
    AuditFailure,
    BudgetExceeded,
    FormatError,
    InvariantViolation,
    NotFlowAdmissible,
    PreconditionError,
    SizeLimitError,
)
from .flows import GroupSpec
from .generators import corpus_enumerate, corpus_manifest, fig1_family, named, random_signed, NAMED
from .search import Constraints, admissibility, find_nzf, find_nzw, min_flow_number
from .shrubbery import is_shrubbery

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET, EXIT_BUG = 0, 1, 2, 3, 4


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_check(args) -> int:
    g = read_graph(args.graph)
    ok, why = admissibility(g)
    print(f"vertices: {g.n}")
    print(f"edges: {g.m}")
    print(f"connected: {_yn(is_connected(g))}")
    print(f"balanced: {_yn(is_balanced(g))}")
    print(f"negativeness: {negativeness(g)}")
    print(f"bridges: {' '.join(map(str, sorted(bridges(g)))) or '-'}")
    print(f"admissible: {_yn(ok)}" + (f" ({why})" if why else ""))
    return EXIT_OK if ok else EXIT_NO


def _parse_prescribe(items, group: GroupSpec) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise FormatError(f"--prescribe expects e=value, got {item!r}")
        e, val = item.split("=", 1)
        out[int(e)] = group.parse_value(val)
    return out


def _parse_forbid(items, m: int) -> dict:
    out: dict[int, set[int]] = {}
    for item in items or ():
        if ":" in item:
            e, t = item.split(":", 1)
            out.setdefault(int(e), set()).add(int(t))
        else:
            for e in range(m):
                out.setdefault(e, set()).add(int(item))
    return out


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    g = read_graph(args.graph)
    group = GroupSpec.parse(args.group)
    c = Constraints(
        prescribed=_parse_prescribe(args.prescribe, group),
        forbidden_abs=_parse_forbid(args.forbid_abs, g.m),
        balanced=args.balanced,
    )
    f = find_nzf(g, group, c, budget=args.max_nodes)
    if f is None:
        print("no flow exists under these constraints", file=sys.stderr)
        return EXIT_NO
    claim = "balanced-nzf" if args.balanced else "nzf"
    cert = certs.make_certificate(g, f, claim)
    _emit(certs.format_certificate(cert), args.output)
    return EXIT_OK


def _build_one(g, outdir, label: str) -> int:
    try:
        trace = build_11flow(g)
    except NotFlowAdmissible as exc:
        print(f"{label}: not flow-admissible ({exc})")
        return EXIT_NO
    except AuditFailure as exc:
        print(f"{label}: AUDIT FAILURE {exc}")
        return EXIT_BUG
    if outdir is not None:
        certs.write_bundle(outdir, trace)
    print(f"{label}: f = {' '.join(map(str, trace.f))}")
    sys.stdout.write(certs.format_audit(trace))
    return EXIT_OK


def cmd_build11(args) -> int:
    if args.corpus:
        v, e = args.corpus
        total = failures = skipped = 0
        for g in corpus_enumerate(v, e):
            total += 1
            if not admissibility(g)[0]:
                skipped += 1
                continue
            try:
                build_11flow(g)
            except AuditFailure as exc:
                failures += 1
                print(f"AUDIT FAILURE on {format_graph(g)!r}: {exc}")
        print(f"corpus graphs: {total}; inadmissible: {skipped}; audit failures: {failures}")
        return EXIT_BUG if failures else EXIT_OK
    if not args.graphs:
        raise FormatError("give at least one graph file or --corpus V E")
    worst = EXIT_OK
    for i, path in enumerate(args.graphs):
        g = read_graph(path)
        outdir = None
        if args.output:
            outdir = Path(args.output) if len(args.graphs) == 1 else Path(args.output) / Path(path).stem
        worst = max(worst, _build_one(g, outdir, str(path)))
    return worst


def cmd_verify(args) -> int:
    g = read_graph(args.graph)
    target = Path(args.certificate)
    if target.is_dir():
        ok, lines = certs.check_bundle(g, target)
        for line in lines:
            print(line)
    else:
        ok, msg = certs.check_certificate(g, certs.read_certificate(target))
        print(msg)
    print("VALID" if ok else "INVALID")
    return EXIT_OK if ok else EXIT_NO


def cmd_flownum(args) -> int:
    g = read_graph(args.graph)
    k = min_flow_number(g, args.max_k, budget=args.max_nodes)
    if k is None:
        print(f"no k-NZF for k <= {args.max_k}")
        return EXIT_NO
    print(k)
    return EXIT_OK


def cmd_shrubbery(args) -> int:
    g = read_graph(args.graph)
    ok, witness = is_shrubbery(g)
    if ok:
        print("shrubbery: yes")
        return EXIT_OK
    axiom, detail = witness
    print(f"shrubbery: no ({axiom} fails: {detail})")
    return EXIT_NO


def cmd_nzw(args) -> int:
    g = read_graph(args.graph)
    f = find_nzw(g, sign=args.sign, budget=args.max_nodes)
    if f is None:
        print("no nowhere-zero watering exists", file=sys.stderr)
        return EXIT_NO
    _emit(certs.format_certificate(certs.make_certificate(g, f, "nzw")), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "fig1":
        _emit(format_graph(fig1_family(args.internal), f"cubic caterpillar, {args.internal} internal vertices"), args.output)
    elif args.family == "named":
        _emit(format_graph(named(args.name), args.name), args.output)
    elif args.family == "random":
        if args.seed is None:
            raise FormatError("random graphs require an explicit --seed")
        g = random_signed(args.n, args.m, args.p_negative, args.seed)
        _emit(format_graph(g, f"random n={args.n} m={args.m} p={args.p_negative} seed={args.seed}"), args.output)
    elif args.family == "corpus":
        if args.manifest:
            _emit(corpus_manifest(args.max_vertices, args.max_edges), args.output)
        else:
            if not args.output:
                raise FormatError("corpus emission needs -o DIRECTORY (or --manifest)")
            d = Path(args.output)
            d.mkdir(parents=True, exist_ok=True)
            for i, g in enumerate(corpus_enumerate(args.max_vertices, args.max_edges)):
                (d / f"g{i:06d}.txt").write_text(format_graph(g))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="signedflow", description="Nowhere-zero flows on signed graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="structural report and flow-admissibility verdict")
    s.add_argument("graph")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="exhaustive search for a nowhere-zero flow")
    s.add_argument("graph")
    s.add_argument("--group", required=True, help="int:K, mod:K or z2z3")
    s.add_argument("--balanced", action="store_true", help="require a balanced Z2xZ3 flow")
    s.add_argument("--prescribe", action="append", metavar="E=V", help="fix the value of edge E")
    s.add_argument("--forbid-abs", action="append", metavar="[E:]T", help="forbid |f| = T (on edge E only)")
    s.add_argument("--max-nodes", type=int, default=None, help="search budget")
    s.add_argument("-o", "--output", help="certificate path (default stdout)")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("build11", help="construct a nowhere-zero 11-flow with audit")
    s.add_argument("graphs", nargs="*")
    s.add_argument("--corpus", nargs=2, type=int, metavar=("V", "E"), help="batch over the enumerated corpus")
    s.add_argument("-o", "--output", help="bundle directory")
    s.set_defaults(func=cmd_build11)

    s = sub.add_parser("verify", help="re-verify a certificate file or bundle directory")
    s.add_argument("graph")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("flownum", help="smallest k with a k-NZF")
    s.add_argument("graph")
    s.add_argument("--max-k", type=int, default=11)
    s.add_argument("--max-nodes", type=int, default=None)
    s.set_defaults(func=cmd_flownum)

    s = sub.add_parser("shrubbery", help="check the shrubbery axioms")
    s.add_argument("graph")
    s.set_defaults(func=cmd_shrubbery)

    s = sub.add_parser("nzw", help="search for a nowhere-zero watering")
    s.add_argument("graph")
    s.add_argument("--sign", type=int, choices=(1, -1), default=None)
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_nzw)

    s = sub.add_parser("gen", help="emit generated graphs")
    s.add_argument("family", choices=("fig1", "named", "random", "corpus"))
    s.add_argument("--internal", type=int, default=1, help="fig1: internal vertices of the cubic tree")
    s.add_argument("--name", choices=NAMED, default="triangle")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--p-negative", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--max-vertices", type=int, default=4)
    s.add_argument("--max-edges", type=int, default=6)
    s.add_argument("--manifest", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_BUG
    except (PreconditionError, SizeLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
