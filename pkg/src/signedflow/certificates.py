"""Flow certificates: a graph hash, an orientation, edge values and a claim.

Text format, one directive per line (``#`` starts a comment)::

    graph <sha256 of the canonical graph string>
    group int 11 | mod 3 | z2z3
    orientation default | explicit
    t <edge> <+|-> <+|->        # only for explicit orientations
    f <edge> <value>            # z2z3 values as a,b
    claim nzf | flow | balanced-nzf | nzw
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .construct import PipelineTrace, audit_pipeline
from .core import SignedGraph, graph_hash
from .errors import FormatError, PreconditionError
from .flows import (
    FlowAssignment,
    GroupSpec,
    Orientation,
    default_orientation,
    is_balanced_z2z3,
    is_flow,
    is_k_flow,
    is_k_nzf,
    is_nzf,
)
from .shrubbery import verify_nzw

CLAIMS = ("nzf", "flow", "balanced-nzf", "nzw")
BUNDLE_FILES = {"g1g2": "g1g2.cert", "f1": "f1.cert", "f2": "f2.cert", "f": "f.cert"}
BUNDLE_CLAIMS = {"g1g2": "balanced-nzf", "f1": "flow", "f2": "flow", "f": "nzf"}


class HashMismatch(FormatError):
    """Certificate was written for a different graph."""


@dataclass(frozen=True)
class Certificate:
    graph_hash: str
    group: GroupSpec
    orientation: Orientation | None  # None means the default orientation
    flow: FlowAssignment
    claim: str

    def tau(self, g: SignedGraph) -> Orientation:
        return default_orientation(g) if self.orientation is None else self.orientation


def make_certificate(g: SignedGraph, f: FlowAssignment, claim: str, tau: Orientation | None = None) -> Certificate:
    if claim not in CLAIMS:
        raise PreconditionError(f"unknown claim {claim!r}")
    if tau is not None and tau == default_orientation(g):
        tau = None
    return Certificate(graph_hash(g), f.group, tau, f, claim)


def _pm(x: int) -> str:
    return "+" if x > 0 else "-"


def format_certificate(cert: Certificate, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"graph {cert.graph_hash}")
    lines.append(f"group {cert.group}")
    if cert.orientation is None:
        lines.append("orientation default")
    else:
        lines.append("orientation explicit")
        lines.extend(f"t {e} {_pm(a)} {_pm(b)}" for e, (a, b) in enumerate(cert.orientation.tau))
    lines.extend(f"f {e} {cert.group.format_value(x)}" for e, x in enumerate(cert.flow))
    lines.append(f"claim {cert.claim}")
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    ghash = group = mode = claim = None
    taus: dict[int, tuple[int, int]] = {}
    values: dict[int, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "graph" and len(rest) == 1:
                ghash = rest[0]
            elif key == "group":
                group = GroupSpec.parse(" ".join(rest))
            elif key == "orientation" and rest in (["default"], ["explicit"]):
                mode = rest[0]
            elif key == "t" and len(rest) == 3 and rest[1] in ("+", "-") and rest[2] in ("+", "-"):
                taus[int(rest[0])] = (1 if rest[1] == "+" else -1, 1 if rest[2] == "+" else -1)
            elif key == "f" and len(rest) == 2:
                if group is None:
                    raise FormatError(f"line {lineno}: value before group")
                e = int(rest[0])
                if e in values:
                    raise FormatError(f"line {lineno}: duplicate value for edge {e}")
                values[e] = group.parse_value(rest[1])
            elif key == "claim" and len(rest) == 1 and rest[0] in CLAIMS:
                claim = rest[0]
            else:
                raise FormatError(f"line {lineno}: cannot parse {raw.strip()!r}")
        except (ValueError, PreconditionError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from None
    for name, val in (("graph", ghash), ("group", group), ("orientation", mode), ("claim", claim)):
        if val is None:
            raise FormatError(f"certificate lacks a '{name}' line")
    m = len(values)
    if sorted(values) != list(range(m)):
        raise FormatError("edge values must cover edges 0..m-1 exactly once")
    orientation = None
    if mode == "explicit":
        if sorted(taus) != list(range(m)):
            raise FormatError("explicit orientation must cover every edge")
        orientation = Orientation(tuple(taus[e] for e in range(m)))
    elif taus:
        raise FormatError("'t' lines require 'orientation explicit'")
    flow = FlowAssignment(group, tuple(values[e] for e in range(m)))
    return Certificate(ghash, group, orientation, flow, claim)


def check_certificate(g: SignedGraph, cert: Certificate) -> tuple[bool, str]:
    """Bit-exact check of a parsed certificate; raises HashMismatch for a foreign graph."""
    if cert.graph_hash != graph_hash(g):
        raise HashMismatch("certificate was issued for a different graph")
    if len(cert.flow) != g.m:
        return False, f"certificate has {len(cert.flow)} values for {g.m} edges"
    tau = cert.tau(g)
    try:
        tau.check(g)
    except PreconditionError as exc:
        return False, str(exc)
    grp, f = cert.group, cert.flow
    if cert.claim == "nzf":
        ok = is_k_nzf(g, tau, f, grp.k) if grp.kind == "int" else is_nzf(g, tau, f)
    elif cert.claim == "flow":
        ok = is_k_flow(g, tau, f, grp.k) if grp.kind == "int" else is_flow(g, tau, f)
    elif cert.claim == "balanced-nzf":
        ok = grp.kind == "z2z3" and is_nzf(g, tau, f) and is_balanced_z2z3(g, f)
    else:
        try:
            ok = grp.kind == "z2z3" and verify_nzw(g, f, tau)
        except PreconditionError as exc:
            return False, str(exc)
    return (True, f"valid {cert.claim} over {grp}") if ok else (False, f"claim {cert.claim} over {grp} does not hold")


def write_certificate(path, cert: Certificate, comment: str | None = None) -> None:
    Path(path).write_text(format_certificate(cert, comment))


def read_certificate(path) -> Certificate:
    return parse_certificate(Path(path).read_text())


def format_audit(trace: PipelineTrace) -> str:
    return "".join(f"{'PASS' if ok else 'FAIL'} {name}\n" for name, ok in trace.audit)


def write_bundle(directory, trace: PipelineTrace) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    flows = {"g1g2": trace.g1g2, "f1": trace.f1, "f2": trace.f2, "f": trace.f}
    for key, fname in BUNDLE_FILES.items():
        cert = make_certificate(trace.graph, flows[key], BUNDLE_CLAIMS[key], trace.orientation)
        write_certificate(d / fname, cert)
    (d / "audit.txt").write_text(format_audit(trace))


def check_bundle(g: SignedGraph, directory) -> tuple[bool, list[str]]:
    """Re-verify every stage certificate and recompute the pipeline audit from them."""
    d = Path(directory)
    certs = {}
    report = []
    ok = True
    for key, fname in BUNDLE_FILES.items():
        path = d / fname
        if not path.exists():
            raise FormatError(f"bundle is missing {fname}")
        cert = read_certificate(path)
        if cert.claim != BUNDLE_CLAIMS[key]:
            return False, [f"{fname}: expected claim {BUNDLE_CLAIMS[key]}, found {cert.claim}"]
        good, msg = check_certificate(g, cert)
        report.append(f"{'PASS' if good else 'FAIL'} {fname}: {msg}")
        ok = ok and good
        certs[key] = cert
    taus = {c.tau(g) for c in certs.values()}
    if len(taus) != 1:
        return False, report + ["FAIL stages use different orientations"]
    expected = {"g1g2": "z2z3", "f1": "int 3", "f2": "int 5", "f": "int 11"}
    for key, grp in expected.items():
        if str(certs[key].group) != grp:
            return False, report + [f"FAIL {key} is over {certs[key].group}, expected {grp}"]
    if not ok:
        return False, report
    audit = audit_pipeline(g, taus.pop(), certs["g1g2"].flow, certs["f1"].flow, certs["f2"].flow, certs["f"].flow)
    report.extend(f"{'PASS' if good else 'FAIL'} {name}" for name, good in audit)
    return all(good for _, good in audit), report
