"""``eulergibbs`` command line: counting, sampling and verification with JSON manifests.

Every subcommand prints one RunManifest JSON object to standard output.
Exit status 0 means success, 1 invalid input (with a witness or a line and
column in the payload), 2 a failed verification suite.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from .arborescence import count_in_arborescences
from .digraph import Digraph, LazyDigraph, classify_eulerian, infer_sink, ladder_family
from .errors import (
    CapExceeded,
    EulerGibbsError,
    GraphFormatError,
    NotEulerianInput,
    RootUnreachable,
    StackExhausted,
)
from .euler import (
    count_eulerian_paths,
    decode_path,
    enumerate_eulerian_paths,
    sample_eulerian_batch,
    sample_gibbs_prefix,
    sample_gibbs_prefix_batch,
)
from .graphio import parse_counts, parse_graph, parse_sequence, parse_token
from .pex import condition_on_counts_batch, digraph_from_counts, transition_counts
from .rng import make_rng
from .verify import SUITES, run_suite
from .walks import estimate_return_probability
from .wilson import decode_arborescence, wilson_finite_batch

SCHEMA_VERSION = 1


class InputError(Exception):
    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _seed(text):
    s = int(text)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return s


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _family(text):
    name, _, rest = text.partition(":")
    try:
        p, q = (int(x) for x in rest.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected ladder:P,Q") from None
    if name != "ladder" or p < 1 or q < 0:
        raise argparse.ArgumentTypeError("expected ladder:P,Q with P >= 1, Q >= 0")
    return p, q


def build_parser():
    ap = _Parser(prog="eulergibbs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_, graph=False, seed=False, samples=False):
        p = sub.add_parser(name, help=help_)
        if graph:
            p.add_argument("--graph", required=True, help="graph file")
        if seed:
            p.add_argument("--seed", type=_seed, default=0)
        if samples:
            p.add_argument("--samples", type=_positive, default=1)
        return p

    cmd("count-euler", "number of Eulerian paths (BEST formula)", graph=True)
    p = cmd("enum-euler", "list every Eulerian path", graph=True)
    p.add_argument("--cap", type=_positive, default=10**6)
    cmd("sample-euler", "uniform Eulerian paths", graph=True, seed=True, samples=True)
    p = cmd("sample-arb", "uniform spanning in-arborescences", graph=True, seed=True,
            samples=True)
    p.add_argument("--root", required=True)
    p = cmd("count-arb", "number of spanning in-arborescences", graph=True)
    p.add_argument("--root", required=True)
    p = cmd("gibbs-prefix", "first k steps of the infinite Eulerian path sampler", seed=True,
            samples=True)
    p.add_argument("--family", type=_family, required=True, help="ladder:P,Q")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--horizon", type=_positive, default=10**4)
    p = cmd("condition", "sample sequences given start and transition counts", seed=True,
            samples=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--counts", help="counts file")
    src.add_argument("--sequence", help="sequence file; its counts are used")
    p = cmd("verify", "run an invariant suite", seed=True)
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.add_argument("--samples", type=_positive, default=None)
    p = cmd("return-prob", "Monte Carlo return probability to the source", seed=True)
    p.add_argument("--family", type=_family, required=True, help="ladder:P,Q")
    p.add_argument("--samples", type=_positive, default=10**5)
    p.add_argument("--horizon", type=_positive, default=10**4)
    return ap


# ------------------------------------------------------------------ commands


def _read(path, files, role):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    files[role] = hashlib.sha256(data).hexdigest()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not UTF-8: {exc.reason}") from None


def _finite_graph(args, files) -> Digraph:
    g = parse_graph(_read(args.graph, files, "graph"))
    if isinstance(g, LazyDigraph):
        raise InputError("this command needs a finite graph, not a family")
    return g


def _vertex(g, text):
    v = parse_token(text)
    if v not in g.vertices:
        raise InputError(f"vertex {text!r} is not in the graph")
    return v


def _count_euler(args, files):
    g = _finite_graph(args, files)
    cls = classify_eulerian(g)
    return {"count": str(count_eulerian_paths(g)), "kind": cls.kind.value,
            "source": g.source, "sink": infer_sink(g)}


def _enum_euler(args, files):
    g = _finite_graph(args, files)
    paths = enumerate_eulerian_paths(g, cap=args.cap)
    return {"count": str(len(paths)), "paths": [p.to_json() for p in paths]}


def _sample_euler(args, files):
    g = _finite_graph(args, files)
    rows = sample_eulerian_batch(g, args.samples, random_state=args.seed)
    cg = g.compiled
    return {"samples": [decode_path(g, g.source, r, cg).to_json() for r in rows]}


def _sample_arb(args, files):
    g = _finite_graph(args, files)
    z = _vertex(g, args.root)
    rows = wilson_finite_batch(g, z, args.samples, random_state=args.seed)
    return {"root": z,
            "samples": [sorted(decode_arborescence(g, r), key=str) for r in rows]}


def _count_arb(args, files):
    g = _finite_graph(args, files)
    z = _vertex(g, args.root)
    return {"root": z, "count": str(count_in_arborescences(g, z))}


def _gibbs_prefix(args, files):
    g = ladder_family(*args.family)
    if args.samples == 1:
        try:
            s = sample_gibbs_prefix(g, args.k, args.horizon, make_rng(args.seed))
        except StackExhausted as exc:
            return {**exc.sample.to_json(), "stack_exhausted": True}
        return {**s.to_json(), "stack_exhausted": False}
    b = sample_gibbs_prefix_batch(g, args.k, args.horizon, args.samples, random_state=args.seed)
    out = []
    for i in range(len(b)):
        out.append({"path": b.path(i).to_json(), "truncated": bool(b.tainted[i]),
                    "stack_exhausted": bool(b.exhausted[i]),
                    "truncated_stacks": int(b.truncated_stacks[i])})
    return {"horizon": args.horizon, "samples": out,
            "tainted_fraction": float(b.tainted.mean())}


def _condition(args, files):
    if args.counts:
        c = parse_counts(_read(args.counts, files, "counts"))
    else:
        c = transition_counts(parse_sequence(_read(args.sequence, files, "sequence")))
    cg = digraph_from_counts(c)
    seqs = condition_on_counts_batch(c, args.samples, random_state=args.seed)
    return {"start": c.start, "end": cg.end, "states": cg.states,
            "samples": [list(s) for s in seqs]}


def _verify(args, files):
    rep = run_suite(args.suite, args.seed, args.samples)
    return rep.to_json()


def _return_prob(args, files):
    g = ladder_family(*args.family)
    est = estimate_return_probability(g, g.source, args.samples, args.horizon, args.seed)
    return est.to_json()


COMMANDS = {
    "count-euler": _count_euler,
    "enum-euler": _enum_euler,
    "sample-euler": _sample_euler,
    "sample-arb": _sample_arb,
    "count-arb": _count_arb,
    "gibbs-prefix": _gibbs_prefix,
    "condition": _condition,
    "verify": _verify,
    "return-prob": _return_prob,
}


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def manifest(command, seed, files, outputs) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "seed": seed,
           "inputs": {k: {"sha256": v} for k, v in files.items()}, "outputs": outputs}
    return json.dumps(doc, sort_keys=True, default=_jsonable)


def _error_payload(exc):
    out = {"error": str(exc), "error_type": type(exc).__name__}
    if isinstance(exc, GraphFormatError):
        out.update(line=exc.line, column=exc.column)
    if isinstance(exc, NotEulerianInput) and exc.witness is not None:
        w = exc.witness
        out["witness"] = {"vertex": w.vertex, "in_degree": w.in_degree,
                          "out_degree": w.out_degree}
    if isinstance(exc, RootUnreachable):
        out["witness"] = {"vertex": exc.vertex}
    if isinstance(exc, InputError):
        out.update(exc.details)
    return out


def run_cli(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    command, seed, files = (argv[0] if argv else None), None, {}
    try:
        args = build_parser().parse_args(argv)
        command, seed = args.command, getattr(args, "seed", None)
        outputs = COMMANDS[command](args, files)
        code = 0
        if command == "verify" and not outputs["passed"]:
            code = 2
    except (InputError, CapExceeded, EulerGibbsError, ValueError) as exc:
        outputs, code = _error_payload(exc), 1
        print(f"eulergibbs: error: {exc}", file=sys.stderr)
    print(manifest(command, seed, files, outputs), file=stdout)
    return code


def main():
    sys.exit(run_cli())
