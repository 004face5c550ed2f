"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 parse/validation failure, 3 inconsistent
model, 4 zero-probability condition.  With ``--json`` results go to stdout
and diagnostics to stderr, both as JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .dsl import ModelFormatError, is_graph_only, parse_graph, parse_model
from .errors import GraphError, InconsistentModel, ZeroProbabilityCondition
from .inference import conditional, joint_distribution, marginal
from .model import FunctionalCausalModel, validate_model
from .separation import SeparationQuery, d_separated, p_separated
from .solvability import classify
from .teleportation import (
    build_teleportation_graph,
    build_teleportation_model,
    success_probability,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INCONSISTENT = 3
EXIT_ZERO_CONDITION = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cfcm", description="Analyze functional causal models on directed graphs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("validate", parents=[common],
                       help="parse a model or graph document and report diagnostics")
    p.add_argument("file")

    p = sub.add_parser("prob", parents=[common],
                       help="exact joint distribution, with optional marginal/conditional")
    p.add_argument("file")
    p.add_argument("--marginal", help="comma-separated vertices to keep")
    p.add_argument("--cond", help="comma-separated fixed assignments V=x")
    p.add_argument("--float", dest="as_float", action="store_true", help="add a decimal column")

    for name in ("dsep", "psep"):
        p = sub.add_parser(name, parents=[common],
                           help=f"{name[0]}-separation query on the document's graph")
        p.add_argument("file")
        p.add_argument("--x", required=True, help="comma-separated V1")
        p.add_argument("--y", required=True, help="comma-separated V2")
        p.add_argument("--z", default="", help="comma-separated V3")

    p = sub.add_parser("solve", parents=[common], help="solution counts and solvability class")
    p.add_argument("file")

    p = sub.add_parser("telegraph", parents=[common],
                       help="build a teleportation graph and its success probability")
    p.add_argument("file")
    p.add_argument("--split", required=True, help="comma-separated split vertices")
    p.add_argument("--emit-dot", action="store_true", help="print the graph as DOT and nothing else")
    return parser


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from None


def _diagnostics_out(exc: ModelFormatError, json_mode: bool):
    if json_mode:
        payload = [
            {"line": d.line, "column": d.column, "message": d.message}
            for d in exc.diagnostics
        ]
        print(json.dumps(payload, indent=2), file=sys.stderr)
    else:
        for d in exc.diagnostics:
            print(str(d), file=sys.stderr)


def _error_out(kind: str, message: str, json_mode: bool):
    if json_mode:
        print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)


def _rat(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def _load_model(path: str, json_mode: bool) -> FunctionalCausalModel | None:
    text = _read_input(path)
    if is_graph_only(text):
        _error_out("not-a-model", f"{path} is graph-only; this command needs a full model", json_mode)
        return None
    return parse_model(text)


def _split_list(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


def _cmd_validate(args) -> int:
    text = _read_input(args.file)
    kind = "graph" if is_graph_only(text) else "model"
    try:
        if kind == "graph":
            parse_graph(text)
            issues = []
        else:
            issues = validate_model(parse_model(text))
    except ModelFormatError as exc:
        _diagnostics_out(exc, args.json)
        return EXIT_PARSE
    if issues:
        if args.json:
            print(json.dumps([{"message": issue} for issue in issues], indent=2), file=sys.stderr)
        else:
            for issue in issues:
                print(issue, file=sys.stderr)
        return EXIT_PARSE
    if args.json:
        print(json.dumps({"valid": True, "kind": kind}))
    else:
        print(f"ok ({kind})")
    return EXIT_OK


def _parse_cond(raw: str, m: FunctionalCausalModel) -> dict[str, str]:
    given: dict[str, str] = {}
    for part in _split_list(raw):
        if "=" not in part:
            raise _UsageError(f"--cond entries look like V=x, got {part!r}")
        name, _, symbol = part.partition("=")
        name, symbol = name.strip(), symbol.strip()
        if name not in m.graph:
            raise _UsageError(f"--cond: unknown vertex {name!r}")
        if symbol not in m.alphabets[name]:
            raise _UsageError(f"--cond: symbol {symbol!r} outside alphabet of {name}")
        given[name] = symbol
    return given


def _print_distribution(d, json_mode: bool, as_float: bool):
    if json_mode:
        print(json.dumps(d.to_json_dict(), indent=2))
        return
    header = ", ".join(d.variables)
    print(f"P({header})")
    for key in sorted(d.table):
        p = d.table[key]
        cells = ", ".join(f"{v}={s}" for v, s in zip(d.variables, key))
        line = f"  {cells} : {_rat(p)}"
        if as_float:
            line += f"  ({float(p):.6g})"
        print(line)


def _cmd_prob(args) -> int:
    m = _load_model(args.file, args.json)
    if m is None:
        return EXIT_PARSE
    d = joint_distribution(m)
    given = _parse_cond(args.cond, m) if args.cond else {}
    keep = _split_list(args.marginal) if args.marginal else None
    if keep is not None:
        for name in keep:
            if name not in m.graph:
                raise _UsageError(f"--marginal: unknown vertex {name!r}")
    if given:
        targets = keep if keep is not None else [v for v in d.variables if v not in given]
        d = conditional(d, targets, given)
    elif keep is not None:
        d = marginal(d, keep)
    _print_distribution(d, args.json, args.as_float)
    return EXIT_OK


def _load_graph_for_separation(path: str):
    text = _read_input(path)
    if is_graph_only(text):
        return parse_graph(text)
    return parse_model(text).graph


def _query_from_args(g, args) -> SeparationQuery:
    q = SeparationQuery.of(_split_list(args.x), _split_list(args.y), _split_list(args.z))
    try:
        q.check(g.labels)
    except GraphError as exc:
        raise _UsageError(str(exc)) from None
    return q


def _cmd_dsep(args) -> int:
    g = _load_graph_for_separation(args.file)
    q = _query_from_args(g, args)
    separated = d_separated(g, q)
    if args.json:
        print(json.dumps({"separated": separated}))
    else:
        print("separated" if separated else "connected")
    return EXIT_OK


def _cmd_psep(args) -> int:
    g = _load_graph_for_separation(args.file)
    q = _query_from_args(g, args)
    witness = p_separated(g, q)
    if args.json:
        print(json.dumps({
            "separated": witness.separated,
            "witness": list(witness.witness) if witness.witness is not None else None,
        }))
    elif witness.separated:
        shown = ", ".join(witness.witness) if witness.witness else "(empty split set)"
        print(f"separated  witness split set: {shown}")
    else:
        print("connected")
    return EXIT_OK


def _cmd_solve(args) -> int:
    m = _load_model(args.file, args.json)
    if m is None:
        return EXIT_PARSE
    report = classify(m)
    if args.json:
        print(json.dumps(report.to_json_dict(), indent=2))
    else:
        print(f"class: {report.classification}")
        print(f"average_solutions: {_rat(report.average)}")
        print(f"markov: {'true' if report.markov else 'false'}")
        for key in sorted(report.counts):
            cells = ",".join(f"{v}={s}" for v, s in zip(report.variables, key))
            print(f"  N[{cells}] = {report.counts[key]}")
    return EXIT_OK


def _cmd_telegraph(args) -> int:
    m = _load_model(args.file, args.json)
    if m is None:
        return EXIT_PARSE
    split = _split_list(args.split)
    for name in split:
        if name not in m.graph:
            raise _UsageError(f"--split: unknown vertex {name!r}")
    try:
        tg = build_teleportation_graph(m.graph, split)
    except GraphError as exc:
        raise _UsageError(str(exc)) from None
    tm = build_teleportation_model(m, tg)
    if args.emit_dot:
        sys.stdout.write(tg.to_dot())
        return EXIT_OK
    p_succ = success_probability(tm)
    taus = {v: tm.protocols[v].tau for v in tg.split}
    edges = sorted(tg.graph.edges, key=lambda e: (tg.graph.index_of(e[0]), tg.graph.index_of(e[1])))
    if args.json:
        print(json.dumps({
            "split": list(tg.split),
            "vertices": list(tg.graph.labels),
            "edges": [list(e) for e in edges],
            "tau": {v: _rat(t) for v, t in taus.items()},
            "success_probability": _rat(p_succ),
        }, indent=2))
    else:
        print(f"split: {', '.join(tg.split) or '(none)'}")
        print(f"vertices: {', '.join(tg.graph.labels)}")
        print("edges: " + ", ".join(f"{a}->{b}" for a, b in edges))
        for v, t in taus.items():
            print(f"tau[{v}] = {_rat(t)}")
        print(f"success_probability: {_rat(p_succ)}")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "prob": _cmd_prob,
    "dsep": _cmd_dsep,
    "psep": _cmd_psep,
    "solve": _cmd_solve,
    "telegraph": _cmd_telegraph,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise _UsageError("a subcommand is required (see --help)")
        threads = os.environ.get("CFCM_THREADS")
        if threads is not None:
            if not threads.isdigit() or int(threads) < 1:
                raise _UsageError(f"CFCM_THREADS must be a positive integer, got {threads!r}")
        json_mode = args.json
        try:
            return _COMMANDS[args.command](args)
        except ModelFormatError as exc:
            _diagnostics_out(exc, json_mode)
            return EXIT_PARSE
        except InconsistentModel as exc:
            _error_out("inconsistent-model", str(exc), json_mode)
            return EXIT_INCONSISTENT
        except ZeroProbabilityCondition as exc:
            _error_out("zero-probability-condition", str(exc), json_mode)
            return EXIT_ZERO_CONDITION
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
