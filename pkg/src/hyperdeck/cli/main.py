"""``hyperdeck`` command line.

Exit codes: 0 success / no collisions, 1 collisions found, 2 usage or
validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .. import __version__
from ..canon import DEFAULT_CAP, canonical_code, enumerate_hypergraphs, load_persistent_cache, save_persistent_cache
from ..errors import HyperdeckError, ValidationError
from ..feynman import (
    DECOMPOSITIONS,
    RULES,
    FeynmanRule,
    check_coherence,
    check_monoidality,
    coherence_sides,
    custom_degrees,
    evaluate_Z,
    resolve_decomposition,
    resolve_rule,
)
from ..reconstruction import CollisionReport, ContextKind, default_jobs, verify_class
from ..symcontext import order_of, parse_cutoffs, truncate
from .documents import HypergraphDocument, document_of, dumps, load, read_graph6

EXIT_OK, EXIT_COLLISIONS, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_lines(lines: Sequence[str], out: str | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    simple = args.simple or args.max_multiplicity == 1
    mult = 1 if args.simple else args.max_multiplicity
    docs = [dumps(document_of(G)) for G in enumerate_hypergraphs(args.n, args.max_arity, mult, simple, cap=args.cap)]
    _write_lines(docs, args.out)
    summary = {"command": "enumerate", "n": args.n, "max_arity": args.max_arity,
               "max_multiplicity": mult, "count": len(docs)}
    print(json.dumps(summary, sort_keys=True), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def report_dict(report: CollisionReport) -> dict:
    groups = []
    for g in report.groups:
        groups.append({
            "digest": g.digest,
            "codes": g.codes,
            "witnesses": [document_of(m).to_dict() for m in g.members],
        })
    return {
        "command": "verify",
        "parameters": {"kind": report.kind, "class": report.class_spec, "n": report.n, "jobs": report.jobs},
        "class_size": report.class_size,
        "collision_groups": groups,
        "timings": {k: round(v, 6) for k, v in report.timings.items()},
        "version": __version__,
    }


def cmd_verify(args) -> int:
    report = verify_class(args.kind, args.class_spec, args.n, jobs=args.jobs or default_jobs(), cap=args.cap)
    body = json.dumps(report_dict(report), sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(body + "\n")
    print(f"{report.kind} {report.class_spec} n={report.n}: class size {report.class_size}, "
          f"{report.collision_count} collision group(s)")
    if not args.out:
        print(body)
    return EXIT_OK if report.collision_free else EXIT_COLLISIONS


def _rule_for(args, doc: HypergraphDocument) -> FeynmanRule:
    rule = resolve_rule(args.rules)
    if args.degrees:
        tables = json.loads(Path(args.degrees).read_text())
        edges = {int(j): v for j, v in (tables.get("edges") or {}).items()}
        custom = custom_degrees(doc.base, tables["vertex"], edges)
        rule = FeynmanRule("custom", rule.symbols, custom)
    return rule


def _decomposition_for(args, doc: HypergraphDocument):
    if args.decomposition:
        return args.decomposition
    if doc.decomposition is not None:
        return doc.decomposition
    return "feynman" if doc.feynman is not None else "internal"


def cmd_feynman(args) -> int:
    doc = load(args.input)
    rule = _rule_for(args, doc)
    d = _decomposition_for(args, doc)
    S = doc.graph
    auto = not args.strict_labels
    if args.action == "eval":
        z = evaluate_Z(S, d, rule, auto_label=auto)
        if args.truncate:
            z = truncate(z, parse_cutoffs(args.truncate))
        if z is None:
            print("0")
            print("truncated: grade exceeds a cutoff", file=sys.stderr)
            return EXIT_OK
        print(z.render())
        if args.summary:
            print(json.dumps({"order": order_of(z), "primal_rank": z.primal_rank,
                              "dual_rank": z.dual_rank, "grade": dict(z.grade.exponents)}, sort_keys=True))
        return EXIT_OK
    if args.action == "coherence":
        system = resolve_decomposition(S, d)
        tables = rule.degree_tables(S, system)
        edge_side, vertex_side = coherence_sides(S, system, tables)
        ok = check_coherence(S, system, tables)
        print(json.dumps({"coherent": ok, "edge_side": edge_side, "vertex_side": vertex_side}, sort_keys=True))
        return EXIT_OK if ok else EXIT_COLLISIONS
    other = load(args.other).graph if args.other else S
    if not isinstance(d, str) and args.other:
        raise ValidationError("monoidality with two documents needs a named --decomposition")
    witness = check_monoidality(S, other, d if isinstance(d, str) else (lambda _: d), rule, auto_label=auto)
    print(json.dumps({"monoidal": witness is not None, "witness": list(witness) if witness is not None else None}))
    return EXIT_OK if witness is not None else EXIT_COLLISIONS


def cmd_import_graph6(args) -> int:
    with open(args.input, "rb") as fh:
        graphs = list(read_graph6(fh))
    _write_lines([dumps(document_of(G)) for G in graphs], args.out)
    distinct = len({canonical_code(G) for G in graphs})
    print(json.dumps({"command": "import-graph6", "count": len(graphs), "distinct": distinct}, sort_keys=True),
          file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperdeck", description="Decks, reconstruction checks and symbolic Feynman functors.")
    p.add_argument("--version", action="version", version=f"hyperdeck {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="list hypergraphs up to isomorphism")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--max-arity", type=int, default=2)
    e.add_argument("--max-multiplicity", type=int, default=1)
    e.add_argument("--simple", action="store_true", help="simple graphs only")
    e.add_argument("--cap", type=int, default=DEFAULT_CAP)
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="exhaustive deck collision search")
    v.add_argument("--kind", choices=[k.value for k in ContextKind], required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--class", dest="class_spec", default="simple",
                   help="simple | multi:m=2 | hyper:a=3 | structured:m=2[,k=,j=,a=,mult=] | feynman:g=1")
    v.add_argument("--jobs", type=int, default=0, help="worker processes (default: all cores)")
    v.add_argument("--cap", type=int, default=DEFAULT_CAP)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("feynman", help="evaluate Z or check its properties")
    f.add_argument("action", choices=["eval", "coherence", "monoidality"])
    f.add_argument("--input", required=True)
    f.add_argument("--other", help="second document for monoidality")
    f.add_argument("--rules", default="classic", choices=sorted(RULES))
    f.add_argument("--degrees", help="JSON file with custom degree tables {vertex, edges}")
    f.add_argument("--decomposition", choices=sorted(DECOMPOSITIONS))
    f.add_argument("--truncate", help="cutoffs such as t=2,o=1,hbar=0")
    f.add_argument("--strict-labels", action="store_true", help="fail on unlabeled input")
    f.add_argument("--summary", action="store_true", help="also print order, ranks and grade")
    f.set_defaults(func=cmd_feynman)

    g = sub.add_parser("import-graph6", help="convert graph6 lines to documents")
    g.add_argument("--in", dest="input", required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_import_graph6)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    load_persistent_cache()
    try:
        code = args.func(args)
    except (HyperdeckError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    save_persistent_cache()
    return code


if __name__ == "__main__":
    sys.exit(main())
