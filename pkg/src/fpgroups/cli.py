"""Command-line front end.

Exit status: 0 success, 1 verification failed or inconclusive, 2 usage or
input error, 3 resource limit hit (coset overflow, state limit).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .catalog import CatalogError, DEFAULT_RUNS, FAMILIES, RECIPES, build_family, verify, verify_all
from .cosets import CosetOverflow
from .freewords import Alphabet, WordError, parse_word
from .graphs import GraphError, LabelledDigraph, StateLimitExceeded, classify_membership, raag_word_problem, rabsag_monoid_word_problem
from .presentations import PresentationError, abelianization, format_presentation, parse_presentation, tietze_simplify
from .reidschreier import subgroup_presentation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=False))
    else:
        print(text)


def _graph(path: str) -> LabelledDigraph:
    try:
        return LabelledDigraph.from_json(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from None


# --- subcommands ----------------------------------------------------------------


def cmd_present(args) -> int:
    P = build_family(args.family, *args.params)
    _emit(args, {"family": args.family, "params": args.params, "presentation": P.to_json(),
                 "text": format_presentation(P)}, format_presentation(P))
    return EXIT_OK


def cmd_subgroup(args) -> int:
    P = parse_presentation(_read(args.file))
    gens = [parse_word(g, P.alphabet) for g in args.gens]
    sp = subgroup_presentation(P, gens, max_cosets=args.max_cosets, trace=args.emit_trace is not None)
    data = sp.to_json()
    if args.emit_trace is not None:
        with open(args.emit_trace, "w") as fh:
            json.dump(data, fh, indent=2)
        data = {k: v for k, v in data.items() if k != "traces"}
        data["transcript"] = args.emit_trace
    lines = [f"index {sp.index}", "transversal " + ", ".join(str(w) for w in sp.transversal.reps)]
    lines += [f"  {k} = {v}" for k, v in sp.generator_words().items()]
    lines.append(format_presentation(sp.presentation))
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.all:
        if args.prop_id is not None:
            raise UsageError("verify --all takes no recipe id")
        reports = verify_all(max_cosets=args.max_cosets, budget=args.budget, workers=args.workers)
    else:
        if args.prop_id is None:
            raise UsageError(f"verify needs a recipe id ({', '.join(RECIPES)}) or --all")
        reports = [verify(args.prop_id, *args.params, max_cosets=args.max_cosets, budget=args.budget,
                          trace_path=args.emit_trace)]
    if args.json:
        data = [r.to_json() for r in reports]
        print(json.dumps(data if args.all else data[0], indent=2))
    else:
        print("\n".join(r.summary() for r in reports))
    if any("overflow" in e for r in reports for e in r.errors):
        return EXIT_LIMIT
    return EXIT_OK if all(r.verdict == "verified" for r in reports) else EXIT_FAIL


def cmd_classify(args) -> int:
    G = _graph(args.graph)
    rep = classify_membership(G)
    lines = [f"{p.replace('_', ' ')}: {v}" for p, v in rep.verdicts().items()]
    lines += [f"  [{c.problem}] {c.verdict}: {c.reason}" for c in rep.certificates]
    _emit(args, rep.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_wordproblem(args) -> int:
    if bool(args.raag) == bool(args.monoid):
        raise UsageError("wordproblem needs exactly one of --raag or --monoid")
    if args.raag:
        path, *words = args.raag
        if len(words) != 1:
            raise UsageError("--raag takes a graph file and one word")
        G = _graph(path)
        w = parse_word(words[0], Alphabet(G.vertices))
        trivial = raag_word_problem(G, w)
        _emit(args, {"word": str(w), "trivial": trivial}, "trivial" if trivial else "nontrivial")
    else:
        path, *words = args.monoid
        if len(words) != 2:
            raise UsageError("--monoid takes a graph file and two words")
        G = _graph(path)
        A = Alphabet(G.vertices)
        u, v = (parse_word(x, A) for x in words)
        equal = rabsag_monoid_word_problem(G, u, v, max_states=args.max_states)
        _emit(args, {"u": str(u), "v": str(v), "equal": equal}, "equal" if equal else "not equal")
    return EXIT_OK


def cmd_abelianize(args) -> int:
    P = parse_presentation(_read(args.file))
    inv = abelianization(P)
    _emit(args, inv.to_json(), str(inv))
    return EXIT_OK


def cmd_simplify(args) -> int:
    P = parse_presentation(_read(args.file))
    res = tietze_simplify(P, budget=args.budget)
    data = {
        "before": P.to_json(),
        "after": res.presentation.to_json(),
        "text": format_presentation(res.presentation),
        "steps": [s.to_json() for s in res.steps],
        "exhausted": res.exhausted,
        "invariants_ok": res.invariants_ok,
    }
    text = format_presentation(res.presentation)
    if args.verbose:
        text = "\n".join([f"{s.kind}: {s.detail}" for s in res.steps] + [text])
    _emit(args, data, text)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max-cosets", type=int, default=100000, metavar="N")
    common.add_argument("--budget", type=int, default=10000, metavar="N", help="Tietze move budget")
    common.add_argument("--emit-trace", metavar="PATH", help="write the rewriting transcript as JSON")

    p = argparse.ArgumentParser(prog="fpgroups", description="Finite-index subgroups of one-relator groups and RABSAG membership criteria.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("present", parents=[common], help="print a named family's presentation")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("params", nargs="*", type=int)
    s.set_defaults(func=cmd_present)

    s = sub.add_parser("subgroup", parents=[common], help="Reidemeister-Schreier presentation of a subgroup")
    s.add_argument("file", help="presentation file, or - for stdin")
    s.add_argument("--gens", nargs="+", required=True, metavar="WORD")
    s.set_defaults(func=cmd_subgroup)

    s = sub.add_parser("verify", parents=[common], help="run a subgroup recipe end to end")
    s.add_argument("prop_id", nargs="?", type=str.upper, choices=list(RECIPES))
    s.add_argument("params", nargs="*", type=int)
    s.add_argument("--all", action="store_true", help=f"run all {len(DEFAULT_RUNS)} default parameter sets")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("classify-graph", parents=[common], help="membership-problem verdicts for B(graph)")
    s.add_argument("graph")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("wordproblem", parents=[common], help="RAAG word problem or RABSAG monoid equality")
    s.add_argument("--raag", nargs="+", metavar="ARG", help="GRAPH WORD")
    s.add_argument("--monoid", nargs="+", metavar="ARG", help="GRAPH U V")
    s.add_argument("--max-states", type=int, default=10 ** 6)
    s.set_defaults(func=cmd_wordproblem)

    s = sub.add_parser("abelianize", parents=[common], help="abelian invariants")
    s.add_argument("file")
    s.set_defaults(func=cmd_abelianize)

    s = sub.add_parser("simplify", parents=[common], help="greedy Tietze simplification")
    s.add_argument("file")
    s.add_argument("-v", "--verbose", action="store_true", help="list the moves")
    s.set_defaults(func=cmd_simplify)
    return p


def _fail(args, code: int, kind: str, msg: str) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"error": kind, "message": msg}), file=sys.stderr)
    else:
        print(f"fpgroups: {kind}: {msg}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CosetOverflow, StateLimitExceeded) as exc:
        return _fail(args, EXIT_LIMIT, "limit", str(exc))
    except (UsageError, CatalogError, GraphError, PresentationError, WordError, ValueError) as exc:
        return _fail(args, EXIT_USAGE, "usage", str(exc))


if __name__ == "__main__":
    sys.exit(main())
