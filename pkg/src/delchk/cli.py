"""Command line front end.

Exit codes: 0 success (an unsolvable verdict is a success), 1 usage error,
2 unreadable or invalid task file, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import analysis
from .analysis import InvariantViolation
from .export import to_dot
from .layered import protocol_model, subdivision_census
from .logic import FormulaSyntaxError, parse_formula, random_formula, truth_set
from .model import render_vertex
from .tasks import BUILTINS, TaskFileError, TaskSpecError, load_task, output_model

MODELS = ("input", "protocol", "output", "extended-output")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--task", default="eqneg",
                   help=f"builtin name ({', '.join(sorted(BUILTINS))}) or task file path")
    p.add_argument("--layers", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="delchk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="decide solvability after N layers")
    _common(p)
    p.add_argument("--method", choices=("map", "formula", "both"), default="both")

    p = sub.add_parser("eval", help="evaluate a formula at every world of a model")
    _common(p)
    p.add_argument("--formula", required=True)
    p.add_argument("--model", choices=MODELS, default="protocol")

    p = sub.add_parser("bisim", help="maximal input/output bisimulation")
    _common(p)
    p.add_argument("--trials", type=int, default=0,
                   help="random formulas checked for truth invariance (seed: DELCHK_SEED)")

    p = sub.add_parser("census", help="subdivision block sizes of the protocol model")
    _common(p)

    p = sub.add_parser("export", help="write a model as a graph")
    _common(p)
    p.add_argument("--dot", action="store_true", required=True)
    p.add_argument("--model", choices=MODELS, default="protocol")
    p.add_argument("--out")
    return parser


def _select_model(tm, name, layers):
    if name == "input":
        return tm.input
    if name == "protocol":
        return protocol_model(tm.input, layers).model
    if name == "output":
        return tm.output.model
    return tm.extended_output.model


def cmd_solve(args, spec, tm):
    results = []
    if args.method == "both":
        cc = analysis.cross_check(tm.input, spec, args.layers)
        results = [cc.by_map, cc.by_formula]
    elif args.method == "map":
        results = [analysis.solve_by_map(tm.input, tm.actions, args.layers)]
    else:
        results = [analysis.solve_by_formula(tm.input, spec, args.layers)]
    report = {
        "command": "solve",
        "task": args.task,
        "layers": args.layers,
        "results": [r.to_dict() for r in results],
        "agree": len({r.solvable for r in results}) == 1,
    }
    lines = [f"task {args.task}, {args.layers} layer(s)"]
    for r in results:
        line = f"{r.method}: {r.status} (nodes={r.nodes})"
        if r.solvable:
            line += " witness " + " ".join(f"{v}:{d}" for v, d in sorted(r.decisions.items()))
        else:
            line += f" exhausted, deepest dead end at facet {r.failing_facet}"
        lines.append(line)
    return report, lines


def cmd_eval(args, spec, tm):
    phi = parse_formula(args.formula)
    m = _select_model(tm, args.model, args.layers)
    good = truth_set(m, phi)
    failing = [f for f in range(len(m.facets)) if f not in good]
    report = {
        "command": "eval",
        "task": args.task,
        "layers": args.layers,
        "model": args.model,
        "formula": str(phi),
        "worlds": len(m.facets),
        "failing": [{"facet": f, "vertices": [render_vertex(m, v) for v in sorted(m.facets[f])]}
                    for f in failing],
    }
    lines = [f"{phi} on {args.model} model: true in {len(good)}/{len(m.facets)} worlds"]
    for item in report["failing"]:
        lines.append(f"  fails at facet {item['facet']}: {' '.join(item['vertices'])}")
    return report, lines


def cmd_bisim(args, spec, tm):
    out = tm.output
    rel = analysis.max_bisimulation(tm.input, out.model)
    pi_pairs = analysis.projection_relation(out)
    bad = analysis.check_bisimulation(pi_pairs, tm.input, out.model)
    report = {
        "command": "bisim",
        "task": args.task,
        "max_bisimulation_size": len(rel),
        "projection_pairs": len(pi_pairs),
        "projection_is_bisimulation": bad is None,
        "counterexample": None if bad is None else {
            "pair": list(bad.pair), "clause": bad.clause, "agent": bad.agent, "witness": bad.witness},
    }
    lines = [
        f"maximal bisimulation between input and output: {len(rel)} pairs",
        f"projection pairs: {len(pi_pairs)}, "
        + ("a bisimulation" if bad is None else
           f"not a bisimulation: clause ({bad.clause}) fails for pair {bad.pair}, agent {bad.agent}"),
    ]
    if args.trials:
        seed = int(os.environ.get("DELCHK_SEED", "0"))
        rng = random.Random(seed)
        universe = sorted(tm.input.atoms)
        violations = 0
        for _ in range(args.trials):
            phi = random_formula(rng, 4, universe, ops=("not", "and", "know"))
            t1, t2 = truth_set(tm.input, phi), truth_set(out.model, phi)
            violations += sum((x in t1) != (y in t2) for x, y in rel)
        if violations:
            raise InvariantViolation(f"{violations} truth-invariance violations on bisimilar pairs")
        report["trials"] = args.trials
        report["seed"] = seed
        report["truth_invariance_violations"] = violations
        lines.append(f"{args.trials} random formulas (seed {seed}): no truth-invariance violations")
    return report, lines


def cmd_census(args, spec, tm):
    c = subdivision_census(tm.input, args.layers)
    report = {
        "command": "census",
        "task": args.task,
        "layers": args.layers,
        "blocks": [{"facet": b.facet, "size": b.size, "path": b.is_path} for b in c.blocks],
        "total": c.total,
        "ok": c.ok,
        "problems": c.problems,
    }
    if not c.ok:
        raise InvariantViolation("; ".join(c.problems))
    sizes = sorted({b.size for b in c.blocks})
    lines = [f"{len(c.blocks)} blocks of size {', '.join(map(str, sizes))}, total {c.total} facets"]
    lines += [f"  input facet {b.facet}: {b.size} facets, path" for b in c.blocks]
    return report, lines


def cmd_export(args, spec, tm):
    m = _select_model(tm, args.model, args.layers)
    dot = to_dot(m, title=f"{args.task} {args.model}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dot)
        return {"command": "export", "out": args.out, "facets": len(m.facets)}, [f"wrote {args.out}"]
    return None, dot.rstrip("\n").splitlines()


COMMANDS = {"solve": cmd_solve, "eval": cmd_eval, "bisim": cmd_bisim,
            "census": cmd_census, "export": cmd_export}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    err = sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.layers < 0:
            raise UsageError("--layers must be >= 0")
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return 1
    try:
        spec = load_task(args.task)
        tm = output_model(spec)
    except (OSError, TaskFileError, TaskSpecError) as e:
        print(f"task error: {e}", file=err)
        return 2
    try:
        report, lines = COMMANDS[args.command](args, spec, tm)
    except FormulaSyntaxError as e:
        print(f"usage error: formula: {e}", file=err)
        return 1
    except InvariantViolation as e:
        print(f"internal invariant violated: {e}", file=err)
        return 3
    if args.format == "json" and report is not None:
        out.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
