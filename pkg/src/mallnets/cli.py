"""Command-line front end.

Exit status: 0 when the input is correct or the command succeeded, 1 when a
check fails, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bipolarizer import inference_schemes, make_scheme, parse_program, universal_program
from .errors import EngineError, MallError, NotCorrect
from .formulas import parse_formula, to_text
from .proofnet import first_counterexample, net_to_text, parse_net, to_dot, validate_bps
from .sequent import check_proof, parse_proof, proof_to_text
from .engine import Schedule, desequentialize, sequentialize, simulate

OK, FAILED, USAGE = 0, 1, 2
FORMATS = ("text", "dot", "json-lines")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _program(args):
    if not args.program:
        raise UsageError(f"{args.verb} needs --program")
    return parse_program(_read(args.program))


def _formulas(text: str):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_formula(line))
    if not out:
        raise UsageError("no formula in input")
    return out


def _emit_net(p, fmt, out, highlight=()):
    if fmt == "dot":
        out.write(to_dot(p, highlight))
    elif fmt == "json-lines":
        for line in net_to_text(p).splitlines():
            kw, _, rest = line.partition(" ")
            out.write(json.dumps({"kind": kw, "value": rest}) + "\n")
    else:
        out.write(net_to_text(p))


# -- verbs ------------------------------------------------------------------

def cmd_bipolarize(args, out):
    formulas = _formulas(_read(args.input))
    scheme = make_scheme(formulas)
    seen, program = set(), []
    for f in formulas:
        for b in universal_program(f, scheme):
            if b.head not in seen:
                seen.add(b.head)
                program.append(b)
    for b in program:
        if args.format == "json-lines":
            row = {"head": b.head, "clause": to_text(b.clause)}
            if args.schemes:
                row["schemes"] = [str(s) for s in inference_schemes(b)]
            out.write(json.dumps(row) + "\n")
            continue
        out.write(f"{b}\n")
        if args.schemes:
            for s in inference_schemes(b):
                out.write(f"  {s}\n")
    return OK


def cmd_check_proof(args, out):
    program = _program(args)
    proof = parse_proof(_read(args.input), program)
    report = check_proof(proof, program)
    if report:
        out.write(f"ok {proof.conclusion} nodes={proof.size()}\n")
        return OK
    for err in report.errors:
        out.write(f"error {err}\n")
    return FAILED


def cmd_check_net(args, out):
    p = parse_net(_read(args.input))
    report = validate_bps(p)
    if not report:
        for v in report.violations:
            out.write(f"violation {v}\n")
        return FAILED
    found = first_counterexample(p)
    if found is None:
        out.write(" ".join(["ok proof net, conclusion"] + [p.label(q) for q in p.conclusion]) + "\n")
        return OK
    s, trip = found
    out.write(f"loop {trip}\n")
    out.write(f"slice {','.join(sorted(s.chosen.values()))}\n")
    return FAILED


def cmd_deseq(args, out):
    program = _program(args)
    proof = parse_proof(_read(args.input), program)
    report = check_proof(proof, program)
    if not report:
        for err in report.errors:
            sys.stderr.write(f"error {err}\n")
        return FAILED
    _emit_net(desequentialize(proof, program), args.format, out)
    return OK


def cmd_seq(args, out):
    program = _program(args) if args.program else None
    p = parse_net(_read(args.input))
    try:
        proof = sequentialize(p, program)
    except NotCorrect as exc:
        sys.stderr.write(f"{exc}\n")
        return FAILED
    out.write(proof_to_text(proof))
    return OK


def cmd_simulate(args, out):
    program = _program(args)
    if not args.goal:
        raise UsageError("simulate needs --goal")
    goal = [a for a in args.goal.replace(",", " ").split() if a]
    trace = simulate(program, goal, Schedule(args.seed, args.policy), args.max_steps,
                     validate=args.validate)
    if args.format == "json-lines":
        out.write(trace.to_json_lines())
    elif args.format == "dot":
        out.write(to_dot(trace.final))
    else:
        out.write(trace.to_text())
    sys.stderr.write(f"outcome={trace.outcome} steps={trace.steps} commits={trace.commits} "
                     f"aborts={len(trace.aborts)}\n")
    return OK


def cmd_export_dot(args, out):
    p = parse_net(_read(args.input))
    found = first_counterexample(p) if validate_bps(p) else None
    out.write(to_dot(p, found[1].links if found else ()))
    return OK


VERBS = {
    "bipolarize": (cmd_bipolarize, "print the universal program of the formulas in a .mall file"),
    "check-proof": (cmd_check_proof, "check a .bsp sequent proof against a program"),
    "check-net": (cmd_check_net, "check a .net structure; print a loop if it is incorrect"),
    "deseq": (cmd_deseq, "turn a .bsp proof into a proof net"),
    "seq": (cmd_seq, "turn a .net proof net into a sequent proof"),
    "simulate": (cmd_simulate, "run concurrent construction and print the trace"),
    "export-dot": (cmd_export_dot, "write a .net structure as Graphviz source"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mallnets", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    for verb, (_, help_text) in VERBS.items():
        sp = sub.add_parser(verb, help=help_text, description=help_text)
        if verb != "simulate":
            sp.add_argument("input", help="input file")
        sp.add_argument("--program", help=".bpl program file")
        sp.add_argument("--format", choices=FORMATS, default="text")
        if verb == "bipolarize":
            sp.add_argument("--schemes", action="store_true",
                            help="also print the inference schemes of each bipole")
        if verb == "simulate":
            sp.add_argument("--goal", help="conclusion atoms, comma or space separated")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--max-steps", type=int, default=1000)
            sp.add_argument("--policy", choices=("round-robin", "random"), default="round-robin")
            sp.add_argument("--validate", choices=("local", "full", "both"), default="local")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return VERBS[args.verb][0](args, out)
    except UsageError as exc:
        sys.stderr.write(f"mallnets: {exc}\n")
        return USAGE
    except (NotCorrect, EngineError) as exc:
        sys.stderr.write(f"mallnets: {exc}\n")
        return FAILED
    except MallError as exc:
        sys.stderr.write(f"mallnets: {exc}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
