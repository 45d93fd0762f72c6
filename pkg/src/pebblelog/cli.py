"""Command-line entry point: ``pebblelog <subcommand> ...``.

Exit codes: 0 when a verdict was computed (whatever it is), 1 when a lab
experiment deviates from its expected verdicts, 2 on bad input, 3 when a
budget is exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .canonical import canonical_eval, synthesize_canonical
from .datalog import GOAL, DatalogProgram, format_program, least_fixed_point, parse_program, width
from .errors import BudgetExceeded, PebblelogError
from .homomorphism import hom_search
from .lab import experiments
from .lab.gallery import gallery, names as gallery_names
from .logic.equivalence import equiv_q_explain
from .logic.evaluate import GUARDED, STANDARD, eval_formula
from .logic.formula import Formula
from .logic.parser import format_formula, parse_formula
from .pebble import greatest_strategy_family
from .structures import Structure, format_structure, parse_structure

EXIT_OK, EXIT_DEVIATION, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load(path: str, parser, kind: str):
    text = _read(path)
    try:
        return parser(text)
    except PebblelogError as exc:
        raise InputError(f"{path}: bad {kind}: {exc}") from None


def load_structure(path: str) -> Structure:
    return _load(path, parse_structure, "structure")


def load_program(path: str) -> DatalogProgram:
    return _load(path, parse_program, "program")


def load_formula(path: str) -> Formula:
    return _load(path, parse_formula, "formula")


class Out:
    """Writes verdict records in one of the three output modes."""

    def __init__(self, mode: str, stream):
        self.mode = mode
        self.stream = stream

    def verdict(self, op, inputs, params, verdict, witness=None, details=()):
        if self.mode == "jsonl":
            rec = {"op": op, "inputs": inputs, "params": params, "verdict": verdict}
            if witness is not None:
                rec["witness"] = witness
            self.stream.write(json.dumps(rec, sort_keys=True) + "\n")
        elif self.mode == "tsv":
            cells = [op, verdict]
            if witness is not None:
                cells.append(witness if isinstance(witness, str) else json.dumps(witness, sort_keys=True))
            self.stream.write("\t".join(cells) + "\n")
        else:
            self.stream.write(verdict + "\n")
            for line in details:
                self.stream.write(line + "\n")


def _check_lk(l, k):
    if not 1 <= l < k:
        raise InputError(f"need 1 <= l < k, got l={l}, k={k}")


# -- subcommands -------------------------------------------------------------------


def cmd_eval(args, out: Out):
    p = load_program(args.program)
    a = load_structure(args.structure)
    lfp = least_fixed_point(p, a)
    verdict = "GOAL" if lfp.rel(GOAL) else "NO-GOAL"
    idb = {n: sorted(map(list, lfp.rel(n))) for n in p.idb.names if n != GOAL}
    details = []
    if args.dump_idb:
        for n in sorted(idb):
            for t in idb[n]:
                details.append(" ".join([n] + [a.label(e) for e in t]))
    out.verdict("eval", {"program": args.program, "structure": args.structure}, {}, verdict,
                idb if args.dump_idb else None, details)
    return EXIT_OK


def cmd_pebble(args, out: Out):
    _check_lk(args.l, args.k)
    a, b = load_structure(args.A), load_structure(args.B)
    fam = greatest_strategy_family(a, b, args.l, args.k, budget=args.budget)
    verdict = "DUPLICATOR" if fam else "SPOILER"
    dump = fam.dump().splitlines() if args.dump_family else []
    out.verdict("pebble", {"A": args.A, "B": args.B}, {"l": args.l, "k": args.k}, verdict,
                dump if args.dump_family else None, dump)
    return EXIT_OK


def cmd_canonical(args, out: Out):
    _check_lk(args.l, args.k)
    if args.action == "eval":
        if not args.A:
            raise InputError("canonical eval needs --A")
        a, b = load_structure(args.A), load_structure(args.B)
        goal = canonical_eval(a, b, args.l, args.k, budget=args.budget)
        out.verdict("canonical-eval", {"A": args.A, "B": args.B}, {"l": args.l, "k": args.k},
                    "GOAL" if goal else "NO-GOAL")
        return EXIT_OK
    b = load_structure(args.B)
    p = synthesize_canonical(b, args.l, args.k, budget=args.budget)
    text = format_program(p)
    if args.output_file:
        Path(args.output_file).write_text(text, encoding="utf-8")
    else:
        out.stream.write(text)
    w = width(p)
    out.verdict("canonical-synth", {"B": args.B}, {"l": args.l, "k": args.k}, "OK",
                {"rules": len(p.rules), "idb": len(p.idb.relations), "width": [w.l, w.k]},
                [f"{len(p.rules)} rules, {len(p.idb.relations)} IDBs, width ({w.l},{w.k})"])
    return EXIT_OK


def cmd_mso(args, out: Out):
    phi = load_formula(args.formula)
    a = load_structure(args.structure)
    mode = GUARDED if args.guarded else STANDARD
    res = eval_formula(phi, a, mode, engine=args.engine, budget=args.budget, trace=args.trace)
    value = bool(res)
    witness = None
    details = []
    if args.trace and res.trace is not None:
        witness = [[name, _show(val, a)] for name, val in res.trace]
        details = [f"  {name} = {val}" for name, val in witness]
    out.verdict("mso", {"formula": args.formula, "structure": args.structure}, {"mode": mode},
                "TRUE" if value else "FALSE", witness, details)
    return EXIT_OK


def _show(val, a):
    if isinstance(val, int):
        return a.label(val)
    tuples = sorted(val)
    return "{" + ", ".join("(" + ",".join(a.label(e) for e in t) + ")" for t in tuples) + "}"


def cmd_equivq(args, out: Out):
    a, b = load_structure(args.A), load_structure(args.B)
    if args.q < 0 or args.cap < 1:
        raise InputError("need q >= 0 and cap >= 1")
    res = equiv_q_explain(a, b, args.q, args.cap, budget=args.budget)
    witness = None if res.equivalent else format_formula(res.sentence)
    details = [] if res.equivalent else [f"  separating sentence: {witness}"] + [f"  {t}" for t in res.trace]
    out.verdict("equivq", {"A": args.A, "B": args.B}, {"q": args.q, "cap": args.cap},
                "TRUE" if res.equivalent else "FALSE", witness, details)
    return EXIT_OK


def cmd_hom(args, out: Out):
    a, b = load_structure(args.A), load_structure(args.B)
    h = hom_search(a, b)
    witness = None if h is None else {a.label(x): b.label(y) for x, y in h.items()}
    details = [] if h is None else [f"  {a.label(x)} -> {b.label(y)}" for x, y in h.items()]
    out.verdict("hom", {"A": args.A, "B": args.B}, {}, "TRUE" if h else "FALSE", witness, details)
    return EXIT_OK


def cmd_lab(args, out: Out):
    if args.action == "list":
        out.stream.write("\n".join(list(experiments.EXPERIMENTS) + gallery_names()) + "\n")
        return EXIT_OK
    if args.action == "gallery":
        obj = gallery(args.name)
        if isinstance(obj, Structure):
            text = format_structure(obj)
        elif isinstance(obj, DatalogProgram):
            text = format_program(obj)
        elif isinstance(obj, Formula):
            text = format_formula(obj) + "\n"
        else:
            raise InputError(f"{args.name} has no text form")
        if args.output_file:
            Path(args.output_file).write_text(text, encoding="utf-8")
        else:
            out.stream.write(text)
        return EXIT_OK
    if args.name not in experiments.EXPERIMENTS:
        raise InputError(f"unknown experiment {args.name!r}; known: {', '.join(experiments.EXPERIMENTS)}")
    rep = experiments.run(args.name)
    if out.mode == "human":
        out.stream.write(rep.render() + "\n")
    else:
        out.verdict("lab", {"experiment": args.name}, {}, "PASS" if rep.ok else "FAIL",
                    {"rows": len(rep.rows), "deviations": rep.deviations})
    return EXIT_OK if rep.ok else EXIT_DEVIATION


_KINDS = {".st": "structure", ".dl": "program", ".fml": "formula"}


def cmd_formats(args, out: Out):
    kind = args.kind or _KINDS.get(Path(args.file).suffix)
    if kind is None:
        raise InputError(f"cannot tell the format of {args.file}; pass --kind")
    if kind == "structure":
        text = format_structure(load_structure(args.file))
    elif kind == "program":
        text = format_program(load_program(args.file))
    else:
        text = format_formula(load_formula(args.file)) + "\n"
    out.stream.write(text)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("human", "tsv", "jsonl"), default="human", help="report format")
    common.add_argument("--budget", type=int, default=None, help="size budget for the main computation")

    ap = argparse.ArgumentParser(prog="pebblelog", description="Datalog, pebble games and MSO on finite structures.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a Datalog program")
    p.add_argument("--program", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--dump-idb", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pebble", parents=[common], help="existential (l,k)-pebble game")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--dump-family", action="store_true")
    p.set_defaults(func=cmd_pebble)

    p = sub.add_parser("canonical", parents=[common], help="canonical Datalog program of a template")
    p.add_argument("action", choices=("eval", "synth"))
    p.add_argument("--A")
    p.add_argument("--B", required=True)
    p.add_argument("-l", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-o", dest="output_file")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("mso", parents=[common], help="model-check a sentence")
    p.add_argument("--formula", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--guarded", action="store_true", help="second-order variables range over guarded relations")
    p.add_argument("--trace", action="store_true", help="report the outermost witness or counterexample")
    p.add_argument("--engine", choices=("auto", "enumerate", "sat"), default="auto")
    p.set_defaults(func=cmd_mso)

    p = sub.add_parser("equivq", parents=[common], help="back-and-forth equivalence up to rank q")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("-q", type=int, required=True)
    p.add_argument("--cap", type=int, default=1, help="largest arity of added relations")
    p.set_defaults(func=cmd_equivq)

    p = sub.add_parser("hom", parents=[common], help="search for a homomorphism")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("lab", parents=[common], help="experiments and gallery artifacts")
    p.add_argument("action", choices=("run", "gallery", "list"))
    p.add_argument("name", nargs="?")
    p.add_argument("-o", dest="output_file")
    p.set_defaults(func=cmd_lab)

    p = sub.add_parser("formats", parents=[common], help="validate and pretty-print an input file")
    p.add_argument("file")
    p.add_argument("--kind", choices=("structure", "program", "formula"))
    p.set_defaults(func=cmd_formats)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cmd == "lab" and args.action in ("run", "gallery") and not args.name:
        stderr.write(f"pebblelog: lab {args.action} needs a name\n")
        return EXIT_INPUT
    out = Out(args.output, stdout)
    try:
        return args.func(args, out)
    except BudgetExceeded as exc:
        stderr.write(f"pebblelog: budget exhausted: {exc}\n")
        return EXIT_BUDGET
    except (InputError, PebblelogError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        stderr.write(f"pebblelog: {msg}\n")
        return EXIT_INPUT


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
