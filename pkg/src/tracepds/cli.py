"""``tracepds`` command line.

Exit codes: 0 success or true, 1 property fails or false, 2 input or
precondition error, 3 internal diagnostic failure.
"""

import argparse
import json
import os
import sys

from . import __version__
from .errors import InputError, PreconditionError, TracePdsError
from .logic import evaluate, parse
from .oracle import cross_validate, triage
from .reach import build_table
from .serialize import dot_of, dumps, language_json, relation_json
from .system import Tpds, check_loop_connected, check_p1, check_p2, saturate
from .traces import DependenceAlphabet, Trace


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _system(path):
    try:
        return Tpds.from_text(_read(path))
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _word(text):
    return () if text in ("-", "") else tuple(text)


def _trace(word, alphabet):
    return Trace.from_word(_word(word), alphabet)


def _show_conf(state, trace):
    return f"({state},{trace.fnf_str()})"


def cmd_check(args, out):
    system = _system(args.file)
    ok = True
    p1, bad = check_p1(system)
    out.write(f"P1: {'ok' if p1 else 'FAIL'}\n")
    if not p1:
        out.write(f"  offending transition: {bad}\n")
    p2, bad = check_p2(system)
    out.write(f"P2: {'ok' if p2 else 'FAIL'}\n")
    if not p2:
        out.write(f"  offending pair: {bad[0]} ; {bad[1]}\n")
    ok = p1 and p2
    if not ok:
        return 1
    sat = saturate(system.with_flags("p1", "p2"))
    added = [t for t in sat.transitions if t not in set(system.transitions)]
    out.write(f"saturation: {len(added)} transition(s) added\n")
    for t in added:
        out.write(f"  + {t}\n")
    if args.loop_connected:
        lc, walk = check_loop_connected(sat)
        out.write(f"loop-connected: {'ok' if lc else 'FAIL'}\n")
        if not lc:
            letters = sorted({a for _, lab, _, _ in walk for a in lab},
                             key=system.alphabet.index)
            out.write(f"  disconnected loop over {{{','.join(letters)}}}:\n")
            for (p, a), lab, (q, b), t in walk:
                out.write(f"    ({p},{a}) --{''.join(lab) or '-'}--> ({q},{b})"
                          f"   via {t}\n")
        ok = lc
    return 0 if ok else 1


def cmd_saturate(args, out):
    system = _system(args.file)
    for check, flag in ((check_p1, "p1"), (check_p2, "p2")):
        good, bad = check(system)
        if not good:
            raise PreconditionError(f"{flag.upper()} fails", flag=flag, witness=bad)
    out.write(saturate(system.with_flags("p1", "p2")).to_text())
    return 0


def cmd_fnf(args, out):
    text = _read(args.file)
    try:
        alphabet = Tpds.from_text(text).alphabet
    except InputError:
        alphabet = DependenceAlphabet.from_text(text)
    for w in args.words:
        out.write(f"{w}\t{_trace(w, alphabet).fnf_str()}\n")
    return 0


def cmd_build(args, out):
    system = _system(args.file)
    table = build_table(system)
    sat = table.system
    os.makedirs(args.output, exist_ok=True)
    classes = sat.alphabet.twin_classes()
    written = []

    def emit(name, obj, **extra):
        if args.format == "json":
            path = os.path.join(args.output, name + ".json")
            data = (relation_json(obj, sat, **extra) if hasattr(obj, "arity")
                    else language_json(obj, sat, **extra))
            content = dumps(data)
        else:
            path = os.path.join(args.output, name + ".dot")
            content = dot_of(obj, name.replace(".", "_").replace("-", "_"))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
        written.append(os.path.basename(path))

    for (p, q), r in sorted(table.step.items()):
        emit(f"step.{p}.{q}", r, pair=[p, q])
    for (p, q), r in sorted(table.reach.items()):
        emit(f"reach.{p}.{q}", r, pair=[p, q], rounds=table.rounds)
    for key in sorted(table.pieces, key=lambda k: (str(k[0]), k[1], k[2])):
        kind, r_, s_ = key
        tag = "eps" if kind == "eps" else f"T{kind}"
        extra = {"pair": [r_, s_]}
        if kind != "eps":
            extra["twin_class"] = list(classes[kind])
        emit(f"piece.{tag}.{r_}.{s_}", table.pieces[key], **extra)
    out.write(f"fixpoint rounds: {table.rounds}\n")
    out.write(f"wrote {len(written)} files to {args.output}\n")
    return 0


def cmd_query(args, out):
    system = _system(args.file)
    for s in (args.p, args.q):
        system.state_index(s)
    table = build_table(system)
    al = system.alphabet
    value = table.reaches(args.p, _trace(args.w1, al), args.q, _trace(args.w2, al))
    out.write("true\n" if value else "false\n")
    return 0 if value else 1


def cmd_mc(args, out):
    system = _system(args.file)
    text = args.formula
    if text.startswith("@"):
        text = _read(text[1:])
    f = parse(text, args.level)
    table = build_table(system)
    value, witness = evaluate(f, args.level, table, args.max_trace_len)
    out.write("true\n" if value else "false\n")
    if witness:
        for v, val in witness.items():
            shown = _show_conf(*val) if args.level == "g" else val.fnf_str()
            out.write(f"  {v} = {shown}\n")
    return 0 if value else 1


def cmd_oracle(args, out):
    system = _system(args.file)
    table = build_table(system)
    report = cross_validate(table, args.max_trace_len, args.intermediate, system)
    if args.json:
        data = report.to_json()
        if args.triage:
            data["soft_unconfirmed"] = len(triage(report, system, args.triage))
        out.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        out.write(report.to_text())
        if args.triage and report.soft:
            left = triage(report, system, args.triage)
            out.write(f"soft failures not confirmed up to bound {args.triage}: "
                      f"{len(left)}\n")
    return 1 if report.hard else 0


def make_parser():
    ap = argparse.ArgumentParser(prog="tracepds", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"tracepds {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check P1, P2, saturation and loop-connectedness")
    p.add_argument("file")
    p.add_argument("--loop-connected", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("saturate", help="print the saturated system")
    p.add_argument("file")
    p.set_defaults(func=cmd_saturate)

    p = sub.add_parser("fnf", help="Foata normal forms of words")
    p.add_argument("file", help="system or alphabet file")
    p.add_argument("words", nargs="+", help="words; '-' is the empty word")
    p.set_defaults(func=cmd_fnf)

    p = sub.add_parser("build", help="write step, reach and piece automata")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="decide (p, W1) ⊢* (q, W2)")
    p.add_argument("file")
    p.add_argument("p")
    p.add_argument("w1")
    p.add_argument("q")
    p.add_argument("w2")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("mc", help="evaluate a first-order sentence")
    p.add_argument("file")
    p.add_argument("formula", help="sentence, or @FILE to read it from a file")
    p.add_argument("--level", choices=("s", "g"), default="s")
    p.add_argument("--max-trace-len", type=int, default=None,
                   help="let quantifiers range over traces of at most N letters")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("oracle", help="cross-validate against bounded search")
    p.add_argument("file")
    p.add_argument("--max-trace-len", type=int, default=5)
    p.add_argument("--intermediate", type=int, default=8)
    p.add_argument("--triage", type=int, default=0, metavar="N",
                   help="re-search soft failures with bounds up to N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)
    return ap


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args, out)
    except PreconditionError as e:
        err.write(f"precondition failed [{e.flag}]: {e}\n")
        return e.exit_code
    except TracePdsError as e:
        err.write(f"error: {e}\n")
        return e.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
