"""JSON and DOT output for automata, relations and trace languages."""

import json

from . import automata as fa
from .relations import FnfRelation
from .tracelang import TraceClosedLang, block_domain, letter_domain

FORMAT_VERSION = 1


def header(system):
    from . import __version__
    al = system.alphabet
    return {"tool": "tracepds", "version": __version__, "format": FORMAT_VERSION,
            "digest": system.digest(),
            "alphabet": {"letters": list(al.letters),
                         "dep": [list(p) for p in al.dependency_pairs()]}}


def _block(al, mask):
    return list(al.letters_of(mask))


def automaton_json(auto, alphabet, arity):
    """The automaton as a JSON-ready dict; ``arity=None`` for letter automata.

    Only symbols that label a transition are listed, in domain order.
    """
    edges = list(auto.edges())
    used = sorted({a for _, a, _ in edges}, key=auto.domain.key)
    sym_index = {a: i for i, a in enumerate(used)}
    if arity is None:
        symbols = list(used)
    else:
        symbols = [[_block(alphabet, b) for b in sym] for sym in used]
    return {"arity": arity, "symbols": symbols, "states": auto.n,
            "initial": sorted(auto.initial), "final": sorted(auto.final),
            "transitions": [[s, sym_index[a], t] for s, a, t in edges]}


def relation_json(r, system=None, **extra):
    out = {"kind": "relation"}
    if system is not None:
        out["header"] = header(system)
    out.update(extra)
    out.update(automaton_json(r.auto, r.alphabet, r.arity))
    return out


def language_json(lang, system=None, **extra):
    out = {"kind": "trace-language", "certificate": bool(lang.certified)}
    if system is not None:
        out["header"] = header(system)
    out.update(extra)
    out.update(automaton_json(lang.lin, lang.alphabet, None))
    return out


def dumps(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def load_automaton(data, alphabet):
    """Inverse of :func:`automaton_json`."""
    arity = data["arity"]
    if arity is None:
        domain = letter_domain(alphabet)
        symbols = list(data["symbols"])
    else:
        domain = block_domain(alphabet, arity)
        symbols = [tuple(alphabet.mask(b) for b in sym) for sym in data["symbols"]]
    edges = [(s, symbols[i], t) for s, i, t in data["transitions"]]
    return fa.Nfa.from_edges(domain, data["states"], data["initial"], data["final"],
                             edges)


def load_relation(data, alphabet):
    return FnfRelation(alphabet, data["arity"],
                       fa.minimal_dfa(load_automaton(data, alphabet)))


def load_language(data, alphabet):
    lin = load_automaton(data, alphabet)
    return TraceClosedLang(alphabet, lin, None, bool(data.get("certificate")))


def _label(al, sym, arity):
    if arity is None:
        return sym
    return "|".join("{" + ",".join(al.letters_of(b)) + "}" if b else "∅" for b in sym)


def to_dot(auto, alphabet, arity, name="A"):
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle];']
    for f in sorted(auto.final):
        lines.append(f"  {f} [shape=doublecircle];")
    for i in sorted(auto.initial):
        lines.append(f'  init{i} [shape=point]; init{i} -> {i};')
    grouped = {}
    for s, a, t in auto.edges():
        grouped.setdefault((s, t), []).append(_label(alphabet, a, arity))
    for (s, t), labels in grouped.items():
        text = "\\n".join(labels).replace('"', '\\"')
        lines.append(f'  {s} -> {t} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_of(obj, name="A"):
    if isinstance(obj, FnfRelation):
        return to_dot(obj.auto, obj.alphabet, obj.arity, name)
    return to_dot(obj.lin, obj.alphabet, None, name)
