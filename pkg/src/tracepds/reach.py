"""Step and reachability relations of a loop-connected tPDS.

Reachability is assembled from two kinds of pieces: ``reach^ε`` (runs that
only pop) and ``reach^T`` per twin class ``T`` (runs that start by reading a
letter of ``T`` and never pop below it).  The table is the least relation
containing the identity on each state and closed under composing with a
piece; the iteration stops once a round adds nothing.
"""

import logging
from dataclasses import dataclass, field

from . import automata as fa
from . import relations as rel
from .errors import DiagnosticFailure, PreconditionError
from .system import split, validate
from .tracelang import (certify, connected_loops, letter_domain, trace_closure,
                        trace_singleton)
from .traces import Trace

log = logging.getLogger(__name__)


def _needs(system, *flags):
    missing = [f for f in flags if f not in system.flags]
    if missing:
        raise PreconditionError(f"system lacks validation flag {missing[0]!r}",
                                flag=missing[0])


class _Cache:
    """Per-alphabet memo for identity and singleton languages."""

    def __init__(self, alphabet):
        self.alphabet = alphabet
        self.identity = rel.identity(alphabet)
        self._langs = {}

    def word_lang(self, word):
        hit = self._langs.get(word)
        if hit is None:
            hit = self._langs[word] = trace_singleton(Trace.from_word(word, self.alphabet))
        return hit


def build_step(system, p, q, cache=None):
    """``⋃ Id·({[a]}×{[w]})`` over transitions ``(p, a, w, q)``."""
    cache = cache or _Cache(system.alphabet)
    out = rel.empty_relation(system.alphabet, 2)
    for t in system.transitions:
        if t.src == p and t.dst == q:
            piece = rel.product_with_recognizable(
                cache.identity, cache.word_lang((t.read,)), cache.word_lang(t.push))
            out = rel.union(out, piece)
    return out


def pop_language(system, p, q):
    """Certified ``[reverse(L)]`` for the pop-sequence language from p to q."""
    al = system.alphabet
    si = system.state_index
    edges = [(si(t.src), t.read, si(t.dst)) for t in system.transitions if not t.push]
    auto = fa.Nfa.from_edges(letter_domain(al), len(system.states), {si(p)},
                             {si(q)}, edges)
    rev = fa.reverse(auto)
    return certify(al, rev, rev)


def build_reach_pop(eps_system, p, q, cache=None, closures=None):
    """``Id·(K×{1})`` with ``K`` the reversed pop words from ``p`` to ``q``."""
    if any(t.push for t in eps_system.transitions):
        raise PreconditionError("pop piece needs a system that only pops",
                                flag="pop-only")
    cache = cache or _Cache(eps_system.alphabet)
    k = pop_language(eps_system, p, q)
    if closures is not None:
        closures.append(k)
    return rel.product_with_recognizable(cache.identity, k, None)


def push_automaton(push_system, p, q, a):
    """ε-NFA for the words pushed by runs from ``(p, a)`` that end in ``q``
    without reading below ``a``, already ε-eliminated and trimmed."""
    al = push_system.alphabet
    e = fa.EpsilonNfa(letter_domain(al))
    node = {}
    for s in push_system.states:
        for c in al.letters:
            node[(s, c)] = e.add_state()
    done = e.add_state()
    for c in al.letters:
        e.add(node[(q, c)], c, done)
    for t in push_system.transitions:
        w = t.push
        tail = 0
        for i in range(len(w) - 1, -1, -1):
            d = w[i]
            if not al.dep_mask(al.bit(d)) & tail:
                e.add_path(node[(t.src, t.read)], w[:i] + w[i + 1:], node[(t.dst, d)])
            tail |= al.bit(d)
    e.initial.add(node[(p, a)])
    e.final.add(done)
    return fa.trim(fa.eps_eliminate(e))


def build_push_H(push_system, p, q, a):
    al = push_system.alphabet
    auto = push_automaton(push_system, p, q, a)
    ok, witness = connected_loops(auto, al)
    if not ok:
        raise PreconditionError(f"not loop-connected: push automaton loop over "
                                f"{witness['letters']}", flag="loop-connected",
                                witness=witness)
    return trace_closure(auto, al)


def build_reach_push(push_system, p, q, letters, cache=None, closures=None):
    """``⋃_{a} Id·({[a]}×H_a)``, plus ``Id`` when ``p = q``."""
    cache = cache or _Cache(push_system.alphabet)
    out = cache.identity if p == q else rel.empty_relation(push_system.alphabet, 2)
    for a in letters:
        h = build_push_H(push_system, p, q, a)
        if closures is not None:
            closures.append(h)
        if fa.is_empty(h.lin):
            continue
        piece = rel.product_with_recognizable(cache.identity, cache.word_lang((a,)), h)
        out = rel.union(out, piece)
    return out


@dataclass
class ReachTable:
    """Relations indexed by state pairs ``(p, q)``.

    ``pieces`` is keyed by ``("eps", r, s)`` and ``(class index, r, s)``;
    ``closures`` collects every certified trace language built on the way.
    """

    system: object
    step: dict = field(default_factory=dict)
    reach: dict = field(default_factory=dict)
    pieces: dict = field(default_factory=dict)
    closures: list = field(default_factory=list)
    rounds: int = 0

    @property
    def alphabet(self):
        return self.system.alphabet

    def reaches(self, p, s, q, t):
        """Does ``(p, s) ⊢* (q, t)``?"""
        return self.reach[(p, q)].contains(s, t)

    def steps(self, p, s, q, t):
        return self.step[(p, q)].contains(s, t)


def build_pieces(system, cache=None, closures=None):
    _needs(system, "saturated", "loop_connected")
    cache = cache or _Cache(system.alphabet)
    eps_sys, push_sys = split(system)
    classes = system.alphabet.twin_classes()
    pieces = {}
    for r in system.states:
        for s in system.states:
            pieces[("eps", r, s)] = build_reach_pop(eps_sys, r, s, cache, closures)
            for idx, sub in push_sys.items():
                pieces[(idx, r, s)] = build_reach_push(sub, r, s, classes[idx],
                                                       cache, closures)
    return pieces


def build_reach(system, max_rounds=64, pieces=None, cache=None, closures=None):
    """Fixpoint ``R(p,q) ⊇ Id[p=q]``, ``R(p,q) ⊇ R(p,r) ∘ Π(r,q)``.

    ``Π(r,q)`` is the union of all pieces for the pair.  Returns
    ``(reach, pieces, rounds)``.
    """
    _needs(system, "saturated", "loop_connected")
    al = system.alphabet
    cache = cache or _Cache(al)
    if pieces is None:
        pieces = build_pieces(system, cache, closures)
    states = system.states
    pi = {}
    for r in states:
        for s in states:
            acc = rel.empty_relation(al, 2)
            for key, piece in pieces.items():
                if key[1] == r and key[2] == s:
                    acc = rel.union(acc, piece)
            pi[(r, s)] = acc
    reach = {(p, q): (cache.identity if p == q else rel.empty_relation(al, 2))
             for p in states for q in states}
    changed = set(reach)
    rounds = 0
    while changed:
        rounds += 1
        if rounds > max_rounds:
            raise DiagnosticFailure(f"reachability fixpoint not reached after "
                                    f"{max_rounds} rounds")
        nxt = dict(reach)
        for p in states:
            for r in states:
                if (p, r) not in changed or reach[(p, r)].is_empty():
                    continue
                for q in states:
                    if pi[(r, q)].is_empty():
                        continue
                    nxt[(p, q)] = rel.union(nxt[(p, q)],
                                            rel.compose(reach[(p, r)], pi[(r, q)]))
        changed = {k for k in reach if not nxt[k].equivalent(reach[k])}
        log.debug("round %d: %d pairs changed", rounds, len(changed))
        reach = nxt
    return reach, pieces, rounds


def build_table(system, max_rounds=64):
    """Validate ``system`` and build every step and reach relation."""
    sat = system if {"saturated", "loop_connected"} <= system.flags else validate(system)
    cache = _Cache(sat.alphabet)
    table = ReachTable(sat)
    for p in sat.states:
        for q in sat.states:
            table.step[(p, q)] = build_step(sat, p, q, cache)
    table.reach, table.pieces, table.rounds = build_reach(
        sat, max_rounds, cache=cache, closures=table.closures)
    return table
