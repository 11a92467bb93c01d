"""Recognizable trace languages given by swap-closed word automata.

``trace_closure`` turns an automaton whose loops all carry connected letter
sets into an automaton for the full set of linearizations of its traces.
The construction is compositional over a rational expression obtained by
state elimination; its output is only accepted after an automaton-level
certificate (swap-closed and containing the input) has been checked.
"""

from dataclasses import dataclass, field
from itertools import product

from . import automata as fa
from .automata import Domain, Nfa, TupleDomain
from .errors import DiagnosticFailure, PreconditionError
from .graphs import disconnected_cycle
from .traces import Trace, iter_bits


def letter_domain(alphabet):
    return Domain(alphabet.letters)


# ---------------------------------------------------------------------------
# certificates and loop analysis

def swap_closed(a, alphabet):
    ok, _ = fa.is_subset(fa.swap_image(a, alphabet), a)
    return ok


def connected_loops(a, alphabet):
    """``(True, None)`` if every cycle of ``a`` reads a connected letter set,
    otherwise ``(False, witness)`` with the witness a list of transitions."""
    edges = [(s, alphabet.bit(sym), t) for s, sym, t in a.edges()]
    walk = disconnected_cycle(a.n, edges, alphabet)
    if walk is None:
        return True, None
    letters = {alphabet.letters[i] for j in walk for i in iter_bits(edges[j][1])}
    witness = [(edges[j][0], alphabet.letters_of(edges[j][1])[0], edges[j][2])
               for j in walk]
    return False, {"walk": witness, "letters": sorted(letters, key=alphabet.index)}


@dataclass(frozen=True)
class TraceClosedLang:
    """A trace language given by the automaton of all its linearizations.

    ``lin`` is a minimal DFA over letters.  ``certified`` records that
    ``swap_image(lin) ⊆ lin`` and ``base ⊆ lin`` were both checked.
    """

    alphabet: object
    lin: Nfa
    base: Nfa = field(repr=False, default=None)
    certified: bool = False
    cap: int = None

    def contains(self, trace):
        return self.lin.accepts(trace.word())

    def __contains__(self, trace):
        return self.contains(trace)

    def is_unit(self):
        """True iff the language is exactly ``{1}``."""
        return self.lin.n == 1 and self.lin.final == {0} and not self.lin.delta[0]

    def recheck(self):
        """Re-run both certificate inclusions from scratch."""
        if not swap_closed(self.lin, self.alphabet):
            return False
        base = self.lin if self.base is None else self.base
        ok, _ = fa.is_subset(base, self.lin)
        return ok


def certify(alphabet, lin, base=None, cap=None):
    """Wrap ``lin`` after verifying the certificate; raise if it fails."""
    lin = fa.minimal_dfa(lin)
    if not swap_closed(lin, alphabet):
        raise PreconditionError("language is not closed under independent swaps",
                                flag="certificate")
    if base is not None:
        ok, w = fa.is_subset(base, lin)
        if not ok:
            raise PreconditionError(f"base word {''.join(w)!r} missing from closure",
                                    flag="certificate")
    return TraceClosedLang(alphabet, lin, base, True, cap)


def unit_language(alphabet):
    return certify(alphabet, fa.epsilon(letter_domain(alphabet)))


def trace_singleton(trace):
    """``{t}`` for a single trace: the trie of its linearizations."""
    alphabet = trace.alphabet
    lin = fa.finite_language(letter_domain(alphabet), trace.linearizations())
    return certify(alphabet, lin)


# ---------------------------------------------------------------------------
# rational expressions by state elimination

EMPTY = ("0",)
EPS = ("1",)


def r_sym(a):
    return ("s", a)


def r_union(*parts):
    items = []
    for p in parts:
        if p == EMPTY:
            continue
        for q in (p[1] if p[0] == "+" else (p,)):
            if q not in items:
                items.append(q)
    if not items:
        return EMPTY
    if len(items) == 1:
        return items[0]
    return ("+", tuple(items))


def r_concat(*parts):
    items = []
    for p in parts:
        if p == EMPTY:
            return EMPTY
        if p == EPS:
            continue
        items.extend(p[1] if p[0] == "." else (p,))
    if not items:
        return EPS
    if len(items) == 1:
        return items[0]
    return (".", tuple(items))


def r_star(p):
    if p in (EMPTY, EPS):
        return EPS
    if p[0] == "*":
        return p
    return ("*", p)


def state_elimination(a):
    """A rational expression for L(a).

    Every starred subexpression collects labels of loops at one state of
    ``a``, so its words are loop labels of the original automaton.
    """
    a = fa.trim(a)
    if not a.initial:
        return EMPTY
    n = a.n
    start, end = n, n + 1
    R = {}

    def add(i, j, e):
        R[(i, j)] = r_union(R.get((i, j), EMPTY), e)

    for s, sym, t in a.edges():
        add(s, t, r_sym(sym))
    for s in sorted(a.initial):
        add(start, s, EPS)
    for f in sorted(a.final):
        add(f, end, EPS)
    alive = set(range(n))
    while alive:
        def cost(s):
            ins = sum(1 for (i, j) in R if j == s and i != s)
            outs = sum(1 for (i, j) in R if i == s and j != s)
            return (ins * outs, s)
        s = min(alive, key=cost)
        alive.discard(s)
        loop = r_star(R.pop((s, s), EMPTY))
        preds = sorted(i for (i, j) in R if j == s)
        succs = sorted(j for (i, j) in R if i == s)
        for i in preds:
            for j in succs:
                add(i, j, r_concat(R[(i, s)], loop, R[(s, j)]))
        for i in preds:
            del R[(i, s)]
        for j in succs:
            del R[(s, j)]
    return R.get((start, end), EMPTY)


# ---------------------------------------------------------------------------
# compositional closure

def _interleave(k1, k2, alphabet):
    """Linearizations of ``[K1]·[K2]`` from swap-closed DFAs ``k1``, ``k2``.

    State ``(s1, s2, dep)``: ``dep`` is D of the letters already given to the
    second factor; a letter may go to the first factor only outside ``dep``.
    """
    domain = k1.domain
    if not k1.initial or not k2.initial:
        return fa.empty(domain)
    i1 = next(iter(k1.initial))
    i2 = next(iter(k2.initial))
    start = (i1, i2, 0)
    index = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        s1, s2, dep = order[i]
        src = i
        i += 1
        for a in domain:
            bit = alphabet.bit(a)
            nexts = []
            if not dep & bit:
                t1 = k1.delta[s1].get(a)
                if t1:
                    nexts.append((next(iter(t1)), s2, dep))
            t2 = k2.delta[s2].get(a)
            if t2:
                nexts.append((s1, next(iter(t2)), dep | alphabet.dep_mask(bit)))
            for node in nexts:
                j = index.get(node)
                if j is None:
                    j = index[node] = len(order)
                    order.append(node)
                edges.append((src, a, j))
    final = [j for j, (s1, s2, _) in enumerate(order)
             if s1 in k1.final and s2 in k2.final]
    return fa.Nfa.from_edges(domain, len(order), {0}, final, edges)


def _concurrent_star(k, alphabet, cap):
    """Linearizations of ``[K]*`` using at most ``cap`` open factor copies.

    A state is a tuple of open copies in factor order, each ``(s, ydep,
    zdep)``: ``s`` the copy's DFA state, ``ydep`` D of everything read by
    later copies (open or closed), ``zdep`` the same including the copy's own
    letters.  A letter may be read by a copy only outside its ``ydep``; a new
    copy inserted before copy ``j`` starts with ``ydep = zdep_j``.  An
    accepting copy may be closed when a slot is needed.
    """
    domain = k.domain
    if not k.initial:
        return fa.epsilon(domain)
    i0 = next(iter(k.initial))
    finals = k.final

    def close_finished(inst):
        # accepting copies that cannot read anything more are closed at once
        return tuple(c for c in inst if not (c[0] in finals and not k.delta[c[0]]))

    start = ()
    index = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        inst = order[i]
        src = i
        i += 1
        for a in domain:
            bit = alphabet.bit(a)
            dbit = alphabet.dep_mask(bit)
            succ = set()
            # feed an open copy
            for j, (s, ydep, zdep) in enumerate(inst):
                if ydep & bit:
                    continue
                t = k.delta[s].get(a)
                if not t:
                    continue
                new = [(s2, y | dbit, z | dbit) for s2, y, z in inst[:j]]
                new.append((next(iter(t)), ydep, zdep | dbit))
                new.extend(inst[j + 1:])
                succ.add(close_finished(tuple(new)))
            # open a new copy
            t0 = k.delta[i0].get(a)
            if t0:
                s0 = next(iter(t0))
                bases = [inst]
                if len(inst) >= cap:
                    bases = [inst[:j] + inst[j + 1:] for j, c in enumerate(inst)
                             if c[0] in finals]
                for base in bases:
                    for pos in range(len(base) + 1):
                        ydep = base[pos][2] if pos < len(base) else 0
                        if ydep & bit:
                            continue
                        new = [(s2, y | dbit, z | dbit) for s2, y, z in base[:pos]]
                        new.append((s0, ydep, ydep | dbit))
                        new.extend(base[pos:])
                        succ.add(close_finished(tuple(new)))
            for node in sorted(succ):
                j = index.get(node)
                if j is None:
                    j = index[node] = len(order)
                    order.append(node)
                edges.append((src, a, j))
    final = [j for j, inst in enumerate(order) if all(c[0] in finals for c in inst)]
    return fa.Nfa.from_edges(domain, len(order), {0}, final, edges)


def _closure_of_expr(expr, alphabet, cap, memo):
    hit = memo.get(expr)
    if hit is not None:
        return hit
    domain = letter_domain(alphabet)
    kind = expr[0]
    if kind == "0":
        out = fa.empty(domain)
    elif kind == "1":
        out = fa.epsilon(domain)
    elif kind == "s":
        out = fa.word_automaton(domain, (expr[1],))
    elif kind == "+":
        out = fa.empty(domain)
        for part in expr[1]:
            out = fa.union(out, _closure_of_expr(part, alphabet, cap, memo))
        out = fa.minimal_dfa(out)
    elif kind == ".":
        out = _closure_of_expr(expr[1][0], alphabet, cap, memo)
        for part in expr[1][1:]:
            nxt = _closure_of_expr(part, alphabet, cap, memo)
            out = fa.minimal_dfa(_interleave(out, nxt, alphabet))
    elif kind == "*":
        inner = _closure_of_expr(expr[1], alphabet, cap, memo)
        out = fa.minimal_dfa(_concurrent_star(inner, alphabet, cap))
    else:  # pragma: no cover
        raise ValueError(f"bad expression node {expr!r}")
    out = fa.minimal_dfa(out)
    memo[expr] = out
    return out


def trace_closure(a, alphabet, cap=None):
    """Certified closure of L(a) under independent swaps.

    Requires every loop of ``a`` to read a connected letter set.  The
    instance cap starts at ``|Σ|`` and doubles until the certificate holds;
    past ``2^|Σ|`` a :class:`DiagnosticFailure` is raised.
    """
    a = fa.trim(a)
    ok, witness = connected_loops(a, alphabet)
    if not ok:
        raise PreconditionError("automaton has a loop with disconnected alphabet "
                                f"{witness['letters']}", flag="connected-loops",
                                witness=witness)
    domain = letter_domain(alphabet)
    if not a.initial:
        return TraceClosedLang(alphabet, fa.empty(domain), a, True, 0)
    expr = state_elimination(a)
    limit = 2 ** len(alphabet)
    cap = max(1, len(alphabet)) if cap is None else cap
    while True:
        lin = _closure_of_expr(expr, alphabet, cap, {})
        if swap_closed(lin, alphabet) and fa.is_subset(a, lin)[0]:
            return TraceClosedLang(alphabet, lin, a, True, cap)
        if cap >= limit:
            raise DiagnosticFailure(f"trace closure not certified with {cap} "
                                    "concurrent factor copies")
        cap = min(cap * 2, limit)


def closure_of_words(words, alphabet):
    return trace_closure(fa.finite_language(letter_domain(alphabet), words), alphabet)


# ---------------------------------------------------------------------------
# translation to automata over Foata blocks

def block_domain(alphabet, k):
    return TupleDomain(alphabet.independent_sets(), k)


def allowed_blocks(alphabet):
    """``prev_dep -> [A ∈ F : A ⊆ prev_dep]`` as a memoizing dict."""
    blocks = alphabet.independent_sets()
    cache = {}

    def get(dep):
        r = cache.get(dep)
        if r is None:
            r = cache[dep] = [b for b in blocks if not b & ~dep]
        return r
    return get


def efnf_valid(k, alphabet):
    """Automaton accepting convolutions of ``k`` eFNF words of equal length.

    A state is the tuple of D(previous block) per track; the initial
    pseudo-block has D = Σ.
    """
    domain = block_domain(alphabet, k)
    allowed = allowed_blocks(alphabet)
    start = (alphabet.full,) * k
    index = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        deps = order[i]
        src = i
        i += 1
        for sym in product(*(allowed(d) for d in deps)):
            node = tuple(alphabet.dep_mask(b) for b in sym)
            j = index.get(node)
            if j is None:
                j = index[node] = len(order)
                order.append(node)
            edges.append((src, sym, j))
    return fa.Nfa.from_edges(domain, len(order), {0}, range(len(order)), edges)


def fnf_encode(lang):
    """Automaton over 1-tuples of blocks accepting ``fnf(t)·∅*`` for ``t``
    in the language."""
    if not lang.certified:
        raise PreconditionError("trace language has no closure certificate",
                                flag="certificate")
    alphabet = lang.alphabet
    lin = lang.lin
    domain = block_domain(alphabet, 1)
    allowed = allowed_blocks(alphabet)
    words = {b: alphabet.letters_of(b) for b in alphabet.independent_sets()}
    index = {}
    order = []
    edges = []

    def sid(node):
        j = index.get(node)
        if j is None:
            j = index[node] = len(order)
            order.append(node)
        return j

    for s in sorted(lin.initial):
        sid((s, alphabet.full))
    i = 0
    while i < len(order):
        s, dep = order[i]
        src = i
        i += 1
        for b in allowed(dep):
            if b == 0:
                continue
            for t in sorted(lin.run(words[b], {s})):
                edges.append((src, (b,), sid((t, alphabet.dep_mask(b)))))
    pad = len(order)
    final = [j for j, (s, _) in enumerate(order) if s in lin.final]
    edges += [(f, (0,), pad) for f in final]
    edges.append((pad, (0,), pad))
    return fa.minimal_dfa(fa.Nfa.from_edges(domain, pad + 1, range(len(lin.initial)),
                                            final + [pad], edges))


def traces_of(lang, max_len):
    """Traces of the language with at most ``max_len`` letters."""
    return {Trace.from_word(w, lang.alphabet) for w in fa.words(lang.lin, max_len)}
