"""fnf-automatic trace relations.

A ``k``-ary relation over traces is stored as a minimal DFA over ``k``-tuples
of independent-set masks that accepts every convolution of eFNF words whose
traces are in the relation.  Every operation returns a pad-normalized
automaton: membership never depends on how many all-∅ columns trail a word.

Tracks are numbered from 1 in ``project``/``cylindrify``, as in the
coordinate maps of the composition construction.
"""

from itertools import product

from . import automata as fa
from .errors import InputError
from .tracelang import (allowed_blocks, block_domain, efnf_valid, fnf_encode)
from .traces import Trace


class FnfRelation:
    """A ``k``-ary fnf-automatic relation; ``auto`` is a minimal DFA."""

    __slots__ = ("alphabet", "arity", "auto")

    pad_normalized = True

    def __init__(self, alphabet, arity, auto):
        self.alphabet = alphabet
        self.arity = arity
        self.auto = auto

    def __repr__(self):
        return f"FnfRelation(arity={self.arity}, states={self.auto.n})"

    @property
    def domain(self):
        return self.auto.domain

    def contains(self, *traces):
        if len(traces) != self.arity:
            raise InputError(f"expected {self.arity} traces, got {len(traces)}")
        return self.auto.accepts(convolve(*traces)) if traces else \
            bool(self.auto.initial & self.auto.final)

    __call__ = contains

    def is_empty(self):
        return fa.is_empty(self.auto)

    def equivalent(self, other):
        _check(self, other)
        return fa.equivalent(self.auto, other.auto)[0]

    def issubset(self, other):
        _check(self, other)
        return fa.is_subset(self.auto, other.auto)[0]

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __invert__(self):
        return complement(self)

    def shortest_member(self):
        """Length-lex least accepted convolution, decoded to traces."""
        w = fa.shortest_word(self.auto)
        if w is None:
            return None
        return decode(w, self.alphabet, self.arity)


def _check(r1, r2, arity=None):
    if r1.alphabet != r2.alphabet:
        raise InputError("relations over different dependence alphabets")
    if r1.arity != r2.arity:
        raise InputError(f"arity mismatch: {r1.arity} vs {r2.arity}")
    if arity is not None and r1.arity != arity:
        raise InputError(f"expected arity {arity}, got {r1.arity}")


def _finish(alphabet, k, nfa, repad=False):
    if repad:
        nfa = _pad_normalize(nfa, k)
    return FnfRelation(alphabet, k, fa.minimal_dfa(nfa))


def _pad_normalize(nfa, k):
    """Right quotient by pad*, then re-append pad*."""
    pad = (0,) * k
    rev = [set() for _ in range(nfa.n)]
    for s in range(nfa.n):
        for t in nfa.delta[s].get(pad, ()):
            rev[t].add(s)
    final = set(nfa.final)
    stack = list(final)
    while stack:
        t = stack.pop()
        for s in rev[t]:
            if s not in final:
                final.add(s)
                stack.append(s)
    z = nfa.n
    delta = [dict(d) for d in nfa.delta]
    for f in final:
        delta[f][pad] = delta[f].get(pad, frozenset()) | {z}
    delta.append({pad: frozenset((z,))})
    return fa.Nfa(nfa.domain, nfa.n + 1, nfa.initial, final | {z}, delta)


def _relabel(nfa, domain, fn):
    delta = []
    for d in nfa.delta:
        out = {}
        for sym, ts in d.items():
            new = fn(sym)
            out[new] = out.get(new, frozenset()) | ts
        delta.append(out)
    return fa.Nfa(domain, nfa.n, nfa.initial, nfa.final, delta)


def _restrict_valid(nfa, alphabet, k, tracks):
    """Product with the eFNF condition on the given (0-based) tracks."""
    start_dep = tuple(alphabet.full for _ in tracks)
    index = {}
    order = []

    def sid(node):
        j = index.get(node)
        if j is None:
            j = index[node] = len(order)
            order.append(node)
        return j

    for s in sorted(nfa.initial):
        sid((s, start_dep))
    delta = []
    i = 0
    while i < len(order):
        s, deps = order[i]
        i += 1
        d = {}
        for sym, ts in nfa.delta[s].items():
            ok = True
            for pos, dep in zip(tracks, deps):
                if sym[pos] & ~dep:
                    ok = False
                    break
            if not ok:
                continue
            nd = tuple(alphabet.dep_mask(sym[pos]) for pos in tracks)
            d[sym] = frozenset(sid((t, nd)) for t in ts)
        delta.append(d)
    final = [j for j, (s, _) in enumerate(order) if s in nfa.final]
    return fa.Nfa(nfa.domain, len(order), range(len(nfa.initial)), final, delta)


# ---------------------------------------------------------------------------
# encoding

def convolve(*traces):
    """Column word of the ∅-padded Foata normal forms."""
    if not traces:
        return ()
    alphabet = traces[0].alphabet
    for t in traces[1:]:
        if t.alphabet != alphabet:
            raise InputError("traces over different dependence alphabets")
    n = max(len(t.blocks) for t in traces)
    return tuple(tuple(t.blocks[i] if i < len(t.blocks) else 0 for t in traces)
                 for i in range(n))


def decode(word, alphabet, k):
    return tuple(Trace.from_blocks([sym[i] for sym in word], alphabet)
                 for i in range(k))


# ---------------------------------------------------------------------------
# basic relations

def full(alphabet, k):
    """``M^k``."""
    return _finish(alphabet, k, efnf_valid(k, alphabet))


def empty_relation(alphabet, k):
    return FnfRelation(alphabet, k, fa.empty(block_domain(alphabet, k)))


def truth(alphabet, value):
    return full(alphabet, 0) if value else empty_relation(alphabet, 0)


def identity(alphabet):
    domain = block_domain(alphabet, 2)
    allowed = allowed_blocks(alphabet)
    index = {alphabet.full: 0}
    order = [alphabet.full]
    edges = []
    i = 0
    while i < len(order):
        dep = order[i]
        src = i
        i += 1
        for b in allowed(dep):
            nd = alphabet.dep_mask(b)
            j = index.get(nd)
            if j is None:
                j = index[nd] = len(order)
                order.append(nd)
            edges.append((src, (b, b), j))
    return _finish(alphabet, 2, fa.Nfa.from_edges(domain, len(order), {0},
                                                  range(len(order)), edges))


def singleton(*traces):
    """``{(t_1, …, t_k)}``."""
    if not traces:
        raise InputError("singleton needs at least one trace")
    alphabet = traces[0].alphabet
    k = len(traces)
    word = convolve(*traces)
    n = len(word) + 1
    edges = [(i, sym, i + 1) for i, sym in enumerate(word)]
    edges.append((n - 1, (0,) * k, n - 1))
    return _finish(alphabet, k, fa.Nfa.from_edges(block_domain(alphabet, k), n,
                                                  {0}, {n - 1}, edges))


def from_language(lang):
    """Unary relation of a certified trace language."""
    return FnfRelation(lang.alphabet, 1, fnf_encode(lang))


def bounded(alphabet, max_letters):
    """Unary relation of all traces with at most ``max_letters`` letters."""
    domain = block_domain(alphabet, 1)
    allowed = allowed_blocks(alphabet)
    start = (0, alphabet.full)
    index = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        count, dep = order[i]
        src = i
        i += 1
        for b in allowed(dep):
            c = count + bin(b).count("1")
            if c > max_letters:
                continue
            node = (c, alphabet.dep_mask(b))
            j = index.get(node)
            if j is None:
                j = index[node] = len(order)
                order.append(node)
            edges.append((src, (b,), j))
    return _finish(alphabet, 1, fa.Nfa.from_edges(domain, len(order), {0},
                                                  range(len(order)), edges))


# ---------------------------------------------------------------------------
# boolean algebra

def union(r1, r2):
    _check(r1, r2)
    return _finish(r1.alphabet, r1.arity, fa.union(r1.auto, r2.auto))


def intersect(r1, r2):
    _check(r1, r2)
    return _finish(r1.alphabet, r1.arity, fa.intersect(r1.auto, r2.auto))


def complement(r):
    """``M^k ∖ R``: product of the eFNF checker with the DFA of ``R``."""
    alphabet, k, dfa = r.alphabet, r.arity, r.auto
    allowed = allowed_blocks(alphabet)
    succ = [{sym: next(iter(ts)) for sym, ts in d.items()} for d in dfa.delta]
    start = ((alphabet.full,) * k, next(iter(dfa.initial)) if dfa.initial else -1)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        deps, s = order[i]
        i += 1
        moves = succ[s] if s >= 0 else {}
        d = {}
        for sym in product(*(allowed(x) for x in deps)):
            node = (tuple(alphabet.dep_mask(b) for b in sym), moves.get(sym, -1))
            j = index.get(node)
            if j is None:
                j = index[node] = len(order)
                order.append(node)
            d[sym] = frozenset((j,))
        delta.append(d)
    final = [j for j, (_, s) in enumerate(order) if s < 0 or s not in dfa.final]
    return _finish(alphabet, k, fa.Nfa(dfa.domain, len(order), {0}, final, delta))


def difference(r1, r2):
    return intersect(r1, complement(r2))


def permute(r, order):
    """Track ``i`` of the result is track ``order[i]`` (0-based) of ``r``."""
    order = tuple(order)
    if sorted(order) != list(range(r.arity)):
        raise InputError(f"{order!r} is not a permutation of the tracks")
    return _finish(r.alphabet, r.arity,
                   _relabel(r.auto, r.domain, lambda s: tuple(s[i] for i in order)))


def invert(r):
    return permute(r, range(r.arity - 1, -1, -1))


def project(r, i):
    """Existentially quantify track ``i`` (1-based)."""
    if not 1 <= i <= r.arity:
        raise InputError(f"track {i} out of range 1..{r.arity}")
    j = i - 1
    k = r.arity - 1
    nfa = _relabel(r.auto, block_domain(r.alphabet, k), lambda s: s[:j] + s[j + 1:])
    return _finish(r.alphabet, k, nfa, repad=True)


def cylindrify(r, i):
    """Insert an unconstrained track at position ``i`` (1-based, ≤ k+1)."""
    if not 1 <= i <= r.arity + 1:
        raise InputError(f"track {i} out of range 1..{r.arity + 1}")
    j = i - 1
    k = r.arity + 1
    blocks = r.alphabet.independent_sets()
    delta = []
    for d in r.auto.delta:
        out = {}
        for sym, ts in d.items():
            for b in blocks:
                out[sym[:j] + (b,) + sym[j:]] = ts
        delta.append(out)
    nfa = fa.Nfa(block_domain(r.alphabet, k), r.auto.n, r.auto.initial,
                 r.auto.final, delta)
    return _finish(r.alphabet, k, _restrict_valid(nfa, r.alphabet, k, (j,)))


def compose(r1, r2):
    """``{(x, z) : ∃y (x, y) ∈ R1, (y, z) ∈ R2}``.

    The three-track word is never materialized: the product reads ``(A, C)``
    and guesses the middle block ``B`` shared by both factors.  Trailing
    ``(∅, ∅)`` columns left by a longer middle trace are removed by the
    quotient in pad normalization.
    """
    _check(r1, r2, 2)
    a, b = r1.auto, r2.auto
    by_first = []
    for d in b.delta:
        m = {}
        for (x, z), ts in d.items():
            m.setdefault(x, []).append((z, ts))
        by_first.append(m)
    index = {}
    order = []

    def sid(node):
        j = index.get(node)
        if j is None:
            j = index[node] = len(order)
            order.append(node)
        return j

    for p in sorted(a.initial):
        for q in sorted(b.initial):
            sid((p, q))
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        d = {}
        m = by_first[q]
        for (x, y), ps in a.delta[p].items():
            for z, qs in m.get(y, ()):
                tg = d.setdefault((x, z), set())
                for p2 in ps:
                    for q2 in qs:
                        tg.add(sid((p2, q2)))
        delta.append({sym: frozenset(ts) for sym, ts in d.items()})
    final = [j for j, (p, q) in enumerate(order) if p in a.final and q in b.final]
    nfa = fa.Nfa(a.domain, len(order), range(len(a.initial) * len(b.initial)),
                 final, delta)
    return _finish(r1.alphabet, 2, nfa, repad=True)


# ---------------------------------------------------------------------------
# products with recognizable languages

def _times_recognizable(r, lang):
    """``R·(K×{1}) = {(x·y, z) : (x, z) ∈ R, y ∈ K}``.

    States ``(p1, p2, dX1, dX2, dU)``: DFA states of ``R`` and of ``lin(K)``,
    D of the letters given to ``y`` so far, D of the previous ``x``-block,
    and D of the previous block of the first track (eFNF check).  Reading
    ``(A, C)`` guesses ``B ⊆ A`` for ``y``; ``x`` reads ``A∖B``.
    """
    alphabet = r.alphabet
    a1 = r.auto
    a2 = lang.lin
    if not a1.initial or not a2.initial:
        return empty_relation(alphabet, 2)
    blocks = alphabet.independent_sets()
    fset = set(blocks)
    extensions = {x: [b for b in blocks if not b & x and (b | x) in fset]
                  for x in blocks}
    letters = {b: alphabet.letters_of(b) for b in blocks}
    full = alphabet.full
    dep = alphabet.dep_mask
    run_cache = {}

    def run(s, b):
        key = (s, b)
        hit = run_cache.get(key, False)
        if hit is False:
            cur = s
            for a in letters[b]:
                ts = a2.delta[cur].get(a)
                if not ts:
                    cur = None
                    break
                cur = next(iter(ts))
            hit = run_cache[key] = cur
        return hit

    start = (next(iter(a1.initial)), next(iter(a2.initial)), 0, full, full)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        p1, p2, dx1, dx2, du = order[i]
        i += 1
        d = {}
        for (x, c), ts in a1.delta[p1].items():
            if x & dx1 or x & ~dx2:
                continue
            q1 = next(iter(ts))
            for b in extensions[x]:
                block = x | b
                if block & ~du:
                    continue
                q2 = run(p2, b)
                if q2 is None:
                    continue
                node = (q1, q2, dx1 | dep(b), dep(x), dep(block))
                j = index.get(node)
                if j is None:
                    j = index[node] = len(order)
                    order.append(node)
                d.setdefault((block, c), set()).add(j)
        delta.append({sym: frozenset(ts) for sym, ts in d.items()})
    final = [j for j, (p1, p2, *_) in enumerate(order)
             if p1 in a1.final and p2 in a2.final]
    return _finish(alphabet, 2, fa.Nfa(r.domain, len(order), {0}, final, delta))


def product_with_recognizable(r, k_lang, l_lang=None):
    """``R·(K×L) = {(x1·y, x2·z) : (x1, x2) ∈ R, y ∈ K, z ∈ L}``.

    Reduced to ``(R·(K×{1})) ∘ (Id·(L×{1}))⁻¹``; ``l_lang=None`` means ``{1}``.
    """
    from .errors import PreconditionError
    for lang in (k_lang, l_lang):
        if lang is not None and not lang.certified:
            raise PreconditionError("trace language has no closure certificate",
                                    flag="certificate")
    if r.arity != 2:
        raise InputError("product_with_recognizable needs a binary relation")
    left = _times_recognizable(r, k_lang)
    if l_lang is None or l_lang.is_unit():
        return left
    right = invert(_times_recognizable(identity(r.alphabet), l_lang))
    return compose(left, right)


# ---------------------------------------------------------------------------
# decisions

def membership(r, *traces):
    return r.contains(*traces)


def is_equivalent(r1, r2):
    return r1.equivalent(r2)


def is_empty(r):
    return r.is_empty()


def is_well_formed(r):
    """``L ⊆ eFNF^k`` and invariance under appending/removing one pad column."""
    k = r.arity
    valid = efnf_valid(k, r.alphabet)
    if not fa.is_subset(r.auto, valid)[0]:
        return False
    pad = fa.word_automaton(r.domain, ((0,) * k,))
    padded = fa.concat(r.auto, pad)
    if not fa.is_subset(padded, r.auto)[0]:
        return False
    stripped = fa.right_quotient(r.auto, pad)
    return fa.is_subset(stripped, r.auto)[0]
