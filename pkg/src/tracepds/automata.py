"""Finite automata over arbitrary finite, ordered symbol domains.

Symbols are plain hashable values (letters, block masks, tuples of block
masks).  The domain fixes their order, which in turn fixes the state
numbering produced by every construction here: determinization and
minimization explore symbols in domain order, so equal inputs give
identical automata.

States are ``0 .. n-1``; ``delta[s]`` maps a symbol to a frozenset of
targets.  A deterministic automaton is simply one whose target sets are
singletons and which has at most one initial state; it may be partial.
"""

from collections import deque
from itertools import product

from .errors import InputError


class Domain:
    """An explicit ordered symbol domain."""

    def __init__(self, symbols):
        self.symbols = tuple(symbols)
        self._index = {s: i for i, s in enumerate(self.symbols)}
        if len(self._index) != len(self.symbols):
            raise InputError("duplicate symbols in domain")

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, s):
        return s in self._index

    def index(self, s):
        return self._index[s]

    key = index

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Domain) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Domain({list(self.symbols)!r})"


class TupleDomain:
    """All ``k``-tuples over an ascending tuple of integer components.

    Used for convolutions of block words; never materialized unless iterated.
    Tuples compare lexicographically, which agrees with the index order.
    """

    def __init__(self, components, k):
        self.components = tuple(components)
        self.k = k
        self._rank = {c: i for i, c in enumerate(self.components)}

    def __len__(self):
        return len(self.components) ** self.k

    def __iter__(self):
        return product(self.components, repeat=self.k)

    def __contains__(self, s):
        return (isinstance(s, tuple) and len(s) == self.k
                and all(c in self._rank for c in s))

    def index(self, s):
        i = 0
        base = len(self.components)
        for c in s:
            i = i * base + self._rank[c]
        return i

    def symbol(self, index):
        base = len(self.components)
        out = []
        for _ in range(self.k):
            index, r = divmod(index, base)
            out.append(self.components[r])
        return tuple(reversed(out))

    @staticmethod
    def key(s):
        return s

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, TupleDomain) and self.k == other.k
                and self.components == other.components)

    def __hash__(self):
        return hash((self.components, self.k))

    def __repr__(self):
        return f"TupleDomain({len(self.components)} components, k={self.k})"


class Nfa:
    """A nondeterministic finite automaton without ε-transitions."""

    __slots__ = ("domain", "n", "initial", "final", "delta")

    def __init__(self, domain, n, initial, final, delta=None):
        self.domain = domain
        self.n = n
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        if delta is None:
            delta = [{} for _ in range(n)]
        self.delta = delta

    @classmethod
    def from_edges(cls, domain, n, initial, final, edges):
        delta = [{} for _ in range(n)]
        for s, a, t in edges:
            if a not in domain:
                raise InputError(f"symbol {a!r} not in domain")
            if not (0 <= s < n and 0 <= t < n):
                raise InputError(f"transition ({s}, {a!r}, {t}) out of range")
            delta[s].setdefault(a, set()).add(t)
        delta = [{a: frozenset(ts) for a, ts in d.items()} for d in delta]
        return cls(domain, n, initial, final, delta)

    def edges(self):
        """All transitions ``(s, symbol, t)`` in canonical order."""
        key = self.domain.key
        for s in range(self.n):
            for a in sorted(self.delta[s], key=key):
                for t in sorted(self.delta[s][a]):
                    yield s, a, t

    def num_transitions(self):
        return sum(len(ts) for d in self.delta for ts in d.values())

    def is_deterministic(self):
        return len(self.initial) <= 1 and all(
            len(ts) == 1 for d in self.delta for ts in d.values())

    def step(self, states, a):
        out = set()
        for s in states:
            ts = self.delta[s].get(a)
            if ts:
                out |= ts
        return out

    def run(self, word, states=None):
        cur = set(self.initial if states is None else states)
        for a in word:
            cur = self.step(cur, a)
            if not cur:
                break
        return cur

    def accepts(self, word):
        return bool(self.run(word) & self.final)

    def __repr__(self):
        return (f"Nfa(states={self.n}, transitions={self.num_transitions()}, "
                f"initial={sorted(self.initial)}, final={sorted(self.final)})")


class EpsilonNfa:
    """An automaton with extra ε-moves ``eps[s] = {t, …}``."""

    def __init__(self, domain):
        self.domain = domain
        self.n = 0
        self.initial = set()
        self.final = set()
        self.delta = []
        self.eps = []

    def add_state(self):
        self.delta.append({})
        self.eps.append(set())
        self.n += 1
        return self.n - 1

    def add(self, s, a, t):
        if a not in self.domain:
            raise InputError(f"symbol {a!r} not in domain")
        self.delta[s].setdefault(a, set()).add(t)

    def add_eps(self, s, t):
        self.eps[s].add(t)

    def add_path(self, s, word, t):
        """Add a path reading ``word`` from ``s`` to ``t`` through fresh states."""
        word = tuple(word)
        if not word:
            self.add_eps(s, t)
            return
        cur = s
        for a in word[:-1]:
            nxt = self.add_state()
            self.add(cur, a, nxt)
            cur = nxt
        self.add(cur, word[-1], t)


def eps_eliminate(e):
    """Equivalent NFA on the same states (closure-before-move)."""
    closure = []
    for s in range(e.n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in e.eps[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        closure.append(seen)
    delta = []
    for s in range(e.n):
        d = {}
        for u in closure[s]:
            for a, ts in e.delta[u].items():
                d.setdefault(a, set()).update(ts)
        delta.append({a: frozenset(ts) for a, ts in d.items()})
    final = {s for s in range(e.n) if closure[s] & e.final}
    return Nfa(e.domain, e.n, e.initial, final, delta)


# ---------------------------------------------------------------------------
# elementary automata

def empty(domain):
    return Nfa(domain, 0, (), ())


def epsilon(domain):
    return Nfa(domain, 1, {0}, {0})


def word_automaton(domain, word):
    word = tuple(word)
    n = len(word) + 1
    return Nfa.from_edges(domain, n, {0}, {n - 1},
                          [(i, a, i + 1) for i, a in enumerate(word)])


def finite_language(domain, words):
    """Trie automaton for a finite set of words."""
    edges = []
    final = set()
    trie = {(): 0}
    for w in sorted({tuple(w) for w in words},
                    key=lambda w: (len(w), [domain.key(a) for a in w])):
        for i in range(len(w)):
            pre = w[:i + 1]
            if pre not in trie:
                trie[pre] = len(trie)
                edges.append((trie[w[:i]], w[i], trie[pre]))
        final.add(trie[w])
    return Nfa.from_edges(domain, len(trie), {0}, final, edges)


def universal(domain):
    return Nfa.from_edges(domain, 1, {0}, {0}, [(0, a, 0) for a in domain])


# ---------------------------------------------------------------------------
# structural helpers

def _renumber(a, keep):
    keep = sorted(keep)
    new = {s: i for i, s in enumerate(keep)}
    delta = []
    for s in keep:
        d = {}
        for sym, ts in a.delta[s].items():
            ts2 = frozenset(new[t] for t in ts if t in new)
            if ts2:
                d[sym] = ts2
        delta.append(d)
    return Nfa(a.domain, len(keep),
               [new[s] for s in a.initial if s in new],
               [new[s] for s in a.final if s in new], delta)


def reachable_states(a):
    seen = set(a.initial)
    stack = list(a.initial)
    while stack:
        s = stack.pop()
        for ts in a.delta[s].values():
            for t in ts:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen


def coreachable_states(a):
    rev = [set() for _ in range(a.n)]
    for s in range(a.n):
        for ts in a.delta[s].values():
            for t in ts:
                rev[t].add(s)
    seen = set(a.final)
    stack = list(a.final)
    while stack:
        s = stack.pop()
        for u in rev[s]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def trim(a):
    """Drop states that are unreachable or cannot reach a final state."""
    keep = reachable_states(a) & coreachable_states(a)
    if len(keep) == a.n:
        return a
    return _renumber(a, keep)


def determinize(a):
    """Subset construction, exploring symbols in domain order.

    The result is partial (no sink) and its states are numbered in BFS order.
    """
    key = a.domain.key
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    delta = []
    i = 0
    while i < len(order):
        cur = order[i]
        i += 1
        moves = {}
        for s in cur:
            for sym, ts in a.delta[s].items():
                moves.setdefault(sym, set()).update(ts)
        d = {}
        for sym in sorted(moves, key=key):
            tgt = frozenset(moves[sym])
            j = index.get(tgt)
            if j is None:
                j = index[tgt] = len(order)
                order.append(tgt)
            d[sym] = frozenset((j,))
        delta.append(d)
    final = [j for j, S in enumerate(order) if S & a.final]
    return Nfa(a.domain, len(order), {0}, final, delta)


def minimize(a):
    """Minimal partial DFA of a deterministic automaton, canonically numbered."""
    a = trim(a)
    if not a.initial or not a.final:
        return empty(a.domain)
    key = a.domain.key
    succ = [{sym: next(iter(ts)) for sym, ts in a.delta[s].items()}
            for s in range(a.n)]
    syms = [sorted(succ[s], key=key) for s in range(a.n)]
    block = [1 if s in a.final else 0 for s in range(a.n)]
    count = len(set(block))
    while True:
        sigs = {}
        new = []
        for s in range(a.n):
            sig = (block[s], tuple((sym, block[succ[s][sym]]) for sym in syms[s]))
            b = sigs.get(sig)
            if b is None:
                b = sigs[sig] = len(sigs)
            new.append(b)
        block = new
        if len(sigs) == count:
            break
        count = len(sigs)
    # canonical BFS numbering of the quotient
    start = block[next(iter(a.initial))]
    rep = {}
    for s in range(a.n):
        rep.setdefault(block[s], s)
    order = [start]
    index = {start: 0}
    delta = []
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        s = rep[b]
        d = {}
        for sym in syms[s]:
            tb = block[succ[s][sym]]
            j = index.get(tb)
            if j is None:
                j = index[tb] = len(order)
                order.append(tb)
            d[sym] = frozenset((j,))
        delta.append(d)
    final = [j for j, b in enumerate(order) if rep[b] in a.final]
    return Nfa(a.domain, len(order), {0}, final, delta)


def minimal_dfa(a):
    """Canonical minimal DFA: equal languages give identical automata."""
    return minimize(determinize(trim(a)))


def same_structure(a, b):
    return (a.n == b.n and a.initial == b.initial and a.final == b.final
            and a.delta == b.delta)


# ---------------------------------------------------------------------------
# boolean operations

def _check_domains(a, b):
    if a.domain != b.domain:
        raise InputError("automata over different symbol domains")


def union(a, b):
    _check_domains(a, b)
    off = a.n
    delta = [dict(d) for d in a.delta]
    for d in b.delta:
        delta.append({sym: frozenset(t + off for t in ts) for sym, ts in d.items()})
    return Nfa(a.domain, a.n + b.n,
               set(a.initial) | {s + off for s in b.initial},
               set(a.final) | {s + off for s in b.final}, delta)


def union_all(domain, automata):
    out = empty(domain)
    for a in automata:
        out = union(out, a)
    return out


def intersect(a, b):
    """Reachable part of the synchronous product."""
    _check_domains(a, b)
    index = {}
    order = []
    for p in sorted(a.initial):
        for q in sorted(b.initial):
            index[(p, q)] = len(order)
            order.append((p, q))
    delta = []
    i = 0
    while i < len(order):
        p, q = order[i]
        i += 1
        d = {}
        da, db = a.delta[p], b.delta[q]
        if len(db) < len(da):
            common = [s for s in db if s in da]
        else:
            common = [s for s in da if s in db]
        for sym in common:
            tgts = set()
            for p2 in da[sym]:
                for q2 in db[sym]:
                    j = index.get((p2, q2))
                    if j is None:
                        j = index[(p2, q2)] = len(order)
                        order.append((p2, q2))
                    tgts.add(j)
            d[sym] = frozenset(tgts)
        delta.append(d)
    final = [j for j, (p, q) in enumerate(order) if p in a.final and q in b.final]
    return Nfa(a.domain, len(order), range(len(a.initial) * len(b.initial)),
               final, delta)


def complement(a, domain=None):
    """Complement relative to ``domain*`` (defaults to the automaton's domain)."""
    domain = a.domain if domain is None else domain
    if domain != a.domain:
        raise InputError("complement domain differs from automaton domain")
    d = determinize(a)
    sink = d.n
    delta = []
    for s in range(d.n):
        delta.append({sym: d.delta[s].get(sym, frozenset((sink,))) for sym in domain})
    delta.append({sym: frozenset((sink,)) for sym in domain})
    final = set(range(d.n + 1)) - set(d.final)
    return Nfa(domain, d.n + 1, d.initial, final, delta)


def is_empty(a):
    return not (reachable_states(a) & a.final)


def shortest_word(a):
    """Length-lexicographically least accepted word, or ``None``."""
    key = a.domain.key
    start = frozenset(a.initial)
    if not start:
        return None
    parent = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur & a.final:
            out = []
            while parent[cur] is not None:
                cur, sym = parent[cur]
                out.append(sym)
            return tuple(reversed(out))
        moves = {}
        for s in cur:
            for sym, ts in a.delta[s].items():
                moves.setdefault(sym, set()).update(ts)
        for sym in sorted(moves, key=key):
            nxt = frozenset(moves[sym])
            if nxt not in parent:
                parent[nxt] = (cur, sym)
                queue.append(nxt)
    return None


def is_subset(a, b):
    """``(True, None)`` if L(a) ⊆ L(b), else ``(False, shortest witness)``."""
    _check_domains(a, b)
    key = a.domain.key
    start_b = frozenset(b.initial)
    parent = {}
    queue = deque()
    for p in sorted(a.initial):
        node = (p, start_b)
        if node not in parent:
            parent[node] = None
            queue.append(node)
    while queue:
        node = queue.popleft()
        p, S = node
        if p in a.final and not (S & b.final):
            out = []
            while parent[node] is not None:
                node, sym = parent[node]
                out.append(sym)
            return False, tuple(reversed(out))
        for sym in sorted(a.delta[p], key=key):
            S2 = frozenset(b.step(S, sym))
            for p2 in sorted(a.delta[p][sym]):
                nxt = (p2, S2)
                if nxt not in parent:
                    parent[nxt] = (node, sym)
                    queue.append(nxt)
    return True, None


def equivalent(a, b):
    """``(True, None)`` or ``(False, w)`` with ``w`` a length-lex least word
    in the symmetric difference."""
    _check_domains(a, b)
    key = a.domain.key
    start = (frozenset(a.initial), frozenset(b.initial))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        S, T = node
        if bool(S & a.final) != bool(T & b.final):
            out = []
            while parent[node] is not None:
                node, sym = parent[node]
                out.append(sym)
            return False, tuple(reversed(out))
        syms = set()
        for s in S:
            syms.update(a.delta[s])
        for t in T:
            syms.update(b.delta[t])
        for sym in sorted(syms, key=key):
            nxt = (frozenset(a.step(S, sym)), frozenset(b.step(T, sym)))
            if nxt not in parent:
                parent[nxt] = (node, sym)
                queue.append(nxt)
    return True, None


# ---------------------------------------------------------------------------
# rational operations

def concat(a, b):
    _check_domains(a, b)
    e = EpsilonNfa(a.domain)
    for _ in range(a.n + b.n):
        e.add_state()
    for s, sym, t in a.edges():
        e.add(s, sym, t)
    for s, sym, t in b.edges():
        e.add(s + a.n, sym, t + a.n)
    for f in a.final:
        for i in b.initial:
            e.add_eps(f, i + a.n)
    e.initial = set(a.initial)
    e.final = {f + a.n for f in b.final}
    return eps_eliminate(e)


def star(a):
    e = EpsilonNfa(a.domain)
    for _ in range(a.n + 1):
        e.add_state()
    hub = a.n
    for s, sym, t in a.edges():
        e.add(s, sym, t)
    for i in a.initial:
        e.add_eps(hub, i)
    for f in a.final:
        e.add_eps(f, hub)
    e.initial = {hub}
    e.final = {hub}
    return eps_eliminate(e)


def reverse(a):
    edges = [(t, sym, s) for s, sym, t in a.edges()]
    return Nfa.from_edges(a.domain, a.n, a.final, a.initial, edges)


def hom_image(a, h, codomain):
    """Image under the morphism ``h`` (symbol → tuple of codomain symbols)."""
    e = EpsilonNfa(codomain)
    for _ in range(a.n):
        e.add_state()
    for s, sym, t in a.edges():
        e.add_path(s, h(sym) if callable(h) else h[sym], t)
    e.initial = set(a.initial)
    e.final = set(a.final)
    return eps_eliminate(e)


def inv_hom_image(a, h, domain):
    """Preimage ``{w ∈ domain* : h(w) ∈ L(a)}``."""
    delta = []
    for s in range(a.n):
        d = {}
        for sym in domain:
            img = h(sym) if callable(h) else h[sym]
            ts = a.run(img, {s})
            if ts:
                d[sym] = frozenset(ts)
        delta.append(d)
    return Nfa(domain, a.n, a.initial, a.final, delta)


def right_quotient(a, r):
    """Accepts ``u`` iff ``u·v ∈ L(a)`` for some ``v ∈ L(r)``."""
    _check_domains(a, r)
    # (s, x) is good when some word leads s to F_a and x to F_r simultaneously
    rev = {}
    for s in range(a.n):
        for sym, ts in a.delta[s].items():
            for x in range(r.n):
                xs = r.delta[x].get(sym)
                if not xs:
                    continue
                for t in ts:
                    for y in xs:
                        rev.setdefault((t, y), []).append((s, x))
    good = {(f, g) for f in a.final for g in r.final}
    stack = list(good)
    while stack:
        node = stack.pop()
        for pre in rev.get(node, ()):
            if pre not in good:
                good.add(pre)
                stack.append(pre)
    final = {s for s in range(a.n) if any((s, i) in good for i in r.initial)}
    return Nfa(a.domain, a.n, a.initial, final, [dict(d) for d in a.delta])


def swap_image(a, alphabet):
    """``{u b a v : u a b v ∈ L(a), (a, b) independent}`` (one transposition).

    States: ``(s, 0)`` before the swap, ``(s, 1)`` after it, and pending
    states ``(s, b)`` after reading the ``b`` that was moved forward.
    """
    letters = alphabet.letters
    index = {}
    order = []

    def sid(node):
        j = index.get(node)
        if j is None:
            j = index[node] = len(order)
            order.append(node)
        return j

    edges = []
    for s in range(a.n):
        sid((s, 0))
    for s in range(a.n):
        sid((s, 1))
    for s in range(a.n):
        for sym, ts in a.delta[s].items():
            for t in ts:
                edges.append((sid((s, 0)), sym, sid((t, 0))))
                edges.append((sid((s, 1)), sym, sid((t, 1))))
        # original reads x then y with x ∥ y; the image reads y then x
        for x, mids in a.delta[s].items():
            for y in letters:
                if x == y or alphabet.depends(x, y):
                    continue
                ends = set()
                for m in mids:
                    ends |= a.delta[m].get(y, frozenset())
                if not ends:
                    continue
                pend = sid((s, "pending", y, x))
                edges.append((sid((s, 0)), y, pend))
                for t in ends:
                    edges.append((pend, x, sid((t, 1))))
    initial = [index[(s, 0)] for s in a.initial]
    final = [index[(s, 1)] for s in a.final]
    return Nfa.from_edges(a.domain, len(order), initial, final, edges)


def words(a, max_len):
    """All accepted words up to ``max_len`` as a set of tuples."""
    out = set()
    layer = {(): frozenset(a.initial)}
    for length in range(max_len + 1):
        for w, S in layer.items():
            if S & a.final:
                out.add(w)
        if length == max_len:
            break
        nxt = {}
        for w, S in layer.items():
            moves = {}
            for s in S:
                for sym, ts in a.delta[s].items():
                    moves.setdefault(sym, set()).update(ts)
            for sym, ts in moves.items():
                nxt[w + (sym,)] = frozenset(ts)
        layer = nxt
    return out
